"""Rhetorical-objectivity clusters and every aggregate table of the study."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .corpus import Corpus, Review
from .phases import (
    BOUNDARY,
    EARLY,
    LATE,
    NEGATIVE,
    POSITIVE,
    SCORE_BANDS,
    PhasePartition,
    binary_sentiment,
    score_band,
)
from .textnorm import lexical_diversity
from .vocab import LABELS, LabelAssignment

CLUSTER_NAMES = {1: "NoLabel", 2: "ValueOnly", 3: "Mixed", 4: "TechOnly"}


def cluster_of(assignment: LabelAssignment) -> int:
    """Map P/Q/M/T dummies to the four-way rhetorical-objectivity partition."""
    value = assignment.P or assignment.Q or assignment.M
    tech = assignment.T
    if not value and not tech:
        return 1
    if value and not tech:
        return 2
    if value and tech:
        return 3
    return 4


def lower_median(values: Sequence[int]) -> int | None:
    """Median with the lower of the two middle values on even counts."""
    if not values:
        return None
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


@dataclass(frozen=True)
class StatRow:
    key: str
    n: int
    mean_x: float | None = None
    f_x10: float | None = None
    f_xlt2: float | None = None
    med_d: int | None = None
    f_k1: float | None = None
    f_x: float | None = None
    early_share: float | None = None
    late_share: float | None = None


def _aggregate(key: str, reviews: Sequence[Review], total: int | None = None) -> StatRow:
    n = len(reviews)
    if n == 0:
        return StatRow(key=key, n=0, f_x=0.0 if total else None)
    scores = [r.score for r in reviews]
    return StatRow(
        key=key,
        n=n,
        mean_x=sum(scores) / n,
        f_x10=sum(1 for x in scores if x == 10) / n,
        f_xlt2=sum(1 for x in scores if x < 2) / n,
        med_d=lower_median([lexical_diversity(r.body) for r in reviews]),
        f_k1=sum(r.experienced for r in reviews) / n,
        f_x=(n / total) if total else None,
    )


def mean_score(corpus: Corpus) -> float:
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    return sum(r.score for r in corpus) / len(corpus)


def polarity_share(corpus: Corpus) -> float:
    """Share of tactically extreme scores (0, 1 and 10)."""
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    return sum(1 for r in corpus if r.score in (0, 1, 10)) / len(corpus)


def score_table(corpus: Corpus) -> list[StatRow]:
    """One row per score 0..10: n, relative frequency, Med(D), f(K=1)."""
    total = len(corpus)
    by_score: dict[int, list[Review]] = {x: [] for x in range(11)}
    for r in corpus:
        by_score[r.score].append(r)
    return [_aggregate(str(x), by_score[x], total=total or None) for x in range(11)]


def label_stats(
    corpus: Corpus,
    assignments: Iterable[LabelAssignment],
    labels: Sequence[str] | None = None,
) -> list[StatRow]:
    """Per-label scoring behaviour; rows are non-exclusive across labels."""
    assigned = list(assignments)
    by_id = {a.review_id: a for a in assigned}
    if labels is None:
        labels = list(LABELS) + sorted(
            {lab for a in assigned for lab in a.labels} - set(LABELS)
        )
    rows = []
    for label in labels:
        members = [r for r in corpus if by_id[r.id].has(label)]
        rows.append(_aggregate(label, members))
    return rows


_CELL_ORDER: list[tuple[int, int, int, int]] = []
for size in range(5):
    for positions in combinations(range(4), size):
        cell = [0, 0, 0, 0]
        for pos in positions:
            cell[pos] = 1
        _CELL_ORDER.append(tuple(cell))  # type: ignore[arg-type]


def cell_of(assignment: LabelAssignment) -> tuple[int, int, int, int]:
    return (
        int(assignment.P),
        int(assignment.Q),
        int(assignment.M),
        int(assignment.T),
    )


@dataclass(frozen=True)
class CellRow:
    cell: tuple[int, int, int, int]
    dim_value: str
    n: int
    mean_x: float | None
    med_d: int | None
    f_k1: float | None


@dataclass(frozen=True)
class CellTable:
    dim: str
    rows: tuple[CellRow, ...]
    excluded: int  # boundary scores left out of the sentiment table


def cell_stats(
    corpus: Corpus,
    assignments: Iterable[LabelAssignment],
    dim: str = "sentiment",
    partition: PhasePartition | None = None,
) -> CellTable:
    """The 16-cell P*Q*M*T disaggregation crossed with sentiment or period.

    The sentiment table uses the binary rule (x=6 excluded and counted);
    the period table keeps the Early and Late rows of the study.
    """
    by_id = {a.review_id: a for a in assignments}
    if dim == "sentiment":
        dim_values = (NEGATIVE, POSITIVE)
    elif dim == "period":
        if partition is None:
            raise ValueError("period dim needs a partition")
        dim_values = (EARLY, LATE)
    else:
        raise ValueError(f"unknown dim: {dim!r}")

    groups: dict[tuple[tuple[int, int, int, int], str], list[Review]] = {}
    excluded = 0
    for pos, r in enumerate(corpus):
        cell = cell_of(by_id[r.id])
        if dim == "sentiment":
            value = binary_sentiment(r.score)
            if value == BOUNDARY:
                excluded += 1
                continue
        else:
            assert partition is not None
            value = partition.period_of(partition.phase_of(pos, r.day))
            if value not in dim_values:
                continue
        groups.setdefault((cell, value), []).append(r)

    rows = []
    for cell in _CELL_ORDER:
        for value in dim_values:
            members = groups.get((cell, value), [])
            agg = _aggregate("", members)
            rows.append(
                CellRow(
                    cell=cell,
                    dim_value=value,
                    n=agg.n,
                    mean_x=agg.mean_x,
                    med_d=agg.med_d,
                    f_k1=agg.f_k1,
                )
            )
    return CellTable(dim=dim, rows=tuple(rows), excluded=excluded)


def fake_summary(
    corpus: Corpus, flagged_ids: frozenset[str], partition: PhasePartition | None = None
) -> tuple[StatRow, StatRow]:
    """Flagged-versus-rest comparison: n, Med(D), f(K=1), mean, Early, Late."""
    flagged: list[tuple[int, Review]] = []
    clean: list[tuple[int, Review]] = []
    for pos, r in enumerate(corpus):
        (flagged if r.id in flagged_ids else clean).append((pos, r))

    def row(key: str, members: list[tuple[int, Review]]) -> StatRow:
        agg = _aggregate(key, [r for _, r in members])
        if partition is None or agg.n == 0:
            return agg
        periods = [partition.period_of(partition.phase_of(pos, r.day)) for pos, r in members]
        early = sum(1 for p in periods if p == EARLY) / agg.n
        late = sum(1 for p in periods if p == LATE) / agg.n
        return StatRow(
            key=agg.key,
            n=agg.n,
            mean_x=agg.mean_x,
            f_x10=agg.f_x10,
            f_xlt2=agg.f_xlt2,
            med_d=agg.med_d,
            f_k1=agg.f_k1,
            early_share=early,
            late_share=late,
        )

    return row("Yes", flagged), row("No", clean)


@dataclass(frozen=True)
class ShiftRow:
    cluster: int
    band: str  # score band or "all"
    metric: str  # "f_k1" | "med_d"
    early: float | None
    late: float | None
    delta: float | None
    low_n: bool


def shift_report(
    corpus: Corpus,
    assignments: Iterable[LabelAssignment],
    partition: PhasePartition,
    low_n_threshold: int = 30,
) -> list[ShiftRow]:
    """Early-versus-Late movement of f(K=1) and Med(D) per cluster and band."""
    if partition.p < 4:
        raise ValueError("shift report needs a partition with at least 4 phases")
    by_id = {a.review_id: a for a in assignments}
    groups: dict[tuple[int, str, str], list[Review]] = {}
    for pos, r in enumerate(corpus):
        period = partition.period_of(partition.phase_of(pos, r.day))
        if period not in (EARLY, LATE):
            continue
        cluster = cluster_of(by_id[r.id])
        for band in (score_band(r.score), "all"):
            groups.setdefault((cluster, band, period), []).append(r)

    rows = []
    for cluster in sorted(CLUSTER_NAMES):
        for band in SCORE_BANDS + ("all",):
            early = groups.get((cluster, band, EARLY), [])
            late = groups.get((cluster, band, LATE), [])
            low_n = min(len(early), len(late)) < low_n_threshold
            for metric in ("f_k1", "med_d"):
                def value(members: list[Review]) -> float | None:
                    if not members:
                        return None
                    if metric == "f_k1":
                        return sum(r.experienced for r in members) / len(members)
                    med = lower_median([lexical_diversity(r.body) for r in members])
                    return float(med) if med is not None else None

                v_early, v_late = value(early), value(late)
                delta = (v_late - v_early) if v_early is not None and v_late is not None else None
                rows.append(
                    ShiftRow(
                        cluster=cluster,
                        band=band,
                        metric=metric,
                        early=v_early,
                        late=v_late,
                        delta=delta,
                        low_n=low_n,
                    )
                )
    return rows


@dataclass(frozen=True)
class PrevalenceRow:
    period: str
    band: str
    key: str  # cluster name or value-based class
    n: int
    share: float | None  # of the (period, band) group


def cluster_prevalence(
    corpus: Corpus, assignments: Iterable[LabelAssignment], partition: PhasePartition
) -> list[PrevalenceRow]:
    """Cluster composition of every scoring class, early versus late."""
    by_id = {a.review_id: a for a in assignments}
    counts: dict[tuple[str, str, int], int] = {}
    totals: dict[tuple[str, str], int] = {}
    for pos, r in enumerate(corpus):
        period = partition.period_of(partition.phase_of(pos, r.day))
        if period not in (EARLY, LATE):
            continue
        band = score_band(r.score)
        cluster = cluster_of(by_id[r.id])
        counts[(period, band, cluster)] = counts.get((period, band, cluster), 0) + 1
        totals[(period, band)] = totals.get((period, band), 0) + 1
    rows = []
    for period in (EARLY, LATE):
        for band in SCORE_BANDS:
            total = totals.get((period, band), 0)
            for cluster in sorted(CLUSTER_NAMES):
                n = counts.get((period, band, cluster), 0)
                rows.append(
                    PrevalenceRow(
                        period=period,
                        band=band,
                        key=CLUSTER_NAMES[cluster],
                        n=n,
                        share=(n / total) if total else None,
                    )
                )
    return rows


VALUE_CLASSES = ("IdeologicalOnly", "MetaOnly", "IdeologicalAndMeta")


def value_class(assignment: LabelAssignment) -> str | None:
    """Sub-class of value-based reviews: ideological (P/Q) vs meta-opinion."""
    ideological = assignment.P or assignment.Q
    if ideological and assignment.M:
        return "IdeologicalAndMeta"
    if ideological:
        return "IdeologicalOnly"
    if assignment.M:
        return "MetaOnly"
    return None


def value_class_prevalence(
    corpus: Corpus, assignments: Iterable[LabelAssignment], partition: PhasePartition
) -> list[PrevalenceRow]:
    """Composition of value-based reviews by sub-class, early versus late."""
    by_id = {a.review_id: a for a in assignments}
    counts: dict[tuple[str, str, str], int] = {}
    totals: dict[tuple[str, str], int] = {}
    for pos, r in enumerate(corpus):
        period = partition.period_of(partition.phase_of(pos, r.day))
        if period not in (EARLY, LATE):
            continue
        cls = value_class(by_id[r.id])
        if cls is None:
            continue
        band = score_band(r.score)
        counts[(period, band, cls)] = counts.get((period, band, cls), 0) + 1
        totals[(period, band)] = totals.get((period, band), 0) + 1
    rows = []
    for period in (EARLY, LATE):
        for band in SCORE_BANDS:
            total = totals.get((period, band), 0)
            for cls in VALUE_CLASSES:
                n = counts.get((period, band, cls), 0)
                rows.append(
                    PrevalenceRow(
                        period=period,
                        band=band,
                        key=cls,
                        n=n,
                        share=(n / total) if total else None,
                    )
                )
    return rows
