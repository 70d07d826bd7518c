"""Equal-count phase segmentation, sentiment bucketing and period tags."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from datetime import date, timedelta

from .corpus import Corpus

MODE_DAY_ALIGNED = "day-aligned"
MODE_EXACT_COUNT = "exact-count"

BUCKETS = ("VeryBad", "Bad", "Neutral", "Good", "VeryGood")

EARLY, MID, LATE = "Early", "Mid", "Late"

NEGATIVE, BOUNDARY, POSITIVE = "Negative", "Boundary", "Positive"


class PartitionError(Exception):
    pass


def sentiment_bucket(score: int) -> str:
    """Score bands: [0:1] VeryBad, [2:4] Bad, [5:7] Neutral, [8:9] Good, 10 VeryGood."""
    if not 0 <= score <= 10:
        raise ValueError(f"score out of range: {score}")
    if score <= 1:
        return "VeryBad"
    if score <= 4:
        return "Bad"
    if score <= 7:
        return "Neutral"
    if score <= 9:
        return "Good"
    return "VeryGood"


def binary_sentiment(score: int) -> str:
    """Negative below 6, Positive above 6; exactly 6 stays unassigned."""
    if not 0 <= score <= 10:
        raise ValueError(f"score out of range: {score}")
    if score < 6:
        return NEGATIVE
    if score > 6:
        return POSITIVE
    return BOUNDARY


def score_band(score: int) -> str:
    """Scoring-behaviour classes used when crossing clusters with scores."""
    if score < 2:
        return "x<2"
    if score <= 5:
        return "2:5"
    if score <= 9:
        return "6:9"
    return "x=10"


SCORE_BANDS = ("x<2", "2:5", "6:9", "x=10")


@dataclass(frozen=True)
class Phase:
    index: int
    first_day: date
    last_day: date
    count: int


@dataclass(frozen=True)
class PhasePartition:
    mode: str
    phases: tuple[Phase, ...]
    # exact-count mode: corpus positions where each phase starts (len p+1)
    cuts: tuple[int, ...] = ()

    @property
    def p(self) -> int:
        return len(self.phases)

    def phase_of(self, position: int, day: date) -> int:
        """1-based phase index for a review at a corpus position on a day."""
        if self.mode == MODE_EXACT_COUNT:
            idx = bisect_left(self.cuts, position + 1, lo=1) - 1
            return idx + 1
        for ph in self.phases:
            if ph.first_day <= day <= ph.last_day:
                return ph.index
        raise PartitionError(f"day {day} outside partition range")

    def period_of(self, phase_index: int) -> str:
        """Early = phases 1-2, Late = last two phases, Mid in between."""
        if phase_index <= 2:
            return EARLY
        if phase_index >= self.p - 1:
            return LATE
        return MID


def _day_counts(corpus: Corpus) -> list[tuple[date, int]]:
    counts: dict[date, int] = {}
    for r in corpus:
        counts[r.day] = counts.get(r.day, 0) + 1
    return sorted(counts.items())


def partition_equal_count(
    corpus: Corpus, p: int = 5, mode: str = MODE_DAY_ALIGNED
) -> PhasePartition:
    """Split the corpus into p consecutive phases of near-equal review counts.

    Day-aligned mode never splits a day: boundaries chase the cumulative
    quota i*N/p greedily, so each phase count stays within one day's volume
    of N/p. Exact-count mode splits at review indices (sizes differ by <= 1).
    """
    if p < 1:
        raise PartitionError("p must be >= 1")
    n = len(corpus)
    if n == 0:
        raise PartitionError("empty corpus")

    if mode == MODE_EXACT_COUNT:
        base, extra = divmod(n, p)
        cuts = [0]
        for i in range(p):
            cuts.append(cuts[-1] + base + (1 if i < extra else 0))
        phases = []
        reviews = corpus.reviews
        for i in range(p):
            lo, hi = cuts[i], cuts[i + 1]
            if lo == hi:
                prev_day = reviews[min(lo, n - 1)].day
                phases.append(Phase(index=i + 1, first_day=prev_day, last_day=prev_day, count=0))
            else:
                phases.append(
                    Phase(
                        index=i + 1,
                        first_day=reviews[lo].day,
                        last_day=reviews[hi - 1].day,
                        count=hi - lo,
                    )
                )
        return PhasePartition(mode=mode, phases=tuple(phases), cuts=tuple(cuts))

    if mode != MODE_DAY_ALIGNED:
        raise PartitionError(f"unknown mode: {mode!r}")

    days = _day_counts(corpus)
    if p > len(days):
        raise PartitionError(f"p={p} exceeds the {len(days)} distinct days in the corpus")

    cut_idx: list[int] = []  # index of the last day of each of the first p-1 phases
    start = 0
    cum = 0
    for b in range(1, p):
        quota = b * n / p
        e_max = len(days) - (p - b) - 1
        j = start
        c = cum + days[j][1]
        while j < e_max and abs(c + days[j + 1][1] - quota) < abs(c - quota):
            j += 1
            c += days[j][1]
        cut_idx.append(j)
        cum = c
        start = j + 1

    phases = []
    start = 0
    for i in range(p):
        end = cut_idx[i] if i < p - 1 else len(days) - 1
        count = sum(cnt for _, cnt in days[start : end + 1])
        phases.append(
            Phase(index=i + 1, first_day=days[start][0], last_day=days[end][0], count=count)
        )
        start = end + 1
    return PhasePartition(mode=mode, phases=tuple(phases))


@dataclass(frozen=True)
class TrendTable:
    # (day, {bucket: count}) for every day in the corpus range, gaps included
    daily: tuple[tuple[date, dict[str, int]], ...]
    # (phase index, score, relative frequency within the phase)
    per_phase: tuple[tuple[int, int, float], ...]


def trend_table(corpus: Corpus, part: PhasePartition) -> TrendTable:
    """Absolute sentiment counts per day plus score frequencies per phase."""
    if len(corpus) == 0:
        return TrendTable(daily=(), per_phase=())
    first = corpus.reviews[0].day
    last = max(r.day for r in corpus)
    by_day: dict[date, dict[str, int]] = {}
    d = first
    while d <= last:
        by_day[d] = {b: 0 for b in BUCKETS}
        d += timedelta(days=1)
    phase_scores: dict[int, dict[int, int]] = {ph.index: {} for ph in part.phases}
    for pos, r in enumerate(corpus):
        by_day[r.day][sentiment_bucket(r.score)] += 1
        ph = part.phase_of(pos, r.day)
        phase_scores[ph][r.score] = phase_scores[ph].get(r.score, 0) + 1
    per_phase = []
    for ph, scores in sorted(phase_scores.items()):
        total = sum(scores.values())
        for score in range(11):
            if total:
                per_phase.append((ph, score, scores.get(score, 0) / total))
    return TrendTable(daily=tuple(sorted(by_day.items())), per_phase=tuple(per_phase))
