"""Batch pipeline: configuration, stage orchestration and table emission."""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .corpus import (
    FORMAT_DELIMITED,
    FORMATS,
    Corpus,
    IngestError,
    attach_user_history,
    ingest_reviews,
    load_history,
    write_corpus,
    write_rejections,
)
from .fakecues import SimilarityConfig, annotate_flags, detect_fakes, flags_rows
from .langid import (
    GroupingScheme,
    apply_overrides,
    language_summary,
    load_overrides,
    needs_review,
    tag_corpus,
)
from .phases import MODE_DAY_ALIGNED, partition_equal_count, trend_table
from .stats import (
    cell_stats,
    cluster_prevalence,
    fake_summary,
    label_stats,
    score_table,
    shift_report,
    value_class_prevalence,
)
from .textnorm import load_stoplist
from .vocab import (
    DEFAULT_CANDIDATES,
    Vocabulary,
    default_vocabularies,
    label_corpus,
    load_vocabulary,
)

TABLE_NAMES = (
    "table1",
    "table3",
    "tableA1",
    "tableC1",
    "tableC2",
    "tableD1",
    "fig2",
    "fig4",
    "fig5",
    "fig6",
    "figC1",
)


class ConfigError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple[str, ...] = ()
    format: str = FORMAT_DELIMITED
    strict: bool = False
    english_only: bool = False
    vocab_paths: dict[str, str] = field(default_factory=dict)  # empty: shipped files
    stopword_path: str | None = None
    scheme_path: str | None = None
    overrides_path: str | None = None
    history_path: str | None = None
    similarity: SimilarityConfig = SimilarityConfig()
    phases: int = 5
    phase_mode: str = MODE_DAY_ALIGNED
    candidates: int = DEFAULT_CANDIDATES
    out_dir: str = "out"
    plot: bool = False

    def snapshot(self) -> dict[str, Any]:
        snap = asdict(self)
        snap["vocab_paths"] = dict(sorted(self.vocab_paths.items()))
        return snap


def load_config(path: str | Path) -> PipelineConfig:
    """Declarative TOML config; flag overrides are applied by the CLI."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"bad config syntax: {e}") from e

    inp = raw.get("input", {})
    lang = raw.get("language", {})
    fake = raw.get("fake", {})
    phases = raw.get("phases", {})
    vocab = raw.get("vocab", {})
    output = raw.get("output", {})
    base = Path(path).parent

    def resolve(value: str | None) -> str | None:
        if value is None:
            return None
        p = Path(value)
        return str(p if p.is_absolute() else base / p)

    expansion = raw.get("expansion", {})
    inputs = inp.get("paths", [])
    if isinstance(inputs, str):
        inputs = [inputs]
    sim = SimilarityConfig(
        username_threshold=float(fake.get("username_threshold", 0.90)),
        body_threshold=float(fake.get("body_threshold", 0.85)),
        min_username_len=int(fake.get("min_username_len", 6)),
        min_body_len=int(fake.get("min_body_len", 75)),
        length_band=float(fake.get("length_band", 0.20)),
        username_ngram=int(fake.get("username_ngram", 3)),
        body_ngram=int(fake.get("body_ngram", 4)),
    )
    return PipelineConfig(
        inputs=tuple(resolve(p) for p in inputs),
        format=inp.get("format", FORMAT_DELIMITED),
        strict=bool(inp.get("strict", False)),
        english_only=bool(lang.get("english_only", False)),
        vocab_paths={k: resolve(v) for k, v in vocab.items() if isinstance(v, str)},
        stopword_path=resolve(raw.get("stopwords", {}).get("path")),
        scheme_path=resolve(lang.get("scheme")),
        overrides_path=resolve(lang.get("overrides")),
        history_path=resolve(raw.get("history", {}).get("path")),
        similarity=sim,
        phases=int(phases.get("count", 5)),
        phase_mode=phases.get("mode", MODE_DAY_ALIGNED),
        candidates=int(expansion.get("candidates", DEFAULT_CANDIDATES)),
        out_dir=resolve(output.get("dir", "out")) or "out",
        plot=bool(output.get("plot", False)),
    )


def validate_config(cfg: PipelineConfig) -> list[str]:
    """List every problem instead of stopping at the first one."""
    problems = []
    if not cfg.inputs:
        problems.append("no input paths configured")
    for p in cfg.inputs:
        if not Path(p).exists():
            problems.append(f"input file not found: {p}")
    if cfg.format not in FORMATS:
        problems.append(f"unknown input format: {cfg.format!r}")
    for label, p in sorted(cfg.vocab_paths.items()):
        if not Path(p).exists():
            problems.append(f"vocabulary file for {label} not found: {p}")
    for name, p in (
        ("stop-word list", cfg.stopword_path),
        ("grouping scheme", cfg.scheme_path),
        ("override file", cfg.overrides_path),
        ("history file", cfg.history_path),
    ):
        if p is not None and not Path(p).exists():
            problems.append(f"{name} not found: {p}")
    problems.extend(cfg.similarity.problems())
    if cfg.phases < 1:
        problems.append(f"phases.count must be >= 1: {cfg.phases}")
    if cfg.phase_mode not in (MODE_DAY_ALIGNED, "exact-count"):
        problems.append(f"unknown phase mode: {cfg.phase_mode!r}")
    if cfg.candidates < 1:
        problems.append(f"vocab.candidates must be >= 1: {cfg.candidates}")
    return problems


@dataclass
class RunManifest:
    config: dict[str, Any]
    tool_version: str = __version__
    vocabulary_versions: dict[str, int] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    error: str | None = None


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class TableWriter:
    """Writes each table as a delimited file and as record lines."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir / "tables"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def write(self, name: str, header: list[str], rows: list[list[Any]]) -> None:
        csv_path = self.dir / f"{name}.csv"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        csv_path.write_text(buf.getvalue(), encoding="utf-8")
        self.written.append(csv_path)

        jsonl_path = self.dir / f"{name}.jsonl"
        with open(jsonl_path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(dict(zip(header, row)), ensure_ascii=False))
                fh.write("\n")
        self.written.append(jsonl_path)


def _stat_rows(rows: list, header: list[str]) -> list[list[Any]]:
    return [[getattr(r, h) for h in header] for r in rows]


def load_vocabularies(cfg: PipelineConfig) -> dict[str, Vocabulary]:
    if not cfg.vocab_paths:
        return default_vocabularies()
    return {
        label: load_vocabulary(path, label=label)
        for label, path in sorted(cfg.vocab_paths.items())
    }


def run_pipeline(cfg: PipelineConfig) -> RunManifest:
    """Run every stage and emit all tables; partial outputs are removed on failure."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=cfg.snapshot())
    writer = TableWriter(out_dir)
    extra_outputs: list[Path] = []
    stage = "setup"

    def timed(name: str, fn: Callable[[], Any]) -> Any:
        nonlocal stage
        stage = name
        started = time.perf_counter()
        result = fn()
        manifest.timings[name] = time.perf_counter() - started
        return result

    try:
        corpus, n_read, n_rejected, rejections = timed("ingest", lambda: _ingest_all(cfg))
        manifest.counts["records_read"] = n_read
        manifest.counts["rejected"] = n_rejected
        manifest.counts["ingested"] = len(corpus)

        if cfg.history_path:
            corpus, missing = timed(
                "history", lambda: attach_user_history(corpus, load_history(cfg.history_path))
            )
            manifest.counts["history_missing"] = missing

        scheme = (
            GroupingScheme.from_file(cfg.scheme_path)
            if cfg.scheme_path
            else GroupingScheme.default_scheme()
        )
        corpus = timed("language", lambda: tag_corpus(corpus, scheme))
        if cfg.overrides_path:
            corpus, applied = apply_overrides(corpus, load_overrides(cfg.overrides_path), scheme)
            manifest.counts["overrides_applied"] = applied
        lang_rows = language_summary(corpus, scheme)
        unsure = needs_review(corpus)

        analyzed = corpus
        if cfg.english_only:
            english_group = scheme.group("en")
            analyzed = corpus.with_reviews(
                [r for r in corpus if r.language_group == english_group]
            )
        manifest.counts["language_filtered_out"] = len(corpus) - len(analyzed)
        manifest.counts["analyzed"] = len(analyzed)
        if len(analyzed) == 0:
            raise IngestError("empty corpus after filtering")

        fake_report = timed("fakes", lambda: detect_fakes(analyzed, cfg.similarity))
        analyzed = annotate_flags(analyzed, fake_report)
        manifest.counts["flagged"] = len(fake_report.flags)

        stoplist = load_stoplist(cfg.stopword_path)
        vocabs = load_vocabularies(cfg)
        manifest.vocabulary_versions = {k: v.version for k, v in sorted(vocabs.items())}
        assignments = timed("label", lambda: label_corpus(analyzed, vocabs.values()))
        for label in sorted(vocabs):
            manifest.counts[f"labeled_{label}"] = sum(1 for a in assignments if a.has(label))

        partition = timed(
            "phases", lambda: partition_equal_count(analyzed, cfg.phases, cfg.phase_mode)
        )

        stage = "report"
        started = time.perf_counter()
        _write_tables(
            writer,
            analyzed,
            lang_rows,
            fake_report,
            assignments,
            partition,
            extra_outputs,
            out_dir,
            rejections,
            unsure,
        )
        manifest.timings["report"] = time.perf_counter() - started

        if cfg.plot:
            stage = "plot"
            extra_outputs.extend(_write_plots(out_dir, analyzed, partition, assignments))

        manifest.outputs = sorted(
            str(p.relative_to(out_dir)) for p in writer.written + extra_outputs
        )
    except Exception as e:
        for p in writer.written + extra_outputs:
            p.unlink(missing_ok=True)
        manifest.error = f"stage '{stage}' failed: {e}"
        _write_manifest(out_dir, manifest)
        raise StageError(stage, e) from e

    _write_manifest(out_dir, manifest)
    return manifest


def _write_manifest(out_dir: Path, manifest: RunManifest) -> None:
    path = out_dir / "manifest.json"
    payload = {
        "tool_version": manifest.tool_version,
        "config": manifest.config,
        "vocabulary_versions": manifest.vocabulary_versions,
        "counts": manifest.counts,
        "timings": manifest.timings,
        "outputs": manifest.outputs,
        "error": manifest.error,
    }
    path.write_text(json.dumps(payload, indent=2, default=str) + "\n", encoding="utf-8")


def _ingest_all(cfg: PipelineConfig):
    reviews = []
    total_read = 0
    rejections = []
    provenance = None
    fields = None
    for path in cfg.inputs:
        result = ingest_reviews(path, cfg.format, cfg.strict)
        reviews.extend(result.corpus.reviews)
        total_read += result.records_read
        rejections.extend(result.rejected)
        provenance = result.corpus.provenance
        fields = result.corpus.fields_present
    if provenance is None:
        raise IngestError("no inputs")
    merged = Corpus(
        reviews=tuple(sorted(reviews, key=lambda r: r.day)),
        provenance=provenance,
        fields_present=fields or (),
    )
    ids = [r.id for r in merged]
    if len(set(ids)) != len(ids):
        raise IngestError("duplicate review ids across input files")
    return merged, total_read, len(rejections), rejections


def _write_tables(
    writer: TableWriter,
    corpus,
    lang_rows,
    fake_report,
    assignments,
    partition,
    extra_outputs: list[Path],
    out_dir: Path,
    rejections,
    unsure,
) -> None:
    writer.write(
        "table1",
        ["group", "n", "mean_x"],
        [[row.group, row.n, row.mean_score] for row in lang_rows],
    )
    writer.write(
        "table3",
        ["key", "n", "mean_x", "f_x10", "f_xlt2"],
        _stat_rows(label_stats(corpus, assignments), ["key", "n", "mean_x", "f_x10", "f_xlt2"]),
    )
    writer.write(
        "tableA1",
        ["key", "n", "f_x", "med_d", "f_k1"],
        _stat_rows(score_table(corpus), ["key", "n", "f_x", "med_d", "f_k1"]),
    )
    c1 = cell_stats(corpus, assignments, "sentiment")
    writer.write(
        "tableC1",
        ["P", "Q", "M", "T", "sentiment", "n", "med_d", "f_k1", "excluded_boundary"],
        [
            [*row.cell, row.dim_value, row.n, row.med_d, row.f_k1, c1.excluded]
            for row in c1.rows
        ],
    )
    c2 = cell_stats(corpus, assignments, "period", partition)
    writer.write(
        "tableC2",
        ["P", "Q", "M", "T", "period", "n", "mean_x", "med_d", "f_k1"],
        [
            [*row.cell, row.dim_value, row.n, row.mean_x, row.med_d, row.f_k1]
            for row in c2.rows
        ],
    )
    d1 = fake_summary(corpus, fake_report.flagged_ids(), partition)
    writer.write(
        "tableD1",
        ["key", "n", "med_d", "f_k1", "mean_x", "early_share", "late_share"],
        _stat_rows(list(d1), ["key", "n", "med_d", "f_k1", "mean_x", "early_share", "late_share"]),
    )
    trend = trend_table(corpus, partition)
    daily_rows = []
    for day, buckets in trend.daily:
        for bucket, count in buckets.items():
            daily_rows.append([day.isoformat(), bucket, count])
    writer.write("fig2", ["day", "bucket", "count"], daily_rows)
    writer.write(
        "fig2_phases",
        ["phase", "score", "rel_freq"],
        [[ph, score, freq] for ph, score, freq in trend.per_phase],
    )
    writer.write(
        "fig4",
        ["period", "band", "cluster", "n", "share"],
        [
            [row.period, row.band, row.key, row.n, row.share]
            for row in cluster_prevalence(corpus, assignments, partition)
        ],
    )
    shifts = shift_report(corpus, assignments, partition)
    for name, metric in (("fig5", "f_k1"), ("fig6", "med_d")):
        writer.write(
            name,
            ["cluster", "band", "early", "late", "delta", "low_n"],
            [
                [row.cluster, row.band, row.early, row.late, row.delta, row.low_n]
                for row in shifts
                if row.metric == metric
            ],
        )
    writer.write(
        "figC1",
        ["period", "band", "class", "n", "share"],
        [
            [row.period, row.band, row.key, row.n, row.share]
            for row in value_class_prevalence(corpus, assignments, partition)
        ],
    )

    flags_path = out_dir / "flags.csv"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "cues", "partner_ids"])
    w.writerows(flags_rows(fake_report))
    flags_path.write_text(buf.getvalue(), encoding="utf-8")
    extra_outputs.append(flags_path)

    rej_path = out_dir / "rejections.jsonl"
    write_rejections(rejections, rej_path)
    extra_outputs.append(rej_path)

    assign_path = out_dir / "assignments.csv"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "P", "Q", "M", "T"])
    for a in assignments:
        w.writerow([a.review_id, int(a.P), int(a.Q), int(a.M), int(a.T)])
    assign_path.write_text(buf.getvalue(), encoding="utf-8")
    extra_outputs.append(assign_path)

    if unsure:
        nr_path = out_dir / "needs_review.csv"
        nr = corpus.with_reviews(unsure)
        with open(nr_path, "w", encoding="utf-8") as fh:
            write_corpus(nr, fh, FORMAT_DELIMITED, fields=("id", "username", "body", "score", "date"))
        extra_outputs.append(nr_path)

    report_path = out_dir / "report.md"
    report_path.write_text(
        _render_report(lang_rows, corpus, assignments, fake_report, partition),
        encoding="utf-8",
    )
    extra_outputs.append(report_path)


def _render_report(lang_rows, corpus, assignments, fake_report, partition) -> str:
    """Human-readable summary: means at 1-2 decimals, frequencies at 2."""
    lines = ["# Review corpus report", ""]
    lines.append("## Languages")
    lines.append("| group | n | mean |")
    lines.append("|---|---|---|")
    for row in lang_rows:
        lines.append(f"| {row.group} | {row.n} | {row.mean_score:.1f} |")
    lines.append("")
    lines.append("## Scoring behaviour across labels")
    lines.append("| label | n | mean | f(x=10) | f(x<2) |")
    lines.append("|---|---|---|---|---|")
    for row in label_stats(corpus, assignments):
        mean = f"{row.mean_x:.2f}" if row.mean_x is not None else ""
        f10 = f"{row.f_x10:.2f}" if row.f_x10 is not None else ""
        flt2 = f"{row.f_xlt2:.2f}" if row.f_xlt2 is not None else ""
        lines.append(f"| {row.key} | {row.n} | {mean} | {f10} | {flt2} |")
    lines.append("")
    lines.append("## Scores")
    lines.append("| x | n | f | Med(D) | f(K=1) |")
    lines.append("|---|---|---|---|---|")
    for row in score_table(corpus):
        f = f"{row.f_x:.2f}" if row.f_x is not None else ""
        med = str(row.med_d) if row.med_d is not None else ""
        fk1 = f"{row.f_k1:.2f}" if row.f_k1 is not None else ""
        lines.append(f"| {row.key} | {row.n} | {f} | {med} | {fk1} |")
    lines.append("")
    excluded = cell_stats(corpus, assignments, "sentiment").excluded
    lines.append(f"Binary-sentiment tables exclude {excluded} review(s) with x=6.")
    lines.append("")
    lines.append("## Flags")
    yes, no = fake_summary(corpus, fake_report.flagged_ids(), partition)
    lines.append("| flagged | n | Med(D) | f(K=1) | mean | Early | Late |")
    lines.append("|---|---|---|---|---|---|---|")
    for row in (yes, no):
        med = str(row.med_d) if row.med_d is not None else ""
        fk1 = f"{row.f_k1:.2f}" if row.f_k1 is not None else ""
        mean = f"{row.mean_x:.2f}" if row.mean_x is not None else ""
        early = f"{row.early_share:.2f}" if row.early_share is not None else ""
        late = f"{row.late_share:.2f}" if row.late_share is not None else ""
        lines.append(f"| {row.key} | {row.n} | {med} | {fk1} | {mean} | {early} | {late} |")
    lines.append("")
    lines.append(
        "Medians use the lower-median convention; similarity thresholds: "
        f"username {fake_report.config.username_threshold}, body {fake_report.config.body_threshold}, "
        f"min username length {fake_report.config.min_username_len}."
    )
    lines.append("")
    return "\n".join(lines)


def _write_plots(out_dir: Path, corpus, partition, assignments) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .phases import BUCKETS

    plots_dir = out_dir / "plots"
    plots_dir.mkdir(exist_ok=True)
    written = []

    trend = trend_table(corpus, partition)
    days = [d for d, _ in trend.daily]
    fig, ax = plt.subplots(figsize=(10, 5))
    for bucket in BUCKETS:
        ax.plot(days, [counts[bucket] for _, counts in trend.daily], label=bucket)
    ax.set_xlabel("day")
    ax.set_ylabel("reviews")
    ax.legend()
    fig.autofmt_xdate()
    p = plots_dir / "fig2.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)

    rows = score_table(corpus)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar([row.key for row in rows], [row.n for row in rows])
    ax.set_xlabel("score")
    ax.set_ylabel("n")
    p = plots_dir / "scores.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)

    shifts = [s for s in shift_report(corpus, assignments, partition) if s.band == "all"]
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for ax, metric, title in ((axes[0], "f_k1", "f(K=1)"), (axes[1], "med_d", "Med(D)")):
        ys, early, late = [], [], []
        for s in shifts:
            if s.metric != metric or s.early is None or s.late is None:
                continue
            ys.append(s.cluster)
            early.append(s.early)
            late.append(s.late)
        ax.scatter(early, ys, color="goldenrod", label="early")
        ax.scatter(late, ys, color="purple", label="late")
        for y, e, l in zip(ys, early, late):
            ax.plot([e, l], [y, y], color="gray", lw=1)
        ax.set_title(title)
        ax.set_yticks(sorted(set(ys)))
        ax.legend()
    p = plots_dir / "shifts.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)
    return written
