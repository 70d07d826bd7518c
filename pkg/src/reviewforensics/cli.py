"""Command line driver: ingest, analyze, label, report, serve."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import FORMAT_DELIMITED, FORMAT_RECORD_LINES, IngestError, ingest_reviews, write_corpus, write_rejections
from .fakecues import detect_fakes, flags_rows
from .langid import GroupingScheme, LangIdError, language_summary, needs_review, tag_corpus
from .phases import PartitionError
from .pipeline import (
    ConfigError,
    PipelineConfig,
    StageError,
    load_config,
    load_vocabularies,
    run_pipeline,
    validate_config,
)
from .textnorm import load_stoplist
from .vocab import (
    DuplicateSurfaceError,
    VocabError,
    expansion_step,
    initial_state,
    label_corpus,
    save_vocabulary,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewforensics",
        description="Forensic analysis of review-bombing incidents",
    )
    parser.add_argument("--config", metavar="PATH", help="TOML config file")
    parser.add_argument("--english-only", action="store_true", default=None,
                        help="keep only the English group for analysis")
    parser.add_argument("--phases", type=int, metavar="N", help="number of phases")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--plot", action="store_true", default=None,
                        help="emit static charts next to the tables")

    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate a corpus file and write a snapshot")
    p_ingest.add_argument("inputs", nargs="+", metavar="FILE")
    p_ingest.add_argument("--format", choices=[FORMAT_DELIMITED, FORMAT_RECORD_LINES],
                          default=FORMAT_DELIMITED)
    p_ingest.add_argument("--strict", action="store_true")

    p_analyze = sub.add_parser("analyze", help="language + fake-cue summaries")
    p_analyze.add_argument("inputs", nargs="*", metavar="FILE")
    p_analyze.add_argument("--format", choices=[FORMAT_DELIMITED, FORMAT_RECORD_LINES],
                           default=FORMAT_DELIMITED)

    p_label = sub.add_parser("label", help="assign labels; drive the expansion loop")
    p_label.add_argument("inputs", nargs="*", metavar="FILE")
    p_label.add_argument("--format", choices=[FORMAT_DELIMITED, FORMAT_RECORD_LINES],
                         default=FORMAT_DELIMITED)
    p_label.add_argument("--expand", metavar="LABEL",
                         help="run one expansion round for this label")
    p_label.add_argument("--accept-file", metavar="FILE",
                         help="surfaces to accept, one per line (empty file = converged)")
    p_label.add_argument("--vocab-file", metavar="FILE",
                         help="vocabulary file to expand (default: config path or shipped)")
    p_label.add_argument("--vocab-out", metavar="FILE",
                         help="where to save the expanded vocabulary (defaults over the input)")

    p_report = sub.add_parser("report", help="run the full pipeline and write all tables")
    p_report.add_argument("inputs", nargs="*", metavar="FILE")
    p_report.add_argument("--format", choices=[FORMAT_DELIMITED, FORMAT_RECORD_LINES],
                          default=FORMAT_DELIMITED)
    p_report.add_argument("--validate-only", action="store_true",
                          help="print config problems and exit")

    p_serve = sub.add_parser("serve", help="start the curation API")
    p_serve.add_argument("inputs", nargs="*", metavar="FILE")
    p_serve.add_argument("--format", choices=[FORMAT_DELIMITED, FORMAT_RECORD_LINES],
                         default=FORMAT_DELIMITED)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--vocab-dir", metavar="DIR",
                         help="directory holding LABEL.txt vocabulary files (source of truth)")
    p_serve.add_argument("--ui", metavar="DIR", help="static frontend directory to serve at /")

    return parser


def _merge_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    inputs = tuple(getattr(args, "inputs", ()) or ())
    if inputs:
        cfg = replace(cfg, inputs=inputs)
    if getattr(args, "format", None) and inputs:
        cfg = replace(cfg, format=args.format)
    if args.english_only is not None:
        cfg = replace(cfg, english_only=args.english_only)
    if args.phases is not None:
        cfg = replace(cfg, phases=args.phases)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.plot is not None:
        cfg = replace(cfg, plot=args.plot)
    if getattr(args, "strict", False):
        cfg = replace(cfg, strict=True)
    return cfg


def _cmd_ingest(cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    total = valid = 0
    all_reviews = []
    rejections = []
    fields = None
    for path in cfg.inputs:
        result = ingest_reviews(path, cfg.format, cfg.strict)
        total += result.records_read
        valid += len(result.corpus)
        all_reviews.extend(result.corpus.reviews)
        rejections.extend(result.rejected)
        fields = result.corpus.fields_present
        for w in result.warnings:
            print(f"warning: line {w.line}: {w.reason}", file=sys.stderr)
    snapshot = result.corpus.with_reviews(sorted(all_reviews, key=lambda r: r.day))
    write_corpus(snapshot, out / "corpus.jsonl", FORMAT_RECORD_LINES, fields=fields)
    write_rejections(rejections, out / "rejections.jsonl")
    print(f"read {total} records: {valid} valid, {len(rejections)} rejected")
    print(f"snapshot: {out / 'corpus.jsonl'}")
    return EXIT_OK


def _load_analysis_corpus(cfg: PipelineConfig):
    from .pipeline import _ingest_all

    corpus, _, _, _ = _ingest_all(cfg)
    scheme = GroupingScheme.from_file(cfg.scheme_path) if cfg.scheme_path else GroupingScheme.default_scheme()
    corpus = tag_corpus(corpus, scheme)
    if cfg.english_only:
        corpus = corpus.with_reviews(
            [r for r in corpus if r.language_group == scheme.group("en")]
        )
        if len(corpus) == 0:
            raise IngestError("empty corpus after filtering")
    return corpus, scheme


def _cmd_analyze(cfg: PipelineConfig) -> int:
    corpus, scheme = _load_analysis_corpus(cfg)
    print("Languages:")
    for row in language_summary(corpus, scheme):
        print(f"  {row.group}: n={row.n} mean={row.mean_score:.1f}")
    unsure = needs_review(corpus)
    if unsure:
        print(f"{len(unsure)} review(s) need manual language review")
    report = detect_fakes(corpus, cfg.similarity)
    print(f"flagged {len(report.flags)} suspicious review(s)")
    for rid, cues, partners in flags_rows(report)[:20]:
        print(f"  {rid}: {cues}" + (f" partners={partners}" if partners else ""))
    return EXIT_OK


def _cmd_label(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    corpus, _ = _load_analysis_corpus(cfg)
    vocabs = load_vocabularies(cfg)
    stoplist = load_stoplist(cfg.stopword_path)

    if args.expand:
        label = args.expand
        if not args.accept_file:
            raise ConfigError("--expand needs --accept-file")
        surfaces = [
            line.strip()
            for line in Path(args.accept_file).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        if args.vocab_file:
            from .vocab import load_vocabulary

            vocab = load_vocabulary(args.vocab_file, label=label)
        elif label in vocabs:
            vocab = vocabs[label]
        else:
            raise ConfigError(f"no vocabulary for label {label!r}")
        state = initial_state(corpus, vocab, stoplist, cfg.candidates)
        new_state = expansion_step(corpus, vocab, state, surfaces, stoplist, cfg.candidates)
        out_path = args.vocab_out or args.vocab_file or cfg.vocab_paths.get(label)
        if out_path:
            save_vocabulary(vocab, out_path)
            print(f"saved vocabulary: {out_path}")
        print(
            f"label {label}: round {new_state.round}, "
            f"filtered {len(new_state.filtered_ids)}, converged={new_state.converged}"
        )
        return EXIT_OK

    assignments = label_corpus(corpus, vocabs.values())
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "assignments.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id,P,Q,M,T\n")
        for a in assignments:
            fh.write(f"{a.review_id},{int(a.P)},{int(a.Q)},{int(a.M)},{int(a.T)}\n")
    for label in sorted(vocabs):
        n = sum(1 for a in assignments if a.has(label))
        print(f"label {label}: {n} review(s)")
    print(f"assignments: {path}")
    return EXIT_OK


def _cmd_report(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    if args.validate_only:
        problems = validate_config(cfg)
        for p in problems:
            print(p)
        return EXIT_CONFIG if problems else EXIT_OK
    manifest = run_pipeline(cfg)
    print(f"wrote {len(manifest.outputs)} file(s) to {cfg.out_dir}")
    for key, value in sorted(manifest.counts.items()):
        print(f"  {key}: {value}")
    return EXIT_OK


def _cmd_serve(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    import uvicorn

    from .server import build_session_app

    corpus, _ = _load_analysis_corpus(cfg)
    app = build_session_app(
        corpus,
        vocab_dir=args.vocab_dir,
        stopword_path=cfg.stopword_path,
        candidates=cfg.candidates,
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if args.command != "report" or not getattr(args, "validate_only", False):
            if not cfg.inputs:
                raise ConfigError("no input files (give FILE arguments or input.paths in the config)")
        if args.command == "ingest":
            return _cmd_ingest(cfg)
        if args.command == "analyze":
            return _cmd_analyze(cfg)
        if args.command == "label":
            return _cmd_label(cfg, args)
        if args.command == "report":
            return _cmd_report(cfg, args)
        if args.command == "serve":
            return _cmd_serve(cfg, args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as e:
        if isinstance(e.cause, ConfigError):
            print(f"config error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (IngestError, LangIdError, PartitionError, VocabError, DuplicateSurfaceError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
