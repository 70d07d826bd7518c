"""Review data model and file-based corpus ingestion."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator

FORMAT_DELIMITED = "delimited-table"
FORMAT_RECORD_LINES = "record-lines"
FORMATS = (FORMAT_DELIMITED, FORMAT_RECORD_LINES)

REQUIRED_FIELDS = ("username", "body", "score", "date")
# Canonical field order for serialization; only fields present at ingestion
# are written back, so write -> ingest -> write is byte-stable.
FIELD_ORDER = ("id", "username", "body", "score", "date", "prior_reviews")

MIN_BODY_CHARS = 75


class IngestError(Exception):
    """Unrecoverable ingestion failure (bad stream, unknown format, strict abort)."""


@dataclass(frozen=True)
class Review:
    """One rating event."""

    id: str
    username: str
    body: str
    score: int
    day: date
    prior_reviews: int = 0
    lang_code: str | None = None
    lang_confidence: float | None = None
    language_group: str | None = None
    flags: frozenset[str] = frozenset()

    @property
    def experienced(self) -> int:
        """K indicator: 1 iff the author reviewed anything before."""
        return 1 if self.prior_reviews >= 1 else 0


@dataclass(frozen=True)
class Provenance:
    source: str
    ingested_at: str


@dataclass(frozen=True)
class Corpus:
    """Immutable, (day, ingestion order)-sorted collection of reviews."""

    reviews: tuple[Review, ...]
    provenance: Provenance
    fields_present: tuple[str, ...] = FIELD_ORDER

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self) -> Iterator[Review]:
        return iter(self.reviews)

    def by_id(self) -> dict[str, Review]:
        return {r.id: r for r in self.reviews}

    def with_reviews(self, reviews: Iterable[Review]) -> "Corpus":
        return replace(self, reviews=tuple(reviews))


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass(frozen=True)
class IngestResult:
    corpus: Corpus
    rejected: tuple[Rejection, ...]
    warnings: tuple[Rejection, ...]
    records_read: int


def experience_class(prior_reviews: int) -> int:
    return 1 if prior_reviews >= 1 else 0


def f_k1(corpus: Corpus | Iterable[Review]) -> float:
    """Exact fraction of reviews whose author reviewed anything before."""
    reviews = list(corpus)
    if not reviews:
        return 0.0
    return sum(r.experienced for r in reviews) / len(reviews)


def _open_text(source: str | Path | IO[bytes] | IO[str]) -> tuple[str, str]:
    """Return (text, source description); raises IngestError on undecodable bytes."""
    if isinstance(source, (str, Path)):
        try:
            raw = Path(source).read_bytes()
        except OSError as e:
            raise IngestError(f"unreadable stream: {e}") from e
        desc = str(source)
    elif hasattr(source, "read"):
        raw = source.read()
        desc = getattr(source, "name", "<stream>")
    else:
        raise IngestError(f"unsupported source type: {type(source)!r}")
    if isinstance(raw, str):
        return raw, desc
    try:
        return raw.decode("utf-8"), desc
    except UnicodeDecodeError as e:
        raise IngestError(f"stream is not valid UTF-8: {e}") from e


def _parse_record(rec: dict, line: int, synth_id: str) -> tuple[Review | None, str | None]:
    """Validate one raw record; returns (review, None) or (None, reason)."""
    for key in REQUIRED_FIELDS:
        if rec.get(key) in (None, ""):
            return None, f"missing field '{key}'"
    raw_score = rec["score"]
    if isinstance(raw_score, bool) or isinstance(raw_score, float):
        return None, "score not an integer"
    try:
        score = int(str(raw_score).strip())
    except ValueError:
        return None, "score not an integer"
    if not 0 <= score <= 10:
        return None, "score out of range"
    try:
        day = date.fromisoformat(str(rec["date"]).strip())
    except ValueError:
        return None, "invalid date"
    prior_raw = rec.get("prior_reviews")
    prior = 0
    if prior_raw not in (None, ""):
        try:
            prior = int(str(prior_raw).strip())
        except ValueError:
            return None, "prior_reviews not an integer"
        if prior < 0:
            return None, "negative prior_reviews"
    rid = str(rec["id"]).strip() if rec.get("id") not in (None, "") else synth_id
    return (
        Review(
            id=rid,
            username=str(rec["username"]),
            body=str(rec["body"]),
            score=score,
            day=day,
            prior_reviews=prior,
        ),
        None,
    )


def _iter_raw_records(text: str, format: str) -> Iterator[tuple[int, dict | str]]:
    """Yield (line number, record dict) or (line number, parse-error reason)."""
    if format == FORMAT_DELIMITED:
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            return
        missing = [k for k in REQUIRED_FIELDS if k not in reader.fieldnames]
        if missing:
            raise IngestError(f"header lacks required columns: {', '.join(missing)}")
        for rec in reader:
            if None in rec:
                del rec[None]
            yield reader.line_num, rec
    elif format == FORMAT_RECORD_LINES:
        # Split on real newlines only: JSON leaves exotic line separators
        # (U+2028 and friends) unescaped inside string values.
        for i, line in enumerate(text.split("\n"), start=1):
            line = line.rstrip("\r")
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                yield i, "unparseable record line"
                continue
            if not isinstance(rec, dict):
                yield i, "record is not an object"
                continue
            yield i, rec
    else:
        raise IngestError(f"unknown format: {format!r}")


def ingest_reviews(
    source: str | Path | IO[bytes] | IO[str],
    format: str = FORMAT_DELIMITED,
    strict: bool = False,
) -> IngestResult:
    """Read a review file into a Corpus.

    Invalid records are rejected with a per-line reason; in strict mode the
    first invalid record (including bodies under 75 characters) aborts.
    Short bodies and duplicate (username, day, body) records are warnings
    in non-strict mode and the records are kept: dropping repeated content
    would hide the manipulation this toolkit is meant to expose.
    """
    text, desc = _open_text(source)
    valid: list[Review] = []
    rejected: list[Rejection] = []
    warnings: list[Rejection] = []
    records_read = 0
    seen_ids: set[str] = set()
    seen_triples: set[tuple[str, date, str]] = set()
    fields_seen: set[str] = set()

    for line, rec in _iter_raw_records(text, format):
        records_read += 1
        if isinstance(rec, str):
            if strict:
                raise IngestError(f"invalid record at line {line}: {rec}")
            rejected.append(Rejection(line, rec))
            continue
        review, reason = _parse_record(rec, line, synth_id=f"r{line:06d}")
        if reason is None and review is not None and review.id in seen_ids:
            reason = f"duplicate id '{review.id}'"
        if reason is None and strict and len(review.body) < MIN_BODY_CHARS:
            reason = f"body shorter than {MIN_BODY_CHARS} characters"
        if reason is not None:
            if strict:
                raise IngestError(f"invalid record at line {line}: {reason}")
            rejected.append(Rejection(line, reason))
            continue
        assert review is not None
        if len(review.body) < MIN_BODY_CHARS:
            warnings.append(Rejection(line, f"body shorter than {MIN_BODY_CHARS} characters"))
        triple = (review.username, review.day, review.body)
        if triple in seen_triples:
            warnings.append(Rejection(line, "duplicate (username, day, body)"))
        seen_triples.add(triple)
        seen_ids.add(review.id)
        fields_seen.update(k for k in FIELD_ORDER if rec.get(k) not in (None, ""))
        valid.append(review)

    ordered = sorted(valid, key=lambda r: r.day)  # stable: ties keep file order
    fields = tuple(k for k in FIELD_ORDER if k in fields_seen or k in REQUIRED_FIELDS)
    corpus = Corpus(
        reviews=tuple(ordered),
        provenance=Provenance(source=desc, ingested_at=datetime.now(timezone.utc).isoformat()),
        fields_present=fields,
    )
    return IngestResult(
        corpus=corpus,
        rejected=tuple(rejected),
        warnings=tuple(warnings),
        records_read=records_read,
    )


def _record_of(review: Review, fields: tuple[str, ...]) -> dict:
    rec: dict = {}
    for key in fields:
        if key == "id":
            rec["id"] = review.id
        elif key == "username":
            rec["username"] = review.username
        elif key == "body":
            rec["body"] = review.body
        elif key == "score":
            rec["score"] = review.score
        elif key == "date":
            rec["date"] = review.day.isoformat()
        elif key == "prior_reviews":
            rec["prior_reviews"] = review.prior_reviews
    return rec


def write_corpus(
    corpus: Corpus,
    dest: str | Path | IO[str],
    format: str = FORMAT_DELIMITED,
    fields: tuple[str, ...] | None = None,
) -> None:
    """Serialize in canonical form; fields default to those seen at ingestion."""
    fields = fields or corpus.fields_present
    out = io.StringIO()
    if format == FORMAT_DELIMITED:
        writer = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        for r in corpus:
            writer.writerow(_record_of(r, fields))
    elif format == FORMAT_RECORD_LINES:
        for r in corpus:
            out.write(json.dumps(_record_of(r, fields), ensure_ascii=False, separators=(",", ":")))
            out.write("\n")
    else:
        raise IngestError(f"unknown format: {format!r}")
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(out.getvalue(), encoding="utf-8")
    else:
        dest.write(out.getvalue())


def write_rejections(rejections: Iterable[Rejection], dest: str | Path | IO[str]) -> None:
    """Rejection report: record-lines with line and reason."""
    out = io.StringIO()
    for rej in rejections:
        out.write(json.dumps({"line": rej.line, "reason": rej.reason}, ensure_ascii=False))
        out.write("\n")
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(out.getvalue(), encoding="utf-8")
    else:
        dest.write(out.getvalue())


def attach_user_history(corpus: Corpus, history: dict[str, int]) -> tuple[Corpus, int]:
    """Set every review's prior-review count from a username map.

    Usernames absent from the map default to 0; the count of such reviews is
    returned alongside the updated corpus. Negative counts are rejected.
    """
    for name, count in history.items():
        if count < 0:
            raise ValueError(f"negative prior-review count for username {name!r}")
    missing = 0
    updated = []
    for r in corpus:
        if r.username in history:
            updated.append(replace(r, prior_reviews=history[r.username]))
        else:
            missing += 1
            updated.append(replace(r, prior_reviews=0))
    return corpus.with_reviews(updated), missing


def load_history(path: str | Path) -> dict[str, int]:
    """History file: delimited table with `username,prior_reviews` columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"username", "prior_reviews"} <= set(reader.fieldnames):
            raise IngestError("history file needs columns username,prior_reviews")
        out: dict[str, int] = {}
        for rec in reader:
            out[rec["username"]] = int(rec["prior_reviews"])
    return out
