"""Per-review language tagging and Table-1-style language grouping.

The built-in detector is deliberately simple and fully deterministic:
non-Latin scripts are recognized from character ranges, Latin-script text
is scored by function-word hit rate against packaged word lists. Hard
cases are routed to a needs-review export and resolved through the
override channel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .corpus import Corpus, Review
from .textnorm import normalize, tokenize

UNKNOWN_CODE = "und"
NEEDS_REVIEW_CONFIDENCE = 0.5

_SCRIPT_RANGES: tuple[tuple[str, int, int], ...] = (
    ("cyrillic", 0x0400, 0x04FF),
    ("cyrillic", 0x0500, 0x052F),
    ("greek", 0x0370, 0x03FF),
    ("han", 0x4E00, 0x9FFF),
    ("han", 0x3400, 0x4DBF),
    ("hiragana", 0x3040, 0x309F),
    ("katakana", 0x30A0, 0x30FF),
    ("hangul", 0xAC00, 0xD7AF),
    ("hangul", 0x1100, 0x11FF),
    ("arabic", 0x0600, 0x06FF),
    ("arabic", 0x0750, 0x077F),
    ("hebrew", 0x0590, 0x05FF),
    ("thai", 0x0E00, 0x0E7F),
    ("devanagari", 0x0900, 0x097F),
)

_SCRIPT_CODE = {
    "cyrillic": "ru",
    "greek": "el",
    "han": "zh",
    "hiragana": "ja",
    "katakana": "ja",
    "hangul": "ko",
    "arabic": "ar",
    "hebrew": "he",
    "thai": "th",
    "devanagari": "hi",
}


class LangIdError(Exception):
    pass


@dataclass(frozen=True)
class LanguageTag:
    code: str
    confidence: float
    symbols_only: bool = False


@dataclass(frozen=True)
class GroupingScheme:
    """Total map from language code to group name via a default group."""

    mapping: dict[str, str]
    default: str

    def group(self, code: str | None) -> str:
        if code is None:
            return self.default
        return self.mapping.get(code, self.default)

    @classmethod
    def from_text(cls, text: str) -> "GroupingScheme":
        mapping: dict[str, str] = {}
        default = "Others"
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise LangIdError(f"bad grouping line: {line!r}")
            code, name = line.split("=", 1)
            code, name = code.strip(), name.strip()
            if code == "*":
                default = name
            else:
                mapping[code] = name
        return cls(mapping=mapping, default=default)

    @classmethod
    def from_file(cls, path: str | Path) -> "GroupingScheme":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default_scheme(cls) -> "GroupingScheme":
        text = (
            resources.files("reviewforensics.data")
            .joinpath("groups_default.txt")
            .read_text(encoding="utf-8")
        )
        return cls.from_text(text)


def _load_function_words() -> dict[str, frozenset[str]]:
    words: dict[str, frozenset[str]] = {}
    base = resources.files("reviewforensics.data").joinpath("langs")
    for entry in sorted(base.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".txt"):
            code = entry.name[:-4]
            words[code] = frozenset(
                w.strip() for w in entry.read_text(encoding="utf-8").splitlines() if w.strip()
            )
    return words


_FUNCTION_WORDS: dict[str, frozenset[str]] | None = None


def function_words() -> dict[str, frozenset[str]]:
    global _FUNCTION_WORDS
    if _FUNCTION_WORDS is None:
        _FUNCTION_WORDS = _load_function_words()
    return _FUNCTION_WORDS


def _script_of(ch: str) -> str | None:
    cp = ord(ch)
    for name, lo, hi in _SCRIPT_RANGES:
        if lo <= cp <= hi:
            return name
    return None


def detect_language(body: str) -> LanguageTag:
    letters = [ch for ch in body if ch.isalpha()]
    if not letters:
        return LanguageTag(code=UNKNOWN_CODE, confidence=0.0, symbols_only=True)

    script_counts: dict[str, int] = {}
    for ch in letters:
        s = _script_of(ch)
        if s is not None:
            script_counts[s] = script_counts.get(s, 0) + 1
    if script_counts:
        script, count = max(script_counts.items(), key=lambda kv: (kv[1], kv[0]))
        share = count / len(letters)
        if share >= 0.5:
            # Kana mixed into Han text means Japanese rather than Chinese.
            if script == "han" and (script_counts.get("hiragana") or script_counts.get("katakana")):
                script = "hiragana"
            return LanguageTag(code=_SCRIPT_CODE[script], confidence=share)

    tokens = tokenize(normalize(body))
    if not tokens:
        return LanguageTag(code=UNKNOWN_CODE, confidence=0.0)
    scores = []
    for code, words in function_words().items():
        hits = sum(1 for t in tokens if t in words)
        scores.append((hits / len(tokens), code))
    scores.sort(key=lambda sc: (-sc[0], sc[1]))
    best, code = scores[0]
    second = scores[1][0] if len(scores) > 1 else 0.0
    if best == 0.0:
        return LanguageTag(code=UNKNOWN_CODE, confidence=0.0)
    return LanguageTag(code=code, confidence=(best - second) / best)


def tag_corpus(corpus: Corpus, scheme: GroupingScheme | None = None) -> Corpus:
    """Fill lang_code/lang_confidence/language_group on every review."""
    scheme = scheme or GroupingScheme.default_scheme()
    tagged = []
    for r in corpus:
        tag = detect_language(r.body)
        group = scheme.default if tag.symbols_only else scheme.group(tag.code)
        tagged.append(
            replace(r, lang_code=tag.code, lang_confidence=tag.confidence, language_group=group)
        )
    return corpus.with_reviews(tagged)


def apply_overrides(
    corpus: Corpus, overrides: dict[str, str], scheme: GroupingScheme | None = None
) -> tuple[Corpus, int]:
    """Manual language overrides win over detection; returns applied count."""
    scheme = scheme or GroupingScheme.default_scheme()
    known = {r.id for r in corpus}
    for rid in overrides:
        if rid not in known:
            raise LangIdError(f"override for unknown review id {rid!r}")
    applied = 0
    updated = []
    for r in corpus:
        if r.id in overrides:
            code = overrides[r.id]
            updated.append(
                replace(r, lang_code=code, lang_confidence=1.0, language_group=scheme.group(code))
            )
            applied += 1
        else:
            updated.append(r)
    return corpus.with_reviews(updated), applied


def load_overrides(path: str | Path) -> dict[str, str]:
    """Override file: delimited table with `id,code` columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "code"} <= set(reader.fieldnames):
            raise LangIdError("override file needs columns id,code")
        return {rec["id"]: rec["code"] for rec in reader}


@dataclass(frozen=True)
class LanguageRow:
    group: str
    n: int
    mean_score: float


def language_summary(corpus: Corpus, scheme: GroupingScheme | None = None) -> list[LanguageRow]:
    """One row per non-empty group, largest first (mean rendered later at 1 dp)."""
    untagged = [r.id for r in corpus if r.language_group is None]
    if untagged:
        raise LangIdError(f"untagged reviews present (first: {untagged[0]})")
    groups: dict[str, list[int]] = {}
    for r in corpus:
        groups.setdefault(r.language_group, []).append(r.score)  # type: ignore[arg-type]
    rows = [
        LanguageRow(group=g, n=len(scores), mean_score=sum(scores) / len(scores))
        for g, scores in groups.items()
    ]
    rows.sort(key=lambda row: (-row.n, row.group))
    return rows


def needs_review(corpus: Corpus, threshold: float = NEEDS_REVIEW_CONFIDENCE) -> list[Review]:
    """Reviews whose detection confidence is too low to trust."""
    return [r for r in corpus if r.lang_confidence is not None and r.lang_confidence < threshold]


def filter_group(corpus: Corpus, group: str) -> Corpus:
    return corpus.with_reviews([r for r in corpus if r.language_group == group])


def english_only(corpus: Corpus, scheme: GroupingScheme | None = None) -> Corpus:
    scheme = scheme or GroupingScheme.default_scheme()
    return filter_group(corpus, scheme.group("en"))
