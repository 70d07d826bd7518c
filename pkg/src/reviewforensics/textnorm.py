"""Text normalization, tokenization and the lexical diversity metric."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_WS_RE = re.compile(r"\s+")
# Maximal letter/digit runs; underscore and all punctuation separate.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class NormText:
    """Lower-cased text with whitespace runs collapsed to single spaces.

    ``original_length`` is the character count of the raw body (nchar).
    """

    lowered: str
    original_length: int


def normalize(body: str) -> NormText:
    lowered = _WS_RE.sub(" ", body.lower()).strip()
    return NormText(lowered=lowered, original_length=len(body))


def tokenize(text: NormText | str) -> list[str]:
    """Split into maximal letter/digit runs ("don't" -> ["don", "t"])."""
    lowered = text.lowered if isinstance(text, NormText) else text
    return _TOKEN_RE.findall(lowered)


def lexical_diversity(body: str) -> int:
    """Distinct-token count over the normalized body.

    Stop-words are counted like any other token so the metric stays
    comparable with raw text length.
    """
    return len(set(tokenize(normalize(body))))


def remove_stopwords(tokens: list[str], stoplist: frozenset[str] | set[str]) -> list[str]:
    """Order-preserving stop-word filter; the stoplist must be lowercase."""
    return [t for t in tokens if t not in stoplist]


def parse_stoplist(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line)
    return frozenset(words)


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    """Stop-word list file: one token per line, '#' starts a comment.

    Without a path the packaged English list is used.
    """
    if path is None:
        text = (
            resources.files("reviewforensics.data")
            .joinpath("stopwords_en.txt")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_stoplist(text)
