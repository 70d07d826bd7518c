"""Label vocabularies, review labeling and the expansion loop.

A vocabulary entry matches wherever its surface occurs at a word boundary
in the normalized body; the match may end mid-word so stems like
"politic" cover "political" and "politics", and surfaces may contain
spaces ("the 0", "star war"). Stop-words are never removed before
matching — several shipped entries are built from them.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, Review
from .textnorm import NormText, normalize, remove_stopwords, tokenize

PRIOR = "prior"
POSTERIOR = "posterior"

LABELS = ("P", "Q", "M", "T")

DEFAULT_CANDIDATES = 2000


class VocabError(Exception):
    pass


class DuplicateSurfaceError(VocabError):
    pass


@dataclass(frozen=True)
class VocabEntry:
    surface: str
    origin: str = PRIOR
    added_round: int = 0

    def __post_init__(self) -> None:
        if not self.surface or self.surface != self.surface.strip():
            raise VocabError(f"bad surface: {self.surface!r}")
        if self.surface != self.surface.lower():
            raise VocabError(f"surface must be lowercase: {self.surface!r}")
        if self.origin not in (PRIOR, POSTERIOR):
            raise VocabError(f"unknown origin: {self.origin!r}")
        if self.origin == PRIOR and self.added_round != 0:
            raise VocabError("prior entries belong to round 0")
        if self.origin == POSTERIOR and self.added_round < 1:
            raise VocabError("posterior entries need a round >= 1")


class Vocabulary:
    """Ordered set of match entries for one label; versioned on mutation."""

    def __init__(
        self,
        label: str,
        entries: Iterable[VocabEntry] = (),
        exclusions: Iterable[str] = (),
        version: int = 1,
    ):
        self.label = label
        self._entries: dict[str, VocabEntry] = {}
        self.exclusions = frozenset(exclusions)
        self.version = version
        for e in entries:
            if e.surface in self._entries:
                raise DuplicateSurfaceError(f"duplicate surface {e.surface!r}")
            self._entries[e.surface] = e

    @property
    def entries(self) -> tuple[VocabEntry, ...]:
        return tuple(self._entries.values())

    def surfaces(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def __contains__(self, surface: str) -> bool:
        return surface in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def add(self, surface: str, origin: str = POSTERIOR, added_round: int = 1) -> VocabEntry:
        entry = VocabEntry(surface=surface, origin=origin, added_round=added_round)
        if entry.surface in self._entries:
            raise DuplicateSurfaceError(f"duplicate surface {entry.surface!r}")
        self._entries[entry.surface] = entry
        self.version += 1
        return entry

    def matches(self, body_norm: NormText) -> bool:
        text = body_norm.lowered
        for surface in self._entries:
            if surface in self.exclusions:
                continue
            if _occurs_at_boundary(text, surface):
                return True
        return False


def _occurs_at_boundary(text: str, surface: str) -> bool:
    start = 0
    while True:
        i = text.find(surface, start)
        if i < 0:
            return False
        if i == 0 or not text[i - 1].isalnum():
            return True
        start = i + 1


def match_entry(body_norm: NormText | str, entry: VocabEntry | str) -> bool:
    """True iff the entry occurs at a word boundary (may end mid-word)."""
    text = body_norm.lowered if isinstance(body_norm, NormText) else body_norm
    surface = entry.surface if isinstance(entry, VocabEntry) else entry
    return _occurs_at_boundary(text, surface)


@dataclass(frozen=True)
class LabelAssignment:
    """Per-review dummy variables: one boolean per active vocabulary."""

    review_id: str
    labels: frozenset[str]

    def has(self, label: str) -> bool:
        return label in self.labels

    @property
    def P(self) -> bool:
        return "P" in self.labels

    @property
    def Q(self) -> bool:
        return "Q" in self.labels

    @property
    def M(self) -> bool:
        return "M" in self.labels

    @property
    def T(self) -> bool:
        return "T" in self.labels


def label_review(review: Review, vocabs: Iterable[Vocabulary]) -> LabelAssignment:
    norm = normalize(review.body)
    hit = frozenset(v.label for v in vocabs if v.matches(norm))
    return LabelAssignment(review_id=review.id, labels=hit)


def label_corpus(corpus: Corpus, vocabs: Iterable[Vocabulary]) -> list[LabelAssignment]:
    vocabs = list(vocabs)
    return [label_review(r, vocabs) for r in corpus]


def filter_unlabeled(corpus: Corpus, vocab: Vocabulary) -> frozenset[str]:
    """Ids of reviews with no match for this label (the expansion sample)."""
    return frozenset(r.id for r in corpus if not vocab.matches(normalize(r.body)))


def top_tokens(
    ids: frozenset[str] | set[str],
    corpus: Corpus,
    k: int = DEFAULT_CANDIDATES,
    stoplist: frozenset[str] = frozenset(),
    token_cache: dict[str, list[str]] | None = None,
) -> list[tuple[str, int]]:
    """The k most frequent tokens over the selected reviews.

    Counts are taken over stop-word-filtered token sequences; ties rank
    lexicographically. ``token_cache`` may hold pre-tokenized bodies.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for r in corpus:
        if r.id not in ids:
            continue
        if token_cache is not None and r.id in token_cache:
            tokens = token_cache[r.id]
        else:
            tokens = remove_stopwords(tokenize(normalize(r.body)), stoplist)
            if token_cache is not None:
                token_cache[r.id] = tokens
        counts.update(tokens)
    ranked = sorted(counts.items(), key=lambda tc: (-tc[1], tc[0]))
    return ranked[:k]


@dataclass(frozen=True)
class ExpansionState:
    label: str
    round: int
    filtered_ids: frozenset[str]
    candidates: tuple[tuple[str, int], ...]
    converged: bool = False


def initial_state(
    corpus: Corpus,
    vocab: Vocabulary,
    stoplist: frozenset[str] = frozenset(),
    k: int = DEFAULT_CANDIDATES,
    token_cache: dict[str, list[str]] | None = None,
) -> ExpansionState:
    filtered = filter_unlabeled(corpus, vocab)
    return ExpansionState(
        label=vocab.label,
        round=1,
        filtered_ids=filtered,
        candidates=tuple(top_tokens(filtered, corpus, k, stoplist, token_cache)),
    )


def expansion_step(
    corpus: Corpus,
    vocab: Vocabulary,
    state: ExpansionState,
    accepted: list[str],
    stoplist: frozenset[str] = frozenset(),
    k: int = DEFAULT_CANDIDATES,
    token_cache: dict[str, list[str]] | None = None,
) -> ExpansionState:
    """Apply one round of the expansion loop.

    Accepted surfaces join the vocabulary as posterior entries tagged with
    the current round; an empty acceptance is the fixpoint and leaves
    everything (including the round counter) untouched.
    """
    if state.label != vocab.label:
        raise VocabError(f"state is for label {state.label!r}, vocabulary for {vocab.label!r}")
    cleaned = [" ".join(s.lower().split()) for s in accepted]
    cleaned = [s for s in cleaned if s]
    if len(set(cleaned)) != len(cleaned):
        raise DuplicateSurfaceError("duplicate surface in accepted batch")
    if not cleaned:
        return ExpansionState(
            label=state.label,
            round=state.round,
            filtered_ids=state.filtered_ids,
            candidates=state.candidates,
            converged=True,
        )
    for surface in cleaned:
        if surface in vocab:
            raise DuplicateSurfaceError(f"duplicate surface {surface!r}")
    for surface in cleaned:
        vocab.add(surface, POSTERIOR, added_round=state.round)
    filtered = filter_unlabeled(corpus, vocab)
    return ExpansionState(
        label=state.label,
        round=state.round + 1,
        filtered_ids=filtered,
        candidates=tuple(top_tokens(filtered, corpus, k, stoplist, token_cache)),
        converged=False,
    )


def parse_vocabulary(
    text: str, label: str, on_duplicate: str = "warn"
) -> Vocabulary:
    """Parse the section format: [prior] / [posterior], one surface per line.

    Posterior lines take an optional ``@round=N`` suffix (default 1). An
    optional ``[exclude]`` section lists surfaces whose semantics proved
    too ambiguous to match. Duplicate surfaces keep the first occurrence
    with a warning, or raise when ``on_duplicate="error"``.
    """
    section: str | None = None
    vocab = Vocabulary(label)
    exclusions: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line == "[prior]":
                section = PRIOR
            elif line == "[posterior]":
                section = POSTERIOR
            elif line == "[exclude]":
                section = "exclude"
            else:
                raise VocabError(f"line {lineno}: unknown section {line!r}")
            continue
        if section is None:
            raise VocabError(f"line {lineno}: surface outside a section")
        if section == "exclude":
            exclusions.add(line.lower())
            continue
        surface = line
        added_round = 0 if section == PRIOR else 1
        if "@round=" in line:
            surface, _, round_part = line.rpartition("@round=")
            surface = surface.strip()
            if section == PRIOR:
                raise VocabError(f"line {lineno}: @round is only valid in [posterior]")
            try:
                added_round = int(round_part)
            except ValueError:
                raise VocabError(f"line {lineno}: bad round {round_part!r}") from None
        surface = surface.lower()
        if surface in vocab:
            if on_duplicate == "error":
                raise DuplicateSurfaceError(f"line {lineno}: duplicate surface {surface!r}")
            warnings.warn(f"{label}: dropping duplicate surface {surface!r} (line {lineno})")
            continue
        vocab.add(surface, section, added_round)
    vocab.exclusions = frozenset(exclusions)
    vocab.version = 1
    return vocab


def load_vocabulary(
    path: str | Path, label: str | None = None, on_duplicate: str = "warn"
) -> Vocabulary:
    path = Path(path)
    name = label if label is not None else path.stem
    return parse_vocabulary(path.read_text(encoding="utf-8"), name, on_duplicate)


def dump_vocabulary(vocab: Vocabulary) -> str:
    lines = ["[prior]"]
    lines += [e.surface for e in vocab.entries if e.origin == PRIOR]
    lines.append("[posterior]")
    lines += [
        f"{e.surface} @round={e.added_round}" for e in vocab.entries if e.origin == POSTERIOR
    ]
    if vocab.exclusions:
        lines.append("[exclude]")
        lines += sorted(vocab.exclusions)
    return "\n".join(lines) + "\n"


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    Path(path).write_text(dump_vocabulary(vocab), encoding="utf-8")


def default_vocabulary_text(label: str) -> str:
    return (
        resources.files("reviewforensics.data")
        .joinpath(f"vocab/{label}.txt")
        .read_text(encoding="utf-8")
    )


def default_vocabularies() -> dict[str, Vocabulary]:
    """The four shipped vocabularies (P, Q, M, T)."""
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the shipped Q file repeats one surface
        for label in LABELS:
            out[label] = parse_vocabulary(default_vocabulary_text(label), label)
    return out
