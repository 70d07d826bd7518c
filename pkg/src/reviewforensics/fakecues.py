"""Suspicious-review cues and scalable near-duplicate detection.

Near-duplicate search has to cope with ~50k items, so candidate pairs are
blocked before any edit-distance work: a pair is only examined when the
two strings (a) differ in length by at most ``length_band`` of the longer
one and (b) share at least one character n-gram. Both filters are exact
for the shipped thresholds:

* distance >= length difference, and similarity >= t forces distance
  <= (1-t) * maxlen, so any qualifying pair has a length gap within
  (1-t) * maxlen <= band * maxlen whenever band >= 1-t;
* a string of length L has L-n+1 positional n-grams and one edit destroys
  at most n of them, so with distance <= k the pair still shares at least
  (L_min - n + 1) - k*n n-grams. Items too short for that bound to reach 1
  are compared within a small brute-force pool instead of the index.

Verification uses a banded dynamic program that gives up as soon as the
distance provably exceeds the threshold for the pair.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Hashable, Iterable, Sequence

from .corpus import Corpus
from .textnorm import normalize, tokenize

CUE_NUMERIC_USERNAME = "NumericUsername"
CUE_NEAR_DUPLICATE = "NearDuplicate"
CUE_REPEATED_TOKEN = "RepeatedToken"
CUE_REPEATED_CHAR = "RepeatedChar"

_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class SimilarityConfig:
    username_threshold: float = 0.90
    body_threshold: float = 0.85
    min_username_len: int = 6
    min_body_len: int = 75
    length_band: float = 0.20
    username_ngram: int = 3
    body_ngram: int = 4

    def problems(self) -> list[str]:
        out = []
        for name in ("username_threshold", "body_threshold"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                out.append(f"fake.{name} out of (0,1]: {value}")
        if self.min_username_len < 1:
            out.append(f"fake.min_username_len must be >= 1: {self.min_username_len}")
        if not 0.0 <= self.length_band < 1.0:
            out.append(f"fake.length_band out of [0,1): {self.length_band}")
        for name in ("username_threshold", "body_threshold"):
            value = getattr(self, name)
            if 0.0 < value <= 1.0 and self.length_band < 1.0 - value:
                out.append(
                    f"fake.length_band {self.length_band} narrower than 1-{name}"
                    " (blocking could drop qualifying pairs)"
                )
        return out


@dataclass(frozen=True)
class FakeFlag:
    review_id: str
    cues: frozenset[str]
    partner_ids: tuple[str, ...] = ()


def cue_numeric_username(username: str) -> bool:
    """True iff the username is non-empty and made only of decimal digits."""
    return bool(username) and all(c in _DIGITS for c in username)


def cue_repeated_token(body: str) -> bool:
    """True iff some token repeats more than twice in a row."""
    tokens = tokenize(normalize(body))
    run = 1
    for prev, cur in zip(tokens, tokens[1:]):
        run = run + 1 if cur == prev else 1
        if run >= 3:
            return True
    return False


def cue_repeated_char(body: str) -> bool:
    """True iff some letter repeats more than three times in a row.

    Restricted to letters: digit or punctuation runs ("2000", "!!!!") are
    unremarkable in review text.
    """
    lowered = normalize(body).lowered
    run = 1
    for prev, cur in zip(lowered, lowered[1:]):
        if cur == prev and cur.isalpha():
            run += 1
            if run >= 4:
                return True
        else:
            run = 1
    return False


def levenshtein(a: str, b: str) -> int:
    """Exact edit distance (insert / delete / substitute, unit costs)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_bounded(a: str, b: str, k: int) -> int | None:
    """Edit distance if it is <= k, else None; O((2k+1) * len) via banding.

    Any cell farther than k off the main diagonal costs more than k, so the
    dynamic program only visits a band of width 2k+1 and stops early when
    the whole band exceeds k.
    """
    if k < 0:
        return None
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    n, m = len(a), len(b)
    if n - m > k:
        return None
    if m == 0:
        return n if n <= k else None
    big = k + 1
    prev = [j if j <= k else big for j in range(m + 1)]
    for i in range(1, n + 1):
        lo = max(1, i - k)
        hi = min(m, i + k)
        cur = [big] * (m + 1)
        if lo == 1:
            cur[0] = i if i <= k else big
        ca = a[i - 1]
        best = cur[0] if lo == 1 else big
        for j in range(lo, hi + 1):
            cost = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != b[j - 1]),
            )
            cost = cost if cost <= k else big
            cur[j] = cost
            if cost < best:
                best = cost
        if best > k:
            return None
        prev = cur
    return prev[m] if prev[m] <= k else None


def similarity(a: str, b: str) -> float:
    """1 - distance / max length; two empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _max_distance(threshold: float, longest: int) -> int:
    # One wider than strictly needed; the exact similarity check rejects
    # the overshoot, while undershooting would silently drop pairs.
    return int((1.0 - threshold) * longest) + 1


def _passes(distance: int, threshold: float, longest: int) -> bool:
    if longest == 0:
        return True
    return 1.0 - distance / longest >= threshold - 1e-9


def _length_band_ok(la: int, lb: int, band: float) -> bool:
    return abs(la - lb) <= band * max(la, lb)


def _safe_min_len(threshold: float, ngram: int, band: float) -> int:
    """Smallest length for which the shared-n-gram filter is provably safe."""
    m = ngram
    while True:
        longest = int(m / (1.0 - band)) if band < 1.0 else m
        k = _max_distance(threshold, max(longest, m))
        if (m - ngram + 1) - k * ngram >= 1:
            return m
        m += 1
        if m > 10_000:  # degenerate config; fall back to brute force everywhere
            return m


def _grams(text: str, n: int) -> set[str]:
    if len(text) < n:
        return {text}
    return {text[i : i + n] for i in range(len(text) - n + 1)}


def _bag_lower_bound(a: str, b: str) -> int:
    """max(surplus, deficit) of character counts never exceeds the distance."""
    diff = Counter(a)
    diff.subtract(b)
    surplus = deficit = 0
    for v in diff.values():
        if v > 0:
            surplus += v
        elif v < 0:
            deficit -= v
    return max(surplus, deficit)


def _shared_gram_count(ca: Counter, cb: Counter) -> int:
    if len(cb) < len(ca):
        ca, cb = cb, ca
    get = cb.get
    total = 0
    for gram, count in ca.items():
        other = get(gram)
        if other is not None:
            total += count if count < other else other
    return total


def _verify(a: str, b: str, threshold: float) -> float | None:
    longest = max(len(a), len(b))
    k = _max_distance(threshold, longest)
    if abs(len(a) - len(b)) > k or _bag_lower_bound(a, b) > k:
        return None
    # Iterative deepening keeps the band narrow when the pair is truly close.
    kk = max(1, abs(len(a) - len(b)))
    while True:
        kk = min(kk, k)
        d = levenshtein_bounded(a, b, kk)
        if d is not None:
            return 1.0 - d / longest if _passes(d, threshold, longest) else None
        if kk >= k:
            return None
        kk *= 4


def similarity_pairs(
    items: Sequence[tuple[Hashable, str]],
    threshold: float,
    *,
    ngram_size: int = 4,
    length_band: float = 0.20,
    exhaustive: bool = False,
) -> list[tuple[Hashable, Hashable, float]]:
    """All item pairs with normalized similarity >= threshold.

    Identical strings are grouped up front and always reported, bypassing
    every filter. Output pairs are deduplicated and ordered by id.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold out of (0,1]: {threshold}")

    # Collapse exact duplicates: one representative per distinct text.
    text_ids: dict[str, list[Hashable]] = {}
    for item_id, text in items:
        text_ids.setdefault(text, []).append(item_id)
    texts = list(text_ids)

    results: list[tuple[Hashable, Hashable, float]] = []
    for ids in text_ids.values():
        if len(ids) > 1:
            ordered = sorted(ids, key=str)
            results.extend(
                (ordered[i], ordered[j], 1.0)
                for i in range(len(ordered))
                for j in range(i + 1, len(ordered))
            )

    if exhaustive:
        candidates: Iterable[tuple[int, int]] = (
            (i, j) for i in range(len(texts)) for j in range(i + 1, len(texts))
        )
        gram_counts: dict[int, Counter] = {}
    else:
        candidates, gram_counts = _blocked_candidates(texts, threshold, ngram_size, length_band)

    for i, j in candidates:
        a, b = texts[i], texts[j]
        if not exhaustive:
            if not _length_band_ok(len(a), len(b), length_band):
                continue
            ca, cb = gram_counts.get(i), gram_counts.get(j)
            if ca is not None and cb is not None:
                # q-gram count lemma: distance <= k keeps at least
                # (maxlen - n + 1) - k*n positional n-grams in common.
                k = _max_distance(threshold, max(len(a), len(b)))
                needed = (max(len(a), len(b)) - ngram_size + 1) - k * ngram_size
                if needed > 0 and _shared_gram_count(ca, cb) < needed:
                    continue
        sim = _verify(a, b, threshold)
        if sim is None:
            continue
        for ida in text_ids[a]:
            for idb in text_ids[b]:
                pair = (ida, idb) if str(ida) <= str(idb) else (idb, ida)
                results.append((pair[0], pair[1], sim))

    results.sort(key=lambda r: (str(r[0]), str(r[1])))
    return results


def _blocked_candidates(
    texts: list[str], threshold: float, ngram_size: int, length_band: float
) -> tuple[set[tuple[int, int]], dict[int, Counter]]:
    safe_len = _safe_min_len(threshold, ngram_size, length_band)
    pool_limit = math.ceil(safe_len / (1.0 - length_band)) + 1 if length_band < 1.0 else len(texts)

    index: dict[str, list[int]] = {}
    grams_of: dict[int, set[str]] = {}
    gram_counts: dict[int, Counter] = {}
    short_pool: list[int] = []
    near_pool: list[int] = []
    for uid, text in enumerate(texts):
        if len(text) < safe_len:
            short_pool.append(uid)
            continue
        if len(text) <= pool_limit:
            near_pool.append(uid)
        counts = Counter(text[i : i + ngram_size] for i in range(len(text) - ngram_size + 1))
        gram_counts[uid] = counts
        gs = set(counts)
        grams_of[uid] = gs
        for gram in gs:
            index.setdefault(gram, []).append(uid)

    # k edits can remove at most k*n distinct gram types, so probing an
    # item's (k*n + 1) globally rarest grams is guaranteed to hit every
    # in-band partner; common grams with huge buckets are rarely probed.
    candidates: set[tuple[int, int]] = set()
    for uid, gs in grams_of.items():
        lx = len(texts[uid])
        longest = int(lx / (1.0 - length_band)) if length_band < 1.0 else lx
        probe_n = _max_distance(threshold, longest) * ngram_size + 1
        if probe_n < len(gs):
            probes: Iterable[str] = sorted(gs, key=lambda g: (len(index[g]), g))[:probe_n]
        else:
            probes = gs
        for gram in probes:
            for other in index[gram]:
                if other != uid and _length_band_ok(lx, len(texts[other]), length_band):
                    candidates.add((uid, other) if uid < other else (other, uid))

    # Items below the n-gram safety bound: brute force among themselves and
    # against anything short enough to sit inside their length band.
    others = short_pool + near_pool
    for ux in short_pool:
        lx = len(texts[ux])
        for uy in others:
            if uy == ux:
                continue
            if _length_band_ok(lx, len(texts[uy]), length_band):
                candidates.add((ux, uy) if ux < uy else (uy, ux))
    return candidates, gram_counts


@dataclass(frozen=True)
class FakeReport:
    flags: tuple[FakeFlag, ...]
    config: SimilarityConfig

    def flagged_ids(self) -> frozenset[str]:
        return frozenset(f.review_id for f in self.flags)


def detect_fakes(corpus: Corpus, cfg: SimilarityConfig = SimilarityConfig()) -> FakeReport:
    """Run all four cues over a corpus and collect per-review flags."""
    cues: dict[str, set[str]] = {}
    partners: dict[str, set[str]] = {}

    for r in corpus:
        hits = set()
        if cue_numeric_username(r.username):
            hits.add(CUE_NUMERIC_USERNAME)
        if cue_repeated_token(r.body):
            hits.add(CUE_REPEATED_TOKEN)
        if cue_repeated_char(r.body):
            hits.add(CUE_REPEATED_CHAR)
        if hits:
            cues.setdefault(r.id, set()).update(hits)

    # Cue 2a: near-identical usernames across distinct accounts. All-digit
    # names are left to the numeric cue; similarity between digit strings
    # carries no signal.
    by_name: dict[str, list[str]] = {}
    for r in corpus:
        by_name.setdefault(r.username, []).append(r.id)
    names = [
        (name, name)
        for name in sorted(by_name)
        if len(name) >= cfg.min_username_len and not cue_numeric_username(name)
    ]
    for name_a, name_b, _sim in similarity_pairs(
        names,
        cfg.username_threshold,
        ngram_size=cfg.username_ngram,
        length_band=cfg.length_band,
    ):
        if name_a == name_b:
            continue
        for rid in by_name[name_a]:
            cues.setdefault(rid, set()).add(CUE_NEAR_DUPLICATE)
            partners.setdefault(rid, set()).update(by_name[name_b])
        for rid in by_name[name_b]:
            cues.setdefault(rid, set()).add(CUE_NEAR_DUPLICATE)
            partners.setdefault(rid, set()).update(by_name[name_a])

    # Cue 2b: near-identical bodies across all reviews (copy-paste padding).
    bodies = [
        (r.id, normalize(r.body).lowered)
        for r in corpus
        if len(r.body) >= cfg.min_body_len
    ]
    for id_a, id_b, _sim in similarity_pairs(
        bodies,
        cfg.body_threshold,
        ngram_size=cfg.body_ngram,
        length_band=cfg.length_band,
    ):
        cues.setdefault(id_a, set()).add(CUE_NEAR_DUPLICATE)
        cues.setdefault(id_b, set()).add(CUE_NEAR_DUPLICATE)
        partners.setdefault(id_a, set()).add(id_b)
        partners.setdefault(id_b, set()).add(id_a)

    flags = tuple(
        FakeFlag(
            review_id=rid,
            cues=frozenset(hits),
            partner_ids=tuple(sorted(partners.get(rid, ()))),
        )
        for rid, hits in sorted(cues.items())
    )
    return FakeReport(flags=flags, config=cfg)


def annotate_flags(corpus: Corpus, report: FakeReport) -> Corpus:
    """Copy cue sets onto the reviews; flagged reviews are never dropped."""
    by_id = {f.review_id: f.cues for f in report.flags}
    return corpus.with_reviews(
        replace(r, flags=frozenset(by_id.get(r.id, frozenset()))) for r in corpus
    )


def flags_rows(report: FakeReport) -> list[tuple[str, str, str]]:
    """Export rows: id, cues joined by '|', partner ids joined by '|'."""
    return [
        (f.review_id, "|".join(sorted(f.cues)), "|".join(f.partner_ids))
        for f in report.flags
    ]
