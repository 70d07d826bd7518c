#!/usr/bin/env python3
"""Generate synthetic review corpora for experiments and CLI runs.

Writes three fixtures into --out (default fixtures/):
  marginals.jsonl     51,120 reviews reproducing the reference score
                      distribution over 40 days
  spike.jsonl         1,000 reviews with a release-day spike (first two
                      days hold 20% of the volume)
  themed.jsonl        a small corpus whose bodies carry the P/Q/M/T themes
"""

from __future__ import annotations

import argparse
import hashlib
import random
from datetime import date, timedelta
from pathlib import Path

from reviewforensics.corpus import FORMAT_RECORD_LINES, Corpus, Provenance, Review, write_corpus

RELEASE_DAY = date(2020, 6, 19)

SCORE_COUNTS = {
    0: 13969, 1: 4923, 2: 2769, 3: 2391, 4: 1950, 5: 1234,
    6: 885, 7: 822, 8: 1660, 9: 3399, 10: 17118,
}

_B36 = "abcdefghijklmnopqrstuvwxyz0123456789"

THEMED_BODIES = [
    "the political agenda of this studio ruined what could have been a quiet little story",
    "sjw propaganda everywhere, they lecture us instead of making something worth playing",
    "the gay romance felt natural and earned, unlike anything else in this medium lately",
    "people upset about gender themes should simply play something else entirely",
    "ignore the 0 reviews, they come from trolls review bombing this platform out of spite",
    "the critics were right for once, but the user score tells a different story entirely",
    "ellie deserved better but the gameplay is responsive and the graphics push the hardware",
    "several cutscenes drag on and the framerate dips on the older console models sometimes",
    "the woke agenda infected even the combat design, which feels preachy rather than playable",
    "trolls keep downvoting every positive comment, while the storytelling deserves a fair shake",
]


def pseudo_word(i: int, salt: str, length: int) -> str:
    value = int.from_bytes(hashlib.blake2b(f"{salt}:{i}".encode(), digest_size=12).digest(), "big")
    out = []
    for _ in range(length):
        out.append(_B36[value % 36])
        value //= 36
    return "".join(out)


def body(i: int) -> str:
    return " ".join(pseudo_word(i, f"b{j}", 4 + (i + j) % 4) for j in range(14))


def username(i: int) -> str:
    return "u" + pseudo_word(i, "uname", 9)


def review(i: int, score: int, day: date, text: str | None = None) -> Review:
    return Review(
        id=f"r{i:06d}",
        username=username(i),
        body=text if text is not None else body(i),
        score=score,
        day=day,
        prior_reviews=1 if i % 5 == 0 else 0,
    )


def corpus_of(reviews, name: str) -> Corpus:
    return Corpus(
        reviews=tuple(sorted(reviews, key=lambda r: r.day)),
        provenance=Provenance(source=name, ingested_at="generated"),
    )


def marginals_corpus() -> Corpus:
    reviews = []
    i = 0
    for score in range(11):
        for _ in range(SCORE_COUNTS[score]):
            reviews.append(review(i, score, RELEASE_DAY + timedelta(days=(i * 7) % 40)))
            i += 1
    return corpus_of(reviews, "marginals")


def spike_corpus(n: int = 1000) -> Corpus:
    rng = random.Random(1)
    day_counts = [120, 80] + [800 // 38 + (1 if d < 800 % 38 else 0) for d in range(38)]
    reviews = []
    i = 0
    for offset, count in enumerate(day_counts):
        for _ in range(count):
            reviews.append(review(i, rng.randint(0, 10), RELEASE_DAY + timedelta(days=offset)))
            i += 1
    return corpus_of(reviews, "spike")


def themed_corpus(copies: int = 8) -> Corpus:
    rng = random.Random(2)
    reviews = []
    i = 0
    for c in range(copies):
        for text in THEMED_BODIES:
            padded = text + " " + body(i)[:30]
            reviews.append(
                review(i, rng.randint(0, 10), RELEASE_DAY + timedelta(days=i % 12), padded)
            )
            i += 1
    return corpus_of(reviews, "themed")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures", metavar="DIR")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, corpus in (
        ("marginals", marginals_corpus()),
        ("spike", spike_corpus()),
        ("themed", themed_corpus()),
    ):
        path = out / f"{name}.jsonl"
        write_corpus(corpus, path, FORMAT_RECORD_LINES)
        print(f"{path}: {len(corpus)} reviews")


if __name__ == "__main__":
    main()
