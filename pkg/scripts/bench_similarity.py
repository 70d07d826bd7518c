#!/usr/bin/env python3
"""Benchmark the blocked near-duplicate join on synthetic items.

    python scripts/bench_similarity.py --items 50000 --planted 500
"""

from __future__ import annotations

import argparse
import random
import string
import time

from reviewforensics.fakecues import similarity_pairs


def random_text(rng: random.Random, lo: int, hi: int) -> str:
    return "".join(
        rng.choice(string.ascii_lowercase + string.digits)
        for _ in range(rng.randint(lo, hi))
    )


def mutate(rng: random.Random, text: str, edits: int) -> str:
    out = list(text)
    for _ in range(edits):
        op = rng.choice("sid")
        pos = rng.randrange(len(out))
        if op == "s":
            out[pos] = rng.choice(string.ascii_lowercase)
        elif op == "i":
            out.insert(pos, rng.choice(string.ascii_lowercase))
        elif len(out) > 1:
            del out[pos]
    return "".join(out)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=50_000)
    parser.add_argument("--planted", type=int, default=500)
    parser.add_argument("--threshold", type=float, default=0.85)
    parser.add_argument("--seed", type=int, default=7777)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    base_n = args.items - args.planted
    items = [(f"n{k:06d}", random_text(rng, 20, 60)) for k in range(base_n)]
    planted = set()
    for k in range(args.planted):
        base_id, base = items[(k * 7) % base_n]
        partner_id = f"p{k:05d}"
        items.append((partner_id, mutate(rng, base, 1)))
        planted.add(tuple(sorted((base_id, partner_id))))

    started = time.perf_counter()
    pairs = similarity_pairs(items, args.threshold)
    elapsed = time.perf_counter() - started
    found = {(a, b) for a, b, _ in pairs}
    missing = planted - found
    print(f"{len(items)} items, threshold {args.threshold}")
    print(f"join took {elapsed:.1f}s, found {len(pairs)} pairs")
    print(f"planted pairs recovered: {len(planted) - len(missing)}/{len(planted)}")
    if missing:
        raise SystemExit(f"missing planted pairs: {sorted(missing)[:5]}")


if __name__ == "__main__":
    main()
