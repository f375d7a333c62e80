#!/usr/bin/env python3
"""Straight-line replay of randomized bucket creation on a 10-record dataset.

Layout: lb = ceil(QA * Lmax / f), n = ceil(SA * |D| / lb). The record list
is Fisher-Yates-shuffled with the portable RNG, then each record goes to the
least-full of its f mapped buckets (ties -> earliest in the map list); if all
f are full it goes to the stash. Prints the exact assignment to freeze into
the bucketizer unit test.
"""

import math

from map_ref import map_key
from rng_ref import Xoshiro256pp, shuffle

# key, value pairs; key "a" has 3 records so Lmax = 3
DATASET = [
    ("a", "v0"), ("a", "v1"), ("a", "v2"),
    ("b", "v3"), ("b", "v4"),
    ("c", "v5"), ("d", "v6"), ("e", "v7"), ("f", "v8"), ("g", "v9"),
]
QA, SA, F, SEED = 1.0, 1.5, 2, 42


def main() -> None:
    lmax = 3
    lb = math.ceil(QA * lmax / F)
    n = math.ceil(SA * len(DATASET) / lb)
    print(f"lb={lb} n={n}")

    order = shuffle(list(range(len(DATASET))), Xoshiro256pp(SEED))
    print("shuffled record indices:", order)

    buckets: list[list[int]] = [[] for _ in range(n)]
    stash: list[int] = []
    for idx in order:
        key = DATASET[idx][0]
        candidates = map_key(key.encode(), n, F)
        best = None
        for b in candidates:
            if len(buckets[b]) < lb and (best is None or len(buckets[b]) < len(buckets[best])):
                best = b
        if best is None:
            stash.append(idx)
        else:
            buckets[best].append(idx)

    for key in "abcdefg":
        print(f"map_key({key!r}) = {map_key(key.encode(), n, F)}")
    for b, content in enumerate(buckets):
        if content:
            print(f"bucket {b}: records {content} keys {[DATASET[i][0] for i in content]}")
    print("stash:", stash, [DATASET[i][0] for i in stash])


if __name__ == "__main__":
    main()
