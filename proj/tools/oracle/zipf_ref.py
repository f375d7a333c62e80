#!/usr/bin/env python3
"""Reference Zipf histogram allocator.

Recipe (must match the datagen module exactly):
  1. every key gets 1 record (K <= N required);
  2. the remaining R = N - K records are split by largest-remainder rounding
     of weights w_i = i^-z (i = 1..K): floor the proportional targets, then
     hand out the leftover units in (fractional part desc, rank asc) order;
  3. the count vector is sorted descending and assigned to ranks in order.

Prints L_max, head counts, and a SHA-256 digest of the comma-joined counts.
"""

import hashlib
import sys


def zipf_counts(z: float, k: int, n: int) -> list[int]:
    if k < 1 or n < k:
        raise ValueError("need 1 <= K <= N")
    weights = [float(i) ** -z for i in range(1, k + 1)]
    total_w = sum(weights)
    remaining = n - k
    targets = [remaining * w / total_w for w in weights]
    counts = [int(t) for t in targets]
    leftover = remaining - sum(counts)
    order = sorted(range(k), key=lambda i: (-(targets[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    counts = [c + 1 for c in counts]
    counts.sort(reverse=True)
    return counts


def digest(counts: list[int]) -> str:
    return hashlib.sha256(",".join(map(str, counts)).encode()).hexdigest()


if __name__ == "__main__":
    z, k, n = float(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3])
    counts = zipf_counts(z, k, n)
    print(f"z={z} K={k} N={n}")
    print("L_max =", counts[0])
    print("head  =", counts[:10])
    print("tail  =", counts[-5:])
    print("sum   =", sum(counts))
    print("sha256 =", digest(counts))
