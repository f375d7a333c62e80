#!/usr/bin/env python3
"""Desk-scale trend pre-check for the statistical acceptance thresholds.

Simulates the greedy bucket-creation stage (and the overlap bounds) in pure
Python, independently of the C++ library, to confirm the stash-ratio and
storage-amplification trends hold at z=0.4, K=5000, N=100000 scale before
those thresholds are frozen into the acceptance suite.
"""

import math
from collections import Counter

from map_ref import map_key
from rng_ref import Xoshiro256pp, shuffle
from zipf_ref import zipf_counts


def build(counts, qa, sa, f, seed, salt=b""):
    n_records = sum(counts)
    lmax = counts[0]
    lb = math.ceil(qa * lmax / f)
    n = math.ceil(sa * n_records / lb)
    keys = [f"key{i:05d}" for i in range(len(counts))]
    maps = {k: map_key(k.encode(), n, f, salt) for k in keys}
    records = []
    for k, c in zip(keys, counts):
        records.extend([k] * c)
    order = shuffle(records, Xoshiro256pp(seed))
    loads = [0] * n
    stash = 0
    for k in order:
        best = None
        for b in maps[k]:
            if loads[b] < lb and (best is None or loads[b] < loads[best]):
                best = b
        if best is None:
            stash += 1
        else:
            loads[best] += 1
    return loads, stash, lb, n


def mod_bounds(loads, lb, n, d):
    # circulant neighbors: offsets +-1..+-d//2, +n/2 if d odd
    offs = []
    for i in range(1, d // 2 + 1):
        offs += [i, -i]
    if d % 2:
        offs.append(n // 2)
    full = [p for p in range(n) if loads[p] == lb]
    d1 = min((lb - max(loads[(p + o) % n] for o in offs) for p in full), default=None)
    d2 = lb // d
    d3 = (lb - min(loads)) // d
    cands = [x for x in (d1, d2, d3) if x is not None]
    return max(0, min(cands))


def main():
    counts = zipf_counts(0.4, 5000, 100000)
    n_rec = sum(counts)
    seeds = [1, 2, 3, 4, 5]

    print("== criterion 3/5: SR vs SA (QA=1, f=6)")
    for sa in (1.0, 1.2, 1.4):
        srs = []
        for s in seeds:
            _, stash, lb, n = build(counts, 1.0, sa, 6, s, salt=s.to_bytes(8, "big"))
            srs.append(stash / n_rec)
        print(f"  SA={sa}: mean SR={sum(srs)/len(srs):.6f}  (lb={lb}, n={n})")

    print("== criterion 4: SR vs f (QA=1, SA=1.2)")
    for f in (2, 6):
        srs = []
        for s in seeds:
            _, stash, lb, n = build(counts, 1.0, 1.2, f, s, salt=s.to_bytes(8, "big"))
            srs.append(stash / n_rec)
        print(f"  f={f}: mean SR={sum(srs)/len(srs):.6f}  (lb={lb}, n={n})")

    print("== criterion 6: SR vs QA (SA=1.2, f=6)")
    for qa in (1.0, 1.2, 1.4):
        srs = []
        for s in seeds:
            _, stash, lb, n = build(counts, qa, 1.2, 6, s, salt=s.to_bytes(8, "big"))
            srs.append(stash / n_rec)
        print(f"  QA={qa}: mean SR={sum(srs)/len(srs):.6f}  (lb={lb}, n={n})")

    print("== criterion 7: delta/sa_actual vs d (SA=1.2, QA=1, f=6)")
    for d in (2, 4, 6):
        loads, stash, lb, n = build(counts, 1.0, 1.2, 6, 1, salt=b"\x00" * 8)
        if n % 2 and d % 2:
            n += 1
            loads.append(0)
        delta = mod_bounds(loads, lb, n, d)
        stored = n * lb - delta * d * n // 2
        print(f"  d={d}: delta={delta} sa_actual={stored/n_rec:.4f} (n={n}, lb={lb}, stash={stash})")


if __name__ == "__main__":
    main()
