#!/usr/bin/env python3
"""Reference implementation of the library's portable RNG.

splitmix64 expands the 64-bit seed into the 4-word xoshiro256++ state;
shuffling is descending Fisher-Yates with j = next() % (i + 1). Used to
freeze replay vectors into tests.
"""

MASK = (1 << 64) - 1


def rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


class SplitMix64:
    def __init__(self, seed: int):
        self.x = seed & MASK

    def next(self) -> int:
        self.x = (self.x + 0x9E3779B97F4A7C15) & MASK
        z = self.x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)


class Xoshiro256pp:
    def __init__(self, seed: int):
        sm = SplitMix64(seed)
        self.s = [sm.next() for _ in range(4)]

    def next(self) -> int:
        s = self.s
        result = (rotl((s[0] + s[3]) & MASK, 23) + s[0]) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result


def shuffle(items: list, rng: Xoshiro256pp) -> list:
    a = list(items)
    for i in range(len(a) - 1, 0, -1):
        j = rng.next() % (i + 1)
        a[i], a[j] = a[j], a[i]
    return a


if __name__ == "__main__":
    rng = Xoshiro256pp(42)
    print("first 5 outputs, seed=42:", [hex(rng.next()) for _ in range(5)])
    print("shuffle(range(10), seed=42):", shuffle(list(range(10)), Xoshiro256pp(42)))
    print("shuffle(range(10), seed=7):", shuffle(list(range(10)), Xoshiro256pp(7)))
