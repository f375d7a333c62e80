#!/usr/bin/env python3
"""Reference implementation of the key->bucket mapping recipe.

Independent of the C++ library: used to freeze expected values into unit
tests. Recipe:

    input(attempt 0) = salt || key || 0x00 || be32(gamma)
    input(attempt r) = salt || key || 0x00 || be32(gamma) || be32(r)   r >= 1
    id = (first 8 bytes of SHA-256(input), big-endian) mod n

For gamma = 1..f; if the id collides with an earlier one, bump the retry
index until a fresh id appears.
"""

import hashlib
import struct
import sys


def map_key(key: bytes, n: int, f: int, salt: bytes = b"") -> list[int]:
    if f > n:
        raise ValueError("fanout exceeds bucket count")
    ids: list[int] = []
    for gamma in range(1, f + 1):
        retry = 0
        while True:
            msg = salt + key + b"\x00" + struct.pack(">I", gamma)
            if retry > 0:
                msg += struct.pack(">I", retry)
            digest = hashlib.sha256(msg).digest()
            bucket = int.from_bytes(digest[:8], "big") % n
            if bucket not in ids:
                ids.append(bucket)
                break
            retry += 1
    return ids


if __name__ == "__main__":
    key = sys.argv[1] if len(sys.argv) > 1 else "apple"
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 10
    f = int(sys.argv[3]) if len(sys.argv) > 3 else 3
    print(f"map_key({key!r}, n={n}, f={f}) = {map_key(key.encode(), n, f)}")
