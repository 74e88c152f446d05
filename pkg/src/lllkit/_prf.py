"""Counter-mode pseudorandom words.

Every random choice in the package is a pure function of a seed and a small
tuple of integer coordinates, so results never depend on evaluation order.
"""

import hashlib
import struct

_MASK64 = (1 << 64) - 1


def word64(seed, *coords):
    """Return a uniform 64-bit integer determined by ``(seed, *coords)``."""
    data = struct.pack(f"<{len(coords) + 1}Q", seed & _MASK64, *(c & _MASK64 for c in coords))
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def derive_seed(seed, *coords):
    """Derive a child seed; used for retry re-seeding and per-trial streams."""
    return word64(seed, 0x5EED, *coords)
