"""Stable seed derivation: child seeds depend only on (master, coordinates)."""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *coords) -> int:
    """Hash the master seed with string coordinates into a 63-bit child seed.

    Adding a new coordinate value never perturbs the seeds of existing ones.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    for c in coords:
        h.update(b"\x00")
        h.update(str(c).encode())
    return int.from_bytes(h.digest(), "little") >> 1
