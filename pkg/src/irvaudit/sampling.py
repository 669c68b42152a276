"""Public, reproducible ballot sampling.

Draw i (1-based) selects a 0-based position in the sampling frame of N
cards by hashing `<seed>,<i>` with SHA-256, reading the digest as a
big-endian 256-bit integer, and reducing modulo N. Values in the biased
tail (at or above floor(2^256 / N) * N) are rejected and the digest is
re-hashed until one is accepted, so every position is exactly equally
likely. Anyone can re-derive the sequence from the published seed with a
few lines of code.
"""
from __future__ import annotations

import hashlib

_SPACE = 2 ** 256


def _rejection_limit(n_positions: int) -> int:
    return (_SPACE // n_positions) * n_positions


def position_for_draw(seed: str, draw_index: int, n_positions: int) -> int:
    if n_positions <= 0:
        raise ValueError("sampling frame must be nonempty")
    if draw_index < 1:
        raise ValueError("draw indices are 1-based")
    digest = hashlib.sha256(f"{seed},{draw_index}".encode("utf-8")).digest()
    limit = _rejection_limit(n_positions)
    value = int.from_bytes(digest, "big")
    while value >= limit:
        digest = hashlib.sha256(digest).digest()
        value = int.from_bytes(digest, "big")
    return value % n_positions


def sample_positions(seed: str, n_positions: int, start_index: int, count: int) -> list[int]:
    """Positions for draws start_index+1 .. start_index+count (with replacement)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return [position_for_draw(seed, start_index + i, n_positions)
            for i in range(1, count + 1)]
