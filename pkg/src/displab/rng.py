"""Reproducible, splittable random streams.

Every random draw in the package is minted from an :class:`RngStream`, a
(seed, path) pair mapped to a counter-based Philox generator. Identical
(seed, path) pairs give identical draws on every platform, and distinct
paths give statistically independent streams, so experiments can fan
trials out to worker threads and still produce schedule-independent
results: trial ``i`` always draws from ``stream.child(i)`` no matter
which worker runs it.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


def _derive_key(seed: int, path: tuple[int, ...]) -> np.ndarray:
    """Hash (seed, path) into a 128-bit Philox key, stable across platforms."""
    h = hashlib.sha256()
    h.update(int(seed).to_bytes(16, "little", signed=True))
    for part in path:
        h.update(b"/")
        h.update(int(part).to_bytes(16, "little", signed=True))
    digest = h.digest()
    return np.frombuffer(digest[:16], dtype=np.uint64).copy()


@dataclass(frozen=True)
class RngStream:
    """A named point in the (seed, path) tree of random streams.

    The stream itself is stateless; :meth:`generator` mints a fresh
    ``numpy.random.Generator`` positioned at the start of the stream, so
    calling it twice replays the same draws.
    """

    seed: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *indices: int) -> "RngStream":
        """Sub-stream at ``path + indices``; children never collide."""
        return RngStream(self.seed, self.path + tuple(indices))

    def generator(self) -> np.random.Generator:
        """Fresh generator replaying this stream from its beginning."""
        return np.random.Generator(np.random.Philox(key=_derive_key(self.seed, self.path)))
