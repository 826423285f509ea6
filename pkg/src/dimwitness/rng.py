"""Seed splitting.

Every random stream is derived from ``(seed, tag, *indices)`` so that any
component, job or restart can be regenerated on its own.
"""

from __future__ import annotations

import zlib

import numpy as np


def derive_rng(seed: int, tag: str, *indices: int) -> np.random.Generator:
    key = (zlib.crc32(tag.encode("utf-8")),) + tuple(int(i) for i in indices)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))
