"""Seed derivation: one master seed, independent streams per named component.

A component name is hashed with SHA-256 (stable across processes, unlike
``hash``) and combined with the master seed through ``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["component_key", "derive_seed", "rng"]


def component_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def derive_seed(master: int, name: str, *index: int) -> np.random.SeedSequence:
    if master < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence([master, component_key(name), *index])


def rng(master: int, name: str, *index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, name, *index))
