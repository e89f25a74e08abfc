"""Deterministic seed derivation for experiments.

Seeds for sub-tasks (one trial, one training run, one synthetic draw) are
derived from a master seed plus string tags by hashing, so results do not
depend on scheduling order and never collide across tags.  Hashing uses
sha256, not Python's built-in ``hash``, because the latter is salted per
process and would silently break reproducibility.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEP = b"\x1f"


def derive_seed(master_seed: int, *tags) -> int:
    """A 63-bit seed determined by the master seed and the tag sequence."""
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for tag in tags:
        h.update(_SEP)
        h.update(str(tag).encode())
    return int.from_bytes(h.digest()[:8], "little") & (2**63 - 1)


def derive_rng(master_seed: int, *tags) -> np.random.Generator:
    """A fresh generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master_seed, *tags))
