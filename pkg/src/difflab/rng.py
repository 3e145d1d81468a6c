"""Deterministic random-stream derivation.

All randomness in the package flows from a single base seed.  Substreams are
derived by hashing the base seed together with string/integer labels, so a
run indexed (seed, "train", 17) draws the same numbers no matter which worker
executes it or in which order.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np

_SEP = b"\x1f"


def derive_seed(base_seed, *labels) -> int:
    """Derive a 64-bit substream seed from a base seed and a label path."""
    h = hashlib.sha256()
    h.update(str(base_seed).encode())
    for label in labels:
        h.update(_SEP)
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little")


def derive_rng(base_seed: int, *labels) -> random.Random:
    """Python ``random.Random`` seeded from the derived substream."""
    return random.Random(derive_seed(base_seed, *labels))


def derive_generator(base_seed: int, *labels) -> np.random.Generator:
    """NumPy generator seeded from the derived substream."""
    return np.random.default_rng(derive_seed(base_seed, *labels))
