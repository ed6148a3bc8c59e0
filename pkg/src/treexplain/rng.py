"""Deterministic seed derivation.

All randomness in the library flows from 64-bit seeds run through a
splitmix64-style scrambler. Components derive their own streams from a
base seed plus string/int labels, so results are reproducible and
independent of evaluation order or worker scheduling.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _scramble(z: int) -> int:
    z = (z + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(seed: int, *labels) -> int:
    """Derive a child 64-bit seed from ``seed`` and a label path.

    Labels may be ints or strings; strings are folded in bytewise so
    distinct paths give independent streams.
    """
    h = _scramble(seed & _MASK)
    for label in labels:
        if isinstance(label, str):
            h = _scramble(h ^ int.from_bytes(label.encode("utf-8").ljust(8, b"\0")[:8], "little"))
            for chunk in label.encode("utf-8")[8:]:
                h = _scramble(h ^ chunk)
        else:
            h = _scramble(h ^ (int(label) & _MASK))
    return h


def stream(seed: int, *labels) -> np.random.Generator:
    """A numpy Generator seeded from the derived seed for a label path."""
    return np.random.default_rng(derive_seed(seed, *labels))
