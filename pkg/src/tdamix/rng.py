"""Deterministic random substreams keyed by (master seed, stage name, indices).

Every stochastic stage asks for its own generator so results do not depend on
the order in which stages, runs or threads are scheduled.
"""

import hashlib

import numpy as np


def stage_key(stage: str) -> int:
    """Stable 32-bit integer for a stage name (independent of PYTHONHASHSEED)."""
    return int.from_bytes(hashlib.blake2b(stage.encode(), digest_size=4).digest(), "little")


def substream(seed: int, stage: str, *indices: int) -> np.random.Generator:
    ss = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(stage_key(stage), *(int(i) for i in indices)),
    )
    return np.random.Generator(np.random.PCG64(ss))
