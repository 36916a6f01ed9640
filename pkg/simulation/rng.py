"""Seeded random streams.

Every stream is a numpy PCG64 generator keyed by ``SeedSequence(master, spawn_key=...)``.
Replicate r of a study draws its data from stream ``(r, DATA)`` and runs its chain on
stream ``(r, CHAIN)``, so replicates are independent of each other and of the order in
which workers execute them.
"""

import numpy as np

DATA = 0
CHAIN = 1


def get_rng(seed: int) -> np.random.Generator:
    """Generator for a single seeded run."""
    return np.random.default_rng(seed)


def replicate_rng(master_seed: int, replicate: int, stream: int = DATA) -> np.random.Generator:
    """Independent generator for (master seed, replicate index, stream)."""
    sequence = np.random.SeedSequence(master_seed, spawn_key=(replicate, stream))
    return np.random.Generator(np.random.PCG64(sequence))


def replicate_seed(master_seed: int, replicate: int, stream: int = DATA) -> int:
    """Integer seed derived from the same key, for APIs that take a plain seed."""
    sequence = np.random.SeedSequence(master_seed, spawn_key=(replicate, stream))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
