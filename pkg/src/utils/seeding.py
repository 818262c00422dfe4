import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named purpose within a seeded game.

    Streams with different names never share state, so adding draws to one
    (say, agent latencies) leaves every other stream unchanged.
    """
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8"))])


def derive_seed(seed: int, name: str) -> int:
    return int(substream(seed, name).integers(0, 2**31 - 1))
