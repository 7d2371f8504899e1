import numpy as np

from bitspectra import BitString, from_bits


def random_bitstring(rng: np.random.Generator, m: int) -> BitString:
    return from_bits(rng.integers(0, 2, size=m, dtype=np.uint8))
