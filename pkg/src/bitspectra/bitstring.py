"""Immutable bit strings over byte buffers and files.

Bit order is MSB-first within each byte: bit i of the string is bit
(7 - (i mod 8)) of byte floor(i/8). The convention is frozen; every
kernel and serializer in the package assumes it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeLimitError

DEFAULT_MAX_BITS = 1 << 27  # 16 MiB file


@dataclass(frozen=True)
class Origin:
    """Where a BitString came from, for reporting and slice bookkeeping."""

    path: str | None = None
    byte_offset: int | None = None
    byte_length: int | None = None

    def describe(self) -> str:
        if self.path is None:
            return "<bytes>"
        if self.byte_offset in (None, 0) and self.byte_length is None:
            return self.path
        return f"{self.path}[{self.byte_offset}:+{self.byte_length}]"


@dataclass(frozen=True)
class BitString:
    """Fixed sequence of M bits with a cached popcount.

    `packed` holds the bits MSB-first; trailing pad bits in the last
    byte are always zero. Instances are immutable and safe to share
    across threads or processes.
    """

    packed: bytes
    length_bits: int
    popcount: int
    origin: Origin | None = None

    def __len__(self) -> int:
        return self.length_bits

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length_bits:
            raise IndexError(f"bit index {i} out of range [0, {self.length_bits})")
        return (self.packed[i >> 3] >> (7 - (i & 7))) & 1

    def to_bytes(self) -> bytes:
        """Exact byte round trip. Only defined when M is a multiple of 8."""
        if self.length_bits % 8 != 0:
            raise ValueError(
                f"length {self.length_bits} bits is not byte-aligned; no exact byte form"
            )
        return self.packed

    def whole_bytes(self) -> bytes:
        """The floor(M/8) fully populated bytes (drops any partial tail)."""
        return self.packed[: self.length_bits // 8]

    def bits_array(self) -> np.ndarray:
        """Bits as a uint8 0/1 array of length M. Materialized per call."""
        if self.length_bits == 0:
            return np.zeros(0, dtype=np.uint8)
        arr = np.unpackbits(np.frombuffer(self.packed, dtype=np.uint8))
        return arr[: self.length_bits]

    def signs_array(self) -> np.ndarray:
        """The +/-1 mapping s_i = 1 - 2*b_i as float64."""
        return 1.0 - 2.0 * self.bits_array().astype(np.float64)

    def as_int(self) -> int:
        """The bits as one big integer, b_0 in the most significant position."""
        pad = 8 * len(self.packed) - self.length_bits
        return int.from_bytes(self.packed, "big") >> pad

    def complement(self) -> "BitString":
        """Every bit flipped; same length and origin."""
        if self.length_bits == 0:
            return self
        inv = np.frombuffer(self.packed, dtype=np.uint8) ^ np.uint8(0xFF)
        pad = 8 * len(self.packed) - self.length_bits
        if pad:
            inv = inv.copy()
            inv[-1] &= np.uint8((0xFF << pad) & 0xFF)
        return BitString(
            packed=inv.tobytes(),
            length_bits=self.length_bits,
            popcount=self.length_bits - self.popcount,
            origin=self.origin,
        )


def _popcount_bytes(data: bytes) -> int:
    if not data:
        return 0
    return int(np.bitwise_count(np.frombuffer(data, dtype=np.uint8)).sum())


def from_bytes(data: bytes, origin: Origin | None = None) -> BitString:
    """Wrap a byte buffer as a BitString of 8 * len(data) bits."""
    data = bytes(data)
    return BitString(
        packed=data,
        length_bits=8 * len(data),
        popcount=_popcount_bytes(data),
        origin=origin,
    )


def from_bits(bits: Sequence[int] | str | Iterable[int]) -> BitString:
    """Build from explicit bit values (ints, or a '0'/'1' text string).

    Supports arbitrary M, including lengths that are not byte multiples;
    used for small hand-checked vectors and the CLI raw-bits mode.
    """
    if isinstance(bits, str):
        if bits.strip("01"):
            raise ValueError("bit text may contain only '0' and '1' characters")
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(list(bits) if not isinstance(bits, (np.ndarray, list)) else bits,
                         dtype=np.int64)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bit values must be 0 or 1")
        arr = arr.astype(np.uint8)
    packed = np.packbits(arr).tobytes() if arr.size else b""
    return BitString(
        packed=packed,
        length_bits=int(arr.size),
        popcount=int(arr.sum()),
        origin=None,
    )


def from_file(path: str | os.PathLike, max_bits: int = DEFAULT_MAX_BITS) -> BitString:
    """Load a whole file. Files larger than max_bits/8 bytes are rejected."""
    p = Path(path)
    size = p.stat().st_size
    if 8 * size > max_bits:
        raise SizeLimitError(
            f"{p}: {size} bytes = {8 * size} bits exceeds max_bits limit {max_bits}"
        )
    data = p.read_bytes()
    return from_bytes(data, origin=Origin(path=str(p), byte_offset=0, byte_length=len(data)))


def random_slice(b: BitString, seed: int, min_bytes: int, max_bytes: int) -> BitString:
    """Byte-aligned contiguous slice with seeded uniform length and offset.

    Length is drawn uniformly from [min_bytes, max_bytes], then the offset
    uniformly from the remaining valid range. Deterministic in
    (b, seed, min_bytes, max_bytes).
    """
    total = b.length_bits // 8
    if total == 0:
        raise ValueError("cannot slice an empty BitString")
    if not 1 <= min_bytes <= max_bytes <= total:
        raise ValueError(
            f"slice bounds must satisfy 1 <= min ({min_bytes}) <= max ({max_bytes}) "
            f"<= whole bytes ({total})"
        )
    rng = np.random.default_rng(seed)
    length = int(rng.integers(min_bytes, max_bytes + 1))
    offset = int(rng.integers(0, total - length + 1))
    parent_path = b.origin.path if b.origin else None
    return from_bytes(
        b.packed[offset : offset + length],
        origin=Origin(path=parent_path, byte_offset=offset, byte_length=length),
    )
