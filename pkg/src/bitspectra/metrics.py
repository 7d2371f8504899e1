"""Circular self-correlation metrics over bit strings.

For a bit string B of length M, the disagreement count at lag n is

    C(n) = sum_{i=0..M-1} B[i] XOR B[(i+n) mod M],   0 <= n < M

and the lag profile is V(n) = M - 2*C(n). Under the +/-1 mapping
s_i = 1 - 2*B[i] this is the circular autocorrelation
V(n) = sum_i s_i * s_{(i+n) mod M}, which is what the FFT kernel
computes via the power spectrum. Aggregates:

    mf     = sum_n V(n)            (equals (M - 2*popcount)^2)
    adj_mf = (1 - mf/M^2) * mf
    df     = sum_n (V(n)/M)^2 - 1  (the -1 cancels the n=0 term)

Three interchangeable lag-profile kernels are provided; they agree
element-exactly on every input (the FFT kernel after rounding):

    reference    O(M^2) bit comparisons, the ground truth
    bitparallel  word-wide XOR + popcount per lag, O(M/w) per lag
    fft          power-spectrum autocorrelation, O(M log M) total
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .bitstring import BitString
from .errors import InternalCheckError, NumericalPrecisionError, SizeLimitError

DEFAULT_REFERENCE_CAP = 1 << 14
DEFAULT_BITPARALLEL_CAP = 1 << 20  # auto-kernel switch point, not a hard cap
DEFAULT_FFT_CAP = 1 << 27
FFT_ROUND_TOL = 0.25

KERNELS = ("reference", "bitparallel", "fft", "auto")


@dataclass(frozen=True)
class LagProfile:
    """The sequence V(n) = M - 2*C(n) for n = 0..M-1, as signed integers."""

    length_bits: int
    values: np.ndarray  # int64, shape (M,)

    def __post_init__(self):
        if self.values.shape != (self.length_bits,):
            raise ValueError("profile length does not match length_bits")


@dataclass(frozen=True)
class MetricsRecord:
    """Per-input results of the full metric pipeline."""

    source: str
    length_bits: int
    popcount: int
    mf: int
    adj_mf: float
    df: float
    entropy_bits_per_byte: float
    kernel: str
    runtime_ms: float


def _require_nonempty(b: BitString) -> int:
    if b.length_bits < 1:
        raise ValueError("bit string is empty")
    return b.length_bits


def _corr_count(bits: np.ndarray, n: int) -> int:
    # XOR of 0/1 values is inequality; roll(-n) aligns index i+n (mod M) with i.
    return int(np.count_nonzero(bits != np.roll(bits, -n)))


def corr_xor(b: BitString, n: int) -> int:
    """Disagreement count C(n) between B and its rotation by n bits."""
    m = _require_nonempty(b)
    if not 0 <= n < m:
        raise ValueError(f"lag {n} out of range [0, {m})")
    return _corr_count(b.bits_array(), n)


def lag_profile_reference(b: BitString, cap: int = DEFAULT_REFERENCE_CAP) -> LagProfile:
    """Ground-truth kernel: one rotate-and-compare pass per lag, O(M^2) bits."""
    m = _require_nonempty(b)
    if m > cap:
        raise SizeLimitError(
            f"M={m} exceeds reference kernel cap {cap}; use bitparallel or fft"
        )
    bits = b.bits_array()
    values = np.empty(m, dtype=np.int64)
    for n in range(m):
        values[n] = m - 2 * _corr_count(bits, n)
    return LagProfile(length_bits=m, values=values)


def lag_profile_bitparallel(b: BitString) -> LagProfile:
    """XOR + popcount on machine words via arbitrary-precision integers.

    The doubled integer (x << M) | x makes every circular rotation a
    single shift-and-mask. Profile symmetry V(n) == V(M-n) halves the
    lag loop; the emitted profile still has all M entries.
    """
    m = _require_nonempty(b)
    x = b.as_int()
    mask = (1 << m) - 1
    x2 = (x << m) | x
    values = np.empty(m, dtype=np.int64)
    values[0] = m
    for n in range(1, m // 2 + 1):
        rot = (x2 >> (m - n)) & mask
        v = m - 2 * (x ^ rot).bit_count()
        values[n] = v
        values[m - n] = v
    return LagProfile(length_bits=m, values=values)


def fft_autocorr_raw(b: BitString, cap: int = DEFAULT_FFT_CAP) -> np.ndarray:
    """Circular autocorrelation of the +/-1 sequence, before rounding.

    Forward real transform, squared magnitudes, inverse transform.
    Returns float64 of length M whose entries are V(n) up to FFT
    roundoff.
    """
    m = b.length_bits
    if m < 2:
        raise ValueError(f"fft kernel needs M >= 2, got {m}")
    if m > cap:
        raise SizeLimitError(f"M={m} exceeds fft cap {cap}")
    spectrum = np.fft.rfft(b.signs_array())
    power = spectrum.real * spectrum.real
    power += spectrum.imag * spectrum.imag
    del spectrum
    return np.fft.irfft(power, n=m)


def lag_profile_fft(
    b: BitString, cap: int = DEFAULT_FFT_CAP, tol: float = FFT_ROUND_TOL
) -> LagProfile:
    """FFT kernel. Every raw value must sit within `tol` of an integer."""
    raw = fft_autocorr_raw(b, cap=cap)
    rounded = np.rint(raw)
    deviation = float(np.max(np.abs(raw - rounded)))
    if deviation > tol:
        raise NumericalPrecisionError(
            f"fft autocorrelation deviates {deviation:.3g} from integers "
            f"(tolerance {tol}); fall back to the bitparallel kernel"
        )
    return LagProfile(length_bits=b.length_bits, values=rounded.astype(np.int64))


def _exact_sum_sq(values: np.ndarray) -> int:
    """Exact integer sum of squares. Each square fits int64; partial sums
    over 256-element chunks stay below 2^63, the grand total is a Python int."""
    sq = values.astype(np.int64)
    sq = sq * sq
    k = (sq.size // 256) * 256
    total = 0
    if k:
        chunks = sq[:k].reshape(-1, 256).sum(axis=1)
        total += int(chunks.sum(dtype=object))
    for tail in sq[k:]:
        total += int(tail)
    return total


def mf_total(p: LagProfile) -> int:
    """Sum of the lag profile. Always equals (M - 2*popcount)^2."""
    return int(p.values.sum())


def mf_closed_form(b: BitString) -> int:
    """mf without the profile: (M - 2*popcount)^2, exact, O(M/w)."""
    _require_nonempty(b)
    s = b.length_bits - 2 * b.popcount
    return s * s


def adj_mf(mf: int, m: int) -> float:
    """First-order adjustment (1 - mf/M^2) * mf; zero at both extremes."""
    if m < 1:
        raise ValueError("M must be >= 1")
    if not 0 <= mf <= m * m:
        raise ValueError(f"mf={mf} outside [0, M^2={m * m}]")
    return (1.0 - mf / (m * m)) * mf


def df(p: LagProfile) -> float:
    """Normalized profile energy minus the zero-lag unit: sum (V(n)/M)^2 - 1.

    The numerator sum V(n)^2 - M^2 is computed in exact integer
    arithmetic, so the only rounding is the final division.
    """
    m = p.length_bits
    numerator = _exact_sum_sq(p.values) - m * m
    return numerator / (m * m)


def df_spectral(b: BitString, cap: int = DEFAULT_FFT_CAP) -> float:
    """df via Parseval, without materializing the profile.

    With spectrum s_hat of the +/-1 sequence,
    sum_n V(n)^2 = (1/M) * sum_k |s_hat_k|^4, so
    df = sum_k |s_hat_k|^4 / M^3 - 1. Real-input symmetry lets the
    half spectrum stand in for the full sum.
    """
    m = b.length_bits
    if m < 2:
        raise ValueError(f"spectral df needs M >= 2, got {m}")
    if m > cap:
        raise SizeLimitError(f"M={m} exceeds fft cap {cap}")
    spectrum = np.fft.rfft(b.signs_array())
    power = spectrum.real * spectrum.real
    power += spectrum.imag * spectrum.imag
    del spectrum
    quartic = power * power
    if m % 2 == 0:
        total4 = float(quartic[0]) + float(quartic[-1]) + 2.0 * float(quartic[1:-1].sum())
    else:
        total4 = float(quartic[0]) + 2.0 * float(quartic[1:].sum())
    return total4 / (float(m) ** 3) - 1.0


def shannon_entropy_bytes(data: bytes) -> float:
    """Empirical byte entropy -sum p_v log2 p_v, in bits per byte, range [0, 8]."""
    if len(data) == 0:
        raise ValueError("entropy is undefined for empty input")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    p = counts[counts > 0] / len(data)
    return float(-(p * np.log2(p)).sum()) + 0.0


def _pick_kernel(m: int, reference_cap: int, bitparallel_cap: int) -> str:
    if m <= reference_cap:
        return "reference"
    if m <= bitparallel_cap:
        return "bitparallel"
    return "fft"


def analyze(
    b: BitString,
    kernel: str = "auto",
    reference_cap: int = DEFAULT_REFERENCE_CAP,
    bitparallel_cap: int = DEFAULT_BITPARALLEL_CAP,
    fft_cap: int = DEFAULT_FFT_CAP,
) -> MetricsRecord:
    """Run the full pipeline on one bit string.

    `auto` picks reference up to its cap, then bitparallel, then fft;
    an fft precision failure under `auto` falls back to bitparallel.
    The reported mf comes from the closed form and is cross-checked
    against the profile sum; disagreement raises InternalCheckError.
    """
    m = _require_nonempty(b)
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    t0 = time.perf_counter()

    chosen = kernel if kernel != "auto" else _pick_kernel(m, reference_cap, bitparallel_cap)
    if chosen == "reference":
        profile = lag_profile_reference(b, cap=reference_cap)
    elif chosen == "bitparallel":
        profile = lag_profile_bitparallel(b)
    else:
        try:
            profile = lag_profile_fft(b, cap=fft_cap)
        except NumericalPrecisionError:
            if kernel != "auto":
                raise
            chosen = "bitparallel"
            profile = lag_profile_bitparallel(b)

    mf = mf_closed_form(b)
    profile_sum = mf_total(profile)
    if profile_sum != mf:
        raise InternalCheckError(
            f"profile sum {profile_sum} != closed-form mf {mf} "
            f"(kernel {chosen}, M={m}); kernel bug"
        )

    whole = b.whole_bytes()
    entropy = shannon_entropy_bytes(whole) if whole else math.nan
    record = MetricsRecord(
        source=b.origin.describe() if b.origin else "<data>",
        length_bits=m,
        popcount=b.popcount,
        mf=mf,
        adj_mf=adj_mf(mf, m),
        df=df(profile),
        entropy_bits_per_byte=entropy,
        kernel=chosen,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return record
