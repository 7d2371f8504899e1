import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitspectra import (
    InternalCheckError,
    NumericalPrecisionError,
    SizeLimitError,
    adj_mf,
    analyze,
    corr_xor,
    df,
    df_spectral,
    from_bits,
    from_bytes,
    lag_profile_bitparallel,
    lag_profile_fft,
    lag_profile_reference,
    mf_closed_form,
    mf_total,
    shannon_entropy_bytes,
)
from bitspectra import metrics
from conftest import random_bitstring

bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=256)


# --- corr_xor -------------------------------------------------------------

def test_corr_xor_zero_lag_is_zero():
    for b in (from_bits("101"), from_bytes(b"\xa5\x17")):
        assert corr_xor(b, 0) == 0


def test_corr_xor_hand_checked():
    # 101 at lag 1: circular pairs (1,0):1 (0,1):1 (1,1):0 -> 2
    assert corr_xor(from_bits("101"), 1) == 2
    # 1100 at lag 2: every bit meets its complement -> 4
    assert corr_xor(from_bits("1100"), 2) == 4


def test_corr_xor_argument_errors():
    b = from_bits("101")
    with pytest.raises(ValueError):
        corr_xor(b, 3)
    with pytest.raises(ValueError):
        corr_xor(b, -1)
    with pytest.raises(ValueError):
        corr_xor(from_bytes(b""), 0)


# --- lag profile kernels --------------------------------------------------

def test_reference_profile_anchors():
    assert lag_profile_reference(from_bits("101")).values.tolist() == [3, -1, -1]
    assert lag_profile_reference(from_bits("1100")).values.tolist() == [4, 0, -4, 0]
    assert lag_profile_reference(from_bytes(b"\x00")).values.tolist() == [8] * 8


def test_reference_cap():
    b = random_bitstring(np.random.default_rng(0), 64)
    with pytest.raises(SizeLimitError):
        lag_profile_reference(b, cap=32)


def test_bitparallel_profile_anchors():
    assert lag_profile_bitparallel(from_bits("101")).values.tolist() == [3, -1, -1]
    assert lag_profile_bitparallel(from_bits("1100")).values.tolist() == [4, 0, -4, 0]
    assert lag_profile_bitparallel(from_bits("1")).values.tolist() == [1]


def test_bitparallel_matches_reference_4096():
    b = random_bitstring(np.random.default_rng(42), 4096)
    ref = lag_profile_reference(b)
    fast = lag_profile_bitparallel(b)
    assert np.array_equal(ref.values, fast.values)


def test_fft_profile_anchors():
    assert lag_profile_fft(from_bits("1100")).values.tolist() == [4, 0, -4, 0]
    assert lag_profile_fft(from_bytes(b"\xff")).values.tolist() == [8] * 8


def test_fft_matches_bitparallel_64k():
    b = random_bitstring(np.random.default_rng(7), 1 << 16)
    raw = metrics.fft_autocorr_raw(b)
    assert float(np.max(np.abs(raw - np.rint(raw)))) < 0.25
    assert np.array_equal(lag_profile_fft(b).values, lag_profile_bitparallel(b).values)


def test_fft_rejects_m_below_two():
    with pytest.raises(ValueError):
        lag_profile_fft(from_bits("1"))


def test_fft_cap():
    b = random_bitstring(np.random.default_rng(1), 64)
    with pytest.raises(SizeLimitError):
        lag_profile_fft(b, cap=32)


def test_fft_precision_error(monkeypatch):
    b = from_bits("1100")
    skewed = metrics.fft_autocorr_raw(b) + 0.3
    monkeypatch.setattr(metrics, "fft_autocorr_raw", lambda *a, **k: skewed)
    with pytest.raises(NumericalPrecisionError):
        metrics.lag_profile_fft(b)


@settings(max_examples=60, deadline=None)
@given(bit_lists)
def test_kernels_agree(bits):
    b = from_bits(bits)
    ref = lag_profile_reference(b).values
    assert np.array_equal(ref, lag_profile_bitparallel(b).values)
    if b.length_bits >= 2:
        assert np.array_equal(ref, lag_profile_fft(b).values)


# --- aggregates -----------------------------------------------------------

def test_mf_total_anchors():
    assert mf_total(lag_profile_reference(from_bytes(b"\x00"))) == 64
    assert mf_total(lag_profile_reference(from_bits("101"))) == 1
    assert mf_total(lag_profile_reference(from_bits("1100"))) == 0


def test_mf_closed_form_anchors():
    assert mf_closed_form(from_bytes(b"\x00")) == 64
    assert mf_closed_form(from_bits("101")) == 1
    assert mf_closed_form(from_bits("0110")) == 0


@settings(max_examples=200)
@given(bit_lists)
def test_mf_closed_form_identity(bits):
    b = from_bits(bits)
    assert mf_total(lag_profile_bitparallel(b)) == mf_closed_form(b)


def test_adj_mf_anchors():
    assert adj_mf(64, 8) == 0.0
    assert adj_mf(0, 8) == 0.0
    assert adj_mf(1, 3) == pytest.approx(8 / 9, abs=1e-15)


def test_adj_mf_argument_errors():
    with pytest.raises(ValueError):
        adj_mf(65, 8)
    with pytest.raises(ValueError):
        adj_mf(-1, 8)
    with pytest.raises(ValueError):
        adj_mf(0, 0)


@given(bit_lists)
def test_adj_mf_complement_invariant(bits):
    b = from_bits(bits)
    m = b.length_bits
    assert adj_mf(mf_closed_form(b), m) == adj_mf(mf_closed_form(b.complement()), m)


def test_df_anchors():
    assert df(lag_profile_reference(from_bits("1100"))) == 1.0
    assert df(lag_profile_reference(from_bits("101"))) == pytest.approx(2 / 9, abs=1e-15)
    assert df(lag_profile_reference(from_bytes(b"\x00\x00"))) == 15.0


def test_df_alternating_is_m_minus_one():
    b = from_bits("10" * 512)
    assert mf_closed_form(b) == 0
    assert df(lag_profile_bitparallel(b)) == 1023.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=2, max_size=200))
def test_df_spectral_matches_df(bits):
    b = from_bits(bits)
    exact = df(lag_profile_bitparallel(b))
    approx = df_spectral(b)
    assert approx == pytest.approx(exact, rel=1e-6, abs=1e-9)


def test_df_spectral_random_4096():
    b = random_bitstring(np.random.default_rng(3), 1 << 12)
    exact = df(lag_profile_bitparallel(b))
    assert df_spectral(b) == pytest.approx(exact, rel=1e-6)


# --- profile invariants ---------------------------------------------------

@settings(max_examples=200)
@given(bit_lists)
def test_profile_invariants(bits):
    b = from_bits(bits)
    m = b.length_bits
    v = lag_profile_bitparallel(b).values
    assert v[0] == m
    assert np.all(np.abs(v) <= m)
    assert np.all((m - v) % 2 == 0)
    for n in range(1, m):
        assert v[n] == v[m - n]
    assert df(lag_profile_bitparallel(b)) >= 0.0


# --- entropy ----------------------------------------------------------------

def test_entropy_constant_bytes():
    assert shannon_entropy_bytes(b"\x41" * 100) == 0.0


def test_entropy_two_equal_values():
    assert shannon_entropy_bytes(b"\x00\xff" * 50) == pytest.approx(1.0)


def test_entropy_uniform_256():
    assert shannon_entropy_bytes(bytes(range(256)) * 3) == pytest.approx(8.0)


def test_entropy_empty_rejected():
    with pytest.raises(ValueError):
        shannon_entropy_bytes(b"")


# --- analyze ----------------------------------------------------------------

def test_analyze_101():
    rec = analyze(from_bits("101"))
    assert rec.mf == 1
    assert rec.adj_mf == pytest.approx(8 / 9, abs=1e-12)
    assert rec.df == pytest.approx(2 / 9, abs=1e-12)
    assert rec.kernel == "reference"


def test_analyze_all_zero_byte():
    rec = analyze(from_bytes(b"\x00"))
    assert rec.mf == 64
    assert rec.adj_mf == 0.0
    assert rec.df == 7.0
    assert rec.entropy_bits_per_byte == 0.0
    assert rec.popcount == 0


def test_analyze_kernels_identical_results():
    b = random_bitstring(np.random.default_rng(11), 600)
    recs = [analyze(b, kernel=k) for k in ("reference", "bitparallel", "fft")]
    assert len({r.mf for r in recs}) == 1
    assert len({r.df for r in recs}) == 1
    assert len({r.adj_mf for r in recs}) == 1


def test_analyze_auto_kernel_selection():
    rng = np.random.default_rng(2)
    assert analyze(random_bitstring(rng, 512)).kernel == "reference"
    assert analyze(random_bitstring(rng, 1 << 15)).kernel == "bitparallel"
    assert analyze(random_bitstring(rng, 4096), reference_cap=1024,
                   bitparallel_cap=2048).kernel == "fft"


def test_analyze_auto_falls_back_on_precision_error(monkeypatch):
    def broken(b, cap=metrics.DEFAULT_FFT_CAP):
        raise NumericalPrecisionError("synthetic failure")

    monkeypatch.setattr(metrics, "fft_autocorr_raw", broken)
    b = random_bitstring(np.random.default_rng(4), 256)
    rec = metrics.analyze(b, kernel="auto", reference_cap=16, bitparallel_cap=32)
    assert rec.kernel == "bitparallel"
    with pytest.raises(NumericalPrecisionError):
        metrics.analyze(b, kernel="fft")


def test_analyze_cross_check_guards_kernel_bugs(monkeypatch):
    monkeypatch.setattr(metrics, "mf_total", lambda p: -1)
    with pytest.raises(InternalCheckError):
        metrics.analyze(from_bits("101"))


def test_analyze_rejects_empty_and_unknown_kernel():
    with pytest.raises(ValueError):
        analyze(from_bytes(b""))
    with pytest.raises(ValueError):
        analyze(from_bits("101"), kernel="simd")


def test_analyze_respects_fft_cap():
    b = random_bitstring(np.random.default_rng(6), 128)
    with pytest.raises(SizeLimitError):
        analyze(b, kernel="fft", fft_cap=64)
