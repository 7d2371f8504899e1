import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bitspectra import SizeLimitError, from_bits, from_bytes, from_file, random_slice


def test_from_bytes_msb_first():
    b = from_bytes(bytes([0xA5]))
    assert [b.bit(i) for i in range(8)] == [1, 0, 1, 0, 0, 1, 0, 1]
    assert b.length_bits == 8
    assert b.popcount == 4


def test_from_bytes_zero_byte():
    b = from_bytes(b"\x00")
    assert b.length_bits == 8
    assert b.popcount == 0
    assert all(b.bit(i) == 0 for i in range(8))


def test_from_bytes_empty():
    b = from_bytes(b"")
    assert b.length_bits == 0
    assert b.popcount == 0


def test_from_bits_text_and_ints():
    b = from_bits("101")
    assert b.length_bits == 3
    assert b.popcount == 2
    assert [b.bit(i) for i in range(3)] == [1, 0, 1]
    assert from_bits([1, 0, 1]).packed == b.packed


def test_from_bits_rejects_non_binary():
    with pytest.raises(ValueError):
        from_bits("10x1")
    with pytest.raises(ValueError):
        from_bits([0, 2, 1])


def test_as_int_matches_bit_positions():
    assert from_bits("101").as_int() == 0b101
    assert from_bytes(bytes([0xA5, 0x01])).as_int() == 0xA501


def test_from_file_thirteen_bytes(tmp_path):
    p = tmp_path / "f.bin"
    p.write_bytes(bytes(range(13)))
    b = from_file(p)
    assert b.length_bits == 104
    assert b.origin.path == str(p)


def test_from_file_empty(tmp_path):
    p = tmp_path / "empty.bin"
    p.write_bytes(b"")
    assert from_file(p).length_bits == 0


def test_from_file_size_limit(tmp_path):
    p = tmp_path / "big.bin"
    p.write_bytes(bytes(5 * 1024 * 1024))
    with pytest.raises(SizeLimitError) as exc:
        from_file(p, max_bits=2**25)
    assert str(2**25) in str(exc.value)


def test_from_file_unreadable(tmp_path):
    with pytest.raises(OSError):
        from_file(tmp_path / "missing.bin")


def test_complement():
    b = from_bits("10110")
    c = b.complement()
    assert [c.bit(i) for i in range(5)] == [0, 1, 0, 0, 1]
    assert c.popcount == 5 - b.popcount
    assert c.complement().packed == b.packed


def test_random_slice_forced_bounds_gives_prefix():
    b = from_bytes(bytes(range(32)))
    s = random_slice(b, seed=123, min_bytes=32, max_bytes=32)
    assert s.to_bytes() == bytes(range(32))
    assert s.origin.byte_offset == 0


def test_random_slice_deterministic():
    b = from_bytes(np.random.default_rng(5).bytes(1024))
    a = random_slice(b, seed=99, min_bytes=10, max_bytes=200)
    c = random_slice(b, seed=99, min_bytes=10, max_bytes=200)
    assert a.to_bytes() == c.to_bytes()
    assert a.origin == c.origin


def test_random_slice_content_matches_source():
    src = np.random.default_rng(7).bytes(1000)
    b = from_bytes(src)
    s = random_slice(b, seed=1, min_bytes=30, max_bytes=30)
    off = s.origin.byte_offset
    assert s.origin.byte_length == 30
    assert s.to_bytes() == src[off : off + 30]


def test_random_slice_bounds_checked():
    b = from_bytes(bytes(16))
    with pytest.raises(ValueError):
        random_slice(b, seed=0, min_bytes=0, max_bytes=4)
    with pytest.raises(ValueError):
        random_slice(b, seed=0, min_bytes=8, max_bytes=4)
    with pytest.raises(ValueError):
        random_slice(b, seed=0, min_bytes=1, max_bytes=17)
    with pytest.raises(ValueError):
        random_slice(from_bytes(b""), seed=0, min_bytes=1, max_bytes=1)


@given(st.binary(max_size=256))
def test_bytes_round_trip(data):
    assert from_bytes(data).to_bytes() == data


@given(st.binary(min_size=1, max_size=256))
def test_popcount_matches_per_byte_sum(data):
    expected = sum(bin(v).count("1") for v in data)
    assert from_bytes(data).popcount == expected


@given(st.binary(min_size=2, max_size=128), st.integers(0, 2**64 - 1))
def test_random_slice_bits_match_source(data, seed):
    b = from_bytes(data)
    s = random_slice(b, seed=seed, min_bytes=1, max_bytes=len(data))
    off, ln = s.origin.byte_offset, s.origin.byte_length
    src_bits = b.bits_array()[8 * off : 8 * (off + ln)]
    assert np.array_equal(s.bits_array(), src_bits)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_bits_array_round_trip(bits):
    b = from_bits(bits)
    assert b.bits_array().tolist() == bits
    assert b.popcount == sum(bits)
