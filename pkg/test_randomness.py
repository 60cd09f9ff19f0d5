#!/usr/bin/env python3
"""
随机流测试 / Random Stream Tests
"""

import numpy as np
import pytest

from dp_forensics_toolkit.randomness import (
    GOLDEN_GAMMA,
    U32_MAX_DOUBLE,
    RngStream,
    derive_seed,
    splitmix64,
)


def test_first_draw_matches_reference_splitmix64():
    # 种子0的第一个 splitmix64 输出 / First splitmix64 output for seed 0
    assert RngStream(0).next_u64() == 0xE220A8397B1DCDAF
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_same_seed_replays_identically():
    a, b = RngStream(1234), RngStream(1234)
    assert [a.next_u32() for _ in range(50)] == [b.next_u32() for _ in range(50)]
    assert a.counter == b.counter == 50


def test_derived_streams_differ():
    s1, s2 = RngStream.derive(7, 1), RngStream.derive(7, 2)
    assert s1.next_u32() != s2.next_u32()
    assert derive_seed(7, 1) == splitmix64(7 ^ splitmix64(1))


def test_bulk_draws_match_scalar_draws():
    scalar = RngStream(42)
    expected = [scalar.next_u32() for _ in range(257)]
    bulk = RngStream(42)
    got = bulk.next_u32_array(257)
    assert got.dtype == np.uint64
    assert [int(v) for v in got] == expected
    assert bulk.counter == scalar.counter


def test_bulk_draws_continue_the_sequence():
    s = RngStream(9)
    s.next_u32()
    tail = s.next_u32_array(3)
    ref = RngStream(9)
    assert [int(v) for v in tail] == [ref.next_u32() for _ in range(4)][1:]


def test_seek_rewinds_to_counter():
    s = RngStream(5)
    first = s.next_u32_array(10)
    s.seek(3)
    assert s.next_u32() == int(first[3])
    assert s.counter == 4


def test_uniform_unit_double_is_raw_over_u32_max():
    raw = RngStream(11).next_u32()
    assert RngStream(11).uniform_unit_double() == raw / U32_MAX_DOUBLE


def test_uniform_unit_double_reference_points():
    assert 0 / U32_MAX_DOUBLE == 0.0
    assert (2**32 - 1) / U32_MAX_DOUBLE == 1.0
    assert 2**31 / U32_MAX_DOUBLE == pytest.approx(0.5000000001164153, rel=1e-15)


def test_uniform_doubles_invert_to_integers():
    s = RngStream(3)
    u = s.uniform_unit_doubles(10000)
    raw = RngStream(3).next_u32_array(10000).astype(np.float64)
    assert np.array_equal(np.rint(u * U32_MAX_DOUBLE), raw)
    assert u.min() >= 0.0 and u.max() <= 1.0


def test_signed_int31_twos_complement():
    s = RngStream(77)
    twin = RngStream(77)
    for _ in range(1000):
        raw = twin.next_u32()
        expected = raw - 2**32 if raw >= 2**31 else raw
        assert s.signed_int31() == expected


def test_signed_int31_array_matches_scalar():
    s = RngStream(8)
    bulk = RngStream(8).signed_int31_array(100)
    assert [int(v) for v in bulk] == [s.signed_int31() for _ in range(100)]


def test_u32_mean_is_one_half():
    draws = RngStream(2024).next_u32_array(10**6).astype(np.float64)
    assert abs(draws.mean() / 2**32 - 0.5) < 0.002


def test_signed_int31_covers_range():
    v = RngStream(99).signed_int31_array(10**6)
    assert v.min() < -(2**30)
    assert v.max() > 2**30
    assert v.min() >= -(2**31) and v.max() <= 2**31 - 1


def test_uniform_index_bounds():
    s = RngStream(1)
    idx = [s.uniform_index(7) for _ in range(2000)]
    assert min(idx) == 0 and max(idx) == 6
    arr = RngStream(1).uniform_index_array(2000, 7)
    assert [int(v) for v in arr] == idx


def test_uniform_index_array_rejects_oversized_range():
    with pytest.raises(ValueError):
        RngStream(0).uniform_index_array(4, 2**32 + 1)


def test_golden_gamma_constant():
    assert GOLDEN_GAMMA == 0x9E3779B97F4A7C15
