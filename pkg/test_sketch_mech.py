#!/usr/bin/env python3
"""
草图机制测试 / Sketch Mechanism Tests
"""

import math

import numpy as np
import pytest
from scipy.linalg import hadamard

from dp_forensics_toolkit.exceptions import OutOfDomain, PreconditionViolation
from dp_forensics_toolkit.randomness import RngStream
from dp_forensics_toolkit.sketch_mech import (
    SketchConfig,
    cms_client,
    hadamard_entry,
    hash_bucket,
    hcms_client,
    keep_prob,
    obh_bit,
    one_bit_histogram,
    one_hot,
    randomize_bits,
    sym_ohe,
)


def test_keep_prob_values():
    assert keep_prob(0.0) == 0.5
    assert keep_prob(math.log(3.0)) == pytest.approx(0.75)
    assert keep_prob(1000.0) == 1.0


def test_sketch_config_validation():
    with pytest.raises(PreconditionViolation):
        SketchConfig(epsilon=0.0, d=4)
    with pytest.raises(PreconditionViolation):
        SketchConfig(epsilon=1.0, d=0)
    assert SketchConfig(epsilon=1.0, d=1024).is_power_of_two
    assert not SketchConfig(epsilon=1.0, d=1000).is_power_of_two


class TestSymOhe:
    def test_output_shape(self):
        y = sym_ohe(3, SketchConfig(epsilon=1.0, d=10), RngStream(0))
        assert y.dtype == np.uint8 and y.size == 10
        assert set(np.unique(y)) <= {0, 1}

    @pytest.mark.parametrize("x", [0, 11])
    def test_rejects_out_of_domain(self, x):
        with pytest.raises(OutOfDomain):
            sym_ohe(x, SketchConfig(epsilon=1.0, d=10), RngStream(0))

    def test_large_epsilon_keeps_one_hot(self):
        y = sym_ohe(4, SketchConfig(epsilon=50.0, d=16), RngStream(3))
        assert np.array_equal(y, one_hot(3, 16))

    def test_flip_rate(self):
        eps = 1.0
        flipped = 0
        trials = 4000
        for t in range(trials):
            y = sym_ohe(1, SketchConfig(epsilon=eps, d=2), RngStream.derive(5, t))
            flipped += int(y[0] == 0) + int(y[1] == 1)
        rate = flipped / (2 * trials)
        expected = 1.0 / (1.0 + math.e)
        assert abs(rate - expected) < 0.02

    def test_randomize_bits_replays(self):
        v = one_hot(2, 32)
        assert np.array_equal(randomize_bits(v, 1.0, RngStream(4)), randomize_bits(v, 1.0, RngStream(4)))


class TestCountMeanSketch:
    def test_hash_bucket_range_and_determinism(self):
        buckets = [hash_bucket(j, "👉", 1024) for j in range(200)]
        assert all(0 <= b < 1024 for b in buckets)
        assert buckets == [hash_bucket(j, "👉", 1024) for j in range(200)]
        assert len(set(buckets)) > 100

    def test_hash_bucket_str_and_bytes_agree(self):
        assert hash_bucket(5, "✗", 1024) == hash_bucket(5, "✗".encode("utf-8"), 1024)

    def test_client_record(self):
        config = SketchConfig(epsilon=4.0, d=1024, k=65536)
        record = cms_client("👉", config, RngStream(1))
        assert 0 <= record.j < 65536
        assert record.bits.size == 1024

    def test_high_epsilon_record_is_hashed_one_hot(self):
        config = SketchConfig(epsilon=100.0, d=64, k=16)
        record = cms_client("abc", config, RngStream(2))
        assert np.array_equal(record.bits, one_hot(hash_bucket(record.j, "abc", 64), 64))


class TestHadamardSketch:
    def test_entries_match_sylvester_matrix(self):
        h = hadamard(16)
        for l in range(16):  # noqa: E741
            for c in range(16):
                assert hadamard_entry(l, c) == h[l, c]

    def test_entry_domain(self):
        with pytest.raises(OutOfDomain):
            hadamard_entry(16, 0, 16)

    def test_requires_power_of_two(self):
        with pytest.raises(PreconditionViolation):
            hcms_client("x", SketchConfig(epsilon=1.0, d=1000, k=4), RngStream(0))

    def test_high_epsilon_record_is_exact(self):
        config = SketchConfig(epsilon=100.0, d=1024, k=65536)
        record = hcms_client("👉", config, RngStream(9))
        assert record.y == hadamard_entry(record.l, hash_bucket(record.j, "👉", 1024))
        assert 0 <= record.l < 1024


class TestOneBitHistogram:
    def test_bit_values(self):
        bits = [obh_bit("👉", l) for l in range(128)]
        assert set(bits) <= {0, 1}
        assert 0 < sum(bits) < 128

    def test_bit_index_domain(self):
        with pytest.raises(OutOfDomain):
            obh_bit("👉", 128)

    def test_domain_limit(self):
        with pytest.raises(OutOfDomain):
            one_bit_histogram("👉", SketchConfig(epsilon=1.0, d=129), RngStream(0))

    def test_keep_rate(self):
        config = SketchConfig(epsilon=1.0, d=128)
        kept = 0
        trials = 4000
        for t in range(trials):
            record = one_bit_histogram("👉", config, RngStream.derive(1, t))
            kept += record.y == obh_bit("👉", record.l)
        assert abs(kept / trials - keep_prob(1.0)) < 0.025
