#!/usr/bin/env python3
"""
浮点噪声机制测试 / Floating-Point Noise Mechanism Tests
"""

import math

import numpy as np
import pytest

from dp_forensics_toolkit.exceptions import NonFiniteInput, PreconditionViolation, SaturatedSample
from dp_forensics_toolkit.float_mech import (
    GaussParams,
    LaplaceParams,
    clip_to_unit_ball,
    gaussian_mechanism,
    laplace_cdf,
    laplace_inverse_cdf,
    marsaglia_pair,
    marsaglia_valid,
    number_randomizer,
    sample_gaussian_vector,
    sample_laplace,
    standard_normal_pairs,
)
from dp_forensics_toolkit.randomness import RngStream


class TestLaplace:
    def test_inverse_cdf_at_median_is_zero(self):
        assert laplace_inverse_cdf(0.5, 1.0) == 0.0

    @pytest.mark.parametrize("u", [0.0, 1.0])
    def test_inverse_cdf_saturates_at_endpoints(self, u):
        with pytest.raises(SaturatedSample):
            laplace_inverse_cdf(u, 1.0)

    def test_inverse_cdf_sign(self):
        assert laplace_inverse_cdf(0.25, 1.0) < 0.0
        assert laplace_inverse_cdf(0.75, 1.0) > 0.0
        assert laplace_inverse_cdf(0.75, 2.0) == pytest.approx(2.0 * math.log(2.0))

    def test_cdf_inverts_inverse_cdf(self):
        for u in (0.1, 0.3, 0.7, 0.9):
            assert laplace_cdf(laplace_inverse_cdf(u, 1.5), 1.5) == pytest.approx(u, rel=1e-12)

    def test_params_from_range(self):
        assert LaplaceParams.from_range(0.0, 1.0, 1.0).lam == 1.0
        assert LaplaceParams.from_range(0.0, 100.0, 0.2).lam == pytest.approx(500.0)

    @pytest.mark.parametrize("lam", [0.0, -1.0, float("inf")])
    def test_params_reject_bad_scale(self, lam):
        with pytest.raises(PreconditionViolation):
            LaplaceParams(mu=0.0, lam=lam)

    def test_params_reject_bad_epsilon(self):
        with pytest.raises(PreconditionViolation):
            LaplaceParams.from_range(0.0, 1.0, 0.0)

    def test_sample_uses_one_uniform(self):
        u = RngStream(10).uniform_unit_double()
        y = sample_laplace(RngStream(10), LaplaceParams(mu=3.0, lam=1.0))
        assert y == 3.0 + laplace_inverse_cdf(u, 1.0)

    def test_sample_mean_and_spread(self):
        s = RngStream(4)
        params = LaplaceParams(mu=2.0, lam=1.0)
        ys = np.array([sample_laplace(s, params) for _ in range(20000)])
        assert abs(ys.mean() - 2.0) < 0.05
        # Var = 2λ²
        assert ys.var() == pytest.approx(2.0, rel=0.1)

    def test_number_randomizer_replays(self):
        a = number_randomizer(5.0, 1.0, 1.0, RngStream(6))
        b = number_randomizer(5.0, 1.0, 1.0, RngStream(6))
        assert a == b


class TestMarsaglia:
    def test_valid_mask(self):
        mask = marsaglia_valid([0, 1, 2**31 - 1, -(2**31)], [0, 0, 2**31 - 1, 0])
        assert list(mask) == [False, True, False, False]

    @pytest.mark.parametrize("v1,v2", [(0, 0), (2**31 - 1, 2**31 - 1)])
    def test_pair_precondition(self, v1, v2):
        with pytest.raises(PreconditionViolation):
            marsaglia_pair(v1, v2, 0.0, 1.0)

    def test_pair_on_axis(self):
        pair = marsaglia_pair(1, 0, 0.0, 1.0)
        assert pair.y2 == 0.0
        # sqrt(-2 ln 2^-62) ≈ 9.27
        assert 9.0 < float(pair.y1) < 9.5
        assert isinstance(pair.y1, np.float32)

    def test_pair_is_antisymmetric(self):
        a = marsaglia_pair(123456, -654321, 0.0, 1.0)
        b = marsaglia_pair(-123456, 654321, 0.0, 1.0)
        assert a.y1 == -b.y1 and a.y2 == -b.y2

    def test_bulk_pairs_leave_stream_where_scalar_loop_would(self):
        n_pairs = 300
        bulk_stream = RngStream(21)
        z, used = standard_normal_pairs(bulk_stream, n_pairs)

        ref = RngStream(21)
        accepted, proposals = [], 0
        while len(accepted) < n_pairs:
            v1, v2 = ref.signed_int31(), ref.signed_int31()
            proposals += 1
            if marsaglia_valid(v1, v2):
                accepted.append((v1, v2))
        assert used == proposals
        assert bulk_stream.counter == ref.counter
        expected = [marsaglia_pair(v1, v2, 0.0, 1.0) for v1, v2 in accepted[:5]]
        got = z[:10].astype(np.float32)
        assert [float(p.y1) for p in expected] == [float(v) for v in got[0::2]]
        assert [float(p.y2) for p in expected] == [float(v) for v in got[1::2]]

    def test_gaussian_vector_shape_and_moments(self):
        y = sample_gaussian_vector(RngStream(1), GaussParams(mu=0.0, sigma=1.0, dim=100001))
        assert y.dtype == np.float32
        assert y.size == 100001
        assert abs(float(y.mean())) < 0.02
        assert float(y.std()) == pytest.approx(1.0, abs=0.02)

    def test_gaussian_params_validation(self):
        with pytest.raises(PreconditionViolation):
            GaussParams(mu=0.0, sigma=0.0)
        with pytest.raises(PreconditionViolation):
            GaussParams(mu=0.0, sigma=1.0, dim=0)


class TestGaussianMechanism:
    def test_clip_scales_into_unit_ball(self):
        clipped = clip_to_unit_ball([0.0, 3.0, 0.0, 0.0])
        assert list(clipped) == [0.0, 1.0, 0.0, 0.0]
        assert list(clip_to_unit_ball(clipped)) == list(clipped)

    def test_clip_keeps_short_vectors(self):
        x = np.array([0.1, 0.2])
        assert np.array_equal(clip_to_unit_ball(x), x)

    def test_clip_rejects_nan(self):
        with pytest.raises(NonFiniteInput):
            clip_to_unit_ball([0.0, float("nan")])

    def test_mechanism_output(self):
        y = gaussian_mechanism(np.zeros(11), 1.0, RngStream(2))
        assert y.dtype == np.float32 and y.size == 11
        again = gaussian_mechanism(np.zeros(11), 1.0, RngStream(2))
        assert np.array_equal(y, again)

    def test_zero_input_matches_sampler(self):
        y = gaussian_mechanism(np.zeros(10), 2.0, RngStream(8))
        ref = sample_gaussian_vector(RngStream(8), GaussParams(mu=0.0, sigma=2.0, dim=10))
        assert np.array_equal(y, ref)
