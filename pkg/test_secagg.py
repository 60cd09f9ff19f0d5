#!/usr/bin/env python3
"""
安全聚合模拟测试 / Secure Aggregation Simulation Tests
"""

import numpy as np
import pytest

from dp_forensics_toolkit.exceptions import (
    OutOfDomain,
    PayloadOutOfField,
    PreconditionViolation,
    ShapeMismatch,
)
from dp_forensics_toolkit.randomness import RngStream
from dp_forensics_toolkit.secagg import (
    GAUSS_RECONSTRUCT_TOL,
    FieldShareBundle,
    SecAggConfig,
    SecAggSimulator,
    aggregate,
    field_reconstruct,
    field_share,
    gauss_reconstruct,
    gauss_secret_share,
    prio_client_submit,
)

P = 2**31 - 1


class TestFieldSharing:
    def test_round_trip(self):
        payload = np.array([0, 1, 5, P - 1])
        bundle = field_share(payload, P, RngStream(0))
        assert np.array_equal(field_reconstruct(bundle), payload)
        assert bundle.dim == 4

    def test_payload_outside_field(self):
        with pytest.raises(PayloadOutOfField):
            field_share([P], P, RngStream(0))
        with pytest.raises(PayloadOutOfField):
            field_share([-1], P, RngStream(0))

    def test_shape_mismatch(self):
        bundle = FieldShareBundle(leader_share=np.zeros(2, dtype=np.int64),
                                  helper_share=np.zeros(3, dtype=np.int64), p=P)
        with pytest.raises(ShapeMismatch):
            field_reconstruct(bundle)

    def test_leader_share_alone_looks_uniform(self):
        shares = [int(field_share([1], 101, RngStream.derive(3, i)).leader_share[0]) for i in range(5000)]
        counts = np.bincount(shares, minlength=101)
        assert counts.min() > 15 and counts.max() < 85

    def test_prio_client_domain(self):
        config = SecAggConfig(mode="dp_disabled", d=2, n_clients=1)
        with pytest.raises(OutOfDomain):
            prio_client_submit(3, config, RngStream(0))


class TestGaussianSharing:
    def test_reconstruct_within_tolerance(self):
        y = np.linspace(-1.0, 1.0, 50)
        bundle = gauss_secret_share(y, 1.0, RngStream(5))
        assert np.allclose(gauss_reconstruct(bundle), y, rtol=0.0, atol=GAUSS_RECONSTRUCT_TOL)

    def test_zero_payload_share_is_negated_noise(self):
        bundle = gauss_secret_share(np.zeros(6), 1.0, RngStream(5))
        noise = -bundle.leader_share
        assert np.array_equal(noise.astype(np.float32).astype(np.float64), noise)

    def test_rejects_bad_sigma(self):
        with pytest.raises(PreconditionViolation):
            gauss_secret_share(np.zeros(2), 0.0, RngStream(0))


class TestConfig:
    def test_unknown_mode(self):
        with pytest.raises(PreconditionViolation):
            SecAggConfig(mode="nope")

    def test_prime_checks(self):
        with pytest.raises(PreconditionViolation):
            SecAggConfig(mode="dp_disabled", p=100)
        with pytest.raises(PreconditionViolation):
            SecAggConfig(mode="dp_disabled", p=7, n_clients=10)

    def test_inputs_length(self):
        with pytest.raises(PreconditionViolation):
            SecAggConfig(mode="dp_disabled", n_clients=3, inputs=[1, 2])


class TestSimulator:
    @pytest.mark.parametrize("d", [2, 16, 1000])
    def test_dp_disabled_exact_recovery(self, d):
        config = SecAggConfig(mode="dp_disabled", d=d, n_clients=10)
        result = SecAggSimulator(config, master_seed=1).run()
        assert all(c.exact for c in result["clients"])
        expected = np.bincount([(i % d) for i in range(10)], minlength=d)
        assert np.array_equal(result["combined"], expected)

    def test_plusplus_dp_disabled_exact_recovery(self):
        config = SecAggConfig(mode="plusplus_dp_disabled", d=50, n_clients=6)
        result = SecAggSimulator(config, master_seed=2).run()
        assert all(c.exact for c in result["clients"])

    def test_symohe_reconstructs_randomized_bits(self):
        config = SecAggConfig(mode="prio_symohe", epsilon=1.0, d=2, n_clients=40)
        result = SecAggSimulator(config, master_seed=3).run()
        clients = result["clients"]
        assert all(set(np.unique(c.reconstructed)) <= {0, 1} for c in clients)
        assert not all(c.exact for c in clients)

    def test_leader_view_differs_from_combined(self):
        config = SecAggConfig(mode="dp_disabled", d=4, n_clients=5)
        result = SecAggSimulator(config, master_seed=4).run()
        assert not np.array_equal(result["leader"], result["combined"])
        assert np.array_equal(np.mod(result["leader"] + result["helper"], P), result["combined"])

    def test_replay(self):
        config = SecAggConfig(mode="prio_plusplus", d=20, n_clients=4)
        a = SecAggSimulator(config, master_seed=9).run()
        b = SecAggSimulator(config, master_seed=9).run()
        assert np.array_equal(a["leader"], b["leader"])

    def test_constructor_takes_config_and_seed(self):
        config = SecAggConfig(mode="dp_disabled", d=4, n_clients=2)
        assert SecAggSimulator(config, 5).master_seed == 5
        with pytest.raises(TypeError):
            SecAggSimulator(config, master_seed=5, threads=2)

    def test_aggregate_rejects_mixed_shapes(self):
        b1 = field_share([1, 0], P, RngStream(0))
        b2 = field_share([1, 0, 0], P, RngStream(1))
        with pytest.raises(ShapeMismatch):
            aggregate([b1, b2])
        with pytest.raises(ShapeMismatch):
            aggregate([])
