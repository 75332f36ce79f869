import math

import numpy as np
import pytest

from hybridode.hybrid import (
    HybridStepper,
    hybrid_rollout,
    hybrid_step,
    make_hybrid,
    make_residual_dataset,
)
from hybridode.linalg import expm
from hybridode.neuralnet import FeedForwardNet, init_weights
from hybridode.problems import analytic_decay, analytic_decay_forced
from hybridode.solvers import StepConfig, integrate
from hybridode.training import SgdConfig, train_sgd


def zero_net(dims):
    weights = [np.zeros((dims[l + 1], dims[l] + 1)) for l in range(len(dims) - 1)]
    return FeedForwardNet(tuple(dims), weights)


class TestHybridStep:
    def test_zero_net_is_pure_exponential_step(self, decay_problem):
        h = make_hybrid(decay_problem, zero_net((2, 4, 1)), 0.1)
        out = hybrid_step(h, np.array([1.0]), 0.0, np.array([0.5]))
        assert out[0] == pytest.approx(math.exp(-0.01), rel=1e-12)

    def test_zero_linear_part_is_learned_euler(self):
        net = FeedForwardNet((1, 1), [np.array([[0.0, 3.0]])])  # constant output 3
        h = HybridStepper(propagator=np.eye(1), correction_net=net, dt=0.1)
        out = hybrid_step(h, np.array([2.0]), 0.0, np.empty(0))
        assert out[0] == pytest.approx(2.0 + 0.1 * 3.0, rel=1e-14)

    def test_affine_in_network_output(self, decay_problem):
        # doubling the (constant-output) net doubles the correction
        def const_net(c):
            return FeedForwardNet((2, 1), [np.array([[0.0, 0.0, c]])])

        y, u = np.array([1.0]), np.array([0.2])
        h0 = make_hybrid(decay_problem, const_net(0.0), 0.1)
        h1 = make_hybrid(decay_problem, const_net(1.0), 0.1)
        h2 = make_hybrid(decay_problem, const_net(2.0), 0.1)
        base = hybrid_step(h0, y, 0.0, u)
        d1 = hybrid_step(h1, y, 0.0, u) - base
        d2 = hybrid_step(h2, y, 0.0, u) - base
        np.testing.assert_allclose(d2, 2.0 * d1, rtol=1e-12)


class TestResidualDataset:
    def test_roundtrip_recovers_forcing(self, decay_problem):
        ref = integrate(decay_problem, StepConfig(dt=0.05, method="exp_split"))
        ds = make_residual_dataset(decay_problem, ref)
        truth = np.array(
            [[math.sin(2 * math.pi * t)] for t in ref.times[:-1]]
        )
        assert np.max(np.abs(ds.targets - truth)) <= 1e-9

    def test_zero_forcing_gives_zero_targets(self, decay_problem):
        import dataclasses

        p = dataclasses.replace(decay_problem, nonlinear=None, input=None)
        ref = integrate(p, StepConfig(dt=0.05, method="exp_split"))
        ds = make_residual_dataset(p, ref)
        assert np.max(np.abs(ds.targets)) <= 1e-9

    def test_size(self, decay_problem):
        ref = integrate(decay_problem, StepConfig(dt=0.05, method="exp_split"))
        assert len(make_residual_dataset(decay_problem, ref)) == len(ref) - 1


class TestHybridRollout:
    def test_zero_net_matches_linear_flow(self, decay_problem):
        h = make_hybrid(decay_problem, zero_net((2, 4, 1)), 0.05)
        traj = hybrid_rollout(h, decay_problem.y0, decay_problem.input, 1.0)
        for t, y in zip(traj.times, traj.states):
            assert abs(y[0] - analytic_decay(-0.1, 1.0, float(t))) <= 1e-9

    def test_single_step(self, decay_problem):
        h = make_hybrid(decay_problem, zero_net((2, 4, 1)), 1.0)
        traj = hybrid_rollout(h, decay_problem.y0, decay_problem.input, 1.0)
        assert len(traj) == 2
        step = hybrid_step(h, decay_problem.y0, 0.0, decay_problem.input_at(0.0))
        np.testing.assert_array_equal(traj.states[1], step)

    def test_trained_correction_beats_zero_net(self, decay_problem):
        ref = integrate(decay_problem, StepConfig(dt=0.05, method="exp_split"))
        ds = make_residual_dataset(decay_problem, ref)
        net, _ = train_sgd(ds, init_weights((2, 10, 1), 7), SgdConfig(0.1, 300, 7))

        trained = hybrid_rollout(make_hybrid(decay_problem, net, 0.05),
                                 decay_problem.y0, decay_problem.input, 1.0)
        plain = hybrid_rollout(make_hybrid(decay_problem, zero_net((2, 4, 1)), 0.05),
                               decay_problem.y0, decay_problem.input, 1.0)
        target = analytic_decay_forced(1.0)
        err_trained = abs(trained.states[-1, 0] - target)
        err_plain = abs(plain.states[-1, 0] - target)
        assert err_trained < err_plain

    def test_one_step_matches_exp_split_within_training_error(self, decay_problem):
        ref = integrate(decay_problem, StepConfig(dt=0.05, method="exp_split"))
        ds = make_residual_dataset(decay_problem, ref)
        net, hist = train_sgd(ds, init_weights((2, 10, 1), 7), SgdConfig(0.1, 300, 7))
        h = make_hybrid(decay_problem, net, 0.05)
        got = hybrid_step(h, decay_problem.y0, 0.0, decay_problem.input_at(0.0))
        # one-step deviation is bounded by the trained residual error
        assert abs(got[0] - ref.states[1, 0]) <= 0.05 * (math.sqrt(hist[-1]) + 1e-6)
