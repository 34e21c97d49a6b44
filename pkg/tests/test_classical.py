from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from channel_order.classical import (JointPrior, StochasticChannel, approx_bound_check, compose, cond_min_entropy,
                                     cond_shannon_entropy, degradation_gap, extract_witness_prior, find_degrader,
                                     guessing_probability, shannon_less_noisy_falsify, variational_distance)
from channel_order.errors import DimensionMismatch, NotDegradable, ValidationError
from channel_order.sampling import random_stochastic

BEC = StochasticChannel.bec(0.4)
BSC = StochasticChannel.bsc(0.2)
UNIFORM = StochasticChannel.uniform(2, 2)
ID2 = StochasticChannel.identity(2)
ERASURE_TO_COIN = StochasticChannel(np.array([[1, 0], [0, 1], [0.5, 0.5]]))


def grid_gap(p, p2, steps=401):
    """Brute-force degradation gap for binary-output degraders d(z|y)."""
    assert p2.n_outputs == 2
    a = np.linspace(0, 1, steps)
    grids = np.meshgrid(*([a] * p.n_outputs), indexing="ij")
    D0 = np.stack([g.ravel() for g in grids], axis=1)  # d(0|y) per grid point
    pd0 = D0 @ p.p.T  # (points, x)
    delta = np.stack([p2.p[:, 0] - pd0, p2.p[:, 1] - (1 - pd0)], axis=2)
    return float(delta.reshape(len(D0), -1).max(axis=1).min())


def brute_guess(q, p):
    """Best deterministic guessing map u = g(y), enumerated."""
    best = 0.0
    for g in product(range(q.n_u), repeat=p.n_outputs):
        best = max(best, sum(q.q[g[y], x] * p.p[x, y] for x in range(q.n_x) for y in range(p.n_outputs)))
    return best


class TestStochasticChannel:
    def test_row_sum_error_names_row(self):
        with pytest.raises(ValidationError, match="row 1"):
            StochasticChannel(np.array([[0.5, 0.5], [0.6, 0.3]]))

    def test_negative_entry(self):
        with pytest.raises(ValidationError):
            StochasticChannel(np.array([[1.2, -0.2]]))

    def test_zero_columns_and_duplicate_rows_allowed(self):
        ch = StochasticChannel(np.array([[1.0, 0.0], [1.0, 0.0]]))
        assert ch.n_outputs == 2

    def test_prior_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            JointPrior(np.array([[0.5, 0.4]]))


class TestCompose:
    def test_identity(self):
        assert np.allclose(compose(StochasticChannel.identity(3), BEC).p, BEC.p)

    def test_absorbing(self):
        assert np.allclose(compose(StochasticChannel.uniform(3, 4), BEC).p, 0.25)

    def test_erasure_to_coin(self):
        assert np.allclose(compose(ERASURE_TO_COIN, BEC).p, BSC.p, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compose(BSC, BEC)


class TestGuessing:
    def test_identity(self):
        assert guessing_probability(JointPrior.uniform_identity(2), ID2) == pytest.approx(1.0)

    def test_bsc(self):
        assert guessing_probability(JointPrior.uniform_identity(2), StochasticChannel.bsc(0.1)) == pytest.approx(0.9)

    def test_bec_by_enumeration(self):
        q = JointPrior.uniform_identity(2)
        assert guessing_probability(q, BEC) == pytest.approx(0.8)
        assert brute_guess(q, BEC) == pytest.approx(0.8)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        p = StochasticChannel(random_stochastic(3, 3, rng))
        q = JointPrior(rng.dirichlet(np.ones(6)).reshape(2, 3))
        assert guessing_probability(q, p) == pytest.approx(brute_guess(q, p), abs=1e-12)

    def test_min_entropy(self):
        q = JointPrior.uniform_identity(2)
        assert cond_min_entropy(q, ID2) == pytest.approx(0.0, abs=1e-12)
        assert cond_min_entropy(q, StochasticChannel.bsc(0.1)) == pytest.approx(-np.log2(0.9))
        indep = JointPrior(np.full((4, 2), 1 / 8))
        assert cond_min_entropy(indep, BEC) == pytest.approx(2.0)

    def test_shannon_entropy(self):
        q = JointPrior.uniform_identity(2)
        assert cond_shannon_entropy(q, ID2) == pytest.approx(0.0, abs=1e-12)
        assert cond_shannon_entropy(q, UNIFORM) == pytest.approx(1.0)
        h = -(0.1 * np.log2(0.1) + 0.9 * np.log2(0.9))
        assert cond_shannon_entropy(q, StochasticChannel.bsc(0.1)) == pytest.approx(h)
        assert h == pytest.approx(0.469, abs=1e-3)


class TestDegradationGap:
    def test_degradable_by_construction(self, rng):
        p = StochasticChannel(random_stochastic(4, 3, rng))
        q = StochasticChannel(random_stochastic(3, 5, rng))
        assert degradation_gap(p, compose(q, p)).gap <= 1e-9

    def test_uniform_against_identity(self):
        cert = degradation_gap(UNIFORM, ID2)
        assert cert.gap == pytest.approx(0.5, abs=1e-9)
        assert grid_gap(UNIFORM, ID2) == pytest.approx(0.5, abs=1e-9)

    def test_bec_bsc_both_directions(self):
        assert degradation_gap(BEC, BSC).gap <= 1e-9
        assert degradation_gap(BSC, BEC).gap > 1e-3

    @pytest.mark.parametrize("seed", range(6))
    def test_against_grid(self, seed):
        rng = np.random.default_rng(seed)
        p = StochasticChannel(random_stochastic(3, 2, rng))
        p2 = StochasticChannel(random_stochastic(3, 2, rng))
        lp_gap = degradation_gap(p, p2).gap
        # the grid optimum can only overshoot, by at most its resolution
        assert grid_gap(p, p2) >= lp_gap - 1e-9
        assert grid_gap(p, p2) <= lp_gap + 2.5e-3

    def test_certificate_invariants(self, rng):
        p = StochasticChannel(random_stochastic(4, 3, rng))
        p2 = StochasticChannel(random_stochastic(4, 4, rng))
        cert = degradation_gap(p, p2)
        assert np.allclose(cert.residual, p2.p - p.p @ cert.degrader.p)
        assert cert.residual.max() <= cert.gap + 1e-9
        assert np.max(np.abs(cert.residual.sum(axis=1))) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            degradation_gap(BEC, StochasticChannel.identity(3))


class TestFindDegrader:
    def test_identity_source(self):
        d = find_degrader(ID2, BSC)
        assert np.allclose(d.p, BSC.p, atol=1e-9)

    def test_bec_to_bsc(self):
        d = find_degrader(BEC, BSC)
        assert np.max(np.abs(compose(d, BEC).p - BSC.p)) <= 1e-9

    def test_bsc_to_bec_refused(self):
        with pytest.raises(NotDegradable) as info:
            find_degrader(BSC, BEC)
        assert info.value.certificate.gap > 0


class TestWitness:
    def test_self(self):
        assert extract_witness_prior(BEC, BEC).advantage <= 1e-9

    def test_uniform_against_identity(self):
        w = extract_witness_prior(UNIFORM, ID2)
        assert w.advantage == pytest.approx(0.5, abs=1e-9)
        # the optimal prior concentrates on z' = x
        assert np.allclose(w.prior.q, np.eye(2) / 2, atol=1e-9)

    def test_grid_search_confirms_optimum(self):
        best = 0.0
        steps = np.linspace(0, 1, 21)
        for a, b, c in product(steps, repeat=3):
            if a + b + c > 1 + 1e-12:
                continue
            q = JointPrior(np.array([[a, b], [c, max(0.0, 1 - a - b - c)]]))
            best = max(best, float(np.sum(q.q * ID2.p.T)) - guessing_probability(q, UNIFORM))
        assert best == pytest.approx(extract_witness_prior(UNIFORM, ID2).advantage, abs=1e-9)

    def test_strong_duality(self):
        w = extract_witness_prior(BSC, BEC)
        gap = degradation_gap(BSC, BEC).gap
        assert w.advantage == pytest.approx(gap, abs=1e-7)
        assert w.lp_value == pytest.approx(gap, abs=1e-8)


class TestVariationalDistance:
    def test_identical(self):
        assert variational_distance(BEC, BEC) == 0.0

    def test_single_row_shift(self):
        eps = 0.05
        q = StochasticChannel(np.array([[0.8 + eps, 0.2 - eps], [0.2, 0.8]]))
        assert variational_distance(BSC, q) == pytest.approx(2 * eps)

    def test_identity_against_uniform(self):
        assert variational_distance(ID2, UNIFORM) == pytest.approx(1.0)


class TestApproxBound:
    def test_degradable(self):
        r = approx_bound_check(BEC, BSC)
        assert r.variational <= 1e-8 and r.holds_proved and r.holds_inputs

    def test_bsc_bec(self):
        r = approx_bound_check(BSC, BEC)
        assert r.variational <= 2 * 3 * r.gap + 1e-8
        assert r.bound_proved == pytest.approx(6 * r.gap)
        assert r.bound_inputs == pytest.approx(4 * r.gap)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_row_bound_property(self, seed):
        rng = np.random.default_rng(seed)
        p = StochasticChannel(random_stochastic(4, 3, rng))
        p2 = StochasticChannel(random_stochastic(4, 3, rng))
        assert approx_bound_check(p, p2).holds_proved


class TestShannonFalsifier:
    def test_identity_never_refuted(self):
        assert shannon_less_noisy_falsify(ID2, BSC, trials=1000) is None

    def test_uniform_against_identity(self):
        found = shannon_less_noisy_falsify(UNIFORM, ID2, trials=50)
        assert found is not None
        assert found.h_y > found.h_z + 1e-9

    @pytest.mark.parametrize("seed", range(3))
    def test_degradable_pairs(self, seed):
        rng = np.random.default_rng(seed)
        p = StochasticChannel(random_stochastic(3, 3, rng))
        q = StochasticChannel(random_stochastic(3, 3, rng))
        assert shannon_less_noisy_falsify(p, compose(q, p), trials=100, seed=seed) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_data_processing(seed):
    rng = np.random.default_rng(seed)
    p = StochasticChannel(random_stochastic(3, 3, rng))
    p2 = compose(StochasticChannel(random_stochastic(3, 4, rng)), p)
    for _ in range(30):
        q = JointPrior(rng.dirichlet(np.ones(6)).reshape(2, 3))
        assert guessing_probability(q, p) >= guessing_probability(q, p2) - 1e-9
