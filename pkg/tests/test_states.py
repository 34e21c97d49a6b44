import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from channel_order.errors import ValidationError
from channel_order.sampling import random_density
from channel_order.states import (CqState, DensityOperator, Povm, cq_from_states, helstrom_binary, hmin_cond, hmin_sdp,
                                  pguess_bounds, pguess_cq)

KET0, KET1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


def proj(v):
    return np.outer(v, np.conj(v))


def trine():
    kets = [np.array([np.cos(t), np.sin(t)]) for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
    return CqState(np.full(3, 1 / 3), tuple(proj(k) for k in kets))


def square_root_measurement(s):
    rho = sum(p * st.rho for p, st in zip(s.probs, s.states))
    w, V = np.linalg.eigh(rho)
    inv = (V / np.sqrt(w)) @ V.conj().T
    els = [inv @ (p * st.rho) @ inv for p, st in zip(s.probs, s.states)]
    return sum(p * np.trace(st.rho @ E).real for p, st, E in zip(s.probs, s.states, els))


class TestTypes:
    def test_density_trace(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.eye(2))

    def test_density_negative(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([1.1, -0.1]))

    def test_povm_must_sum_to_identity(self):
        with pytest.raises(ValidationError):
            Povm([np.diag([1.0, 0.0]), np.diag([0.0, 0.9])])

    def test_cq_probabilities(self):
        with pytest.raises(ValidationError):
            CqState(np.array([0.5, 0.6]), (proj(KET0), proj(KET1)))

    def test_cq_matrix_layout(self):
        s = cq_from_states([0.25, 0.75], [proj(KET0), proj(PLUS)])
        M = s.matrix()
        assert np.allclose(M[:2, :2], 0.25 * proj(KET0))
        assert np.allclose(M[2:, 2:], 0.75 * proj(PLUS))


class TestPguess:
    def test_orthogonal(self):
        s = cq_from_states([0.5, 0.5], [proj(KET0), proj(KET1)])
        assert pguess_cq(s).value == pytest.approx(1.0, abs=1e-6)

    def test_zero_plus(self):
        assert pguess_cq(cq_from_states([0.5, 0.5], [proj(KET0), proj(PLUS)])).value == \
            pytest.approx((1 + 1 / np.sqrt(2)) / 2, abs=1e-6)

    def test_trine(self):
        s = trine()
        res = pguess_cq(s)
        assert square_root_measurement(s) == pytest.approx(2 / 3, abs=1e-12)
        assert res.value == pytest.approx(2 / 3, abs=1e-6)

    def test_returned_povm_attains_value(self, rng):
        s = CqState(rng.dirichlet(np.ones(3)), tuple(random_density(3, rng) for _ in range(3)))
        res = pguess_cq(s)
        attained = sum(p * np.trace(st.rho @ E).real for p, st, E in zip(s.probs, s.states, res.povm))
        assert attained == pytest.approx(res.value, abs=1e-6)
        assert res.value >= s.probs.max() - 1e-9

    def test_bounds_bracket(self, rng):
        s = CqState(rng.dirichlet(np.ones(4)), tuple(random_density(2, rng) for _ in range(4)))
        lower, upper = pguess_bounds(s)
        assert lower <= upper + 1e-9
        assert upper - lower <= 1e-6

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.05, 0.95), st.integers(0, 2**32 - 1))
    def test_helstrom_agreement(self, p0, seed):
        rng = np.random.default_rng(seed)
        r0, r1 = random_density(2, rng), random_density(2, rng, rank=1)
        s = cq_from_states([p0, 1 - p0], [r0, r1])
        assert pguess_cq(s).value == pytest.approx(helstrom_binary(p0, r0, r1), abs=1e-6)


class TestHelstrom:
    def test_orthogonal(self):
        assert helstrom_binary(0.5, proj(KET0), proj(KET1)) == pytest.approx(1.0)

    def test_identical_states(self, rng):
        rho = random_density(2, rng)
        assert helstrom_binary(0.3, rho, rho) == pytest.approx(0.7)

    def test_zero_plus(self):
        assert helstrom_binary(0.5, proj(KET0), proj(PLUS)) == pytest.approx(0.853553, abs=1e-6)

    def test_bad_prior(self):
        with pytest.raises(ValueError):
            helstrom_binary(1.5, proj(KET0), proj(KET1))


class TestHmin:
    def test_maximally_mixed_register(self, rng):
        sigma = random_density(3, rng)
        assert hmin_cond(np.kron(np.eye(2) / 2, sigma), 2, 3) == pytest.approx(1.0, abs=1e-6)

    def test_phi_plus(self):
        phi = np.eye(2).reshape(-1) / np.sqrt(2)
        assert hmin_cond(proj(phi), 2, 2) == pytest.approx(-1.0, abs=1e-6)

    def test_perfectly_distinguishable(self):
        s = cq_from_states([0.5, 0.5], [proj(KET0), proj(KET1)])
        assert hmin_cond(s.matrix(), 2, 2) == pytest.approx(0.0, abs=1e-6)

    def test_phi_plus_sigma_is_feasible(self):
        phi = np.eye(2).reshape(-1) / np.sqrt(2)
        value, sigma = hmin_sdp(proj(phi), 2, 2)
        assert np.linalg.eigvalsh(np.kron(np.eye(2), sigma) - proj(phi))[0] >= -1e-7
        assert np.trace(sigma).real == pytest.approx(value, abs=1e-9)
        assert np.allclose(sigma, np.eye(2), atol=1e-6)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
    def test_cq_identity(self, nx, dq, seed):
        rng = np.random.default_rng(seed)
        s = CqState(rng.dirichlet(np.ones(nx)), tuple(random_density(dq, rng) for _ in range(nx)))
        assert 2 ** -hmin_cond(s.matrix(), nx, dq) == pytest.approx(pguess_cq(s).value, abs=1e-6)
