import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from channel_order.errors import Infeasible
from channel_order.sampling import random_hermitian
from channel_order.sdp import SemidefiniteProgram, embed, solve_sdp, unembed


def positive_part_sdp(A):
    """min Tr X s.t. X >= A, posed through its dual
    max Tr[A Y] s.t. 0 <= Y <= 1 with slack block W = 1 - Y."""
    n = A.shape[0]
    cons, b = [], []
    for i in range(n):
        for j in range(i, n):
            for part in ((1, 1j) if i != j else (1,)):
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = part
                E[j, i] = np.conj(part)
                cons.append([E, E])
                b.append(2.0 if i == j else 0.0)
    b = [v / 2 for v in b]
    return SemidefiniteProgram([-A, np.zeros((n, n))], cons, b)


def check_solution(sdp, sol, tol=1e-7):
    for X in sol.X:
        assert np.linalg.eigvalsh(X)[0] >= -tol
    for cons, bi in zip(sdp.A, sdp.b):
        lhs = sum(np.trace(a @ X).real for a, X in zip(cons, sol.X))
        assert abs(lhs - bi) <= tol


class TestKnownOptima:
    def test_positive_part(self):
        A = np.diag([2.0, -1.0]).astype(complex)
        sdp = positive_part_sdp(A)
        sol = solve_sdp(sdp)
        check_solution(sdp, sol)
        assert -sol.value == pytest.approx(2.0, abs=1e-6)

    def test_positive_part_random(self, rng):
        A = random_hermitian(3, rng)
        oracle = np.sum(np.clip(np.linalg.eigvalsh(A), 0, None))
        sol = solve_sdp(positive_part_sdp(A))
        assert -sol.value == pytest.approx(oracle, abs=1e-6)

    def test_unit_trace(self):
        sol = solve_sdp(SemidefiniteProgram([np.eye(2)], [[np.eye(2)]], [1.0]))
        assert sol.value == pytest.approx(1.0, abs=1e-8)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_min_eigenvalue(self, n, seed):
        C = random_hermitian(n, np.random.default_rng(seed))
        sdp = SemidefiniteProgram([C], [[np.eye(n)]], [1.0])
        sol = solve_sdp(sdp)
        check_solution(sdp, sol)
        assert sol.value == pytest.approx(np.linalg.eigvalsh(C)[0], abs=1e-6)
        # weak duality bracket from an explicit dual point
        assert sol.dual_value <= sol.value + 1e-8
        assert np.linalg.eigvalsh(C - sol.y[0] * np.eye(n))[0] >= -1e-7


class TestInfeasibility:
    def test_negative_trace(self):
        with pytest.raises(Infeasible):
            solve_sdp(SemidefiniteProgram([np.eye(2)], [[np.eye(2)]], [-1.0]))

    def test_inconsistent_equalities(self):
        with pytest.raises(Infeasible):
            solve_sdp(SemidefiniteProgram([np.eye(2)], [[np.eye(2)], [np.eye(2)]], [1.0, 2.0]))

    def test_redundant_equalities_are_fine(self):
        sol = solve_sdp(SemidefiniteProgram([np.eye(2)], [[np.eye(2)], [2 * np.eye(2)]], [1.0, 2.0]))
        assert sol.value == pytest.approx(1.0, abs=1e-8)


def test_embedding_round_trip(rng):
    Z = random_hermitian(3, rng)
    W = embed(Z)
    assert np.allclose(W, W.T)
    assert np.allclose(unembed(W), Z)
    assert np.allclose(np.sort(np.linalg.eigvalsh(W)), np.sort(np.repeat(np.linalg.eigvalsh(Z), 2)))


def test_deterministic(rng):
    sdp = positive_part_sdp(random_hermitian(3, rng))
    a, b = solve_sdp(sdp), solve_sdp(sdp)
    assert a.value == b.value
    assert all(np.array_equal(x, y) for x, y in zip(a.X, b.X))
