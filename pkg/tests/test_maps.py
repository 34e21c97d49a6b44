import numpy as np
import pytest

from channel_order.errors import DimensionMismatch
from channel_order.maps import (OperatorMap, apply_map, basis_deviation, choi_distance, classify_map,
                                compose_maps, ptp_on_range, tensor_identity, trace_dual, unit_preserving)
from channel_order.linalg import matrix_units
from channel_order.sampling import random_hermitian, random_kraus


def kraus_action(ks, X):
    return sum(K @ X @ K.conj().T for K in ks)


class TestApplyMap:
    def test_identity(self, rng):
        X = random_hermitian(3, rng)
        assert np.allclose(apply_map(OperatorMap.identity(3), X), X)

    def test_completely_depolarizing(self, rng):
        X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.allclose(apply_map(OperatorMap.completely_depolarizing(2), X), np.trace(X) * np.eye(2) / 2)

    def test_kraus_oracle(self, rng):
        ks = random_kraus(2, 3, rng)
        L = OperatorMap.from_kraus(ks)
        X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.allclose(apply_map(L, X), kraus_action(ks, X), atol=1e-12)
        assert L.is_channel

    def test_wrong_size(self):
        with pytest.raises(DimensionMismatch):
            apply_map(OperatorMap.identity(2), np.eye(3))


class TestCompose:
    def test_identity_neutral(self, rng):
        L = OperatorMap.from_kraus(random_kraus(2, 2, rng))
        assert choi_distance(compose_maps(OperatorMap.identity(2), L), L) <= 1e-12

    @pytest.mark.parametrize("p,q", [(0.3, 0.5), (0.9, -0.2), (1.0, 0.0)])
    def test_depolarizing_parameters_multiply(self, p, q):
        L = compose_maps(OperatorMap.depolarizing(3, p), OperatorMap.depolarizing(3, q))
        assert basis_deviation(L, OperatorMap.depolarizing(3, p * q)) <= 1e-12

    def test_channels_closed(self, rng):
        A = OperatorMap.from_kraus(random_kraus(2, 3, rng))
        B = OperatorMap.from_kraus(random_kraus(3, 2, rng))
        assert compose_maps(B, A).is_channel

    def test_dimension_chain(self):
        with pytest.raises(DimensionMismatch):
            compose_maps(OperatorMap.identity(2), OperatorMap.identity(3))


class TestTraceDual:
    def test_identity(self):
        assert choi_distance(trace_dual(OperatorMap.identity(2)), OperatorMap.identity(2)) <= 1e-12

    def test_involution(self, rng):
        L = OperatorMap.from_kraus(random_kraus(2, 3, rng))
        assert choi_distance(trace_dual(trace_dual(L)), L) <= 1e-12

    def test_bilinear_identity(self, rng):
        L = OperatorMap.from_kraus(random_kraus(2, 3, rng))
        D = trace_dual(L)
        for X in matrix_units(3):
            for Y in matrix_units(2):
                assert np.trace(apply_map(D, X) @ Y) == pytest.approx(np.trace(X @ apply_map(L, Y)), abs=1e-12)

    def test_depolarizing_dual(self, rng):
        D = trace_dual(OperatorMap.depolarizing(2, 0.4))
        P = random_hermitian(2, rng)
        assert np.allclose(apply_map(D, P), 0.4 * P + 0.6 * np.trace(P) * np.eye(2) / 2)

    def test_dual_of_channel_is_unital(self, rng):
        assert unit_preserving(trace_dual(OperatorMap.from_kraus(random_kraus(3, 2, rng))))


class TestClassify:
    def test_transpose(self):
        T = OperatorMap.transpose(2)
        flags = classify_map(T)
        assert flags.hermitian_preserving and flags.trace_preserving and not flags.completely_positive
        # unnormalized Choi of the transpose is the swap operator
        assert np.linalg.eigvalsh(T.choi)[0] == pytest.approx(-1.0)

    def test_depolarizing(self):
        flags = classify_map(OperatorMap.depolarizing(2, 0.5), OperatorMap.identity(2))
        assert flags.hermitian_preserving and flags.trace_preserving and flags.completely_positive
        assert flags.ptp_on_range_of_N

    def test_transpose_on_constant_range(self):
        assert classify_map(OperatorMap.transpose(2), OperatorMap.completely_depolarizing(2)).ptp_on_range_of_N

    def test_non_positive_map_fails(self):
        # trace preserving but sends |0><0| to diag(1.5, -0.5)
        neg = OperatorMap.depolarizing(2, 2.0)
        assert neg.trace_preserving
        assert not ptp_on_range(neg, OperatorMap.identity(2))
        assert ptp_on_range(neg, OperatorMap.completely_depolarizing(2))

    @pytest.mark.parametrize("seed", range(5))
    def test_cptp_always_passes(self, seed):
        rng = np.random.default_rng(seed)
        L = OperatorMap.from_kraus(random_kraus(2, 2, rng))
        N = OperatorMap.from_kraus(random_kraus(2, 2, rng, n_kraus=2))
        assert ptp_on_range(L, N, samples=50)


def test_tensor_identity(rng):
    ks = random_kraus(2, 2, rng)
    big = tensor_identity(OperatorMap.from_kraus(ks), 3)
    ref = OperatorMap.from_kraus([np.kron(np.eye(3), K) for K in ks])
    assert choi_distance(big, ref) <= 1e-12


def test_choi_is_read_only():
    L = OperatorMap.identity(2)
    with pytest.raises(ValueError):
        L.choi[0, 0] = 5
