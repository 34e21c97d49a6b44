"""Linear maps on operators, stored as Choi matrices.

Convention (fixed project-wide): the Choi matrix of ``L: L(H_in) -> L(H_out)``
is ``sum_ij |i><j| (x) L(|i><j|)`` with the input factor first, so ``L`` is
trace preserving iff the partial trace over the output is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .linalg import as_matrix, hermiticity_error, matrix_units, min_eigenvalue, partial_trace
from .sampling import random_density

FLAG_TOL = 1e-9
RANGE_SAMPLES = 200


@dataclass(frozen=True, eq=False)
class OperatorMap:
    dim_in: int
    dim_out: int
    choi: np.ndarray
    hermitian_preserving: bool = field(init=False)
    trace_preserving: bool = field(init=False)
    completely_positive: bool = field(init=False)

    def __post_init__(self):
        C = as_matrix(self.choi)
        n = self.dim_in * self.dim_out
        if C.shape != (n, n):
            raise DimensionMismatch(f"Choi matrix shape {C.shape} does not match {self.dim_in}->{self.dim_out}")
        C = C.copy()
        C.setflags(write=False)
        object.__setattr__(self, "choi", C)
        herm = hermiticity_error(C) <= FLAG_TOL
        tp_dev = np.max(np.abs(partial_trace(C, (self.dim_in, self.dim_out), 1) - np.eye(self.dim_in)))
        object.__setattr__(self, "hermitian_preserving", bool(herm))
        object.__setattr__(self, "trace_preserving", bool(tp_dev <= FLAG_TOL))
        object.__setattr__(self, "completely_positive", bool(herm and min_eigenvalue(C) >= -FLAG_TOL))

    @property
    def is_channel(self) -> bool:
        return self.trace_preserving and self.completely_positive

    @property
    def positive(self) -> bool | None:
        """True when certified by complete positivity, otherwise unknown."""
        return True if self.completely_positive else None

    def __call__(self, X) -> np.ndarray:
        return apply_map(self, X)

    # constructors -----------------------------------------------------------

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int) -> "OperatorMap":
        C = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=complex)
        for i in range(dim_in):
            for j in range(dim_in):
                E = np.zeros((dim_in, dim_in), dtype=complex)
                E[i, j] = 1.0
                C[i * dim_out:(i + 1) * dim_out, j * dim_out:(j + 1) * dim_out] = f(E)
        return cls(dim_in, dim_out, C)

    @classmethod
    def from_kraus(cls, kraus: Sequence) -> "OperatorMap":
        ks = [as_matrix(K) for K in kraus]
        if not ks:
            raise ValidationError("need at least one Kraus operator")
        d_out, d_in = ks[0].shape
        if any(K.shape != (d_out, d_in) for K in ks):
            raise DimensionMismatch("Kraus operators have different shapes")
        # Choi = sum_k |K_k>><<K_k| with |K>> = sum_i |i> (x) K|i>
        C = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
        for K in ks:
            v = K.T.reshape(-1)
            C += np.outer(v, v.conj())
        return cls(d_in, d_out, C)

    @classmethod
    def identity(cls, d: int) -> "OperatorMap":
        return cls.from_kraus([np.eye(d)])

    @classmethod
    def depolarizing(cls, d: int, p: float) -> "OperatorMap":
        """``X -> p X + (1 - p) Tr[X] 1/d``."""
        return cls.from_function(lambda X: p * X + (1 - p) * np.trace(X) * np.eye(d) / d, d, d)

    @classmethod
    def completely_depolarizing(cls, d: int) -> "OperatorMap":
        return cls.depolarizing(d, 0.0)

    @classmethod
    def transpose(cls, d: int) -> "OperatorMap":
        return cls.from_function(lambda X: X.T, d, d)

    @classmethod
    def dephasing(cls, d: int) -> "OperatorMap":
        """Complete dephasing in the computational basis."""
        return cls.from_function(lambda X: np.diag(np.diag(X)), d, d)

    @classmethod
    def from_stochastic(cls, p) -> "OperatorMap":
        """Classical channel ``p[x, y]`` as a measure-and-prepare channel with
        diagonal output."""
        P = np.asarray(getattr(p, "p", p), dtype=float)
        nx, ny = P.shape
        C = np.zeros((nx * ny, nx * ny), dtype=complex)
        for x in range(nx):
            for y in range(ny):
                C[x * ny + y, x * ny + y] = P[x, y]
        return cls(nx, ny, C)


def apply_map(L: OperatorMap, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape != (L.dim_in, L.dim_in):
        raise DimensionMismatch(f"operator of shape {X.shape} does not fit input dimension {L.dim_in}")
    T = L.choi.reshape(L.dim_in, L.dim_out, L.dim_in, L.dim_out)
    return np.einsum("ij,iajb->ab", X, T)


def compose_maps(L2: OperatorMap, L1: OperatorMap) -> OperatorMap:
    """``L2 o L1``."""
    if L1.dim_out != L2.dim_in:
        raise DimensionMismatch(f"cannot compose {L1.dim_in}->{L1.dim_out} with {L2.dim_in}->{L2.dim_out}")
    return OperatorMap.from_function(lambda X: apply_map(L2, apply_map(L1, X)), L1.dim_in, L2.dim_out)


def trace_dual(L: OperatorMap) -> OperatorMap:
    """The map ``L*`` with ``Tr[L*(X) Y] = Tr[X L(Y)]``."""
    # L*(Y) = sum_ij |j><i| Tr[Y L(|i><j|)]
    T = L.choi.reshape(L.dim_in, L.dim_out, L.dim_in, L.dim_out)

    def dual(Y):
        M = np.einsum("ab,ibja->ij", Y, T)
        return M.T

    return OperatorMap.from_function(dual, L.dim_out, L.dim_in)


def tensor_identity(L: OperatorMap, d: int) -> OperatorMap:
    """``id_d (x) L`` with the identity factor first."""
    def f(X):
        B = X.reshape(d, L.dim_in, d, L.dim_in)
        out = np.zeros((d, L.dim_out, d, L.dim_out), dtype=complex)
        for a in range(d):
            for b in range(d):
                out[a, :, b, :] = apply_map(L, B[a, :, b, :])
        return out.reshape(d * L.dim_out, d * L.dim_out)

    return OperatorMap.from_function(f, d * L.dim_in, d * L.dim_out)


def choi_distance(L1: OperatorMap, L2: OperatorMap) -> float:
    if (L1.dim_in, L1.dim_out) != (L2.dim_in, L2.dim_out):
        raise DimensionMismatch("maps have different dimensions")
    return float(np.max(np.abs(L1.choi - L2.choi)))


def basis_deviation(L1: OperatorMap, L2: OperatorMap) -> float:
    """Largest entry of ``L1(E) - L2(E)`` over matrix units ``E``."""
    if (L1.dim_in, L1.dim_out) != (L2.dim_in, L2.dim_out):
        raise DimensionMismatch("maps have different dimensions")
    return max(float(np.max(np.abs(apply_map(L1, E) - apply_map(L2, E)))) for E in matrix_units(L1.dim_in))


@dataclass(frozen=True)
class MapFlags:
    hermitian_preserving: bool
    trace_preserving: bool
    completely_positive: bool
    ptp_on_range_of_N: bool | None


def ptp_on_range(L: OperatorMap, N: OperatorMap, samples: int = RANGE_SAMPLES, seed: int = 0,
                 tol: float = FLAG_TOL) -> bool:
    """Probabilistic check that ``L`` is positive and trace preserving on the
    range of ``N``: trace preservation of ``L o N`` on a basis, and
    positivity of ``(L o N)(rho)`` on ``samples`` random states."""
    if N.dim_out != L.dim_in:
        raise DimensionMismatch(f"N outputs dimension {N.dim_out} but L expects {L.dim_in}")
    LN = compose_maps(L, N)
    for E in matrix_units(N.dim_in):
        if abs(np.trace(apply_map(LN, E)) - np.trace(apply_map(N, E))) > tol:
            return False
    rng = np.random.default_rng(seed)
    for k in range(samples):
        rank = 1 if k % 2 == 0 else None
        out = apply_map(LN, random_density(N.dim_in, rng, rank=rank))
        if hermiticity_error(out) > tol or min_eigenvalue(out) < -tol:
            return False
    return True


def classify_map(L: OperatorMap, N: OperatorMap | None = None, samples: int = RANGE_SAMPLES,
                 seed: int = 0) -> MapFlags:
    rng_flag = None if N is None else ptp_on_range(L, N, samples, seed)
    return MapFlags(L.hermitian_preserving, L.trace_preserving, L.completely_positive, rng_flag)


def unit_preserving(L: OperatorMap, tol: float = FLAG_TOL) -> bool:
    return bool(np.max(np.abs(apply_map(L, np.eye(L.dim_in)) - np.eye(L.dim_out))) <= tol)

