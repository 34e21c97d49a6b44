"""Quantum states, POVMs and classical-quantum ensembles, with guessing
probability and conditional min-entropy computed as semidefinite programs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NumericalFailure, ValidationError
from .linalg import as_matrix, dag, hermitian_basis, hermiticity_error, kron, min_eigenvalue, trace_norm
from .sdp import SemidefiniteProgram, solve_sdp

STATE_TOL = 1e-9
PROB_TOL = 1e-12
DUALITY_TOL = 1e-6


def _frozen(A):
    A = np.array(A, dtype=complex)
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class DensityOperator:
    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho)
        if rho.shape[0] != rho.shape[1]:
            raise ValidationError(f"density operator must be square, got {rho.shape}")
        if hermiticity_error(rho) > 1e-10:
            raise ValidationError("density operator is not Hermitian")
        if abs(np.trace(rho).real - 1) > 1e-10:
            raise ValidationError(f"density operator has trace {float(np.trace(rho).real):.15g}")
        lam = min_eigenvalue(rho)
        if lam < -STATE_TOL:
            raise ValidationError(f"density operator has eigenvalue {lam:.3e}")
        object.__setattr__(self, "rho", _frozen((rho + dag(rho)) / 2))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def pure(cls, ket) -> "DensityOperator":
        v = np.asarray(ket, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple
    tol: float = STATE_TOL

    def __post_init__(self):
        els = [as_matrix(E) for E in self.elements]
        if not els:
            raise ValidationError("POVM needs at least one element")
        d = els[0].shape[0]
        for k, E in enumerate(els):
            if E.shape != (d, d):
                raise ValidationError(f"POVM element {k} has shape {E.shape}, expected {(d, d)}")
            if hermiticity_error(E) > self.tol:
                raise ValidationError(f"POVM element {k} is not Hermitian")
            lam = min_eigenvalue(E)
            if lam < -self.tol:
                raise ValidationError(f"POVM element {k} has eigenvalue {lam:.3e}")
        dev = float(np.max(np.abs(sum(els) - np.eye(d))))
        if dev > self.tol:
            raise ValidationError(f"POVM elements sum to identity only within {dev:.3e}")
        object.__setattr__(self, "elements", tuple(_frozen((E + dag(E)) / 2) for E in els))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @classmethod
    def computational(cls, d: int) -> "Povm":
        return cls([np.diag(np.eye(d)[i]).astype(complex) for i in range(d)])


@dataclass(frozen=True, eq=False)
class CqState:
    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if np.any(p < -PROB_TOL) or abs(p.sum() - 1) > PROB_TOL:
            raise ValidationError("cq-state probabilities must form a distribution")
        states = tuple(s if isinstance(s, DensityOperator) else DensityOperator(s) for s in self.states)
        if len(states) != p.size:
            raise ValidationError(f"{p.size} probabilities but {len(states)} states")
        if len({s.dim for s in states}) != 1:
            raise ValidationError("conditional states have different dimensions")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self):
        return len(self.states)

    def matrix(self) -> np.ndarray:
        """``sum_x p(x) |x><x| (x) rho^x`` with the classical register first."""
        n = len(self)
        out = np.zeros((n * self.dim, n * self.dim), dtype=complex)
        for x, (px, s) in enumerate(zip(self.probs, self.states)):
            proj = np.zeros((n, n))
            proj[x, x] = 1.0
            out += px * kron(proj, s.rho)
        return out


class GuessResult(NamedTuple):
    value: float
    povm: Povm


def _normalize_povm(els):
    S = sum(els)
    w, V = np.linalg.eigh((S + dag(S)) / 2)
    Sih = (V / np.sqrt(w)) @ dag(V)
    return [Sih @ E @ Sih for E in els]


def _guess_sdp(s: CqState):
    d = s.dim
    C = [-px * st.rho for px, st in zip(s.probs, s.states)]
    basis = hermitian_basis(d)
    A = [[E] * len(s) for E in basis]
    b = [np.trace(E).real for E in basis]
    sol = solve_sdp(SemidefiniteProgram(C, A, b))
    K = -sum(yk * E for yk, E in zip(sol.y, basis))
    return sol, K


def pguess_cq(s: CqState) -> GuessResult:
    """Optimal guessing probability of the classical label and a POVM
    attaining it."""
    sol, K = _guess_sdp(s)
    primal, dual = -sol.value, -sol.dual_value
    if abs(primal - dual) > DUALITY_TOL:
        raise NumericalFailure(f"guessing SDP duality gap {abs(primal - dual):.2e}")
    els = _normalize_povm(sol.X)
    povm = Povm(els)
    value = float(sum(px * np.trace(st.rho @ E).real for px, st, E in zip(s.probs, s.states, povm)))
    return GuessResult(value, povm)


def pguess_bounds(s: CqState) -> tuple[float, float]:
    """Certified bracket ``(lower, upper)`` on the guessing probability.

    The lower end is attained by a valid POVM; the upper end is ``Tr K`` for
    an operator ``K`` shifted until ``K >= p(x) rho^x`` holds for every ``x``.
    """
    lower, _ = pguess_cq(s)
    _, K = _guess_sdp(s)
    K = (K + dag(K)) / 2
    shift = max(0.0, max(-min_eigenvalue(K - px * st.rho) for px, st in zip(s.probs, s.states)))
    upper = float(np.trace(K).real + shift * s.dim)
    return lower, upper


def hmin_sdp(rho_rq, d_r: int, d_q: int):
    """Return ``(value, sigma)`` with ``value = min Tr[sigma]`` subject to
    ``1_R (x) sigma >= rho_RQ``; ``value`` equals ``2**(-H_min(R|Q))``."""
    rho = as_matrix(rho_rq)
    if rho.shape != (d_r * d_q, d_r * d_q):
        raise DimensionMismatch(f"state of shape {rho.shape} is not on a {d_r}x{d_q} space")
    DensityOperator(rho)
    basis = hermitian_basis(d_q)
    A = [[kron(np.eye(d_r), E)] for E in basis]
    b = [np.trace(E).real for E in basis]
    sol = solve_sdp(SemidefiniteProgram([-rho], A, b))
    primal, dual = -sol.value, -sol.dual_value
    if abs(primal - dual) > DUALITY_TOL:
        raise NumericalFailure(f"min-entropy SDP duality gap {abs(primal - dual):.2e}")
    sigma = -sum(yk * E for yk, E in zip(sol.y, basis))
    return primal, (sigma + dag(sigma)) / 2


def hmin_cond(rho_rq, d_r: int, d_q: int) -> float:
    """Conditional min-entropy ``H_min(R|Q)`` in bits."""
    value, _ = hmin_sdp(rho_rq, d_r, d_q)
    return float(-np.log2(value))


def helstrom_binary(p0: float, rho0, rho1) -> float:
    r0 = rho0.rho if isinstance(rho0, DensityOperator) else as_matrix(rho0)
    r1 = rho1.rho if isinstance(rho1, DensityOperator) else as_matrix(rho1)
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("prior must lie in [0, 1]")
    return 0.5 * (1.0 + trace_norm(p0 * r0 - (1 - p0) * r1))


def cq_from_states(probs: Sequence[float], states: Sequence) -> CqState:
    return CqState(np.asarray(probs, dtype=float), tuple(states))
