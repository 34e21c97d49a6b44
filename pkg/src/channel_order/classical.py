"""Classical channels: composition, guessing probabilities, entropies and the
degradability decision with its LP certificates.

A channel is a row-stochastic matrix ``p[x, y] = p(y|x)``.  Deciding whether
``p`` degrades into ``p'`` is the linear program

    minimize t  over stochastic d(z|y)  s.t.  p'(z|x) - sum_y p(y|x) d(z|y) <= t

whose optimum (the degradation gap) is zero exactly for degradable pairs.
Its LP dual is a guessing game: a joint prior ``q(x, z')`` on which the
channel ``p'`` read out with the identity decoder beats the best decoder of
``p`` by the same amount.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotDegradable, NumericalFailure, ValidationError
from .lp import LinearProgram, LpStatus, solve_lp

ROW_TOL = 1e-12


def _clean_stochastic(M: np.ndarray) -> np.ndarray:
    M = np.clip(np.asarray(M, dtype=float), 0.0, None)
    return M / M.sum(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class StochasticChannel:
    """Row-stochastic matrix with rows indexed by inputs."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] == 0 or p.shape[1] == 0:
            raise ValidationError(f"channel matrix must be a nonempty 2-d array, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("channel matrix has non-finite entries")
        if np.any(p < -ROW_TOL) or np.any(p > 1 + ROW_TOL):
            bad = np.argwhere((p < -ROW_TOL) | (p > 1 + ROW_TOL))[0]
            raise ValidationError(f"entry {tuple(int(i) for i in bad)} = {p[tuple(bad)]} outside [0, 1]")
        sums = p.sum(axis=1)
        for x, s in enumerate(sums):
            if abs(s - 1.0) > ROW_TOL:
                raise ValidationError(f"row {x} sums to {float(s):.15g}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n_inputs(self) -> int:
        return self.p.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.p.shape[1]

    def __eq__(self, other):
        return isinstance(other, StochasticChannel) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash(self.p.tobytes())

    @classmethod
    def identity(cls, n: int) -> "StochasticChannel":
        return cls(np.eye(n))

    @classmethod
    def uniform(cls, n_in: int, n_out: int) -> "StochasticChannel":
        return cls(np.full((n_in, n_out), 1.0 / n_out))

    @classmethod
    def bsc(cls, flip: float) -> "StochasticChannel":
        return cls([[1 - flip, flip], [flip, 1 - flip]])

    @classmethod
    def bec(cls, erasure: float) -> "StochasticChannel":
        """Binary erasure channel; output order is (0, 1, e)."""
        return cls([[1 - erasure, 0.0, erasure], [0.0, 1 - erasure, erasure]])


@dataclass(frozen=True, eq=False)
class JointPrior:
    """Joint distribution ``q[u, x] = q(u) q(x|u)``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2:
            raise ValidationError("prior must be a 2-d array")
        if not np.all(np.isfinite(q)) or np.any(q < -ROW_TOL):
            raise ValidationError("prior has negative or non-finite entries")
        if abs(q.sum() - 1.0) > ROW_TOL:
            raise ValidationError(f"prior sums to {float(q.sum()):.15g}, not 1")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n_u(self) -> int:
        return self.q.shape[0]

    @property
    def n_x(self) -> int:
        return self.q.shape[1]

    @classmethod
    def uniform_identity(cls, n: int) -> "JointPrior":
        """Uniform U with X = U."""
        return cls(np.eye(n) / n)


@dataclass(frozen=True, eq=False)
class GapCertificate:
    gap: float
    degrader: StochasticChannel
    residual: np.ndarray  # residual[x, z] = p'(z|x) - (p d)(z|x)


@dataclass(frozen=True, eq=False)
class WitnessPrior:
    prior: JointPrior  # rows indexed by u = z'
    advantage: float
    lp_value: float


@dataclass(frozen=True, eq=False)
class ApproxReport:
    gap: float
    degrader: StochasticChannel
    variational: float
    bound_inputs: float
    bound_proved: float
    holds_proved: bool
    holds_inputs: bool


@dataclass(frozen=True, eq=False)
class CounterexamplePrior:
    prior: JointPrior
    h_y: float
    h_z: float

    @property
    def excess(self) -> float:
        return self.h_y - self.h_z


def _same_inputs(p: StochasticChannel, p2: StochasticChannel) -> None:
    if p.n_inputs != p2.n_inputs:
        raise DimensionMismatch(f"input alphabets differ: {p.n_inputs} vs {p2.n_inputs}")


def compose(q: StochasticChannel, p: StochasticChannel) -> StochasticChannel:
    """The channel ``x -> y -> z`` obtained by following ``p`` with ``q``."""
    if p.n_outputs != q.n_inputs:
        raise DimensionMismatch(f"p has {p.n_outputs} outputs but q has {q.n_inputs} inputs")
    return StochasticChannel(_clean_stochastic(p.p @ q.p))


def _joint_check(q: JointPrior, p: StochasticChannel) -> None:
    if q.n_x != p.n_inputs:
        raise DimensionMismatch(f"prior has {q.n_x} x-values but channel has {p.n_inputs} inputs")


def guessing_probability(q: JointPrior, p: StochasticChannel) -> float:
    _joint_check(q, p)
    return float(np.sum(np.max(q.q @ p.p, axis=0)))


def cond_min_entropy(q: JointPrior, p: StochasticChannel) -> float:
    return float(-np.log2(guessing_probability(q, p)))


def _xlogx(a):
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    mask = a > 0
    out[mask] = a[mask] * np.log2(a[mask])
    return out


def _cond_entropy(joint_uy: np.ndarray) -> np.ndarray:
    """H(U|Y) of joints of shape (..., U, Y)."""
    py = joint_uy.sum(axis=-2)
    return -_xlogx(joint_uy).sum(axis=(-2, -1)) + _xlogx(py).sum(axis=-1)


def cond_shannon_entropy(q: JointPrior, p: StochasticChannel) -> float:
    _joint_check(q, p)
    return float(_cond_entropy(q.q @ p.p))


def degradation_gap(p: StochasticChannel, p2: StochasticChannel) -> GapCertificate:
    """Minimax gap ``min_d max_{x,z} [p'(z|x) - (p d)(z|x)]`` and its optimizer."""
    _same_inputs(p, p2)
    nx, ny, nz = p.n_inputs, p.n_outputs, p2.n_outputs
    nd = ny * nz
    c = np.zeros(nd + 1)
    c[-1] = 1.0
    A = np.zeros((ny, nd + 1))
    for y in range(ny):
        A[y, y * nz:(y + 1) * nz] = 1.0
    G = np.zeros((nx * nz, nd + 1))
    h = np.zeros(nx * nz)
    for x in range(nx):
        for z in range(nz):
            row = x * nz + z
            G[row, z:nd:nz] = -p.p[x]
            G[row, -1] = -1.0
            h[row] = -p2.p[x, z]
    lb = np.zeros(nd + 1)
    lb[-1] = -np.inf
    sol = solve_lp(LinearProgram(c, A, np.ones(ny), G, h, lb))
    if sol.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"degradation LP returned {sol.status.value}")
    d = StochasticChannel(_clean_stochastic(sol.primal[:nd].reshape(ny, nz)))
    residual = p2.p - p.p @ d.p
    return GapCertificate(max(float(sol.value), 0.0), d, residual)


def find_degrader(p: StochasticChannel, p2: StochasticChannel, tol: float = 1e-7) -> StochasticChannel:
    cert = degradation_gap(p, p2)
    if cert.gap > tol:
        raise NotDegradable(cert)
    return cert.degrader


def extract_witness_prior(p: StochasticChannel, p2: StochasticChannel) -> WitnessPrior:
    """Solve the dual guessing game: a prior ``q(x, z')`` maximizing
    ``P_guess(Z'|Z, identity decoder) - P_guess(Z'|Y)``."""
    _same_inputs(p, p2)
    nx, ny, nz = p.n_inputs, p.n_outputs, p2.n_outputs
    nq = nx * nz
    # variables: q[x, z'] flattened row-major, then m_y
    c = np.concatenate([-p2.p.ravel(), np.ones(ny)])
    A = np.concatenate([np.ones(nq), np.zeros(ny)])[None, :]
    G = np.zeros((ny * nz, nq + ny))
    for y in range(ny):
        for z in range(nz):
            row = y * nz + z
            G[row, z:nq:nz] = p.p[:, y]
            G[row, nq + y] = -1.0
    sol = solve_lp(LinearProgram(c, A, [1.0], G, np.zeros(ny * nz), np.zeros(nq + ny)))
    if sol.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"witness LP returned {sol.status.value}")
    qxz = np.clip(sol.primal[:nq].reshape(nx, nz), 0.0, None)
    qxz /= qxz.sum()
    prior = JointPrior(qxz.T)
    advantage = float(np.sum(prior.q * p2.p.T)) - guessing_probability(prior, p)
    return WitnessPrior(prior, advantage, -float(sol.value))


def variational_distance(p2: StochasticChannel, approx: StochasticChannel) -> float:
    if p2.p.shape != approx.p.shape:
        raise DimensionMismatch(f"shapes {p2.p.shape} and {approx.p.shape} differ")
    return float(np.max(np.sum(np.abs(p2.p - approx.p), axis=1)))


def approx_bound_check(p: StochasticChannel, p2: StochasticChannel) -> ApproxReport:
    """Compare the optimal degrader's variational error with ``2|Z| gap``
    (row-wise bound) and with ``2|X| gap``."""
    cert = degradation_gap(p, p2)
    v = variational_distance(p2, compose(cert.degrader, p))
    proved = 2 * p2.n_outputs * cert.gap
    by_inputs = 2 * p.n_inputs * cert.gap
    return ApproxReport(cert.gap, cert.degrader, v, by_inputs, proved,
                        v <= proved + 1e-8, v <= by_inputs + 1e-8)


def _excess_batch(Q: np.ndarray, p: np.ndarray, p2: np.ndarray) -> np.ndarray:
    return _cond_entropy(Q @ p) - _cond_entropy(Q @ p2)


def shannon_less_noisy_falsify(p: StochasticChannel, p2: StochasticChannel, trials: int = 1000,
                               seed: int = 0, margin: float = 1e-9) -> CounterexamplePrior | None:
    """Search for a prior with ``H(U|Y) > H(U|Z)``.

    Random restarts on the joint simplex followed by coordinate ascent
    (mass moved onto or off one entry at a time, with a shrinking step).
    ``None`` means no counterexample was found, which proves nothing.
    """
    _same_inputs(p, p2)
    rng = np.random.default_rng(seed)
    nx = p.n_inputs
    sizes = list(range(2, p2.n_outputs + 2))
    for trial in range(trials):
        nu = sizes[trial % len(sizes)]
        k = nu * nx
        q = rng.dirichlet(np.full(k, 0.5))
        best = float(_excess_batch(q.reshape(1, nu, nx), p.p, p2.p)[0])
        eta = 0.5
        for _ in range(24):
            if best > margin:
                break
            up = (q[None, :] + eta * np.eye(k)) / (1 + eta)
            cut = np.minimum(q, eta)
            down = q[None, :] - np.diag(cut)
            down_s = down.sum(axis=1, keepdims=True)
            down = np.where(down_s > 0, down / np.where(down_s > 0, down_s, 1), q)
            cand = np.vstack([up, down])
            vals = _excess_batch(cand.reshape(-1, nu, nx), p.p, p2.p)
            i = int(np.argmax(vals))
            if vals[i] > best + 1e-15:
                q, best = cand[i], float(vals[i])
            else:
                eta /= 2
                if eta < 1e-4:
                    break
        if best > margin:
            prior = JointPrior(q.reshape(nu, nx) / q.sum())
            return CounterexamplePrior(prior, cond_shannon_entropy(prior, p),
                                       cond_shannon_entropy(prior, p2))
    return None
