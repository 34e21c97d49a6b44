"""Dense semidefinite programming over complex Hermitian blocks.

Problem form (all matrices block diagonal, each block complex Hermitian)::

    minimize    Tr[C X]
    subject to  Tr[A_i X] = b_i        i = 1..m
                X >= 0

with dual ``maximize b.y  s.t.  S = C - sum_i y_i A_i >= 0``.

Every complex block ``Z`` is solved through its real embedding
``[[Re Z, -Im Z], [Im Z, Re Z]]``.  The solver is an infeasible-start
primal-dual path-following method with the HKM search direction and a
Mehrotra predictor-corrector, started from identity-scaled iterates.
Linearly dependent constraints are removed before iterating and an
inconsistent linear system is reported as :class:`Infeasible`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, Infeasible, IterationLimit, NumericalFailure, Unbounded
from .linalg import hermiticity_error

RESIDUAL_TOL = 1e-7
MAX_ITER = 50_000
_STEP = 0.98


class SdpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SemidefiniteProgram:
    """``C`` is a list of blocks; ``A`` is a list of constraints, each a list
    of blocks (``None`` for an all-zero block); ``b`` the right-hand sides."""

    C: Sequence[np.ndarray]
    A: Sequence[Sequence[np.ndarray | None]]
    b: Sequence[float]

    def __post_init__(self):
        C = [np.asarray(c, dtype=complex) for c in self.C]
        sizes = [c.shape[0] for c in C]
        for c in C:
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise DimensionMismatch("objective blocks must be square")
            if hermiticity_error(c) > 1e-9:
                raise ValueError("objective block is not Hermitian")
        A = []
        for cons in self.A:
            if len(cons) != len(C):
                raise DimensionMismatch("constraint has the wrong number of blocks")
            row = []
            for blk, n in zip(cons, sizes):
                if blk is None:
                    row.append(np.zeros((n, n), dtype=complex))
                    continue
                blk = np.asarray(blk, dtype=complex)
                if blk.shape != (n, n):
                    raise DimensionMismatch(f"constraint block shape {blk.shape} != {(n, n)}")
                if hermiticity_error(blk) > 1e-9:
                    raise ValueError("constraint block is not Hermitian")
                row.append(blk)
            A.append(row)
        b = np.asarray(self.b, dtype=float).ravel()
        if b.size != len(A):
            raise DimensionMismatch(f"{len(A)} constraints but {b.size} right-hand sides")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def block_sizes(self) -> list[int]:
        return [c.shape[0] for c in self.C]


@dataclass(frozen=True)
class SdpSolution:
    X: list
    y: np.ndarray
    S: list
    value: float
    dual_value: float
    status: SdpStatus = SdpStatus.OPTIMAL
    iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    info: dict = field(default_factory=dict, repr=False)


def embed(Z: np.ndarray) -> np.ndarray:
    re, im = Z.real, Z.imag
    return np.block([[re, -im], [im, re]])


def unembed(W: np.ndarray) -> np.ndarray:
    n = W.shape[0] // 2
    re = (W[:n, :n] + W[n:, n:]) / 2
    im = (W[n:, :n] - W[:n, n:]) / 2
    return re + 1j * im


def _sym(M):
    return (M + np.swapaxes(M, -1, -2)) / 2


class _Blocks:
    """Real symmetric block-diagonal data in the embedded space."""

    def __init__(self, sdp: SemidefiniteProgram):
        self.sizes = [2 * n for n in sdp.block_sizes]
        # embedding doubles traces, so halve the data to keep Tr[A X] = <A~, W>
        self.C = [embed(c) / 2 for c in sdp.C]
        self.A = [np.stack([embed(cons[k]) / 2 for cons in sdp.A]) if sdp.A else
                  np.zeros((0, s, s)) for k, s in enumerate(self.sizes)]
        self.m = len(sdp.A)

    def flat(self):
        if self.m == 0:
            return np.zeros((0, 0))
        return np.hstack([a.reshape(self.m, -1) for a in self.A])


def _op(A_blocks, X):
    return sum(np.einsum("mij,ij->m", a, x) for a, x in zip(A_blocks, X))


def _adj(A_blocks, y):
    return [np.einsum("m,mij->ij", y, a) for a in A_blocks]


def _inner(X, Y):
    return float(sum(np.vdot(x, y).real for x, y in zip(X, Y)))


def _max_step(X, dX):
    """Largest alpha with X + alpha dX PSD (inf if unrestricted)."""
    best = np.inf
    for x, dx in zip(X, dX):
        try:
            L = np.linalg.cholesky(x)
        except np.linalg.LinAlgError:
            return 0.0
        Li = sla.solve_triangular(L, np.eye(len(x)), lower=True)
        lam = np.linalg.eigvalsh(_sym(Li @ dx @ Li.T))[0]
        if lam < 0:
            best = min(best, -1.0 / lam)
    return best


def _reduce(Amat, b, tol):
    """Drop dependent rows; raise Infeasible when b is inconsistent."""
    m = Amat.shape[0]
    if m == 0:
        return np.arange(0)
    sol, *_ = np.linalg.lstsq(Amat, b, rcond=None)
    resid = float(np.max(np.abs(Amat @ sol - b)))
    if resid > tol * (1.0 + float(np.max(np.abs(b)))):
        # the component of b outside range(A) is a Farkas-type witness
        raise Infeasible(f"linear constraints are inconsistent (residual {resid:.3e})",
                         certificate={"linear_residual": resid})
    Q, R, piv = sla.qr(Amat.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return np.arange(0)
    rank = int(np.sum(diag > 1e-10 * diag[0]))
    return np.sort(piv[:rank])


def solve_sdp(sdp: SemidefiniteProgram, tol: float = 1e-10, max_iter: int = MAX_ITER) -> SdpSolution:
    data = _Blocks(sdp)
    b_full = sdp.b
    Amat = data.flat()
    keep = _reduce(Amat, b_full, 1e-9)
    norms = np.linalg.norm(Amat[keep], axis=1) if keep.size else np.zeros(0)
    A = [a[keep] / norms[:, None, None] for a in data.A]
    b = b_full[keep] / norms if keep.size else np.zeros(0)
    C = data.C
    m = b.size
    sizes = data.sizes
    n_tot = sum(sizes)

    normA = max([float(np.linalg.norm(a[i])) for a in A for i in range(m)], default=0.0)
    normC = float(np.sqrt(sum(np.sum(c * c) for c in C)))
    normb = float(np.linalg.norm(b))
    xi = max(10.0, np.sqrt(n_tot), n_tot * max([(1 + abs(bi)) / (1 + normA) for bi in b], default=1.0))
    eta = max(10.0, np.sqrt(n_tot), normA, normC)
    X = [xi * np.eye(s) for s in sizes]
    S = [eta * np.eye(s) for s in sizes]
    y = np.zeros(m)

    def stats(X, y, S):
        rp = b - _op(A, X) if m else np.zeros(0)
        Rd = [c - a - s for c, a, s in zip(C, _adj(A, y) if m else [0 * c for c in C], S)]
        pobj = _inner(C, X)
        dobj = float(b @ y)
        pinf = float(np.linalg.norm(rp)) / (1 + normb)
        dinf = float(np.sqrt(sum(np.sum(r * r) for r in Rd))) / (1 + normC)
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        return rp, Rd, pobj, dobj, pinf, dinf, gap

    it = 0
    best = None
    stall = 0
    while True:
        rp, Rd, pobj, dobj, pinf, dinf, gap = stats(X, y, S)
        err = max(pinf, dinf, gap)
        stall = 0 if best is None or err < best[0] * 0.9 else stall + 1
        if best is None or err < best[0]:
            best = (err, [x.copy() for x in X], y.copy(), [s.copy() for s in S])
        if err <= tol:
            break
        if stall >= 8:
            break
        if it >= max_iter:
            raise IterationLimit(f"SDP exceeded {max_iter} iterations")

        normX = max(float(np.linalg.norm(x)) for x in X)
        normy = float(np.linalg.norm(y))
        if m and normy > 1e8 and dobj > 0:
            Z = [-a for a in _adj(A, y)]
            lam = min(np.linalg.eigvalsh(z)[0] for z in Z)
            if lam >= -1e-6 * dobj:
                raise Infeasible("primal infeasible: dual ray found",
                                 certificate={"y": (y / dobj).tolist()})
        if normX > 1e8 and pobj < 0 and float(np.linalg.norm(_op(A, X) if m else 0)) < 1e-6 * (-pobj) * 1e2:
            raise Unbounded("primal unbounded: improving ray found")

        mu = _inner(X, S) / n_tot
        Sinv = [np.linalg.inv(s) for s in S]
        Sinv = [_sym(si) for si in Sinv]
        if m:
            G = [x @ a @ si for x, a, si in zip(X, A, Sinv)]  # (m, n, n) per block
            M = sum(np.einsum("iab,jba->ij", a, g) for a, g in zip(A, G))
            M = _sym(M)
            try:
                cho = sla.cho_factor(M)
            except np.linalg.LinAlgError:
                cho = None
        else:
            cho = None

        def direction(sigma, corr=None):
            # right-hand side of the linearized complementarity X S = sigma mu I
            Rc = [sigma * mu * si - x for si, x in zip(Sinv, X)]
            if corr is not None:
                Rc = [rc - dxa @ dsa @ si for rc, (dxa, dsa), si in zip(Rc, corr, Sinv)]
            if m:
                h = rp - _op(A, Rc) + _op(A, [x @ r @ si for x, r, si in zip(X, Rd, Sinv)])
                if cho is not None:
                    dy = sla.cho_solve(cho, h)
                else:
                    dy = np.linalg.lstsq(M, h, rcond=None)[0]
                dS = [r - a for r, a in zip(Rd, _adj(A, dy))]
            else:
                dy = np.zeros(0)
                dS = Rd
            dX = [_sym(rc - x @ ds @ si) for rc, x, ds, si in zip(Rc, X, dS, Sinv)]
            dS = [_sym(d) for d in dS]
            return dX, dy, dS

        dXa, dya, dSa = direction(0.0)
        ap = min(1.0, _max_step(X, dXa))
        ad = min(1.0, _max_step(S, dSa))
        mu_aff = _inner([x + ap * d for x, d in zip(X, dXa)], [s + ad * d for s, d in zip(S, dSa)]) / n_tot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        dX, dy, dS = direction(sigma, corr=list(zip(dXa, dSa)))
        ap = min(1.0, _STEP * _max_step(X, dX))
        ad = min(1.0, _STEP * _max_step(S, dS))
        X = [_sym(x + ap * d) for x, d in zip(X, dX)]
        y = y + ad * dy
        S = [_sym(s + ad * d) for s, d in zip(S, dS)]
        it += 1

    err, X, y, S = best
    if err > 1e-8:
        raise NumericalFailure(f"SDP stalled with relative residual {err:.2e} after {it} iterations")

    J_X = [unembed(x) for x in X]
    J_S = [2 * unembed(s) for s in S]
    y_full = np.zeros(b_full.size)
    if keep.size:
        y_full[keep] = y / norms
    res = max([abs(float(sum(np.trace(a @ x).real for a, x in zip(cons, J_X))) - bi)
               for cons, bi in zip(sdp.A, b_full)], default=0.0)
    if res > RESIDUAL_TOL:
        raise NumericalFailure(f"SDP constraint residual {res:.2e} exceeds {RESIDUAL_TOL:.0e}")
    value = float(sum(np.trace(c @ x).real for c, x in zip(sdp.C, J_X)))
    dual_value = float(b_full @ y_full)
    Rd = [c - sum(yi * cons[k] for yi, cons in zip(y_full, sdp.A)) - s
          for k, (c, s) in enumerate(zip(sdp.C, J_S))]
    dres = max((float(np.max(np.abs(r))) for r in Rd), default=0.0)
    return SdpSolution(J_X, y_full, J_S, value, dual_value, SdpStatus.OPTIMAL, it, res, dres,
                       info={"relative_error": err})
