"""Small dense linear programming by a two-phase revised simplex method.

Pivoting follows Bland's rule (lowest-index entering column, lowest-index
leaving variable among ratio ties), so the method cannot cycle and repeated
runs on the same data follow the same pivot sequence.

Problem form::

    minimize    c . x
    subject to  A_eq x  = b_eq
                G x    <= h
                x      >= lb      (lb_j may be -inf)

Duals use the convention ``c = A_eq^T y + G^T z + r`` with ``z <= 0`` and
``r >= 0`` (``r_j = 0`` for free variables), so that at an optimum
``c.x = b_eq.y + h.z + lb.r``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, IterationLimit, NumericalFailure

FEAS_TOL = 1e-8
_RC_TOL = 1e-11
_PIVOT_TOL = 1e-10
MAX_ITER = 50_000


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    G: np.ndarray | None = None
    h: np.ndarray | None = None
    lb: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        object.__setattr__(self, "c", c)

        def block(M, v, name):
            if M is None and v is None:
                return np.zeros((0, n)), np.zeros(0)
            M = np.asarray(M, dtype=float).reshape(-1, n) if np.size(M) else np.zeros((0, n))
            v = np.asarray(v, dtype=float).ravel()
            if M.shape[0] != v.size:
                raise DimensionMismatch(f"{name}: {M.shape[0]} rows but {v.size} right-hand sides")
            return M, v

        A, b = block(self.A_eq, self.b_eq, "equality")
        G, h = block(self.G, self.h, "inequality")
        lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        if lb.size != n:
            raise DimensionMismatch("lower bound length differs from objective length")
        for arr in (c, A, b, G, h):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")
        if np.any(np.isnan(lb)) or np.any(lb == np.inf):
            raise ValueError("lower bounds must be finite or -inf")
        object.__setattr__(self, "A_eq", A)
        object.__setattr__(self, "b_eq", b)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "lb", lb)

    @property
    def n(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    primal: np.ndarray
    dual: np.ndarray
    value: float
    dual_eq: np.ndarray = field(repr=False, default=None)
    dual_ineq: np.ndarray = field(repr=False, default=None)
    reduced_costs: np.ndarray = field(repr=False, default=None)
    iterations: int = 0
    # phase-one dual ray when infeasible
    farkas: np.ndarray | None = field(repr=False, default=None)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Standard:
    """``min cs.u  s.t.  As u = bs, u >= 0`` plus the maps back to ``x``."""

    def __init__(self, lp: LinearProgram):
        n = lp.n
        finite = np.isfinite(lp.lb)
        cols = []  # (original index, sign)
        for j in range(n):
            cols.append((j, 1.0))
            if not finite[j]:
                cols.append((j, -1.0))
        self.cols = cols
        lbf = np.where(finite, lp.lb, 0.0)
        self.lbf = lbf
        me, mi = lp.A_eq.shape[0], lp.G.shape[0]
        self.me, self.mi = me, mi
        nv = len(cols)
        T = np.zeros((n, nv))
        for k, (j, s) in enumerate(cols):
            T[j, k] = s
        self.T = T  # x = lbf + T u
        A = np.zeros((me + mi, nv + mi))
        A[:me, :nv] = lp.A_eq @ T
        A[me:, :nv] = lp.G @ T
        A[me:, nv:] = np.eye(mi)
        b = np.concatenate([lp.b_eq - lp.A_eq @ lbf, lp.h - lp.G @ lbf])
        c = np.concatenate([T.T @ lp.c, np.zeros(mi)])
        self.sign = np.where(b < 0, -1.0, 1.0)
        self.A = A * self.sign[:, None]
        self.b = b * self.sign
        self.c = c
        self.nv = nv
        self.offset = float(lp.c @ lbf)


def _lu(B):
    try:
        lu = sla.lu_factor(B, check_finite=False)
    except (ValueError, np.linalg.LinAlgError) as exc:  # pragma: no cover
        raise NumericalFailure(f"singular simplex basis: {exc}") from exc
    if np.min(np.abs(np.diag(lu[0]))) < 1e-13:
        raise NumericalFailure("simplex basis became numerically singular")
    return lu


def _simplex(A, b, c, basis, allowed, max_iter, it0=0):
    """Revised simplex with Bland's rule from a feasible ``basis``.

    Returns ``(status, basis, iterations)`` with status ``"optimal"`` or
    ``"unbounded"``; ``basis`` is modified in place.
    """
    m = A.shape[0]
    it = it0
    scale = 1.0 + float(np.max(np.abs(c))) if c.size else 1.0
    while True:
        if m == 0:
            if np.any(c[allowed] < -_RC_TOL * scale):
                return "unbounded", basis, it
            return "optimal", basis, it
        lu = _lu(A[:, basis])
        xB = sla.lu_solve(lu, b)
        y = sla.lu_solve(lu, c[basis], trans=1)
        in_basis = np.zeros(A.shape[1], dtype=bool)
        in_basis[basis] = True
        entering = -1
        for j in np.flatnonzero(allowed & ~in_basis):
            if c[j] - A[:, j] @ y < -_RC_TOL * scale:
                entering = int(j)
                break
        if entering < 0:
            return "optimal", basis, it
        d = sla.lu_solve(lu, A[:, entering])
        rows = np.flatnonzero(d > _PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", basis, it
        ratios = np.maximum(xB[rows], 0.0) / d[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
        leave = min(ties, key=lambda i: basis[i])
        basis[leave] = entering
        it += 1
        if it >= max_iter:
            raise IterationLimit(f"simplex exceeded {max_iter} pivots")


def solve_lp(lp: LinearProgram, max_iter: int = MAX_ITER) -> LpSolution:
    std = _Standard(lp)
    A, b, c = std.A, std.b, std.c
    m, nstd = A.shape

    # phase one: reuse unflipped slack columns, add artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        slack = std.nv + (i - std.me) if i >= std.me else -1
        if slack >= 0 and std.sign[i] > 0:
            basis.append(slack)
        else:
            basis.append(nstd + len(art_rows))
            art_rows.append(i)
    na = len(art_rows)
    A1 = np.hstack([A, np.zeros((m, na))])
    for k, i in enumerate(art_rows):
        A1[i, nstd + k] = 1.0
    c1 = np.concatenate([np.zeros(nstd), np.ones(na)])
    allowed1 = np.ones(nstd + na, dtype=bool)
    status, basis, it = _simplex(A1, b, c1, basis, allowed1, max_iter)
    lu = _lu(A1[:, basis]) if m else None
    xB = sla.lu_solve(lu, b) if m else np.zeros(0)
    infeas = float(c1[basis] @ xB) if m else 0.0
    if infeas > FEAS_TOL * (1.0 + float(np.max(np.abs(b), initial=0.0))):
        farkas = sla.lu_solve(lu, c1[basis], trans=1) * std.sign
        n = lp.n
        return LpSolution(LpStatus.INFEASIBLE, np.full(n, np.nan), np.zeros(m), np.nan,
                          iterations=it, farkas=farkas)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep_rows = list(range(m))
    pos = 0
    while pos < len(basis):
        j = basis[pos]
        if j < nstd:
            pos += 1
            continue
        B = A1[np.ix_(keep_rows, basis)]
        row = np.linalg.solve(B.T, np.eye(len(basis))[pos])
        coeffs = row @ A1[keep_rows, :nstd]
        cand = [k for k in range(nstd) if k not in basis and abs(coeffs[k]) > 1e-9]
        if cand:
            basis[pos] = cand[0]
            pos += 1
        else:
            # the artificial's own row is a combination of the others
            keep_rows.remove(art_rows[j - nstd])
            del basis[pos]
    A2 = A[keep_rows]
    b2 = b[keep_rows]
    allowed2 = np.ones(nstd, dtype=bool)
    status, basis, it = _simplex(A2, b2, c, basis, allowed2, max_iter, it)
    n = lp.n
    if status == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, np.full(n, np.nan), np.zeros(m), -np.inf, iterations=it)

    u = np.zeros(nstd)
    y_std = np.zeros(m)
    if keep_rows:
        lu = _lu(A2[:, basis])
        u[basis] = sla.lu_solve(lu, b2)
        y_std[keep_rows] = sla.lu_solve(lu, c[basis], trans=1)
    u = np.where((u < 0) & (u > -1e-12), 0.0, u)
    y_std = y_std * std.sign
    x = std.lbf + std.T @ u[: std.nv]
    y_eq, z = y_std[: std.me], y_std[std.me:]
    r = lp.c - lp.A_eq.T @ y_eq - lp.G.T @ z
    r = np.where(np.isfinite(lp.lb), r, 0.0)
    value = float(lp.c @ x)
    dual_value = float(lp.b_eq @ y_eq + lp.h @ z + np.where(np.isfinite(lp.lb), lp.lb, 0.0) @ r)

    res_eq = lp.A_eq @ x - lp.b_eq
    res_in = lp.G @ x - lp.h
    primal_res = max(float(np.max(np.abs(res_eq), initial=0.0)),
                     float(np.max(res_in, initial=0.0)),
                     float(np.max(lp.lb - x, initial=0.0)))
    dual_res = max(float(np.max(z, initial=0.0)), float(np.max(-r, initial=0.0)))
    if primal_res > FEAS_TOL or dual_res > FEAS_TOL or abs(value - dual_value) > FEAS_TOL:
        raise NumericalFailure(
            f"LP residuals not met: primal {primal_res:.2e}, dual {dual_res:.2e}, "
            f"gap {abs(value - dual_value):.2e}")
    return LpSolution(LpStatus.OPTIMAL, x, np.concatenate([y_eq, z]), value,
                      dual_eq=y_eq, dual_ineq=z, reduced_costs=r, iterations=it)
