"""Dense complex linear algebra: Hermitian spectra, tensor products, partial
traces, norms and fidelities.

Matrices are plain ``numpy`` arrays.  Every routine here is a pure function.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPsd, NotSquare

DEFAULT_TOL = 1e-9
HERMITIAN_TOL = 1e-10
# eigenvalues closer than this are treated as one degenerate cluster
_CLUSTER_TOL = 1e-9
_SQRT_CLIP = 1e-12


class HermitianSpectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _require_square(A: np.ndarray) -> None:
    if A.shape[0] != A.shape[1]:
        raise NotSquare(f"matrix of shape {A.shape} is not square")


def dag(A: np.ndarray) -> np.ndarray:
    return np.conj(A).T


def hermiticity_error(M) -> float:
    A = as_matrix(M)
    _require_square(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - dag(A))))


def is_hermitian(M, tol: float = DEFAULT_TOL) -> bool:
    return hermiticity_error(M) <= tol


def _canonical_cluster(V: np.ndarray) -> np.ndarray:
    """Basis of span(V) that depends only on the subspace, not on V."""
    n, k = V.shape
    if k == 1:
        return _phase_fix(V)
    P = V @ dag(V)
    chosen: list[np.ndarray] = []
    floor = 0.5 / np.sqrt(n)
    for j in range(n):
        v = P[:, j].copy()
        for u in chosen:
            v -= u * np.vdot(u, v)
        nv = np.linalg.norm(v)
        if nv > floor:
            v /= nv
            # one re-orthogonalization pass keeps the basis orthonormal to 1e-15
            for u in chosen:
                v -= u * np.vdot(u, v)
            chosen.append(v / np.linalg.norm(v))
            if len(chosen) == k:
                break
    if len(chosen) < k:
        return _phase_fix(V)
    return _phase_fix(np.column_stack(chosen))


def _phase_fix(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for c in range(V.shape[1]):
        col = V[:, c]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        a = col[idx]
        if abs(a) > 0:
            V[:, c] = col * (np.conj(a) / abs(a))
    return V


def _first_nonzero_key(v: np.ndarray) -> tuple:
    idx = int(np.argmax(np.abs(v) > 1e-12))
    return (idx, -round(float(abs(v[idx])), 12))


def eig_hermitian(M, tol: float = HERMITIAN_TOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix with a canonical eigenbasis.

    Eigenvalues are ascending.  Inside a degenerate cluster the eigenvectors
    are a deterministic function of the eigenspace: each vector has its first
    nonzero component real and positive, and the cluster is sorted by the
    position of that component.
    """
    A = as_matrix(M)
    _require_square(A)
    err = hermiticity_error(A)
    if err > tol:
        raise NotHermitian(f"||M - M^dag||_max = {err:.3e} exceeds {tol:.1e}")
    A = (A + dag(A)) / 2
    w, V = np.linalg.eigh(A)
    n = len(w)
    scale = max(1.0, float(np.max(np.abs(w)))) if n else 1.0
    out = np.empty_like(V)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] <= _CLUSTER_TOL * scale:
            stop += 1
        block = _canonical_cluster(V[:, start:stop])
        if stop - start > 1:
            order = sorted(range(block.shape[1]), key=lambda c: _first_nonzero_key(block[:, c]))
            block = block[:, order]
        out[:, start:stop] = block
        start = stop
    return HermitianSpectrum(w, out)


def kron(*mats) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(M, dims: Sequence[int], which) -> np.ndarray:
    """Trace out the subsystem(s) ``which`` (0-based) of a matrix on
    ``H_0 (x) H_1 (x) ...`` with local dimensions ``dims``."""
    A = as_matrix(M)
    _require_square(A)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if A.shape[0] != total:
        raise DimensionMismatch(f"matrix size {A.shape[0]} does not match dims {dims}")
    drop = {which} if np.isscalar(which) else set(which)
    if not drop <= set(range(len(dims))):
        raise DimensionMismatch(f"subsystem index {which} out of range for {len(dims)} systems")
    n = len(dims)
    T = A.reshape(dims + dims)
    # trace highest axes first so remaining axis numbers stay valid
    for k in sorted(drop, reverse=True):
        nk = T.ndim // 2
        T = np.trace(T, axis1=k, axis2=k + nk)
    keep = [dims[k] for k in range(n) if k not in drop]
    d = int(np.prod(keep)) if keep else 1
    return T.reshape(d, d)


def trace_norm(M) -> float:
    A = as_matrix(M)
    _require_square(A)
    if is_hermitian(A, HERMITIAN_TOL):
        return float(np.sum(np.abs(np.linalg.eigvalsh((A + dag(A)) / 2))))
    return float(np.sum(np.linalg.svd(A, compute_uv=False)))


def psd_sqrt(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues in [-1e-12, 0] are clipped."""
    A = as_matrix(M)
    w, V = np.linalg.eigh((A + dag(A)) / 2)
    if w.size and w[0] < -max(tol, _SQRT_CLIP):
        raise NotPsd(f"minimum eigenvalue {w[0]:.3e} below -{tol:.1e}")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ dag(V)


def fidelity_sq(rho, sigma, tol: float = DEFAULT_TOL) -> float:
    """Squared fidelity ``||sqrt(rho) sqrt(sigma)||_1 ** 2``."""
    A, B = as_matrix(rho), as_matrix(sigma)
    _require_square(A)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    for X in (A, B):
        if not is_hermitian(X, tol):
            raise NotPsd("argument is not Hermitian")
    s = np.linalg.svd(psd_sqrt(A, tol) @ psd_sqrt(B, tol), compute_uv=False)
    return float(np.sum(s) ** 2)


def min_eigenvalue(M) -> float:
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh((A + dag(A)) / 2)[0])


def psd_check(M, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(M)
    _require_square(A)
    err = hermiticity_error(A)
    if err > tol:
        raise NotHermitian(f"||M - M^dag||_max = {err:.3e} exceeds {tol:.1e}")
    return min_eigenvalue(A) >= -tol


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices.

    Order: diagonal units, then symmetric and antisymmetric pairs for i < j.
    """
    basis = []
    for i in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    r = 1 / np.sqrt(2)
    for i in range(d):
        for j in range(i + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[i, j] = S[j, i] = r
            A = np.zeros((d, d), dtype=complex)
            A[i, j] = -1j * r
            A[j, i] = 1j * r
            basis.extend([S, A])
    return basis


def matrix_units(d: int) -> list[np.ndarray]:
    units = []
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            units.append(E)
    return units


def hs_inner(A, B) -> complex:
    """Tr[A^dag B]."""
    return complex(np.vdot(np.asarray(A), np.asarray(B)))
