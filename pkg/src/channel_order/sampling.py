"""Seeded random generators for test fixtures and falsifier searches."""
from __future__ import annotations

import numpy as np


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    Q, R = np.linalg.qr(ginibre(rng, d, d))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(rng, d, 1)[:, 0]
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    G = ginibre(rng, d, rank or d)
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    G = ginibre(rng, d, d)
    return (G + G.conj().T) / 2


def random_kraus(d_in: int, d_out: int, rng: np.random.Generator, n_kraus: int | None = None) -> list:
    """Kraus operators of a random CPTP map, sliced from a random isometry."""
    k = n_kraus or d_in * d_out
    V = np.linalg.qr(ginibre(rng, k * d_out, d_in))[0]
    return [V[i * d_out:(i + 1) * d_out] for i in range(k)]


def random_povm(d: int, n: int, rng: np.random.Generator) -> list:
    raw = [G @ G.conj().T for G in (ginibre(rng, d, d) for _ in range(n))]
    S = sum(raw)
    w, V = np.linalg.eigh(S)
    Sih = (V / np.sqrt(w)) @ V.conj().T
    return [Sih @ R @ Sih for R in raw]


def random_stochastic(n_in: int, n_out: int, rng: np.random.Generator, alpha: float = 1.0) -> np.ndarray:
    return rng.dirichlet(np.full(n_out, alpha), size=n_in)
