"""Statistical morphisms between quantum channels and their CPTP extensions.

The central primitive is :func:`match_povm`: given channels ``N`` and ``N'``
with a common input and a POVM on the output of ``N'``, find a POVM on the
output of ``N`` producing identical outcome statistics for every input.
Matching one informationally complete POVM defines a Hermitian,
trace-preserving map ``L`` with ``L o N = N'`` (:func:`construct_morphism`).
When the outputs of ``L o N`` commute, matching their common eigenbasis
yields a measure-and-prepare channel (:func:`extend_commuting`); in general,
matching the generalized Bell measurement on ``id (x) N`` yields a noisy
teleportation channel (:func:`extend_teleport`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, IllConditionedFrame, Infeasible, MatchingInfeasible,
                     NotExtendable, NotInformationallyComplete, NotLessNoisy, NumericalFailure,
                     OutputsDoNotCommute)
from .linalg import dag, eig_hermitian, hermitian_basis, kron, matrix_units, min_eigenvalue, partial_trace
from .maps import OperatorMap, apply_map, basis_deviation, compose_maps, tensor_identity
from .sampling import random_density, random_povm, random_unitary
from .sdp import SemidefiniteProgram, solve_sdp
from .states import CqState, DensityOperator, Povm, pguess_cq

MATCH_TOL = 1e-7
AGREEMENT_TOL = 1e-6
CPTP_TOL = 1e-8
MAX_GRAM_CONDITION = 1e8


@dataclass(frozen=True, eq=False)
class IcPovmFrame:
    povm: Povm
    dual: tuple
    gram_condition: float

    def reconstruct(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        return sum(np.trace(X @ P) * T for P, T in zip(self.povm, self.dual))


def dual_frame(povm: Povm) -> list:
    """Hermitian operators ``T^x`` with ``X = sum_x Tr[X P^x] T^x``.

    For an overcomplete POVM the minimum-norm (pseudo-inverse) dual is used.
    """
    d = povm.dim
    # Tr[X P] = <vec(P^T), vec(X)>
    stats = np.array([P.T.reshape(-1) for P in povm])
    rank = np.linalg.matrix_rank(stats, tol=1e-10)
    if rank < d * d:
        raise NotInformationallyComplete(f"POVM spans {rank} of {d * d} operator dimensions")
    pinv = np.linalg.pinv(stats)
    out = []
    for x in range(len(povm)):
        T = pinv[:, x].reshape(d, d)
        out.append((T + dag(T)) / 2)
    return out


def gram_matrix(povm: Povm) -> np.ndarray:
    els = list(povm)
    return np.array([[np.trace(A @ B).real for B in els] for A in els])


def build_ic_povm(d: int) -> IcPovmFrame:
    """A d**2-outcome informationally complete POVM.

    Rank-one projectors onto ``|k>``, ``(|j>+|k>)/sqrt2`` and
    ``(|j>+i|k>)/sqrt2`` span the operator space; conjugating by
    ``S^(-1/2)`` with ``S`` their sum turns them into a POVM without
    changing the span.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    kets = [np.eye(d)[k].astype(complex) for k in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            kets.append((np.eye(d)[j] + np.eye(d)[k]) / np.sqrt(2))
            kets.append((np.eye(d)[j] + 1j * np.eye(d)[k]) / np.sqrt(2))
    projs = [np.outer(v, v.conj()) for v in kets]
    w, V = np.linalg.eigh(sum(projs))
    Sih = (V / np.sqrt(w)) @ dag(V)
    povm = Povm([Sih @ P @ Sih for P in projs])
    return IcPovmFrame(povm, tuple(dual_frame(povm)), float(np.linalg.cond(gram_matrix(povm))))


def _target_statistics(N2: OperatorMap, target: Povm, inputs) -> np.ndarray:
    t = np.array([[np.trace(apply_map(N2, E) @ T) for T in target] for E in inputs])
    if np.max(np.abs(t.imag), initial=0.0) > MATCH_TOL:
        raise MatchingInfeasible("target statistics are not real; N' is not Hermitian preserving")
    return t.real


def match_povm(N: OperatorMap, N2: OperatorMap, target: Povm, tol: float = MATCH_TOL) -> Povm:
    """POVM ``{P^x}`` on the output of ``N`` with
    ``Tr[N(E) P^x] = Tr[N'(E) target^x]`` for every input operator ``E``.

    Solved as ``max s`` subject to ``P^x >= s*1``, ``sum_x P^x = 1`` and the
    statistics equations; the matching exists iff the optimal ``s`` is
    nonnegative (up to ``tol``).
    """
    if N.dim_in != N2.dim_in:
        raise DimensionMismatch(f"channels have inputs {N.dim_in} and {N2.dim_in}")
    if target.dim != N2.dim_out:
        raise DimensionMismatch(f"target POVM acts on dimension {target.dim}, N' outputs {N2.dim_out}")
    inputs = hermitian_basis(N.dim_in)
    t = _target_statistics(N2, target, inputs)
    n, d = len(target), N.dim_out
    I = np.eye(d)
    outs = [apply_map(N, E) for E in inputs]
    outs = [(O + dag(O)) / 2 for O in outs]
    traces = [np.trace(O).real for O in outs]

    # substitute P^x = Q^x + s 1, with s eliminated through the trace of sum_x P^x = 1
    A, b = [], []
    for F in hermitian_basis(d)[1:] if d > 1 else []:
        blk = F - np.trace(F).real * I / d
        A.append([blk] * n)
        b.append(0.0)
    for k, (O, c) in enumerate(zip(outs, traces)):
        shift = -c * I / (n * d)
        for x in range(n):
            A.append([O + shift if y == x else shift for y in range(n)])
            b.append(t[k, x] - c / n)
    try:
        sol = solve_sdp(SemidefiniteProgram([I.astype(complex)] * n, A, b))
    except Infeasible as exc:
        raise MatchingInfeasible("statistics equations are inconsistent", margin=None,
                                 certificate=exc.certificate) from exc
    s = 1.0 / n - sol.value / (n * d)
    if s < -tol:
        raise MatchingInfeasible(f"no matching POVM: best margin {s:.3e}", margin=s)
    els = [(Q + dag(Q)) / 2 + s * I for Q in sol.X]
    resid = max(abs(np.trace(O @ P).real - t[k, x])
                for k, O in enumerate(outs) for x, P in enumerate(els))
    if resid > tol:
        raise NumericalFailure(f"matched statistics residual {resid:.2e} exceeds {tol:.0e}")
    return Povm(els, tol=max(1e-9, 2 * abs(min(s, 0.0))))


def matching_residual(N: OperatorMap, N2: OperatorMap, target: Povm, found: Povm) -> float:
    inputs = matrix_units(N.dim_in)
    return max(abs(np.trace(apply_map(N, E) @ P) - np.trace(apply_map(N2, E) @ T))
               for E in inputs for P, T in zip(found, target))


def morphism_from_matching(frame: IcPovmFrame, matched: Povm) -> OperatorMap:
    """``L(Y) = sum_x Tr[Y P^x] T^x``, the trace dual of ``Pbar^x -> P^x``."""
    d_in, d_out = matched.dim, frame.povm.dim
    C = sum(np.kron(P.T, T) for P, T in zip(matched, frame.dual))
    return OperatorMap(d_in, d_out, C)


def construct_morphism(N: OperatorMap, N2: OperatorMap) -> OperatorMap:
    """Hermitian trace-preserving ``L`` with ``L o N = N'``.

    Raises :class:`NotLessNoisy` when no POVM on the output of ``N``
    reproduces the statistics of an informationally complete measurement
    on the output of ``N'``.
    """
    frame = build_ic_povm(N2.dim_out)
    if frame.gram_condition > MAX_GRAM_CONDITION:
        raise IllConditionedFrame(f"IC-POVM Gram condition number {frame.gram_condition:.2e}")
    try:
        matched = match_povm(N, N2, frame.povm)
    except MatchingInfeasible as exc:
        raise NotLessNoisy("min-entropy dominance fails: IC statistics cannot be matched", exc) from exc
    L = morphism_from_matching(frame, matched)
    dev = basis_deviation(compose_maps(L, N), N2)
    if not (L.hermitian_preserving and L.trace_preserving) or dev > AGREEMENT_TOL:
        raise NumericalFailure(f"constructed morphism misses its guarantees (deviation {dev:.2e})")
    return L


@dataclass(frozen=True)
class MorphismCheck:
    passed: bool
    trials: int
    failures: tuple


def verify_statistical_morphism(L: OperatorMap, N: OperatorMap, trials: int = 50,
                                seed: int = 0) -> MorphismCheck:
    """Re-run the matching on random POVMs with 2..d**2 outcomes.

    Sound but incomplete: passing all trials does not prove that ``L`` is a
    statistical morphism of ``N`` for every POVM.
    """
    rng = np.random.default_rng(seed)
    LN = compose_maps(L, N)
    d = L.dim_out
    failures = []
    for k in range(trials):
        n = int(rng.integers(2, d * d + 1))
        povm = Povm(random_povm(d, n, rng), tol=1e-8)
        try:
            match_povm(N, LN, povm)
        except MatchingInfeasible:
            failures.append(k)
    return MorphismCheck(not failures, trials, tuple(failures))


def _common_eigenbasis(ops, seed: int, attempts: int = 5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    scale = max(1.0, max(float(np.max(np.abs(O))) for O in ops))
    for _ in range(attempts):
        H = sum(c * O for c, O in zip(rng.normal(size=len(ops)), ops))
        V = eig_hermitian((H + dag(H)) / 2, tol=1e-8 * scale).eigenvectors
        off = 0.0
        for O in ops:
            D = dag(V) @ O @ V
            off = max(off, float(np.max(np.abs(D - np.diag(np.diag(D))))))
        if off <= 1e-7 * scale:
            return V
    raise OutputsDoNotCommute("no common eigenbasis found for the outputs")


def measure_prepare(povm: Povm, basis: np.ndarray) -> OperatorMap:
    """``T(Z) = sum_x |v_x><v_x| Tr[Z P^x]`` for the columns ``v_x`` of ``basis``."""
    C = sum(np.kron(P.T, np.outer(basis[:, x], basis[:, x].conj())) for x, P in enumerate(povm))
    return OperatorMap(povm.dim, basis.shape[0], C)


def _check_cptp(T: OperatorMap, N: OperatorMap, LN: OperatorMap) -> None:
    lam = min_eigenvalue(T.choi)
    tp = float(np.max(np.abs(partial_trace(T.choi, (T.dim_in, T.dim_out), 1) - np.eye(T.dim_in))))
    dev = basis_deviation(compose_maps(T, N), LN)
    if lam < -CPTP_TOL or tp > CPTP_TOL or dev > AGREEMENT_TOL:
        raise NumericalFailure(f"extension misses its certificate: min eig {lam:.2e}, "
                               f"trace deviation {tp:.2e}, agreement {dev:.2e}")


def extend_commuting(L: OperatorMap, N: OperatorMap, seed: int = 0) -> OperatorMap:
    """CPTP ``T`` with ``T o N = L o N`` when the outputs of ``L o N`` commute."""
    if L.dim_in != N.dim_out:
        raise DimensionMismatch(f"N outputs dimension {N.dim_out} but L expects {L.dim_in}")
    LN = compose_maps(L, N)
    outs = [apply_map(LN, E) for E in hermitian_basis(N.dim_in)]
    scale = max(1.0, max(float(np.max(np.abs(O))) for O in outs))
    for i, A in enumerate(outs):
        if np.max(np.abs(A - dag(A))) > 1e-8 * scale:
            raise OutputsDoNotCommute("L o N does not map Hermitian operators to Hermitian ones")
        for B in outs[i + 1:]:
            if np.max(np.abs(A @ B - B @ A)) > 1e-8 * scale ** 2:
                raise OutputsDoNotCommute("outputs of L o N do not commute")
    V = _common_eigenbasis(outs, seed)
    basis_povm = Povm([np.outer(V[:, x], V[:, x].conj()) for x in range(V.shape[1])])
    matched = match_povm(N, LN, basis_povm)
    T = measure_prepare(matched, V)
    _check_cptp(T, N, LN)
    return T


def weyl_operators(d: int) -> list:
    """``X^a Z^b`` for a, b in range(d), ordered with ``a`` major."""
    omega = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d), 1, axis=0).astype(complex)
    Z = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(d) for b in range(d)]


@dataclass(frozen=True, eq=False)
class TeleportKit:
    dim: int
    bell_povm: Povm
    correction_unitaries: tuple
    phi_plus: DensityOperator

    def teleport(self, rho) -> np.ndarray:
        return noisy_teleport(self, self.bell_povm, np.asarray(rho, dtype=complex))


def teleport_kit(d: int) -> TeleportKit:
    """Generalized Bell measurement ``(1 (x) W)|Phi+>`` and corrections ``W``
    for the Heisenberg-Weyl operators ``W``."""
    phi = np.eye(d).reshape(-1).astype(complex) / np.sqrt(d)
    ws = weyl_operators(d)
    bell = []
    for W in ws:
        v = kron(np.eye(d), W) @ phi
        bell.append(np.outer(v, v.conj()))
    return TeleportKit(d, Povm(bell), tuple(ws), DensityOperator(np.outer(phi, phi.conj())))


def noisy_teleport(kit: TeleportKit, povm, Z: np.ndarray) -> np.ndarray:
    """``sum_x U^x Tr_{S'R}[(Phi+ (x) Z)(1 (x) P^x)] U^x^dag`` for a POVM
    ``{P^x}`` on ``S' (x) R``."""
    d = kit.dim
    dr = Z.shape[0]
    phi = kit.phi_plus.rho.reshape(d, d, d, d)
    out = np.zeros((d, d), dtype=complex)
    for U, P in zip(kit.correction_unitaries, povm):
        P4 = np.asarray(P).reshape(d, dr, d, dr)
        M = np.einsum("abce,rs,esbr->ac", phi, Z, P4)
        out += U @ M @ dag(U)
    return out


def teleport_identity_error(kit: TeleportKit, trials: int = 10, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rho = random_density(kit.dim, rng)
        worst = max(worst, float(np.max(np.abs(kit.teleport(rho) - rho))))
    return worst


def extend_teleport(L: OperatorMap, N: OperatorMap) -> OperatorMap:
    """CPTP ``T`` with ``T o N = L o N``, built by matching the Bell
    measurement on ``id (x) (L o N)`` with a POVM on ``id (x) N``."""
    if L.dim_in != N.dim_out:
        raise DimensionMismatch(f"N outputs dimension {N.dim_out} but L expects {L.dim_in}")
    d = L.dim_out
    kit = teleport_kit(d)
    err = teleport_identity_error(kit)
    if err > CPTP_TOL:
        raise NumericalFailure(f"teleportation identity fails by {err:.2e}")
    LN = compose_maps(L, N)
    try:
        matched = match_povm(tensor_identity(N, d), tensor_identity(LN, d), kit.bell_povm)
    except MatchingInfeasible as exc:
        raise NotExtendable("id (x) L is not a statistical morphism of id (x) N", exc) from exc
    T = OperatorMap.from_function(lambda Z: noisy_teleport(kit, matched, Z), N.dim_out, d)
    _check_cptp(T, N, LN)
    return T


@dataclass(frozen=True, eq=False)
class CounterexampleEnsemble:
    ensemble: CqState  # inputs to both channels
    pguess_n: float
    pguess_n2: float

    @property
    def advantage(self) -> float:
        return self.pguess_n2 - self.pguess_n


def _candidate_ensemble(d: int, trial: int, rng: np.random.Generator) -> CqState:
    if trial == 0:
        return CqState(np.full(d, 1.0 / d), tuple(np.diag(np.eye(d)[k]).astype(complex) for k in range(d)))
    if trial % 2 == 1:
        U = random_unitary(d, rng)
        return CqState(np.full(d, 1.0 / d), tuple(np.outer(U[:, k], U[:, k].conj()) for k in range(d)))
    n = int(rng.integers(2, d * d + 1))
    probs = rng.dirichlet(np.ones(n))
    states = tuple(random_density(d, rng, rank=1 if rng.random() < 0.5 else None) for _ in range(n))
    return CqState(probs, states)


def pguess_dominance_falsify(N: OperatorMap, N2: OperatorMap, trials: int = 1000, seed: int = 0,
                             margin: float = 1e-6) -> CounterexampleEnsemble | None:
    """Search for an input ensemble that is better guessed through ``N'``
    than through ``N``.

    Candidates: the computational basis first, then alternately random
    orthonormal bases with uniform priors and random ensembles of up to
    ``d**2`` pure or mixed states.  ``None`` proves nothing.
    """
    if N.dim_in != N2.dim_in:
        raise DimensionMismatch(f"channels have inputs {N.dim_in} and {N2.dim_in}")
    rng = np.random.default_rng(seed)
    d = N.dim_in
    for trial in range(trials):
        ens = _candidate_ensemble(d, trial, rng)
        out_n = CqState(ens.probs, tuple(_as_state(apply_map(N, s.rho)) for s in ens.states))
        out_n2 = CqState(ens.probs, tuple(_as_state(apply_map(N2, s.rho)) for s in ens.states))
        g1 = pguess_cq(out_n).value
        g2 = pguess_cq(out_n2).value
        if g2 - g1 > margin:
            return CounterexampleEnsemble(ens, g1, g2)
    return None


def _as_state(rho: np.ndarray) -> np.ndarray:
    rho = (rho + dag(rho)) / 2
    return rho / np.trace(rho).real
