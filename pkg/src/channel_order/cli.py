"""``channel-order`` command line tool.

Every verb writes a JSON certificate: the verb, digests of the input files,
a payload, recomputable residuals and the tolerance used.  Exit codes are
0 when the relation holds or the object was constructed, 1 when the relation
is refuted, 2 for usage and validation errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .classical import (JointPrior, StochasticChannel, approx_bound_check, compose, cond_shannon_entropy,
                        degradation_gap, extract_witness_prior, guessing_probability, shannon_less_noisy_falsify,
                        variational_distance)
from .errors import (ChannelOrderError, MatchingInfeasible, NotExtendable, NotLessNoisy, NumericalFailure,
                     OutputsDoNotCommute, ValidationError)
from .io import (decode_channel, decode_cq, decode_matrix, decode_prior, dumps, encode_channel,
                 encode_cq, encode_matrix, encode_povm, encode_prior, file_digest, load_any, read_json)
from .linalg import hermiticity_error, kron, min_eigenvalue, partial_trace
from .maps import OperatorMap, apply_map, basis_deviation, compose_maps
from .morphisms import (construct_morphism, extend_commuting, extend_teleport, pguess_dominance_falsify,
                        teleport_identity_error, teleport_kit)
from .states import CqState, hmin_sdp, pguess_bounds, pguess_cq

DEFAULT_TOL = 1e-7
TOL_ENV = "CHANNEL_ORDER_TOL"
VERBS = ("validate", "gap", "degrade", "witness", "approx", "pguess", "hmin", "morphism", "extend",
         "falsify", "compare")

EXIT_HOLDS, EXIT_REFUTED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
REFUTED = "refuted"

# residuals whose contract is looser than the decision tolerance
RESIDUAL_LIMITS = {
    "reproduction_error": 1e-6,
    "agreement_error": 1e-6,
    "witness_shortfall": 1e-6,
    "bracket_width": 1e-6,
    "choi_min_eig_violation": 1e-8,
    "trace_preservation_error": 1e-8,
}


class UsageError(ChannelOrderError):
    pass


@dataclass
class Certificate:
    verb: str
    inputs: list
    inputs_digest: str
    decision: str
    payload: dict
    residuals: dict
    residual_limits: dict
    options: dict
    tol: float
    version: str = __version__
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "Certificate":
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ValidationError(f"not a certificate: {exc}") from exc

    @property
    def exit_code(self) -> int:
        return EXIT_REFUTED if self.decision == REFUTED else EXIT_HOLDS


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def emit_report(cert: Certificate, fmt: str = "json") -> bytes:
    if fmt == "json":
        return dumps(_jsonable(cert.to_dict())).encode()
    if fmt != "text":
        raise UsageError(f"unknown format {fmt!r}")
    lines = [f"verb: {cert.verb}", f"decision: {cert.decision}", f"tolerance: {cert.tol:g}"]
    for key in sorted(cert.payload):
        val = cert.payload[key]
        if isinstance(val, (int, float, str, bool)) or val is None:
            lines.append(f"{key}: {val}")
        elif key in ("witness_prior", "counterexample_prior"):
            lines.append(f"{key}:")
            lines.extend("  " + " ".join(f"{v:.6g}" for v in row) for row in val["q"])
        elif isinstance(val, dict) and all(isinstance(v, (int, float, str, bool)) or v is None
                                           for v in val.values()):
            lines.append(f"{key}: " + ", ".join(f"{k}={val[k]}" for k in sorted(val)))
    lines.append("residuals:")
    lines.extend(f"  {k}: {cert.residuals[k]:.3e} (limit {cert.residual_limits[k]:.0e})"
                 for k in sorted(cert.residuals))
    lines.extend(f"note: {n}" for n in cert.notes)
    return ("\n".join(lines) + "\n").encode()


def parse_report(data: bytes) -> Certificate:
    return Certificate.from_dict(json.loads(data))


# helpers ---------------------------------------------------------------------

def _as_map(ch) -> OperatorMap:
    return OperatorMap.from_stochastic(ch) if isinstance(ch, StochasticChannel) else ch


def _classical(objs, verb):
    if not all(isinstance(o, StochasticChannel) for o in objs):
        raise UsageError(f"'{verb}' needs classical channels")
    return objs


def _channels(objs, verb):
    if not all(isinstance(o, (StochasticChannel, OperatorMap)) for o in objs):
        raise UsageError(f"'{verb}' needs channel files")
    return objs


def _stochastic_error(p) -> float:
    p = np.asarray(p, dtype=float)
    return float(max(np.max(np.abs(p.sum(axis=1) - 1)), max(0.0, -float(p.min()))))


def _tp_error(L: OperatorMap) -> float:
    return float(np.max(np.abs(partial_trace(L.choi, (L.dim_in, L.dim_out), 1) - np.eye(L.dim_in))))


def _cptp_residuals(T: OperatorMap, target: OperatorMap, N: OperatorMap) -> dict:
    return {"choi_min_eig_violation": max(0.0, -min_eigenvalue(T.choi)),
            "trace_preservation_error": _tp_error(T),
            "agreement_error": basis_deviation(compose_maps(T, N), target)}


def _witness_payload(p, p2, gap: float) -> dict:
    w = extract_witness_prior(p, p2)
    return {"witness_prior": encode_prior(w.prior), "advantage": w.advantage, "lp_value": w.lp_value, "gap": gap}


def _witness_residuals(p, p2, payload) -> dict:
    q = decode_prior(payload["witness_prior"])
    adv = float(np.sum(q.q * p2.p.T)) - guessing_probability(q, p)
    return {"advantage_error": abs(adv - payload["advantage"]),
            "witness_shortfall": max(0.0, payload["gap"] - adv)}


def _ensemble_outputs(N: OperatorMap, ens: CqState) -> CqState:
    outs = []
    for st in ens.states:
        r = apply_map(N, st.rho)
        r = (r + r.conj().T) / 2
        outs.append(r / np.trace(r).real)
    return CqState(ens.probs, tuple(outs))


# verbs -----------------------------------------------------------------------
# each verb returns (decision, payload, notes); each checker recomputes the
# residuals from the payload and the inputs alone

def run_validate(objs, opts):
    items = []
    for o in objs:
        if isinstance(o, StochasticChannel):
            items.append({"type": "classical", "inputs": o.n_inputs, "outputs": o.n_outputs})
        elif isinstance(o, OperatorMap):
            items.append({"type": "quantum", "dim_in": o.dim_in, "dim_out": o.dim_out,
                          "hermitian_preserving": o.hermitian_preserving,
                          "trace_preserving": o.trace_preserving,
                          "completely_positive": o.completely_positive})
        elif isinstance(o, CqState):
            items.append({"type": "cq", "labels": len(o), "dim": o.dim})
        elif isinstance(o, JointPrior):
            items.append({"type": "prior", "u": o.n_u, "x": o.n_x})
        elif isinstance(o, tuple):
            items.append({"type": "bipartite", "dims": [o[1], o[2]]})
        else:
            items.append({"type": "povm", "outcomes": len(o), "dim": o.dim})
    return "valid", {"documents": items}, []


def check_validate(objs, payload, opts):
    return {}


def run_gap(objs, opts):
    p, p2 = _classical(objs, "gap")
    cert = degradation_gap(p, p2)
    decision = "holds" if cert.gap <= opts["tol"] else REFUTED
    return decision, {"gap": cert.gap, "degrader": encode_channel(cert.degrader),
                      "delta": cert.residual.tolist()}, []


def check_gap(objs, payload, opts):
    p, p2 = objs
    d = np.array(payload["degrader"]["p"])
    delta = p2.p - p.p @ d
    return {"gap_error": abs(max(float(delta.max()), 0.0) - payload["gap"]),
            "delta_error": float(np.max(np.abs(delta - np.array(payload["delta"])))),
            "row_sum_error": float(np.max(np.abs(delta.sum(axis=1)))),
            "degrader_stochastic_error": _stochastic_error(d)}


def run_degrade(objs, opts):
    p, p2 = _channels(objs, "degrade")
    if isinstance(p, StochasticChannel) and isinstance(p2, StochasticChannel):
        cert = degradation_gap(p, p2)
        if cert.gap <= opts["tol"]:
            v = variational_distance(p2, compose(cert.degrader, p))
            return "holds", {"kind": "classical", "gap": cert.gap, "degrader": encode_channel(cert.degrader),
                             "variational": v}, []
        return REFUTED, {"kind": "classical", **_witness_payload(p, p2, cert.gap)}, []
    N, N2 = _as_map(p), _as_map(p2)
    try:
        L = construct_morphism(N, N2)
    except NotLessNoisy as exc:
        return REFUTED, _morphism_refutation(N, N2, exc, opts), ["degradability fails because min-entropy dominance fails"]
    T, method = _extend(L, N, "auto")
    return "holds", {"kind": "quantum", "map": encode_channel(T), "method": method}, []


def check_degrade(objs, payload, opts):
    p, p2 = objs
    if payload["kind"] == "classical":
        if "degrader" in payload:
            d = StochasticChannel(np.array(payload["degrader"]["p"]))
            return {"reproduction_error": variational_distance(p2, compose(d, p)),
                    "degrader_stochastic_error": _stochastic_error(d.p)}
        return _witness_residuals(p, p2, payload)
    N, N2 = _as_map(p), _as_map(p2)
    if "map" in payload:
        return _cptp_residuals(decode_channel(payload["map"]), N2, N)
    return _check_morphism_refutation(N, N2, payload)


def run_witness(objs, opts):
    p, p2 = _classical(objs, "witness")
    gap = degradation_gap(p, p2).gap
    payload = _witness_payload(p, p2, gap)
    return (REFUTED if payload["advantage"] > opts["tol"] else "holds"), payload, []


def check_witness(objs, payload, opts):
    p, p2 = objs
    res = _witness_residuals(*objs, payload)
    res["duality_error"] = abs(payload["lp_value"] - degradation_gap(p, p2).gap)
    return res


def run_approx(objs, opts):
    p, p2 = _classical(objs, "approx")
    r = approx_bound_check(p, p2)
    payload = {"gap": r.gap, "degrader": encode_channel(r.degrader), "variational": r.variational,
               "bound_proved": r.bound_proved, "bound_inputs": r.bound_inputs,
               "holds_proved": r.holds_proved, "holds_inputs": r.holds_inputs}
    return ("holds" if r.holds_proved else REFUTED), payload, []


def check_approx(objs, payload, opts):
    p, p2 = objs
    d = StochasticChannel(np.array(payload["degrader"]["p"]))
    v = variational_distance(p2, compose(d, p))
    delta = p2.p - p.p @ d.p
    return {"variational_error": abs(v - payload["variational"]),
            "bound_violation": max(0.0, v - 2 * p2.n_outputs * max(float(delta.max()), 0.0)),
            "row_identity_error": float(np.max(np.abs(np.abs(delta).sum(axis=1)
                                                     - 2 * np.where(delta > 0, delta, 0).sum(axis=1))))}


def _single(objs, verb, types):
    if len(objs) != 1 or not isinstance(objs[0], types):
        raise UsageError(f"'{verb}' needs exactly one input of the right kind")
    return objs[0]


def run_pguess(objs, opts):
    s = _single(objs, "pguess", CqState)
    res = pguess_cq(s)
    lower, upper = pguess_bounds(s)
    return "constructed", {"value": res.value, "upper_bound": upper, "povm": encode_povm(res.povm)}, []


def check_pguess(objs, payload, opts):
    s = objs[0]
    els = [decode_matrix(E) for E in payload["povm"]["elements"]]
    value = sum(px * np.trace(st.rho @ E).real for px, st, E in zip(s.probs, s.states, els))
    povm_err = max(float(np.max(np.abs(sum(els) - np.eye(s.dim)))),
                   max(max(0.0, -min_eigenvalue(E)) for E in els))
    return {"value_error": abs(value - payload["value"]), "povm_error": povm_err,
            "bracket_width": max(0.0, payload["upper_bound"] - value)}


def _bipartite(obj):
    if isinstance(obj, CqState):
        return obj.matrix(), len(obj), obj.dim
    return obj


def run_hmin(objs, opts):
    obj = _single(objs, "hmin", (CqState, tuple))
    rho, dr, dq = _bipartite(obj)
    value, sigma = hmin_sdp(rho, dr, dq)
    return "constructed", {"hmin": float(-np.log2(value)), "guessing_value": value, "dims": [dr, dq],
                           "sigma": encode_matrix(sigma)}, []


def check_hmin(objs, payload, opts):
    rho, dr, dq = _bipartite(objs[0])
    sigma = decode_matrix(payload["sigma"])
    gap = kron(np.eye(dr), sigma) - rho
    return {"sigma_feasibility_error": max(0.0, -min_eigenvalue((gap + gap.conj().T) / 2)),
            "trace_error": abs(np.trace(sigma).real - payload["guessing_value"]),
            "log_error": abs(-np.log2(payload["guessing_value"]) - payload["hmin"])}


def _morphism_refutation(N, N2, exc: NotLessNoisy, opts) -> dict:
    cause = exc.cause
    margin = getattr(cause, "margin", None)
    payload = {"kind": "quantum", "margin": margin, "reason": str(exc), "counterexample": None}
    found = pguess_dominance_falsify(N, N2, trials=opts["trials"], seed=opts["seed"])
    if found is not None:
        payload["counterexample"] = {"ensemble": encode_cq(found.ensemble), "pguess_n": found.pguess_n,
                                     "pguess_n2": found.pguess_n2, "advantage": found.advantage}
    return payload


def _check_morphism_refutation(N, N2, payload) -> dict:
    ce = payload.get("counterexample")
    if ce is None:
        return {}
    ens = decode_cq(ce["ensemble"])
    g1 = pguess_cq(_ensemble_outputs(N, ens)).value
    g2 = pguess_cq(_ensemble_outputs(N2, ens)).value
    return {"pguess_error": max(abs(g1 - ce["pguess_n"]), abs(g2 - ce["pguess_n2"])),
            "advantage_error": abs((g2 - g1) - ce["advantage"])}


def run_morphism(objs, opts):
    N, N2 = (_as_map(o) for o in _channels(objs, "morphism"))
    try:
        L = construct_morphism(N, N2)
    except NotLessNoisy as exc:
        return REFUTED, _morphism_refutation(N, N2, exc, opts), []
    return "constructed", {"kind": "quantum", "map": encode_channel(L),
                           "flags": {"hermitian_preserving": L.hermitian_preserving,
                                     "trace_preserving": L.trace_preserving,
                                     "completely_positive": L.completely_positive}}, []


def check_morphism(objs, payload, opts):
    N, N2 = (_as_map(o) for o in objs)
    if "map" not in payload:
        return _check_morphism_refutation(N, N2, payload)
    L = decode_channel(payload["map"])
    return {"agreement_error": basis_deviation(compose_maps(L, N), N2),
            "hermiticity_error": hermiticity_error(L.choi),
            "trace_preservation_error": _tp_error(L)}


def _extend(L, N, method):
    if method == "auto":
        try:
            return extend_commuting(L, N), "commuting"
        except OutputsDoNotCommute:
            return extend_teleport(L, N), "teleport"
    if method == "commuting":
        return extend_commuting(L, N), "commuting"
    return extend_teleport(L, N), "teleport"


def run_extend(objs, opts):
    L, N = (_as_map(o) for o in _channels(objs, "extend"))
    try:
        T, method = _extend(L, N, opts["method"])
    except (NotExtendable, MatchingInfeasible) as exc:
        cause = getattr(exc, "cause", exc)
        return REFUTED, {"reason": str(exc), "margin": getattr(cause, "margin", None),
                         "method": opts["method"]}, []
    except OutputsDoNotCommute as exc:
        raise UsageError(f"commuting extension needs commuting outputs: {exc}") from exc
    payload = {"map": encode_channel(T), "method": method}
    if method == "teleport":
        payload["teleport_identity_error"] = teleport_identity_error(teleport_kit(L.dim_out))
    return "constructed", payload, []


def check_extend(objs, payload, opts):
    L, N = (_as_map(o) for o in objs)
    if "map" not in payload:
        return {}
    return _cptp_residuals(decode_channel(payload["map"]), compose_maps(L, N), N)


def run_falsify(objs, opts):
    p, p2 = _channels(objs, "falsify")
    if isinstance(p, StochasticChannel) and isinstance(p2, StochasticChannel):
        found = shannon_less_noisy_falsify(p, p2, trials=opts["trials"], seed=opts["seed"])
        if found is None:
            return "not refuted", {"kind": "classical", "counterexample_prior": None}, \
                ["no counterexample found; this does not prove the less-noisy relation"]
        return REFUTED, {"kind": "classical", "counterexample_prior": encode_prior(found.prior),
                         "h_y": found.h_y, "h_z": found.h_z, "excess": found.excess}, []
    N, N2 = _as_map(p), _as_map(p2)
    found = pguess_dominance_falsify(N, N2, trials=opts["trials"], seed=opts["seed"])
    if found is None:
        return "not refuted", {"kind": "quantum", "counterexample": None}, \
            ["no counterexample found; this does not prove min-entropy dominance"]
    return REFUTED, {"kind": "quantum", "counterexample": {
        "ensemble": encode_cq(found.ensemble), "pguess_n": found.pguess_n, "pguess_n2": found.pguess_n2,
        "advantage": found.advantage}}, []


def check_falsify(objs, payload, opts):
    p, p2 = objs
    if payload["kind"] == "classical":
        if payload["counterexample_prior"] is None:
            return {}
        q = decode_prior(payload["counterexample_prior"])
        hy, hz = cond_shannon_entropy(q, p), cond_shannon_entropy(q, p2)
        return {"entropy_error": max(abs(hy - payload["h_y"]), abs(hz - payload["h_z"])),
                "excess_violation": max(0.0, -(hy - hz))}
    return _check_morphism_refutation(_as_map(p), _as_map(p2), payload)


def run_compare(objs, opts):
    p, p2 = _channels(objs, "compare")
    if isinstance(p, StochasticChannel) and isinstance(p2, StochasticChannel):
        fwd, rev = degradation_gap(p, p2), degradation_gap(p2, p)
        wf, wr = extract_witness_prior(p, p2), extract_witness_prior(p2, p)
        sh = shannon_less_noisy_falsify(p, p2, trials=opts["trials"], seed=opts["seed"])
        payload = {
            "kind": "classical",
            "forward": {"gap": fwd.gap, "degradable": fwd.gap <= opts["tol"], "witness_advantage": wf.advantage},
            "reverse": {"gap": rev.gap, "degradable": rev.gap <= opts["tol"], "witness_advantage": wr.advantage},
            "forward_degrader": encode_channel(fwd.degrader),
            "witness_prior": encode_prior(wf.prior),
            "shannon": {"refuted": sh is not None, "excess": None if sh is None else sh.excess},
        }
        if sh is not None:
            payload["counterexample_prior"] = encode_prior(sh.prior)
        return ("holds" if fwd.gap <= opts["tol"] else REFUTED), payload, []
    N, N2 = _as_map(p), _as_map(p2)
    out = {}
    for name, (A, B) in (("forward", (N, N2)), ("reverse", (N2, N))):
        try:
            construct_morphism(A, B)
            ok = True
        except NotLessNoisy:
            ok = False
        found = pguess_dominance_falsify(A, B, trials=opts["trials"], seed=opts["seed"])
        out[name] = {"min_entropy_less_noisy": ok,
                     "falsifier_advantage": None if found is None else found.advantage}
    return ("holds" if out["forward"]["min_entropy_less_noisy"] else REFUTED), {"kind": "quantum", **out}, []


def check_compare(objs, payload, opts):
    if payload["kind"] != "classical":
        return {}
    p, p2 = objs
    d = np.array(payload["forward_degrader"]["p"])
    q = decode_prior(payload["witness_prior"])
    adv = float(np.sum(q.q * p2.p.T)) - guessing_probability(q, p)
    return {"gap_error": abs(max(float((p2.p - p.p @ d).max()), 0.0) - payload["forward"]["gap"]),
            "advantage_error": abs(adv - payload["forward"]["witness_advantage"])}


ARITY = {"validate": None, "gap": 2, "degrade": 2, "witness": 2, "approx": 2, "pguess": 1, "hmin": 1,
         "morphism": 2, "extend": 2, "falsify": 2, "compare": 2}
RUNNERS = {v: globals()[f"run_{v}"] for v in VERBS}
CHECKERS = {v: globals()[f"check_{v}"] for v in VERBS}


def _digest(paths) -> tuple[list, str]:
    ds = [file_digest(p) for p in paths]
    return ds, hashlib.sha256("\n".join(ds).encode()).hexdigest()


def _limits(residuals: dict, tol: float) -> dict:
    return {k: RESIDUAL_LIMITS.get(k, tol) for k in residuals}


def _load_inputs(verb, paths):
    n = ARITY[verb]
    if (n is None and not paths) or (n is not None and len(paths) != n):
        raise UsageError(f"'{verb}' takes {n or 'one or more'} input file(s), got {len(paths)}")
    return [load_any(p) for p in paths]


def run(verb: str, paths, tol: float = DEFAULT_TOL, trials: int = 1000, seed: int = 0,
        method: str = "auto") -> Certificate:
    if verb not in RUNNERS:
        raise UsageError(f"unknown verb {verb!r}")
    opts = {"tol": tol, "trials": trials, "seed": seed, "method": method}
    objs = _load_inputs(verb, paths)
    decision, payload, notes = RUNNERS[verb](objs, opts)
    payload = _jsonable(payload)
    residuals = _jsonable(CHECKERS[verb](objs, payload, opts))
    digests, combined = _digest(paths)
    return Certificate(verb, digests, combined, decision, payload, residuals, _limits(residuals, tol),
                       {"trials": trials, "seed": seed, "method": method}, tol, notes=notes)


@dataclass
class VerifyResult:
    ok: bool
    problems: list


def verify(cert: Certificate, paths) -> VerifyResult:
    """Recompute the residuals of ``cert`` from its payload and the inputs."""
    problems = []
    digests, combined = _digest(paths)
    if combined != cert.inputs_digest:
        return VerifyResult(False, ["input digests do not match the certificate"])
    if cert.verb not in CHECKERS:
        return VerifyResult(False, problems + [f"unknown verb {cert.verb!r}"])
    opts = {"tol": cert.tol, **cert.options}
    objs = _load_inputs(cert.verb, paths)
    fresh = _jsonable(CHECKERS[cert.verb](objs, cert.payload, opts))
    for k in sorted(set(fresh) | set(cert.residuals)):
        if k not in fresh or k not in cert.residuals:
            problems.append(f"residual {k} missing")
            continue
        limit = cert.residual_limits.get(k, cert.tol)
        if abs(fresh[k] - cert.residuals[k]) > cert.tol:
            problems.append(f"residual {k}: recomputed {fresh[k]:.3e}, certificate says {cert.residuals[k]:.3e}")
        if fresh[k] > limit:
            problems.append(f"residual {k} = {fresh[k]:.3e} exceeds its limit {limit:.0e}")
    return VerifyResult(not problems, problems)


def _tolerance(arg: float | None) -> float:
    if arg is not None:
        return arg
    env = os.environ.get(TOL_ENV)
    if env is None:
        return DEFAULT_TOL
    try:
        val = float(env)
    except ValueError as exc:
        raise UsageError(f"{TOL_ENV}={env!r} is not a number") from exc
    if not val > 0 or not np.isfinite(val):
        raise UsageError(f"{TOL_ENV} must be a positive number")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="channel-order", description="Decide and certify orderings between noisy channels.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)
    helps = {
        "validate": "check input files against their schemas",
        "gap": "degradation gap of classical channel A into B",
        "degrade": "degrader of A into B, or a witness against it",
        "witness": "optimal witness prior against degradability",
        "approx": "variational error of the optimal approximate degrader",
        "pguess": "optimal guessing probability of a cq state",
        "hmin": "conditional min-entropy of a bipartite or cq state",
        "morphism": "Hermitian trace-preserving L with L o A = B",
        "extend": "CPTP T with T o N = L o N",
        "falsify": "search for an ensemble refuting that A is less noisy than B",
        "compare": "both-direction comparison report",
    }
    for verb in VERBS:
        p = sub.add_parser(verb, help=helps[verb])
        p.add_argument("inputs", nargs="+", metavar="FILE")
        _common(p)
        if verb == "extend":
            p.add_argument("--method", choices=("auto", "commuting", "teleport"), default="auto")
    p = sub.add_parser("verify", help="recompute the residuals of a certificate")
    p.add_argument("certificate", metavar="CERT")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    _common(p)
    return parser


def _common(p):
    p.add_argument("--tol", type=float, default=None, help=f"decision tolerance (default {DEFAULT_TOL:g}, "
                                                            f"or ${TOL_ENV})")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _tolerance(args.tol)
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        if args.verb == "verify":
            cert = Certificate.from_dict(read_json(args.certificate))
            res = verify(cert, args.inputs)
            report = {"verified": res.ok, "problems": res.problems, "verb": cert.verb}
            data = dumps(report).encode() if args.format == "json" else \
                ("verified\n" if res.ok else "".join(f"problem: {p}\n" for p in res.problems)).encode()
            _write(data, args.out)
            return EXIT_HOLDS if res.ok else EXIT_REFUTED
        cert = run(args.verb, args.inputs, tol=tol, trials=args.trials, seed=args.seed,
                   method=getattr(args, "method", "auto"))
        _write(emit_report(cert, args.format), args.out)
        return cert.exit_code
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChannelOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
