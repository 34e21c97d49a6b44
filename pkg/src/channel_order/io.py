"""JSON encodings shared by the CLI and certificates.

Matrices are ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major
order.  Channels carry a ``"kind"`` of ``"classical"`` or ``"quantum"``;
quantum maps may be given by a Choi matrix or by Kraus operators.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .classical import JointPrior, StochasticChannel
from .errors import ParseError, ValidationError
from .maps import OperatorMap
from .states import CqState, DensityOperator, Povm


def encode_matrix(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "data": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def decode_matrix(obj, where: str = "matrix") -> np.ndarray:
    if isinstance(obj, list):
        # plain nested list of reals, accepted for convenience
        try:
            M = np.array(obj, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{where}: nested list is not a real matrix") from exc
        if M.ndim != 2:
            raise ValidationError(f"{where}: expected a 2-d list, got {M.ndim} dimensions")
        return M.astype(complex)
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ValidationError(f"{where}: matrix needs 'rows', 'cols' and 'data'")
    r, c, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(r, int) and isinstance(c, int)) or r < 0 or c < 0:
        raise ValidationError(f"{where}: 'rows' and 'cols' must be nonnegative integers")
    if not isinstance(data, list) or len(data) != r * c:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise ValidationError(f"{where}: expected {r * c} entries, got {got}")
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: entries must be [re, im] pairs of numbers") from exc
    if arr.shape != (r * c, 2):
        raise ValidationError(f"{where}: entries must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{where}: entries must be finite")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(r, c)


def _real_rows(obj, where: str) -> np.ndarray:
    try:
        M = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: expected a list of rows of numbers") from exc
    if M.ndim != 2:
        raise ValidationError(f"{where}: expected a list of rows of equal length")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{where}: entries must be finite")
    return M


def encode_channel(ch) -> dict:
    if isinstance(ch, StochasticChannel):
        return {"kind": "classical", "p": ch.p.tolist()}
    return {"kind": "quantum", "dim_in": ch.dim_in, "dim_out": ch.dim_out, "choi": encode_matrix(ch.choi)}


def encode_prior(q: JointPrior) -> dict:
    return {"q": q.q.tolist()}


def encode_povm(povm: Povm) -> dict:
    return {"elements": [encode_matrix(E) for E in povm]}


def encode_cq(s: CqState) -> dict:
    return {"kind": "cq", "p": s.probs.tolist(), "states": [encode_matrix(st.rho) for st in s.states]}


def decode_channel(obj, where: str = "channel"):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    if "verb" in obj and isinstance(obj.get("payload"), dict) and "map" in obj["payload"]:
        # certificates that carry a constructed map can be chained
        return decode_channel(obj["payload"]["map"], f"{where}: payload.map")
    kind = obj.get("kind")
    if kind == "classical":
        if "p" not in obj:
            raise ValidationError(f"{where}: classical channel needs 'p'")
        P = _real_rows(obj["p"], f"{where}: p")
        try:
            return StochasticChannel(P)
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
    if kind == "quantum":
        if "kraus" in obj:
            ks = [decode_matrix(K, f"{where}: kraus[{i}]") for i, K in enumerate(obj["kraus"])]
            L = OperatorMap.from_kraus(ks)
        elif "choi" in obj:
            d_in, d_out = obj.get("dim_in"), obj.get("dim_out")
            if not (isinstance(d_in, int) and isinstance(d_out, int)) or d_in < 1 or d_out < 1:
                raise ValidationError(f"{where}: quantum map needs positive integer 'dim_in' and 'dim_out'")
            L = OperatorMap(d_in, d_out, decode_matrix(obj["choi"], f"{where}: choi"))
        else:
            raise ValidationError(f"{where}: quantum map needs 'choi' or 'kraus'")
        if "kraus" in obj and not L.trace_preserving:
            raise ValidationError(f"{where}: Kraus operators do not satisfy sum K^dag K = 1")
        return L
    raise ValidationError(f"{where}: unknown channel kind {kind!r} (expected 'classical' or 'quantum')")


def decode_prior(obj, where: str = "prior") -> JointPrior:
    if not isinstance(obj, dict) or "q" not in obj:
        raise ValidationError(f"{where}: prior needs 'q'")
    Q = _real_rows(obj["q"], f"{where}: q")
    try:
        return JointPrior(Q)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def decode_povm(obj, where: str = "povm") -> Povm:
    if not isinstance(obj, dict) or not isinstance(obj.get("elements"), list):
        raise ValidationError(f"{where}: POVM needs a list 'elements'")
    els = [decode_matrix(E, f"{where}: elements[{i}]") for i, E in enumerate(obj["elements"])]
    try:
        return Povm(els)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def decode_cq(obj, where: str = "cq") -> CqState:
    if not isinstance(obj, dict) or "p" not in obj or not isinstance(obj.get("states"), list):
        raise ValidationError(f"{where}: cq state needs 'p' and a list 'states'")
    states = []
    for i, S in enumerate(obj["states"]):
        try:
            states.append(DensityOperator(decode_matrix(S, f"{where}: states[{i}]")))
        except ValidationError as exc:
            raise ValidationError(f"{where}: states[{i}]: {exc}") from exc
    try:
        return CqState(np.array(obj["p"], dtype=float), tuple(states))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def decode_bipartite(obj, where: str = "state"):
    """``{"kind": "bipartite", "dims": [dR, dQ], "rho": matrix}`` -> ``(rho, dR, dQ)``."""
    dims = obj.get("dims") if isinstance(obj, dict) else None
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(k, int) and k > 0 for k in dims)):
        raise ValidationError(f"{where}: bipartite state needs 'dims' = [dR, dQ]")
    rho = decode_matrix(obj.get("rho"), f"{where}: rho")
    try:
        DensityOperator(rho)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    if rho.shape != (dims[0] * dims[1],) * 2:
        raise ValidationError(f"{where}: rho has shape {rho.shape}, dims give {dims[0] * dims[1]}")
    return rho, dims[0], dims[1]


def read_json(path) -> object:
    """Parse a JSON file; syntax errors report line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _reject_constant(name):
    raise json.JSONDecodeError(f"non-finite number {name} is not allowed", name, 0)


def _row_line(path: Path, obj, key: str, row: int) -> int | None:
    """Best-effort source line of ``obj[key][row]`` for diagnostics."""
    try:
        text = path.read_text()
    except OSError:
        return None
    at = text.find(f'"{key}"')
    if at < 0:
        return None
    depth, seen = 0, -1
    for i in range(at, len(text)):
        ch = text[i]
        if ch == "[":
            depth += 1
            if depth == 2:
                seen += 1
                if seen == row:
                    return text.count("\n", 0, i) + 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return None
    return None


def load_channel(path):
    path = Path(path)
    obj = read_json(path)
    try:
        return decode_channel(obj, str(path))
    except ValidationError as exc:
        msg = str(exc)
        if isinstance(obj, dict) and obj.get("kind") == "classical" and "row " in msg:
            row = int(msg.split("row ")[1].split()[0])
            line = _row_line(path, obj, "p", row)
            if line is not None:
                raise ValidationError(f"{path}:{line}: {msg.split(': ', 1)[-1]}") from exc
        raise


def load_prior(path) -> JointPrior:
    return decode_prior(read_json(path), str(path))


def load_povm(path) -> Povm:
    return decode_povm(read_json(path), str(path))


def load_cq(path) -> CqState:
    return decode_cq(read_json(path), str(path))


def load_any(path):
    """Dispatch on the shape of the JSON document."""
    path = Path(path)
    obj = read_json(path)
    where = str(path)
    if isinstance(obj, dict):
        kind = obj.get("kind")
        if kind in ("classical", "quantum") or "verb" in obj:
            return load_channel(path)
        if kind == "cq":
            return decode_cq(obj, where)
        if kind == "bipartite":
            return decode_bipartite(obj, where)
        if "elements" in obj:
            return decode_povm(obj, where)
        if "q" in obj:
            return decode_prior(obj, where)
    raise ValidationError(f"{where}: unrecognized document (no known 'kind' or fields)")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"

