"""JSON serialisation of package objects.

Complex numbers encode as ``[re, im]`` pairs and matrices as row-major
nested lists of those pairs; see SCHEMAS.md at the repository root for
the full format reference.  Loading validates structure and re-checks
the object invariants so every emitted file re-validates on load.
"""

import json

import numpy as np

from .ansatz import ExtremeParams
from .channels import ChoiState, DensityMatrix, KrausChannel, ValidationError
from .circuits import CircuitDescription, GateOp
from .decompose import DecompositionParams, DecompositionResult

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "channel_to_json",
    "channel_from_json",
    "choi_to_json",
    "choi_from_json",
    "extreme_params_to_json",
    "extreme_params_from_json",
    "decomposition_to_json",
    "decomposition_from_json",
    "circuit_to_json",
    "circuit_from_json",
    "dump",
    "load",
]


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix payload: {exc}") from exc


def channel_to_json(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus_ops]}


def channel_from_json(payload: dict) -> KrausChannel:
    _require(payload, "dim", "kraus")
    ops = tuple(matrix_from_json(k) for k in payload["kraus"])
    return KrausChannel(int(payload["dim"]), ops).validate()


def choi_to_json(c: ChoiState) -> dict:
    return {"dim": c.dim, "matrix": matrix_to_json(c.matrix)}


def choi_from_json(payload: dict) -> ChoiState:
    _require(payload, "dim", "matrix")
    return ChoiState(int(payload["dim"]), matrix_from_json(payload["matrix"])).validate()


def extreme_params_to_json(p: ExtremeParams) -> dict:
    return {
        "dim": p.dim,
        "mux_angles": [[float(a), float(b)] for a, b in p.mux_angles],
        "prior": [list(map(float, row)) for row in p.prior_blocks],
        "posterior": [list(map(float, row)) for row in p.posterior_blocks],
    }


def extreme_params_from_json(payload: dict) -> ExtremeParams:
    _require(payload, "dim", "mux_angles", "prior", "posterior")
    return ExtremeParams(
        dim=int(payload["dim"]),
        mux_angles=np.array(payload["mux_angles"], dtype=float),
        prior_blocks=np.array(payload["prior"], dtype=float),
        posterior_blocks=np.array(payload["posterior"], dtype=float).reshape(
            -1, int(payload["dim"]) ** 2 - 1),
    )


def decomposition_to_json(res: DecompositionResult) -> dict:
    p = res.params
    return {
        "dim": p.dim,
        "probabilities": [float(q) for q in p.probabilities()],
        "logits": [float(v) for v in p.logits],
        "components": [extreme_params_to_json(c) for c in p.components],
        "achieved_dt": res.achieved_dt,
        "diamond_bound": res.diamond_bound,
        "converged": res.converged,
        "restarts_used": res.restarts_used,
        "trace": list(res.trace),
    }


def decomposition_from_json(payload: dict) -> DecompositionResult:
    _require(payload, "dim", "logits", "components", "achieved_dt", "converged")
    params = DecompositionParams(
        dim=int(payload["dim"]),
        logits=np.array(payload["logits"], dtype=float),
        components=tuple(extreme_params_from_json(c) for c in payload["components"]),
    )
    achieved = float(payload["achieved_dt"])
    return DecompositionResult(
        params=params,
        achieved_dt=achieved,
        diamond_bound=2.0 * achieved,
        converged=bool(payload["converged"]),
        restarts_used=int(payload.get("restarts_used", 0)),
        trace=tuple(payload.get("trace", ())),
    )


def _gate_to_json(g: GateOp) -> dict:
    rec = {"kind": g.kind, "levels": list(g.levels)}
    if g.wire is not None:
        rec["wire"] = g.wire
    if g.angle is not None:
        rec["angle"] = float(g.angle)
    if g.control is not None:
        rec["control"] = g.control
        rec["control_wire"] = g.control_wire
    if g.dit is not None:
        rec["dit"] = g.dit
    if g.phases:
        rec["phases"] = list(g.phases)
    return rec


def _gate_from_json(rec: dict) -> GateOp:
    return GateOp(
        kind=rec["kind"],
        wire=rec.get("wire"),
        levels=tuple(rec.get("levels", ())),
        angle=rec.get("angle"),
        control=rec.get("control"),
        control_wire=rec.get("control_wire"),
        dit=rec.get("dit"),
        phases=tuple(rec.get("phases", ())),
    )


def circuit_to_json(c: CircuitDescription) -> dict:
    return {
        "dim": c.dim,
        "wires": ["system", "ancilla"],
        "classical_dits": c.classical_dits,
        "gates": [_gate_to_json(g) for g in c.gates],
    }


def circuit_from_json(payload: dict) -> CircuitDescription:
    _require(payload, "dim", "gates")
    return CircuitDescription(int(payload["dim"]),
                              tuple(_gate_from_json(r) for r in payload["gates"]))


def _require(payload: dict, *keys):
    if not isinstance(payload, dict):
        raise ValidationError(f"expected a JSON object, got {type(payload).__name__}")
    missing = [k for k in keys if k not in payload]
    if missing:
        raise ValidationError(f"missing keys: {missing}")


def dump(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from exc
