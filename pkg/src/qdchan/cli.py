"""Command-line front end.

Subcommands cover the whole pipeline: ``gen-channel`` draws a random
channel, ``decompose`` fits the generalized extreme mixture, ``synth``
emits the per-component circuit bundle, ``verify`` re-checks a
decomposition against its target channel, ``sample`` Monte-Carlo-runs
the randomized circuit implementation, and ``info`` prints the
parameter-count and gate-cost table.

All randomness flows from ``--seed`` through named substreams.  Exit
codes: 0 success, 2 invalid input, 3 best-effort result that missed the
requested tolerance, 4 I/O failure.
"""

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__, serialize
from ._backend import backend_name
from .ansatz import kappa, parameter_count
from .channels import ChoiState, DensityMatrix, ValidationError, kraus_to_choi, random_channel
from .circuits import cost_estimate, gate_counts, synthesize
from .decompose import OptimizerConfig, decompose_report, mixture_choi, optimize
from .linalg import haar_unitary, trace_distance
from .sampling import sample_channel

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4

_STREAMS = {"channel": 0, "optimize": 1, "sample": 2, "state": 3}


def _rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAMS[label],)))


def _manifest(command: str, args: dict, inputs: dict, outputs: list) -> dict:
    digests = {}
    for name, path in inputs.items():
        try:
            with open(path, "rb") as fh:
                digests[name] = {"path": str(path), "sha256": hashlib.sha256(fh.read()).hexdigest()}
        except OSError:
            digests[name] = {"path": str(path), "sha256": None}
    return {
        "command": command,
        "parameters": args,
        "inputs": digests,
        "outputs": [str(p) for p in outputs],
        "package_version": __version__,
        "kernel_backend": backend_name(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def _write_outputs(payload: dict, out_path: str, manifest: dict) -> None:
    try:
        serialize.dump(payload, out_path)
        serialize.dump(manifest, out_path + ".manifest.json")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def cmd_gen_channel(args) -> int:
    if args.dim < 2:
        raise ValidationError(f"dimension must be >= 2, got {args.dim}")
    env_dim = args.env_dim if args.env_dim else args.dim ** 2
    ch = random_channel(args.dim, env_dim, _rng(args.seed, "channel"))
    payload = serialize.channel_to_json(ch)
    manifest = _manifest("gen-channel",
                         {"dim": args.dim, "seed": args.seed, "env_dim": env_dim},
                         {}, [args.out])
    _write_outputs(payload, args.out, manifest)
    print(f"wrote random dim-{args.dim} channel (Kraus rank {ch.rank}) to {args.out}")
    return EXIT_OK


def _load_channel_choi(path: str) -> ChoiState:
    payload = serialize.load(path)
    if "kraus" in payload:
        return kraus_to_choi(serialize.channel_from_json(payload)).validate()
    return serialize.choi_from_json(payload)


def cmd_decompose(args) -> int:
    target = _load_channel_choi(getattr(args, "in"))
    cfg = OptimizerConfig(
        epsilon=args.epsilon,
        max_restarts=args.restarts,
        max_iters_per_restart=args.iters,
        seed=args.seed,
        terms=args.terms,
    )
    result = optimize(target, cfg)
    payload = serialize.decomposition_to_json(result)
    manifest = _manifest(
        "decompose",
        {"epsilon": args.epsilon, "seed": args.seed, "restarts": args.restarts,
         "iters": args.iters, "terms": args.terms},
        {"channel": getattr(args, "in")}, [args.out])
    _write_outputs(payload, args.out, manifest)
    status = "converged" if result.converged else "budget exhausted (best effort written)"
    print(f"trace distance {result.achieved_dt:.6g}  diamond bound {result.diamond_bound:.6g}  "
          f"restarts {result.restarts_used}  {status}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_synth(args) -> int:
    result = serialize.decomposition_from_json(serialize.load(getattr(args, "in")))
    params = result.params
    probs = params.probabilities()
    circuit_files = []
    census = []
    try:
        for i, comp in enumerate(params.components):
            circ = synthesize(comp)
            cpath = f"{args.out}.circuit{i}.json"
            serialize.dump(serialize.circuit_to_json(circ), cpath)
            with open(f"{args.out}.circuit{i}.txt", "w") as fh:
                fh.write(circ.text_listing() + "\n")
            circuit_files.append(cpath)
            census.append({k: v for k, v in gate_counts(circ).items() if k != "by_kind"})
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    bundle = {
        "dim": params.dim,
        "probabilities": [float(p) for p in probs],
        "circuits": circuit_files,
        "gate_census": census,
        "cost_estimate": cost_estimate(params.dim, max(min(result.diamond_bound, 0.5), 1e-6)),
    }
    manifest = _manifest("synth", {}, {"decomposition": getattr(args, "in")},
                         [args.out] + circuit_files)
    _write_outputs(bundle, args.out, manifest)
    print(f"wrote {len(circuit_files)} circuits; census per circuit: {census[0]}")
    return EXIT_OK


def cmd_verify(args) -> int:
    target = _load_channel_choi(getattr(args, "in"))
    result = serialize.decomposition_from_json(serialize.load(args.decomp))
    if result.params.dim != target.dim:
        raise ValidationError(
            f"dimension mismatch: channel {target.dim}, decomposition {result.params.dim}")
    approx = mixture_choi(result.params)
    dt = trace_distance(target.matrix, approx.matrix)
    report = decompose_report(result, target)
    report["recomputed_dt"] = dt
    report["distinguishing_probability"] = (1.0 + dt) / 2.0
    print(f"trace distance        {dt:.6g}")
    print(f"diamond bound         {2 * dt:.6g}")
    print(f"distinguishing prob.  {(1 + dt) / 2:.6g}")
    for i, comp in enumerate(report["components"]):
        cert = comp["certificate"]
        print(f"component {i}: p={comp['probability']:.4f}  {comp['extremality']}  "
              f"genext={cert['is_genext']} rank={cert['rank']} "
              f"chain_residual={cert['chain_residual']:.2e}")
    print(f"blockwise residual    {report['blockwise_residual']:.6g}")
    if args.out:
        manifest = _manifest("verify", {}, {"channel": getattr(args, "in"),
                                            "decomposition": args.decomp}, [args.out])
        _write_outputs(_jsonable(report), args.out, manifest)
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _state_preset(name: str, d: int, seed: int) -> DensityMatrix:
    if name == "maximally-mixed":
        return DensityMatrix(d, np.eye(d, dtype=complex) / d)
    if name == "zero":
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return DensityMatrix(d, m)
    if name == "random-pure":
        v = haar_unitary(d, _rng(seed, "state"))[:, 0]
        return DensityMatrix(d, np.outer(v, v.conj()))
    raise ValidationError(f"unknown state preset {name!r}")


def cmd_sample(args) -> int:
    result = serialize.decomposition_from_json(serialize.load(getattr(args, "in")))
    params = result.params
    rho = _state_preset(args.state, params.dim, args.seed)
    report = sample_channel(params, rho, args.shots, _rng(args.seed, "sample"))
    print(f"shots {report.shots}  deviation {report.deviation:.6g}  "
          f"counts {list(report.empirical_counts)}")
    if args.out:
        payload = {
            "shots": report.shots,
            "seed": args.seed,
            "state": args.state,
            "empirical_counts": list(report.empirical_counts),
            "deviation": report.deviation,
            "estimated_state": serialize.matrix_to_json(report.estimated_state.matrix),
            "exact_state": serialize.matrix_to_json(report.exact_state.matrix),
        }
        manifest = _manifest("sample", {"shots": args.shots, "seed": args.seed,
                                        "state": args.state},
                             {"decomposition": getattr(args, "in")}, [args.out])
        _write_outputs(payload, args.out, manifest)
    return EXIT_OK


def cmd_info(args) -> int:
    d = args.dim
    if d < 2:
        raise ValidationError(f"dimension must be >= 2, got {d}")
    cost = cost_estimate(d, args.epsilon)
    rows = [
        ("qudit dimension", d),
        ("unitary factors per component", kappa(d)),
        ("optimization parameters", parameter_count(d)),
        ("channel parameters (d^4 - d^2)", d ** 4 - d ** 2),
        ("continuous gates per circuit", cost["continuous_gates"]),
        ("compiled-gate estimate", cost["compiled_estimate"]),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdchan",
        description="Decompose qudit channels into mixtures of generalized extreme channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-channel", help="draw a random channel and write it as JSON")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--env-dim", type=int, default=None,
                   help="Kraus rank: d or d^2 (default d^2)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_channel)

    p = sub.add_parser("decompose", help="fit a generalized extreme mixture to a channel")
    p.add_argument("--in", required=True, help="channel or Choi JSON")
    p.add_argument("--epsilon", type=float, required=True,
                   help="diamond-norm tolerance; success needs trace distance <= epsilon/2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--terms", type=int, default=None,
                   help="number of mixture components (default: dim)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synth", help="emit the circuit bundle of a decomposition")
    p.add_argument("--in", required=True, help="decomposition JSON")
    p.add_argument("--out", required=True, help="bundle path prefix")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="re-check a decomposition against its channel")
    p.add_argument("--in", required=True, help="channel or Choi JSON")
    p.add_argument("--decomp", required=True, help="decomposition JSON")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="Monte-Carlo sample the randomized implementation")
    p.add_argument("--in", required=True, help="decomposition JSON")
    p.add_argument("--state", default="maximally-mixed",
                   choices=["maximally-mixed", "zero", "random-pure"])
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("info", help="parameter counts and gate-cost table")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except FileNotFoundError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (_IOFailure, OSError) as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
