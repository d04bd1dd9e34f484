"""Command-line interface: ``spinbrach {solve,evolve,trajectory,reach,verify}``.

Exit codes: 0 success, 1 input error, 2 unreachable by search,
3 structurally unreachable, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from .brachistochrone import optimize_field, speed_limit_bound
from .errors import SpinBrachError, UnreachableBySearchError
from .propagator import evolve, evolve_many
from .reachability import classify_target
from .spin_algebra import FieldDirection, StateVector, fidelity
from .subspace import orthonormal_span, projection_residual
from .verification import RunConfig, all_passed, run_all

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNREACHABLE_SEARCH = 2
EXIT_UNREACHABLE = 3
EXIT_VERIFY_FAILED = 4

TRAJECTORY_HEADER = ["t", "omega_t", "re0", "im0", "re1", "im1", "re2", "im2", "fidelity_final"]


class InputError(Exception):
    """Malformed command-line input; the message names the offending field."""


def _load_json(text: str, what: str):
    raw = text.strip()
    if not raw.startswith("{") and os.path.isfile(raw):
        with open(raw) as fh:
            raw = fh.read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc.msg})") from None


def parse_state(text: str, what: str) -> StateVector:
    """Parse ``{"components": [[re, im], [re, im], [re, im]]}`` (inline or a file path)."""
    obj = _load_json(text, what)
    if not isinstance(obj, dict) or "components" not in obj:
        raise InputError(f"{what}: missing 'components'")
    comps = obj["components"]
    if not isinstance(comps, list) or len(comps) != 3:
        raise InputError(f"{what}.components: expected a list of 3 [re, im] pairs")
    values = []
    for k, pair in enumerate(comps):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise InputError(f"{what}.components[{k}]: expected [re, im] numbers")
        if not all(math.isfinite(x) for x in pair):
            raise InputError(f"{what}.components[{k}]: non-finite value")
        values.append(complex(pair[0], pair[1]))
    try:
        return StateVector(values)
    except SpinBrachError as exc:
        raise InputError(f"{what}: {exc}") from None


def parse_direction(text: str, what: str, degrees: bool = False) -> FieldDirection:
    obj = _load_json(text, what)
    if not isinstance(obj, dict):
        raise InputError(f"{what}: expected an object with 'theta' and 'phi'")
    angles = []
    for key in ("theta", "phi"):
        if key not in obj:
            raise InputError(f"{what}.{key}: missing")
        val = obj[key]
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
            raise InputError(f"{what}.{key}: expected a finite number")
        angles.append(math.radians(val) if degrees else float(val))
    try:
        return FieldDirection(*angles)
    except SpinBrachError as exc:
        raise InputError(f"{what}: {exc}") from None


def state_to_json(state: StateVector) -> dict:
    return {"components": [[float(c.real), float(c.imag)] for c in state.components]}


def _parse_grid(text: str):
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be 'T,P' integers, got {text!r}") from None
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"grid must be 'T,P', got {text!r}")
    return tuple(parts)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta-omega", type=float, default=2.0, help="level spacing (default 2, so omega = 1)")
    p.add_argument("--tolerance", type=float, default=1e-9, help="infidelity tolerance (default 1e-9)")
    p.add_argument("--samples", type=int, default=1001, help="trajectory samples (default 1001)")
    p.add_argument("--grid", type=_parse_grid, default=(181, 360), help="search grid T,P (default 181,360)")
    p.add_argument("--format", choices=("json", "csv"), default=None, dest="output_format")
    p.add_argument("--degrees", action="store_true", help="direction angles are given in degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinbrach", description="Time-optimal control of spin 1 in a fixed-magnitude field.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal field direction and passage time")
    p.add_argument("--initial", required=True, help="initial state as JSON or a JSON file")
    p.add_argument("--final", required=True, help="final state as JSON or a JSON file")
    _common(p)

    p = sub.add_parser("evolve", help="evolve a state for time t")
    p.add_argument("--initial", required=True)
    p.add_argument("--direction", required=True, help='{"theta": ..., "phi": ...}')
    p.add_argument("--time", type=float, required=True)
    _common(p)

    p = sub.add_parser("trajectory", help="sample an evolution on [0, t_end]")
    p.add_argument("--initial", required=True)
    p.add_argument("--direction", required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--span-final", default=None, help="final state; adds the span residual column")
    _common(p)

    p = sub.add_parser("reach", help="reachability of a target from (0, 0, 1)")
    p.add_argument("--final", required=True)
    _common(p)

    p = sub.add_parser("verify", help="run the reproduction checks")
    _common(p)
    return parser


def _config(args) -> RunConfig:
    try:
        return RunConfig(args.delta_omega, args.tolerance, args.samples, tuple(args.grid),
                         args.output_format or "json")
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(obj: dict, fmt: str, out) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in _flatten(obj):
            w.writerow([k, _fmt(v) if isinstance(v, float) else v])
    else:
        json.dump(obj, out, indent=2)
        out.write("\n")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def cmd_solve(args, cfg: RunConfig, out) -> int:
    psi_i = parse_state(args.initial, "initial")
    psi_f = parse_state(args.final, "final")
    try:
        res = optimize_field(psi_i, psi_f, cfg.delta_omega, cfg.grid, cfg.tolerance)
    except UnreachableBySearchError as exc:
        _emit({"error": "unreachable_by_search", "message": str(exc),
               "best_infidelity": exc.best_infidelity}, cfg.output_format, out)
        return EXIT_UNREACHABLE_SEARCH
    body = res.to_dict()
    body["near_optimal"] = [{"theta": th, "phi": ph, "t": t} for th, ph, t in res.near_optimal]
    body["final_state"] = state_to_json(evolve(psi_i, res.direction, cfg.omega, res.t_star))
    _emit(body, cfg.output_format, out)
    return EXIT_OK


def cmd_evolve(args, cfg: RunConfig, out) -> int:
    psi_i = parse_state(args.initial, "initial")
    direction = parse_direction(args.direction, "direction", args.degrees)
    if not (math.isfinite(args.time) and args.time >= 0):
        raise InputError("time: must be a finite nonnegative number")
    psi = evolve(psi_i, direction, cfg.omega, args.time)
    if cfg.output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER[:-1])
        w.writerow([_fmt(args.time), _fmt(cfg.omega * args.time)]
                   + [_fmt(x) for c in psi.components for x in (c.real, c.imag)])
        return EXIT_OK
    body = state_to_json(psi)
    body.update({"t": args.time, "omega_t": cfg.omega * args.time, "t_delta_omega": args.time * cfg.delta_omega})
    _emit(body, "json", out)
    return EXIT_OK


def cmd_trajectory(args, cfg: RunConfig, out) -> int:
    psi_i = parse_state(args.initial, "initial")
    direction = parse_direction(args.direction, "direction", args.degrees)
    if not (math.isfinite(args.t_end) and args.t_end > 0):
        raise InputError("t-end: must be a finite positive number")
    final = parse_state(args.span_final, "span-final") if args.span_final else None
    basis = None
    if final is not None:
        try:
            basis = orthonormal_span(psi_i, final)
        except SpinBrachError as exc:
            raise InputError(f"span-final: {exc}") from None
    times = np.linspace(0.0, args.t_end, cfg.samples)
    rows = evolve_many(psi_i, direction, cfg.omega * times)
    states = [StateVector(r, normalize=True) for r in rows]
    ref = final if final is not None else states[-1]
    records = []
    for t, s in zip(times, states):
        rec = {"t": float(t), "omega_t": float(cfg.omega * t), "state": s, "fidelity_final": fidelity(ref, s)}
        if basis is not None:
            rec["residual"] = projection_residual(s, basis)
        records.append(rec)

    if (args.output_format or "csv") == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER + (["residual"] if basis is not None else []))
        for rec in records:
            row = [_fmt(rec["t"]), _fmt(rec["omega_t"])]
            row += [_fmt(x) for c in rec["state"].components for x in (c.real, c.imag)]
            row.append(_fmt(rec["fidelity_final"]))
            if basis is not None:
                row.append(_fmt(rec["residual"]))
            w.writerow(row)
    else:
        payload = []
        for rec in records:
            item = {k: v for k, v in rec.items() if k != "state"}
            item.update(state_to_json(rec["state"]))
            payload.append(item)
        json.dump({"samples": payload}, out, indent=2)
        out.write("\n")
    return EXIT_OK


def cmd_reach(args, cfg: RunConfig, out) -> int:
    psi_f = parse_state(args.final, "final")
    rep = classify_target(psi_f, cfg.delta_omega, cfg.tolerance)
    body = rep.to_dict()
    body["speed_limit"] = speed_limit_bound(StateVector.basis(-1), psi_f, cfg.delta_omega)
    _emit(body, cfg.output_format, out)
    return EXIT_OK if rep.reachable else EXIT_UNREACHABLE


def cmd_verify(args, cfg: RunConfig, out) -> int:
    fmt = args.output_format
    if fmt == "json":
        results = run_all(cfg)
        json.dump({"passed": all_passed(results), "checks": [r.to_dict() for r in results]}, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        results = run_all(cfg)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name", "expected", "source", "measured", "tolerance", "status", "note"])
        for r in results:
            status = "info" if r.passed is None else ("pass" if r.passed else "fail")
            w.writerow([r.name, r.expected, r.source, r.measured,
                        "" if r.tolerance is None else _fmt(r.tolerance), status, r.note])
    else:
        def show(r):
            out.write(r.line() + "\n")
            out.flush()

        results = run_all(cfg, progress=show)
        out.write(("ALL CHECKS PASSED" if all_passed(results) else "SOME CHECKS FAILED") + "\n")
    return EXIT_OK if all_passed(results) else EXIT_VERIFY_FAILED


COMMANDS = {
    "solve": cmd_solve,
    "evolve": cmd_evolve,
    "trajectory": cmd_trajectory,
    "reach": cmd_reach,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg, out)
    except (InputError, SpinBrachError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
