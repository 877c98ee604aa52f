"""Command-line front end.

stdout carries JSON only; diagnostics go to stderr.  Exit codes: 0 success,
1 verification reported a failure, 2 invalid input, 3 resource cap hit,
4 algorithmic failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings

from .config import Config
from .errors import HKRealError, InputError
from .involution import (
    Involution,
    enumerate_involutions,
    is_real_homological_type,
    validate_involution,
)
from .lattice_core import Lattice, is_primitive_form, named_lattice, signature, validate_lattice
from .moves import NORMALIZE, PERTURB, RETARGET, ROTATE, MoveParams, apply_move
from .period_domain import RealTriple, validate_triple
from .planner import Trace, plan_path, verify_trace


def _read_json(arg: str):
    """JSON from a file path, or the argument itself parsed as JSON."""
    if os.path.isfile(arg):
        with open(arg) as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot read JSON from {arg!r}: {exc}") from exc


def load_lattice(arg: str) -> Lattice:
    if not os.path.isfile(arg):
        try:
            return named_lattice(arg)
        except InputError:
            pass
    data = _read_json(arg)
    if isinstance(data, dict):
        if "gram" not in data:
            raise InputError("lattice JSON needs a 'gram' field")
        return Lattice.from_dict(data)
    return validate_lattice(data)


def load_involution(lat: Lattice, arg: str) -> Involution:
    data = _read_json(arg)
    matrix = data.get("matrix") if isinstance(data, dict) else data
    if matrix is None:
        raise InputError("involution JSON needs a 'matrix' field")
    return validate_involution(lat, matrix)


def load_triple(arg: str) -> RealTriple:
    data = _read_json(arg)
    if not isinstance(data, dict):
        raise InputError("triple JSON must be an object")
    return RealTriple.from_dict(data)


def _parse_vector(text: str) -> list:
    text = text.strip()
    if text.startswith("["):
        return list(_read_json(text))
    return [float(x) if any(ch in x for ch in ".eE") else int(x) for x in text.split(",")]


def _config(args) -> Config:
    return Config(
        tol=args.tol,
        terminal_tol=args.terminal_tol,
        delta=args.delta,
        coeff_bound=args.coeff_bound,
        entry_bound=args.entry_bound,
        seed=args.seed,
        max_retries=args.max_retries,
        force=args.force,
    )


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# --- subcommands --------------------------------------------------------------

def cmd_signature(args) -> int:
    lat = load_lattice(args.lattice)
    _emit({
        "rank": lat.rank,
        "sig": list(signature(lat)),
        "primitive": is_primitive_form(lat, args.convention),
        "convention": args.convention,
    })
    return 0


def cmd_classify(args) -> int:
    lat = load_lattice(args.lattice)
    c = load_involution(lat, args.involution)
    _emit(is_real_homological_type(lat, c).to_dict())
    return 0


def cmd_enumerate(args) -> int:
    lat = load_lattice(args.lattice)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        invs = enumerate_involutions(lat, args.entry_bound)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows = []
    for c in invs:
        entry = {"matrix": [list(r) for r in c.matrix]}
        entry.update(is_real_homological_type(lat, c).to_dict())
        rows.append(entry)
    n_rht = sum(r["is_rht"] for r in rows)
    _emit({
        "entry_bound": args.entry_bound,
        "complete": not caught,
        "total": len(rows),
        "counts": {"rht": n_rht, "non_rht": len(rows) - n_rht},
        "involutions": rows,
    })
    return 0


_KINDS = {"rotate": ROTATE, "perturb": PERTURB, "retarget": RETARGET, "normalize": NORMALIZE}


def cmd_move(args) -> int:
    cfg = _config(args)
    lat = load_lattice(args.lattice)
    c = load_involution(lat, args.involution)
    split = is_real_homological_type(lat, c).split
    t = load_triple(args.triple)
    if args.params:
        move = MoveParams.from_dict(_read_json(args.params))
    else:
        if args.kind is None:
            raise InputError("give --kind or --params")
        move = MoveParams(
            kind=_KINDS[args.kind],
            theta=args.theta,
            delta=cfg.delta,
            seed=cfg.seed,
            new_gamma=_parse_vector(args.new_gamma) if args.new_gamma else None,
            coeff_bound=cfg.coeff_bound,
            force=cfg.force,
        )
    after = apply_move(lat, split, t, move, cfg.tol)
    report = validate_triple(lat, split, after, cfg.tol)
    certified = report.passed and not move.force
    _emit({
        "move": move.to_dict(),
        "triple_before": t.to_dict(),
        "triple_after": after.to_dict(),
        "certified": certified,
        "checks": report.to_dict(),
    })
    return 0


def cmd_plan(args) -> int:
    cfg = _config(args)
    lat = load_lattice(args.lattice)
    c = load_involution(lat, args.involution)
    split = is_real_homological_type(lat, c).split
    t0 = load_triple(args.triple)
    target = _parse_vector(args.target)
    if args.batch is None:
        trace = plan_path(lat, c, split, t0, target, cfg)
        _emit(trace.to_dict())
        if not trace.success:
            print("error: plan did not reach the target with a fully certified trace",
                  file=sys.stderr)
        return 0 if trace.success else 4
    runs = []
    for k in range(args.batch):
        run_cfg = Config(**{**cfg.to_dict(), "seed": cfg.seed + k})
        try:
            trace = plan_path(lat, c, split, t0, target, run_cfg)
            ok = trace.success and verify_trace(lat, c, split, trace).passed
            runs.append({"seed": run_cfg.seed, "success": ok,
                         "final_gamma_error": trace.final_gamma_error, "moves": trace.moves})
        except HKRealError as exc:
            if exc.exit_code == 2:
                raise
            runs.append({"seed": run_cfg.seed, "success": False, "error": type(exc).__name__})
    n_ok = sum(r["success"] for r in runs)
    _emit({"total": len(runs), "successes": n_ok, "runs": runs})
    return 0 if n_ok == len(runs) else 4


def cmd_verify(args) -> int:
    lat = load_lattice(args.lattice)
    c = load_involution(lat, args.involution)
    split = is_real_homological_type(lat, c).split
    data = _read_json(args.trace)
    if not isinstance(data, dict):
        raise InputError("trace JSON must be an object")
    trace = Trace.from_dict(data)
    report = verify_trace(lat, c, split, trace, args.tol, args.terminal_tol)
    _emit(report.to_dict())
    for msg in report.messages:
        print(f"verify: {msg}", file=sys.stderr)
    return 0 if report.passed else 1


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    d = Config()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=d.tol)
    common.add_argument("--terminal-tol", type=float, default=d.terminal_tol)
    common.add_argument("--delta", type=float, default=d.delta)
    common.add_argument("--coeff-bound", type=int, default=d.coeff_bound)
    common.add_argument("--entry-bound", type=int, default=d.entry_bound)
    common.add_argument("--seed", type=int, default=d.seed)
    common.add_argument("--max-retries", type=int, default=d.max_retries)
    common.add_argument("--force", action="store_true",
                        help="allow move 3 on non-generic periods (marks steps uncertified)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hkreal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signature", parents=[common], help="inertia indices and primitivity")
    p.add_argument("lattice", help="JSON file, JSON literal, or built-in name (U, E8(-1), K3, diag(...))")
    p.add_argument("--convention", choices=["bilinear", "polynomial"], default="bilinear")
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("classify", parents=[common], help="eigenlattices of an involution")
    p.add_argument("lattice")
    p.add_argument("involution")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("enumerate", parents=[common], help="all involutions with bounded entries")
    p.add_argument("lattice")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("move", parents=[common], help="apply one elementary move")
    p.add_argument("lattice")
    p.add_argument("involution")
    p.add_argument("triple")
    p.add_argument("--kind", choices=sorted(_KINDS))
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--new-gamma")
    p.add_argument("--params", help="MoveParams JSON (file or literal)")
    p.set_defaults(func=cmd_move)

    p = sub.add_parser("plan", parents=[common], help="six-move path to a target class")
    p.add_argument("lattice")
    p.add_argument("involution")
    p.add_argument("triple")
    p.add_argument("--target", required=True, help="integer vector, e.g. 0,2,1,0")
    p.add_argument("--batch", type=int, help="run N instances with seeds seed..seed+N-1")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", parents=[common], help="re-check a trace")
    p.add_argument("lattice")
    p.add_argument("involution")
    p.add_argument("trace")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except HKRealError as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=sys.stderr)
        _emit({"error": name, "message": str(exc)})
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
