"""Command-line surface: exp/log/curve diagnostics, coset reduction, Pell
and algebra oracles, and the blocking refuter with certificate output.

Exit codes: 0 success (or evasion certified), 2 refuter budget exhausted,
1 usage or parse errors.  Reports are deterministic for a fixed
configuration; LATBLOCK_CONFIG may point to a JSON file overriding the
defaults, and explicit flags override that.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from . import evade, lattice, quat, sl2
from .certificate import BudgetExceeded, frac_str
from .parsing import (ParseError, matrix_str, matrix_str_float, parse_matrix,
                      parse_quaternion, quaternion_str)


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything that pins a run: tolerances, sampling, budget, seed."""

    exact_eps: float = 1e-9
    block_eps: float = 1e-3
    sample_density: int = 10_000
    budget: int = 100
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self):
        if self.exact_eps <= 0 or self.block_eps <= 0:
            raise UsageError("tolerances must be positive")
        if self.sample_density <= 0 or self.budget <= 0:
            raise UsageError("density and budget must be positive")
        if self.fmt not in ("json", "csv", "text"):
            raise UsageError(f"unknown format {self.fmt!r}")


def load_config(env: dict | None = None) -> RunConfig:
    """Defaults, overridden by the JSON file named in LATBLOCK_CONFIG."""
    env = os.environ if env is None else env
    cfg = RunConfig()
    path = env.get("LATBLOCK_CONFIG")
    if path:
        with open(path) as fh:
            data = json.load(fh)
        known = {k: v for k, v in data.items() if k in RunConfig.__dataclass_fields__}
        cfg = replace(cfg, **known)
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="latblock", description=__doc__)
    parser.add_argument("--format", choices=("json", "csv", "text"), default=None)
    parser.add_argument("--epsilon", type=float, default=None,
                        help="blocking clearance tolerance (default 1e-3)")
    parser.add_argument("--exact-eps", type=float, default=None,
                        help="exactness comparison tolerance (default 1e-9)")
    parser.add_argument("--density", type=int, default=None,
                        help="curve samples per clearance check (default 10000)")
    parser.add_argument("--budget", type=int, default=None,
                        help="family members the refuter may try (default 100)")
    parser.add_argument("--seed", type=int, default=None,
                        help="recorded in reports; all searches are deterministic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exp", help="closed-form exponential of a traceless matrix")
    p.add_argument("--mat", required=True, help="tangent matrix 'a,b;c,d'")

    p = sub.add_parser("log", help="principal logarithm (trace >= 2)")
    p.add_argument("--mat", required=True, help="group element 'a,b;c,d'")

    p = sub.add_parser("curve", help="connecting-curve point (g*gamma)^t")
    p.add_argument("--mat", required=True, help="base element g")
    p.add_argument("--gamma", required=True, help="integer lattice element")
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("reduce", help="coset reduction to [[x,0],[z,1/x]]")
    p.add_argument("--mat", required=True)

    p = sub.add_parser("refute", help="defeat a candidate blocking set")
    p.add_argument("--mat", help="rational target matrix (integer-lattice mode)")
    p.add_argument("--quat", help="rational target quaternion x+yi (cocompact mode)")
    p.add_argument("--a", type=int, help="algebra parameter a (with --quat)")
    p.add_argument("--b", type=int, help="algebra parameter b (with --quat)")
    p.add_argument("--points", required=True, help="blocking points file")
    p.add_argument("--out", required=True, help="certificate output path")

    p = sub.add_parser("pell", help="fundamental Pell solution p^2 - d q^2 = 1")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--count", type=int, default=0, help="extra family members")

    p = sub.add_parser("algebra", help="division / split verdict for H^{a,b}")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--bound", type=int, default=200, help="split-witness search bound")
    return parser


def _branch_report(direction: sl2.LogDirection) -> dict:
    return {"branch": direction.branch, "omega": direction.omega}


def cmd_exp(args, cfg: RunConfig) -> dict:
    x = parse_matrix(args.mat, exact=False)
    result = sl2.exp_sl2(x, eps=cfg.exact_eps)
    disc = float(x.x) ** 2 + float(x.y) * float(x.z)
    branch = "hyperbolic" if disc > 0 else ("elliptic" if disc < 0 else "parabolic")
    return {
        "matrix": matrix_str_float(result),
        "branch": branch,
        "omega": math.sqrt(abs(disc)),
        "trace_class": sl2.trace_class(result.trace(), cfg.exact_eps).value,
    }


def cmd_log(args, cfg: RunConfig) -> dict:
    g = parse_matrix(args.mat, exact=False)
    direction = sl2.log_sl2(g, eps=cfg.exact_eps)
    report = {"matrix": matrix_str_float(direction.X),
              "trace_class": sl2.trace_class(g.trace(), cfg.exact_eps).value}
    report.update(_branch_report(direction))
    return report


def cmd_curve(args, cfg: RunConfig) -> dict:
    g = parse_matrix(args.mat)
    gamma = parse_matrix(args.gamma)
    if not lattice.is_in_gamma(gamma):
        raise UsageError("--gamma must be an integer matrix with determinant 1")
    point = sl2.curve_point(g, gamma, args.t, eps=cfg.exact_eps)
    target = (g * gamma).to_float()
    trace = target.trace()
    if trace <= -2.0:
        trace = -trace
    mt = sl2.ModifiedTime.from_time(args.t, trace)
    return {
        "matrix": matrix_str_float(point),
        "t": args.t,
        "lambda": mt.lam,
        "a_lambda": mt.a_lam,
        "trace": trace,
        "trace_class": sl2.trace_class(trace, cfg.exact_eps).value,
        "omega": math.acosh(trace / 2.0) if trace > 2 else 0.0,
    }


def cmd_reduce(args, cfg: RunConfig) -> dict:
    g1 = parse_matrix(args.mat)
    if g1.det() != 1:
        raise UsageError(f"determinant must be exactly 1, got {g1.det()}")
    rep = lattice.coset_reduce(g1)
    return {
        "matrix": matrix_str(rep.g),
        "gamma": matrix_str(rep.gamma),
        "x": frac_str(rep.x),
        "z": frac_str(rep.z),
    }


def _read_points(path: str, mode: str, algebra: quat.QuatAlgebra | None):
    points = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                if mode == "sl2":
                    points.append(parse_matrix(line, exact=False))
                else:
                    comps = parse_quaternion(line, exact=False)
                    points.append(quat.Quaternion(*comps, algebra))
            except ParseError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return points


def cmd_refute(args, cfg: RunConfig) -> tuple[int, dict]:
    if bool(args.mat) == bool(args.quat):
        raise UsageError("exactly one of --mat or --quat is required")
    try:
        if args.mat:
            target = lattice.coset_reduce(parse_matrix(args.mat))
            points = _read_points(args.points, "sl2", None)
            candidate = evade.BlockingCandidate(tuple(points), cfg.block_eps)
            cert = evade.refute_blocking(target, candidate, budget=cfg.budget,
                                         density=cfg.sample_density)
        else:
            if args.a is None or args.b is None:
                raise UsageError("--quat requires --a and --b")
            algebra = quat.QuatAlgebra(args.a, args.b)
            comps = parse_quaternion(args.quat)
            g = quat.Quaternion(*comps, algebra)
            points = _read_points(args.points, "quat", algebra)
            candidate = quat.QuatBlockingCandidate(tuple(points), cfg.block_eps)
            cert = quat.refute_blocking_quat(g, candidate, budget=cfg.budget,
                                             density=cfg.sample_density)
    except BudgetExceeded as exc:
        return 2, {
            "status": "budget-exceeded",
            "budget": exc.budget,
            "best_clearance": exc.best_clearance,
            "best_family_index": exc.best_index,
        }
    with open(args.out, "w") as fh:
        fh.write(cert.to_json())
    return 0, {
        "status": "evaded",
        "certificate": args.out,
        "gamma_index": cert.gamma_index,
        "t": cert.t,
        "min_clearance": min(cert.clearances) if cert.clearances else None,
    }


def cmd_pell(args, cfg: RunConfig) -> dict:
    fundamental = quat.pell_fundamental(args.d)
    report = {"d": args.d, "p": str(fundamental.p), "q": str(fundamental.q)}
    if args.count:
        family = quat.pell_family(fundamental, args.count)
        report["family"] = [{"p": str(s.p), "q": str(s.q)} for s in family]
    return report


def cmd_algebra(args, cfg: RunConfig) -> dict:
    verdict = quat.is_division_algebra(args.a, args.b, args.bound)
    report = {"a": args.a, "b": args.b, "verdict": verdict.kind}
    if verdict.witness is not None:
        report["witness"] = list(verdict.witness)
    if verdict.searched_bound is not None:
        report["searched_bound"] = verdict.searched_bound
    return report


def _emit(report: dict, fmt: str, stream) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2), file=stream)
    elif fmt == "csv":
        for key in sorted(report):
            print(f"{key},{json.dumps(report[key])}", file=stream)
    else:
        for key in sorted(report):
            print(f"{key}: {report[key]}", file=stream)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config()
        overrides = {}
        if args.epsilon is not None:
            overrides["block_eps"] = args.epsilon
        if args.exact_eps is not None:
            overrides["exact_eps"] = args.exact_eps
        if args.density is not None:
            overrides["sample_density"] = args.density
        if args.budget is not None:
            overrides["budget"] = args.budget
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.format is not None:
            overrides["fmt"] = args.format
        if overrides:
            cfg = replace(cfg, **overrides)

        if args.command == "refute":
            code, report = cmd_refute(args, cfg)
        else:
            handler = {
                "exp": cmd_exp, "log": cmd_log, "curve": cmd_curve,
                "reduce": cmd_reduce, "pell": cmd_pell, "algebra": cmd_algebra,
            }[args.command]
            code, report = 0, handler(args, cfg)
        report["seed"] = cfg.seed
        _emit(report, cfg.fmt, sys.stdout)
        return code
    except (UsageError, ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
