"""Command line front end.

Subcommands:
  check    well-posedness report for a problem config
  solve    minimize the energy and report interface positions
  profile  sample a converged profile to CSV (plus fronts.csv)
  dump     echo the parsed config in normalized form

Configs are JSON objects with keys "temperatures" (n+2 values),
"diffusivities" (n+1), "conductivities" (n+1), "stefan_numbers" (n)
and an optional "solver" object whose keys mirror SolveOptions.
Numbers are printed with shortest round-trip formatting, so dumped
configs re-parse bit for bit.

Exit codes: 0 success (solve: Converged; check: coercive), 1 bad input
or unwritable output, 2 check found a non-coercive problem, 3 solve
Diverged, 4 solve stopped at the iteration limit.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from typing import Optional, Tuple

import numpy as np

from .energy import ProblemSpec, check_wellposedness
from .optimize import SolveOptions, SolveStatus, minimize
from .solution import assemble, evaluate_profile, validate

__all__ = ["main", "load_config", "ConfigError"]

_ARRAY_KEYS = ("temperatures", "diffusivities", "conductivities", "stefan_numbers")
_SOLVER_KEYS = ("grad_tol", "max_iter", "xi_max", "boundary_fraction", "damping_min")
_VALIDATE_SAMPLES = 33

_EXIT_BY_STATUS = {
    SolveStatus.CONVERGED: 0,
    SolveStatus.DIVERGED: 3,
    SolveStatus.MAX_ITERATIONS: 4,
}


class ConfigError(ValueError):
    pass


def _require_number_list(raw: dict, key: str) -> list:
    value = raw.get(key)
    if not isinstance(value, list) or not value:
        raise ConfigError(f"key '{key}' must be a non-empty array of numbers")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"key '{key}' must contain only numbers")
        if math.isnan(item) or math.isinf(item):
            raise ConfigError(f"key '{key}' must contain only finite numbers")
        out.append(float(item))
    return out


def load_config(path: str) -> Tuple[ProblemSpec, SolveOptions]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    for key in _ARRAY_KEYS:
        if key not in raw:
            raise ConfigError(f"missing key '{key}'")
    temps = _require_number_list(raw, "temperatures")
    diff = _require_number_list(raw, "diffusivities")
    cond = _require_number_list(raw, "conductivities")
    stefs = _require_number_list(raw, "stefan_numbers")

    n = len(stefs)
    if len(temps) != n + 2:
        raise ConfigError(
            f"key 'temperatures' must hold {n + 2} values for {n} interface(s), got {len(temps)}"
        )
    if len(diff) != n + 1:
        raise ConfigError(
            f"key 'diffusivities' must hold {n + 1} values for {n} interface(s), got {len(diff)}"
        )
    if len(cond) != n + 1:
        raise ConfigError(
            f"key 'conductivities' must hold {n + 1} values for {n} interface(s), got {len(cond)}"
        )
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise ConfigError("key 'temperatures' must be strictly increasing")
    if any(v <= 0 for v in diff):
        raise ConfigError("key 'diffusivities' must be positive")
    if any(v <= 0 for v in cond):
        raise ConfigError("key 'conductivities' must be positive")
    spec = ProblemSpec(u=tuple(temps), a=tuple(diff), k=tuple(cond), d=tuple(stefs))

    opts = SolveOptions()
    solver = raw.get("solver")
    if solver is not None:
        if not isinstance(solver, dict):
            raise ConfigError("key 'solver' must be an object")
        for key in solver:
            if key not in _SOLVER_KEYS:
                raise ConfigError(f"unknown solver key '{key}'")
        fields = {}
        for key, value in solver.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"solver key '{key}' must be a number")
            fields[key] = int(value) if key == "max_iter" else float(value)
        try:
            opts = dataclasses.replace(opts, **fields)
        except ValueError as exc:
            raise ConfigError(f"key 'solver': {exc}") from exc
    return spec, opts


def _report_dict(spec: ProblemSpec) -> dict:
    rep = check_wellposedness(spec)
    return {
        "S_upper": list(rep.S_upper),
        "S_lower": list(rep.S_lower),
        "convexity_margins": list(rep.convexity_margins),
        "coercive": rep.coercive,
        "unique_solution_guaranteed": rep.strictly_convex_sufficient,
        "borderline": rep.borderline,
    }


def cmd_check(args) -> int:
    spec, _ = load_config(args.config)
    report = _report_dict(spec)
    print(json.dumps(report, indent=2))
    return 0 if report["coercive"] else 2


def _apply_overrides(opts: SolveOptions, args) -> SolveOptions:
    fields = {}
    if args.grad_tol is not None:
        fields["grad_tol"] = args.grad_tol
    if args.max_iter is not None:
        fields["max_iter"] = args.max_iter
    if not fields:
        return opts
    try:
        return dataclasses.replace(opts, **fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_solve(args) -> int:
    spec, opts = load_config(args.config)
    opts = _apply_overrides(opts, args)
    result = minimize(spec, opts)
    payload = {
        "status": result.status.value,
        "xi_star": list(result.xi_star.xi) if result.xi_star is not None else None,
        "energy": result.energy_value,
        "grad_norm": result.grad_norm,
        "iterations": result.iterations,
        "residuals": None,
        "wellposedness": _report_dict(spec),
    }
    if result.status is SolveStatus.CONVERGED:
        report = validate(assemble(spec, result.xi_star), _VALIDATE_SAMPLES)
        payload["residuals"] = {
            "max_ode_residual": report.max_ode_residual,
            "max_stefan_residual": report.max_stefan_residual,
            "max_interface_jump": report.max_interface_jump,
            "samples": report.samples,
        }
    print(json.dumps(payload, indent=2))
    return _EXIT_BY_STATUS[result.status]


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_profile(args) -> int:
    spec, opts = load_config(args.config)
    if not args.t > 0.0:
        raise ConfigError("--t must be positive")
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    if not args.x_min < args.x_max:
        raise ConfigError("--x-min must be below --x-max")

    result = minimize(spec, opts)
    if result.status is not SolveStatus.CONVERGED:
        print(f"error: solve did not converge ({result.status.value})", file=sys.stderr)
        return _EXIT_BY_STATUS[result.status]
    sol = assemble(spec, result.xi_star)

    sqrt_t = math.sqrt(args.t)
    xs = np.linspace(args.x_min, args.x_max, args.samples)
    out_path = args.out
    fronts_path = os.path.join(os.path.dirname(os.path.abspath(out_path)), "fronts.csv")
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("x,xi,u\n")
            for x in xs:
                x = float(x)
                xi = x / sqrt_t
                fh.write(f"{_fmt(x)},{_fmt(xi)},{_fmt(evaluate_profile(sol, xi))}\n")
        with open(fronts_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("i,xi,x_at_t\n")
            for i, xi in enumerate(sol.xi_star, start=1):
                fh.write(f"{i},{_fmt(xi)},{_fmt(xi * sqrt_t)}\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_dump(args) -> int:
    spec, opts = load_config(args.config)
    payload = {
        "temperatures": list(spec.u),
        "diffusivities": list(spec.a),
        "conductivities": list(spec.k),
        "stefan_numbers": list(spec.d),
        "solver": dataclasses.asdict(opts),
    }
    print(json.dumps(payload, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stefan",
        description="Self-similar solutions of multi-phase Stefan problems with Riemann data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="report the well-posedness criteria")
    p_check.add_argument("config")
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="minimize the interface energy")
    p_solve.add_argument("config")
    p_solve.add_argument("--grad-tol", type=float, default=None)
    p_solve.add_argument("--max-iter", type=int, default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_profile = sub.add_parser("profile", help="sample the solved profile to CSV")
    p_profile.add_argument("config")
    p_profile.add_argument("--t", type=float, required=True)
    p_profile.add_argument("--x-min", type=float, required=True)
    p_profile.add_argument("--x-max", type=float, required=True)
    p_profile.add_argument("--samples", type=int, required=True)
    p_profile.add_argument("--out", required=True)
    p_profile.set_defaults(func=cmd_profile)

    p_dump = sub.add_parser("dump", help="print the parsed config, normalized")
    p_dump.add_argument("config")
    p_dump.set_defaults(func=cmd_dump)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
