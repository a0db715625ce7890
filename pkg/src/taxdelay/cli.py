"""Command-line front end.

Subcommands:

* ``optimize``   - compute the optimal delay threshold for one scenario.
* ``reproduce``  - emit one of the built-in existence tables as CSV.
* ``sweep``      - optimize along a parameter grid (or emit the 2-D
                   (S, q) existence map) as plot-ready CSV.
* ``simulate``   - run the Monte Carlo engine and compare to the formula.
* ``validate``   - run the internal self-check battery.

Output is CSV (default) or JSON, written to stdout or ``--out``.  Floats
are printed with ``--precision`` significant digits (default 6).  Exit
codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import (BracketFailure, DomainError, EventCapExceeded,
                     InvalidConfig, InvalidParameter, ToleranceNotMet)
from .model import new_model
from .scale import ScaleSet
from .simulate import SimConfig, simulate_injection, simulate_terminal
from .tables import (SWEEPABLE, SweepPoint, existence_grid, sweep_rows,
                     table_rows)
from .tax_injection import (InjectionProblem, h_bar, optimize_injection,
                            phi_bar_value)
from .tax_terminal import (TerminalProblem, h_terminal, optimize_terminal,
                           phi_value)
from .validate import run_checks

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3

Row = Dict[str, Any]

# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output format (default csv)")
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="write output to PATH instead of stdout")
    sub.add_argument("--precision", type=int, default=6, metavar="N",
                     help="significant digits for printed values (default 6)")


def _add_scenario_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mode", choices=("terminal", "injection"), required=True,
                     help="terminal: lump value at ruin; injection: costly top-ups")
    sub.add_argument("--c", type=float, required=True, help="premium rate")
    sub.add_argument("--lambda", dest="lam", type=float, required=True,
                     help="claim arrival intensity")
    sub.add_argument("--mu", type=float, required=True,
                     help="exponential claim-size parameter")
    sub.add_argument("--q", type=float, required=True, help="discount rate")
    sub.add_argument("--ell", type=float, required=True, help="tax rate in [0, 1)")
    sub.add_argument("--S", dest="s_terminal", type=float, default=0.0,
                     help="terminal value at ruin (terminal mode, default 0)")
    sub.add_argument("--varphi", type=float, default=None,
                     help="cost per unit injected (> 1; required in injection mode)")
    sub.add_argument("--x", type=float, default=1.0,
                     help="starting surplus level (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taxdelay",
        description="Optimal tax-implementation-delay thresholds for the "
                    "compound Poisson surplus process with exponential claims.")
    commands = parser.add_subparsers(dest="command", required=True)

    p_opt = commands.add_parser(
        "optimize", help="compute the optimal delay threshold")
    _add_scenario_flags(p_opt)
    _add_output_flags(p_opt)

    p_rep = commands.add_parser(
        "reproduce", help="emit a built-in existence table")
    p_rep.add_argument("table", type=int, help="table id: 1, 2 or 3")
    _add_output_flags(p_rep)

    p_swp = commands.add_parser(
        "sweep", help="optimize along a parameter grid")
    _add_scenario_flags(p_swp)
    p_swp.add_argument("--param", choices=SWEEPABLE, required=True,
                       help="parameter to vary")
    p_swp.add_argument("--from", dest="lo", type=float, required=True,
                       help="grid start")
    p_swp.add_argument("--to", dest="hi", type=float, required=True,
                       help="grid end")
    p_swp.add_argument("--steps", type=int, required=True,
                       help="number of grid points (>= 2)")
    p_swp.add_argument("--q-from", dest="q_lo", type=float, default=None,
                       help="with --q-to/--q-steps and --param S: emit the "
                            "2-D (S, q) existence map instead")
    p_swp.add_argument("--q-to", dest="q_hi", type=float, default=None)
    p_swp.add_argument("--q-steps", dest="q_steps", type=int, default=None)
    _add_output_flags(p_swp)

    p_sim = commands.add_parser(
        "simulate", help="Monte Carlo run compared against the formula")
    _add_scenario_flags(p_sim)
    p_sim.add_argument("--b", type=float, default=None,
                       help="terminal-mode threshold (default: the optimum)")
    p_sim.add_argument("--a", type=float, default=None,
                       help="injection-mode threshold (default: the optimum)")
    p_sim.add_argument("--paths", type=int, default=200_000,
                       help="number of simulated paths (default 200000)")
    p_sim.add_argument("--horizon", type=float, default=400.0,
                       help="time horizon (default 400)")
    p_sim.add_argument("--seed", type=int, default=12345,
                       help="random seed (default 12345)")
    p_sim.add_argument("--antithetic", action="store_true",
                       help="antithetic pairing (needs even --paths)")
    _add_output_flags(p_sim)

    p_val = commands.add_parser(
        "validate", help="run the internal self-check battery")
    _add_output_flags(p_val)

    return parser


# ---------------------------------------------------------------------------
# Scenario construction
# ---------------------------------------------------------------------------


def _build_problem(args: argparse.Namespace):
    scale = ScaleSet(new_model(args.c, args.lam, args.mu), args.q)
    if args.mode == "terminal":
        return TerminalProblem(scale, args.ell, args.s_terminal, args.x)
    if args.varphi is None:
        raise InvalidParameter("injection mode needs --varphi")
    return InjectionProblem(scale, args.ell, args.varphi, args.x)


# ---------------------------------------------------------------------------
# Subcommand bodies (each returns header + rows)
# ---------------------------------------------------------------------------


def _cmd_optimize(args: argparse.Namespace) -> Tuple[List[str], List[Row]]:
    problem = _build_problem(args)
    if args.mode == "terminal":
        report = optimize_terminal(problem)
        residual = h_terminal(problem, report.threshold)
    else:
        report = optimize_injection(problem)
        residual = h_bar(problem, report.threshold)
    row: Row = {
        "mode": args.mode,
        "threshold": report.threshold,
        "boundary_case": report.boundary_case,
        "value": report.value,
        "h_residual": residual,
    }
    return list(row), [row]


def _cmd_reproduce(args: argparse.Namespace) -> Tuple[List[str], List[Row]]:
    header = ["ell", "intercept", "slope", "rhs_intercept", "rhs_slope", "threshold"]
    rows = [{
        "ell": r.ell,
        "intercept": r.intercept,
        "slope": r.slope,
        "rhs_intercept": r.rhs_intercept,
        "rhs_slope": r.rhs_slope,
        "threshold": r.threshold,
    } for r in table_rows(args.table)]
    return header, rows


def _cmd_sweep(args: argparse.Namespace) -> Tuple[List[str], List[Row]]:
    grid_flags = (args.q_lo, args.q_hi, args.q_steps)
    if any(v is not None for v in grid_flags):
        if any(v is None for v in grid_flags):
            raise InvalidParameter("the existence map needs all of --q-from, "
                                   "--q-to and --q-steps")
        if args.param != "S" or args.mode != "terminal":
            raise InvalidParameter("the existence map supports --param S in "
                                   "terminal mode only")
        cells = existence_grid(new_model(args.c, args.lam, args.mu), args.ell,
                               args.lo, args.hi, args.steps,
                               args.q_lo, args.q_hi, args.q_steps)
        header = ["S", "q", "h_at_zero", "positive_threshold"]
        return header, [{
            "S": cell.s_terminal,
            "q": cell.q,
            "h_at_zero": cell.h_at_zero,
            "positive_threshold": cell.positive_threshold,
        } for cell in cells]
    base = SweepPoint(mode=args.mode, c=args.c, lam=args.lam, mu=args.mu,
                      q=args.q, ell=args.ell, s_terminal=args.s_terminal,
                      varphi=args.varphi if args.varphi is not None else 1.5,
                      x0=args.x)
    header = ["param", "param_value", "threshold", "value", "boundary_case"]
    rows = [{
        "param": r.param,
        "param_value": r.value,
        "threshold": r.threshold,
        "value": r.objective,
        "boundary_case": r.boundary_case,
    } for r in sweep_rows(base, args.param, args.lo, args.hi, args.steps)]
    return header, rows


def _cmd_simulate(args: argparse.Namespace) -> Tuple[List[str], List[Row]]:
    problem = _build_problem(args)
    cfg = SimConfig(n_paths=args.paths, horizon=args.horizon, seed=args.seed,
                    antithetic=args.antithetic)
    if args.mode == "terminal":
        threshold = args.b if args.b is not None else optimize_terminal(problem).threshold
        result = simulate_terminal(problem, threshold, cfg)
        analytic = phi_value(problem, args.x, threshold) if args.x > 0.0 \
            else math.nan
    else:
        threshold = args.a if args.a is not None else optimize_injection(problem).threshold
        result = simulate_injection(problem, threshold, cfg)
        analytic = phi_bar_value(problem, args.x, threshold)
    z_score = (result.mean - analytic) / result.stderr if result.stderr > 0.0 \
        else math.nan
    if result.bias_exceeded:
        print("warning: horizon-truncation bias bound is not below 10% of "
              "the standard error; increase --horizon", file=sys.stderr)
    row: Row = {
        "mode": args.mode,
        "threshold": threshold,
        "mean": result.mean,
        "stderr": result.stderr,
        "n_paths": result.n_paths,
        "bias_bound": result.bias_bound,
        "bias_exceeded": result.bias_exceeded,
        "ruin_fraction": result.ruin_fraction,
        "analytic": analytic,
        "z_score": z_score,
    }
    return list(row), [row]


def _cmd_validate(_: argparse.Namespace) -> Tuple[List[str], List[Row]]:
    header = ["name", "passed", "detail"]
    return header, [{
        "name": r.name, "passed": r.passed, "detail": r.detail,
    } for r in run_checks()]


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------


def _csv_cell(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}g}"
    return str(value)


def _json_cell(value: Any, precision: int) -> Any:
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{precision}g}")
    if isinstance(value, float):
        return str(value)  # nan/inf are not valid JSON literals
    return value


def _render(header: List[str], rows: List[Row], args: argparse.Namespace) -> str:
    precision = args.precision
    if precision < 1:
        raise InvalidParameter(f"--precision must be >= 1, got {precision}")
    if args.format == "json":
        cooked = [{k: _json_cell(row[k], precision) for k in header} for row in rows]
        payload: Any = cooked[0] if len(cooked) == 1 else cooked
        return json.dumps(payload, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row[k], precision) for k in header])
    return buffer.getvalue()


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "optimize": _cmd_optimize,
    "reproduce": _cmd_reproduce,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        header, rows = _COMMANDS[args.command](args)
        _emit(_render(header, rows, args), args.out)
    except (InvalidParameter, InvalidConfig, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (ToleranceNotMet, BracketFailure, EventCapExceeded) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    if args.command == "validate" and not all(row["passed"] for row in rows):
        return EXIT_NUMERICAL_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
