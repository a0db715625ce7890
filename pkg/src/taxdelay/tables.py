"""Reference tables and parameter sweeps for threshold existence.

A positive optimal threshold exists exactly when the candidate function is
positive at zero.  For both problem modes that condition compares two
quantities that are affine in the economic parameter:

* terminal mode: upsilon(0) = intercept + slope * S on the left against
  V(0) * (1 - S q W(0)) = rhs_intercept + rhs_slope * S on the right; a
  positive threshold exists iff the left side exceeds the right, and the
  crossing point in S is the existence boundary.
* injection mode: upsilon_bar(0) = intercept + slope * varphi on the left
  against Vbar(0) - varphi * (Vbar(0) G(0) + Zbar(0) + d/q) on the right,
  where G is the injection kernel and d the net drift; the crossing point
  in varphi is the existence boundary.

The left-hand coefficients are extracted from two library evaluations
(linearity in S resp. varphi is exact), the right-hand ones from closed
forms at zero.  ``table_rows`` packages the three built-in reference
scenarios; ``sweep_rows`` and ``existence_grid`` generate plot-ready data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from .errors import InvalidParameter
from .model import LevyModel, new_model
from .numerics import DEFAULT_QUAD, QuadSpec
from .scale import ScaleSet
from .tax_injection import InjectionProblem, optimize_injection, upsilon_bar
from .tax_terminal import TerminalProblem, optimize_terminal, upsilon

# ---------------------------------------------------------------------------
# Built-in reference scenarios
# ---------------------------------------------------------------------------

#: Demonstration model shared by all built-in tables: c=1.2, lam=1, mu=1.
BASE_MODEL = new_model(c=1.2, lam=1.0, mu=1.0)

#: Tax rates covered by every built-in table row set.
TABLE_ELLS = (0.1, 0.2, 0.3)

TABLE_IDS = (1, 2, 3)


@dataclass(frozen=True)
class TableDefinition:
    """Mode, discount rate and tax-rate rows of one built-in table."""

    table_id: int
    mode: str  # "terminal" or "injection"
    q: float
    ells: Tuple[float, ...]


@dataclass(frozen=True)
class TableRow:
    """Affine existence condition and its boundary for one tax rate.

    The condition for a positive optimal threshold reads

        intercept + slope * param  >  rhs_intercept + rhs_slope * param

    with param = S (terminal mode) or varphi (injection mode); threshold
    is the crossing point of the two affine functions.
    """

    ell: float
    intercept: float
    slope: float
    rhs_intercept: float
    rhs_slope: float
    threshold: float


_DEFINITIONS = {
    1: TableDefinition(table_id=1, mode="terminal", q=0.05, ells=TABLE_ELLS),
    2: TableDefinition(table_id=2, mode="terminal", q=0.002, ells=TABLE_ELLS),
    3: TableDefinition(table_id=3, mode="injection", q=0.05, ells=TABLE_ELLS),
}


def table_definition(table_id: int) -> TableDefinition:
    """Look up a built-in table; raises InvalidParameter for unknown ids."""
    try:
        return _DEFINITIONS[table_id]
    except (KeyError, TypeError):
        raise InvalidParameter(
            f"unknown table id {table_id!r}; valid ids are {sorted(_DEFINITIONS)}"
        ) from None


# ---------------------------------------------------------------------------
# Affine coefficient extraction
# ---------------------------------------------------------------------------


def terminal_affine(scale: ScaleSet, ell: float,
                    spec: QuadSpec = DEFAULT_QUAD) -> Tuple[float, float]:
    """Coefficients (intercept, slope) of S -> upsilon(0).

    upsilon(0) is exactly affine in the terminal value, so two evaluations
    pin it down.
    """
    at0 = upsilon(TerminalProblem(scale, ell, s_terminal=0.0, x0=1.0), 0.0, spec)
    at1 = upsilon(TerminalProblem(scale, ell, s_terminal=1.0, x0=1.0), 0.0, spec)
    return at0, at1 - at0


def terminal_rhs(scale: ScaleSet) -> Tuple[float, float]:
    """Coefficients (intercept, slope) of S -> V(0) * (1 - S q W(0))."""
    v0 = scale.w(0.0) / scale.w1_at_zero()
    return v0, -v0 * scale.q * scale.w(0.0)


def injection_affine(scale: ScaleSet, ell: float,
                     spec: QuadSpec = DEFAULT_QUAD) -> Tuple[float, float]:
    """Coefficients (intercept, slope) of varphi -> upsilon_bar(0).

    upsilon_bar(0) is exactly affine in the injection cost factor, so two
    evaluations pin it down.
    """
    lo, hi = 1.25, 1.75
    at_lo = upsilon_bar(InjectionProblem(scale, ell, varphi=lo, x0=1.0), 0.0, spec)
    at_hi = upsilon_bar(InjectionProblem(scale, ell, varphi=hi, x0=1.0), 0.0, spec)
    slope = (at_hi - at_lo) / (hi - lo)
    return at_lo - slope * lo, slope


def injection_rhs(scale: ScaleSet) -> Tuple[float, float]:
    """Coefficients (intercept, slope) of varphi -> the injection condition rhs.

    The candidate function at zero is upsilon_bar(0) minus

        Vbar(0) - varphi * (Vbar(0) G(0) + Zbar(0) + d/q)

    with Vbar(0) = c/q, so the rhs is affine in varphi as well.
    """
    vbar0 = scale.z(0.0) / scale.z1d(0.0)
    return vbar0, -(vbar0 * scale.injection_kernel(0.0) + scale.zbar_shifted(0.0))


def existence_threshold(intercept: float, slope: float,
                        rhs_intercept: float, rhs_slope: float) -> float:
    """Crossing point of the two affine sides of the existence condition."""
    denom = slope - rhs_slope
    if abs(denom) < 1e-14:
        raise InvalidParameter("affine sides are parallel; no crossing point")
    return (rhs_intercept - intercept) / denom


def table_rows(table_id: int, model: LevyModel = BASE_MODEL,
               spec: QuadSpec = DEFAULT_QUAD) -> List[TableRow]:
    """Compute all rows of one built-in table on the given model."""
    definition = table_definition(table_id)
    scale = ScaleSet(model, definition.q)
    rows: List[TableRow] = []
    for ell in definition.ells:
        if definition.mode == "terminal":
            intercept, slope = terminal_affine(scale, ell, spec)
            rhs_i, rhs_s = terminal_rhs(scale)
        else:
            intercept, slope = injection_affine(scale, ell, spec)
            rhs_i, rhs_s = injection_rhs(scale)
        rows.append(TableRow(
            ell=ell,
            intercept=intercept,
            slope=slope,
            rhs_intercept=rhs_i,
            rhs_slope=rhs_s,
            threshold=existence_threshold(intercept, slope, rhs_i, rhs_s),
        ))
    return rows


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

#: Scalars a sweep may vary; "S" only in terminal mode, "varphi" only in
#: injection mode, the rest in either.
SWEEPABLE = ("S", "varphi", "ell", "q", "c", "lambda", "mu", "x")


@dataclass(frozen=True)
class SweepPoint:
    """Base scenario for a sweep; exactly one field is varied per run."""

    mode: str
    c: float
    lam: float
    mu: float
    q: float
    ell: float
    s_terminal: float = 0.0
    varphi: float = 1.5
    x0: float = 1.0


@dataclass(frozen=True)
class SweepRow:
    """One optimization outcome along a sweep."""

    param: str
    value: float
    threshold: float
    objective: float
    boundary_case: bool


def _with_param(base: SweepPoint, param: str, value: float) -> SweepPoint:
    field = {"S": "s_terminal", "lambda": "lam", "x": "x0"}.get(param, param)
    return replace(base, **{field: value})


def _optimize_point(point: SweepPoint, spec: QuadSpec) -> Tuple[float, float, bool]:
    scale = ScaleSet(new_model(point.c, point.lam, point.mu), point.q)
    if point.mode == "terminal":
        report = optimize_terminal(
            TerminalProblem(scale, point.ell, point.s_terminal, point.x0), spec=spec)
    elif point.mode == "injection":
        report = optimize_injection(
            InjectionProblem(scale, point.ell, point.varphi, point.x0,
                             allow_low_cost=True), spec=spec)
    else:
        raise InvalidParameter(f"unknown mode {point.mode!r}")
    return report.threshold, report.value, report.boundary_case


def grid_values(lo: float, hi: float, steps: int) -> List[float]:
    """Evenly spaced grid with both endpoints; steps is the point count."""
    if not (isinstance(steps, int) and steps >= 2):
        raise InvalidParameter(f"steps must be an integer >= 2, got {steps!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidParameter(f"need finite lo < hi, got {lo!r}, {hi!r}")
    width = (hi - lo) / (steps - 1)
    return [lo + i * width for i in range(steps - 1)] + [hi]


def sweep_rows(base: SweepPoint, param: str, lo: float, hi: float, steps: int,
               spec: QuadSpec = DEFAULT_QUAD) -> List[SweepRow]:
    """Optimize once per grid point of one varied parameter."""
    if param not in SWEEPABLE:
        raise InvalidParameter(
            f"cannot sweep {param!r}; choose one of {', '.join(SWEEPABLE)}")
    if param == "S" and base.mode != "terminal":
        raise InvalidParameter("parameter S exists only in terminal mode")
    if param == "varphi" and base.mode != "injection":
        raise InvalidParameter("parameter varphi exists only in injection mode")
    rows: List[SweepRow] = []
    for value in grid_values(lo, hi, steps):
        threshold, objective, boundary = _optimize_point(
            _with_param(base, param, value), spec)
        rows.append(SweepRow(param=param, value=value, threshold=threshold,
                             objective=objective, boundary_case=boundary))
    return rows


@dataclass(frozen=True)
class ExistenceCell:
    """Sign of the terminal candidate function at zero for one (S, q) pair."""

    s_terminal: float
    q: float
    h_at_zero: float
    positive_threshold: bool


def existence_grid(model: LevyModel, ell: float,
                   s_lo: float, s_hi: float, s_steps: int,
                   q_lo: float, q_hi: float, q_steps: int,
                   spec: QuadSpec = DEFAULT_QUAD) -> List[ExistenceCell]:
    """2-D (S, q) map of the sign of the terminal candidate at zero.

    Exploits linearity: per q the candidate at zero is affine in S, so each
    row costs two evaluations regardless of the S resolution.
    """
    cells: List[ExistenceCell] = []
    for q in grid_values(q_lo, q_hi, q_steps):
        scale = ScaleSet(model, q)
        intercept, slope = terminal_affine(scale, ell, spec)
        rhs_i, rhs_s = terminal_rhs(scale)
        for s in grid_values(s_lo, s_hi, s_steps):
            h0 = (intercept + slope * s) - (rhs_i + rhs_s * s)
            cells.append(ExistenceCell(
                s_terminal=s, q=q, h_at_zero=h0, positive_threshold=h0 > 0.0))
    return cells


__all__ = [
    "BASE_MODEL",
    "TABLE_ELLS",
    "TABLE_IDS",
    "TableDefinition",
    "TableRow",
    "table_definition",
    "terminal_affine",
    "terminal_rhs",
    "injection_affine",
    "injection_rhs",
    "existence_threshold",
    "table_rows",
    "SWEEPABLE",
    "SweepPoint",
    "SweepRow",
    "sweep_rows",
    "grid_values",
    "ExistenceCell",
    "existence_grid",
]
