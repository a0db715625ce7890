"""Self-check battery: fast internal consistency checks of the library.

Each check exercises an independent route to the same quantity (closed
form vs quadrature, analytic derivative vs finite difference, optimizer
vs grid argmax, affine existence boundary vs direct sign change, engine
vs formula) and reports a named pass/fail with a one-line detail.  The
full battery is meant to run in a few seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

from .model import laplace_exponent, new_model, spectral_roots
from .numerics import integrate_finite, integrate_tail
from .scale import ScaleSet
from .simulate import SimConfig, simulate_injection, simulate_terminal
from .tables import (existence_threshold, injection_affine, injection_rhs,
                     table_rows, terminal_affine, terminal_rhs)
from .tax_injection import (InjectionProblem, f_a, g_a, h_bar,
                            optimize_injection, phi_bar_partial_a,
                            phi_bar_value, r_a)
from .tax_terminal import (TerminalProblem, h_terminal, optimize_terminal,
                           phi_partial_b, phi_value)

# ---------------------------------------------------------------------------
# Result record
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named self-check."""

    name: str
    passed: bool
    detail: str


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------


def _check_boundary_identities() -> CheckResult:
    worst = 0.0
    for (c, lam, mu) in [(1.2, 1.0, 1.0), (2.0, 1.5, 0.8), (0.9, 1.0, 1.0)]:
        for q in (0.002, 0.05, 0.3):
            s = ScaleSet(new_model(c, lam, mu), q)
            r = spectral_roots(s.model, q)
            worst = max(
                worst,
                abs(s.w(0.0) - 1.0 / c) * c,
                abs(s.w1_at_zero() - (q + lam) / c ** 2) / ((q + lam) / c ** 2),
                abs(s.z(0.0) - 1.0),
                abs(s.zbar(0.0)),
                abs((r.a1 - r.a2) - 1.0),
                abs(laplace_exponent(s.model, r.theta1) - q) / q,
            )
    return _check("scale-boundary-identities", worst < 1e-12,
                  f"max relative defect {worst:.2e} (tol 1e-12)")


def _check_laplace_transform() -> CheckResult:
    worst = 0.0
    for (c, lam, mu, q) in [(1.2, 1.0, 1.0, 0.05), (2.0, 1.5, 0.8, 0.01)]:
        s = ScaleSet(new_model(c, lam, mu), q)
        theta = 2.0 * spectral_roots(s.model, q).theta1
        val = integrate_tail(lambda x: math.exp(-theta * x) * s.w(x), 0.0,
                             theta - spectral_roots(s.model, q).theta1)
        target = 1.0 / (laplace_exponent(s.model, theta) - q)
        worst = max(worst, abs(val - target) / abs(target))
    return _check("scale-laplace-transform", worst < 1e-8,
                  f"max relative error {worst:.2e} (tol 1e-8)")


def _check_antiderivatives() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    zq = integrate_finite(s.w, 0.0, 3.0)
    zbarq = integrate_finite(s.z, 0.0, 3.0)
    err = max(abs(1.0 + s.q * zq - s.z(3.0)), abs(zbarq - s.zbar(3.0)))
    return _check("scale-antiderivatives", err < 1e-8,
                  f"max defect {err:.2e} (tol 1e-8)")


def _check_terminal_derivative() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    p = TerminalProblem(s, 0.15, -3.0, 0.5)
    worst = 0.0
    for b in (0.8, 2.0, 5.0):
        step = 1e-3 * max(1.0, b)
        fd = (phi_value(p, 0.5, b + step) - phi_value(p, 0.5, b - step)) / (2 * step)
        an = phi_partial_b(p, 0.5, b)
        worst = max(worst, abs(fd - an) / max(1e-12, abs(an)))
    return _check("terminal-derivative-consistency", worst < 1e-5,
                  f"max relative gap {worst:.2e} (tol 1e-5)")


def _check_injection_derivative() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    p = InjectionProblem(s, 0.2, 1.5, 0.5)
    worst = 0.0
    for a in (0.8, 2.0, 5.0):
        step = 1e-3 * max(1.0, a)
        fd = (phi_bar_value(p, 0.5, a + step) - phi_bar_value(p, 0.5, a - step)) / (2 * step)
        an = phi_bar_partial_a(p, 0.5, a)
        worst = max(worst, abs(fd - an) / max(1e-12, abs(an)))
    return _check("injection-derivative-consistency", worst < 1e-5,
                  f"max relative gap {worst:.2e} (tol 1e-5)")


def _check_ode_residuals() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    p = InjectionProblem(s, 0.2, 1.5, 0.5)
    a, e = 3.0, p.exponent
    worst = 0.0
    for x in (0.5, 1.5, 2.5):
        step = 1e-4
        slope = e * s.q * s.w(x) / s.z(x)
        kernel = s.injection_kernel(x)
        fd_f = (f_a(p, x + step, a) - f_a(p, x - step, a)) / (2 * step)
        fd_g = (g_a(p, x + step, a) - g_a(p, x - step, a)) / (2 * step)
        fd_r = (r_a(p, x + step, a) - r_a(p, x - step, a)) / (2 * step)
        worst = max(
            worst,
            abs(fd_f - slope * f_a(p, x, a)),
            abs(fd_g - (slope * g_a(p, x, a) - p.ell * e)),
            abs(fd_r - (slope * r_a(p, x, a) - e * kernel)),
        )
    return _check("injection-ode-residuals", worst < 1e-6,
                  f"max residual {worst:.2e} (tol 1e-6)")


def _check_existence_boundaries() -> CheckResult:
    s5 = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    worst = 0.0
    intercept, slope = terminal_affine(s5, 0.1)
    rhs_i, rhs_s = terminal_rhs(s5)
    s_star = existence_threshold(intercept, slope, rhs_i, rhs_s)
    worst = max(worst, abs(h_terminal(
        TerminalProblem(s5, 0.1, s_star, 1.0), 0.0)))
    intercept, slope = injection_affine(s5, 0.2)
    rhs_i, rhs_s = injection_rhs(s5)
    phi_star = existence_threshold(intercept, slope, rhs_i, rhs_s)
    worst = max(worst, abs(h_bar(
        InjectionProblem(s5, 0.2, phi_star, 1.0), 0.0)))
    return _check("existence-boundary-consistency", worst < 1e-8,
                  f"candidate-at-zero residual {worst:.2e} at the affine crossing (tol 1e-8)")


def _check_tables_compute() -> CheckResult:
    try:
        rows = [table_rows(tid) for tid in (1, 2, 3)]
    except Exception as exc:  # noqa: BLE001 - report any failure as a check
        return _check("reference-tables", False, f"computation failed: {exc}")
    finite = all(math.isfinite(r.threshold) for rs in rows for r in rs)
    return _check("reference-tables", finite, "all 9 rows computed with finite boundaries")


def _check_optimizer_argmax() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    worst = 0.0
    pt = TerminalProblem(s, 0.1, -5.0, 0.25)
    rep = optimize_terminal(pt)
    grid = [0.25 + 0.002 * i for i in range(int(2.0 / 0.002))]
    best = max(grid, key=lambda b: phi_value(pt, 0.25, b))
    worst = max(worst, abs(best - rep.threshold))
    pi = InjectionProblem(s, 0.2, 1.5, 0.25)
    repi = optimize_injection(pi)
    besti = max(grid, key=lambda a: phi_bar_value(pi, 0.25, a))
    worst = max(worst, abs(besti - repi.threshold))
    return _check("optimizer-grid-argmax", worst < 4e-3,
                  f"max |optimizer - grid argmax| {worst:.2e} (tol 4e-3 on a 2e-3 grid)")


def _check_monte_carlo() -> CheckResult:
    s = ScaleSet(new_model(1.2, 1.0, 1.0), 0.05)
    cfg = SimConfig(n_paths=20_000, horizon=200.0, seed=20260814)
    pt = TerminalProblem(s, 0.1, -5.0, 1.0)
    rt = simulate_terminal(pt, 2.0, cfg)
    zt = (rt.mean - phi_value(pt, 1.0, 2.0)) / rt.stderr
    pi = InjectionProblem(s, 0.2, 1.5, 1.0)
    ri = simulate_injection(pi, 2.0, cfg)
    zi = (ri.mean - phi_bar_value(pi, 1.0, 2.0)) / ri.stderr
    worst = max(abs(zt), abs(zi))
    return _check("monte-carlo-agreement", worst < 4.5,
                  f"max |z| {worst:.2f} over both engines (tol 4.5)")


_CHECKS: List[Callable[[], CheckResult]] = [
    _check_boundary_identities,
    _check_laplace_transform,
    _check_antiderivatives,
    _check_terminal_derivative,
    _check_injection_derivative,
    _check_ode_residuals,
    _check_existence_boundaries,
    _check_tables_compute,
    _check_optimizer_argmax,
    _check_monte_carlo,
]


def run_checks(include_monte_carlo: bool = True) -> List[CheckResult]:
    """Run the battery; optionally skip the (slowest) simulation check."""
    results = []
    for check in _CHECKS:
        if not include_monte_carlo and check is _check_monte_carlo:
            continue
        results.append(check())
    return results


__all__ = ["CheckResult", "run_checks"]
