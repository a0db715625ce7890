"""Quadrature for exponentially decaying tail integrals and bracketed roots.

The improper integrals in this library all have integrands dominated by
a known exponential envelope, which turns truncation into a rigorous
bound rather than a heuristic: if |f(z)| <= |f(T)| e^{-decay (z-T)} for
every z >= T >= a, then the discarded tail beyond T is at most
|f(T)|/decay.  ``integrate_tail`` extends T until that bound drops below
the requested tolerance and integrates the finite part adaptively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import BracketFailure, InvalidParameter, ToleranceNotMet

__all__ = [
    "QuadSpec",
    "RootReport",
    "integrate_tail",
    "integrate_finite",
    "find_root_decreasing_sign",
]

# the adaptive backend cannot honour relative tolerances below roughly
# 50*eps; requests beyond that are clamped to this floor
_REL_TOL_FLOOR = 5e-13

# each tail chunk spans this many e-folds of the guaranteed envelope
_CHUNK_EFOLDS = 20.0

# a lying decay rate would otherwise extend the tail forever
_MAX_CHUNKS = 64


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances for the adaptive quadrature routines.

    rel_tol below ~5e-13 is clamped to the backend's floor; the tail
    truncation criterion still uses the requested value.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol >= 1e-14 and math.isfinite(self.rel_tol)):
            raise InvalidParameter("rel_tol must be finite and >= 1e-14")
        if not (self.abs_tol > 0.0 and math.isfinite(self.abs_tol)):
            raise InvalidParameter("abs_tol must be finite and > 0")
        if self.max_subdivisions < 10:
            raise InvalidParameter("max_subdivisions must be >= 10")


DEFAULT_QUAD = QuadSpec()


@dataclass(frozen=True)
class RootReport:
    """Diagnostics from a bracketed root search.

    boundary_case is True when the caller resolved the optimum at the
    lower boundary without an interior root (root = 0 by convention).
    """

    root: float
    residual: float
    bracket: Tuple[float, float]
    iterations: int
    boundary_case: bool = False


def _quad_once(f: Callable[[float], float], a: float, b: float, spec: QuadSpec) -> Tuple[float, float]:
    eff_rel = max(spec.rel_tol, _REL_TOL_FLOOR)
    out = quad(f, a, b, epsabs=spec.abs_tol, epsrel=eff_rel,
               limit=spec.max_subdivisions, full_output=True)
    value, abserr = out[0], out[1]
    if len(out) > 3:  # quadpack appended an error message (limit exhausted, ...)
        raise ToleranceNotMet(
            f"adaptive quadrature failed on [{a:g}, {b:g}]: {out[3].strip()}"
        )
    if abserr > 1e3 * (eff_rel * abs(value) + spec.abs_tol):
        raise ToleranceNotMet(
            f"quadrature error estimate {abserr:g} exceeds tolerance on [{a:g}, {b:g}]"
        )
    return value, abserr


def integrate_finite(f: Callable[[float], float], a: float, b: float,
                     spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Adaptive quadrature of f over the finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidParameter("integrate_finite requires finite endpoints")
    if b <= a:
        return 0.0
    value, _ = _quad_once(f, a, b, spec)
    return value


def integrate_tail(f: Callable[[float], float], a: float, decay: float,
                   spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Integral of f over [a, infinity) under a guaranteed decay envelope.

    The caller guarantees |f(z)| <= |f(T)| e^{-decay (z-T)} for all
    z >= T >= a.  The integration window is extended in chunks of
    20/decay until the analytic tail bound |f(T)|/decay falls below
    rel_tol*|integral| + abs_tol.
    """
    if not (math.isfinite(decay) and decay > 0.0):
        raise InvalidParameter(f"decay must be finite and > 0, got {decay!r}")
    if not math.isfinite(a):
        raise InvalidParameter("lower limit must be finite")
    chunk = _CHUNK_EFOLDS / decay
    total = 0.0
    left = a
    for _ in range(_MAX_CHUNKS):
        right = left + chunk
        value, _ = _quad_once(f, left, right, spec)
        total += value
        tail_bound = abs(f(right)) / decay
        if tail_bound <= spec.rel_tol * abs(total) + spec.abs_tol:
            return total
        left = right
    raise ToleranceNotMet(
        f"tail bound still {tail_bound:g} after {_MAX_CHUNKS} chunks; "
        "the guaranteed decay rate looks inconsistent with the integrand"
    )


def find_root_decreasing_sign(h: Callable[[float], float], lo: float, tol: float,
                              hi_cap: float = 1e6) -> RootReport:
    """Root of a function with a single sign change from + to - on [lo, inf).

    Requires h(lo) > 0.  The bracket is grown geometrically
    (hi = max(1, 2*hi)) until h(hi) < 0, then handed to a hybrid
    bisection/inverse-quadratic solver.  Deterministic for fixed inputs.
    """
    if not (math.isfinite(lo) and lo >= 0.0):
        raise InvalidParameter("lo must be finite and >= 0")
    if not (math.isfinite(tol) and tol > 0.0):
        raise InvalidParameter("tol must be finite and > 0")
    h_lo = h(lo)
    if not math.isfinite(h_lo) or h_lo <= 0.0:
        raise BracketFailure(f"h({lo:g}) = {h_lo!r} is not strictly positive")
    left = lo
    hi = max(1.0, 2.0 * lo)
    while True:
        if hi > hi_cap:
            raise BracketFailure(
                f"no sign change found below the cap {hi_cap:g}; "
                "model and tolerance look inconsistent"
            )
        h_hi = h(hi)
        if not math.isfinite(h_hi):
            raise BracketFailure(f"h({hi:g}) is not finite")
        if h_hi < 0.0:
            break
        left = hi
        hi = 2.0 * hi
    root, info = brentq(h, left, hi, xtol=tol, rtol=4.0 * math.ulp(1.0),
                        maxiter=200, full_output=True, disp=False)
    if not info.converged:
        raise BracketFailure(f"bracketed solve failed to converge on [{left:g}, {hi:g}]")
    return RootReport(
        root=float(root),
        residual=h(float(root)),
        bracket=(left, hi),
        iterations=int(info.iterations),
        boundary_case=False,
    )
