"""Optimal tax-implementation-delay thresholds for insurance surplus processes.

The library models an insurer's surplus as a compound Poisson process with
exponential claims and linear premium income, taxed loss-carry-forward
style (a share of every new running-maximum increment) once the surplus
first reaches a delay threshold.  It computes, in closed form up to
one-dimensional quadrature:

* the optimal threshold b* when a lump terminal value is exchanged at
  ruin (``tax_terminal``), and
* the optimal threshold a* when ruin is instead prevented by costly
  capital injections (``tax_injection``),

together with exact Monte Carlo engines for both controlled processes
(``simulate``), reference existence tables and parameter sweeps
(``tables``), and a self-check battery (``validate``).
"""

from __future__ import annotations

from .errors import (BracketFailure, DomainError, EventCapExceeded,
                     InvalidConfig, InvalidParameter, ToleranceNotMet)
from .model import (LevyModel, SpectralRoots, laplace_exponent, new_model,
                    spectral_roots)
from .numerics import (DEFAULT_QUAD, QuadSpec, RootReport,
                       find_root_decreasing_sign, integrate_finite,
                       integrate_tail)
from .scale import ScaleSet
from .simulate import (SimConfig, SimResult, inspect_injection_paths,
                       inspect_terminal_paths, simulate_injection,
                       simulate_terminal)
from .tables import (BASE_MODEL, SweepPoint, SweepRow, TableRow,
                     existence_grid, sweep_rows, table_rows)
from .tax_injection import (InjectionProblem, OptimumReport as InjectionOptimum,
                            h_bar, optimize_injection, phi_bar_partial_a,
                            phi_bar_value, psi_bar, upsilon_bar)
from .tax_terminal import (OptimumReport, TerminalProblem, h_terminal,
                           optimize_terminal, phi_partial_b, phi_value, psi,
                           upsilon)
from .validate import CheckResult, run_checks

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # errors
    "BracketFailure", "DomainError", "EventCapExceeded", "InvalidConfig",
    "InvalidParameter", "ToleranceNotMet",
    # model and scale functions
    "LevyModel", "SpectralRoots", "laplace_exponent", "new_model",
    "spectral_roots", "ScaleSet",
    # numerics
    "DEFAULT_QUAD", "QuadSpec", "RootReport", "find_root_decreasing_sign",
    "integrate_finite", "integrate_tail",
    # terminal-value problem
    "TerminalProblem", "OptimumReport", "h_terminal", "optimize_terminal",
    "phi_partial_b", "phi_value", "psi", "upsilon",
    # capital-injection problem
    "InjectionProblem", "InjectionOptimum", "h_bar", "optimize_injection",
    "phi_bar_partial_a", "phi_bar_value", "psi_bar", "upsilon_bar",
    # simulation
    "SimConfig", "SimResult", "simulate_injection", "simulate_terminal",
    "inspect_injection_paths", "inspect_terminal_paths",
    # tables and sweeps
    "BASE_MODEL", "SweepPoint", "SweepRow", "TableRow", "existence_grid",
    "sweep_rows", "table_rows",
    # self checks
    "CheckResult", "run_checks",
]
