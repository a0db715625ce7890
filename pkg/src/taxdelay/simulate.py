"""Exact event-driven Monte Carlo for the taxed risk process.

Two engines estimate the two analytic objectives:

* ``simulate_terminal``: taxed process with a lump terminal value at ruin.
* ``simulate_injection``: taxed process kept nonnegative by costly capital
  injections, with taxation gated by pre-ruin memory levels.

Both engines are exact in distribution: claim waiting times and claim
sizes are exponential draws, the drift between claims is handled in closed
form (including the discounted tax accrued while the path grows at a
record), and ruin or injection can happen only at claim instants because
the drift is upward.  The one approximation is the finite horizon, whose
discounted-tail bias is bounded in closed form and reported.

Randomness comes from a counter-based Philox stream keyed by the seed.
Every iteration draws one waiting-time uniform and one claim-size uniform
per path slot, whether or not the slot is still alive, so the mapping
(seed, iteration, path index) -> draw is fixed and the result is
bit-identical for a given configuration no matter how the vector work is
scheduled.  With antithetic pairing the second half of the slots consumes
the mirrored uniforms 1-u of the first half and the standard error is
estimated from pair averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import EventCapExceeded, InvalidConfig, InvalidParameter
from .tax_injection import InjectionProblem
from .tax_terminal import TerminalProblem

# Hard cap on per-path event count; a legitimate run ends long before this.
EVENT_CAP = 10_000_000

# ---------------------------------------------------------------------------
# Configuration and result records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """Path count, time horizon, seed and pairing flag for one run."""

    n_paths: int
    horizon: float
    seed: int
    antithetic: bool = False

    def __post_init__(self):
        if isinstance(self.n_paths, bool) or not isinstance(self.n_paths, int) \
                or self.n_paths < 1:
            raise InvalidConfig(f"n_paths must be an integer >= 1, got {self.n_paths!r}")
        if not (isinstance(self.horizon, (int, float))
                and math.isfinite(self.horizon) and self.horizon > 0.0):
            raise InvalidConfig(f"horizon must be finite and > 0, got {self.horizon!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or not (0 <= self.seed < 2 ** 64):
            raise InvalidConfig(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if self.antithetic and self.n_paths % 2:
            raise InvalidConfig("antithetic pairing needs an even n_paths")


@dataclass(frozen=True)
class SimResult:
    """Estimate, its standard error, and the horizon-truncation bias bound.

    ``bias_exceeded`` is set when the bias bound is not below 10% of the
    standard error, signalling that the horizon is too short for the
    requested precision.  ``ruin_fraction`` is populated in terminal mode
    only (fraction of paths ruined before the horizon).
    """

    mean: float
    stderr: float
    n_paths: int
    bias_bound: float
    bias_exceeded: bool
    ruin_fraction: Optional[float] = None


# ---------------------------------------------------------------------------
# Draw stream
# ---------------------------------------------------------------------------


class _Draws:
    """Full-width per-iteration uniforms from one Philox stream."""

    def __init__(self, cfg: SimConfig):
        self._rng = np.random.Generator(np.random.Philox(key=cfg.seed))
        self._n = cfg.n_paths
        self._antithetic = cfg.antithetic

    def exponentials(self, rate: float) -> np.ndarray:
        u = self._uniforms()
        return -np.log1p(-u) / rate

    def _uniforms(self) -> np.ndarray:
        if self._antithetic:
            half = self._rng.random(self._n // 2)
            return np.concatenate([half, 1.0 - half])
        return self._rng.random(self._n)


def _reduce(acc: np.ndarray, cfg: SimConfig) -> Tuple[float, float]:
    """Mean and standard error; pair-averaged when antithetic."""
    mean = float(np.mean(acc))
    if cfg.antithetic:
        half = cfg.n_paths // 2
        samples = 0.5 * (acc[:half] + acc[half:])
    else:
        samples = acc
    if samples.size < 2:
        return mean, math.nan
    return mean, float(np.std(samples, ddof=1) / math.sqrt(samples.size))


def _require_level(name: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
        raise InvalidParameter(f"{name} must be finite and >= 0, got {value!r}")
    return float(value)


class _Capture:
    """Optional per-iteration state recorder used by the inspectors."""

    def __init__(self):
        self.frames: List[Dict[str, np.ndarray]] = []

    def add(self, **arrays: np.ndarray) -> None:
        self.frames.append({k: np.array(v, copy=True) for k, v in arrays.items()})


# ---------------------------------------------------------------------------
# Terminal-value engine
# ---------------------------------------------------------------------------


def simulate_terminal(p: TerminalProblem, b: float, cfg: SimConfig,
                      capture: Optional[_Capture] = None) -> SimResult:
    """Estimate the discounted tax-plus-terminal-value objective at x0.

    Tax accrues at rate ell*c exactly while the pre-tax path grows at a
    record above max(b, records so far); each interval's discounted accrual
    is integrated in closed form.  Ruin is the first claim instant at which
    the net (post-tax) level is negative; it contributes S discounted.
    Paths still alive at the horizon contribute their accrued tax only.
    """
    b = _require_level("threshold b", b)
    model, q = p.scale.model, p.scale.q
    c, lam, mu = model.c, model.lam, model.mu
    ell, s_value = p.ell, p.s_terminal
    horizon = float(cfg.horizon)
    n = cfg.n_paths
    draws = _Draws(cfg)

    base = max(p.x0, b)
    t = np.zeros(n)
    level = np.full(n, float(p.x0))
    record = np.full(n, base)  # running max of the pre-tax path, floored at b
    acc = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    ruined = np.zeros(n, dtype=bool)

    iterations = 0
    while alive.any():
        iterations += 1
        if iterations > EVENT_CAP:
            raise EventCapExceeded(f"exceeded {EVENT_CAP} events per path")
        wait = draws.exponentials(lam)
        claim = draws.exponentials(mu)

        t_claim = t + wait
        end = np.minimum(t_claim, horizon)
        level_end = level + c * (end - t)
        # Record growth occupies [taxed_from, end]; empty when the barrier
        # is not reached before the interval ends.
        taxed_from = np.minimum(t + (record - level) / c, end)
        tax = (ell * c / q) * np.exp(-q * taxed_from) \
            * (-np.expm1(-q * (end - taxed_from)))
        record_end = np.maximum(record, level_end)

        truncated = t_claim >= horizon
        settles = alive & truncated
        continues = alive & ~truncated
        level_post = level_end - claim
        net_post = level_post - ell * (record_end - base)
        ruin_now = continues & (net_post < 0.0)

        acc = np.where(alive, acc + tax, acc)
        acc = np.where(ruin_now, acc + s_value * np.exp(-q * t_claim), acc)

        if capture is not None:
            capture.add(alive=alive, t0=t, t1=end, level0=level, level1=level_end,
                        record0=record, record1=record_end, taxed_from=taxed_from,
                        tax=tax, claim=claim, net_post=net_post,
                        truncated=settles, ruined=ruin_now)

        survives = continues & ~ruin_now
        level = np.where(survives, level_post, level)
        record = np.where(survives, record_end, record)
        t = np.where(alive, t_claim, t)
        ruined |= ruin_now
        alive = survives

    mean, stderr = _reduce(acc, cfg)
    bias_bound = math.exp(-q * horizon) * (abs(s_value) + ell * c / q)
    return SimResult(
        mean=mean,
        stderr=stderr,
        n_paths=n,
        bias_bound=bias_bound,
        bias_exceeded=bool(bias_bound > 0.0 and not bias_bound < 0.1 * stderr),
        ruin_fraction=float(np.mean(ruined)),
    )


# ---------------------------------------------------------------------------
# Capital-injection engine
# ---------------------------------------------------------------------------


def simulate_injection(p: InjectionProblem, a: float, cfg: SimConfig,
                       capture: Optional[_Capture] = None) -> SimResult:
    """Estimate the discounted tax-minus-injection-cost objective at x0.

    Phase 0 (delay or post-ruin): the path drifts upward, claims that push
    it negative are topped up to zero at cost varphi per unit, and no tax
    accrues until the path reaches its current target (the initial
    threshold a, or the memory level left by the last taxed phase).  Phase
    1 (taxed): tax accrues at rate ell*c while the path sits at its regime
    record, which then grows at (1-ell)*c; the first claim that takes the
    level negative is topped up to zero, the record is remembered as the
    new target, and the path re-enters phase 0.
    """
    a = _require_level("threshold a", a)
    model, q = p.scale.model, p.scale.q
    c, lam, mu = model.c, model.lam, model.mu
    ell, varphi = p.ell, p.varphi
    horizon = float(cfg.horizon)
    n = cfg.n_paths
    draws = _Draws(cfg)

    start_taxed = p.x0 >= a
    t = np.zeros(n)
    level = np.full(n, float(p.x0))
    taxed = np.full(n, start_taxed)
    # Barrier: regime record in a taxed phase, upcross target otherwise.
    barrier = np.full(n, float(max(p.x0, a) if start_taxed else a))
    acc = np.zeros(n)
    alive = np.ones(n, dtype=bool)

    iterations = 0
    while alive.any():
        iterations += 1
        if iterations > EVENT_CAP:
            raise EventCapExceeded(f"exceeded {EVENT_CAP} events per path")
        wait = draws.exponentials(lam)
        claim = draws.exponentials(mu)

        t_claim = t + wait
        end = np.minimum(t_claim, horizon)
        duration = end - t
        # Time to reach the barrier at full drift; level <= barrier always.
        reach = (barrier - level) / c
        hits = reach < duration
        hit_time = t + np.minimum(reach, duration)
        above = np.where(hits, duration - reach, 0.0)
        level_end = np.where(hits, barrier + (1.0 - ell) * c * above,
                             level + c * duration)
        # Paths at the barrier are taxed records from the hit onward; a
        # phase-0 path that reaches its target becomes taxed there.
        taxed_end = taxed | hits
        barrier_end = np.where(hits, level_end, barrier)
        tax = np.where(hits, (ell * c / q) * np.exp(-q * hit_time)
                       * (-np.expm1(-q * (end - hit_time))), 0.0)

        truncated = t_claim >= horizon
        continues = alive & ~truncated
        level_post = level_end - claim
        shortfall = continues & (level_post < 0.0)
        injected = np.where(shortfall, -level_post, 0.0)
        # A shortfall ends a taxed phase: remember the record as the next
        # target; in phase 0 it is just topped up toward the same target.
        ruin_taxed = shortfall & taxed_end

        acc = np.where(alive, acc + tax, acc)
        acc = np.where(shortfall, acc - varphi * injected * np.exp(-q * t_claim), acc)

        if capture is not None:
            capture.add(alive=alive, t0=t, t1=end, taxed0=taxed, taxed1=taxed_end,
                        level0=level, level1=level_end, barrier0=barrier,
                        barrier1=barrier_end, hit_time=hit_time, tax=tax,
                        claim=claim, injected=injected, shortfall=shortfall,
                        ruin_taxed=ruin_taxed, truncated=alive & truncated)

        level = np.where(continues, np.maximum(level_post, 0.0), level)
        barrier = np.where(continues, barrier_end, barrier)
        taxed = np.where(continues, taxed_end & ~ruin_taxed, taxed)
        t = np.where(alive, t_claim, t)
        alive = continues

    mean, stderr = _reduce(acc, cfg)
    bias_bound = math.exp(-q * horizon) * (ell * c / q + varphi * lam / (mu * q))
    return SimResult(
        mean=mean,
        stderr=stderr,
        n_paths=n,
        bias_bound=bias_bound,
        bias_exceeded=bool(bias_bound > 0.0 and not bias_bound < 0.1 * stderr),
        ruin_fraction=None,
    )


# ---------------------------------------------------------------------------
# Path inspection (step-by-step views of the engines' own paths)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TerminalStep:
    """One inter-claim interval of one simulated terminal-mode path."""

    t_start: float
    t_end: float
    level_start: float
    level_end: float
    record_start: float
    record_end: float
    taxed_from: float
    tax_paid: float
    claim_size: float
    net_after_claim: float
    truncated: bool
    ruined: bool


@dataclass(frozen=True)
class InjectionStep:
    """One inter-claim interval of one simulated injection-mode path."""

    t_start: float
    t_end: float
    taxed_start: bool
    taxed_end: bool
    level_start: float
    level_end: float
    barrier_start: float
    barrier_end: float
    hit_time: float
    tax_paid: float
    claim_size: float
    injected: float
    ended_taxed_phase: bool
    truncated: bool


def inspect_terminal_paths(p: TerminalProblem, b: float,
                           cfg: SimConfig) -> List[List[TerminalStep]]:
    """Run the terminal engine and return every path's step log."""
    capture = _Capture()
    simulate_terminal(p, b, cfg, capture=capture)
    paths: List[List[TerminalStep]] = [[] for _ in range(cfg.n_paths)]
    for frame in capture.frames:
        for j in np.flatnonzero(frame["alive"]):
            paths[j].append(TerminalStep(
                t_start=float(frame["t0"][j]),
                t_end=float(frame["t1"][j]),
                level_start=float(frame["level0"][j]),
                level_end=float(frame["level1"][j]),
                record_start=float(frame["record0"][j]),
                record_end=float(frame["record1"][j]),
                taxed_from=float(frame["taxed_from"][j]),
                tax_paid=float(frame["tax"][j]),
                claim_size=float(frame["claim"][j]),
                net_after_claim=float(frame["net_post"][j]),
                truncated=bool(frame["truncated"][j]),
                ruined=bool(frame["ruined"][j]),
            ))
    return paths


def inspect_injection_paths(p: InjectionProblem, a: float,
                            cfg: SimConfig) -> List[List[InjectionStep]]:
    """Run the injection engine and return every path's step log."""
    capture = _Capture()
    simulate_injection(p, a, cfg, capture=capture)
    paths: List[List[InjectionStep]] = [[] for _ in range(cfg.n_paths)]
    for frame in capture.frames:
        for j in np.flatnonzero(frame["alive"]):
            paths[j].append(InjectionStep(
                t_start=float(frame["t0"][j]),
                t_end=float(frame["t1"][j]),
                taxed_start=bool(frame["taxed0"][j]),
                taxed_end=bool(frame["taxed1"][j]),
                level_start=float(frame["level0"][j]),
                level_end=float(frame["level1"][j]),
                barrier_start=float(frame["barrier0"][j]),
                barrier_end=float(frame["barrier1"][j]),
                hit_time=float(frame["hit_time"][j]),
                tax_paid=float(frame["tax"][j]),
                claim_size=float(frame["claim"][j]),
                injected=float(frame["injected"][j]),
                ended_taxed_phase=bool(frame["ruin_taxed"][j]),
                truncated=bool(frame["truncated"][j]),
            ))
    return paths


__all__ = [
    "EVENT_CAP",
    "SimConfig",
    "SimResult",
    "simulate_terminal",
    "simulate_injection",
    "TerminalStep",
    "InjectionStep",
    "inspect_terminal_paths",
    "inspect_injection_paths",
]
