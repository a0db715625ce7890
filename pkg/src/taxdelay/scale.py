"""Scale function family for the exponential-claims model.

Everything here is a combination of two exponentials.  With
w1 = a1/c, w2 = a2/c and z1 = q*a1/(c*theta1), z2 = q*a2/(c*theta2):

    W(x)  = w1*e^{theta1 x} - w2*e^{theta2 x}          (0 for x < 0)
    Z(x)  = 1 + q * int_0^x W = z1*e^{theta1 x} - z2*e^{theta2 x}
    Zbar  = int_0^x Z,   Wbar = int_0^x W

(The constant term of Z vanishes identically because z1 - z2 = 1.)

Two exact cancellation identities drive all tail evaluations.  Products
like W'Z - qW^2 look like they grow as e^{2 theta1 x}, but the leading
terms cancel and only the cross terms survive:

    W'(x)Z(x) - q W(x)^2          = (lam/c^2)    * e^{(theta1+theta2) x}
    Z(x)^2 - q W(x)*(Zbar(x)+d/q) = (lam/(c mu)) * e^{(theta1+theta2) x}

with d = net drift c - lam/mu.  Evaluating the left-hand sides naively
loses every significant digit once e^{theta1 x} dominates, so the
bracket kernels below always use the grouped right-hand sides.
"""

from __future__ import annotations

import math

from .errors import InvalidParameter
from .model import LevyModel, SpectralRoots, spectral_roots

__all__ = ["ScaleSet"]


class ScaleSet:
    """Evaluator bundle for W, its derivatives and antiderivative, Z, Zbar.

    Immutable after construction; all coefficients are precomputed from
    the closed-form roots.  Conventions: W(x) = 0 and Z(x) = 1 for x < 0;
    derivative evaluations at 0 return the right-limits.
    """

    def __init__(self, model: LevyModel, q: float):
        self.model = model
        self.q = float(q)
        self.roots: SpectralRoots = spectral_roots(model, q)
        r = self.roots
        c = model.c
        self.theta1 = r.theta1
        self.theta2 = r.theta2
        # coefficients of the two-exponential forms
        self._w1 = r.a1 / c
        self._w2 = r.a2 / c
        self._z1 = self.q * r.a1 / (c * r.theta1)
        self._z2 = self.q * r.a2 / (c * r.theta2)  # < 0
        # grouped-kernel constants (see module docstring)
        self._ruin_const = model.lam / (c * c)
        self._inj_const = model.lam / (c * model.mu)

    # -- W family ----------------------------------------------------------

    def _w_deriv(self, x: float, k: int) -> float:
        # k-th derivative in factored form: the e^{theta1 x} factor is
        # pulled out so the decaying term never cancels catastrophically.
        t1, t2 = self.theta1, self.theta2
        return math.exp(t1 * x) * (
            self._w1 * t1**k - self._w2 * t2**k * math.exp((t2 - t1) * x)
        )

    def w(self, x: float) -> float:
        """Scale function W(x); 0 for x < 0, W(0) = 1/c."""
        if x < 0.0:
            return 0.0
        return self._w_deriv(x, 0)

    def w1(self, x: float) -> float:
        """First derivative W'(x) for x >= 0 (right-limit at 0)."""
        if x < 0.0:
            return 0.0
        return self._w_deriv(x, 1)

    def w2(self, x: float) -> float:
        """Second derivative W''(x) for x >= 0 (right-limit at 0)."""
        if x < 0.0:
            return 0.0
        return self._w_deriv(x, 2)

    def w3(self, x: float) -> float:
        """Third derivative W'''(x) for x >= 0 (right-limit at 0)."""
        if x < 0.0:
            return 0.0
        return self._w_deriv(x, 3)

    def w1_at_zero(self) -> float:
        """W'(0+), which equals (q + lam)/c^2 for this claim family."""
        return (self.roots.a1 * self.theta1 - self.roots.a2 * self.theta2) / self.model.c

    def wbar(self, x: float) -> float:
        """Antiderivative int_0^x W(y) dy; 0 for x <= 0."""
        if x <= 0.0:
            return 0.0
        t1, t2 = self.theta1, self.theta2
        return self._w1 / t1 * math.expm1(t1 * x) - self._w2 / t2 * math.expm1(t2 * x)

    # -- Z family ----------------------------------------------------------

    def z(self, x: float) -> float:
        """Z(x) = 1 + q*int_0^x W; 1 for x < 0."""
        if x < 0.0:
            return 1.0
        t1, t2 = self.theta1, self.theta2
        return math.exp(t1 * x) * (self._z1 - self._z2 * math.exp((t2 - t1) * x))

    def z1d(self, x: float) -> float:
        """Derivative Z'(x) = q*W(x) for x >= 0."""
        return self.q * self.w(x)

    def zbar(self, x: float) -> float:
        """Antiderivative int_0^x Z(y) dy (equals x for x < 0 where Z = 1)."""
        if x < 0.0:
            return x
        t1, t2 = self.theta1, self.theta2
        return self._z1 / t1 * math.expm1(t1 * x) - self._z2 / t2 * math.expm1(t2 * x)

    def zbar_shifted(self, x: float) -> float:
        """Zbar(x) + d/q with d the net drift, in pure two-exponential form.

        The integration constant cancels against d/q exactly
        (z1/theta1 - z2/theta2 = d/q), leaving a form that never loses
        precision for large x.  Defined for x >= 0.
        """
        t1, t2 = self.theta1, self.theta2
        return math.exp(t1 * x) * (
            self._z1 / t1 - self._z2 / t2 * math.exp((t2 - t1) * x)
        )

    # -- log-space ratios ---------------------------------------------------

    def log_w(self, x: float) -> float:
        """log W(x) for x >= 0, stable for arbitrarily large x."""
        if x < 0.0:
            raise InvalidParameter("log_w requires x >= 0")
        t1, t2 = self.theta1, self.theta2
        return t1 * x + math.log(self._w1) + math.log1p(
            -(self._w2 / self._w1) * math.exp((t2 - t1) * x)
        )

    def log_z(self, x: float) -> float:
        """log Z(x) for x >= 0, stable for arbitrarily large x."""
        if x < 0.0:
            raise InvalidParameter("log_z requires x >= 0")
        t1, t2 = self.theta1, self.theta2
        return t1 * x + math.log(self._z1) + math.log1p(
            (-self._z2 / self._z1) * math.exp((t2 - t1) * x)
        )

    # -- stable ratios and kernels ------------------------------------------

    def w_over_w1(self, x: float) -> float:
        """W(x)/W'(x), evaluated as a ratio of the bounded bracket factors."""
        t1, t2 = self.theta1, self.theta2
        u = math.exp((t2 - t1) * x)
        return (self._w1 - self._w2 * u) / (self._w1 * t1 - self._w2 * t2 * u)

    def z_over_z1d(self, x: float) -> float:
        """Z(x)/Z'(x) = Z(x)/(q W(x)), in the same bounded-ratio form."""
        t1, t2 = self.theta1, self.theta2
        u = math.exp((t2 - t1) * x)
        return (self._z1 - self._z2 * u) / (self.q * (self._w1 - self._w2 * u))

    def ruin_kernel(self, x: float) -> float:
        """Grouped form of the bracket W'(x)Z(x)/W(x) - qW(x).

        Equals (lam/c^2) * e^{(theta1+theta2) x} / W(x); the combined
        exponent is evaluated in one shot so neither factor overflows.
        """
        t1, t2 = self.theta1, self.theta2
        return self._ruin_const * math.exp((t1 + t2) * x - self.log_w(x))

    def deficit_kernel(self, x: float) -> float:
        """Grouped form of Z - d*W - (Zbar - d*Wbar) * W'/W, d = net drift.

        For exponential claims the mean overshoot below 0 is 1/mu
        regardless of the level crossed, so this collapses to
        ruin_kernel(x)/mu exactly.
        """
        return self.ruin_kernel(x) / self.model.mu

    def injection_kernel(self, x: float) -> float:
        """Grouped form of Z(x) - q W(x) (Zbar(x) + d/q) / Z(x).

        Equals (lam/(c mu)) * e^{(theta1+theta2) x} / Z(x).
        """
        t1, t2 = self.theta1, self.theta2
        return self._inj_const * math.exp((t1 + t2) * x - self.log_z(x))
