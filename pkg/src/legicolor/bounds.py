"""Color-count guarantees for the resampling search.

For an instance whose events erase l free variables each (l ranging over a
set E), define the weight polynomial w(x) = 1 + sum_{l in E} x^l.  The
guarantee hinges on the positive root tau of w(x) - x*w'(x) = 0 and the slope
gamma = w'(tau): the search halts, in expectation, once the number of colors
reaches ceil(gamma * sup (d_l * m)^(1/l)), where d_l caps how many events of
erasure size l share a variable and m caps decodable extensions per event.

For the plane pair instances every event has the same erasure size m, giving
the closed forms tau = (m-1)^(-1/m), gamma = m*(m-1)^((1-m)/m) and the color
expression m/(m-1) * (m! * a * b * (m-1))^(1/m) minimized by optimal_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

__all__ = [
    "ExponentProfile", "SaddlePoint", "BoundResult", "OptimalM",
    "weight_poly", "weight_poly_deriv", "solve_saddle", "color_bound",
    "extension_value", "optimal_m", "legitimate_color_bound", "log_factorial",
]

_REL_TOL = 1e-12
_CLOSED_FORM_TOL = 1e-10


def weight_poly(exponents, x: float) -> float:
    """1 + sum over l in exponents of x^l."""
    if x < 0:
        raise ValueError("evaluation point must be >= 0")
    return 1.0 + sum(x ** l for l in set(exponents))


def weight_poly_deriv(exponents, x: float) -> float:
    if x < 0:
        raise ValueError("evaluation point must be >= 0")
    return sum(l * x ** (l - 1) for l in set(exponents))


@dataclass(frozen=True)
class SaddlePoint:
    tau: float
    gamma: float
    residual: float


def _saddle_gap(exponents, x: float) -> float:
    # w(x) - x w'(x) = 1 - sum (l-1) x^l; positive at 0, strictly decreasing
    return 1.0 - sum((l - 1) * x ** l for l in exponents)


def solve_saddle(exponents) -> SaddlePoint:
    """Root tau of w(x) = x*w'(x) by bracketed bisection, plus gamma = w'(tau).

    Exponent sets containing l < 2 are rejected: the l = 1 term cancels from
    the gap, and for E = {1} the gap is identically 1 with no root.
    """
    exponents = sorted(set(int(l) for l in exponents))
    if not exponents:
        raise ValueError("exponent set is empty")
    if exponents[0] < 2:
        raise ValueError(f"exponents must all be >= 2, got {exponents[0]}")

    lo, hi = 0.0, 1e-6
    scanned = [hi]
    while _saddle_gap(exponents, hi) > 0:
        lo, hi = hi, hi * 2
        scanned.append(hi)
        if hi > 1e9:
            raise ArithmeticError(
                f"no sign change of the saddle gap on (0, {hi:.3g}); scanned {scanned[:5]}...")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _saddle_gap(exponents, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _REL_TOL * hi:
            break
    tau = 0.5 * (lo + hi)
    # one Newton polish; gap' = -sum l(l-1) x^(l-1)
    slope = -sum(l * (l - 1) * tau ** (l - 1) for l in exponents)
    if slope != 0:
        tau -= _saddle_gap(exponents, tau) / slope
    gamma = weight_poly_deriv(exponents, tau)
    residual = weight_poly(exponents, tau) - tau * gamma

    if len(exponents) == 1:
        m = exponents[0]
        tau_closed = (m - 1) ** (-1.0 / m)
        if abs(tau - tau_closed) > _CLOSED_FORM_TOL * max(1.0, tau_closed):
            raise ArithmeticError(
                f"numeric root {tau!r} disagrees with closed form {tau_closed!r}")
    return SaddlePoint(tau, gamma, residual)


@dataclass(frozen=True)
class ExponentProfile:
    """Per erasure size l: (d_l, largest extension cap m among its events)."""

    entries: Mapping[int, tuple[int, int]]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("profile is empty")
        for l, (dl, m) in self.entries.items():
            if dl < 1 or m < 1:
                raise ValueError(f"profile entry for l={l} must have d_l, m >= 1")

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))


@dataclass(frozen=True)
class BoundResult:
    tau: float
    gamma: float
    sup_base: float  # sup over l of (d_l * m_l)^(1/l)
    colors: int


def color_bound(profile: ExponentProfile) -> BoundResult:
    """Colors sufficient for the search: ceil(gamma * sup (d_l*m_l)^(1/l)).

    The sup over events reduces to per-l maxima because the base is monotone
    in m at fixed l.
    """
    sp = solve_saddle(profile.exponents)
    sup_base = max((dl * m) ** (1.0 / l) for l, (dl, m) in profile.entries.items())
    return BoundResult(sp.tau, sp.gamma, sup_base, math.ceil(sp.gamma * sup_base))


def log_factorial(m: int) -> float:
    """ln(m!): exact integer factorial through 20, log-gamma beyond."""
    if m < 0:
        raise ValueError("factorial of a negative number")
    if m <= 20:
        return math.log(math.factorial(m)) if m > 1 else 0.0
    return math.lgamma(m + 1)


def extension_value(a: int, b: int, m: int) -> float:
    """m/(m-1) * (m! * a * b * (m-1))^(1/m), evaluated in log domain."""
    if m < 2:
        raise ValueError("free-block size m must be >= 2")
    log_inner = log_factorial(m) + math.log(a) + math.log(b) + math.log(m - 1)
    return m / (m - 1) * math.exp(log_inner / m)


@dataclass(frozen=True)
class OptimalM:
    m: int
    value: float


def optimal_m(a: int, b: int, m_max: int = 50) -> OptimalM:
    """Integer m in [2, m_max] minimizing extension_value; ties go to smaller m.

    The expression grows like m/e for large m, so the argmin stabilizes well
    below any sensible m_max.
    """
    if a < 1:
        raise ValueError("a must be >= 1")
    if b < 4:
        raise ValueError("b must be >= 4")
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    best = OptimalM(2, extension_value(a, b, 2))
    for m in range(3, m_max + 1):
        v = extension_value(a, b, m)
        if v < best.value:
            best = OptimalM(m, v)
    return best


def legitimate_color_bound(log10_n: float, a: int, b: int,
                           d_estimator: Callable[[float, int, int], int],
                           m_max: int = 50) -> int:
    """Colors sufficient for a legitimate coloring of a plane of order
    10^log10_n: the larger of the first-stage estimate d(n, a, b) and the
    extension-stage ceiling.

    d_estimator supplies the least color count whose random partial coloring
    keeps every point in at most a*b dangerous pairs (see
    feasibility.least_feasible_d); estimator failures propagate, nothing is
    fabricated.
    """
    first_stage = d_estimator(log10_n, a, b)
    return max(int(first_stage), math.ceil(optimal_m(a, b, m_max).value))
