"""Feasibility of the first-stage random partial coloring, in the log domain.

The degree caps (a, b) hold with positive probability when P_a + P_b < 1,
where P_a bounds the chance that some line forms dangerous pairs with more
than a other lines and P_b the chance that some point sits on more than b
lines involved in dangerous pairs.  Both are powers of a per-pair factor

    K = 2^d * C(22 ln n + d, d) * d^(d/2) / (2 pi (n + 1 - 11 ln n - sqrt n))^((d-1)/2)

times polynomial counting terms; everything is evaluated as LogReal since n
ranges up to 10^300.  The plane order is treated as a continuous parameter
(actual orders are a sparse subset); binomials with the non-integer top use
the Gamma-function continuation, matching the analytic origin of the bound.

"log" in the factor above is the natural log (the same quantity as the
11 ln n reserve-window cap).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .bounds import extension_value
from .errors import InfeasibleError
from .logreal import DD, LogReal, lse_dd

__all__ = [
    "FeasibilityParams", "FeasibilityReport", "OrderThreshold", "RegionRow",
    "log_dangerous_pair_prob", "log_line_overload_prob", "log_point_overload_prob",
    "feasible", "least_feasible_d", "min_order", "region_table",
    "write_region_csv", "write_region_svg",
    "DEFAULT_A_RANGE", "DEFAULT_B_RANGE", "DEFAULT_M_RANGE",
]

LN10 = DD(2.302585092994046, -2.1707562233822494e-16)
LN2PI = DD(1.8378770664093456, -7.756588316134483e-17)
LN2 = DD(0.6931471805599453, 2.3190468138462996e-17)

# Wide enough to contain the optimizer's true argmin for every d >= 8: at
# d = 8 the color constraint admits a*b up to 24 and the optimum sits at
# (a=1, b=24, m=6), so the b range must reach past 24.
DEFAULT_A_RANGE = (1, 8)
DEFAULT_B_RANGE = (4, 32)
DEFAULT_M_RANGE = (2, 12)


@dataclass(frozen=True)
class FeasibilityParams:
    """Continuous order (as log10), color count and degree caps."""

    log10_n: float
    d: int
    a: int
    b: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("color count d must be >= 2")
        if self.a < 1:
            raise ValueError("line cap a must be >= 1")
        if self.b < 4:
            raise ValueError("point cap b must be >= 4")


def _ln_n(log10_n: float) -> DD:
    return LN10 * log10_n


def _ln_denominator_base(log10_n: float, ln_n: DD) -> DD:
    """ln(n + 1 - 11 ln n - sqrt n); raises ValueError when nonpositive."""
    l = float(ln_n)
    if log10_n <= 300.0:
        n = 10.0 ** log10_n
        t = n + 1.0 - 11.0 * l - math.sqrt(n)
        if t <= 0.0:
            raise ValueError(
                f"n + 1 - 11 ln n - sqrt(n) is nonpositive at log10_n = {log10_n}")
        return DD(math.log(t))
    # beyond float range the correction underflows: ratio terms are exp-small
    ratio = math.exp(math.log(11.0 * l) - l) + math.exp(-0.5 * l)
    return ln_n + math.log1p(-ratio)


def _log_binom_gamma(x: float, k: int) -> float:
    """ln C(x, k) for real x > k - 1 via the Gamma continuation."""
    return math.lgamma(x + 1.0) - math.lgamma(k + 1.0) - math.lgamma(x - k + 1.0)


def _log_binom_int_top(ln_top: DD, k: int) -> DD:
    """ln C(N, k) for small k with N given only through ln N:
    sum_{i=0..k-1} ln(N - i) - ln k!."""
    acc = DD(0.0)
    inv = math.exp(-float(ln_top)) if float(ln_top) < 700.0 else 0.0
    for i in range(k):
        if i and inv and i * inv >= 1.0:
            raise ValueError(f"binomial top smaller than {k}")
        corr = math.log1p(-i * inv) if i and inv else 0.0
        acc = acc + ln_top + corr
    return acc - math.lgamma(k + 1.0)


def log_dangerous_pair_prob(log10_n: float, d: int) -> LogReal:
    """Per-pair dangerous probability factor K, as a LogReal."""
    if d < 2:
        raise ValueError("color count d must be >= 2")
    ln_n = _ln_n(log10_n)
    ln_t = _ln_denominator_base(log10_n, ln_n)
    x = 22.0 * float(ln_n) + d
    total = (LN2 * d
             + DD(_log_binom_gamma(x, d))
             + DD(math.log(d)) * (d / 2.0)
             - (LN2PI + ln_t) * ((d - 1) / 2.0))
    return LogReal.from_log(total)


def log_line_overload_prob(params: FeasibilityParams) -> LogReal:
    """Bound on P(some line is in dangerous pairs with more than a others):
    K^(a+1) * (n^2+n+1) * C(n^2+n, a+1)."""
    ln_n = _ln_n(params.log10_n)
    k = log_dangerous_pair_prob(params.log10_n, params.d)
    ln_sites = lse_dd([ln_n * 2, ln_n, DD(0.0)])          # ln(n^2+n+1)
    ln_pairs_top = lse_dd([ln_n * 2, ln_n])               # ln(n^2+n)
    total = k.log * (params.a + 1) + ln_sites + _log_binom_int_top(ln_pairs_top, params.a + 1)
    return LogReal.from_log(total)


def log_point_overload_prob(params: FeasibilityParams) -> LogReal:
    """Bound on P(some point lies on more than b lines involved in dangerous
    pairs): K^(b+1) * 11 ln n * (n^2+n+1) * C(n+1, b+1) * (n^2+n-(b+1))^(b+1) / (n+1)."""
    if math.log10(params.b) > params.log10_n:
        raise ValueError(f"cap b = {params.b} exceeds the order 10^{params.log10_n}")
    ln_n = _ln_n(params.log10_n)
    k = log_dangerous_pair_prob(params.log10_n, params.d)
    ln_sites = lse_dd([ln_n * 2, ln_n, DD(0.0)])
    ln_np1 = lse_dd([ln_n, DD(0.0)])                      # ln(n+1)
    ln_pairs_top = lse_dd([ln_n * 2, ln_n])               # ln(n^2+n)
    inv = math.exp(-float(ln_pairs_top)) if float(ln_pairs_top) < 700.0 else 0.0
    ln_reduced = ln_pairs_top + (math.log1p(-(params.b + 1) * inv) if inv else 0.0)
    total = (k.log * (params.b + 1)
             + DD(math.log(11.0 * float(ln_n)))
             + ln_sites
             + _log_binom_int_top(ln_np1, params.b + 1)
             + ln_reduced * (params.b + 1)
             - ln_np1)
    return LogReal.from_log(total)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    log_pa: float
    log_pb: float
    log_total: float          # ln(P_a + P_b)
    log_margin: float | None  # ln(1 - (P_a + P_b)) when feasible


def feasible(params: FeasibilityParams) -> FeasibilityReport:
    """True iff 1 - (P_a + P_b) > 0 for the given caps and order."""
    pa = log_line_overload_prob(params)
    pb = log_point_overload_prob(params)
    total = pa + pb
    ok = total.less_than_one()
    margin = math.log1p(-math.exp(total.log_float())) if ok else None
    return FeasibilityReport(ok, pa.log_float(), pb.log_float(), total.log_float(), margin)


def least_feasible_d(log10_n: float, a: int, b: int, d_max: int = 64) -> int:
    """Smallest color count making the caps feasible at this order.

    This is the operational first-stage estimate: the bound formulas define
    the required color count only through the feasibility inequality.
    """
    for d in range(2, d_max + 1):
        try:
            if feasible(FeasibilityParams(log10_n, d, a, b)).feasible:
                return d
        except ValueError:
            continue
    raise InfeasibleError(
        f"no d <= {d_max} is feasible at log10_n = {log10_n} with caps ({a}, {b})")


@dataclass(frozen=True)
class OrderThreshold:
    d: int
    log10_n_min: float
    a: int
    b: int
    m: int


def _threshold_for_caps(d: int, a: int, b: int, tol: float,
                        lo: float, hi: float) -> float | None:
    """Least feasible log10_n for fixed caps by bisection; None if infeasible
    even at hi.  Feasibility is monotone in n past the threshold on the
    supported grid."""
    def ok(x: float) -> bool:
        try:
            return feasible(FeasibilityParams(x, d, a, b)).feasible
        except ValueError:
            return False

    if not ok(hi):
        return None
    if ok(lo):
        return lo
    fail, good = lo, hi
    while good - fail > tol:
        mid = 0.5 * (fail + good)
        if ok(mid):
            good = mid
        else:
            fail = mid
    return good


def min_order(d: int, a_range: tuple[int, int] = DEFAULT_A_RANGE,
              b_range: tuple[int, int] = DEFAULT_B_RANGE,
              m_range: tuple[int, int] = DEFAULT_M_RANGE,
              tol: float = 0.01, lo: float = 2.0, hi: float = 300.0) -> OrderThreshold:
    """Smallest (continuous) order admitting a legitimate d-coloring via the
    two-stage argument: minimize the feasibility threshold over caps (a, b)
    and free-block sizes m subject to the color constraint
    m/(m-1) * (m! a b (m-1))^(1/m) <= d.

    Raises InfeasibleError when no grid point is feasible by hi (the case for
    every d <= 7: the tail bounds then diverge for all admissible caps).
    """
    best: OrderThreshold | None = None
    for a in range(a_range[0], a_range[1] + 1):
        for b in range(b_range[0], b_range[1] + 1):
            admissible = [m for m in range(m_range[0], m_range[1] + 1)
                          if extension_value(a, b, m) <= d]
            if not admissible:
                continue
            m_star = min(admissible, key=lambda m: (extension_value(a, b, m), m))
            thr = _threshold_for_caps(d, a, b, tol, lo, hi)
            if thr is None:
                continue
            if best is None or thr < best.log10_n_min:
                best = OrderThreshold(d, thr, a, b, m_star)
    if best is None:
        raise InfeasibleError(
            f"no feasible (a, b, m) for d = {d} within a <= {a_range[1]}, "
            f"b <= {b_range[1]}, m <= {m_range[1]}, log10_n <= {hi}")
    return best


@dataclass(frozen=True)
class RegionRow:
    d: int
    a: int | None
    b: int | None
    m: int | None
    log10_n_min: float | None


def region_table(d_min: int, d_max: int, a_range=DEFAULT_A_RANGE,
                 b_range=DEFAULT_B_RANGE, m_range=DEFAULT_M_RANGE,
                 tol: float = 0.01, lo: float = 2.0, hi: float = 300.0) -> list[RegionRow]:
    """One row per color count; infeasible rows keep None entries."""
    rows = []
    for d in range(d_min, d_max + 1):
        try:
            t = min_order(d, a_range, b_range, m_range, tol, lo, hi)
            rows.append(RegionRow(d, t.a, t.b, t.m, t.log10_n_min))
        except InfeasibleError:
            rows.append(RegionRow(d, None, None, None, None))
    return rows


def write_region_csv(rows: list[RegionRow], destination) -> None:
    lines = ["d,a,b,m,log10_n_min"]
    for r in rows:
        if r.log10_n_min is None:
            lines.append(f"{r.d},,,,")
        else:
            lines.append(f"{r.d},{r.a},{r.b},{r.m},{r.log10_n_min:.2f}")
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def write_region_svg(rows: list[RegionRow], destination) -> None:
    """Staircase chart of the feasible region: color count on the x axis,
    minimum order on a log-scaled y axis.  Deterministic output (no
    timestamps or generator ids)."""
    width, height = 640, 420
    ml, mr, mt, mb = 60, 20, 20, 45
    plot_w, plot_h = width - ml - mr, height - mt - mb

    feasible_rows = [r for r in rows if r.log10_n_min is not None]
    d_lo = rows[0].d
    d_hi = rows[-1].d + 1
    y_max = max((r.log10_n_min for r in feasible_rows), default=1.0) * 1.1 + 1.0

    def x_of(d: float) -> float:
        return ml + plot_w * (d - d_lo) / max(1, d_hi - d_lo)

    def y_of(v: float) -> float:
        return mt + plot_h * (1.0 - v / y_max)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + plot_h}" x2="{ml + plot_w}" y2="{mt + plot_h}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + plot_h}" stroke="black"/>',
    ]

    pts = []
    for r in feasible_rows:
        y = y_of(r.log10_n_min)
        pts.append(f"{x_of(r.d):.2f},{y:.2f}")
        pts.append(f"{x_of(r.d + 1):.2f},{y:.2f}")
    if pts:
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     'stroke="#1f6fb2" stroke-width="2"/>')

    for r in rows:
        parts.append(f'<text x="{x_of(r.d + 0.5):.2f}" y="{mt + plot_h + 16}" '
                     f'font-size="11" text-anchor="middle">{r.d}</text>')
    tick_step = max(1, int(y_max // 6))
    k = 0
    while k <= y_max:
        y = y_of(k)
        parts.append(f'<line x1="{ml - 4}" y1="{y:.2f}" x2="{ml}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.2f}" font-size="11" '
                     f'text-anchor="end">10^{k}</text>')
        k += tick_step
    parts.append(f'<text x="{ml + plot_w / 2:.0f}" y="{height - 10}" font-size="12" '
                 'text-anchor="middle">colors</text>')
    parts.append(f'<text x="14" y="{mt + plot_h / 2:.0f}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {mt + plot_h / 2:.0f})">smallest feasible order</text>')
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")
