"""Nonnegative reals in the log domain with compensated (double-double)
accumulation.

The tail-bound formulas multiply factors whose logs reach ~1e5 at the orders
of interest (up to 10^300), so log magnitudes are held as an unevaluated
hi+lo pair giving an effective mantissa beyond 80 bits through the additive
pipeline; products add logs exactly, sums go through log-sum-exp (monotone,
accurate to double precision in the correction term).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["DD", "LogReal", "lse_dd"]

_SPLITTER = 134217729.0  # 2^27 + 1, Veltkamp


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@dataclass(frozen=True)
class DD:
    """Double-double: the represented value is hi + lo, |lo| <= ulp(hi)/2."""

    hi: float
    lo: float = 0.0

    def __float__(self) -> float:
        return self.hi + self.lo

    def __add__(self, other) -> "DD":
        if isinstance(other, DD):
            s, e = _two_sum(self.hi, other.hi)
            t, f = _two_sum(self.lo, other.lo)
            e += t
            s, e = _quick_two_sum(s, e)
            e += f
            s, e = _quick_two_sum(s, e)
            return DD(s, e)
        s, e = _two_sum(self.hi, float(other))
        e += self.lo
        s, e = _quick_two_sum(s, e)
        return DD(s, e)

    __radd__ = __add__

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __sub__(self, other) -> "DD":
        return self + (-other if isinstance(other, DD) else -float(other))

    def __mul__(self, scalar) -> "DD":
        f = float(scalar)
        p, e = _two_prod(self.hi, f)
        e += self.lo * f
        p, e = _quick_two_sum(p, e)
        return DD(p, e)

    __rmul__ = __mul__

    def __lt__(self, other) -> bool:
        o = other if isinstance(other, DD) else DD(float(other))
        return (self.hi, self.lo) < (o.hi, o.lo) if self.hi == o.hi else self.hi < o.hi

    def __le__(self, other) -> bool:
        return self < other or float(self - (other if isinstance(other, DD) else DD(float(other)))) == 0.0


def lse_dd(terms: list[DD]) -> DD:
    """log(sum exp(t)) over DD log magnitudes; exact on the dominant term."""
    if not terms:
        raise ValueError("empty log-sum")
    idx = max(range(len(terms)), key=lambda i: float(terms[i]))
    top = terms[idx]
    rest = 0.0
    for i, t in enumerate(terms):
        if i != idx:
            rest += math.exp(float(t - top))
    if rest == 0.0:
        return top
    return top + math.log1p(rest)


@dataclass(frozen=True)
class LogReal:
    """A value >= 0 stored as (sign, natural-log magnitude).

    sign 0 encodes exact zero (log is then meaningless); sign 1 encodes a
    positive value exp(log).  Covers orders far beyond float range (n up to
    and past 10^300 enters only through its log).
    """

    sign: int
    log: DD

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, DD(float("-inf")))

    @classmethod
    def from_log(cls, log_value) -> "LogReal":
        return cls(1, log_value if isinstance(log_value, DD) else DD(float(log_value)))

    @classmethod
    def from_float(cls, x: float) -> "LogReal":
        if x < 0:
            raise ValueError("LogReal holds nonnegative values only")
        if x == 0:
            return cls.zero()
        return cls(1, DD(math.log(x)))

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(1, self.log + other.log)

    def pow_int(self, k: int) -> "LogReal":
        if self.sign == 0:
            return LogReal.zero() if k else LogReal.from_float(1.0)
        return LogReal(1, self.log * k)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        return LogReal(1, lse_dd([self.log, other.log]))

    def log_float(self) -> float:
        return float("-inf") if self.sign == 0 else float(self.log)

    def log10_float(self) -> float:
        return self.log_float() / math.log(10.0)

    def less_than_one(self) -> bool:
        return self.sign == 0 or float(self.log) < 0.0
