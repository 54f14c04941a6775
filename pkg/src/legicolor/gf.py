"""Finite fields GF(p^k) with explicit addition and multiplication tables.

Elements are encoded as integers 0..q-1; the base-p digits of an element are
the coefficients (ascending degree) of its polynomial representative.  For
extension fields the modulus is the lexicographically smallest monic
irreducible polynomial of degree k over GF(p), comparing coefficient tuples
from the highest power down, so builds are deterministic.

Tables are dense q x q arrays; memory grows as 2*q^2 entries, which is the
practical limit long before the configured maximum order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import FieldError

DEFAULT_MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- polynomial helpers over GF(p); coefficient lists, ascending degree -----

def _poly_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p) if m[-1] != 1 else 1
    while len(a) >= len(m):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        if coef:
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - coef * mi) % p
        _poly_trim(a)
        if not a:
            break
    return a


def _is_irreducible(candidate, p):
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(candidate) - 1
    for d in range(1, k // 2 + 1):
        for tail in product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not _poly_mod(candidate, divisor, p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over GF(p).

    The comparison key is the coefficient tuple (c_{k-1}, ..., c_0); the
    returned list is ascending degree including the leading 1.
    """
    if k == 1:
        return (0, 1)
    for high_to_low in product(range(p), repeat=k):
        candidate = list(reversed(high_to_low)) + [1]
        if _is_irreducible(candidate, p):
            return tuple(candidate)
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")


@dataclass(frozen=True)
class GaloisField:
    """Immutable field of order q = p^k backed by lookup tables."""

    p: int
    k: int
    q: int
    modulus: tuple[int, ...]
    add_table: np.ndarray = field(repr=False, compare=False)
    mul_table: np.ndarray = field(repr=False, compare=False)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        row = self.add_table[a]
        return int(np.nonzero(row == 0)[0][0])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        row = self.mul_table[a]
        return int(np.nonzero(row == 1)[0][0])


def _digits(value: int, p: int, k: int):
    out = []
    for _ in range(k):
        out.append(value % p)
        value //= p
    return out


def _encode(coeffs, p: int) -> int:
    out = 0
    for c in reversed(coeffs):
        out = out * p + c
    return out


def gf_build(p: int, k: int, max_order: int = DEFAULT_MAX_ORDER) -> GaloisField:
    """Construct GF(p^k) with full operation tables.

    Raises FieldError for non-prime p, k < 1, or p^k above max_order.
    """
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be >= 1")
    q = p ** k
    if q > max_order:
        raise FieldError(f"order {q} exceeds the configured maximum {max_order}")

    if k == 1:
        idx = np.arange(q, dtype=np.int64)
        add = (idx[:, None] + idx[None, :]) % p
        mul = (idx[:, None] * idx[None, :]) % p
        return GaloisField(p, k, q, smallest_irreducible(p, 1),
                           add.astype(np.uint16), mul.astype(np.uint16))

    modulus = smallest_irreducible(p, k)

    # addition: digitwise mod p, vectorized over base-p digit planes
    idx = np.arange(q, dtype=np.int64)
    digit_planes = []
    rest = idx.copy()
    for _ in range(k):
        digit_planes.append(rest % p)
        rest //= p
    add = np.zeros((q, q), dtype=np.int64)
    weight = 1
    for plane in digit_planes:
        add += weight * ((plane[:, None] + plane[None, :]) % p)
        weight *= p
    add = add.astype(np.uint16)

    # multiplication: exp/log tables over a generator of the cyclic group
    polys = [_poly_trim(_digits(e, p, k)) for e in range(q)]
    mod_list = list(modulus)

    def mul_encoded(a: int, b: int) -> int:
        prod_poly = _poly_mod(_poly_mul(polys[a], polys[b], p), mod_list, p)
        return _encode(prod_poly + [0] * (k - len(prod_poly)), p)

    generator = None
    for g in range(2, q):
        x, order = g, 1
        while x != 1:
            x = mul_encoded(x, g)
            order += 1
        if order == q - 1:
            generator = g
            break
    if generator is None:
        raise FieldError("internal error: no generator found (modulus not irreducible?)")

    exp = np.empty(q - 1, dtype=np.int64)
    exp[0] = 1
    x = 1
    for i in range(1, q - 1):
        x = mul_encoded(x, generator)
        exp[i] = x
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1)

    mul = np.zeros((q, q), dtype=np.int64)
    nz = np.arange(1, q)
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
    return GaloisField(p, k, q, modulus, add, mul.astype(np.uint16))


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p^k, or raise FieldError if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if p * p > q:
            return q, 1  # q itself prime
        if q % p == 0:
            k = 0
            rest = q
            while rest % p == 0:
                rest //= p
                k += 1
            if rest != 1:
                raise FieldError(f"{q} is not a prime power")
            return p, k
    raise FieldError(f"{q} is not a prime power")
