"""Exact p-adic scalars and the extended ultrametric norm value lattice.

Scalars are plain :class:`fractions.Fraction` objects interpreted as elements
of Q_p for the prime carried by a :class:`PAdicContext`.  Norms live in the
extended value group {0} ∪ p^Z ∪ {∞}, modeled by :class:`UltraNorm`, so that
every comparison against a rational threshold is decided exactly by integer
cross-multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional


class UltrapencilError(Exception):
    """Base class for domain errors raised by this package."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PAdicContext:
    """The prime p fixing the valuation; desk-scale primes only."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")


_ZERO = 0
_PPOW = 1
_INF = 2

_KIND_NAMES = {_ZERO: "zero", _PPOW: "ppow", _INF: "inf"}


@total_ordering
@dataclass(frozen=True)
class UltraNorm:
    """A point of the extended value group: 0, p^(-v), or infinity.

    The stored exponent ``v`` means the real value p^(-v); larger v means a
    smaller norm.  Zero is the bottom of the order, Infinity the top.
    """

    kind: int
    v: int = 0

    @staticmethod
    def zero() -> "UltraNorm":
        return UltraNorm(_ZERO)

    @staticmethod
    def ppow(v: int) -> "UltraNorm":
        return UltraNorm(_PPOW, v)

    @staticmethod
    def one() -> "UltraNorm":
        return UltraNorm(_PPOW, 0)

    @staticmethod
    def infinity() -> "UltraNorm":
        return UltraNorm(_INF)

    @property
    def is_zero(self) -> bool:
        return self.kind == _ZERO

    @property
    def is_finite(self) -> bool:
        return self.kind == _PPOW

    @property
    def is_infinite(self) -> bool:
        return self.kind == _INF

    def _order_key(self):
        # Zero < any p-power < Infinity; among p-powers smaller exponent wins.
        if self.kind == _ZERO:
            return (0, 0)
        if self.kind == _PPOW:
            return (1, -self.v)
        return (2, 0)

    def __lt__(self, other: "UltraNorm") -> bool:
        return self._order_key() < other._order_key()

    def __mul__(self, other: "UltraNorm") -> "UltraNorm":
        if self.kind == _ZERO or other.kind == _ZERO:
            return UltraNorm.zero()
        if self.kind == _INF or other.kind == _INF:
            return UltraNorm.infinity()
        return UltraNorm.ppow(self.v + other.v)

    def __truediv__(self, other: "UltraNorm") -> "UltraNorm":
        if other.kind == _ZERO:
            if self.kind == _ZERO:
                raise ZeroDivisionError("0/0 in the norm lattice")
            return UltraNorm.infinity()
        if self.kind == _ZERO:
            return UltraNorm.zero()
        if self.kind == _INF:
            return UltraNorm.infinity()
        if other.kind == _INF:
            return UltraNorm.zero()
        return UltraNorm.ppow(self.v - other.v)

    def as_fraction(self, p: int) -> Fraction:
        """Exact rational value p^(-v); only defined for finite norms."""
        if self.kind != _PPOW:
            raise ValueError(f"no rational value for {self}")
        if self.v >= 0:
            return Fraction(1, p**self.v)
        return Fraction(p ** (-self.v))

    def to_json(self) -> dict:
        if self.kind == _PPOW:
            return {"kind": "ppow", "v": self.v}
        return {"kind": _KIND_NAMES[self.kind]}

    @staticmethod
    def from_json(obj: dict) -> "UltraNorm":
        kind = obj["kind"]
        if kind == "zero":
            return UltraNorm.zero()
        if kind == "inf":
            return UltraNorm.infinity()
        if kind == "ppow":
            return UltraNorm.ppow(int(obj["v"]))
        raise ValueError(f"bad norm kind {kind!r}")

    def __repr__(self) -> str:
        if self.kind == _ZERO:
            return "UltraNorm.zero()"
        if self.kind == _INF:
            return "UltraNorm.infinity()"
        return f"UltraNorm.ppow({self.v})"


def int_valuation(n: int, p: int) -> int:
    """v_p of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is +infinity")
    n = abs(n)
    v = 0
    while n % p == 0:
        v += 1
        n //= p
    return v


def valuation(x: Fraction, ctx: PAdicContext) -> Optional[int]:
    """p-adic valuation v_p(x); None stands for +infinity (x = 0)."""
    if x == 0:
        return None
    return int_valuation(x.numerator, ctx.p) - int_valuation(x.denominator, ctx.p)


def padic_abs(x: Fraction, ctx: PAdicContext) -> UltraNorm:
    """|x|_p as an UltraNorm: Zero for x = 0, else p^(-v_p(x))."""
    v = valuation(x, ctx)
    if v is None:
        return UltraNorm.zero()
    return UltraNorm.ppow(v)


def cmp_norm(n: UltraNorm, q: Fraction, ctx: PAdicContext) -> int:
    """Exact three-way comparison of a norm value against a positive rational.

    Returns -1, 0 or 1 for n < q, n = q, n > q.
    """
    if q <= 0:
        raise ValueError("threshold must be positive")
    if n.is_zero:
        return -1
    if n.is_infinite:
        return 1
    val = n.as_fraction(ctx.p)
    if val < q:
        return -1
    if val > q:
        return 1
    return 0


def ensure_epsilon(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    return eps


def floor_log_p(q: Fraction, p: int) -> int:
    """Largest integer e with p^e <= q, for rational q > 0."""
    if q <= 0:
        raise ValueError("q must be positive")
    e = 0
    if q >= 1:
        while Fraction(p) ** (e + 1) <= q:
            e += 1
    else:
        while Fraction(p) ** e > q:
            e -= 1
    return e


def largest_ppow_below(q: Fraction, p: int) -> int:
    """Exponent v of the largest p-power strictly below q: p^(-v) < q <= p^(-v+1).

    Canonicalizes the strict inequality |x| < q over the discrete value group.
    """
    e = floor_log_p(q, p)  # p^e <= q < p^(e+1)
    if Fraction(p) ** e == q:
        return -e + 1
    return -e


def parse_rational(s: str) -> Fraction:
    """Parse "num/den" or a bare integer string."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
