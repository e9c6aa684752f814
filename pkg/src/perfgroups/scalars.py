"""Exact arithmetic in Z[1/p] and digit expansions of N[1/p].

Elements are plain :class:`fractions.Fraction` values whose denominator is a
power of ``p``.  The prime is held by a :class:`Localization` context rather
than by each value, so arithmetic is ordinary ``Fraction`` arithmetic and the
context validates, splits and formats values.

>>> R = Localization(3)
>>> x = R.parse("5/3")
>>> R.to_digits(x).digits
{-1: 2, 0: 1}
>>> lucas_digit(Fraction(4, 3), Fraction(1, 3), 3)
1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterator, Tuple, Union

Scalar = Union[int, Fraction]


class ScalarError(ValueError):
    """Base class for scalar errors."""


class NegativeValue(ScalarError):
    pass


class NotLocalized(ScalarError):
    """Denominator is not a power of the context prime."""


class PrimeMismatch(ScalarError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def strip_p(n: int, p: int) -> int:
    """Prime-to-p part of ``n`` (sign dropped); ``strip_p(0) == 0``."""
    n = abs(n)
    if n == 0:
        return 0
    while n % p == 0:
        n //= p
    return n


def p_power_exponent(d: int, p: int) -> int:
    """Return k with d == p**k, or -1 if d is not a power of p."""
    if d <= 0:
        return -1
    k = 0
    while d % p == 0:
        d //= p
        k += 1
    return k if d == 1 else -1


_SCALAR_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Localization:
    """The ring Z[1/p] for a fixed prime ``p``."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ScalarError(f"{self.p} is not prime")

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        return p_power_exponent(x.denominator, self.p) >= 0

    def element(self, x) -> Fraction:
        """Coerce ``x`` into the ring, raising :class:`NotLocalized` otherwise."""
        x = Fraction(x)
        if x not in self:
            raise NotLocalized(f"{x} is not in Z[1/{self.p}]")
        return x

    def make(self, num: int, pexp: int = 0) -> Fraction:
        return Fraction(num, self.p**pexp)

    def split(self, x) -> Tuple[int, int]:
        """Canonical ``(num, pexp)`` with ``x == num / p**pexp`` and p not dividing num if pexp > 0."""
        x = self.element(x)
        return x.numerator, p_power_exponent(x.denominator, self.p)

    def valuation(self, x) -> int:
        x = self.element(x)
        num, pexp = self.split(x)
        return valuation(num, self.p) - pexp

    def is_unit(self, x) -> bool:
        """Units of Z[1/p] are exactly the values +-p**k."""
        x = Fraction(x)
        if x == 0 or x not in self:
            return False
        return p_power_exponent(abs(x.numerator), self.p) >= 0

    def parse(self, s: str) -> Fraction:
        """Parse ``"num"`` or ``"num/den"`` with ``den`` a power of p."""
        if isinstance(s, int):
            return Fraction(s)
        m = _SCALAR_RE.match(str(s))
        if not m:
            raise ScalarError(f"malformed scalar {s!r}; expected 'num' or 'num/den'")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ScalarError(f"zero denominator in {s!r}")
        if p_power_exponent(den, self.p) < 0:
            raise NotLocalized(f"denominator of {s!r} is not a power of {self.p}")
        return Fraction(num, den)

    def format(self, x) -> str:
        return format_scalar(self.element(x))

    def to_digits(self, x) -> "DigitExpansion":
        return to_digits(x, self.p)


def format_scalar(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(s: str, p: int) -> Fraction:
    return Localization(p).parse(s)


@dataclass(frozen=True)
class DigitExpansion:
    """Finite p-adic digit expansion of an element of N[1/p].

    ``digits`` maps position ``i`` (any integer) to a nonzero digit in
    ``1..p-1``; zero digits are not stored.
    """

    p: int
    digits: Dict[int, int] = field(default_factory=dict)

    def __getitem__(self, i: int) -> int:
        return self.digits.get(i, 0)

    def value(self) -> Fraction:
        return sum((Fraction(d) * Fraction(self.p) ** i for i, d in self.digits.items()), Fraction(0))

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.digits))

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self.digits.items()))


def to_digits(x, p: int) -> DigitExpansion:
    """Base-p expansion of a nonnegative element of Z[1/p]."""
    x = Fraction(x)
    if x < 0:
        raise NegativeValue(f"{x} is negative")
    shift = p_power_exponent(x.denominator, p)
    if shift < 0:
        raise NotLocalized(f"{x} is not in Z[1/{p}]")
    n = x.numerator
    digits = {}
    i = -shift
    while n:
        n, d = divmod(n, p)
        if d:
            digits[i] = d
        i += 1
    return DigitExpansion(p, digits)


def clearing_exponent(p: int, *xs) -> int:
    """Smallest l >= 0 with p**l * x integral for every x."""
    l = 0
    for x in xs:
        k = p_power_exponent(Fraction(x).denominator, p)
        if k < 0:
            raise NotLocalized(f"{x} is not in Z[1/{p}]")
        l = max(l, k)
    return l


def lucas_digit(n, j, p: int) -> int:
    """Zeroth p-adic digit of binom(n, j), extended to N[1/p] by p-power scaling.

    Computed digitwise as ``prod binom(n_i, j_i) mod p`` over the union of
    the digit supports; 0 when ``j > n`` or ``j < 0``.
    """
    n, j = Fraction(n), Fraction(j)
    if j < 0 or j > n:
        return 0
    dn, dj = to_digits(n, p), to_digits(j, p)
    out = 1
    for i in set(dn.digits) | set(dj.digits):
        a, b = dn[i], dj[i]
        if b > a:
            return 0
        out = out * comb(a, b) % p
    return out
