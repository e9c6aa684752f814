"""Classical SL2 in characteristic p: characters, decomposition numbers, Ext^1.

This module is the independent oracle for :mod:`perfgroups.sl2.perfect`.
Decomposition numbers come from peeling simple characters off costandard
characters (unitriangular inversion); first extensions come from the
digit recursions for p > 2.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..scalars import to_digits


class UnsupportedPrime(ValueError):
    pass


class LaurentChar:
    """Finite Laurent polynomial in the weight variable, stored as ``{exponent: multiplicity}``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: Dict[int, int] = {k: v for k, v in dict(coeffs or {}).items() if v}

    def __eq__(self, other):
        return isinstance(other, LaurentChar) and self.coeffs == other.coeffs

    def __repr__(self):
        terms = ", ".join(f"{k}:{v}" for k, v in sorted(self.coeffs.items(), reverse=True))
        return f"LaurentChar({{{terms}}})"

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentChar(out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) - v
        return LaurentChar(out)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentChar({k: v * other for k, v in self.coeffs.items()})
        out: Dict[int, int] = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return LaurentChar(out)

    __rmul__ = __mul__

    def twist(self, q: int) -> "LaurentChar":
        """Frobenius twist: scale every exponent by ``q``."""
        return LaurentChar({k * q: v for k, v in self.coeffs.items()})

    def dim(self) -> int:
        return sum(self.coeffs.values())

    def get(self, k, default=0):
        return self.coeffs.get(k, default)

    def is_symmetric(self) -> bool:
        return all(self.coeffs.get(-k, 0) == v for k, v in self.coeffs.items())


def char_costandard(lam: int) -> LaurentChar:
    if lam < 0:
        return LaurentChar()
    return LaurentChar({lam - 2 * k: 1 for k in range(lam + 1)})


def simple_weights(lam: int, p: int) -> List[int]:
    """Weights of L(lam), one per nonzero Lucas term (all multiplicity one)."""
    ws = [0]
    for i, d in to_digits(lam, p):
        q = p**i
        ws = [w + q * (d - 2 * k) for w in ws for k in range(d + 1)]
    return sorted(ws, reverse=True)


def char_simple(lam: int, p: int) -> LaurentChar:
    """Steinberg tensor product of restricted costandard characters over the digits."""
    ch = LaurentChar({0: 1})
    for i, d in to_digits(lam, p):
        ch = ch * char_costandard(d).twist(p**i)
    return ch


@lru_cache(maxsize=None)
def costandard_factors(lam: int, p: int) -> Tuple[int, ...]:
    """Highest weights of the composition factors of nabla(lam), each of multiplicity one.

    Peels ``ch L(nu)`` off ``ch nabla(lam)`` from the top weight down.
    """
    if lam < 0:
        return ()
    rem = set(range(-lam, lam + 1, 2))
    out = []
    for nu in range(lam, -1, -2):
        if nu in rem:
            out.append(nu)
            for w in simple_weights(nu, p):
                rem.remove(w)
    if rem:
        raise ArithmeticError("character inversion left a remainder")
    return tuple(out)


@dataclass
class DecompTable:
    """``[nabla(lam) : L(mu)]`` for ``0 <= mu <= lam <= lam_max``."""

    lam_max: int
    p: int
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __call__(self, lam: int, mu: int) -> int:
        return self.entries.get((lam, mu), 0)

    def factors(self, lam: int) -> List[int]:
        return sorted((mu for (l, mu), m in self.entries.items() if l == lam and m), reverse=True)

    def rows(self) -> Iterable[Tuple[int, int, int]]:
        return sorted((l, mu, m) for (l, mu), m in self.entries.items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "mu", "multiplicity"])
        w.writerows(self.rows())
        return buf.getvalue()


def decomposition_numbers(lam_max: int, p: int) -> DecompTable:
    """Unitriangular inversion of the character matrix up to ``lam_max``."""
    simple = [char_simple(mu, p) for mu in range(lam_max + 1)]
    table = DecompTable(lam_max, p)
    for lam in range(lam_max + 1):
        rem = char_costandard(lam)
        for mu in range(lam, -1, -2):
            m = rem.get(mu)
            if m:
                table.entries[(lam, mu)] = m
                rem = rem - simple[mu] * m
        if rem.coeffs:
            raise ArithmeticError(f"character of nabla({lam}) not exhausted")
    return table


def _weights_at_least(nu: int, p: int, floor: int) -> np.ndarray:
    """Weights of L(nu) that are >= floor (vectorised, pruned from the top digit)."""
    digs = sorted(to_digits(nu, p), reverse=True)
    lower = [0] * (len(digs) + 1)
    for t in range(len(digs) - 1, -1, -1):
        i, d = digs[t]
        lower[t] = lower[t + 1] + d * p**i
    ws = np.zeros(1, dtype=np.int64)
    for t, (i, d) in enumerate(digs):
        step = p**i * (d - 2 * np.arange(d + 1, dtype=np.int64))
        ws = (ws[:, None] + step[None, :]).ravel()
        ws = ws[ws + lower[t + 1] >= floor]
    return ws


def costandard_multiplicity_classical(lam: int, mu: int, p: int) -> int:
    """``[nabla(lam) : L(mu)]`` by peeling characters, only looking at weights >= mu."""
    if mu < 0 or mu > lam or (lam - mu) % 2:
        return 0
    n = (lam - mu) // 2 + 1  # slot k <-> weight lam - 2k
    rem = np.ones(n, dtype=bool)
    k = 0
    while True:
        nz = np.flatnonzero(rem[k:])
        if nz.size == 0:
            return 0
        k += int(nz[0])
        nu = lam - 2 * k
        if nu == mu:
            return 1
        ws = _weights_at_least(nu, p, mu)
        idx = (lam - ws) // 2
        if not rem[idx].all():
            raise ArithmeticError("character inversion went negative")
        rem[idx] = False


# ---------------------------------------------------------------------------
# First extensions (p > 2)


def _check_prime(p):
    if p == 2:
        raise UnsupportedPrime("the Ext^1 recursions are implemented for p > 2 only")


@lru_cache(maxsize=None)
def _ext_sc(lam: int, mu: int, p: int) -> int:
    if lam < p and mu < p:
        return 0  # restricted weights: Ext^1 vanishes
    a, l0 = divmod(lam, p)
    b, m0 = divmod(mu, p)
    if l0 == m0:
        return _ext_sc(a, b, p)
    if l0 + m0 == p - 2:
        return int(b + 1 == a)
    return 0


def ext1_simple_costandard(lam: int, mu: int, p: int) -> int:
    """``dim Ext^1(L(lam), nabla(mu))`` for classical SL2, p > 2."""
    _check_prime(p)
    if lam < 0 or mu < 0:
        return 0
    return _ext_sc(lam, mu, p)


def hom_with_natural(a: int, b: int, p: int) -> int:
    """``dim Hom(L(a), L(b) (x) L(1))``."""
    if a < 0 or b < 0:
        return 0
    b0 = b % p
    if b0 == 0:
        return int(a == b + 1)
    if b0 < p - 1:
        return int(a == b + 1 or a == b - 1)
    return int(a == b - 1)


@lru_cache(maxsize=None)
def _ext_ss(lam: int, mu: int, p: int) -> int:
    if lam == 0 and mu == 0:
        return 0
    a, l0 = divmod(lam, p)
    b, m0 = divmod(mu, p)
    if l0 == m0:
        return _ext_ss(a, b, p)
    if l0 + m0 == p - 2:
        return hom_with_natural(a, b, p)
    return 0


def ext1_simple_simple(lam: int, mu: int, p: int) -> int:
    """``dim Ext^1(L(lam), L(mu))`` for classical SL2, p > 2."""
    _check_prime(p)
    if lam < 0 or mu < 0:
        return 0
    return _ext_ss(lam, mu, p)
