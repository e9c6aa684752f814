"""Perfected SL2: simples, costandard and Weyl-type modules indexed by N[1/p].

Weights are :class:`fractions.Fraction` values in Z[1/p].  Every operation on
costandard, Weyl-type and socle data first rescales ``lam`` by the unique
power ``p**j`` making it a p-primitive integer; multiplicities are invariant
under this rescaling, and at integer scale the composition factors are
described by two finite classical sets

* ``E0(n)   = {nu : [nabla(n) : L(nu)] != 0}``
* ``Einf(n) = {nu > 0 : [nabla(n-1) : L(nu-1)] != 0}``

together with the infinite tails ``nu - 2/p**i`` (``nu`` in ``Einf``, ``i > 0``).
Tails are reported up to a truncation depth with an explicit marker.

>>> costandard_multiplicity(1, Fraction(1, 3), 3)
1
>>> ext1(0, 4, "simple", 3)
1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..scalars import (
    Localization,
    NegativeValue,
    format_scalar,
    lucas_digit,
    p_power_exponent,
    to_digits,
)
from . import classical

SIMPLE = "simple"
COSTANDARD = "costandard"
DEFAULT_TRUNCATION = 6


class NotStrictlyDominant(ValueError):
    pass


def _w(x, p: int) -> Fraction:
    return Localization(p).element(x)


def primitive_scale(lam, p: int) -> Tuple[int, int]:
    """Return ``(j, n)`` with ``p**j * lam == n`` a positive integer prime to p."""
    lam = _w(lam, p)
    if lam <= 0:
        raise NotStrictlyDominant(f"{lam} is not strictly positive")
    num = lam.numerator
    k = p_power_exponent(lam.denominator, p)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    return k - v, num


def _scale(x: Fraction, p: int, j: int) -> Fraction:
    return x * Fraction(p) ** j


# ---------------------------------------------------------------------------
# Simple modules


def simple_weight_dim(n, w, p: int) -> int:
    """Dimension (0 or 1) of the ``w`` weight space of the perfected simple L(n)."""
    n, w = Fraction(n), Fraction(w)
    if n < 0:
        return 0
    j = (n - w) / 2
    if p_power_exponent(j.denominator, p) < 0 or j < 0 or j > n:
        return 0
    return int(lucas_digit(n, j, p) != 0)


def weights(n, p: int) -> List[Fraction]:
    """All weights of L(n), highest first (each of multiplicity one)."""
    n = _w(n, p)
    if n < 0:
        raise NegativeValue(f"{n} is not dominant")
    ws = [Fraction(0)]
    for i, d in to_digits(n, p):
        q = Fraction(p) ** i
        ws = [x + q * (d - 2 * k) for x in ws for k in range(d + 1)]
    return sorted(ws, reverse=True)


@dataclass(frozen=True)
class FractalImage:
    """Support of the characters of L(n), ``n <= max_n`` with denominators ``<= p**depth``.

    Geometry for export: x is the weight, y the highest weight (growing
    downwards), and one cell is ``p**-depth`` wide.
    """

    p: int
    max_n: int
    depth: int
    points: FrozenSet[Tuple[Fraction, Fraction]]

    def __contains__(self, nw) -> bool:
        n, w = nw
        return (Fraction(n), Fraction(w)) in self.points

    def integer_points(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(
            (int(n), int(w)) for n, w in self.points if n.denominator == 1 and w.denominator == 1
        )

    def _cells(self):
        q = self.p**self.depth
        for n, w in sorted(self.points):
            yield int((w + self.max_n) * q), int(n * q), n, w

    @property
    def size(self) -> Tuple[int, int]:
        q = self.p**self.depth
        return 2 * self.max_n * q + 1, self.max_n * q + 1

    def to_svg(self) -> str:
        width, height = self.size
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" shape-rendering="crispEdges">',
            f"<title>Characters of perfected SL2 simples, p={self.p}, "
            f"n&lt;={self.max_n}, depth={self.depth}</title>",
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
            '<g fill="black">',
        ]
        for x, y, n, w in self._cells():
            out.append(f'<rect x="{x}" y="{y}" width="1" height="1" data-n="{n}" data-w="{w}"/>')
        out += ["</g>", "</svg>", ""]
        return "\n".join(out)

    def to_pgm(self) -> bytes:
        """Plain (P2) PGM raster: 0 on the support, 255 elsewhere."""
        width, height = self.size
        grid = [[255] * width for _ in range(height)]
        for x, y, _, _ in self._cells():
            grid[y][x] = 0
        lines = ["P2", f"{width} {height}", "255"]
        lines += [" ".join(map(str, row)) for row in grid]
        return ("\n".join(lines) + "\n").encode("ascii")


def fractal(p: int, max_n: int, depth: int = 0) -> FractalImage:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    q = p**depth
    pts = set()
    for k in range(max_n * q + 1):
        n = Fraction(k, q)
        for w in classical.simple_weights(k, p):
            pts.add((n, Fraction(w, q)))
    return FractalImage(p, max_n, depth, frozenset(pts))


# ---------------------------------------------------------------------------
# Extensions and blocks


def _normalize_target(target: str) -> str:
    t = str(target).lower()
    if t not in (SIMPLE, COSTANDARD):
        raise ValueError(f"target must be 'simple' or 'costandard', not {target!r}")
    return t


def ext1(lam, mu, target: str, p: int) -> int:
    """``dim Ext^1(L(lam), T(mu))`` with ``T`` the simple or costandard module."""
    target = _normalize_target(target)
    # to_digits validates membership in N[1/p]
    dl, dm = to_digits(lam, p).digits, to_digits(mu, p).digits
    support = dl.keys() | dm.keys()
    if not support:
        return 0
    lo, hi = min(support) - 1, max(support) + 1
    for i in range(lo, hi + 1):
        li, mi = dl.get(i, 0), dm.get(i, 0)
        if li + mi != p - 2:
            continue
        if target == COSTANDARD:
            # lam - p^i lam_i == mu - p^i mu_i + p^(i+1), compared digitwise:
            # the digits off position i must describe mu + p^(i+1)
            rest_l = {j: d for j, d in dl.items() if j != i}
            rest_m = {j: d for j, d in dm.items() if j != i}
            if _digits_plus_power(rest_m, i + 1, p) == rest_l:
                return 1
        else:
            if abs(dl.get(i + 1, 0) - dm.get(i + 1, 0)) != 1:
                continue
            if all(dl.get(j, 0) == dm.get(j, 0) for j in support if j not in (i, i + 1)):
                return 1
    return 0


def _digits_plus_power(digits: Dict[int, int], k: int, p: int) -> Dict[int, int]:
    """Digits of ``value(digits) + p**k`` (carry propagation)."""
    out = dict(digits)
    while True:
        d = out.get(k, 0) + 1
        if d < p:
            out[k] = d
            return out
        out.pop(k, None)
        k += 1


def block_label(lam, p: int) -> str:
    """Class of ``lam`` in Z[1/p] / 2Z[1/p]; for p = 2 the quotient is trivial."""
    lam = _w(lam, p)
    if p == 2:
        return "even"
    return "even" if lam.numerator % 2 == 0 else "odd"


def same_block(lam, mu, p: int) -> bool:
    return block_label(lam, p) == block_label(mu, p)


# ---------------------------------------------------------------------------
# Composition factors


def E0(n: int, p: int) -> FrozenSet[int]:
    if n < 0:
        return frozenset()
    return frozenset(classical.costandard_factors(n, p))


def Einf(n: int, p: int) -> FrozenSet[int]:
    return frozenset(x + 1 for x in E0(n - 1, p))


def _tail_index(nu: int, mu: Fraction, p: int) -> Optional[int]:
    """Return i > 0 with ``mu == nu - 2/p**i`` or None."""
    d = nu - mu
    if d <= 0:
        return None
    q = 2 / d
    if q.denominator != 1:
        return None
    i = p_power_exponent(q.numerator, p)
    return i if i > 0 else None


def _multiplicity(head: FrozenSet[int], tails: FrozenSet[int], mu: Fraction, p: int) -> int:
    if mu.denominator == 1 and int(mu) in head:
        return 1
    return int(any(_tail_index(nu, mu, p) is not None for nu in tails))


def costandard_multiplicity(lam, mu, p: int) -> int:
    """``[nabla(lam) : L(mu)]`` for the perfected costandard module."""
    lam, mu = _w(lam, p), _w(mu, p)
    if lam < 0:
        raise NegativeValue(f"{lam} is not dominant")
    if lam == 0:
        return int(mu == 0)
    j, n = primitive_scale(lam, p)
    return _multiplicity(E0(n, p), Einf(n, p), _scale(mu, p, j), p)


def weyl_type_multiplicity(lam, mu, p: int) -> int:
    """``[W(lam) : L(mu)]`` for the perfected Weyl-type module, ``lam > 0``."""
    lam, mu = _w(lam, p), _w(mu, p)
    j, n = primitive_scale(lam, p)
    return _multiplicity(E0(n - 2, p), Einf(n, p), _scale(mu, p, j), p)


@dataclass
class Factor:
    mu: Fraction
    origin: str
    nu: Optional[Fraction] = None
    i: Optional[int] = None
    multiplicity: int = 1

    def to_json(self) -> Dict:
        d = {"mu": format_scalar(self.mu), "multiplicity": self.multiplicity,
             "origin": self.origin}
        if self.origin == "Einf":
            d["nu"] = format_scalar(self.nu)
            d["i"] = self.i
        return d


@dataclass
class MultiplicityReport:
    """Composition factors of a perfected costandard or Weyl-type module, truncated."""

    lam: Fraction
    p: int
    module: str
    factors: List[Factor]
    truncation: int
    tail_continues: bool

    def mus(self) -> List[Fraction]:
        return [f.mu for f in self.factors]

    def to_json(self) -> Dict:
        return {
            "lambda": format_scalar(self.lam),
            "p": self.p,
            "module": self.module,
            "factors": [f.to_json() for f in self.factors],
            "truncation": self.truncation,
            "tail_continues": self.tail_continues,
        }


def _report(lam, p: int, module: str, truncation: int) -> MultiplicityReport:
    lam = _w(lam, p)
    if truncation < 0:
        raise ValueError("truncation must be >= 0")
    if module == "costandard" and lam == 0:
        return MultiplicityReport(lam, p, module, [Factor(Fraction(0), "E0")], truncation, False)
    j, n = primitive_scale(lam, p)
    head = E0(n if module == "costandard" else n - 2, p)
    tails = Einf(n, p)
    back = lambda x: _scale(Fraction(x), p, -j)  # noqa: E731
    factors = [Factor(back(nu), "E0") for nu in sorted(head, reverse=True)]
    for nu in sorted(tails, reverse=True):
        for i in range(1, truncation + 1):
            factors.append(Factor(back(nu - Fraction(2, p**i)), "Einf", back(nu), i))
    if len({f.mu for f in factors}) != len(factors):
        raise ArithmeticError("factor list is not multiplicity free")
    return MultiplicityReport(lam, p, module, factors, truncation, bool(tails))


def costandard_factors(lam, p: int, truncation: int = DEFAULT_TRUNCATION) -> MultiplicityReport:
    return _report(lam, p, "costandard", truncation)


def weyl_type_factors(lam, p: int, truncation: int = DEFAULT_TRUNCATION) -> MultiplicityReport:
    return _report(lam, p, "weyl", truncation)


# ---------------------------------------------------------------------------
# Socle series


@dataclass
class SocleSeries:
    lam: Fraction
    p: int
    certified: bool
    layers: List[List[Fraction]] = field(default_factory=list)
    factors: Optional[MultiplicityReport] = None

    def to_json(self) -> Dict:
        d = {
            "lambda": format_scalar(self.lam),
            "p": self.p,
            "certified": self.certified,
        }
        if self.certified:
            d["layers"] = [[format_scalar(x) for x in layer] for layer in self.layers]
        else:
            d["flag"] = "NotCertified"
            d["factors"] = self.factors.to_json()
        return d


def socle_series(lam, depth: int, p: int) -> SocleSeries:
    """Socle layers ``soc^0 .. soc^depth`` of the perfected costandard module.

    Exact for ``0 < lam < p`` and ``lam = 2p - 1`` (up to rescaling by powers
    of p); other weights get the unordered factor list and ``certified=False``.
    """
    lam = _w(lam, p)
    j, n = primitive_scale(lam, p)
    back = lambda x: _scale(Fraction(x), p, -j)  # noqa: E731
    if n < p:
        layers = [[back(n)]] + [[back(n - Fraction(2, p**i))] for i in range(1, depth + 1)]
    elif n == 2 * p - 1:
        layers = [[back(n)]]
        if depth >= 1:
            layers.append([back(n - Fraction(2, p))])
        for i in range(1, depth):
            layers.append([back(n - Fraction(2, p ** (i + 1))), back(1 - Fraction(2, p**i))])
    else:
        return SocleSeries(lam, p, False, [], costandard_factors(lam, p, depth))
    return SocleSeries(lam, p, True, [layer for layer in layers[: depth + 1]])


# ---------------------------------------------------------------------------
# Grothendieck group identity


def grothendieck_terms(lam: int, p: int, window: int = 4) -> List[Tuple[Fraction, int, int]]:
    """``(mu, lhs, rhs)`` rows of ``[nabla(lam)] - [W(lam)] = [Delta(lam)] - [Delta(lam-2)]``.

    ``mu`` runs over the integers ``0..lam`` and every factor of either side
    down to tail depth ``window``.
    """
    if int(lam) != lam or lam < 2:
        raise ValueError("lam must be an integer >= 2")
    lam = int(lam)
    mus = {Fraction(m) for m in range(lam + 1)}
    mus |= set(costandard_factors(lam, p, window).mus())
    mus |= set(weyl_type_factors(lam, p, window).mus())
    d_top = set(classical.costandard_factors(lam, p))
    d_low = set(classical.costandard_factors(lam - 2, p))
    rows = []
    for mu in sorted(mus):
        lhs = costandard_multiplicity(lam, mu, p) - weyl_type_multiplicity(lam, mu, p)
        rhs = 0
        if mu.denominator == 1:
            rhs = int(int(mu) in d_top) - int(int(mu) in d_low)
        rows.append((mu, lhs, rhs))
    return rows


def grothendieck_identity_check(lam: int, window: int, p: int) -> bool:
    return all(lhs == rhs for _, lhs, rhs in grothendieck_terms(lam, p, window))


def format_weights(ws: Sequence[Fraction]) -> List[str]:
    return [format_scalar(w) for w in ws]
