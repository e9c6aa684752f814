"""Real-type root data in Z-form with optional Z[1/p] semantics.

A :class:`RootDatum` stores a character lattice ``X = Z^rX``, a cocharacter
lattice ``Y = Z^rY``, an integer pairing matrix ``P`` (``<x, y> = x^T P y``)
and index-aligned lists of roots and coroots.  The first ``positive_count``
roots form the positive system.

When a prime ``p`` is attached, the datum stands for its extension of
scalars to Z[1/p]: every root is replaced by the p-primitive representative
of its ``p^Z`` orbit, and its coroot is rescaled by the inverse power so that
``<a, a^v> = 2`` still holds.

Lattice conventions of the builtins
-----------------------------------
``<T><n>_sc``
    simply connected: X has the fundamental weights as basis, Y the simple
    coroots; simple roots are the columns of the Cartan matrix.
``<T><n>_ad``
    adjoint: X has the simple roots as basis, Y the fundamental coweights.
``SLn, Sp2n, Spin2n+1, Spin2n``
    the simply connected forms of A(n-1), C(n), B(n), D(n).
``PGLn, PSp2n, SO2n+1, PSO2n``
    the adjoint forms.
``GLn, SO2n``
    epsilon coordinates: X = Y = Z^n with the standard pairing, roots
    ``e_i - e_j`` (resp. ``+-e_i +- e_j``), coroots equal to the roots.
``Tn``
    an n-dimensional torus.

Cartan matrices follow Bourbaki numbering with ``A[i][j] = <a_j, a_i^v>``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from . import lattice as lat
from .scalars import Localization, is_prime, valuation

Vector = Tuple[Fraction, ...]


class RootDatumError(ValueError):
    pass


class UnknownName(RootDatumError):
    pass


class NotCrystallographic(RootDatumError):
    pass


class CapExceededWithoutClassification(RootDatumError):
    pass


class OrderNotTwo(RootDatumError):
    pass


class IndexOutOfRange(RootDatumError, IndexError):
    pass


def _vec(v) -> Vector:
    return tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)


def _neg(v) -> Vector:
    return tuple(-x for x in v)


def _normalize_pair(root, coroot, p):
    """Scale ``(root, coroot)`` to ``(p^k root, p^-k coroot)`` with the root p-primitive."""
    R = Localization(p)
    root = [R.element(x) for x in root]
    coroot = [R.element(x) for x in coroot]
    nz = [x for x in root if x != 0]
    if not nz:
        return _vec(root), _vec(coroot)
    k = -min(R.valuation(x) for x in nz)
    f = Fraction(p) ** k
    return _vec(x * f for x in root), _vec(x / f for x in coroot)


@dataclass(frozen=True)
class RootDatum:
    pairing: Tuple[Tuple[int, ...], ...]
    roots: Tuple[Vector, ...]
    coroots: Tuple[Vector, ...]
    positive_count: int
    p: Optional[int] = None
    name: Optional[str] = field(default=None, compare=False)
    rank_X: int = field(default=-1, compare=False)
    rank_Y: int = field(default=-1, compare=False)

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise RootDatumError(f"{self.p} is not prime")
        if len(self.roots) != len(self.coroots):
            raise RootDatumError("roots and coroots must be index-aligned")
        rx = len(self.pairing)
        ry = len(self.pairing[0]) if self.pairing else rx
        object.__setattr__(self, "rank_X", rx)
        object.__setattr__(self, "rank_Y", ry)
        object.__setattr__(self, "pairing", tuple(tuple(int(x) for x in r) for r in self.pairing))
        roots, coroots = [], []
        for a, c in zip(self.roots, self.coroots):
            if len(a) != rx or len(c) != ry:
                raise lat.DimensionMismatch("root or coroot has the wrong length")
            if self.p is not None:
                a, c = _normalize_pair(a, c, self.p)
            roots.append(_vec(a))
            coroots.append(_vec(c))
        object.__setattr__(self, "roots", tuple(roots))
        object.__setattr__(self, "coroots", tuple(coroots))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def build(cls, pairing, roots, coroots, p=None, name=None, positive_count=None):
        if positive_count is None:
            positive_count = len(roots) // 2
        return cls(tuple(map(tuple, pairing)), tuple(map(tuple, roots)), tuple(map(tuple, coroots)),
                   positive_count, p, name)

    def with_prime(self, p: Optional[int]) -> "RootDatum":
        return RootDatum(self.pairing, self.roots, self.coroots, self.positive_count, p, self.name)

    def renamed(self, name):
        return RootDatum(self.pairing, self.roots, self.coroots, self.positive_count, self.p, name)

    # -- basic accessors -----------------------------------------------------

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @property
    def positive_roots(self):
        return self.roots[: self.positive_count]

    @property
    def positive_coroots(self):
        return self.coroots[: self.positive_count]

    def pair(self, x, y) -> Fraction:
        return sum(xi * Pij * yj for xi, row in zip(x, self.pairing) for Pij, yj in zip(row, y))

    def semisimple_rank(self) -> int:
        return lat.rank([list(a) for a in self.roots]) if self.roots else 0

    def torus_rank(self) -> int:
        return self.rank_X - self.semisimple_rank()

    def root_index(self, v) -> Optional[int]:
        v = _vec(v)
        try:
            return self.roots.index(v)
        except ValueError:
            return None

    def rho(self) -> Vector:
        """Half the sum of the positive roots."""
        s = [Fraction(0)] * self.rank_X
        for a in self.positive_roots:
            s = [x + Fraction(y, 2) for x, y in zip(s, a)]
        return _vec(s)

    def to_json(self) -> dict:
        from .scalars import format_scalar

        out = {
            "p": self.p,
            "rank_X": self.rank_X,
            "rank_Y": self.rank_Y,
            "pairing": [list(r) for r in self.pairing],
            "roots": [[format_scalar(x) for x in a] for a in self.roots],
            "coroots": [[format_scalar(x) for x in c] for c in self.coroots],
            "positive_count": self.positive_count,
        }
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RootDatum":
        p = data.get("p")
        parse = Localization(p).parse if p is not None else (lambda s: Fraction(s))
        rd = cls(
            tuple(tuple(r) for r in data["pairing"]),
            tuple(tuple(parse(x) for x in a) for a in data["roots"]),
            tuple(tuple(parse(x) for x in c) for c in data["coroots"]),
            int(data["positive_count"]),
            p,
            data.get("name"),
        )
        if rd.rank_X != data["rank_X"] or rd.rank_Y != data["rank_Y"]:
            raise lat.DimensionMismatch("declared ranks disagree with the pairing matrix")
        report = validate(rd)
        if not report.passed:
            raise RootDatumError(f"invalid root datum: {report.failures()}")
        return rd


# ---------------------------------------------------------------------------
# Reflections


def reflection(rd: RootDatum, root_index: int, side: str = "X"):
    """Matrix of ``s_a`` on X (``x -> x - <x, a^v> a``) or on Y (``y -> y - <a, y> a^v``)."""
    if not 0 <= root_index < rd.n_roots:
        raise IndexOutOfRange(f"root index {root_index} out of range")
    a, c = rd.roots[root_index], rd.coroots[root_index]
    P = rd.pairing
    if side in ("X", "onX"):
        f = lat.matvec(P, c)  # x -> <x, c> is the row f
        n = rd.rank_X
        return [[int(i == j) - a[i] * f[j] for j in range(n)] for i in range(n)]
    if side in ("Y", "onY"):
        g = lat.matvec(lat.transpose(P), a)  # y -> <a, y>
        n = rd.rank_Y
        return [[int(i == j) - c[i] * g[j] for j in range(n)] for i in range(n)]
    raise ValueError(f"side must be 'X' or 'Y', not {side!r}")


def functional_reflection(phi, kappa):
    """Matrix of ``l -> l - phi(l) kappa`` for a linear form ``phi`` and a vector ``kappa``.

    This is a reflection whenever ``phi(kappa) == 2``.
    """
    if len(phi) != len(kappa):
        raise lat.DimensionMismatch("form and vector have different lengths")
    n = len(kappa)
    return [[int(i == j) - Fraction(kappa[i]) * Fraction(phi[j]) for j in range(n)] for i in range(n)]


def reflection_permutation(rd: RootDatum, i: int) -> Tuple[int, ...]:
    """Permutation of root indices induced by ``s_{a_i}`` on X."""
    S = reflection(rd, i, "X")
    perm = []
    for a in rd.roots:
        j = rd.root_index(lat.matvec(S, a))
        if j is None:
            raise RootDatumError(f"reflection {i} does not preserve the root list")
        perm.append(j)
    return tuple(perm)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    checks: Dict[str, List] = field(default_factory=dict)

    def record(self, name: str, offenders):
        self.checks[name] = list(offenders)

    @property
    def passed(self) -> bool:
        return all(not v for v in self.checks.values())

    def failures(self) -> Dict[str, List]:
        return {k: v for k, v in self.checks.items() if v}

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {k: {"passed": not v, "offenders": [list(o) if isinstance(o, tuple) else o for o in v]}
                       for k, v in self.checks.items()},
        }


def _parallel_factor(u, v) -> Optional[Fraction]:
    """t with u == t*v, or None."""
    t = None
    for a, b in zip(u, v):
        if b == 0:
            if a != 0:
                return None
            continue
        r = Fraction(a) / Fraction(b)
        if t is None:
            t = r
        elif r != t:
            return None
    return t


def validate(rd: RootDatum) -> ValidationReport:
    """Check the real-type axioms; each entry lists offending indices."""
    rep = ValidationReport()
    P = rd.pairing
    perfect = rd.rank_X == rd.rank_Y and (rd.rank_X == 0 or abs(lat.det(P)) == 1)
    rep.record("pairing_perfect", [] if perfect else ["pairing"])

    rep.record("axiom1_pairing_is_two",
               [i for i, (a, c) in enumerate(zip(rd.roots, rd.coroots)) if rd.pair(a, c) != 2])

    zform = []
    for i, (a, c) in enumerate(zip(rd.roots, rd.coroots)):
        if any(Fraction(x).denominator != 1 for x in a + c):
            zform.append(i)
        elif rd.p is not None and all(int(x) % rd.p == 0 for x in a):
            zform.append(i)
    rep.record("z_form_primitive", zform)

    bad2 = []
    for side, vecs in (("root", rd.roots), ("coroot", rd.coroots)):
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                t = _parallel_factor(vecs[j], vecs[i])
                if t is not None and t != -1:
                    bad2.append((side, i, j))
    rep.record("axiom2_reduced", bad2)

    rep.record("negation_closed", [i for i, a in enumerate(rd.roots)
                                   if rd.root_index(_neg(a)) is None
                                   or rd.coroots[rd.root_index(_neg(a))] != _neg(rd.coroots[i])])

    bad4, bad4p = [], []
    coroot_set = set(rd.coroots)
    root_set = set(rd.roots)
    pairs = set(zip(rd.roots, rd.coroots))
    for i in range(rd.n_roots):
        if rd.pair(rd.roots[i], rd.coroots[i]) != 2:
            continue
        SX = reflection(rd, i, "X")
        SY = reflection(rd, i, "Y")
        for j in range(rd.n_roots):
            a = _vec(lat.matvec(SX, rd.roots[j]))
            c = _vec(lat.matvec(SY, rd.coroots[j]))
            if c not in coroot_set:
                bad4.append((i, j))
            if a not in root_set or (a, c) not in pairs:
                bad4p.append((i, j))
    rep.record("axiom4_coroots_reflection_closed", bad4)
    rep.record("axiom4p_roots_reflection_closed", bad4p)

    bad_pos = []
    n = rd.n_roots
    if n % 2 or rd.positive_count != n // 2:
        bad_pos.append("count")
    else:
        pos = set(rd.positive_roots)
        for a in rd.positive_roots:
            if _neg(a) in pos:
                bad_pos.append(("pair", a))
        for a in rd.positive_roots:
            for b in rd.positive_roots:
                s = tuple(x + y for x, y in zip(a, b))
                if s in root_set and s not in pos:
                    bad_pos.append(("closure", a, b))
    rep.record("positive_system", bad_pos)
    return rep


# ---------------------------------------------------------------------------
# Simple roots, Cartan matrix, Dynkin classification


def simple_root_indices(rd: RootDatum) -> List[int]:
    """Indices of the simple roots of the stored positive system.

    A positive root ``a`` is simple iff ``s_a`` permutes the other positive
    roots; this is insensitive to the p-power rescaling of representatives.
    """
    pos = set(range(rd.positive_count))
    simple = []
    for i in range(rd.positive_count):
        perm = reflection_permutation(rd, i)
        if all(perm[j] in pos for j in pos if j != i):
            simple.append(i)
    return simple


def cartan_matrix(rd: RootDatum, simple: Optional[Sequence[int]] = None):
    """``A[i][j] = <a_j, a_i^v>`` over the simple roots."""
    if simple is None:
        simple = simple_root_indices(rd)
    return [[int(rd.pair(rd.roots[j], rd.coroots[i])) for j in simple] for i in simple]


_EXCEPTIONAL_ORDERS = {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600, ("F", 4): 1152, ("G", 2): 12}


def weyl_order_of_type(letter: str, n: int) -> int:
    if letter == "A":
        return factorial(n + 1)
    if letter in "BC":
        return 2**n * factorial(n)
    if letter == "D":
        return 2 ** (n - 1) * factorial(n)
    return _EXCEPTIONAL_ORDERS[(letter, n)]


def _components(A) -> List[List[int]]:
    n = len(A)
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(n):
                if v not in seen and A[u][v] != 0:
                    seen.add(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _classify_component(A, comp) -> Tuple[str, int]:
    n = len(comp)
    if n == 1:
        return "A", 1
    edges = {}
    for a in range(n):
        for b in range(a + 1, n):
            i, j = comp[a], comp[b]
            if A[i][j] or A[j][i]:
                if not (A[i][j] and A[j][i]):
                    raise NotCrystallographic("asymmetric zero pattern")
                edges[(a, b)] = A[i][j] * A[j][i]
    if len(edges) != n - 1 or any(m not in (1, 2, 3) for m in edges.values()):
        raise NotCrystallographic("diagram is not a finite-type tree")
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    mults = sorted(edges.values())
    if 3 in mults:
        if n == 2:
            return "G", 2
        raise NotCrystallographic("triple bond outside G2")
    if mults.count(2) > 1 or max(deg) > 3:
        raise NotCrystallographic("not a finite Dynkin diagram")
    if 2 in mults:
        if max(deg) > 2:
            raise NotCrystallographic("branched diagram with a double bond")
        (a, b), = [e for e, m in edges.items() if m == 2]
        if n == 2:
            return "B", 2
        if deg[a] == 1 or deg[b] == 1:
            # long roots a_j have |A[i][j]| = 2 against a short neighbour i
            i, j = comp[a], comp[b]
            short_is_j = abs(A[i][j]) == 1 and abs(A[j][i]) == 2
            end = a if deg[a] == 1 else b
            end_is_short = (end == b) == short_is_j
            return ("B" if end_is_short else "C"), n
        if n == 4:
            return "F", 4
        raise NotCrystallographic("double bond in the middle of a long chain")
    branch = [v for v in range(n) if deg[v] == 3]
    if not branch:
        return "A", n
    if len(branch) > 1:
        raise NotCrystallographic("more than one branch node")
    c = branch[0]
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    arms = []
    for start in adj[c]:
        length, prev, cur = 1, c, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == arms[1] == 1:
        return "D", n
    if arms == [1, 2, 2]:
        return "E", 6
    if arms == [1, 2, 3]:
        return "E", 7
    if arms == [1, 2, 4]:
        return "E", 8
    raise NotCrystallographic(f"branch arms {arms} are not of finite type")


@dataclass(frozen=True)
class DynkinComponent:
    letter: str
    rank: int
    simple: Tuple[int, ...]  # indices into the root list

    @property
    def label(self) -> str:
        return f"{self.letter}{self.rank}"


def dynkin_components(rd: RootDatum) -> List[DynkinComponent]:
    simple = simple_root_indices(rd)
    A = cartan_matrix(rd, simple)
    out = []
    for comp in _components(A):
        letter, n = _classify_component(A, comp)
        out.append(DynkinComponent(letter, n, tuple(simple[i] for i in comp)))
    return out


def type_string(components, torus_rank: int) -> str:
    parts = sorted((c.letter, c.rank) for c in components)
    labels = [f"{l}{n}" for l, n in parts]
    if torus_rank or not labels:
        labels.append(f"T{torus_rank}")
    return " + ".join(labels)


def dynkin_classify(rd: RootDatum) -> str:
    """Irreducible types plus central torus rank, e.g. ``"A2 + T1"``."""
    return type_string(dynkin_components(rd), rd.torus_rank())


# ---------------------------------------------------------------------------
# Weyl group


@dataclass(frozen=True)
class WeylGroup:
    order: int
    cartan_type: Optional[str]
    elements: Optional[Tuple[Tuple[int, ...], ...]] = None
    longest_element: Optional[Tuple[int, ...]] = None
    generators: Tuple[Tuple[int, ...], ...] = ()

    def to_json(self) -> dict:
        return {"order": self.order, "cartan_type": self.cartan_type,
                "enumerated": self.elements is not None,
                "longest_element": list(self.longest_element) if self.longest_element else None}


def compose_perm(a, b):
    """``(a o b)[i] = a[b[i]]``."""
    return tuple(a[i] for i in b)


def weyl_group(rd: RootDatum, enumeration_cap: int = 10**6) -> WeylGroup:
    """Closure of the simple reflections acting on the root list.

    Falls back to the classified order when the closure outgrows the cap.
    """
    try:
        ctype = dynkin_classify(rd)
        comps = dynkin_components(rd)
        classified = 1
        for c in comps:
            classified *= weyl_order_of_type(c.letter, c.rank)
    except NotCrystallographic:
        ctype, classified = None, None
    simple = simple_root_indices(rd)
    gens = tuple(reflection_permutation(rd, i) for i in simple)
    ident = tuple(range(rd.n_roots))
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    capped = False
    while queue:
        w = queue.popleft()
        for g in gens:
            u = compose_perm(g, w)
            if u not in seen:
                if len(seen) >= enumeration_cap:
                    capped = True
                    break
                seen.add(u)
                order.append(u)
                queue.append(u)
        if capped:
            break
    if capped:
        if classified is None:
            raise CapExceededWithoutClassification("closure exceeds the cap and the datum is not crystallographic")
        return WeylGroup(classified, ctype, None, None, gens)
    pos = set(range(rd.positive_count))
    w0 = next((w for w in order if all(w[i] not in pos for i in pos)), None)
    return WeylGroup(len(order), ctype, tuple(order), w0, gens)


# ---------------------------------------------------------------------------
# Duality and positivity


def dual(rd: RootDatum) -> RootDatum:
    """Swap ``(X, roots)`` with ``(Y, coroots)`` and transpose the pairing."""
    name = None
    if rd.name:
        name = rd.name[5:-1] if rd.name.startswith("dual(") and rd.name.endswith(")") else f"dual({rd.name})"
    return RootDatum(tuple(map(tuple, lat.transpose(rd.pairing))) if rd.pairing else (),
                     rd.coroots, rd.roots, rd.positive_count, rd.p, name)


def _coweight_values(rd, lam):
    lam = [Fraction(x) for x in lam]
    if len(lam) != rd.rank_X:
        raise lat.DimensionMismatch(f"weight has length {len(lam)}, expected {rd.rank_X}")
    if rd.p is not None:
        R = Localization(rd.p)
        for x in lam:
            R.element(x)
    return [rd.pair(lam, c) for c in rd.positive_coroots]


def is_dominant(rd: RootDatum, lam, strict: bool = False) -> bool:
    vals = _coweight_values(rd, lam)
    return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)


def block_equivalent(rd: RootDatum, lam, mu) -> bool:
    """Is ``lam - mu`` in the Z[1/p]-span of the roots?"""
    lam = [Fraction(x) for x in lam]
    mu = [Fraction(x) for x in mu]
    if len(lam) != rd.rank_X or len(mu) != rd.rank_X:
        raise lat.DimensionMismatch("weights do not fit the datum")
    if rd.p is None:
        raise RootDatumError("block test needs a prime")
    diff = [a - b for a, b in zip(lam, mu)]
    return lat.in_span_over_zp(diff, [list(a) for a in rd.positive_roots], rd.p)


# ---------------------------------------------------------------------------
# Reflection-group presentation


@dataclass(frozen=True)
class ReflectionDatum:
    """``(W, V, {P_s})``: each reflection ``s(l) = l - beta(l) b`` with ``P_s = D b``."""

    V: lat.Lattice
    reflections: Tuple[Tuple[Tuple[Tuple[int, ...], ...], Vector], ...]
    p: Optional[int] = None

    @property
    def W_generators(self):
        return tuple(s for s, _ in self.reflections)

    def image_index(self, k: int) -> Fraction:
        """``g`` with ``im(1 - s) = g * Z b`` (relative to ``P_s = Z b``)."""
        s, b = self.reflections[k]
        n = self.V.rank
        coeffs = []
        for col in range(n):
            v = [int(r == col) - s[r][col] for r in range(n)]
            t = _parallel_factor(v, b)
            if t is None:
                raise RootDatumError("im(1 - s) is not inside P_s")
            coeffs.append(t)
        from math import gcd

        den = 1
        for t in coeffs:
            den = den * t.denominator // gcd(den, t.denominator)
        g = 0
        for t in coeffs:
            g = gcd(g, int(t * den))
        return Fraction(g, den)

    def dichotomy(self, k: int) -> str:
        """``"equal"`` if ``P_s = im(1-s)``, ``"double"`` if ``im(1-s) = 2 P_s``."""
        g = self.image_index(k)
        if self.p is not None and g != 0:
            R = Localization(self.p)
            if R.is_unit(g):
                return "equal"
        if g == 1:
            return "equal"
        if g == 2:
            return "double"
        raise RootDatumError(f"im(1-s) has index {g} in P_s")


def to_reflection_form(rd: RootDatum) -> ReflectionDatum:
    """Reflections on ``V = Y`` with ``P_s`` generated by the coroot."""
    refl = []
    for i in range(rd.positive_count):
        S = reflection(rd, i, "Y")
        refl.append((tuple(tuple(r) for r in S), rd.coroots[i]))
    ring = "Z" if rd.p is None else "Z_inv_p"
    rf = ReflectionDatum(lat.Lattice(rd.rank_Y, ring, rd.p), tuple(refl), rd.p)
    for k in range(len(refl)):
        rf.dichotomy(k)
    return rf


def from_reflection_form(rf: ReflectionDatum, name: Optional[str] = None) -> RootDatum:
    """Recover ``(V*, R, V, R^v)`` with the evaluation pairing."""
    n = rf.V.rank
    roots, coroots = [], []
    for s, b in rf.reflections:
        if lat.matmul(s, s) != lat.identity(n):
            raise OrderNotTwo("reflection does not have order 2")
        beta = []
        for col in range(n):
            v = [int(r == col) - s[r][col] for r in range(n)]
            t = _parallel_factor(v, b)
            if t is None:
                raise RootDatumError("(1 - s) does not take values in P_s")
            beta.append(t)
        roots.append(_vec(beta))
        coroots.append(_vec(b))
    roots += [_neg(a) for a in roots]
    coroots += [_neg(c) for c in coroots]
    return RootDatum(tuple(map(tuple, lat.identity(n))), tuple(roots), tuple(coroots), len(roots) // 2, rf.p, name)


# ---------------------------------------------------------------------------
# Builtins


def cartan_of_type(letter: str, n: int) -> List[List[int]]:
    A = [[2 * int(i == j) for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        A[i][j], A[j][i] = aij, aji

    if letter == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif letter == "B":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)
    elif letter == "C":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -2, -1)
    elif letter == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "G":
        link(0, 1, -3, -1)
    elif letter == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif letter == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    else:
        raise UnknownName(letter)
    return A


_VALID_TYPES = {"A": range(1, 9), "B": range(2, 9), "C": range(2, 9), "D": range(3, 9),
                "E": range(6, 9), "F": (4,), "G": (2,)}


def _close_roots(simple_roots, simple_coroots, pair):
    """All (root, coroot) pairs generated by the simple reflections."""
    pairs = list(zip(simple_roots, simple_coroots))
    seen = set(pairs)
    queue = deque(pairs)
    while queue:
        a, c = queue.popleft()
        for sa, sc in zip(simple_roots, simple_coroots):
            k = pair(a, sc)
            na = tuple(x - k * y for x, y in zip(a, sa))
            kc = pair(sa, c)
            nc = tuple(x - kc * y for x, y in zip(c, sc))
            if (na, nc) not in seen:
                seen.add((na, nc))
                queue.append((na, nc))
    return list(seen)


def _order_roots(pairs, key):
    pos = sorted((pr for pr in pairs if key(pr[0]) > ()), key=lambda pr: key(pr[0]))
    neg = [(_neg(a), _neg(c)) for a, c in pos]
    return [a for a, _ in pos] + [a for a, _ in neg], [c for _, c in pos] + [c for _, c in neg]


def from_cartan(letter: str, n: int, form: str = "sc", name: Optional[str] = None, p=None) -> RootDatum:
    if n not in _VALID_TYPES.get(letter, ()):
        raise UnknownName(f"{letter}{n}")
    A = cartan_of_type(letter, n)
    I = lat.identity(n)
    if form == "sc":
        simple_roots = [tuple(A[i][j] for i in range(n)) for j in range(n)]
        simple_coroots = [tuple(r) for r in I]
        to_simple = lat.inverse([list(r) for r in lat.transpose(simple_roots)])
    elif form == "ad":
        simple_roots = [tuple(r) for r in I]
        simple_coroots = [tuple(A[i]) for i in range(n)]
        to_simple = I
    else:
        raise UnknownName(f"form {form!r}")

    def pair(x, y):
        return sum(a * b for a, b in zip(x, y))

    pairs = _close_roots(simple_roots, simple_coroots, pair)

    def key(a):
        coords = lat.matvec(to_simple, a)
        height = sum(coords)
        if height <= 0:
            return ()
        return (height, tuple(-x for x in coords))

    roots, coroots = _order_roots(pairs, key)
    return RootDatum(tuple(map(tuple, I)), tuple(roots), tuple(coroots), len(roots) // 2, p,
                     name or f"{letter}{n}_{form}")


def _epsilon_datum(kind: str, n: int, name: str, p=None) -> RootDatum:
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            e = [0] * n
            e[i], e[j] = 1, -1
            roots.append(tuple(e))
            if kind == "D":
                e = [0] * n
                e[i], e[j] = 1, 1
                roots.append(tuple(e))

    def key(a):
        nz = next((x for x in a if x), 0)
        if nz <= 0:
            return ()
        return (tuple(-x for x in a),)

    pairs = [(a, a) for a in roots] + [(_neg(a), _neg(a)) for a in roots]
    rts, cos = _order_roots(pairs, key)
    return RootDatum(tuple(map(tuple, lat.identity(n))), tuple(rts), tuple(cos), len(rts) // 2, p, name)


def torus(n: int, p=None) -> RootDatum:
    return RootDatum(tuple(map(tuple, lat.identity(n))), (), (), 0, p, f"T{n}")


_CLASSICAL = [
    (r"SL(\d+)", lambda n: ("A", n - 1, "sc") if n >= 2 else None),
    (r"PGL(\d+)", lambda n: ("A", n - 1, "ad") if n >= 2 else None),
    (r"Sp(\d+)", lambda n: (("A", 1, "sc") if n == 2 else ("C", n // 2, "sc")) if n % 2 == 0 and n >= 2 else None),
    (r"PSp(\d+)", lambda n: (("A", 1, "ad") if n == 2 else ("C", n // 2, "ad")) if n % 2 == 0 and n >= 2 else None),
    (r"SO(\d+)", lambda n: (("A", 1, "ad") if n == 3 else ("B", n // 2, "ad")) if n % 2 == 1 and n >= 3 else None),
    (r"Spin(\d+)", lambda n: ((("A", 1, "sc") if n == 3 else ("B", n // 2, "sc")) if n % 2 == 1 and n >= 3
                              else (("D", n // 2, "sc") if n >= 6 else None))),
    (r"PSO(\d+)", lambda n: ("D", n // 2, "ad") if n % 2 == 0 and n >= 6 else None),
]


def builtin_names() -> List[str]:
    names = ["SL2", "SL3", "SL4", "PGL2", "PGL3", "PGL4", "GL2", "GL3", "Sp4", "Sp6", "SO3", "SO5", "SO7",
             "SO4", "SO6", "SO8", "Spin5", "Spin8", "PSO8", "T1", "T2", "G2", "F4", "E6_sc", "E6_ad", "E7_sc",
             "E8"]
    return names


def builtin(name: str, p: Optional[int] = None) -> RootDatum:
    """Named root datum; see the module docstring for lattice conventions."""
    m = re.fullmatch(r"([A-G])(\d+)(?:_(sc|ad))?", name)
    if m:
        letter, n, form = m.group(1), int(m.group(2)), m.group(3) or "sc"
        if m.group(3) is None and letter not in "EFG":
            raise UnknownName(f"{name}: give a form suffix _sc or _ad")
        return from_cartan(letter, n, form, name, p)
    m = re.fullmatch(r"T(\d+)", name)
    if m:
        return torus(int(m.group(1)), p)
    m = re.fullmatch(r"GL(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return _epsilon_datum("A", int(m.group(1)), name, p)
    m = re.fullmatch(r"SO(\d+)", name)
    if m and int(m.group(1)) % 2 == 0 and int(m.group(1)) >= 4:
        return _epsilon_datum("D", int(m.group(1)) // 2, name, p)
    for pat, rule in _CLASSICAL:
        m = re.fullmatch(pat, name)
        if m:
            spec = rule(int(m.group(1)))
            if spec is None:
                break
            return from_cartan(*spec, name=name, p=p)
    raise UnknownName(f"unknown builtin root datum {name!r}")
