"""Isomorphism and isogeny of root data over Z[1/p].

The decision procedure first compares a battery of invariants; a mismatch
yields ``NotIsomorphic`` with a certificate.  Otherwise it searches for a
witness: simple roots of the first datum are matched to simple roots of the
second (any diagram isomorphism), each image scaled by a power of p that is
forced along every edge by the Cartan integers.  The lattice map is then
solved for exactly, including the central-torus block, and re-verified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import lattice as lat
from .rootdata import (
    RootDatum,
    cartan_matrix,
    dynkin_components,
    reflection,
    simple_root_indices,
    weyl_order_of_type,
)
from .scalars import Localization, format_scalar, p_power_exponent, strip_p


class PrimeMismatch(ValueError):
    pass


ISOMORPHIC = "Isomorphic"
NOT_ISOMORPHIC = "NotIsomorphic"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SearchBudget:
    coeff_bound: int = 8
    exp_bound: int = 2
    node_budget: int = 10**6


@dataclass
class IsoVerdict:
    status: str
    witness: Optional[List[List[Fraction]]] = None
    certificate: Optional[Dict] = None
    budget_spent: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = [[format_scalar(x) for x in row] for row in self.witness]
        if self.certificate is not None:
            out["certificate"] = self.certificate
        out["budget_spent"] = dict(self.budget_spent)
        return out


@dataclass(frozen=True)
class IsogenyWitness:
    phi: Tuple[Tuple[Fraction, ...], ...]
    root_bijection: Tuple[int, ...]
    steinberg_shift: int
    theta: Tuple[Tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# Map-level checks


def _require_same_prime(rd1: RootDatum, rd2: RootDatum) -> int:
    if rd1.p is None or rd2.p is None or rd1.p != rd2.p:
        raise PrimeMismatch(f"root data carry primes {rd1.p} and {rd2.p}")
    return rd1.p


def map_dual(rd1: RootDatum, rd2: RootDatum, phi) -> List[List[Fraction]]:
    """``phi^v: Y2 -> Y1`` with ``<phi x, y> = <x, phi^v y>``."""
    return lat.dual_map(phi, rd1.pairing, rd2.pairing)


def _orbit_rep(v, p):
    """Split a nonzero vector over Z[1/p] as ``p^k * w`` with ``w`` p-primitive integral."""
    R = Localization(p)
    vals = [R.valuation(x) for x in v if x != 0]
    if not vals:
        return None, None
    k = min(vals)
    f = Fraction(p) ** k
    return k, tuple(int(x / f) for x in v)


def match_roots(rd1: RootDatum, rd2: RootDatum, phi) -> Optional[List[Tuple[int, int]]]:
    """For each root a of rd1, ``(j, k)`` with ``phi(a) = p^k * b_j``; None if some image is no root."""
    p = rd1.p
    out = []
    for a in rd1.roots:
        v = lat.matvec(phi, a)
        if any(Fraction(x) not in Localization(p) for x in v):
            return None
        k, w = _orbit_rep(v, p)
        if w is None:
            return None
        j = rd2.root_index(w)
        if j is None:
            return None
        out.append((j, k))
    return out


def _root_conditions(rd1, rd2, phi, reasons: List[str]):
    p = rd1.p
    matches = match_roots(rd1, rd2, phi)
    if matches is None:
        reasons.append("phi does not send every root into p^Z R1")
        return None
    targets = [j for j, _ in matches]
    if len(set(targets)) != len(targets) or len(targets) != rd2.n_roots:
        reasons.append("phi does not induce a bijection on root orbits")
        return None
    dphi = map_dual(rd1, rd2, phi)
    for i, (j, k) in enumerate(matches):
        lhs = lat.matvec(dphi, rd2.coroots[j])
        rhs = [Fraction(p) ** k * x for x in rd1.coroots[i]]
        if [Fraction(x) for x in lhs] != rhs:
            reasons.append(f"coroot condition fails at root {i}")
            return None
    return matches


def check_isomorphism(rd1: RootDatum, rd2: RootDatum, phi, reasons: Optional[List[str]] = None) -> bool:
    """Is ``phi: X1 -> X2`` an isomorphism of Z[1/p]-root data?"""
    p = _require_same_prime(rd1, rd2)
    reasons = [] if reasons is None else reasons
    A = [list(r) for r in (phi.rows() if isinstance(phi, lat.LatticeMap) else phi)]
    if lat.shape(A) != (rd2.rank_X, rd1.rank_X):
        raise lat.DimensionMismatch(f"phi is {lat.shape(A)}, expected {(rd2.rank_X, rd1.rank_X)}")
    R = Localization(p)
    if any(Fraction(x) not in R for row in A for x in row):
        reasons.append(f"entry not in Z[1/{p}]")
        return False
    if rd1.rank_X and not lat.is_unit_determinant(A, p):
        reasons.append("determinant is not a unit")
        return False
    return _root_conditions(rd1, rd2, A, reasons) is not None


def check_isogeny(rd1: RootDatum, rd2: RootDatum, phi) -> Tuple[bool, List[str]]:
    """Conditions (injective phi and phi^v, root bijection, coroot compatibility)."""
    p = _require_same_prime(rd1, rd2)
    A = [list(r) for r in (phi.rows() if isinstance(phi, lat.LatticeMap) else phi)]
    if lat.shape(A) != (rd2.rank_X, rd1.rank_X):
        raise lat.DimensionMismatch(f"phi is {lat.shape(A)}, expected {(rd2.rank_X, rd1.rank_X)}")
    reasons: List[str] = []
    R = Localization(p)
    if any(Fraction(x) not in R for row in A for x in row):
        reasons.append(f"entry not in Z[1/{p}]")
        return False, reasons
    if rd1.rank_X and lat.rank(A) != rd1.rank_X:
        reasons.append("phi is not injective")
    if rd2.rank_X and lat.rank(lat.transpose(A)) != rd2.rank_X:
        reasons.append("phi^v is not injective")
    if reasons:
        return False, reasons
    ok = _root_conditions(rd1, rd2, A, reasons) is not None
    return ok, reasons


def steinberg_normalize(phi, p: int) -> Tuple[List[List[int]], int]:
    """Canonical ``(theta, l)`` with ``phi = p^-l * theta``, theta integral and not divisible by p.

    This picks the representative of the class ``(theta, i) ~ (p theta, i - 1)``
    whose matrix has trivial p-content.
    """
    A = [list(r) for r in (phi.rows() if isinstance(phi, lat.LatticeMap) else phi)]
    R = Localization(p)
    vals = [R.valuation(x) for row in A for x in row if Fraction(x) != 0]
    if not vals:
        return [[0 for _ in row] for row in A], 0
    v = min(vals)
    f = Fraction(p) ** v
    theta = [[int(Fraction(x) / f) for x in row] for row in A]
    return theta, -v


def isogeny_witness(rd1: RootDatum, rd2: RootDatum, phi) -> Optional[IsogenyWitness]:
    ok, _ = check_isogeny(rd1, rd2, phi)
    if not ok:
        return None
    A = [[Fraction(x) for x in r] for r in phi]
    theta, l = steinberg_normalize(A, rd1.p)
    perm = tuple(j for j, _ in match_roots(rd1, rd2, A))
    return IsogenyWitness(tuple(map(tuple, A)), perm, l, tuple(map(tuple, theta)))


# ---------------------------------------------------------------------------
# Invariants


def _canonical_dynkin(rd: RootDatum) -> Tuple[str, ...]:
    labels = []
    for c in dynkin_components(rd):
        letter = c.letter
        if rd.p == 2 and letter == "C":
            letter = "B"
        labels.append(f"{letter}{c.rank}")
    return tuple(sorted(labels))


def _prime_to_p_torsion(columns, dim, p) -> Tuple[int, ...]:
    tors, _ = lat.cokernel_torsion(columns, dim)
    return tuple(d for d in (strip_p(t, p) for t in tors) if d > 1)


def invariants(rd: RootDatum) -> Dict[str, object]:
    """Invariants of the Z[1/p]-datum, in the order the certificate battery uses them."""
    p = rd.p
    comps = dynkin_components(rd)
    order = 1
    for c in comps:
        order *= weyl_order_of_type(c.letter, c.rank)
    return {
        "rank": rd.rank_X,
        "torus_rank": rd.torus_rank(),
        "weyl_order": order,
        "dynkin": list(_canonical_dynkin(rd)),
        "root_torsion_prime_to_p": list(_prime_to_p_torsion(rd.roots, rd.rank_X, p)),
        "coroot_torsion_prime_to_p": list(_prime_to_p_torsion(rd.coroots, rd.rank_Y, p)),
    }


# ---------------------------------------------------------------------------
# Witness search


def _exp_order(bound: int) -> List[int]:
    out = [0]
    for e in range(1, bound + 1):
        out += [e, -e]
    return out


def _coeff_order(bound: int) -> List[int]:
    return _exp_order(bound)


def _p_log(ratio: Fraction, p: int) -> Optional[int]:
    """t with ratio == p**t, or None."""
    if ratio <= 0:
        return None
    a = p_power_exponent(ratio.numerator, p)
    b = p_power_exponent(ratio.denominator, p)
    if a < 0 or b < 0:
        return None
    return a - b


class _Search:
    def __init__(self, rd1: RootDatum, rd2: RootDatum, budget: SearchBudget, scalars=None):
        self.rd1, self.rd2, self.budget = rd1, rd2, budget
        self.p = rd1.p
        self.nodes = 0
        self.exhaustive = True
        self.s1 = simple_root_indices(rd1)
        self.s2 = simple_root_indices(rd2)
        self.A1 = cartan_matrix(rd1, self.s1)
        self.A2 = cartan_matrix(rd2, self.s2)
        # scalars: None for p-power scalings, else a list of base ratios for reflection-group search
        self.scalars = scalars
        order = []
        pos = {s: k for k, s in enumerate(self.s1)}
        self.first_of_component = set()
        for c in dynkin_components(rd1):
            nodes = [pos[i] for i in c.simple]
            seen = [nodes[0]]
            self.first_of_component.add(nodes[0])
            frontier = [nodes[0]]
            while frontier:
                u = frontier.pop(0)
                for v in nodes:
                    if v not in seen and self.A1[u][v] != 0:
                        seen.append(v)
                        frontier.append(v)
            order += seen
        self.order = order

    def spend(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget.node_budget:
            self.exhaustive = False
            return False
        return True

    # scalars c_i are Fractions; for root-datum search they are powers of p
    def _edge_scalar(self, i, k, j, l, ck):
        """Scalar c_i forced by an assigned neighbour k (c_k known) or None if inconsistent."""
        a1, a2 = self.A1[i][k], self.A2[j][l]
        if (a1 == 0) != (a2 == 0):
            return None
        if a1 == 0:
            return "free"
        # A1[i][k] = (c_k / c_i) * A2[j][l]
        if a1 * a2 < 0:
            return None
        ci = ck * Fraction(a2, a1)
        if self.scalars is None and _p_log(ci, self.p) is None:
            return None
        return ci

    def assignments(self):
        n = len(self.order)
        assign: Dict[int, Tuple[int, Fraction]] = {}
        used = set()

        def consistent(i, j, ci):
            for k, (l, ck) in assign.items():
                if Fraction(self.A1[i][k]) != (ck / ci) * self.A2[j][l]:
                    return False
                if Fraction(self.A1[k][i]) != (ci / ck) * self.A2[l][j]:
                    return False
            return True

        def base_scalars(is_first_overall):
            if is_first_overall:
                return [Fraction(1)]
            if self.scalars is None:
                return [Fraction(self.p) ** e for e in _exp_order(self.budget.exp_bound)]
            out = []
            for e in _exp_order(self.budget.exp_bound):
                for d in self.scalars:
                    out.append(Fraction(self.p) ** e * d)
            return out

        def rec(t):
            if t == n:
                yield dict(assign)
                return
            i = self.order[t]
            for j in range(len(self.s2)):
                if j in used:
                    continue
                if not self.spend():
                    return
                forced = None
                for k, (l, ck) in assign.items():
                    c = self._edge_scalar(i, k, j, l, ck)
                    if c is None:
                        forced = "bad"
                        break
                    if c != "free":
                        forced = c
                        break
                if forced == "bad":
                    continue
                if forced is None:
                    cands = base_scalars(t == 0)
                else:
                    cands = [forced]
                for ci in cands:
                    if not consistent(i, j, ci):
                        continue
                    assign[i] = (j, ci)
                    used.add(j)
                    yield from rec(t + 1)
                    del assign[i]
                    used.discard(j)
                    if self.nodes > self.budget.node_budget:
                        return

        yield from rec(0)

    def solve(self, assign) -> List[List[List[Fraction]]]:
        """Candidate lattice maps realizing a simple-root assignment, in search order."""
        rd1, rd2, p = self.rd1, self.rd2, self.p
        r = rd1.rank_X
        cols_src, cols_dst = [], []
        fun_src, fun_dst = [], []
        for i, (j, c) in assign.items():
            a = rd1.roots[self.s1[i]]
            b = rd2.roots[self.s2[j]]
            cols_src.append([Fraction(x) for x in a])
            cols_dst.append([c * x for x in b])
            # (P2 b^v)^T Phi = c (P1 a^v)^T
            fun_dst.append(lat.matvec(rd2.pairing, rd2.coroots[self.s2[j]]))
            fun_src.append([c * x for x in lat.matvec(rd1.pairing, rd1.coroots[self.s1[i]])])
        s = len(assign)
        if s == 0:
            return [lat.to_fractions(lat.identity(r))]
        if s == r:
            A = lat.transpose(cols_src)
            B = lat.transpose(cols_dst)
            return [lat.matmul(B, lat.inverse(A))]
        # general case: unknowns Phi[u][v] flattened row-major
        rows, rhs = [], []
        for a, b in zip(cols_src, cols_dst):
            for u in range(r):
                row = [Fraction(0)] * (r * r)
                for v in range(r):
                    row[u * r + v] = a[v]
                rows.append(row)
                rhs.append(b[u])
        for f, g in zip(fun_dst, fun_src):
            for v in range(r):
                row = [Fraction(0)] * (r * r)
                for u in range(r):
                    row[u * r + v] = Fraction(f[u])
                rows.append(row)
                rhs.append(g[v])
        den = 1
        for x in [x for row in rows for x in row] + rhs:
            den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
        M = [[int(x * den) for x in row] for row in rows]
        shift0 = max([0] + [-(_p_val_frac(x, p)) for x in rhs if x != 0])
        out = []
        for f in range(shift0, shift0 + self.budget.exp_bound + 1):
            pf = p**f
            b = [x * den * pf for x in rhs]
            if any(Fraction(x).denominator != 1 for x in b):
                continue
            sol = lat.integer_solutions(M, [int(x) for x in b])
            if sol is None:
                continue
            x0, kernel = sol
            for Psi in self._complete(x0, kernel, r, f):
                out.append([[Fraction(x, pf) for x in row] for row in Psi])
        return out

    def _complete(self, x0, kernel, r, f):
        p = self.p

        def mat(vec):
            return [vec[u * r:(u + 1) * r] for u in range(r)]

        if not kernel:
            yield mat(x0)
            return
        if len(kernel) == 1:
            K = kernel[0]
            d0 = lat.det(mat(x0))
            d1 = lat.det(mat([a + b for a, b in zip(x0, K)]))
            beta = d1 - d0  # det is affine along a rank-one direction
            for j in range(0, r * (f + self.budget.exp_bound) + 1):
                for sign in (1, -1):
                    if not self.spend():
                        return
                    target = sign * p**j
                    if beta == 0:
                        if d0 == target:
                            yield mat(x0)
                            return
                        continue
                    c = (target - d0) / beta
                    if c.denominator == 1:
                        cand = [a + int(c) * b for a, b in zip(x0, K)]
                        if lat.det(mat(cand)) == target:
                            yield mat(cand)
            return
        self.exhaustive = False
        for coeffs in itertools.product(_coeff_order(self.budget.coeff_bound), repeat=len(kernel)):
            if not self.spend():
                return
            cand = list(x0)
            for c, K in zip(coeffs, kernel):
                if c:
                    cand = [a + c * b for a, b in zip(cand, K)]
            yield mat(cand)


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def _p_val_frac(x, p):
    return Localization(p).valuation(x)


def decide_isomorphism(rd1: RootDatum, rd2: RootDatum, budget: SearchBudget = SearchBudget()) -> IsoVerdict:
    """Three-valued decision: Isomorphic (with witness), NotIsomorphic (with certificate) or Unknown."""
    _require_same_prime(rd1, rd2)
    inv1, inv2 = invariants(rd1), invariants(rd2)
    for name in inv1:
        if inv1[name] != inv2[name]:
            return IsoVerdict(NOT_ISOMORPHIC, certificate={"invariant": name, "lhs": inv1[name], "rhs": inv2[name]},
                              budget_spent={"nodes": 0})
    search = _Search(rd1, rd2, budget)
    for assign in search.assignments():
        for phi in search.solve(assign):
            if check_isomorphism(rd1, rd2, phi):
                return IsoVerdict(ISOMORPHIC, witness=lat.simplify(phi), budget_spent={"nodes": search.nodes})
    return IsoVerdict(UNKNOWN, budget_spent={"nodes": search.nodes, "exhausted": int(search.nodes > budget.node_budget)})


# ---------------------------------------------------------------------------
# Reflection-group level


def reflection_factors(rd1: RootDatum, rd2: RootDatum, phi) -> Optional[List[Fraction]]:
    """For each root a of rd1, the positive scalar c with ``phi(a) = c * b`` for a root b of rd2."""
    out = []
    for a in rd1.roots:
        v = [Fraction(x) for x in lat.matvec(phi, a)]
        found = None
        for b in rd2.roots:
            nz = [(x, y) for x, y in zip(v, b) if y != 0]
            if not nz:
                continue
            c = nz[0][0] / nz[0][1]
            if c > 0 and all(x == c * y for x, y in zip(v, b)):
                found = c
                break
        if found is None:
            return None
        out.append(found)
    return out


def is_reflection_group_isomorphism(rd1: RootDatum, rd2: RootDatum, phi) -> bool:
    """``phi`` is invertible over Z[1/p] and conjugates each reflection of W1 onto one of W2."""
    p = _require_same_prime(rd1, rd2)
    A = [[Fraction(x) for x in r] for r in phi]
    if lat.shape(A) != (rd2.rank_X, rd1.rank_X) or not lat.is_unit_determinant(A, p):
        return False
    Ainv = lat.inverse(A)
    refl2 = {tuple(map(tuple, lat.to_fractions(reflection(rd2, j, "X")))) for j in range(rd2.positive_count)}
    for i in range(rd1.positive_count):
        S = lat.matmul(lat.matmul(A, reflection(rd1, i, "X")), Ainv)
        if tuple(map(tuple, S)) not in refl2:
            return False
    return rd1.positive_count == rd2.positive_count


def upgrade_reflection_isomorphism(rd1: RootDatum, rd2: RootDatum, phi) -> bool:
    """Decide whether a reflection-group isomorphism is one of root data.

    Each reflection contributes a factor c with ``phi(P_s) = c P'_s'``; by the
    rank-one dichotomy c is 1, 2 or 1/2 up to units.  At p = 2 all of these are
    units; for odd p only c = 1 (up to units) is accepted.
    """
    p = _require_same_prime(rd1, rd2)
    facs = reflection_factors(rd1, rd2, phi)
    if facs is None:
        return False
    R = Localization(p)
    for c in facs:
        core = Fraction(strip_p(c.numerator, p), strip_p(c.denominator, p))
        if core not in (1, 2, Fraction(1, 2)):
            raise ValueError(f"reflection factor {c} violates the rank-one dichotomy")
    return all(R.is_unit(c) for c in facs)


def find_reflection_group_isomorphism(rd1: RootDatum, rd2: RootDatum, budget: SearchBudget = SearchBudget()):
    """Search for a Z[1/p]-lattice isomorphism conjugating W1 onto W2 (scalings need not be p-powers)."""
    _require_same_prime(rd1, rd2)
    if rd1.rank_X != rd2.rank_X or rd1.n_roots != rd2.n_roots or rd1.torus_rank() != rd2.torus_rank():
        return None
    search = _Search(rd1, rd2, budget,
                     scalars=[Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3)])
    if len(search.s1) != len(search.s2):
        return None
    for assign in search.assignments():
        try:
            cands = search.solve(assign)
        except lat.LatticeError:
            continue
        for phi in cands:
            if is_reflection_group_isomorphism(rd1, rd2, phi):
                return phi
    return None


def exponent_spreads(rd1: RootDatum, rd2: RootDatum, phi) -> List[int]:
    """Per Dynkin component of rd1, max - min of the p-exponents of root images."""
    matches = match_roots(rd1, rd2, phi)
    comps = dynkin_components(rd1)
    simple_vecs = [[rd1.roots[i] for i in c.simple] for c in comps]
    all_simple = [v for vs in simple_vecs for v in vs]
    owner = [k for k, vs in enumerate(simple_vecs) for _ in vs]
    spreads: Dict[int, List[int]] = {k: [] for k in range(len(comps))}
    A = lat.transpose([list(v) for v in all_simple])
    for a, (_, k) in zip(rd1.roots, matches):
        coeffs = lat.solve_rational(A, a)
        comp = next(owner[t] for t, c in enumerate(coeffs) if c != 0)
        spreads[comp].append(k)
    return [max(v) - min(v) for v in spreads.values() if v]
