"""Free Z- and Z[1/p]-modules of finite rank and exact maps between them.

Matrices are lists of rows.  Integer matrices hold ``int`` entries, localized
ones hold :class:`~fractions.Fraction` entries; nothing here touches floating
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .scalars import Localization, p_power_exponent, strip_p

Matrix = List[List[Fraction]]
IntMatrix = List[List[int]]


class LatticeError(ValueError):
    pass


class DimensionMismatch(LatticeError):
    pass


class NotSquare(LatticeError):
    pass


# ---------------------------------------------------------------------------
# Plain matrix helpers


def shape(A) -> Tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> IntMatrix:
    return [[0] * n for _ in range(m)]


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A, B):
    if A and B and len(A[0]) != len(B):
        raise DimensionMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    if not A:
        return []
    n = len(B[0]) if B else 0
    Bt = transpose(B) if B else [[] for _ in range(n)]
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    if A and len(A[0]) != len(v):
        raise DimensionMismatch(f"cannot apply {shape(A)} matrix to vector of length {len(v)}")
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def scale(A, c):
    return [[c * x for x in row] for row in A]


def to_fractions(A) -> Matrix:
    return [[Fraction(x) for x in row] for row in A]


def simplify(A):
    """Turn integral Fraction entries back into ints."""
    return [[int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in row] for row in A]


def det(A) -> Fraction:
    n, m = shape(A)
    if n != m:
        raise NotSquare(f"{n}x{m} matrix has no determinant")
    M = to_fractions(A)
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return d


def rref(A):
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    M = to_fractions(A)
    m, n = shape(M)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M, pivots


def rank(A) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def inverse(A) -> Matrix:
    n, m = shape(A)
    if n != m:
        raise NotSquare(f"{n}x{m} matrix has no inverse")
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(to_fractions(A))]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise LatticeError("matrix is singular")
    return [row[n:] for row in R]


def solve_rational(A, b) -> Optional[List[Fraction]]:
    """One rational solution of ``A x = b`` or None."""
    m, n = shape(A)
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(to_fractions(A), b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def is_integral(A) -> bool:
    return all(Fraction(x).denominator == 1 for row in A for x in row)


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ A @ right == snf`` with unimodular ``left`` and ``right``."""

    left: IntMatrix
    right: IntMatrix
    snf: IntMatrix
    diag: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)

    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diag if d)


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form of an integer matrix with both transforms.

    Elementary row/column operations, pivoting on the entry of least
    absolute value.  The diagonal satisfies ``d_1 | d_2 | ...`` with all
    ``d_i >= 0``.
    """
    D = [[int(x) for x in row] for row in A]
    m, n = len(D), (len(D[0]) if D else 0)
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (D, R):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        L[dst] = [a + q * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, q):  # col dst += q * col src
        for M in (D, R):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
            rest = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
            rest += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                if i1 != t:
                    swap_rows(t, i1)
                else:
                    swap_cols(t, j1)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]
    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SmithDecomposition(L, R, D, diag)


def integer_solutions(A, b):
    """Integer solutions of ``A x = b``.

    Returns ``(x0, kernel)`` where every integer solution is ``x0`` plus an
    integer combination of the ``kernel`` vectors, or ``None`` when there is
    no integer solution.
    """
    m, n = shape(A)
    snf = smith_normal_form(A)
    c = matvec(snf.left, [int(x) for x in b])
    y = [0] * n
    for i in range(m):
        d = snf.diag[i] if i < len(snf.diag) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    x0 = matvec(snf.right, y)
    kernel = [[snf.right[r][j] for r in range(n)] for j in range(n) if j >= len(snf.diag) or snf.diag[j] == 0]
    return x0, kernel


def cokernel_torsion(columns: Sequence[Sequence[int]], dim: int) -> Tuple[Tuple[int, ...], int]:
    """Torsion invariant factors (>1) and free rank of Z^dim / span(columns)."""
    if not columns:
        return (), dim
    A = transpose([list(map(int, c)) for c in columns])
    snf = smith_normal_form(A)
    facs = snf.invariant_factors()
    return tuple(d for d in facs if d > 1), dim - len(facs)


# ---------------------------------------------------------------------------
# Lattices and maps


@dataclass(frozen=True)
class Lattice:
    rank: int
    ring: str = "Z"  # "Z" or "Z_inv_p"
    p: Optional[int] = None

    def __post_init__(self):
        if self.rank < 0:
            raise LatticeError("rank must be nonnegative")
        if self.ring not in ("Z", "Z_inv_p"):
            raise LatticeError(f"unknown ring tag {self.ring!r}")
        if self.ring == "Z_inv_p" and self.p is None:
            raise LatticeError("Z[1/p] lattice needs a prime")

    def contains_entry(self, x) -> bool:
        x = Fraction(x)
        if self.ring == "Z":
            return x.denominator == 1
        return x in Localization(self.p)


@dataclass(frozen=True)
class LatticeMap:
    """A map ``domain -> codomain`` given by a ``codomain.rank x domain.rank`` matrix."""

    matrix: Tuple[Tuple[Fraction, ...], ...]
    domain: Lattice
    codomain: Lattice

    def __post_init__(self):
        m, n = shape(self.matrix)
        if self.matrix and (m, n) != (self.codomain.rank, self.domain.rank):
            raise DimensionMismatch(f"matrix {m}x{n} does not fit {self.domain.rank} -> {self.codomain.rank}")
        for row in self.matrix:
            for x in row:
                if not self.codomain.contains_entry(x):
                    raise LatticeError(f"entry {x} outside the declared ring")

    @classmethod
    def from_rows(cls, rows, p: Optional[int] = None) -> "LatticeMap":
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        m, n = shape(rows)
        ring = "Z" if p is None else "Z_inv_p"
        return cls(rows, Lattice(n, ring, p), Lattice(m, ring, p))

    def rows(self) -> Matrix:
        return [list(r) for r in self.matrix]

    def __call__(self, v):
        return matvec(self.matrix, v)

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """``self o other``."""
        if other.codomain.rank != self.domain.rank:
            raise DimensionMismatch("composition dimensions disagree")
        M = matmul(self.rows(), other.rows())
        return LatticeMap(tuple(tuple(r) for r in M), other.domain, self.codomain)


def _as_rows(M):
    return M.rows() if isinstance(M, LatticeMap) else [list(r) for r in M]


def is_unit_determinant(M, p: int) -> bool:
    """True iff ``M`` is square over Z[1/p] with determinant +-p**k."""
    A = _as_rows(M)
    n, m = shape(A)
    if n != m:
        raise NotSquare(f"{n}x{m} matrix")
    R = Localization(p)
    if any(x not in R for row in A for x in row):
        return False
    return R.is_unit(det(A)) if n else True


def dual_map(M, pairing_domain=None, pairing_codomain=None) -> Matrix:
    """Adjoint of ``M: V -> V'`` with respect to pairings ``V x W`` and ``V' x W'``.

    With ``<x, y> = x^T P y`` the dual ``W' -> W`` is ``P^-1 M^T P'``, so
    ``<M x, y'> = <x, dual(M) y'>``.  Pairings default to the standard one.
    """
    A = to_fractions(_as_rows(M))
    m, n = shape(A)
    P = to_fractions(pairing_domain) if pairing_domain is not None else to_fractions(identity(n))
    Q = to_fractions(pairing_codomain) if pairing_codomain is not None else to_fractions(identity(m))
    if shape(P)[0] != n or shape(Q)[0] != m:
        raise DimensionMismatch("pairings do not fit the map")
    return matmul(matmul(inverse(P), transpose(A)), Q)


def in_span_over_zp(v, S, p: int) -> bool:
    """Is ``v`` a Z[1/p]-linear combination of the vectors in ``S``?

    Denominators are cleared by a power of p, then membership of
    ``p**f * v`` in the Z-span of ``S`` for some f is read off the Smith form:
    only the prime-to-p parts of the invariant factors matter.
    """
    v = [Fraction(x) for x in v]
    S = [[Fraction(x) for x in s] for s in S]
    if any(len(s) != len(v) for s in S):
        raise DimensionMismatch("vectors have different lengths")
    R = Localization(p)
    for x in v + [x for s in S for x in s]:
        R.element(x)
    if all(x == 0 for x in v):
        return True
    if not S:
        return False
    k = max(p_power_exponent(x.denominator, p) for x in v + [x for s in S for x in s])
    f = p**k
    vi = [int(x * f) for x in v]
    A = transpose([[int(x * f) for x in s] for s in S])
    snf = smith_normal_form(A)
    c = matvec(snf.left, vi)
    for i, ci in enumerate(c):
        d = snf.diag[i] if i < len(snf.diag) else 0
        if d == 0:
            if ci:
                return False
        elif ci % strip_p(d, p):
            return False
    return True
