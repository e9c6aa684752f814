import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from perfgroups import lattice as lat
from perfgroups.scalars import NotLocalized


def _diag_of(A):
    return tuple(abs(int(d)) for d in invariant_factors(sympy.Matrix(A), domain=sympy.ZZ))


# -- Smith normal form ----------------------------------------------------------


def test_snf_two_three():
    assert lat.smith_normal_form([[2, 0], [0, 3]]).diag == (1, 6)


def test_snf_identity():
    assert lat.smith_normal_form(lat.identity(2)).diag == (1, 1)


def test_snf_zero():
    assert lat.smith_normal_form([[0]]).diag == (0,)


def _check_snf(A):
    s = lat.smith_normal_form(A)
    assert lat.matmul(lat.matmul(s.left, A), s.right) == s.snf
    m, n = lat.shape(A)
    for i in range(m):
        for j in range(n):
            if i != j:
                assert s.snf[i][j] == 0
    assert abs(lat.det(s.left)) == 1 and abs(lat.det(s.right)) == 1
    nz = [d for d in s.diag if d]
    assert all(d > 0 for d in nz)
    assert all(nz[k + 1] % nz[k] == 0 for k in range(len(nz) - 1))
    assert all(d == 0 for d in s.diag[len(nz):])
    return s


def test_snf_reconstruction_random():
    rng = random.Random(7)
    for _ in range(200):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        s = _check_snf(A)
        # independent oracle for the invariant factors
        assert s.invariant_factors() == tuple(d for d in _diag_of(A) if d)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_hypothesis(A):
    _check_snf(A)


def test_integer_solutions_basic():
    x0, kernel = lat.integer_solutions([[2, 4]], [6])
    assert 2 * x0[0] + 4 * x0[1] == 6
    assert len(kernel) == 1
    assert lat.integer_solutions([[2, 4]], [3]) is None


def test_cokernel_torsion_of_a_root_lattice():
    # X/ZR for SL3 in the fundamental weight basis: Z/3
    assert lat.cokernel_torsion([[2, -1], [-1, 2]], 2) == ((3,), 0)
    assert lat.cokernel_torsion([], 2) == ((), 2)


# -- span membership over Z[1/p] ------------------------------------------------


def test_span_two_thirds_in_two_z_third():
    assert lat.in_span_over_zp([Fraction(2, 3)], [[2]], 3)


def test_span_one_not_in_two_z_third():
    assert not lat.in_span_over_zp([1], [[2]], 3)


def test_span_one_in_two_z_half():
    assert lat.in_span_over_zp([1], [[2]], 2)


def test_span_dimension_mismatch():
    with pytest.raises(lat.DimensionMismatch):
        lat.in_span_over_zp([1, 2], [[1]], 3)


def _brute_span(v, S, p, bound=50, emax=3):
    """Search c_i = a_i / p^e with |a_i| <= bound, e <= emax."""
    for e in range(emax + 1):
        target = [x * p**e for x in v]
        if any(t.denominator != 1 for t in target):
            continue
        ranges = [range(-bound, bound + 1)] * len(S)
        for coeffs in itertools.product(*ranges):
            if all(sum(c * s[k] for c, s in zip(coeffs, S)) == target[k] for k in range(len(v))):
                return True
    return False


def test_span_agrees_with_brute_force():
    rng = random.Random(11)
    checked = 0
    for _ in range(120):
        p = rng.choice([2, 3, 5])
        dim = rng.randint(1, 2)
        k = rng.randint(1, 2)
        S = [[rng.randint(-4, 4) for _ in range(dim)] for _ in range(k)]
        coeffs = [Fraction(rng.randint(-6, 6), p ** rng.randint(0, 2)) for _ in range(k)]
        if rng.random() < 0.5:
            v = [sum(c * s[i] for c, s in zip(coeffs, S)) for i in range(dim)]
        else:
            v = [Fraction(rng.randint(-6, 6), p ** rng.randint(0, 1)) for _ in range(dim)]
        got = lat.in_span_over_zp(v, S, p)
        brute = _brute_span(v, S, p, bound=12 if k == 2 else 50)
        if brute:
            assert got, (v, S, p)
        if got != brute:
            # brute force is bounded; a True from the exact test must come with a certificate
            x = lat.solve_rational(lat.transpose(S), v)
            assert x is not None
        checked += 1
    assert checked == 120


def test_span_rank_three_instances():
    rng = random.Random(3)
    for _ in range(40):
        p = rng.choice([2, 3])
        S = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(rng.randint(1, 3))]
        c = [Fraction(rng.randint(-3, 3), p ** rng.randint(0, 2)) for _ in S]
        v = [sum(ci * s[i] for ci, s in zip(c, S)) for i in range(3)]
        assert lat.in_span_over_zp(v, S, p)
        w = [x + Fraction(1, 7) for x in v]
        with pytest.raises(NotLocalized):
            lat.in_span_over_zp(w, S, p)


# -- determinants, duals -------------------------------------------------------


def test_unit_determinant_examples():
    assert lat.is_unit_determinant([[Fraction(1, 3)]], 3)
    assert not lat.is_unit_determinant([[2]], 3)
    for p in (2, 3, 5):
        assert lat.is_unit_determinant([[0, 1], [1, 0]], p)


def test_unit_determinant_requires_square():
    with pytest.raises(lat.NotSquare):
        lat.is_unit_determinant([[1, 2]], 3)


def test_dual_of_identity():
    assert lat.dual_map(lat.identity(2)) == lat.to_fractions(lat.identity(2))


def test_dual_of_scalar():
    assert lat.dual_map([[3, 0], [0, 3]]) == [[3, 0], [0, 3]]


def test_dual_is_transpose_for_standard_pairing():
    assert lat.dual_map([[1, 1], [0, 1]]) == [[1, 0], [1, 1]]


def test_dual_adjunction_and_involution():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(1, 3)
        while True:
            P = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            P = [[P[i][j] + P[j][i] for j in range(n)] for i in range(n)]
            Q = [[int(i == j) * rng.choice([1, 2]) for j in range(n)] for i in range(n)]
            if lat.det(P) != 0:
                break
        M = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        D = lat.dual_map(M, P, Q)
        for i in range(n):
            for j in range(n):
                x = [int(k == i) for k in range(n)]
                y = [int(k == j) for k in range(n)]
                lhs = sum(a * b for a, b in zip(lat.matvec(M, x), lat.matvec(Q, y)))
                rhs = sum(a * b for a, b in zip(x, lat.matvec(P, lat.matvec(D, y))))
                assert lhs == rhs
        assert lat.dual_map(D, Q, P) == lat.to_fractions(M)


def test_dual_dimension_mismatch():
    with pytest.raises(lat.DimensionMismatch):
        lat.dual_map([[1, 0]], [[1]], [[1, 0], [0, 1]])


def test_lattice_map_checks_ring():
    Z = lat.Lattice(1)
    with pytest.raises(lat.LatticeError):
        lat.LatticeMap(((Fraction(1, 3),),), Z, Z)
    Zp = lat.Lattice(1, "Z_inv_p", 3)
    with pytest.raises(lat.LatticeError):
        lat.LatticeMap(((Fraction(1, 2),),), Zp, Zp)
    m = lat.LatticeMap.from_rows([[Fraction(1, 3)]], p=3)
    assert m([3]) == [1]


def test_lattice_map_dimension_check():
    with pytest.raises(lat.DimensionMismatch):
        lat.LatticeMap(((1, 0),), lat.Lattice(1), lat.Lattice(1))


def test_lattice_map_composition():
    a = lat.LatticeMap.from_rows([[1, 1], [0, 1]])
    b = lat.LatticeMap.from_rows([[1, 0], [2, 1]])
    assert a.compose(b).rows() == lat.matmul([[1, 1], [0, 1]], [[1, 0], [2, 1]])


def test_det_and_inverse():
    A = [[2, 1], [1, 1]]
    assert lat.det(A) == 1
    assert lat.matmul(A, lat.inverse(A)) == lat.to_fractions(lat.identity(2))
