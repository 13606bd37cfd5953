import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from aswtower.algebra import FieldParams, Poly, TruncSeries, make_field, prime_field
from aswtower.lfun import (
    FrobeniusElement,
    TRing,
    berkowitz,
    char_value,
    compare_np_hp,
    euler_convention_sweep,
    euler_precision,
    euler_product,
    fredholm_np,
    frobenius_alpha,
    growth_violations,
    hodge_polygon,
    irreducibles,
    lower_hull,
    necklace_count,
    nuclear_matrix,
)
from aswtower.profile import TowerProfile

F2 = prime_field(2)


@pytest.fixture(scope="module")
def p2_frob(tower_of):
    return frobenius_alpha(tower_of(2, ((1, 1),)), 1)


def test_alpha_p2(p2_frob):
    assert p2_frob.alpha.terms == {(0, 0): 1, (1, 1): 1}


@pytest.mark.parametrize("coeffs,c", [([1, 1], 1), ([0, 1], 0), ([1, 1, 1], 1)])
def test_character_values(p2_frob, coeffs, c):
    v = Poly.from_coeffs(F2, coeffs)
    assert char_value(p2_frob, v, 1)[0] == c


def test_plain_euler_product_p2(p2_frob):
    R = TRing(F2, 2)
    coeffs = euler_product(p2_frob, F2, 2, inverted=False, character="direct")
    assert [R.to_terms(c) for c in coeffs] == [{0: 1}, {1: 1}, {}]


def test_trivial_character_gives_affine_line_zeta():
    for F in (prime_field(3), make_field(FieldParams(2, 2, (1, 1, 1)))):
        one = TruncSeries.one(F, 1)
        fe = FrobeniusElement(1, 1, one, one)
        R = TRing(F, 1)
        coeffs = euler_product(fe, F, 3)
        # 1/(1 - q s) has coefficients q^k, which vanish in characteristic p for k >= 1
        assert [R.to_terms(c) for c in coeffs] == [{0: 1}, {}, {}, {}]


def test_place_counts():
    for F in (prime_field(2), prime_field(3), make_field(FieldParams(2, 2, (1, 1, 1)))):
        for m in (1, 2, 3):
            assert len(irreducibles(F, m)) == necklace_count(F.q, m)


def test_nuclear_matrix_p2(p2_frob):
    R = TRing(F2, 2)
    M = nuclear_matrix(p2_frob, F2, 2)
    assert R.to_terms(M[0, 0]) == {1: 1}
    assert R.to_terms(M[0, 1]) == {0: 1}
    assert not M[1].any()
    c = berkowitz(R, M)
    assert R.to_terms(c[1]) == {1: 1}


def test_empty_matrix(p2_frob):
    np_, coeffs = fredholm_np(p2_frob, F2, TowerProfile(2, 1), 1, 0)
    assert np_.vertices == [(0, 0)]


def test_hodge_polygon_p3():
    assert hodge_polygon(TowerProfile(3, 2), 3) == [(0, 0), (1, 1), (2, 3), (3, 6)]


def test_lower_hull():
    pts = [(0, Fraction(0)), (1, Fraction(2)), (2, Fraction(1)), (3, Fraction(3))]
    assert lower_hull(pts) == [(0, 0), (2, 1), (3, 3)]


def _sympy_charpoly_coeffs(entries, p, N):
    """det(1 - sM) over Z[T] with sympy, reduced mod (p, T^N)."""
    T, s = sympy.symbols("T s")
    t = len(entries)
    M = sympy.Matrix(t, t, lambda i, j: sum(c * T ** k for k, c in entries[i][j].items()))
    det = sympy.expand((sympy.eye(t) - s * M).det())
    poly = sympy.Poly(det, s, T)
    out = [dict() for _ in range(t + 1)]
    for (ks, kT), c in poly.terms():
        if kT < N and c % p:
            out[ks][kT] = int(c) % p
    return out


@pytest.mark.parametrize("p,N,t", [(2, 4, 3), (3, 3, 4), (5, 2, 3)])
def test_berkowitz_matches_sympy(p, N, t):
    F = prime_field(p)
    R = TRing(F, N)
    rng = random.Random(p * 100 + t)
    for _ in range(3):
        entries = [[{k: rng.randrange(p) for k in range(N) if rng.random() < 0.5} for _ in range(t)] for _ in range(t)]
        M = R.zeros((t, t))
        for i in range(t):
            for j in range(t):
                M[i, j] = R.from_terms({k: c for k, c in entries[i][j].items() if c})
        got = [R.to_terms(c) for c in berkowitz(R, M)]
        assert got == _sympy_charpoly_coeffs(entries, p, N)


def test_berkowitz_block_diagonal_factors():
    F = make_field(FieldParams(3, 2, (1, 0, 1)))
    R = TRing(F, 3)
    rng = np.random.default_rng(0)
    A = rng.integers(0, 3, size=(2, 2, 2, 3))
    B = rng.integers(0, 3, size=(3, 3, 2, 3))
    M = R.zeros((5, 5))
    M[:2, :2] = A
    M[2:, 2:] = B
    ca, cb, cm = berkowitz(R, A), berkowitz(R, B), berkowitz(R, M)
    prod = [R.zeros() for _ in range(6)]
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] = (prod[i + j] + R.mul(x, y)) % 3
    assert all(np.array_equal(a, b) for a, b in zip(prod, cm))


def test_tring_matches_field_multiplication():
    F = make_field(FieldParams(2, 3, (1, 1, 0, 1)))
    R = TRing(F, 1)
    for a in range(F.q):
        for b in range(F.q):
            assert R.to_terms(R.mul(R.from_terms({0: a}), R.from_terms({0: b}))).get(0, 0) == F.mul(a, b)


def test_growth_violation_detection():
    s = TruncSeries(F2, 4, {(0, 0): 1, (3, 1): 1})
    assert growth_violations(s, 2, "s") == [("s", 3, 1)]


@pytest.mark.slow
def test_newton_equals_hodge_p3(tower_of):
    t = tower_of(3, ((2, 1),))
    fe = frobenius_alpha(t, 2)
    np_, coeffs = fredholm_np(fe, t.F, t.profile, 2, 8)
    assert np_.trust_bound == 9
    cmp_ = compare_np_hp(np_, t.profile)
    assert cmp_.mode == "full" and cmp_.full_equality and cmp_.passed
    sweep = euler_convention_sweep(fe, t.F, 3, coeffs, euler_precision(fe, t.F, np_))
    assert sweep[("inverted", "inverse")]
    assert not sweep[("plain", "direct")]


def test_nuclear_entry_growth(tower_of):
    t = tower_of(5, ((3, 1),))
    fe = frobenius_alpha(t, 2)
    R = TRing(t.F, 25)
    M = nuclear_matrix(fe, t.F, 10)
    for i in range(10):
        for j in range(10):
            v = R.valuation(M[i, j])
            if v is not None:
                assert 3 * v >= 5 * (i + 1) - (j + 1)
