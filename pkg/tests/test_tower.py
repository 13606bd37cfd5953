import random

import pytest
from hypothesis import given, settings, strategies as st

from aswtower.profile import break_lower, genus
from aswtower.tower import (
    TABLE1_EXPECTED,
    SpecError,
    Tower,
    TowerSpec,
    build_tower,
    poly_label,
    table1_specs,
)
from aswtower.witt import WittVec, build_rhs, witt_add, witt_sub

TOWERS = [
    (2, ((1, 1),)),
    (2, ((3, 1), (1, 1))),
    (3, ((2, 1),)),
    (3, ((4, 1), (1, 2))),
    (5, ((3, 1),)),
    (5, ((4, 1), (2, 3))),
]


def test_level_one_equation(tower_of):
    t = tower_of(3, ((2, 1),))
    assert t.f(0) == t.monomial(2, 0, 1, 0)
    assert t.genus(1) == 1
    # y0^3 reduces to y0 + x^2
    assert t.y(0) ** 3 == t.y(0) + t.monomial(2, 0, 1, 1)


def test_p2_second_level_is_standard(tower_of):
    t = tower_of(2, ((1, 1),))
    f1 = t.f(1)
    assert f1.ord(1) == -break_lower(t.profile, 2) == -3
    assert f1 == t.monomial(1, 1, 1, 1)


def test_reduction_in_char_two():
    t = build_tower(TowerSpec.simple(2, {3: 1}, 1))
    y4 = t.y_power([4])
    assert y4 == t.y(0) + t.monomial(3, 0, 1, 1) + t.monomial(6, 0, 1, 1)
    assert t.y_power([1]) == t.y(0)


def test_table_spec_pole_order():
    for lift in ("teichmuller", "integer"):
        t = build_tower(table1_specs(lift)[0])
        assert t.f(1).ord(1) == -126


def test_lifts_give_different_equations():
    for i, (a, b) in enumerate(zip(table1_specs("teichmuller"), table1_specs("integer"))):
        same = build_tower(a).f(1) == build_tower(b).f(1)
        # only f = X^6 has no coefficient other than 1
        assert same == (i == 4)


@pytest.mark.parametrize("p,items", TOWERS)
def test_original_coordinates_solve_the_witt_equation(tower_of, p, items):
    """F(y~) - y~ = f([x]) and gamma(y~) = y~ + 1 as Witt vectors over R_2."""
    t = tower_of(p, items)
    n = 2
    zero = t.zero(n)
    scale = lambda v, c: v.scale(c)
    ys = WittVec(tuple(t.original_coordinate(i, n) for i in range(n)))
    frob = WittVec(tuple(y.frob() for y in ys.coords))
    rhs = build_rhs(t.F, t.spec.witt_coeffs(t.spec.levels), t.spec.levels)
    lhs = witt_sub(frob, ys, p, zero, scale)
    for i in range(n):
        assert lhs.coords[i] == t.from_poly(rhs.coords[i], n)
    one = WittVec((t.one(n),) + (zero,) * (n - 1))
    shifted = witt_add(ys, one, p, zero, scale)
    for i in range(n):
        assert t.gamma(ys.coords[i]) == shifted.coords[i]


@pytest.mark.parametrize("p,items", TOWERS)
def test_standard_form(tower_of, p, items):
    t = tower_of(p, items)
    for m in range(2):
        f = t.f(m)
        assert -f.ord(m) == break_lower(t.profile, m + 1)
        assert t.levels[m].kappa == 1
        # y_m^p - y_m = f_m in the reduced arithmetic
        assert t.y(m) ** p - t.y(m) == f.lift(m + 1)


@pytest.mark.parametrize("p,items", TOWERS[:4])
def test_gamma_properties(tower_of, p, items):
    t = tower_of(p, items)
    rng = random.Random(1)
    n = 2
    for _ in range(4):
        a = t.random_element(rng, n, 3, 0.25)
        b = t.random_element(rng, n, 3, 0.25)
        assert t.gamma(a * b) == t.gamma(a) * t.gamma(b)
        assert t.gamma(a.frob()) == t.gamma(a).frob()
        c = a
        for _ in range(p ** n):
            c = t.gamma(c)
        assert c == a


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(TOWERS), st.integers(0, 5), st.integers(0, 8), st.integers(0, 5), st.integers(0, 8))
def test_valuation_is_additive_on_monomials(tower_of, spec, e1, a1, e2, a2):
    p, items = spec
    t = tower_of(p, items)
    n = 2
    a1 %= p ** n
    a2 %= p ** n
    u, v = t.monomial(e1, a1, 1, n), t.monomial(e2, a2, 1, n)
    assert (u * v).ord(n) == u.ord(n) + v.ord(n)


def test_monomial_valuations_distinct(tower_of):
    t = tower_of(5, ((3, 1),))
    n = 2
    seen = {t.weight(0, a, n) % 25 for a in range(25)}
    assert len(seen) == 25


def test_genus_helper_matches_profile(tower_of):
    t = tower_of(5, ((3, 1),))
    assert t.genus(2) == genus(t.profile, 2)


# -- spec files

def test_spec_round_trip():
    text = "# comment\np=3\nnu=2\nmodulus=1,0,1\nlevels=2\nlift=integer\nc 4 1\nc 1 0:1 2\n"
    spec = TowerSpec.parse(text)
    assert spec.d == 4 and spec.field.nu == 2 and spec.lift == "integer"
    assert TowerSpec.parse(spec.serialize()) == spec


@pytest.mark.parametrize("text,match", [
    ("c 1 1\n", "missing key p"),
    ("p=3\nq=1\nc 1 1\n", "unknown key"),
    ("p=3\np=3\nc 1 1\n", "duplicate"),
    ("p=3\nnu=2\nc 1 1\n", "modulus"),
    ("p=3\nc 3 1\n", "prime to p"),
    ("p=3\n", "no coefficients"),
    ("p=3\nc 2 1\nc 2 2\n", "twice"),
    ("p=5\nlevels=2\nc 2 1\nc 31 0 1\n", "break condition"),
    ("p=3\nlift=other\nc 2 1\n", "lift"),
])
def test_spec_errors(text, match):
    with pytest.raises(SpecError, match=match):
        TowerSpec.parse(text)


def test_level_cap(monkeypatch):
    monkeypatch.setenv("ASWTOWER_MAX_LEVEL", "1")
    with pytest.raises(SpecError):
        Tower(TowerSpec.simple(3, {2: 1}, 2)).build(2)


def test_table_helpers():
    specs = table1_specs()
    assert len(specs) == len(TABLE1_EXPECTED) == 5
    assert poly_label(specs[4]) == "X^6"
    assert poly_label(specs[0]) == "X^6 + X^4 + 2X^3 + X^2 + X"
