import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from aswtower.profile import (
    LambdaMode,
    ProfileError,
    TowerProfile,
    admissible_profiles,
    anumber_exact_r1,
    anumber_formula,
    asymptotics,
    breaks_and_genus,
    count_delta,
    cutoff_report,
    fn_brute,
    fn_closed,
    genus,
    mu,
    mu_oracle,
    mu_oracle_table,
    support_bound,
    xi,
)

GRID = admissible_profiles([2, 3, 5, 7], 8)


def riemann_hurwitz_genus(p, d, n):
    """Genus from the conductor-discriminant formula: characters of exact order p^k have conductor s_k + 1."""
    disc = sum((d * p ** (k - 1) + 1) * (p ** k - p ** (k - 1)) for k in range(1, n + 1))
    return (disc - 2 * p ** n + 2) // 2


@pytest.mark.parametrize("p,d,n,expected", [(5, 4, 2, (20, 84, 196)), (5, 6, 2, (30, 126, 300)), (2, 1, 1, (1, 1, 0))])
def test_breaks_and_genus(p, d, n, expected):
    assert breaks_and_genus(TowerProfile(p, d), n) == expected


@pytest.mark.parametrize("prof", GRID, ids=str)
def test_genus_matches_conductor_discriminant(prof):
    for n in range(1, 4):
        assert genus(prof, n) == riemann_hurwitz_genus(prof.p, prof.d, n)


def test_invalid_profiles():
    with pytest.raises(ProfileError):
        TowerProfile(4, 1)
    with pytest.raises(ProfileError):
        TowerProfile(5, 10)


def test_xi_examples():
    assert xi(TowerProfile(3, 2), 5) == Fraction(26, 9)
    assert xi(TowerProfile(5, 4), 4) == Fraction(16, 5)
    assert xi(TowerProfile(5, 4), 0) == 0


@pytest.mark.parametrize("p,d,i,expected", [(5, 4, 3, 4), (5, 6, 7, 7), (5, 4, 1, 2)])
def test_mu_examples(p, d, i, expected):
    prof = TowerProfile(p, d)
    assert mu(prof, i) == expected == mu_oracle(prof, i)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GRID), st.integers(1, 3000))
def test_mu_matches_search(prof, i):
    assert mu(prof, i) == mu_oracle(prof, i)


def test_mu_table_oracle_agrees_with_pointwise_search():
    prof = TowerProfile(3, 4)
    assert mu_oracle_table(prof, 50)[1:] == [mu_oracle(prof, i) for i in range(1, 51)]


def test_lattice_examples():
    prof = TowerProfile(5, 6)
    assert count_delta(prof, 2, 6)[0] == 171
    assert count_delta(prof, 2, 0)[0] == 300
    assert count_delta(prof, 2, 25)[0] == 0


@pytest.mark.parametrize("prof", [TowerProfile(5, 4), TowerProfile(3, 2), TowerProfile(7, 3), TowerProfile(7, 6)], ids=str)
def test_lattice_methods_agree(prof):
    for n in (1, 2, 3):
        for t in (0, 1, 5, 17):
            vals = {count_delta(prof, n, t, m)[0] for m in ("columns", "blocks", "rows")}
            assert len(vals) == 1


def test_rows_method_without_divisibility():
    prof = TowerProfile(5, 3)
    for t in (0, 4, 11):
        assert count_delta(prof, 3, t, "rows")[0] == count_delta(prof, 3, t, "columns")[0]


def test_support_bound_is_last_column():
    for prof in GRID[:10]:
        for n in (1, 2):
            top = support_bound(prof, n)
            assert mu(prof, top) < prof.p ** n <= mu(prof, top + 1)


def test_cutoff_example():
    rep = cutoff_report(TowerProfile(5, 6), 3, 2)
    assert (rep.delta, rep.t_n, rep.s_n_rem, rep.lam) == (18, 6, 6, 0)
    assert (rep.D_t, rep.epsilon, rep.C_pdr, rep.exact_flag) == (Fraction(35, 6), 4, Fraction(35, 3), False)


def test_cutoff_t_prime():
    assert cutoff_report(TowerProfile(5, 4), 3, 2).t_prime_n == 5
    rep = cutoff_report(TowerProfile(5, 4), 1, 2)
    assert rep.exact_flag and rep.t_prime_n == 10


def test_formula_examples():
    res = anumber_formula(TowerProfile(5, 6), 3, 2)
    assert (res.value, res.cutoff.C_pdr, res.exact_flag) == (213, Fraction(35, 3), False)
    prof = TowerProfile(5, 4)
    assert [anumber_formula(prof, 1, n).value for n in (1, 2, 3, 4)] == [4, 84, 2084, 52084]


@pytest.mark.parametrize("p,d,n,expected", [(5, 4, 1, 4), (5, 4, 2, 84), (5, 4, 4, 52084), (3, 2, 1, 1), (7, 6, 1, 9)])
def test_exact_r1_examples(p, d, n, expected):
    assert anumber_exact_r1(TowerProfile(p, d), n) == expected


def test_exact_r1_matches_lattice_formula():
    for p in (3, 5, 7, 11):
        for d in range(1, p):
            if (p - 1) % d:
                continue
            prof = TowerProfile(p, d)
            for n in (1, 2):
                assert anumber_exact_r1(prof, n) == anumber_formula(prof, 1, n).value


def test_exact_r1_rejects():
    with pytest.raises(ProfileError):
        anumber_exact_r1(TowerProfile(5, 3), 1)


def test_fn_examples():
    assert fn_closed(TowerProfile(3, 2), 1, Fraction(0)) == 1
    assert fn_closed(TowerProfile(5, 4), 2, Fraction(0)) == 196


def test_fn_closed_against_brute():
    rng = random.Random(0)
    for prof in (TowerProfile(3, 2), TowerProfile(5, 4), TowerProfile(7, 3)):
        for n in range(0, 3):
            for _ in range(10):
                x = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
                assert fn_closed(prof, n, x) == fn_brute(prof, n, x)
                assert fn_closed(prof, n, x + 1) - fn_closed(prof, n, x) == prof.p ** n


def test_asymptotics():
    ratio, dens = asymptotics(TowerProfile(5, 4), 1, 3)
    assert ratio == Fraction(2, 5)
    assert dens[0] == Fraction(8, 35)
    assert all(asymptotics(TowerProfile(5, 4), r)[0] < 1 for r in range(1, 50))


def test_lambda_modes():
    prof = TowerProfile(5, 6)
    assert LambdaMode.parse("safe").kind == "safe"
    assert LambdaMode.parse("empirical:100").N == 100
    with pytest.raises(ValueError):
        LambdaMode.parse("bogus")
    assert cutoff_report(prof, 3, 2, LambdaMode.parse("safe")).lam == Fraction(5, 6)
