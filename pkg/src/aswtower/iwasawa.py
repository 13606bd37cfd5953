"""Galois action, trace maps and executable checks of the T-module structure.

T = gamma - 1 where gamma is the Galois generator acting by Witt addition
of 1.  The checks here produce reports (one entry per index) rather than
raising, so that a sweep records every discrepancy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List

import numpy as np

from . import linalg
from .cartier import basis_differential, diff_coordinates, regular_basis
from .profile import digits, genus, mu, support_bound
from .tower import FuncElem, Tower


@dataclass
class Check:
    index: object
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    n: int
    checks: List[Check] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def add(self, index, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(index, bool(ok), detail))


def galois_gamma(e: FuncElem) -> FuncElem:
    return e.tower.gamma(e)


def T_act(e: FuncElem) -> FuncElem:
    return e.tower.T(e)


def y_monomial(tower: Tower, a: int, n: int) -> FuncElem:
    return tower.monomial(0, a, 1, n)


def verify_taunit(tower: Tower, n: int) -> SuiteReport:
    """T^a y^a equals the product of the factorials of the digits of a."""
    p = tower.p
    rep = SuiteReport("taunit", n)
    for a in range(1, p ** n):
        expected = 1
        for x in digits(a, p):
            expected = expected * factorial(x) % p
        got = tower.T_power(y_monomial(tower, a, n), a).constant()
        rep.add(a, got == expected, f"expected {expected}, got {got if got is not None else 'non-constant'}")
    return rep


def verify_T_triangular(tower: Tower, n: int) -> SuiteReport:
    """T y^a = (-1)^m a_m y^{a-1} + sum_{b < a-1} g_b y^b with deg g_b <= (a-1-b) d / p."""
    p, d = tower.p, tower.d
    rep = SuiteReport("triangular", n)
    for a in range(1, p ** n):
        ds = digits(a, p)
        m = next(i for i, x in enumerate(ds) if x)
        lead = ds[m] % p if m % 2 == 0 else (-ds[m]) % p
        img = tower.T(y_monomial(tower, a, n))
        problems = []
        top = img.coeff(a - 1)
        if top != {0: lead}:
            problems.append(f"coefficient of y^{a - 1} is {top}, expected {lead}")
        for b, t in img.data.items():
            if b >= a:
                problems.append(f"term y^{b} above the diagonal")
            elif b < a - 1 and p * max(t) > (a - 1 - b) * d:
                problems.append(f"deg g_{b} = {max(t)} exceeds {(a - 1 - b) * d}/{p}")
        rep.add(a, not problems, "; ".join(problems))
    return rep


def trace_down(e: FuncElem) -> FuncElem:
    """Trace from level n+1 to level n: y_n^i -> 0 for i < p-1, y_n^{p-1} -> -1."""
    t = e.tower
    F, p = t.F, t.p
    n = e.level - 1
    pn = p ** n
    out = {}
    for a, terms in e.data.items():
        b, low = divmod(a, pn)
        if b == p - 1:
            out[low] = {k: F.neg(c) for k, c in terms.items()}
    return FuncElem(t, n, out)


def trace_by_conjugates(e: FuncElem) -> FuncElem:
    """Trace as the sum of the p conjugates under gamma^{p^n} (independent of ``trace_down``)."""
    t = e.tower
    n = e.level - 1
    acc = t.zero(e.level)
    g = e
    for _ in range(t.p):
        acc = acc + g
        for _ in range(t.p ** n):
            g = t.gamma(g)
    return FuncElem(t, n, acc.data)


def w_element(tower: Tower, a: int, n: int) -> FuncElem:
    """w_a^{(n)} = (-1)^n y^{p^n - 1 - a}, zero for a >= p^n."""
    pn = tower.p ** n
    if a >= pn:
        return tower.zero(n)
    return basis_differential(tower, n, a, 1)


def verify_trace(tower: Tower, n: int) -> SuiteReport:
    rep = SuiteReport("trace", n)
    for a in range(tower.p ** (n + 1)):
        got = trace_down(w_element(tower, a, n + 1))
        want = w_element(tower, a, n)
        rep.add(a, got == want, "" if got == want else f"got {got}, expected {want}")
    return rep


def verify_module_structure(tower: Tower, n: int) -> SuiteReport:
    """Generators x^i w_{mu_i} dx/x of M_n and their T-iterates form a basis.

    Also records, for each generator, the least k with T^k e_i = 0, to decide
    between the annihilator exponents p^n - mu_i and p^n - 1 - mu_i.
    """
    F, p = tower.F, tower.p
    prof = tower.profile
    pn = p ** n
    rep = SuiteReport("module", n)
    g = genus(prof, n)
    top = support_bound(prof, n)
    mus = [mu(prof, i) for i in range(1, top + 1)]
    dim = sum(pn - m for m in mus)
    rep.add("dimension", dim == g, f"sum (p^n - mu_i) = {dim}, genus = {g}")
    basis = regular_basis(tower, n)
    index = basis.index()
    rows = []
    exponents_ok = 0
    for i, m in enumerate(mus, start=1):
        e = basis_differential(tower, n, m, i)
        ok = True
        order = None
        cur = e
        for j in range(pn - m + 1):
            if cur.is_zero():
                order = j
                break
            try:
                coords = diff_coordinates(tower, n, cur, index)
            except Exception as exc:
                ok = False
                rep.add(f"regular[{i},{j}]", False, str(exc))
                break
            if j < pn - m:
                row = np.zeros(len(basis), dtype=np.int64)
                for k, c in coords.items():
                    row[k] = c
                rows.append(row)
            cur = tower.T(cur)
        if order is None and ok and cur.is_zero():
            order = pn - m + 1
        matches = order == pn - m
        exponents_ok += matches
        rep.add(f"annihilator[{i}]", matches,
                f"mu_{i} = {m}; T^k e_{i} vanishes first at k = {order}, p^n - mu_i = {pn - m}")
    if rows:
        r = linalg.rank(F, np.array(rows))
    else:
        r = 0
    rep.add("independence", r == g and len(rows) == g, f"rank {r} of {len(rows)} vectors, genus {g}")
    rep.summary = {
        "i(n)": top,
        "mu": mus,
        "dimension": dim,
        "genus": g,
        "annihilator_exponent": "p^n - mu_i" if exponents_ok == len(mus) else "inconclusive",
    }
    return rep
