"""Integer and rational combinatorics of towers with minimal break ratios.

Everything here depends only on (p, d): ramification breaks, genera, the
digit-weighted rationals xi_a, the threshold sequence mu_i, the lattice
counts #Delta_n(t), the cutoff parameters of the a-number formula, and the
closed forms for r = 1 and for the floor sums f_n(x).  No floating point is
used; every rational is a ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from sympy import isprime


class ProfileError(ValueError):
    """Parameters outside the admissible range (p prime, p does not divide d)."""


@dataclass(frozen=True)
class TowerProfile:
    p: int
    d: int

    def __post_init__(self):
        if not isprime(self.p):
            raise ProfileError(f"p={self.p} is not prime")
        if self.d < 1 or self.d % self.p == 0:
            raise ProfileError(f"d={self.d} must be positive and prime to p={self.p}")


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def digits(a: int, p: int, length: Optional[int] = None) -> List[int]:
    """Base-p digits of a, least significant first, optionally zero-padded."""
    out = []
    while a:
        a, r = divmod(a, p)
        out.append(r)
    if length is not None:
        if len(out) > length:
            raise ValueError(f"{a} has more than {length} digits")
        out += [0] * (length - len(out))
    return out


def from_digits(ds, p: int) -> int:
    a = 0
    for x in reversed(list(ds)):
        a = a * p + x
    return a


def rev(a: int, p: int) -> Fraction:
    """Digit reversal across the radix point: sum a_m p^{-m-1}."""
    return sum((Fraction(x, p ** (m + 1)) for m, x in enumerate(digits(a, p))), Fraction(0))


def break_upper(prof: TowerProfile, n: int) -> int:
    """Upper break s_n = d p^{n-1}."""
    return prof.d * prof.p ** (n - 1)


def break_lower(prof: TowerProfile, n: int) -> int:
    """Lower break d_n = d (p^{2n-1} + 1) / (p + 1) at level n >= 1."""
    p, d = prof.p, prof.d
    num = d * (p ** (2 * n - 1) + 1)
    if num % (p + 1):
        raise ProfileError(f"non-integral lower break for p={p}, d={d}, n={n}")
    return num // (p + 1)


def genus(prof: TowerProfile, n: int) -> int:
    p, d = prof.p, prof.d
    if n == 0:
        return 0
    twice = d * (p ** (2 * n) - 1) // (p + 1) + 1 - p ** n
    if (d * (p ** (2 * n) - 1)) % (p + 1) or twice % 2:
        raise ProfileError(f"non-integral genus for p={p}, d={d}, n={n}")
    return twice // 2


def breaks_and_genus(prof: TowerProfile, n: int) -> Tuple[int, int, int]:
    if n < 1:
        raise ProfileError("level must be at least 1")
    return break_upper(prof, n), break_lower(prof, n), genus(prof, n)


@lru_cache(maxsize=None)
def xi(prof: TowerProfile, a: int) -> Fraction:
    """xi_a = (d/(p+1)) (a + rev(a)), cross-checked against the break-weighted digit sum."""
    p, d = prof.p, prof.d
    closed = Fraction(d, p + 1) * (a + rev(a, p))
    weighted = sum(
        (Fraction(x * break_lower(prof, m + 1), p ** (m + 1)) for m, x in enumerate(digits(a, p))),
        Fraction(0),
    )
    assert closed == weighted, (prof, a, closed, weighted)
    return closed


def xi_scaled(prof: TowerProfile, a: int, n: int) -> int:
    """p^n xi_a as an integer, valid for a < p^n."""
    p = prof.p
    total = 0
    for m, x in enumerate(digits(a, p, n)):
        total += x * break_lower(prof, m + 1) * p ** (n - 1 - m)
    return total


def _xi_exceeds(prof: TowerProfile, b: int, i) -> bool:
    """xi_b > i using integer arithmetic only."""
    p, d = prof.p, prof.d
    ds = digits(b, p)
    L = len(ds)
    rev_int = sum(x * p ** (L - 1 - m) for m, x in enumerate(ds))
    lhs = d * (b * p ** L + rev_int)
    if isinstance(i, Fraction):
        return lhs * i.denominator > i.numerator * (p + 1) * p ** L
    return lhs > i * (p + 1) * p ** L


def _frac_digits(x: Fraction, p: int, count: int) -> List[int]:
    out = []
    num, den = x.numerator, x.denominator
    for _ in range(count):
        num *= p
        q, num = divmod(num, den)
        out.append(q)
    return out


def mu(prof: TowerProfile, i: int) -> int:
    """mu_i via the digit-dominance rule (floor if integer digits strictly
    dominate the reversed fractional digits, else ceiling); mu_0 = 1."""
    if i < 0:
        raise ValueError("mu is defined for i >= 0")
    if i == 0:
        return 1
    p, d = prof.p, prof.d
    y = Fraction((p + 1) * i, d)
    whole = floor_frac(y)
    frac = y - whole
    int_digits = digits(whole, p)
    # preperiod + period of the fractional expansion is bounded by its denominator
    span = len(int_digits) + frac.denominator + 1
    frac_digits = _frac_digits(frac, p, span)
    for k in range(span):
        a = int_digits[k] if k < len(int_digits) else 0
        b = frac_digits[k]
        if a != b:
            return whole if a > b else ceil_frac(y)
    return ceil_frac(y)


def mu_oracle(prof: TowerProfile, i: int) -> int:
    """min{b >= 1 : xi_b > i} by direct search."""
    b = 1
    while not _xi_exceeds(prof, b, i):
        b += 1
    return b


def mu_oracle_table(prof: TowerProfile, imax: int) -> List[int]:
    """[min{b >= 1 : xi_b > i} for i = 0..imax], by a monotone two-pointer scan."""
    out = []
    b = 1
    for i in range(imax + 1):
        while not _xi_exceeds(prof, b, i):
            b += 1
        out.append(b)
    return out


def support_bound(prof: TowerProfile, n: int) -> int:
    """Largest i with mu_i < p^n, i.e. i(n); computed from xi_{p^n - 1}."""
    top = xi(prof, prof.p ** n - 1)
    return ceil_frac(top) - 1


# ---------------------------------------------------------------------------
# lattice counts

@dataclass(frozen=True)
class LatticeReport:
    n: int
    t: int
    count_right: int
    count_total: int
    formula_value: Optional[Fraction] = None
    method: str = "columns"


def _count_columns(prof: TowerProfile, n: int, t: int) -> int:
    pn = prof.p ** n
    total = 0
    i = t + 1
    while True:
        m = mu(prof, i)
        if m >= pn:
            break
        total += pn - m
        i += 1
    return total


def _count_rows_numpy(prof: TowerProfile, n: int, t: int) -> int:
    """sum_{j < p^n} max(0, floor(xi_j) - t), vectorised in chunks."""
    p, d = prof.p, prof.d
    pn = p ** n
    if d * pn * pn >= 2 ** 62:
        raise OverflowError("level too large for the vectorised row count")
    denom = (p + 1) * pn
    total = 0
    chunk = 1 << 20
    for start in range(0, pn, chunk):
        j = np.arange(start, min(pn, start + chunk), dtype=np.int64)
        revj = np.zeros_like(j)
        rest = j.copy()
        for m in range(n):
            revj += (rest % p) * p ** (n - 1 - m)
            rest //= p
        fl = (d * (j * pn + revj)) // denom
        total += int(np.maximum(fl - t, 0).sum())
    return total


def fn_closed(prof: TowerProfile, n: int, x: Fraction) -> int:
    """Closed form of f_n(x) = sum_{b < p^n} floor(x + xi_b); requires d | (p-1)."""
    p, d = prof.p, prof.d
    if (p - 1) % d:
        raise ProfileError("closed form of f_n needs d | (p-1)")
    x = Fraction(x)
    pn = p ** n
    if n == 0:
        return floor_frac(x)
    a = Fraction(d * p * (pn - 1) * (p ** (n - 1) - 1), 2 * (p + 1))
    b = Fraction((d - 1) * (pn - 1), 2)
    val = a + b + floor_frac(pn * x)
    assert val.denominator == 1
    return int(val)


def fn_brute(prof: TowerProfile, n: int, x: Fraction) -> int:
    x = Fraction(x)
    return sum(floor_frac(x + xi(prof, b)) for b in range(prof.p ** n))


def _prefix_floor_sum(prof: TowerProfile, n: int, N: int) -> int:
    """sum_{j < N} floor(xi_j) for N <= p^n via aligned digit blocks and f_k."""
    p, d = prof.p, prof.d
    ds = digits(N, p, n + 1)
    total = 0
    # high digits fixed as in N, digit k below N's digit, lower k digits free
    for k in range(n, -1, -1):
        high = from_digits(ds[k + 1:], p)
        for c in range(ds[k]):
            P = high * p + c
            x0 = Fraction(d, p + 1) * (P * p ** k + rev(P, p) / p ** k)
            total += fn_closed(prof, k, x0)
    return total


def _count_blocks(prof: TowerProfile, n: int, t: int) -> int:
    pn = prof.p ** n
    start = mu(prof, t + 1)
    if start >= pn:
        return 0
    s = _prefix_floor_sum(prof, n, pn) - _prefix_floor_sum(prof, n, start)
    return s - t * (pn - start)


COLUMN_LIMIT = 200_000
ROW_LIMIT = 60_000_000


def count_delta(prof: TowerProfile, n: int, t: int = 0, method: Optional[str] = None) -> Tuple[int, str]:
    """#Delta_n(t) and the method used ('columns', 'blocks' or 'rows')."""
    if n < 1 or t < 0:
        raise ProfileError("need n >= 1 and t >= 0")
    pn = prof.p ** n
    if method is None:
        if pn <= COLUMN_LIMIT:
            method = "columns"
        elif (prof.p - 1) % prof.d == 0:
            method = "blocks"
        elif pn <= ROW_LIMIT:
            method = "rows"
        else:
            raise ProfileError(f"p^n = {pn} is too large for a lattice count with d not dividing p-1")
    fn = {"columns": _count_columns, "blocks": _count_blocks, "rows": _count_rows_numpy}[method]
    return fn(prof, n, t), method


def lattice_counts(prof: TowerProfile, n: int, t: int, r: Optional[int] = None,
                   method: Optional[str] = None) -> LatticeReport:
    right, used = count_delta(prof, n, t, method)
    total, _ = count_delta(prof, n, 0, method)
    value = None
    if r is not None:
        value = Fraction(r * (prof.p - 1) * t * (t + 1), 2 * prof.d) + right
    return LatticeReport(n=n, t=t, count_right=right, count_total=total, formula_value=value, method=used)


# ---------------------------------------------------------------------------
# cutoff parameters and the a-number formula

@dataclass(frozen=True)
class LambdaMode:
    kind: str = "empirical"  # or "safe"
    N: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "LambdaMode":
        if text == "safe":
            return cls("safe")
        if text.startswith("empirical"):
            _, _, rest = text.partition(":")
            return cls("empirical", int(rest) if rest else None)
        raise ValueError(f"unknown lambda mode {text!r}")

    def __str__(self):
        if self.kind == "safe":
            return "safe"
        return "empirical" if self.N is None else f"empirical:{self.N}"


@lru_cache(maxsize=None)
def lambda_empirical(prof: TowerProfile, N: int) -> Fraction:
    p, d = prof.p, prof.d
    best = Fraction(0)
    for i in range(1, N + 1):
        dev = abs(mu(prof, i) - Fraction((p + 1) * i, d))
        if dev > best:
            best = dev
    return best


def lambda_value(prof: TowerProfile, mode: LambdaMode) -> Tuple[Fraction, str]:
    if mode.kind == "safe":
        return Fraction(prof.d - 1, prof.d), "safe"
    N = mode.N if mode.N is not None else prof.d * prof.p ** 4
    return lambda_empirical(prof, N), f"empirical:{N}"


@dataclass(frozen=True)
class CutoffReport:
    r: int
    n: int
    delta: int
    t_n: int
    t_prime_n: int
    s_n_rem: Fraction
    lam: Fraction
    lambda_mode: str
    D_t: Fraction
    epsilon: Fraction
    C_pdr: Fraction
    exact_flag: bool


def cutoff_report(prof: TowerProfile, r: int, n: int, mode: LambdaMode = LambdaMode()) -> CutoffReport:
    if r < 1 or n < 1:
        raise ProfileError("need r >= 1 and n >= 1")
    p, d = prof.p, prof.d
    pn = p ** n
    delta = (r + 1) * p - (r - 1)
    t_n = d * ((pn - 1) // delta)
    t_prime = (d * pn) // delta
    s_rem = Fraction(pn - 1) - Fraction(t_n * delta, d)
    lam, lam_mode = lambda_value(prof, mode)
    D = max(Fraction(1), pn - Fraction(t_n * delta, d) - Fraction(r * (p - 1) + 1, d) + 1 - lam)
    eps = D - 1 + 2 * lam - Fraction(p, d)
    if eps > 0:
        k = floor_frac(d * eps / p)
        C = (1 + k) * (eps - Fraction(p, 2 * d) * k)
    else:
        C = Fraction(0)
    exact = (p - 1) % d == 0 or (d <= p + 1 and s_rem < Fraction(delta, d) - 1)
    return CutoffReport(r, n, delta, t_n, t_prime, s_rem, lam, lam_mode, D, eps, C, exact)


@dataclass(frozen=True)
class FormulaResult:
    value: int
    lower: Fraction
    exact_flag: bool
    t_used: int
    count_right: int
    triangle: Fraction
    cutoff: CutoffReport
    method: str = "columns"


def anumber_formula(prof: TowerProfile, r: int, n: int, mode: LambdaMode = LambdaMode(),
                    method: Optional[str] = None) -> FormulaResult:
    """Value F = r(p-1)t(t+1)/(2d) + #Delta_n(t) with the guaranteed window [F - C, F]."""
    rep = cutoff_report(prof, r, n, mode)
    t = rep.t_prime_n if rep.exact_flag else rep.t_n
    right, used = count_delta(prof, n, t, method)
    tri = Fraction(r * (prof.p - 1) * t * (t + 1), 2 * prof.d)
    F = tri + right
    if F.denominator != 1:
        raise ProfileError(f"non-integral formula value {F}")
    lower = F if rep.exact_flag else F - rep.C_pdr
    return FormulaResult(int(F), lower, rep.exact_flag, t, right, tri, rep, used)


def anumber_exact_r1(prof: TowerProfile, n: int) -> int:
    """Closed form of the classical a-number when p > 2 and d | (p-1)."""
    p, d = prof.p, prof.d
    if p == 2 or (p - 1) % d:
        raise ProfileError("closed form needs p > 2 and d | (p-1)")
    val = Fraction(p - 1, 2) * Fraction(d, 2 * (p + 1)) * (p ** (2 * n - 1) + 1)
    if d % 2:
        val -= Fraction(p - 1, 4 * d)
    if val.denominator != 1:
        raise ProfileError(f"non-integral a-number {val} for p={p}, d={d}, n={n}")
    return int(val)


def asymptotics(prof: TowerProfile, r: int, i_max: int = 10) -> Tuple[Fraction, List[Fraction]]:
    """Limit of a_n^{(r)}/g_n and the limiting densities of Jordan blocks of size i."""
    p = prof.p
    tau = Fraction(p + 1, p - 1)
    ratio = Fraction(r) / (r + tau)
    dens = [2 * tau / ((i + tau) ** 3 - (i + tau)) for i in range(1, i_max + 1)]
    return ratio, dens


def hodge_eta(prof: TowerProfile, m: int) -> Fraction:
    """Height of HP(d) at abscissa m: (p-1) m (m+1) / (2d)."""
    return Fraction((prof.p - 1) * m * (m + 1), 2 * prof.d)


def admissible_profiles(primes, d_max: int) -> List[TowerProfile]:
    return [TowerProfile(p, d) for p in primes for d in range(1, d_max + 1) if d % p]


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

