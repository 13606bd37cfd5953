"""Frobenius element, character values, Euler products, Fredholm determinants
and T-adic Newton polygons.

The Frobenius element alpha in A_n[x] is defined by alpha . w_0 = w_0^p
where (f T^j) . w means f T^j(w).  Its inverse gives the matrix of the
Cartier operator on {x^i w_0 dx/x}, and the characteristic polynomial of a
finite truncation of that matrix is compared with the Euler product over
places of k(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import GF, Poly, TruncSeries, irreducibles
from .cartier import basis_differential
from .profile import TowerProfile, ceil_frac, digits, hodge_eta
from .tower import Tower


class LFunctionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# the ring k[T]/(T^N) as numpy arrays of shape (..., nu, N) over F_p

class TRing:
    """Vectorised arithmetic in F_q[T]/(T^N), elements stored as coordinate arrays."""

    def __init__(self, F: GF, N: int):
        self.F, self.N, self.p, self.nu = F, N, F.p, F.nu
        self.mod = F.params.modulus

    def zeros(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.nu, self.N), dtype=np.int64)

    def one(self) -> np.ndarray:
        z = self.zeros()
        z[0, 0] = 1
        return z

    def from_terms(self, terms: Dict[int, int]) -> np.ndarray:
        """From {T-exponent: code}."""
        z = self.zeros()
        for j, c in terms.items():
            if j < self.N:
                z[:, j] = self.F.coords(c)
        return z

    def to_terms(self, x: np.ndarray) -> Dict[int, int]:
        out = {}
        for j in range(self.N):
            c = self.F.from_coords([int(v) for v in x[:, j]])
            if c:
                out[j] = c
        return out

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Elementwise (broadcast) product of arrays of ring elements."""
        p, nu, N = self.p, self.nu, self.N
        shape = np.broadcast_shapes(x.shape[:-2], y.shape[:-2])
        prod = np.zeros(shape + (2 * nu - 1, N), dtype=np.int64)
        for s in range(nu):
            for a in range(N):
                xs = x[..., s, a]
                if not np.any(xs):
                    continue
                prod[..., s:s + nu, a:] += xs[..., None, None] * y[..., :, :N - a]
            prod %= p
        for k in range(2 * nu - 2, nu - 1, -1):
            top = prod[..., k, :]
            for i in range(nu):
                prod[..., k - nu + i, :] = (prod[..., k - nu + i, :] - top * self.mod[i]) % p
        return prod[..., :nu, :] % p

    def valuation(self, x: np.ndarray) -> Optional[int]:
        nz = np.nonzero(np.any(x != 0, axis=-2))[0]
        return int(nz[0]) if nz.size else None

    def matvec(self, M: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.mul(M, v[None, :, :, :]).sum(axis=1) % self.p


def berkowitz(R: TRing, M: np.ndarray) -> List[np.ndarray]:
    """Coefficients c_0 = 1, c_1, ..., c_t of det(1 - sM), division-free.

    Equivalently the coefficients of det(lambda I - M) = sum c_k lambda^{t-k}.
    """
    t = M.shape[0]
    p = R.p
    poly = [R.one()]
    for k in range(t):
        a = M[k, k]
        vec = [R.one(), (-a) % p]
        if k:
            Rrow = M[k, :k]
            C = M[:k, k]
            sub = M[:k, :k]
            v = C
            for _ in range(k):
                vec.append((-(R.mul(Rrow, v).sum(axis=0))) % p)
                v = R.matvec(sub, v)
        new = []
        for i in range(k + 2):
            acc = R.zeros()
            for j in range(min(i, k) + 1):
                if i - j < len(vec):
                    acc = (acc + R.mul(vec[i - j], poly[j])) % p
            new.append(acc)
        poly = new
    return poly


# ---------------------------------------------------------------------------
# the Frobenius element

@dataclass
class FrobeniusElement:
    n: int
    d: int
    alpha: TruncSeries
    alpha_inv: TruncSeries
    growth_ok: bool = True
    growth_violations: List[Tuple[str, int, int]] = field(default_factory=list)


def growth_violations(series: TruncSeries, d: int, label: str) -> List[Tuple[str, int, int]]:
    """Terms x^e T^j with j < e/d (the growth bound v_T(coeff of x^e) >= e/d fails)."""
    return [(label, e, j) for (e, j) in sorted(series.terms) if j * d < e]


def frobenius_alpha(tower: Tower, n: int) -> FrobeniusElement:
    F, p, d = tower.F, tower.p, tower.d
    N = p ** n
    w0 = basis_differential(tower, n, 0, 1)
    powers = [w0]
    for _ in range(1, N):
        powers.append(tower.T(powers[-1]))
    residual = w0.frob()
    alpha_terms = {}
    for j in range(N):
        a = N - 1 - j
        Tj = powers[j]
        if any(b > a for b in Tj.data):
            raise LFunctionError(f"T^{j} w_0 is not triangular")
        lead = Tj.coeff(a)
        if set(lead) != {0}:
            raise LFunctionError(f"T^{j} w_0 has a non-constant leading coefficient")
        inv = F.inv(lead[0])
        target = residual.coeff(a)
        if not target:
            continue
        coef = {e: F.mul(c, inv) for e, c in target.items()}
        for e, c in coef.items():
            alpha_terms[(e, j)] = c
        residual = residual - Tj.mul_poly(coef)
    if not residual.is_zero():
        raise LFunctionError("Frobenius equation has no solution in A_n[x]")
    alpha = TruncSeries(F, N, alpha_terms)
    bound = d * N
    alpha_inv = alpha.inverse(bound)
    if alpha.mul(alpha_inv) != TruncSeries.one(F, N):
        raise LFunctionError("alpha * alpha^{-1} != 1")
    viol = growth_violations(alpha, d, "alpha") + growth_violations(alpha_inv, d, "alpha_inv")
    if alpha.terms.get((0, 0)) != 1 or any(j == 0 and e > 0 for (e, j) in alpha.terms):
        viol.append(("alpha mod T", 0, 0))
    if viol:
        raise LFunctionError(f"growth bound violated: {viol[:5]}")
    return FrobeniusElement(n, d, alpha, alpha_inv, True, [])


# ---------------------------------------------------------------------------
# character values at places

class _Residue:
    """Arithmetic in k[z]/(v) for a monic irreducible v."""

    def __init__(self, v: Poly):
        self.v = v
        self.F = v.field

    def reduce(self, g: Poly) -> Poly:
        return g % self.v

    def mul(self, a: Poly, b: Poly) -> Poly:
        return (a * b) % self.v

    def frob(self, a: Poly) -> Poly:
        """a -> a^p."""
        return a.powmod(self.F.p, self.v)


def char_value(fe: FrobeniusElement, v: Poly, nu: int) -> Tuple[int, Dict[int, int]]:
    """Exponent c with prod_{i < m nu} sigma^i(alpha)(theta) = (1+T)^c, and the product itself."""
    F = v.field
    N = fe.alpha.p_power
    p = F.p
    m = v.degree
    E = _Residue(v)
    # beta_j = coefficient of T^j of alpha evaluated at theta = z mod v
    beta: List[Poly] = [Poly(F) for _ in range(N)]
    for (e, j), c in fe.alpha.terms.items():
        beta[j] = beta[j] + Poly(F, {e: c})
    beta = [E.reduce(b) for b in beta]

    def series_mul(x: List[Poly], y: List[Poly]) -> List[Poly]:
        out = [Poly(F) for _ in range(N)]
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j in range(N - i):
                if not y[j].is_zero():
                    out[i + j] = out[i + j] + E.mul(xi, y[j])
        return out

    acc = [Poly(F, {0: 1})] + [Poly(F) for _ in range(N - 1)]
    cur = beta
    for _ in range(m * nu):
        acc = series_mul(acc, cur)
        cur = [E.frob(b) for b in cur]
    values: Dict[int, int] = {}
    for j, b in enumerate(acc):
        if b.is_zero():
            continue
        if b.degree > 0 or b.coeff(0) >= p:
            raise LFunctionError(f"character value at {v} is not in F_p[T]")
        values[j] = b.coeff(0)
    c = sum(values.get(p ** k, 0) * p ** k for k in range(len(digits(N - 1, p)) or 1) if p ** k < N)
    recon = {j: comb(c, j) % p for j in range(N) if comb(c, j) % p}
    if recon != values:
        raise LFunctionError(f"character value at {v} is not a power of 1+T")
    return c, values


def places(F: GF, D: int) -> List[Poly]:
    out = []
    for m in range(1, D + 1):
        out.extend(irreducibles(F, m))
    return out


def necklace_count(q: int, m: int) -> int:
    from sympy import divisors, mobius

    return sum(mobius(e) * q ** (m // e) for e in divisors(m)) // m


def euler_product(fe: FrobeniusElement, F: GF, D: int, inverted: bool = True,
                  character: str = "inverse") -> List[np.ndarray]:
    """Coefficients of s^0..s^D of the Euler product over places of degree <= D.

    ``inverted`` selects local factors (1 - chi s^m)^{-1} instead of
    (1 - chi s^m).  ``character`` selects chi = (1+T)^{-c} ("inverse", the
    value of the product of the sigma^i(alpha^{-1})) or chi = (1+T)^c
    ("direct"), where c is the exponent returned by ``char_value``.
    """
    if character not in ("inverse", "direct"):
        raise ValueError(f"unknown character convention {character!r}")
    N = fe.alpha.p_power
    R = TRing(F, N)
    p = F.p
    coeffs = [R.one()] + [R.zeros() for _ in range(D)]
    for v in places(F, D):
        m = v.degree
        c, _ = char_value(fe, v, F.nu)
        if character == "inverse":
            c = (-c) % N
        chi = R.from_terms({j: comb(c, j) % p for j in range(N)})
        factor = [R.zeros() for _ in range(D + 1)]
        factor[0] = R.one()
        if inverted:
            power = R.one()
            k = 1
            while m * k <= D:
                power = R.mul(power, chi)
                factor[m * k] = power
                k += 1
        else:
            factor[m] = (-chi) % p
        new = [R.zeros() for _ in range(D + 1)]
        for i in range(D + 1):
            for j in range(D + 1 - i):
                if np.any(factor[j]):
                    new[i + j] = (new[i + j] + R.mul(coeffs[i], factor[j])) % p
        coeffs = new
    return coeffs


# ---------------------------------------------------------------------------
# nuclear matrix, Fredholm determinant, polygons

def frobenius_product_inverse(fe: FrobeniusElement, nu: int) -> TruncSeries:
    """prod_{i < nu} sigma^i(alpha^{-1})."""
    acc = fe.alpha_inv
    for i in range(1, nu):
        acc = acc.mul(fe.alpha_inv.sigma(i))
    return acc


def nuclear_matrix(fe: FrobeniusElement, F: GF, t: int, nu: Optional[int] = None) -> np.ndarray:
    """N_{ij} = b_{p^nu i - j}, 1 <= i, j <= t, as a TRing array of shape (t, t, nu, N)."""
    nu = F.nu if nu is None else nu
    N = fe.alpha.p_power
    R = TRing(F, N)
    b = frobenius_product_inverse(fe, nu)
    by_x: Dict[int, Dict[int, int]] = {}
    for (e, j), c in b.terms.items():
        by_x.setdefault(e, {})[j] = c
    M = R.zeros((t, t))
    q = F.p ** nu
    for i in range(1, t + 1):
        for j in range(1, t + 1):
            k = q * i - j
            if k >= 0 and k in by_x:
                M[i - 1, j - 1] = R.from_terms(by_x[k])
    return M


@dataclass
class NewtonPolygon:
    points: List[Tuple[int, Fraction]]  # certified (m, v_T(c_m)/nu)
    vertices: List[Tuple[int, Fraction]]
    trust_bound: Fraction
    valuations: List[Optional[int]]  # raw v_T(c_m), None if c_m = 0 mod T^N


def lower_hull(points: Sequence[Tuple[int, Fraction]]) -> List[Tuple[int, Fraction]]:
    pts = sorted(points)
    hull: List[Tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def trust_bound(prof: TowerProfile, n: int, t: int) -> Fraction:
    return min(Fraction(prof.p ** n), Fraction((prof.p - 1) * (t + 1), prof.d))


def fredholm_np(fe: FrobeniusElement, F: GF, prof: TowerProfile, n: int, t: int) -> Tuple[NewtonPolygon, List[np.ndarray]]:
    nu = F.nu
    N = fe.alpha.p_power
    R = TRing(F, N)
    if t == 0:
        return NewtonPolygon([(0, Fraction(0))], [(0, Fraction(0))], trust_bound(prof, n, t), [0]), [R.one()]
    M = nuclear_matrix(fe, F, t, nu)
    coeffs = berkowitz(R, M)
    vals = [R.valuation(c) for c in coeffs]
    bound = trust_bound(prof, n, t)
    pts = [(m, Fraction(v, nu)) for m, v in enumerate(vals) if v is not None and v < bound]
    return NewtonPolygon(pts, lower_hull(pts), bound / nu, vals), coeffs


def hodge_polygon(prof: TowerProfile, upto: int) -> List[Tuple[int, Fraction]]:
    return [(m, hodge_eta(prof, m)) for m in range(upto + 1)]


@dataclass
class PolygonComparison:
    mode: str
    vertex_checks: List[Tuple[int, Fraction, bool]]
    above_hodge: bool
    full_equality: Optional[bool]
    euler_agreement: Optional[bool] = None
    euler_precision: Optional[int] = None
    euler_convention: Optional[str] = None

    @property
    def passed(self) -> bool:
        ok = all(c[2] for c in self.vertex_checks) and self.above_hodge
        if self.full_equality is not None:
            ok = ok and self.full_equality
        if self.euler_agreement is not None:
            ok = ok and self.euler_agreement
        return ok


def compare_np_hp(np_: NewtonPolygon, prof: TowerProfile, mode: Optional[str] = None) -> PolygonComparison:
    p, d = prof.p, prof.d
    if mode is None:
        mode = "full" if (p - 1) % d == 0 else "vertices"
    bound = np_.trust_bound
    certified = dict(np_.points)
    vertices = set(np_.vertices)
    checks = []
    m = 1
    while hodge_eta(prof, m) < bound:
        if m % d in (0, d - 1):
            eta = hodge_eta(prof, m)
            checks.append((m, eta, certified.get(m) == eta and (m, eta) in vertices))
        m += 1
    above = all(y >= hodge_eta(prof, x) for x, y in np_.points)
    full = None
    if mode == "full":
        hp = [(x, y) for x, y in hodge_polygon(prof, m) if y < bound]
        full = np_.vertices == hp
    return PolygonComparison(mode, checks, above, full)


def compare_euler_fredholm(R: TRing, euler: List[np.ndarray], fred: List[np.ndarray], precision: int) -> bool:
    """Coefficientwise agreement modulo T^precision for the s-degrees both lists cover."""
    for a, b in zip(euler, fred):
        if np.any((a[..., :precision] - b[..., :precision]) % R.p):
            return False
    return True


EULER_CONVENTIONS = (("inverted", "inverse"), ("inverted", "direct"), ("plain", "inverse"), ("plain", "direct"))


def euler_precision(fe: FrobeniusElement, F: GF, np_: NewtonPolygon) -> int:
    """T-adic precision at which a t x t Fredholm determinant is trustworthy."""
    return min(fe.alpha.p_power, ceil_frac(np_.trust_bound * F.nu))


def euler_convention_sweep(fe: FrobeniusElement, F: GF, D: int, fred: List[np.ndarray],
                           precision: int) -> Dict[Tuple[str, str], bool]:
    """Agreement with det(1 - sN) for each (factor, character) convention."""
    R = TRing(F, fe.alpha.p_power)
    out = {}
    for factors, character in EULER_CONVENTIONS:
        euler = euler_product(fe, F, D, factors == "inverted", character)
        out[(factors, character)] = compare_euler_fredholm(R, euler, fred[:D + 1], precision)
    return out
