"""Regular differentials on X_n, the Cartier operator, and higher a-numbers.

A differential is represented by its coefficient h in omega = h dx.  The
Cartier operator is computed from the decomposition h = sum_j g_j^p x^j
(the degree-p basis of K_n over K_n^p): V(h dx) = g_{p-1} dx.  The
decomposition eliminates the top variable through y = y^p - f, so only
polynomial arithmetic in R_n is ever needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import linalg
from .algebra import GF, terms_scale
from .profile import genus, xi_scaled
from .tower import Data, FuncElem, Tower, _data_iadd


class CartierError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# p-th power decomposition

class _Decomposer:
    def __init__(self, tower: Tower):
        self.tower = tower
        self.F = tower.F
        self.p = tower.p
        self._neg_f_powers: Dict[int, List[Data]] = {}

    def neg_f_powers(self, i: int) -> List[Data]:
        hit = self._neg_f_powers.get(i)
        if hit is None:
            t = self.tower
            neg_f = (-t.f(i)).data
            powers = [{0: {0: 1}}]
            for _ in range(1, self.p):
                powers.append(t._mul_data(powers[-1], neg_f))
            self._neg_f_powers[i] = hit = powers
        return hit

    def components(self, data: Data, level: int, wanted: Sequence[int]) -> Dict[int, Data]:
        """{j: g_j} for j in ``wanted`` where h = sum_j g_j^p x^j."""
        F, p = self.F, self.p
        if level == 0:
            out: Dict[int, Data] = {j: {} for j in wanted}
            h = data.get(0, {})
            for e, c in h.items():
                q, j = divmod(e, p)
                if j in out:
                    out[j].setdefault(0, {})[q] = F.frobinv_t[c]
            return {j: g for j, g in out.items()}
        i = level - 1
        pi = p ** i
        # split by the exponent of y_i
        split: Dict[int, Data] = {}
        for a, t in data.items():
            b, low = divmod(a, pi)
            split.setdefault(b, {})[low] = t
        powers = self.neg_f_powers(i)
        result: Dict[int, Data] = {j: {} for j in wanted}
        for c in range(p):
            H: Data = {}
            for b, hb in split.items():
                if b < c:
                    continue
                coef = comb(b, c) % p
                if not coef:
                    continue
                prod = self.tower._mul_data(hb, powers[b - c]) if b > c else hb
                for a, t in prod.items():
                    _data_iadd(F, H, a, terms_scale(F, t, coef))
            if not H:
                continue
            sub = self.components(H, i, wanted)
            for j, g in sub.items():
                for a, t in g.items():
                    _data_iadd(F, result[j], a + c * pi, t)
        return result


def pth_power_decompose(h: FuncElem) -> List[FuncElem]:
    """(g_0, ..., g_{p-1}) with h = sum_j g_j^p x^j."""
    t = h.tower
    comps = _Decomposer(t).components(h.data, h.level, range(t.p))
    return [FuncElem(t, h.level, comps[j]) for j in range(t.p)]


def cartier_diff(h: FuncElem, _dec: "_Decomposer" = None) -> FuncElem:
    """V(h dx) = g_{p-1} dx, returned as the coefficient of dx."""
    t = h.tower
    dec = _dec or _Decomposer(t)
    comps = dec.components(h.data, h.level, (t.p - 1,))
    return FuncElem(t, h.level, comps[t.p - 1])


# ---------------------------------------------------------------------------
# regular basis and the matrix of V

@dataclass(frozen=True)
class RegularBasis:
    n: int
    pairs: Tuple[Tuple[int, int], ...]  # (a, nu) with 1 <= nu < xi_a

    def __len__(self):
        return len(self.pairs)

    def index(self) -> Dict[Tuple[int, int], int]:
        return {pr: k for k, pr in enumerate(self.pairs)}


def regular_basis(tower: Tower, n: int) -> RegularBasis:
    p = tower.p
    pn = p ** n
    pairs = []
    for a in range(pn):
        # nu < xi_a  <=>  p^n nu < p^n xi_a
        scaled = xi_scaled(tower.profile, a, n)
        nu = 1
        while pn * nu < scaled:
            pairs.append((a, nu))
            nu += 1
    basis = RegularBasis(n, tuple(pairs))
    g = genus(tower.profile, n)
    if len(basis) != g:
        raise CartierError(f"regular basis has {len(basis)} elements, genus is {g}")
    return basis


def basis_differential(tower: Tower, n: int, a: int, nu: int) -> FuncElem:
    """x^{nu-1} w_a^{(n)}, the dx-coefficient of x^nu w_a dx/x."""
    sign = 1 if n % 2 == 0 else tower.F.neg(1)
    return tower.monomial(nu - 1, tower.p ** n - 1 - a, sign, n)


def diff_coordinates(tower: Tower, n: int, h: FuncElem, index: Dict[Tuple[int, int], int]) -> Dict[int, int]:
    """Coordinates of h dx in the regular basis; raises if h dx is not regular."""
    F = tower.F
    pn = tower.p ** n
    sign = 1 if n % 2 == 0 else F.neg(1)
    out: Dict[int, int] = {}
    for b, t in h.data.items():
        for m, c in t.items():
            key = (pn - 1 - b, m + 1)
            k = index.get(key)
            if k is None:
                raise CartierError(f"term x^{m} y^{b} lies outside the regular basis")
            out[k] = F.mul(c, sign)
    return out


@dataclass
class SemilinMatrix:
    """Matrix A of a map v -> A sigma^{-twist}(v) in a fixed basis."""

    field: GF
    entries: np.ndarray
    twist: int = 1

    def compose(self, other: "SemilinMatrix") -> "SemilinMatrix":
        B = linalg.frobenius_twist(self.field, other.entries, -self.twist)
        return SemilinMatrix(self.field, linalg.matmul(self.field, self.entries, B), self.twist + other.twist)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def serialize(self) -> str:
        F = self.field
        return "\n".join(" ".join(F.format(int(c)) for c in row) for row in self.entries)


def cartier_matrix(tower: Tower, n: int, basis: RegularBasis = None) -> SemilinMatrix:
    F, p = tower.F, tower.p
    basis = basis or regular_basis(tower, n)
    index = basis.index()
    g = len(basis)
    A = np.zeros((g, g), dtype=np.int64)
    dec = _Decomposer(tower)
    cache: Dict[Tuple[int, int], FuncElem] = {}
    pn = p ** n
    for col, (a, nu) in enumerate(basis.pairs):
        q, r = divmod(nu - 1, p)
        b = pn - 1 - a
        key = (r, b)
        img = cache.get(key)
        if img is None:
            img = cartier_diff(tower.monomial(r, b, 1, n), dec)
            cache[key] = img
        sign = 1 if n % 2 == 0 else F.neg(1)
        # V(x^{pq} w dx) = x^q V(w dx); the sign is in F_p so fixed by sigma^{-1}
        h = img.shift_x(q).scale(sign) if q else img.scale(sign)
        for row, c in diff_coordinates(tower, n, h, index).items():
            A[row, col] = c
    return SemilinMatrix(F, A, 1)


@dataclass
class ANumberResult:
    n: int
    genus: int
    anumbers: List[int]  # a^{(1)}, a^{(2)}, ...
    multiplicities: Dict[int, int]  # Jordan block size -> count
    nilpotency_index: int

    def a(self, r: int) -> int:
        if r <= len(self.anumbers):
            return self.anumbers[r - 1]
        return self.genus


def higher_anumbers(tower: Tower, n: int, r_max: int = None, matrix: SemilinMatrix = None) -> ANumberResult:
    """Kernel dimensions of the iterates of V, iterated until V^r = 0."""
    F = tower.F
    V = matrix or cartier_matrix(tower, n)
    g = V.size
    seq: List[int] = []
    if g:
        power = V
        while True:
            seq.append(g - linalg.rank(F, power.entries))
            if seq[-1] == g:
                break
            if len(seq) > 1 and seq[-1] == seq[-2]:
                raise CartierError(f"V is not nilpotent: kernel dimension stuck at {seq[-1]} of {g}")
            power = power.compose(V) if F.nu > 1 else SemilinMatrix(F, linalg.matmul(F, power.entries, V.entries), power.twist + 1)
    nil = len(seq)
    full = [0] + seq + [g]
    mult = {}
    for i in range(1, nil + 1):
        m = 2 * full[i] - full[i - 1] - full[i + 1]
        if m < 0:
            raise CartierError(f"negative multiplicity m({i}) = {m}; sequence {seq}")
        if m:
            mult[i] = m
    if sum(i * m for i, m in mult.items()) != g:
        raise CartierError("Jordan block sizes do not add up to the genus")
    if r_max is not None and r_max > nil:
        seq = seq + [g] * (r_max - nil)
    return ANumberResult(n, g, seq if r_max is None else seq[:max(r_max, nil)], mult, nil)
