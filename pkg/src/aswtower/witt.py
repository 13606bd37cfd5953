"""Truncated Witt vectors over rings of characteristic p.

The universal sum and difference polynomials are derived over the integers
from ghost components, checked to be integral, and reduced mod p.  They are
then evaluated on coordinates taken from any ring whose elements support
``+`` and ``*`` (for instance ``Poly`` over k or ``FuncElem`` in R_n).
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

from .algebra import GF, Poly

IntPoly = Dict[Tuple[int, ...], int]


def max_witt_length() -> int:
    return int(os.environ.get("ASWTOWER_MAX_LEVEL", "3"))


class WittError(ValueError):
    pass


def _ip_add(a: IntPoly, b: IntPoly, sign: int = 1) -> IntPoly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _ip_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _ip_pow(a: IntPoly, k: int, nvars: int) -> IntPoly:
    result: IntPoly = {(0,) * nvars: 1}
    base = a
    while k:
        if k & 1:
            result = _ip_mul(result, base)
        k >>= 1
        if k:
            base = _ip_mul(base, base)
    return result


def _ip_var(i: int, nvars: int, power: int = 1) -> IntPoly:
    e = [0] * nvars
    e[i] = power
    return {tuple(e): 1}


@dataclass(frozen=True)
class CarryPolys:
    """Coordinate polynomials of Witt addition and subtraction, mod p.

    ``add[m]`` and ``sub[m]`` are polynomials in the 2n variables
    (a_0..a_{n-1}, b_0..b_{n-1}); only a_0..a_m, b_0..b_m occur in them.
    """

    p: int
    n: int
    add: Tuple[Dict[Tuple[int, ...], int], ...]
    sub: Tuple[Dict[Tuple[int, ...], int], ...]


def _solve_ghost(p: int, n: int, sign: int) -> List[IntPoly]:
    nv = 2 * n
    out: List[IntPoly] = []
    for m in range(n):
        acc: IntPoly = {}
        for i in range(m + 1):
            coeff = p ** i
            ta = {e: c * coeff for e, c in _ip_var(i, nv, p ** (m - i)).items()}
            tb = {e: c * coeff * sign for e, c in _ip_var(n + i, nv, p ** (m - i)).items()}
            acc = _ip_add(_ip_add(acc, ta), tb)
        for i in range(m):
            acc = _ip_add(acc, {e: c * p ** i for e, c in _ip_pow(out[i], p ** (m - i), nv).items()}, -1)
        pm = p ** m
        solved: IntPoly = {}
        for e, c in acc.items():
            if c % pm:
                raise WittError(f"non-integral ghost solve at p={p}, coordinate {m}")
            solved[e] = c // pm
        out.append(solved)
    return out


@lru_cache(maxsize=None)
def witt_carry_polys(p: int, n: int) -> CarryPolys:
    if n < 1:
        raise WittError("Witt length must be positive")
    if n > max_witt_length():
        raise WittError(f"Witt length {n} exceeds the cap {max_witt_length()} (set ASWTOWER_MAX_LEVEL)")
    add = _solve_ghost(p, n, 1)
    sub = _solve_ghost(p, n, -1)

    def modp(polys):
        return tuple({e: c % p for e, c in P.items() if c % p} for P in polys)

    return CarryPolys(p, n, modp(add), modp(sub))


def ghost_component(p: int, coords: Sequence[int], m: int) -> int:
    """m-th ghost component of an integer vector."""
    return sum(p ** i * coords[i] ** (p ** (m - i)) for i in range(m + 1))


def evaluate(poly: Dict[Tuple[int, ...], int], values: Sequence, zero, scale: Callable = None):
    """Evaluate a mod-p polynomial at ring elements; ``scale(v, c)`` multiplies by an F_p scalar."""
    if scale is None:
        scale = lambda v, c: v * c
    cache: Dict[Tuple[int, int], object] = {}

    def power(i: int, k: int):
        key = (i, k)
        if key not in cache:
            if k == 1:
                cache[key] = values[i]
            else:
                half = power(i, k // 2)
                sq = half * half
                cache[key] = sq * values[i] if k % 2 else sq
        return cache[key]

    total = zero
    for e in sorted(poly):
        term = None
        for i, k in enumerate(e):
            if k:
                pw = power(i, k)
                term = pw if term is None else term * pw
        if term is None:
            raise WittError("carry polynomial with a constant term")
        total = total + scale(term, poly[e])
    return total


@dataclass(frozen=True)
class WittVec:
    coords: Tuple

    @property
    def length(self) -> int:
        return len(self.coords)


def _combine(u: WittVec, v: WittVec, p: int, which: str, zero, scale=None) -> WittVec:
    if u.length != v.length:
        raise WittError("Witt vectors of different lengths")
    n = u.length
    polys = getattr(witt_carry_polys(p, n), which)
    values = list(u.coords) + list(v.coords)
    return WittVec(tuple(evaluate(polys[m], values, zero, scale) for m in range(n)))


def witt_add(u: WittVec, v: WittVec, p: int, zero, scale=None) -> WittVec:
    return _combine(u, v, p, "add", zero, scale)


def witt_sub(u: WittVec, v: WittVec, p: int, zero, scale=None) -> WittVec:
    return _combine(u, v, p, "sub", zero, scale)


def _int_scale(p):
    return lambda v, c: (v * c) % p


def witt_add_fp(u: Sequence[int], v: Sequence[int], p: int) -> Tuple[int, ...]:
    """Witt addition with coordinates in F_p given as integers."""
    res = witt_add(WittVec(tuple(u)), WittVec(tuple(v)), p, 0, _int_scale(p))
    return tuple(c % p for c in res.coords)


def witt_sub_fp(u: Sequence[int], v: Sequence[int], p: int) -> Tuple[int, ...]:
    res = witt_sub(WittVec(tuple(u)), WittVec(tuple(v)), p, 0, _int_scale(p))
    return tuple(c % p for c in res.coords)


@lru_cache(maxsize=None)
def witt_of_integer(N: int, p: int, n: int) -> Tuple[int, ...]:
    """Witt coordinates in W_n(F_p) of the integer N >= 0, by repeated addition of 1."""
    one = (1,) + (0,) * (n - 1)
    acc = (0,) * n
    for _ in range(N % p ** n):
        acc = witt_add_fp(acc, one, p)
    return acc


def lift_scalar(F: GF, code: int, n: int, convention: str) -> Tuple[int, ...]:
    """Witt coordinates (codes) of a coefficient written as a single field element."""
    if convention == "teichmuller" or code == 0:
        return (code,) + (0,) * (n - 1)
    if convention == "integer":
        if code >= F.p:
            raise WittError("the integer lift applies only to prime-field literals")
        return witt_of_integer(code, F.p, n)
    raise WittError(f"unknown lift convention {convention!r}")


def check_break_condition(p: int, coeffs: Dict[int, Sequence[int]]) -> int:
    """Validate exponents and the minimal-break condition; return d."""
    for i in coeffs:
        if i <= 0 or i % p == 0:
            raise WittError(f"exponent {i} is not a positive integer prime to p={p}")
    top = [i for i, w in coeffs.items() if w and w[0] != 0]
    if not top:
        raise WittError("coordinate-0 polynomial is zero")
    d = max(top)
    for i, w in coeffs.items():
        for j, c in enumerate(w):
            if c and i > d * p ** j:
                raise WittError(f"exponent {i} violates the break condition at Witt coordinate {j}")
    return d


def build_rhs(F: GF, coeffs: Dict[int, Sequence[int]], n: int) -> WittVec:
    """f([x]) = sum_i c_i [x^i] as a Witt vector over k[x]; coefficients are Witt coordinate codes."""
    p = F.p
    check_break_condition(p, coeffs)
    zero = Poly(F)
    total = None
    for i in sorted(coeffs):
        w = list(coeffs[i])[:n] + [0] * max(0, n - len(coeffs[i]))
        vec = WittVec(tuple(Poly(F, {i * p ** j: w[j]}) for j in range(n)))
        total = vec if total is None else witt_add(total, vec, p, zero)
    return total
