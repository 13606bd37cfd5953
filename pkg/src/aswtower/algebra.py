"""Exact arithmetic over F_{p^nu}, sparse univariate polynomials, and
T-truncated series in k[x][T]/(T^N).

Field elements are stored as integer codes: the base-p digits of a code are
the coordinates of the element in the power basis 1, u, ..., u^{nu-1} of
F_p[u]/(modulus).  The prime subfield is therefore {0, ..., p-1}.  All hot
arithmetic goes through precomputed tables, so code-level helpers are fast
and the ``FieldElem`` wrapper is only a convenience for callers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import factorint, isprime

MAX_FIELD_SIZE = 1024


class FieldError(ValueError):
    """Invalid field parameters or an illegal field operation."""


@dataclass(frozen=True)
class FieldParams:
    p: int
    nu: int = 1
    modulus: Optional[Tuple[int, ...]] = None  # low degree first, monic

    def __post_init__(self):
        if not isprime(self.p):
            raise FieldError(f"p={self.p} is not prime")
        if self.nu < 1:
            raise FieldError("nu must be positive")
        if self.nu == 1:
            if self.modulus is not None and len(self.modulus) != 2:
                raise FieldError("nu=1 takes no modulus")
            object.__setattr__(self, "modulus", None)
            return
        if self.modulus is None:
            raise FieldError("nu > 1 requires an explicit modulus")
        mod = tuple(int(c) % self.p for c in self.modulus)
        if len(mod) != self.nu + 1 or mod[-1] != 1:
            raise FieldError("modulus must be monic of degree nu")
        object.__setattr__(self, "modulus", mod)


def _poly_mulmod_fp(a: List[int], b: List[int], mod: Sequence[int], p: int) -> List[int]:
    nu = len(mod) - 1
    prod = [0] * (2 * nu - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, nu - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(nu):
                prod[k - nu + i] = (prod[k - nu + i] - c * mod[i]) % p
    return prod[:nu]


class GF:
    """The field F_{p^nu} with table-driven arithmetic on integer codes."""

    def __init__(self, params: FieldParams):
        self.params = params
        self.p = p = params.p
        self.nu = nu = params.nu
        self.q = q = p ** nu
        if q > MAX_FIELD_SIZE:
            raise FieldError(f"field of size {q} exceeds the table limit {MAX_FIELD_SIZE}")
        digits = [self._digits(c) for c in range(q)]
        enc = self._encode
        self.add_t = [[enc([(x + y) % p for x, y in zip(da, db)]) for db in digits] for da in digits]
        self.neg_t = [enc([(-x) % p for x in da]) for da in digits]
        self.sub_t = [[self.add_t[a][self.neg_t[b]] for b in range(q)] for a in range(q)]
        if nu == 1:
            self.mul_t = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            mod = params.modulus
            self.mul_t = [[enc(_poly_mulmod_fp(da, db, mod, p)) for db in digits] for da in digits]
            if not is_irreducible(Poly.from_coeffs(prime_field(p), list(mod))):
                raise FieldError(f"modulus {mod} is reducible over F_{p}")
        self.inv_t: List[Optional[int]] = [None] * q
        for a in range(1, q):
            row = self.mul_t[a]
            for b in range(1, q):
                if row[b] == 1:
                    self.inv_t[a] = b
                    break
        self.frob_t = [self._pow(a, p) for a in range(q)]
        self.frobinv_t = [0] * q
        for a in range(q):
            self.frobinv_t[self.frob_t[a]] = a
        if sorted(self.frob_t) != list(range(q)):
            raise FieldError("Frobenius is not bijective; modulus invalid")

    def _digits(self, c: int) -> List[int]:
        out = []
        for _ in range(self.nu):
            c, r = divmod(c, self.p)
            out.append(r)
        return out

    def _encode(self, digits: Sequence[int]) -> int:
        c = 0
        for x in reversed(digits):
            c = c * self.p + x
        return c

    def _pow(self, a: int, e: int) -> int:
        r, b = 1, a
        while e:
            if e & 1:
                r = self.mul_t[r][b]
            b = self.mul_t[b][b]
            e >>= 1
        return r

    # code-level API
    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_t[a][b]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def inv(self, a: int) -> int:
        r = self.inv_t[a]
        if r is None:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return r

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self._pow(self.inv(a), -e)
        return self._pow(a, e)

    def frob(self, a: int, k: int = 1) -> int:
        """sigma^k(a); negative k applies the inverse Frobenius."""
        k %= self.nu
        for _ in range(k):
            a = self.frob_t[a]
        return a

    def frobinv(self, a: int) -> int:
        return self.frobinv_t[a]

    def from_int(self, n: int) -> int:
        return n % self.p

    def coords(self, a: int) -> Tuple[int, ...]:
        return tuple(self._digits(a))

    def from_coords(self, coords: Sequence[int]) -> int:
        if len(coords) > self.nu:
            raise FieldError("too many coordinates")
        return self._encode([c % self.p for c in coords] + [0] * (self.nu - len(coords)))

    def elem(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            return value
        if isinstance(value, int):
            return FieldElem(self, value % self.p)
        return FieldElem(self, self.from_coords(value))

    def elements(self) -> Iterator["FieldElem"]:
        for c in range(self.q):
            yield FieldElem(self, c)

    def format(self, a: int) -> str:
        """Literal accepted by ``parse``: an integer in the prime field, else colon-joined coords."""
        if a < self.p:
            return str(a)
        return ":".join(str(c) for c in self.coords(a))

    def parse(self, text: str) -> int:
        text = text.strip()
        if ":" in text:
            return self.from_coords([int(t) for t in text.split(":")])
        return int(text) % self.p

    def __eq__(self, other):
        return isinstance(other, GF) and other.params == self.params

    def __hash__(self):
        return hash(self.params)

    def __repr__(self):
        return f"GF({self.q})" if self.nu == 1 else f"GF({self.p}^{self.nu}, modulus={self.params.modulus})"


@lru_cache(maxsize=None)
def make_field(params: FieldParams) -> GF:
    return GF(params)


def prime_field(p: int) -> GF:
    return make_field(FieldParams(p))


@dataclass(frozen=True)
class FieldElem:
    field: GF
    code: int

    def _check(self, other) -> int:
        if isinstance(other, int):
            return other % self.field.p
        if other.field != self.field:
            raise FieldError("operands live in different fields")
        return other.code

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.code, self._check(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.code, self._check(other)))

    def __rsub__(self, other):
        return FieldElem(self.field, self.field.sub(self._check(other), self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.code, self._check(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.field.elem(other).inverse() if isinstance(other, int) else self * other.inverse()

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.code, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.code))

    def frobenius(self, k: int = 1) -> "FieldElem":
        return FieldElem(self.field, self.field.frob(self.code, k))

    def frobenius_inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.frobinv(self.code))

    @property
    def coords(self) -> Tuple[int, ...]:
        return self.field.coords(self.code)

    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return self.field.format(self.code)


# ---------------------------------------------------------------------------
# sparse coefficient dictionaries (exponent -> code), shared helpers

Terms = Dict[int, int]


def terms_add(F: GF, a: Terms, b: Terms) -> Terms:
    out = dict(a)
    at = F.add_t
    for e, c in b.items():
        v = at[out.get(e, 0)][c]
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def terms_iadd(F: GF, acc: dict, b: dict, scale: int = 1, shift=None) -> None:
    """acc += scale * b (in place); ``shift`` is added to integer keys."""
    at, mt = F.add_t, F.mul_t
    for e, c in b.items():
        if scale != 1:
            c = mt[scale][c]
        if shift:
            e = e + shift
        v = at[acc.get(e, 0)][c]
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def terms_scale(F: GF, a: Terms, c: int) -> Terms:
    if c == 0:
        return {}
    if c == 1:
        return dict(a)
    mt = F.mul_t[c]
    return {e: mt[v] for e, v in a.items()}


def terms_mul(F: GF, a: Terms, b: Terms) -> Terms:
    if len(a) > len(b):
        a, b = b, a
    out: Terms = {}
    at, mt = F.add_t, F.mul_t
    bi = list(b.items())
    for e1, c1 in a.items():
        row = mt[c1]
        for e2, c2 in bi:
            e = e1 + e2
            out[e] = at[out.get(e, 0)][row[c2]]
    return {e: c for e, c in out.items() if c}


class Poly:
    """Sparse univariate polynomial over a finite field; immutable by convention."""

    __slots__ = ("field", "terms")

    def __init__(self, field: GF, terms: Optional[Terms] = None):
        self.field = field
        self.terms: Terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def from_coeffs(cls, field: GF, coeffs: Sequence[int]) -> "Poly":
        return cls(field, {i: c % field.q if field.nu > 1 else c % field.p for i, c in enumerate(coeffs)})

    @classmethod
    def monomial(cls, field: GF, e: int, c: int = 1) -> "Poly":
        return cls(field, {e: c})

    @property
    def degree(self) -> int:
        return max(self.terms) if self.terms else -1

    def lead(self) -> int:
        return self.terms[self.degree] if self.terms else 0

    def coeff(self, e: int) -> int:
        return self.terms.get(e, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.field, terms_add(self.field, self.terms, other.terms))

    def __neg__(self) -> "Poly":
        neg = self.field.neg_t
        return Poly(self.field, {e: neg[c] for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return Poly(self.field, terms_mul(self.field, self.terms, other.terms))
        return Poly(self.field, terms_scale(self.field, self.terms, other))

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __divmod__(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = dict(self.terms)
        quo: Terms = {}
        db = other.degree
        inv_lead = F.inv(other.lead())
        while rem:
            dr = max(rem)
            if dr < db:
                break
            c = F.mul(rem[dr], inv_lead)
            quo[dr - db] = c
            terms_iadd(F, rem, other.terms, F.neg(c), dr - db)
        return Poly(F, quo), Poly(F, rem)

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        return self * self.field.inv(self.lead()) if self.terms else self

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        result = Poly(self.field, {0: 1})
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for e, c in self.terms.items():
            acc = F.add(acc, F.mul(c, F.pow(x, e)))
        return acc

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.field.format(self.terms[e])
            mon = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            if not mon:
                parts.append(c)
            elif c == "1":
                parts.append(mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts)


def is_irreducible(f: Poly) -> bool:
    """Rabin's irreducibility test over F_q."""
    m = f.degree
    if m <= 0:
        return False
    if m == 1:
        return True
    F = f.field
    f = f.monic()
    x = Poly(F, {1: 1})
    q = F.q

    def frob_iter(k: int) -> Poly:
        return x.powmod(q ** k, f)

    if frob_iter(m) != x % f:
        return False
    for r in factorint(m):
        h = frob_iter(m // r) - x
        if h.gcd(f).degree > 0:
            return False
    return True


def monic_polys(F: GF, m: int) -> Iterator[Poly]:
    """All monic polynomials of degree m over F, in lexicographic code order."""
    for idx in range(F.q ** m):
        coeffs = []
        for _ in range(m):
            idx, c = divmod(idx, F.q)
            coeffs.append(c)
        yield Poly(F, {**{i: c for i, c in enumerate(coeffs) if c}, m: 1})


def irreducibles(F: GF, m: int) -> List[Poly]:
    return [f for f in monic_polys(F, m) if is_irreducible(f)]


# ---------------------------------------------------------------------------
# T-truncated series in k[x][T]/(T^N)

SeriesTerms = Dict[Tuple[int, int], int]


class TruncSeries:
    """Element of A_n[x] = k[x][T]/(T^N), stored sparsely as (x-exp, T-exp) -> code."""

    __slots__ = ("field", "p_power", "terms")

    def __init__(self, field: GF, p_power: int, terms: Optional[SeriesTerms] = None):
        self.field = field
        self.p_power = p_power
        self.terms: SeriesTerms = {k: c for k, c in (terms or {}).items() if c and k[1] < p_power}

    @classmethod
    def one(cls, field: GF, p_power: int) -> "TruncSeries":
        return cls(field, p_power, {(0, 0): 1})

    @classmethod
    def zero(cls, field: GF, p_power: int) -> "TruncSeries":
        return cls(field, p_power)

    def _same(self, other: "TruncSeries"):
        if other.p_power != self.p_power or other.field != self.field:
            raise FieldError("series over different truncations")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._same(other)
        out = dict(self.terms)
        terms_iadd(self.field, out, other.terms)
        return TruncSeries(self.field, self.p_power, out)

    def __neg__(self) -> "TruncSeries":
        neg = self.field.neg_t
        return TruncSeries(self.field, self.p_power, {k: neg[c] for k, c in self.terms.items()})

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def mul(self, other: "TruncSeries", x_bound: Optional[int] = None) -> "TruncSeries":
        """Product, discarding T^{>=N} and (optionally) x-degree above ``x_bound``."""
        self._same(other)
        F, N = self.field, self.p_power
        at, mt = F.add_t, F.mul_t
        out: SeriesTerms = {}
        b_items = list(other.terms.items())
        for (e1, j1), c1 in self.terms.items():
            row = mt[c1]
            for (e2, j2), c2 in b_items:
                j = j1 + j2
                if j >= N:
                    continue
                e = e1 + e2
                if x_bound is not None and e > x_bound:
                    continue
                k = (e, j)
                out[k] = at[out.get(k, 0)][row[c2]]
        return TruncSeries(F, N, out)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        return self.mul(other)

    def scale(self, c: int) -> "TruncSeries":
        return TruncSeries(self.field, self.p_power, terms_scale(self.field, self.terms, c))

    def truncate_x(self, bound: int) -> "TruncSeries":
        return TruncSeries(self.field, self.p_power, {k: c for k, c in self.terms.items() if k[0] <= bound})

    def inverse(self, x_bound: int) -> "TruncSeries":
        """Unit inverse modulo (T^N, x^{x_bound+1})."""
        F = self.field
        c0 = self.terms.get((0, 0), 0)
        if c0 == 0:
            raise FieldError("series is not a unit (zero constant term)")
        inv_c0 = F.inv(c0)
        # self = c0 (1 + g); inverse = c0^{-1} sum (-g)^k
        g = self.scale(inv_c0) - TruncSeries.one(F, self.p_power)
        minus_g = (-g).truncate_x(x_bound)
        acc = TruncSeries.one(F, self.p_power)
        power = TruncSeries.one(F, self.p_power)
        while True:
            power = power.mul(minus_g, x_bound)
            if not power.terms:
                break
            acc = acc + power
        return acc.scale(inv_c0)

    def sigma(self, k: int = 1) -> "TruncSeries":
        """Frobenius twist: coefficients c -> c^{p^k}, x -> x^{p^k}, T fixed."""
        F = self.field
        pk = F.p ** k
        return TruncSeries(F, self.p_power, {(e * pk, j): F.frob(c, k) for (e, j), c in self.terms.items()})

    def x_degree(self) -> int:
        return max((e for e, _ in self.terms), default=-1)

    def x_coeff(self, i: int) -> Terms:
        """Coefficient of x^i as a T-polynomial {T-exp: code}."""
        return {j: c for (e, j), c in self.terms.items() if e == i}

    def t_valuation_of_x_coeff(self, i: int) -> Optional[int]:
        js = [j for (e, j) in self.terms if e == i]
        return min(js) if js else None

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.p_power == other.p_power
            and self.field == other.field
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, j) in sorted(self.terms):
            parts.append(f"{self.field.format(self.terms[(e, j)])}*x^{e}*T^{j}")
        return " + ".join(parts)


def series_from_items(field: GF, p_power: int, items: Iterable[Tuple[int, int, int]]) -> TruncSeries:
    out: SeriesTerms = {}
    for e, j, c in items:
        out[(e, j)] = field.add(out.get((e, j), 0), c)
    return TruncSeries(field, p_power, out)
