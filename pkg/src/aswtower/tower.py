"""Artin-Schreier-Witt towers over the projective line in standard form.

A tower is given by Witt coefficients c_i of f(X) = sum c_i X^i.  Level m of
the Witt equation F(y) - y = f([x]) reads y_m^p - y_m = b_m with b_m a
polynomial in x and the lower coordinates.  Each b_m is rewritten in the
reduced basis x^e y^a of R_m and then brought to standard form by
subtracting u^p - u for monomials u until the pole order at infinity is
prime to p.  The substitutions are recorded so that the Galois generator
(Witt addition of 1) can be transported to the standard coordinates.

Elements of R_n are ``FuncElem`` objects: a map from the y-index a < p^n
(whose base-p digits are the exponents of y_0, y_1, ...) to a sparse
polynomial in x.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import GF, FieldElem, FieldParams, Poly, make_field, terms_iadd, terms_mul, terms_scale
from .profile import TowerProfile, break_lower, digits, from_digits, genus, xi_scaled
from .witt import (
    WittError,
    build_rhs,
    check_break_condition,
    evaluate,
    lift_scalar,
    max_witt_length,
    witt_carry_polys,
)

Data = Dict[int, Dict[int, int]]  # y-index -> {x-exponent: code}

LIFTS = ("teichmuller", "integer")


class SpecError(ValueError):
    """Tower specification that is malformed or violates minimal break ratios."""


class TowerError(RuntimeError):
    """Internal failure of a construction step that the theory guarantees."""


# ---------------------------------------------------------------------------
# tower specification files

@dataclass(frozen=True)
class TowerSpec:
    field: FieldParams
    coeffs: Tuple[Tuple[int, Tuple[int, ...]], ...]
    lift: str = "teichmuller"
    levels: int = 1

    def __post_init__(self):
        if self.lift not in LIFTS:
            raise SpecError(f"lift must be one of {LIFTS}")
        if self.levels < 1:
            raise SpecError("levels must be at least 1")
        object.__setattr__(self, "coeffs", tuple(sorted((int(i), tuple(w)) for i, w in self.coeffs)))
        try:
            check_break_condition(self.field.p, self.witt_coeffs(self.levels))
        except WittError as exc:
            raise SpecError(str(exc)) from exc

    @property
    def gf(self) -> GF:
        return make_field(self.field)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def d(self) -> int:
        return max(i for i, w in self.coeffs if w and w[0] != 0)

    @property
    def profile(self) -> TowerProfile:
        return TowerProfile(self.p, self.d)

    def witt_coeffs(self, n: int) -> Dict[int, Tuple[int, ...]]:
        """Witt coordinates of each coefficient at length n, after applying the lift convention.

        A coefficient written as one literal is lifted by the convention; a
        coefficient written as several literals is taken as explicit Witt
        coordinates (padded with zeros).
        """
        out = {}
        for i, w in self.coeffs:
            if len(w) == 1:
                out[i] = lift_scalar(self.gf, w[0], n, self.lift)
            else:
                out[i] = tuple(list(w[:n]) + [0] * max(0, n - len(w)))
        return out

    def with_options(self, lift: Optional[str] = None, levels: Optional[int] = None) -> "TowerSpec":
        return TowerSpec(self.field, self.coeffs, lift or self.lift, levels or self.levels)

    def serialize(self) -> str:
        F = self.gf
        lines = [f"p={self.p}", f"nu={self.field.nu}"]
        if self.field.nu > 1:
            lines.append("modulus=" + ",".join(str(c) for c in self.field.modulus))
        lines += [f"levels={self.levels}", f"lift={self.lift}"]
        for i, w in self.coeffs:
            lines.append("c " + " ".join([str(i)] + [F.format(c) for c in w]))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "TowerSpec":
        keys: Dict[str, str] = {}
        raw_coeffs: List[Tuple[int, List[str]]] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("c ") or line == "c":
                parts = line.split()
                if len(parts) < 3:
                    raise SpecError(f"line {lineno}: coefficient line needs an exponent and a value")
                raw_coeffs.append((int(parts[1]), parts[2:]))
                continue
            key, eq, val = line.partition("=")
            key = key.strip()
            if not eq or key not in ("p", "nu", "modulus", "levels", "lift"):
                raise SpecError(f"line {lineno}: unknown key {key!r}")
            if key in keys:
                raise SpecError(f"line {lineno}: duplicate key {key!r}")
            keys[key] = val.strip()
        if "p" not in keys:
            raise SpecError("missing key p")
        try:
            p = int(keys["p"])
            nu = int(keys.get("nu", "1"))
            modulus = None
            if "modulus" in keys:
                modulus = tuple(int(c) for c in keys["modulus"].split(","))
            if (nu > 1) != (modulus is not None):
                raise SpecError("modulus must be present exactly when nu > 1")
            fp = FieldParams(p, nu, modulus)
            F = make_field(fp)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        seen = set()
        coeffs = []
        for i, lits in raw_coeffs:
            if i in seen:
                raise SpecError(f"exponent {i} listed twice")
            seen.add(i)
            coeffs.append((i, tuple(F.parse(t) for t in lits)))
        if not coeffs:
            raise SpecError("no coefficients given")
        return cls(fp, tuple(coeffs), keys.get("lift", "teichmuller"), int(keys.get("levels", "1")))

    @classmethod
    def simple(cls, p: int, coeffs: Dict[int, object], levels: int = 1, lift: str = "teichmuller",
               nu: int = 1, modulus: Optional[Sequence[int]] = None) -> "TowerSpec":
        """Convenience constructor; values are ints (prime field) or tuples of Witt coordinate codes."""
        fp = FieldParams(p, nu, tuple(modulus) if modulus else None)
        cs = []
        for i, v in coeffs.items():
            w = (v,) if isinstance(v, int) else tuple(v)
            cs.append((i, w))
        return cls(fp, tuple(cs), lift, levels)


def table1_specs(lift: str = "teichmuller", levels: int = 2) -> List[TowerSpec]:
    """The five degree-6 polynomials over F_5 used for the a_2^{(3)} table."""
    polys = [
        {6: 1, 4: 1, 3: 2, 2: 1, 1: 1},
        {6: 1, 4: 1, 2: 2},
        {6: 1, 3: 1, 2: 1, 1: 3},
        {6: 1, 1: 4},
        {6: 1},
    ]
    return [TowerSpec.simple(5, c, levels, lift) for c in polys]


TABLE1_EXPECTED = (210, 210, 211, 213, 213)


def poly_label(spec: TowerSpec) -> str:
    parts = []
    for i, w in sorted(spec.coeffs, reverse=True):
        c = ",".join(str(x) for x in w)
        c = "" if c == "1" else (c if len(w) == 1 else f"({c})")
        parts.append(f"{c}X^{i}" if i > 1 else f"{c}X")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# ring elements

class FuncElem:
    """Reduced element of R_n = k[x, y_0, ..., y_{n-1}]."""

    __slots__ = ("tower", "level", "data")

    def __init__(self, tower: "Tower", level: int, data: Optional[Data] = None):
        self.tower = tower
        self.level = level
        self.data: Data = {a: t for a, t in (data or {}).items() if t}

    # construction helpers live on Tower; arithmetic here
    def _wrap(self, data: Data, level: int) -> "FuncElem":
        return FuncElem(self.tower, level, data)

    def _coerce(self, other) -> "FuncElem":
        if isinstance(other, FuncElem):
            return other
        if isinstance(other, Poly):
            return self.tower.from_poly(other, 0)
        raise TypeError(f"cannot combine FuncElem with {type(other).__name__}")

    def __add__(self, other) -> "FuncElem":
        other = self._coerce(other)
        return self._wrap(_data_add(self.tower.F, self.data, other.data), max(self.level, other.level))

    def __sub__(self, other) -> "FuncElem":
        return self + (-self._coerce(other))

    def __neg__(self) -> "FuncElem":
        F = self.tower.F
        return self._wrap({a: terms_scale(F, t, F.neg(1)) for a, t in self.data.items()}, self.level)

    def __mul__(self, other) -> "FuncElem":
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        return self._wrap(self.tower._mul_data(self.data, other.data), max(self.level, other.level))

    __rmul__ = __mul__

    def scale(self, c: int) -> "FuncElem":
        F = self.tower.F
        return self._wrap({a: terms_scale(F, t, c) for a, t in self.data.items()} if c else {}, self.level)

    def mul_poly(self, g: Dict[int, int]) -> "FuncElem":
        """Multiply by a polynomial in x given as a term dict."""
        F = self.tower.F
        return self._wrap({a: terms_mul(F, t, g) for a, t in self.data.items()}, self.level)

    def shift_x(self, k: int) -> "FuncElem":
        return self._wrap({a: {e + k: c for e, c in t.items()} for a, t in self.data.items()}, self.level)

    def __pow__(self, k: int) -> "FuncElem":
        result = self.tower.one(self.level)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frob(self) -> "FuncElem":
        """The p-th power map (additive in characteristic p)."""
        return self.tower.frobenius(self)

    def lift(self, level: int) -> "FuncElem":
        if level < self.level:
            raise ValueError("cannot lower the level of an element")
        return self._wrap(self.data, level)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        if isinstance(other, FuncElem):
            return self.data == other.data
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted((a, tuple(sorted(t.items()))) for a, t in self.data.items())))

    def coeff(self, a: int) -> Dict[int, int]:
        return self.data.get(a, {})

    def constant(self) -> Optional[int]:
        """The value if this element is a constant of k, else None."""
        if not self.data:
            return 0
        if set(self.data) == {0} and set(self.data[0]) == {0}:
            return self.data[0][0]
        return None

    def ord(self, n: Optional[int] = None):
        """ord_n: minus p^n times the largest deg g_a + xi_a; +inf for zero."""
        n = self.level if n is None else n
        if not self.data:
            return float("inf")
        return -max(self.tower.weight(e, a, n) for a, t in self.data.items() for e in (max(t),))

    def leading(self, n: Optional[int] = None) -> Tuple[int, int, int]:
        """(x-exponent, y-index, coefficient) of the monomial of least valuation."""
        n = self.level if n is None else n
        best = None
        for a, t in self.data.items():
            e = max(t)
            w = self.tower.weight(e, a, n)
            if best is None or w > best[0]:
                best = (w, e, a)
        if best is None:
            raise ValueError("zero has no leading term")
        _, e, a = best
        return e, a, self.data[a][e]

    def terms(self) -> List[Tuple[Tuple[int, Tuple[int, ...]], FieldElem]]:
        F = self.tower.F
        out = []
        for a in sorted(self.data):
            ys = tuple(digits(a, self.tower.p, self.level))
            for e in sorted(self.data[a]):
                out.append(((e, ys), FieldElem(F, self.data[a][e])))
        return sorted(out, key=lambda kv: kv[0])

    def x_degree(self) -> int:
        return max((max(t) for t in self.data.values()), default=-1)

    def __repr__(self):
        if not self.data:
            return "0"
        F = self.tower.F
        parts = []
        for (e, ys), c in self.terms():
            mon = [f"x^{e}"] if e else []
            mon += [f"y{i}^{k}" if k > 1 else f"y{i}" for i, k in enumerate(ys) if k]
            parts.append(F.format(c.code) + ("*" + "*".join(mon) if mon else ""))
        return " + ".join(parts)


def _data_add(F: GF, A: Data, B: Data) -> Data:
    out = {a: dict(t) for a, t in A.items()}
    for b, t in B.items():
        if b in out:
            terms_iadd(F, out[b], t)
            if not out[b]:
                del out[b]
        else:
            out[b] = dict(t)
    return out


def _data_iadd(F: GF, out: Data, a: int, t: Dict[int, int]) -> None:
    if not t:
        return
    cur = out.get(a)
    if cur is None:
        out[a] = dict(t)
    else:
        terms_iadd(F, cur, t)
        if not cur:
            del out[a]


# ---------------------------------------------------------------------------
# the tower

@dataclass
class LevelRecord:
    """Standard-form data of one level: y_m^p - y_m = f_m, with the original
    Witt coordinate recovered as kappa*y_m + U_m."""

    f: FuncElem
    kappa: int
    U: FuncElem
    gamma_shift: FuncElem  # gamma(y_m) - y_m, an element of R_m
    raw_pole: int
    reduction_steps: int


class Tower:
    def __init__(self, spec: TowerSpec):
        self.spec = spec
        self.F = spec.gf
        self.p = spec.p
        self.profile = spec.profile
        self.d = spec.d
        self.levels: List[LevelRecord] = []
        self._sumkey_cache: Dict[Tuple[int, int], object] = {}
        self._mono_cache: Dict[Tuple[int, ...], Data] = {}
        self._frob_cache: Dict[int, Data] = {}
        self._gamma_cache: Dict[int, Data] = {}
        self._weights: Dict[int, List[int]] = {}

    @property
    def n(self) -> int:
        return len(self.levels)

    # -- element constructors
    def zero(self, level: int = 0) -> FuncElem:
        return FuncElem(self, level)

    def one(self, level: int = 0) -> FuncElem:
        return FuncElem(self, level, {0: {0: 1}})

    def const(self, c: int, level: int = 0) -> FuncElem:
        return FuncElem(self, level, {0: {0: c}} if c else {})

    def x(self, level: int = 0) -> FuncElem:
        return FuncElem(self, level, {0: {1: 1}})

    def y(self, i: int, level: Optional[int] = None) -> FuncElem:
        return FuncElem(self, i + 1 if level is None else level, {self.p ** i: {0: 1}})

    def monomial(self, e: int, a: int, c: int = 1, level: Optional[int] = None) -> FuncElem:
        if level is None:
            level = len(digits(a, self.p))
        return FuncElem(self, level, {a: {e: c}} if c else {})

    def from_poly(self, g: Poly, level: int = 0) -> FuncElem:
        return FuncElem(self, level, {0: dict(g.terms)} if g.terms else {})

    def y_power(self, exps: Sequence[int], level: Optional[int] = None) -> FuncElem:
        """Reduced form of the monomial with arbitrary y-exponents."""
        lvl = len(exps) if level is None else level
        return FuncElem(self, lvl, self._reduce_monomial(tuple(exps)))

    # -- valuations
    def weight(self, e: int, a: int, n: int) -> int:
        """-ord_n(x^e y^a) = p^n e + p^n xi_a."""
        tab = self._weights.get(n)
        if tab is None:
            tab = [xi_scaled(self.profile, b, n) for b in range(self.p ** n)]
            self._weights[n] = tab
        return self.p ** n * e + tab[a]

    # -- multiplication with reduction y_i^p -> y_i + f_i
    def _sumkey(self, a: int, b: int):
        key = self._sumkey_cache.get((a, b))
        if key is None:
            p = self.p
            da, db = digits(a, p), digits(b, p)
            L = max(len(da), len(db))
            s = [(da[i] if i < len(da) else 0) + (db[i] if i < len(db) else 0) for i in range(L)]
            key = a + b if all(v < p for v in s) else tuple(s)
            self._sumkey_cache[(a, b)] = key
        return key

    def _reduce_monomial(self, s: Tuple[int, ...]) -> Data:
        s = tuple(s)
        while s and s[-1] == 0:
            s = s[:-1]
        hit = self._mono_cache.get(s)
        if hit is not None:
            return hit
        p = self.p
        over = [i for i, v in enumerate(s) if v >= p]
        if not over:
            res: Data = {from_digits(s, p): {0: 1}}
        else:
            i = over[-1]
            if i >= self.n:
                raise TowerError(f"y_{i} is not defined at the built level {self.n}")
            s1 = list(s)
            s1[i] -= p - 1
            s2 = list(s)
            s2[i] -= p
            res = _data_add(self.F, self._reduce_monomial(tuple(s1)),
                            self._mul_data(self._reduce_monomial(tuple(s2)), self.levels[i].f.data))
        self._mono_cache[s] = res
        return res

    def _mul_data(self, A: Data, B: Data) -> Data:
        F = self.F
        out: Data = {}
        pending: Dict[Tuple[int, ...], Dict[int, int]] = {}
        for a, ga in A.items():
            for b, hb in B.items():
                P = terms_mul(F, ga, hb)
                if not P:
                    continue
                key = self._sumkey(a, b)
                if type(key) is int:
                    _data_iadd(F, out, key, P)
                else:
                    cur = pending.get(key)
                    if cur is None:
                        pending[key] = P
                    else:
                        terms_iadd(F, cur, P)
        for s, P in pending.items():
            if not P:
                continue
            for c, yc in self._reduce_monomial(s).items():
                _data_iadd(F, out, c, terms_mul(F, P, yc))
        return out

    def frobenius(self, e: FuncElem) -> FuncElem:
        F, p = self.F, self.p
        out: Data = {}
        for a, t in e.data.items():
            img = self._frob_cache.get(a)
            if img is None:
                img = self._reduce_monomial(tuple(p * v for v in digits(a, p)))
                self._frob_cache[a] = img
            g = {k * p: F.frob_t[c] for k, c in t.items()}
            for b, yb in img.items():
                _data_iadd(F, out, b, terms_mul(F, g, yb))
        return FuncElem(self, e.level, out)

    def reduce(self, raw: Dict[Tuple[int, Tuple[int, ...]], int], level: Optional[int] = None) -> FuncElem:
        """Reduce a polynomial given as {(x-exp, y-exponent tuple): code}."""
        F = self.F
        out: Data = {}
        lvl = 0
        for (e, ys), c in raw.items():
            lvl = max(lvl, len(ys))
            for b, yb in self._reduce_monomial(tuple(ys)).items():
                _data_iadd(F, out, b, {k + e: F.mul(v, c) for k, v in yb.items()})
        return FuncElem(self, lvl if level is None else level, out)

    # -- Galois action
    def gamma_monomial(self, a: int) -> Data:
        """gamma(y^a) as reduced data."""
        hit = self._gamma_cache.get(a)
        if hit is not None:
            return hit
        if a == 0:
            res: Data = {0: {0: 1}}
        else:
            p = self.p
            ds = digits(a, p)
            top = len(ds) - 1
            if top >= self.n:
                raise TowerError("Galois action requested above the built level")
            rest = a - ds[top] * p ** top
            img_y = _data_add(self.F, {p ** top: {0: 1}}, self.levels[top].gamma_shift.data)
            res = self.gamma_monomial(rest)
            for _ in range(ds[top]):
                res = self._mul_data(res, img_y)
        self._gamma_cache[a] = res
        return res

    def gamma(self, e: FuncElem) -> FuncElem:
        F = self.F
        out: Data = {}
        for a, t in e.data.items():
            if a == 0:
                _data_iadd(F, out, 0, t)
                continue
            for b, yb in self.gamma_monomial(a).items():
                _data_iadd(F, out, b, terms_mul(F, t, yb))
        return FuncElem(self, e.level, out)

    def T(self, e: FuncElem) -> FuncElem:
        return self.gamma(e) - e

    def T_power(self, e: FuncElem, k: int) -> FuncElem:
        for _ in range(k):
            if e.is_zero():
                break
            e = self.T(e)
        return e

    # -- construction
    def original_coordinate(self, i: int, level: int) -> FuncElem:
        """The Witt coordinate before standard-form substitutions: kappa_i y_i + U_i."""
        rec = self.levels[i]
        return (self.y(i, level).scale(rec.kappa) + rec.U).lift(level)

    def _build_level(self, m: int, rhs_m: Poly) -> None:
        F, p = self.F, self.p
        carries = witt_carry_polys(p, self.spec.levels)
        nvars = 2 * self.spec.levels
        L = self.spec.levels
        zero = self.zero(m)
        # coordinate m of F(y) - y, minus the y_m^p - y_m part
        q_poly = {e: c for e, c in carries.sub[m].items() if not (sum(e) == 1 and (e[m] or e[L + m]))}
        tilde = [self.original_coordinate(i, m) for i in range(m)]
        values = [zero] * nvars
        for i in range(m):
            values[i] = tilde[i].frob()
            values[L + i] = tilde[i]
        Q = evaluate(q_poly, values, zero, lambda v, c: v.scale(c)) if q_poly else zero
        raw = self.from_poly(rhs_m, m) - Q
        raw_pole = -raw.ord(m) if not raw.is_zero() else 0
        U = self.zero(m)
        target = break_lower(self.profile, m + 1)
        pm = p ** m
        residues = {self.weight(0, a, m) % pm: a for a in range(pm)}
        steps = 0
        while True:
            if raw.is_zero():
                raise SpecError(f"level {m} equation became trivial during reduction")
            v = raw.ord(m)
            if v >= 0 or v % p:
                break
            steps += 1
            if steps > raw_pole + 1:
                raise TowerError(f"standard-form reduction did not terminate at level {m}")
            w = -v // p
            a = residues[w % pm]
            e, rem = divmod(w - self.weight(0, a, m), pm)
            if rem or e < 0:
                raise TowerError(f"no monomial of valuation {-w} at level {m}")
            u0 = self.monomial(e, a, 1, m)
            fu0 = u0.frob()
            le, la, lam = fu0.leading(m)
            re, ra, beta = raw.leading(m)
            if (le, la) != (re, ra):
                raise TowerError("leading monomials do not match during reduction")
            c = F.frobinv(F.mul(beta, F.inv(lam)))
            u = u0.scale(c)
            raw = raw - (u.frob() - u)
            U = U + u
        if -raw.ord(m) != target:
            raise SpecError(
                f"level {m}: pole order {-raw.ord(m)} after reduction, expected {target}; "
                "the spec does not have minimal break ratios"
            )
        # Galois action: gamma(tilde_m) = tilde_m + A_m(tilde_<m) from Witt addition of 1
        a_poly = {e: c for e, c in carries.add[m].items() if not (sum(e) == 1 and e[m])}
        values = [zero] * nvars
        for i in range(m):
            values[i] = tilde[i]
        values[L] = self.one(m)
        A = evaluate(a_poly, values, zero, lambda v, c: v.scale(c)) if a_poly else zero
        shift = U + A - self.gamma(U)
        # gamma^{p^m} fixes R_m pointwise after level m's shift is summed
        acc = self.zero(m)
        g = shift
        for _ in range(pm):
            acc = acc + g
            g = self.gamma(g)
        kappa = acc.constant()
        if kappa is None or kappa == 0 or kappa >= p:
            raise TowerError(f"gamma^(p^{m}) does not translate y_{m} by a nonzero element of F_p")
        inv = F.inv(kappa)
        self.levels.append(LevelRecord(raw.scale(inv), kappa, U, shift.scale(inv), raw_pole, steps))

    def build(self, n: int) -> "Tower":
        if n > self.spec.levels:
            raise SpecError(f"spec allows only {self.spec.levels} levels")
        if n > max_witt_length():
            raise SpecError(f"level {n} exceeds the cap {max_witt_length()}")
        rhs = build_rhs(self.F, self.spec.witt_coeffs(self.spec.levels), self.spec.levels)
        for m in range(self.n, n):
            self._build_level(m, rhs.coords[m])
        return self

    # -- convenience
    def f(self, m: int) -> FuncElem:
        return self.levels[m].f

    def genus(self, n: int) -> int:
        return genus(self.profile, n)

    def random_element(self, rng, level: int, max_xdeg: int = 6, density: float = 0.3) -> FuncElem:
        data: Data = {}
        for a in range(self.p ** level):
            t = {}
            for e in range(max_xdeg + 1):
                if rng.random() < density:
                    c = rng.randrange(1, self.F.q)
                    t[e] = c
            if t:
                data[a] = t
        return FuncElem(self, level, data)


def build_tower(spec: TowerSpec, n: Optional[int] = None) -> Tower:
    return Tower(spec).build(spec.levels if n is None else n)
