"""Sparse homogeneous polynomials in x, y, z over a :class:`FieldTower`.

Coefficients are kept in the tower's raw representation; the polynomial
owns the tower and delegates coefficient arithmetic to it.  Iteration and
printing use graded reverse lexicographic order with x > y > z.
"""

from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass

from .exactnum import QQ, FieldElement, FieldTower, TowerError, evaluate_expression, to_rational

VARS = ("x", "y", "z")
MAX_DEGREE = 4096


class NotDivisible(ArithmeticError):
    """Raised by exact division; ``leading`` is the remainder's leading term."""

    def __init__(self, leading):
        super().__init__(f"not divisible (remainder leading term {leading})")
        self.leading = leading


class NotProportional(ArithmeticError):
    pass


def grevlex_key(e):
    return (e[0] + e[1] + e[2], -e[2], -e[1])


def _coerce_scalar(tower: FieldTower, c):
    if isinstance(c, FieldElement):
        return tower(c).raw if c.tower != tower else c.raw
    return tower(c).raw


class MPoly:
    """Polynomial ``sum c_e x^e0 y^e1 z^e2`` with no stored zero terms."""

    __slots__ = ("tower", "terms")

    def __init__(self, tower: FieldTower, terms=None, *, _trusted=False):
        self.tower = tower
        if _trusted:
            self.terms = terms
            return
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != 3 or min(e) < 0 or sum(e) > MAX_DEGREE:
                raise ValueError(f"bad exponent {e}")
            raw = c.raw if isinstance(c, FieldElement) and c.tower == tower else _coerce_scalar(tower, c)
            if not tower.is_zero(raw):
                clean[e] = raw
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def gens(cls, tower: FieldTower = QQ):
        one = tower.one_raw
        return tuple(cls(tower, {e: one}, _trusted=True)
                     for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def constant(cls, tower: FieldTower, c) -> MPoly:
        raw = _coerce_scalar(tower, c)
        return cls(tower, {} if tower.is_zero(raw) else {(0, 0, 0): raw}, _trusted=True)

    @classmethod
    def linear(cls, tower: FieldTower, a, b, c) -> MPoly:
        return cls(tower, {(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c})

    @classmethod
    def parse(cls, text: str, tower: FieldTower = QQ) -> MPoly:
        x, y, z = cls.gens(tower)
        names = {"x": x, "y": y, "z": z}
        for n in tower.names:
            names[n] = cls.constant(tower, tower.generator(n))
        out = evaluate_expression(text, names, lambda v: cls.constant(tower, v))
        return out if isinstance(out, MPoly) else cls.constant(tower, out)

    # -- basic properties ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        """Total degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def monomials(self):
        return sorted(self.terms, key=grevlex_key, reverse=True)

    def leading_monomial(self):
        return max(self.terms, key=grevlex_key)

    def leading_coefficient(self) -> FieldElement:
        return FieldElement(self.tower, self.terms[self.leading_monomial()])

    def coefficient(self, e) -> FieldElement:
        return FieldElement(self.tower, self.terms.get(tuple(e), self.tower.zero_raw))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            if other.tower != self.tower:
                try:
                    a, b = _common(self, other)
                except TowerError:
                    return False
                return a.terms == b.terms
            return self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self == MPoly.constant(self.tower, other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic ---------------------------------------------------------

    def _wrap(self, other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, (int, FieldElement)) or hasattr(other, "numerator"):
            return MPoly.constant(self.tower, other)
        return NotImplemented

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        a, b = _common(self, other)
        T = a.tower
        terms = dict(a.terms)
        for e, c in b.terms.items():
            if e in terms:
                s = T.add(terms[e], c)
                if T.is_zero(s):
                    del terms[e]
                else:
                    terms[e] = s
            else:
                terms[e] = c
        return MPoly(T, terms, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        T = self.tower
        return MPoly(T, {e: T.neg(c) for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if isinstance(other, (int, FieldElement)) or hasattr(other, "numerator"):
                return self.scale(other)
            return NotImplemented
        a, b = _common(self, other)
        T = a.tower
        if not a.terms or not b.terms:
            return MPoly(T, {}, _trusted=True)
        if (a.degree() or 0) + (b.degree() or 0) > MAX_DEGREE:
            raise ValueError("degree bound exceeded")
        if len(a.terms) < len(b.terms):
            a, b = b, a
        acc = {}
        if T.base is None:
            get = acc.get
            for (e0, e1, e2), c in b.terms.items():
                for (f0, f1, f2), d in a.terms.items():
                    k = (e0 + f0, e1 + f1, e2 + f2)
                    acc[k] = get(k, 0) + c * d
            return MPoly(T, {e: v for e, v in acc.items() if v}, _trusted=True)
        mul, add = T.mul, T.add
        for (e0, e1, e2), c in b.terms.items():
            for (f0, f1, f2), d in a.terms.items():
                k = (e0 + f0, e1 + f1, e2 + f2)
                p = mul(c, d)
                acc[k] = add(acc[k], p) if k in acc else p
        return MPoly(T, {e: v for e, v in acc.items() if not T.is_zero(v)}, _trusted=True)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> MPoly:
        T = self.tower
        if isinstance(c, FieldElement) and c.tower != T:
            if T.is_extension_of(c.tower):
                return MPoly(T, {e: T.mul_sub(v, c.raw, c.tower) for e, v in self.terms.items()},
                             _trusted=True)
            return self.embed(c.tower).scale(c)
        raw = _coerce_scalar(T, c)
        if T.is_zero(raw):
            return MPoly(T, {}, _trusted=True)
        return MPoly(T, {e: T.mul(v, raw) for e, v in self.terms.items()}, _trusted=True)

    def __truediv__(self, c):
        if isinstance(c, MPoly):
            return divide_exact(self, c)
        if not isinstance(c, FieldElement):
            c = self.tower(c)
        return self.scale(c.inverse())

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.tower, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def embed(self, tower: FieldTower) -> MPoly:
        """Same polynomial with coefficients viewed in an extension tower."""
        if tower == self.tower:
            return self
        if not tower.is_extension_of(self.tower):
            raise TowerError(f"{tower!r} does not extend {self.tower!r}")
        return MPoly(tower, {e: tower.embed_raw(c, self.tower) for e, c in self.terms.items()},
                     _trusted=True)

    def monic(self) -> MPoly:
        return self.scale(self.leading_coefficient().inverse())

    # -- calculus -----------------------------------------------------------

    def diff(self, var: int | str) -> MPoly:
        i = VARS.index(var) if isinstance(var, str) else var
        T = self.tower
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = T.scale(to_rational(e[i]), c)
        return MPoly(T, out, _trusted=True)

    def higher_partial(self, multi_index) -> MPoly:
        f = self
        for i, k in enumerate(multi_index):
            for _ in range(k):
                f = f.diff(i)
        return f

    def gradient(self):
        return (self.diff(0), self.diff(1), self.diff(2))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, *point):
        return evaluate(self, point)

    # -- text ---------------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        s = str(self)
        if len(s) > 80:
            s = s[:77] + "..."
        return f"MPoly({self.tower!r}, {s!r})"

    def content_hash(self) -> str:
        payload = repr(self.tower.key) + "|" + format_poly(self)
        return hashlib.sha256(payload.encode()).hexdigest()


def _common(a: MPoly, b: MPoly):
    if a.tower == b.tower:
        return a, b
    if a.tower.base is None and not a.terms:
        return MPoly(b.tower, {}, _trusted=True), b
    if b.tower.base is None and not b.terms:
        return a, MPoly(a.tower, {}, _trusted=True)
    # constants from QQ are always allowed in
    if a.tower.base is None and set(a.terms) <= {(0, 0, 0)}:
        return a.embed(b.tower), b
    if b.tower.base is None and set(b.terms) <= {(0, 0, 0)}:
        return a, b.embed(a.tower)
    raise TowerError(f"mixed towers {a.tower!r} and {b.tower!r}")


def format_poly(f: MPoly) -> str:
    if not f.terms:
        return "0"
    T = f.tower
    parts = []
    for e in f.monomials():
        c = f.terms[e]
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(VARS, e) if k)
        q = T.rational_part(c)
        if q is not None:
            if not mono:
                parts.append(str(q))
            elif q == 1:
                parts.append(mono)
            elif q == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{q}*{mono}")
        else:
            cs = f"({T.format_raw(c)})"
            parts.append(cs if not mono else f"{cs}*{mono}")
    return "+".join(parts).replace("+-", "-")


# -- evaluation ------------------------------------------------------------------

def _powers(T: FieldTower, a, n: int):
    out = [T.one_raw]
    for _ in range(n):
        out.append(T.mul(out[-1], a))
    return out


def evaluate_raw(f: MPoly, coords, T: FieldTower):
    """Value of ``f`` at raw coordinates lying in ``T`` (which extends f's tower)."""
    S = f.tower
    if not f.terms:
        return T.zero_raw
    rat = [T.rational_part(c) for c in coords]
    maxe = [max(e[i] for e in f.terms) for i in range(3)]
    # cheapest arrangement: a rational coordinate is folded into the scalar
    order = sorted(range(3), key=lambda i: (rat[i] is None, -maxe[i]))
    r, inner, outer = order
    rp = _powers(QQ, rat[r], maxe[r]) if rat[r] is not None else _powers(T, coords[r], maxe[r])
    ip = _powers(T, coords[inner], maxe[inner])
    op = _powers(T, coords[outer], maxe[outer])
    groups = {}
    add, mul = T.add, T.mul
    for e, c in f.terms.items():
        if rat[r] is not None:
            q = rp[e[r]]
            if not q:
                continue
            v = T.mul_sub(ip[e[inner]], S.scale(q, c) if S.base is not None else q * c, S)
        else:
            v = T.mul_sub(mul(rp[e[r]], ip[e[inner]]), c, S)
        k = e[outer]
        groups[k] = add(groups[k], v) if k in groups else v
    acc = T.zero_raw
    for k, v in groups.items():
        acc = add(acc, mul(op[k], v) if k else v)
    return acc


def evaluate(f: MPoly, point) -> FieldElement:
    """``f`` at a point given as coordinates (FieldElements or a ProjPoint)."""
    coords = getattr(point, "coords", point)
    towers = [c.tower for c in coords if isinstance(c, FieldElement)]
    T = f.tower
    for t in towers:
        if t.is_extension_of(T):
            T = t
        elif not T.is_extension_of(t):
            raise TowerError(f"point tower {t!r} incompatible with {T!r}")
    raw = []
    for c in coords:
        if isinstance(c, FieldElement):
            raw.append(T.embed_raw(c.raw, c.tower))
        else:
            raw.append(T(c).raw)
    return FieldElement(T, evaluate_raw(f, raw, T))


def vanishes_at(f: MPoly, point) -> bool:
    return evaluate(f, point).is_zero()


# -- composition -----------------------------------------------------------------

def substitute(f: MPoly, u: MPoly, v: MPoly, w: MPoly) -> MPoly:
    """``f(u, v, w)``; the three forms must be homogeneous of one degree."""
    degs = {g.degree() for g in (u, v, w) if not g.is_zero()}
    if len(degs) > 1 or not all(g.is_homogeneous() for g in (u, v, w)):
        raise ValueError("substituted forms must be homogeneous of equal degree")
    T = u.tower
    for g in (v, w):
        T = g.tower if g.tower.is_extension_of(T) else T
    T = f.tower if f.tower.is_extension_of(T) else T
    u, v, w, f = (g.embed(T) for g in (u, v, w, f))
    if not f.terms:
        return MPoly(T, {}, _trusted=True)
    maxe = [max(e[i] for e in f.terms) for i in range(3)]
    tables = [_poly_powers(g, n) for g, n in zip((u, v, w), maxe)]
    acc = MPoly(T, {}, _trusted=True)
    for e, c in f.terms.items():
        parts = sorted((tables[i][e[i]] for i in range(3)), key=len)
        term = parts[0] * parts[1] * parts[2]
        acc = _add_scaled(acc, term, c)
    return acc


def _poly_powers(g: MPoly, n: int):
    out = [MPoly.constant(g.tower, 1)]
    for _ in range(n):
        out.append(out[-1] * g)
    return out


def _add_scaled(acc: MPoly, g: MPoly, c) -> MPoly:
    # acc += c*g, in place on acc's dict
    T = acc.tower
    terms = acc.terms
    if T.base is None:
        for e, d in g.terms.items():
            s = terms.get(e, 0) + c * d
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return acc
    for e, d in g.terms.items():
        p = T.mul(c, d)
        s = T.add(terms[e], p) if e in terms else p
        if T.is_zero(s):
            terms.pop(e, None)
        else:
            terms[e] = s
    return acc


def linear_substitute(f: MPoly, matrix) -> MPoly:
    """``f`` composed with the linear map whose rows give x, y, z."""
    T = f.tower
    rows = []
    for row in matrix:
        vals = [c if isinstance(c, FieldElement) else T(c) for c in row]
        if vals and vals[0].tower.is_extension_of(T):
            T = vals[0].tower
        rows.append(vals)
    forms = [MPoly(T, {(1, 0, 0): r[0], (0, 1, 0): r[1], (0, 0, 1): r[2]}) for r in rows]
    return substitute(f, *forms)


# -- division --------------------------------------------------------------------

def divide_exact(f: MPoly, g: MPoly) -> MPoly:
    """Quotient ``q`` with ``f == q*g``; raises :class:`NotDivisible` otherwise."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    f, g = _common(f, g)
    T = f.tower
    lm = g.leading_monomial()
    lc_inv = T.inv(g.terms[lm])
    rem = dict(f.terms)
    heap = [(tuple(-k for k in grevlex_key(e)), e) for e in rem]
    heapq.heapify(heap)
    quot = {}
    gterms = list(g.terms.items())
    while rem:
        while True:
            _, e = heapq.heappop(heap)
            if e in rem:
                break
        if any(a < b for a, b in zip(e, lm)):
            raise NotDivisible((e, T.format_raw(rem[e])))
        q = T.mul(rem[e], lc_inv)
        s = (e[0] - lm[0], e[1] - lm[1], e[2] - lm[2])
        quot[s] = q
        for (a0, a1, a2), c in gterms:
            k = (a0 + s[0], a1 + s[1], a2 + s[2])
            d = T.mul(q, c)
            if k in rem:
                v = T.sub(rem[k], d)
                if T.is_zero(v):
                    del rem[k]
                else:
                    rem[k] = v
            else:
                rem[k] = T.neg(d)
                heapq.heappush(heap, (tuple(-x for x in grevlex_key(k)), k))
    return MPoly(T, quot, _trusted=True)


def divides(g: MPoly, f: MPoly) -> bool:
    try:
        divide_exact(f, g)
    except NotDivisible:
        return False
    return True


def proportional(f, g) -> FieldElement:
    """Scalar ``lam`` with ``f == lam * g``; raises :class:`NotProportional`."""
    if isinstance(f, BinaryForm):
        return f.proportional(g)
    f, g = _common(f, g)
    if f.is_zero() or g.is_zero():
        raise ValueError("proportionality needs nonzero inputs")
    if set(f.terms) != set(g.terms):
        raise NotProportional("different supports")
    T = f.tower
    e = next(iter(f.terms))
    lam = T.mul(f.terms[e], T.inv(g.terms[e]))
    for k, c in g.terms.items():
        if T.mul(lam, c) != f.terms[k]:
            raise NotProportional(f"coefficient mismatch at {k}")
    return FieldElement(T, lam)


def is_proportional(f, g) -> bool:
    try:
        proportional(f, g)
    except NotProportional:
        return False
    return True


# -- binary forms and lines --------------------------------------------------------

@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form in (s, u): ``coeffs[i]`` multiplies ``s^(d-i) u^i``.

    ``chart`` records the two points of the line used as s- and u-directions
    when the form comes from :func:`restrict_to_line`.
    """

    tower: FieldTower
    degree: int
    coeffs: tuple
    chart: tuple = ()

    def is_zero(self) -> bool:
        return all(self.tower.is_zero(c) for c in self.coeffs)

    def coefficient(self, i) -> FieldElement:
        return FieldElement(self.tower, self.coeffs[i])

    def values(self):
        return [FieldElement(self.tower, c) for c in self.coeffs]

    def proportional(self, other: BinaryForm) -> FieldElement:
        if self.degree != other.degree or self.tower != other.tower:
            raise NotProportional("degree or tower mismatch")
        T = self.tower
        if self.is_zero() or other.is_zero():
            raise ValueError("proportionality needs nonzero inputs")
        lam = None
        for a, b in zip(self.coeffs, other.coeffs):
            if T.is_zero(a) != T.is_zero(b):
                raise NotProportional("different supports")
            if not T.is_zero(b):
                r = T.mul(a, T.inv(b))
                if lam is None:
                    lam = r
                elif r != lam:
                    raise NotProportional("coefficient ratio mismatch")
        return FieldElement(T, lam)

    def __str__(self):
        d = self.degree
        T = self.tower
        parts = []
        for i, c in enumerate(self.coeffs):
            if T.is_zero(c):
                continue
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in (("s", d - i), ("u", i)) if k)
            parts.append(f"({T.format_raw(c)})" + (f"*{mono}" if mono else ""))
        return "+".join(parts) or "0"


def _bin_mul(T, a, b):
    out = [T.zero_raw] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if T.is_zero(x):
            continue
        for j, y in enumerate(b):
            if not T.is_zero(y):
                out[i + j] = T.add(out[i + j], T.mul(x, y))
    return out


def line_chart(L: MPoly):
    """Two points spanning V(L): unit vectors on the coordinates other than the
    last one where L has a nonzero coefficient, corrected along that one."""
    if L.is_zero() or L.degree() != 1 or not L.is_homogeneous():
        raise ValueError("need a nonzero linear form")
    T = L.tower
    coef = [L.coefficient(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    k = max(i for i in range(3) if not coef[i].is_zero())
    pts = []
    for j in range(3):
        if j == k:
            continue
        p = [T.zero(), T.zero(), T.zero()]
        p[j] = T.one()
        p[k] = -coef[j] / coef[k]
        pts.append(tuple(p))
    return tuple(pts)


def restrict_to_line(f: MPoly, L: MPoly) -> BinaryForm:
    """``f`` pulled back along ``[s:u] -> s*P + u*Q`` for the chart of V(L)."""
    P, Q = line_chart(L)
    T = L.tower if L.tower.is_extension_of(f.tower) else f.tower
    f = f.embed(T)
    P = tuple(T.embed(c) for c in P)
    Q = tuple(T.embed(c) for c in Q)
    d = f.degree()
    if d is None:
        return BinaryForm(T, 0, (), (P, Q))
    # linear binary forms in the (s^1 u^0, s^0 u^1) basis
    lin = [[P[i].raw, Q[i].raw] for i in range(3)]
    maxe = [max(e[i] for e in f.terms) for i in range(3)]
    tables = []
    for i in range(3):
        tab = [[T.one_raw]]
        for _ in range(maxe[i]):
            tab.append(_bin_mul(T, tab[-1], lin[i]))
        tables.append(tab)
    acc = [T.zero_raw] * (d + 1)
    for e, c in f.terms.items():
        prod = _bin_mul(T, _bin_mul(T, tables[0][e[0]], tables[1][e[1]]), tables[2][e[2]])
        off = d - sum(e)
        for i, v in enumerate(prod):
            acc[i + off] = T.add(acc[i + off], T.mul(c, v))
    return BinaryForm(T, d, tuple(acc), (P, Q))


def binary_discriminant(q: BinaryForm) -> FieldElement:
    if q.degree != 2:
        raise ValueError("discriminant needs a binary quadratic")
    a, b, c = q.values()
    return b * b - 4 * a * c


def binary_roots_chart(q: BinaryForm, ext: FieldTower, root: FieldElement):
    """Both roots of a binary quadratic given a square root of its
    discriminant in ``ext``; returned as points of P^2 via the chart."""
    a, b, c = (ext.embed(v) for v in q.values())
    P, Q = q.chart
    P = [ext.embed(v) for v in P]
    Q = [ext.embed(v) for v in Q]
    out = []
    for sign in (1, -1):
        if not a.is_zero():
            # s/u = (-b +- root) / (2a)
            s, u = -b + sign * root, 2 * a
        else:
            # a == 0: roots [1:0] and [-c:b]
            s, u = (ext.one(), ext.zero()) if sign == 1 else (-c, b)
        out.append(tuple(s * P[i] + u * Q[i] for i in range(3)))
    return out
