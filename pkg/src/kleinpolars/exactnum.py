"""Exact arithmetic in towers of number fields.

A tower starts at QQ and each level adjoins a root of a monic polynomial
over the previous level.  Elements are stored as flat tuples of ``gmpy2.mpq``
(the rational coordinates in the power basis of the whole tower); QQ itself
stores bare ``mpq`` values.  Level ``k`` splits its flat vector into
``degree_k`` consecutive blocks, each an element of level ``k - 1``.
"""

from __future__ import annotations

import ast
import itertools
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

BigRational = mpq

ZERO = mpq(0)
ONE = mpq(1)


class TowerError(ValueError):
    pass


def to_rational(value) -> mpq:
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


class FieldTower:
    """QQ or an extension of another tower by one monic modulus.

    Use :data:`QQ` for the rationals and :func:`tower_extend` to build
    extensions.  Towers compare structurally: two independently-built towers
    with the same generator names and moduli are equal.
    """

    def __init__(self, base: FieldTower | None = None, name: str | None = None,
                 modulus: tuple = (), meta: dict | None = None):
        self.base = base
        self.name = name
        self.modulus = tuple(modulus)
        self.meta = dict(meta or {})
        if base is None:
            self.degree = 1
            self.size = 1
            self.depth = 0
            self.names = ()
            self.key = ("QQ",)
        else:
            self.degree = len(self.modulus) - 1
            self.size = base.size * self.degree
            self.depth = base.depth + 1
            self.names = base.names + (name,)
            self.key = base.key + ((name, tuple(base.format_raw(c) for c in self.modulus)),)
        self.zero_raw = ZERO if base is None else (ZERO,) * self.size
        self.one_raw = ONE if base is None else self.from_base_raw(base.one_raw)

    # -- structure ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.base is None:
            return "QQ"
        return f"{self.base!r}[{self.name}]"

    def levels(self) -> list[FieldTower]:
        out = []
        t = self
        while t.base is not None:
            out.append(t)
            t = t.base
        return out[::-1]

    def is_extension_of(self, other: FieldTower) -> bool:
        t = self
        while t is not None:
            if t == other:
                return True
            t = t.base
        return False

    def descriptor(self) -> list:
        """JSON-friendly description: one entry per level above QQ."""
        return [
            {"name": lvl.name,
             "modulus": [lvl.base.format_raw(c) for c in lvl.modulus],
             **({"meta": lvl.meta} if lvl.meta else {})}
            for lvl in self.levels()
        ]

    @classmethod
    def from_descriptor(cls, desc: list) -> FieldTower:
        t = QQ
        for level in desc:
            coeffs = [t.parse(c).raw for c in level["modulus"]]
            t = FieldTower(t, level["name"], coeffs, level.get("meta"))
        return t

    # -- raw arithmetic -----------------------------------------------------

    def from_base_raw(self, b):
        """Embed a raw element of ``self.base``."""
        if self.base.base is None:
            return (b,) + (ZERO,) * (self.size - 1)
        return tuple(b) + (ZERO,) * (self.size - self.base.size)

    def embed_raw(self, raw, source: FieldTower):
        """Embed a raw element of a tower that ``self`` extends."""
        if source == self:
            return raw
        if source.base is None:
            if self.base is None:
                return raw
            return (raw,) + (ZERO,) * (self.size - 1)
        if not self.is_extension_of(source):
            raise TowerError(f"{source!r} is not a subfield of {self!r}")
        return tuple(raw) + (ZERO,) * (self.size - source.size)

    def blocks(self, a):
        m = self.base.size
        if m == 1:
            return list(a)
        return [a[i * m:(i + 1) * m] for i in range(self.degree)]

    def _join(self, blocks):
        if self.base.size == 1:
            return tuple(blocks)
        return tuple(itertools.chain.from_iterable(blocks))

    def add(self, a, b):
        if self.base is None:
            return a + b
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        if self.base is None:
            return a - b
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        if self.base is None:
            return -a
        return tuple(-x for x in a)

    def scale(self, q: mpq, a):
        """Multiply by a rational."""
        if self.base is None:
            return q * a
        return tuple(q * x for x in a)

    def is_zero(self, a) -> bool:
        if self.base is None:
            return not a
        return not any(a)

    def mul(self, a, b):
        if self.base is None:
            return a * b
        n = self.degree
        mod = self.modulus
        if self.base.base is None:
            prod = [ZERO] * (2 * n - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        if bj:
                            prod[i + j] += ai * bj
            for k in range(2 * n - 2, n - 1, -1):
                c = prod[k]
                if c:
                    off = k - n
                    for l in range(n):
                        ml = mod[l]
                        if ml:
                            prod[off + l] -= c * ml
            return tuple(prod[:n])
        B = self.base
        zero = B.zero_raw
        ab = self.blocks(a)
        bb = self.blocks(b)
        prod = [zero] * (2 * n - 1)
        for i, ai in enumerate(ab):
            if B.is_zero(ai):
                continue
            for j, bj in enumerate(bb):
                if not B.is_zero(bj):
                    prod[i + j] = B.add(prod[i + j], B.mul(ai, bj))
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if not B.is_zero(c):
                off = k - n
                for l in range(n):
                    if not B.is_zero(mod[l]):
                        prod[off + l] = B.sub(prod[off + l], B.mul(c, mod[l]))
        return self._join(prod[:n])

    def mul_sub(self, a, raw_sub, source: FieldTower):
        """Multiply ``a`` (in self) by an element of a subfield ``source``."""
        if source.base is None:
            return self.scale(raw_sub, a)
        if source == self:
            return self.mul(a, raw_sub)
        m = source.size
        return tuple(itertools.chain.from_iterable(
            source.mul(a[i:i + m], raw_sub) for i in range(0, self.size, m)))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one_raw
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero field element")
        if self.base is None:
            return 1 / a
        if self.degree == 2:
            # (a0 + a1 t)(a0 + a1 t') lies in the base, t' = -p - t
            B = self.base
            q, p = self.modulus[0], self.modulus[1]
            a0, a1 = self.blocks(a)
            norm = B.add(B.sub(B.mul(a0, a0), B.mul(p, B.mul(a0, a1))), B.mul(q, B.mul(a1, a1)))
            if B.is_zero(norm):
                raise ZeroDivisionError("zero divisor: modulus is reducible")
            ninv = B.inv(norm)
            return self._join([B.mul(B.sub(a0, B.mul(p, a1)), ninv), B.neg(B.mul(a1, ninv))])
        return self._inv_linear(a)

    def _inv_linear(self, a):
        # Solve (multiplication by a) x = 1 over QQ on the flat basis.
        N = self.size
        cols = []
        for j in range(N):
            e = [ZERO] * N
            e[j] = ONE
            cols.append(self.mul(a, tuple(e)))
        rows = [[cols[j][i] for j in range(N)] + [ONE if i == 0 else ZERO] for i in range(N)]
        for c in range(N):
            piv = next((r for r in range(c, N) if rows[r][c]), None)
            if piv is None:
                raise ZeroDivisionError("zero divisor: modulus is reducible")
            rows[c], rows[piv] = rows[piv], rows[c]
            pinv = 1 / rows[c][c]
            rows[c] = [v * pinv for v in rows[c]]
            for r in range(N):
                if r != c and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[c])]
        return tuple(rows[i][N] for i in range(N))

    def rational_part(self, a):
        """The rational value of ``a`` if it lies in QQ, else None."""
        if self.base is None:
            return a
        if any(a[1:]):
            return None
        return a[0]

    # -- element constructors -----------------------------------------------

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.tower == self:
                return value
            if value.tower.base is None:
                return FieldElement(self, self.embed_raw(value.raw, QQ))
            raise TowerError(f"no implicit coercion from {value.tower!r} to {self!r}")
        q = to_rational(value)
        return FieldElement(self, q if self.base is None else self.embed_raw(q, QQ))

    def embed(self, element: FieldElement) -> FieldElement:
        """Explicit embedding of an element of a subfield, or of a tower whose
        generators all appear (same name, same modulus) in ``self``."""
        src = element.tower
        if src == self:
            return element
        if self.is_extension_of(src):
            return FieldElement(self, self.embed_raw(element.raw, src))
        return self._rebase(element)

    def _rebase(self, element: FieldElement) -> FieldElement:
        src = element.tower
        if src.base is None:
            return self(element)
        gen = self.generator(src.name)
        lvl_here = next(l for l in self.levels() if l.name == src.name)
        for c_src, c_here in zip(src.modulus, lvl_here.modulus):
            mapped = self._rebase(FieldElement(src.base, c_src))
            if mapped != self.embed(FieldElement(lvl_here.base, c_here)):
                raise TowerError(f"generator {src.name!r} has a different modulus in {self!r}")
        acc = self.zero()
        for block in reversed(src.blocks(element.raw)):
            acc = acc * gen + self._rebase(FieldElement(src.base, block))
        return acc

    def zero(self) -> FieldElement:
        return FieldElement(self, self.zero_raw)

    def one(self) -> FieldElement:
        return FieldElement(self, self.one_raw)

    def generator(self, name: str | None = None) -> FieldElement:
        """The adjoined root named ``name`` (default: the top level)."""
        if self.base is None:
            raise TowerError("QQ has no generator")
        name = self.name if name is None else name
        if name == self.name:
            blocks = [self.base.zero_raw] * self.degree
            blocks[1] = self.base.one_raw
            return FieldElement(self, self._join(blocks))
        return self.embed(self.base.generator(name))

    def element(self, coeffs) -> FieldElement:
        """Element from its flat rational coordinate vector."""
        if self.base is None:
            (c,) = coeffs if isinstance(coeffs, (list, tuple)) else (coeffs,)
            return FieldElement(self, to_rational(c))
        coeffs = tuple(to_rational(c) for c in coeffs)
        if len(coeffs) != self.size:
            raise TowerError(f"expected {self.size} coordinates, got {len(coeffs)}")
        return FieldElement(self, coeffs)

    # -- text ---------------------------------------------------------------

    def _monomials(self):
        # flat index -> exponent tuple (e_1, ..., e_k), e_1 least significant
        degs = [lvl.degree for lvl in self.levels()]
        out = []
        for idx in range(self.size):
            exps = []
            r = idx
            for d in degs:
                exps.append(r % d)
                r //= d
            out.append(tuple(exps))
        return out

    def format_raw(self, a) -> str:
        if self.base is None:
            return str(a)
        names = self.names
        terms = []
        for idx in reversed(range(self.size)):
            c = a[idx]
            if not c:
                continue
            exps = self._monomial_cache()[idx]
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in reversed(list(zip(names, exps))) if e)
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        return "+".join(terms).replace("+-", "-")

    def _monomial_cache(self):
        cache = self.__dict__.get("_mono")
        if cache is None:
            cache = self.__dict__["_mono"] = self._monomials()
        return cache

    def parse(self, text: str) -> FieldElement:
        """Parse the textual syntax, e.g. ``1/7*(2*z7^4+2*z7^2+2*z7+1)``."""
        names = {n: self.generator(n) for n in self.names}
        return evaluate_expression(text, names, self)

    def format(self, element: FieldElement) -> str:
        return self.format_raw(self(element).raw)


QQ = FieldTower()


class FieldElement:
    """Immutable element of a :class:`FieldTower`."""

    __slots__ = ("tower", "raw")

    def __init__(self, tower: FieldTower, raw):
        self.tower = tower
        self.raw = raw

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.tower == self.tower:
                return other.raw
            if other.tower.base is None:
                return self.tower.embed_raw(other.raw, QQ)
            if self.tower.base is None:
                return NotImplemented
            raise TowerError(f"mixed towers {self.tower!r} and {other.tower!r}")
        try:
            q = to_rational(other)
        except TypeError:
            return NotImplemented
        return self.tower.embed_raw(q, QQ)

    def _lift(self, other):
        # QQ element combined with an element of a proper tower
        return other.tower(self)

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return self._lift(other) + other if isinstance(other, FieldElement) else NotImplemented
        return FieldElement(self.tower, self.tower.add(self.raw, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return self._lift(other) - other if isinstance(other, FieldElement) else NotImplemented
        return FieldElement(self.tower, self.tower.sub(self.raw, b))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return self._lift(other) * other if isinstance(other, FieldElement) else NotImplemented
        return FieldElement(self.tower, self.tower.mul(self.raw, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return self._lift(other) / other if isinstance(other, FieldElement) else NotImplemented
        return FieldElement(self.tower, self.tower.mul(self.raw, self.tower.inv(b)))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __neg__(self):
        return FieldElement(self.tower, self.tower.neg(self.raw))

    def __pow__(self, e: int):
        return FieldElement(self.tower, self.tower.pow(self.raw, int(e)))

    def inverse(self) -> FieldElement:
        return FieldElement(self.tower, self.tower.inv(self.raw))

    def __eq__(self, other):
        if isinstance(other, FieldElement) and other.tower != self.tower:
            if other.tower.base is None or self.tower.base is None:
                return self.tower.embed_raw(other.raw, other.tower) == self.raw \
                    if other.tower.base is None else other == self
            return False
        try:
            b = self._coerce(other)
        except TowerError:
            return False
        if b is NotImplemented:
            return False
        return self.raw == b

    def __hash__(self):
        q = self.tower.rational_part(self.raw)
        if q is not None:
            return hash(q)
        return hash(self.raw)

    def __bool__(self):
        return not self.tower.is_zero(self.raw)

    def is_zero(self) -> bool:
        return self.tower.is_zero(self.raw)

    def is_rational(self) -> bool:
        return self.tower.rational_part(self.raw) is not None

    def to_rational(self) -> mpq:
        q = self.tower.rational_part(self.raw)
        if q is None:
            raise TowerError(f"{self} is not rational")
        return q

    def coordinates(self) -> tuple:
        if self.tower.base is None:
            return (self.raw,)
        return self.raw

    def __str__(self):
        return self.tower.format_raw(self.raw)

    def __repr__(self):
        return f"FieldElement({self.tower!r}, {str(self)!r})"


# -- tower construction ------------------------------------------------------

def tower_extend(base: FieldTower, name: str, modulus, meta: dict | None = None) -> FieldTower:
    """Adjoin a root ``name`` of the monic ``modulus`` to ``base``.

    ``modulus`` is a low-to-high coefficient list (ints, rationals, strings in
    the element syntax, or FieldElements of ``base``).  Quadratic moduli are
    checked for irreducibility; higher degrees are taken on trust and the
    tower records that in its metadata.
    """
    if name in base.names:
        raise TowerError(f"generator name {name!r} already used")
    coeffs = []
    for c in modulus:
        if isinstance(c, str):
            c = base.parse(c)
        coeffs.append(base(c) if not isinstance(c, FieldElement) or c.tower != base else c)
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 2:
        raise TowerError(f"modulus must have degree >= 2, got degree {deg}")
    if coeffs[-1] != base.one():
        raise TowerError("modulus must be monic")
    meta = dict(meta or {})
    if deg == 2:
        c0, c1 = coeffs[0], coeffs[1]
        disc = c1 * c1 - 4 * c0
        root = sqrt(disc)
        if root is not None:
            found = (-c1 + root) / 2
            raise TowerError(f"reducible quadratic modulus: root {found} in base")
        meta.setdefault("irreducible", "verified")
        cert = nonsquare_certificate(disc)
        if cert is not None:
            meta.setdefault("nonsquare_witness", cert)
    else:
        meta.setdefault("irreducible", "assumed")
    return FieldTower(base, name, tuple(c.raw for c in coeffs), meta)


def cyclotomic7() -> FieldTower:
    """QQ(zeta_7) with generator ``z7``."""
    return tower_extend(QQ, "z7", [1, 1, 1, 1, 1, 1, 1],
                        meta={"irreducible": "7th cyclotomic polynomial"})


def cube_root_field(base: FieldTower = QQ, name: str = "w") -> FieldTower:
    """``base`` with a primitive cube root of unity adjoined."""
    return tower_extend(base, name, [1, 1, 1])


# -- square roots ------------------------------------------------------------

def _rational_sqrt(q: mpq):
    if q < 0:
        return None
    n, d = gmpy2.numer(q), gmpy2.denom(q)
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


def _primes(start=3):
    p = mpz(start)
    while True:
        p = gmpy2.next_prime(p)
        yield int(p)


def _poly_roots_mod(coeffs, p):
    # brute-force roots of a low-to-high integer polynomial over F_p
    roots = []
    for r in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * r + c) % p
        if acc == 0:
            roots.append(r)
    return roots


def _reduce_rational(q: mpq, p: int):
    d = int(gmpy2.denom(q))
    if d % p == 0:
        return None
    return int(gmpy2.numer(q)) * pow(d, -1, p) % p


def residue_homs(tower: FieldTower, p: int):
    """All ring maps from (the integral part of) ``tower`` to F_p, as lists of
    generator images, one list per map.  Maps are built level by level from
    roots of the reduced moduli."""
    homs = [[]]
    for lvl in tower.levels():
        nxt = []
        for images in homs:
            coeffs = []
            ok = True
            for c in lvl.modulus:
                v = _eval_mod(lvl.base, c, images, p)
                if v is None:
                    ok = False
                    break
                coeffs.append(v)
            if not ok:
                continue
            for r in _poly_roots_mod(coeffs, p):
                nxt.append(images + [r])
        homs = nxt
    return homs


def _eval_mod(tower: FieldTower, raw, images, p):
    if tower.base is None:
        return _reduce_rational(raw, p)
    acc = 0
    g = images[tower.depth - 1]
    for block in reversed(tower.blocks(raw)):
        v = _eval_mod(tower.base, block, images, p)
        if v is None:
            return None
        acc = (acc * g + v) % p
    return acc


def nonsquare_certificate(element: FieldElement, max_primes: int = 60):
    """Find a residue map sending ``element`` to a nonzero non-square.

    Returns ``{"prime": p, "images": [...]}`` or None.  Such a map proves the
    element is not a square in its field, since squares map to squares.
    """
    t = element.tower
    if t.base is None:
        return None
    for p, _ in zip(_primes(), range(max_primes)):
        for images in residue_homs(t, p):
            v = _eval_mod(t, element.raw, images, p)
            if v is not None and v != 0 and pow(v, (p - 1) // 2, p) == p - 1:
                return {"prime": p, "images": images}
    return None


def sqrt(element: FieldElement) -> FieldElement | None:
    """A square root of ``element`` inside its own field, or None."""
    t = element.tower
    if element.is_zero():
        return element
    if t.base is None:
        r = _rational_sqrt(element.raw)
        return None if r is None else FieldElement(t, r)
    if nonsquare_certificate(element) is not None:
        return None
    r = _padic_sqrt(element)
    if r is None:
        raise TowerError(f"could not decide whether {element} is a square")
    return r


def _split_primes(tower: FieldTower, bad: int):
    for p in _primes(50):
        if bad % p == 0:
            continue
        homs = residue_homs(tower, p)
        if len(homs) == tower.size:
            yield p, homs


def _hensel_root(f_int, r, p, k):
    # lift a simple root r of integer poly f (low-to-high) to Z/p^k
    pk = p ** k
    mod = p
    while True:
        mod = min(mod * mod, pk)
        fr = 0
        dfr = 0
        for c in reversed(f_int):
            dfr = (dfr * r + fr) % mod
            fr = (fr * r + c) % mod
        r = (r - fr * pow(dfr, -1, mod)) % mod
        if mod == pk:
            return r


def _padic_sqrt(element: FieldElement, attempts: int = 3):
    """Square root by lifting at a completely split prime.

    Each embedding into Z/p^k gives a square root up to sign; a sign pattern
    is accepted only if the interpolated coordinates reconstruct to
    rationals whose square is exactly ``element``.
    """
    t = element.tower
    bad = 2
    for lvl in t.levels():
        for c in lvl.modulus:
            for q in (c if lvl.base.base is not None else (c,)):
                bad *= int(gmpy2.denom(q))
    for q in element.raw:
        bad *= int(gmpy2.denom(q))
    height = max(abs(int(gmpy2.numer(q))) + int(gmpy2.denom(q)) for q in element.raw)
    for (p, homs), _ in zip(_split_primes(t, bad), range(attempts)):
        images0 = [_eval_mod(t, element.raw, h, p) for h in homs]
        if any(v == 0 or pow(v, (p - 1) // 2, p) != 1 for v in images0):
            continue
        k = 4 * (height.bit_length() + 32) // p.bit_length() + 8
        for _ in range(3):
            found = _padic_sqrt_at(element, p, homs, k)
            if found is not None:
                return found
            k *= 2
    return None


def _padic_sqrt_at(element, p, homs, k):
    t = element.tower
    pk = p ** k
    lifted = [_lift_hom(t, images, p, k) for images in homs]
    monos = t._monomial_cache()
    M = [[_prod_pow(emb, e, pk) for e in monos] for emb in lifted]
    Minv = _matinv_mod(M, pk)
    vals = []
    for emb in lifted:
        s = _sqrt_mod_pk(_eval_mod_lifted(t, element.raw, emb, pk), p, k)
        if s is None:
            return None
        vals.append(s)
    for signs in itertools.product((1, -1), repeat=len(vals) - 1):
        vec = [vals[0]] + [s * v % pk for s, v in zip(signs, vals[1:])]
        coords = []
        for row in Minv:
            q = _rational_reconstruct(sum(a * b for a, b in zip(row, vec)) % pk, pk)
            if q is None:
                break
            coords.append(q)
        else:
            cand = FieldElement(t, tuple(coords))
            if cand * cand == element:
                return cand
    return None


def _lift_hom(t: FieldTower, images, p, k):
    pk = p ** k
    lifted = []
    for lvl, r in zip(t.levels(), images):
        coeffs = [_eval_mod_lifted(lvl.base, c, lifted, pk) for c in lvl.modulus]
        lifted.append(_hensel_root(coeffs, r, p, k))
    return lifted


def _eval_mod_lifted(tower, raw, images, pk):
    if tower.base is None:
        return int(gmpy2.numer(raw)) * pow(int(gmpy2.denom(raw)), -1, pk) % pk
    acc = 0
    g = images[tower.depth - 1]
    for block in reversed(tower.blocks(raw)):
        acc = (acc * g + _eval_mod_lifted(tower.base, block, images, pk)) % pk
    return acc


def _prod_pow(images, exps, pk):
    acc = 1
    for g, e in zip(images, exps):
        acc = acc * pow(g, e, pk) % pk
    return acc


def _matinv_mod(M, pk):
    n = len(M)
    rows = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if gmpy2.gcd(rows[r][c], pk) == 1)
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = pow(rows[c][c], -1, pk)
        rows[c] = [v * inv % pk for v in rows[c]]
        for r in range(n):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [(v - f * w) % pk for v, w in zip(rows[r], rows[c])]
    return [r[n:] for r in rows]


def _sqrt_mod_pk(v, p, k):
    pk = p ** k
    v %= pk
    if v % p == 0:
        return None
    r0 = next((r for r in range(p) if (r * r - v) % p == 0), None)
    if r0 is None:
        return None
    return _hensel_root([-v, 0, 1], r0, p, k)


def _rational_reconstruct(c, m):
    # find a/b == c mod m with |a|, b < sqrt(m/2)
    bound = gmpy2.isqrt(m // 2)
    r0, r1 = m, c
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gmpy2.gcd(s1, m) != 1:
        return None
    return mpq(r1 * (1 if s1 > 0 else -1), abs(s1))


# -- expression parsing ------------------------------------------------------

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def evaluate_expression(text: str, names: dict, const):
    """Evaluate an arithmetic expression over ``+ - * / ^`` and parentheses.

    ``names`` maps identifiers to values supporting arithmetic; ``const``
    turns integer literals into values.  Nothing else is accepted.
    """
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown symbol {node.id!r}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            if isinstance(node.op, ast.Pow):
                e = node.right
                sign = 1
                if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                    sign, e = -1, e.operand
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise ValueError("exponents must be integer literals")
                return ev(node.left) ** (sign * e.value)
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            return a / b
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(tree)
