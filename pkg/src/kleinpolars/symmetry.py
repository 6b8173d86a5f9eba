"""Klein's group as 3x3 matrices over QQ(zeta_7): closure, involutions,
orbits, invariance and orbit classification."""

from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass

from .exactnum import QQ, FieldElement, FieldTower, TowerError, cyclotomic7
from .mpoly import MPoly, evaluate, linear_substitute, NotProportional, proportional

log = logging.getLogger(__name__)

GROUP_ORDER = 168


class GroupError(RuntimeError):
    pass


class ProjPoint:
    """Point of P^2 with the first nonzero coordinate scaled to 1."""

    __slots__ = ("tower", "coords", "_key")

    def __init__(self, coords, tower: FieldTower | None = None):
        if tower is None:
            tower = next((c.tower for c in coords if isinstance(c, FieldElement)), QQ)
            for c in coords:
                if isinstance(c, FieldElement) and c.tower.is_extension_of(tower):
                    tower = c.tower
        vals = [tower.embed(c) if isinstance(c, FieldElement) else tower(c) for c in coords]
        lead = next((v for v in vals if not v.is_zero()), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        if lead != tower.one():
            inv = lead.inverse()
            vals = [v * inv for v in vals]
        self.tower = tower
        self.coords = tuple(vals)
        self._key = tuple(v.raw for v in vals)

    @classmethod
    def _from_raw(cls, tower, raw):
        T = tower
        lead = next((r for r in raw if not T.is_zero(r)), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        if lead != T.one_raw:
            inv = T.inv(lead)
            raw = tuple(T.mul(r, inv) for r in raw)
        p = cls.__new__(cls)
        p.tower = T
        p.coords = tuple(FieldElement(T, r) for r in raw)
        p._key = tuple(raw)
        return p

    def embed(self, tower: FieldTower) -> ProjPoint:
        if tower == self.tower:
            return self
        return ProjPoint._from_raw(tower, tuple(tower.embed_raw(r, self.tower) for r in self._key))

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.tower != other.tower:
            if self.tower.is_extension_of(other.tower):
                other = other.embed(self.tower)
            elif other.tower.is_extension_of(self.tower):
                return self.embed(other.tower) == other
            else:
                return False
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __iter__(self):
        return iter(self.coords)

    def __str__(self):
        return "[" + " : ".join(str(c) for c in self.coords) + "]"

    def __repr__(self):
        return f"ProjPoint({self})"

    def text(self) -> list:
        return [str(c) for c in self.coords]


class ProjMatrix:
    """3x3 matrix acting on column vectors: ``p -> M p``."""

    __slots__ = ("tower", "rows", "_key")

    def __init__(self, tower: FieldTower, rows):
        self.tower = tower
        self.rows = tuple(tuple(tower(c).raw if not isinstance(c, FieldElement) or c.tower != tower
                                else c.raw for c in row) for row in rows)
        self._key = self.rows

    @classmethod
    def _raw(cls, tower, rows):
        m = cls.__new__(cls)
        m.tower = tower
        m.rows = rows
        m._key = rows
        return m

    @classmethod
    def identity(cls, tower):
        o, z = tower.one_raw, tower.zero_raw
        return cls._raw(tower, ((o, z, z), (z, o, z), (z, z, o)))

    def entry(self, i, j) -> FieldElement:
        return FieldElement(self.tower, self.rows[i][j])

    def __mul__(self, other: ProjMatrix) -> ProjMatrix:
        T = self.tower
        add, mul = T.add, T.mul
        cols = list(zip(*other.rows))
        rows = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = mul(r[0], c[0])
                acc = add(acc, mul(r[1], c[1]))
                acc = add(acc, mul(r[2], c[2]))
                row.append(acc)
            rows.append(tuple(row))
        return ProjMatrix._raw(T, tuple(rows))

    def __eq__(self, other):
        return isinstance(other, ProjMatrix) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def transpose(self) -> ProjMatrix:
        return ProjMatrix._raw(self.tower, tuple(zip(*self.rows)))

    def det(self) -> FieldElement:
        e = self.entry
        return (e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0)))

    def inverse(self) -> ProjMatrix:
        e = self.entry
        d = self.det().inverse()
        cof = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                minor = e(r[0], c[0]) * e(r[1], c[1]) - e(r[0], c[1]) * e(r[1], c[0])
                cof[j][i] = minor * d if (i + j) % 2 == 0 else -minor * d
        return ProjMatrix(self.tower, cof)

    def is_identity(self) -> bool:
        return self == ProjMatrix.identity(self.tower)

    def apply(self, point) -> ProjPoint:
        """Image ``M p`` of a point whose tower extends the matrix tower."""
        P = point if isinstance(point, ProjPoint) else ProjPoint(point)
        T = P.tower
        K = self.tower
        raw = P._key
        out = []
        for row in self.rows:
            acc = T.zero_raw
            for m, c in zip(row, raw):
                if not K.is_zero(m) and not T.is_zero(c):
                    acc = T.add(acc, T.mul_sub(c, m, K))
            out.append(acc)
        return ProjPoint._from_raw(T, tuple(out))

    def act_on_form(self, f: MPoly) -> MPoly:
        """Image of V(f) under the matrix: the form ``f o M^{-1}``."""
        inv = self.inverse()
        return linear_substitute(f.embed(self.tower) if self.tower.is_extension_of(f.tower) else f,
                                 [[inv.entry(i, j) for j in range(3)] for i in range(3)])

    def text(self) -> list:
        return [[self.tower.format_raw(c) for c in row] for row in self.rows]

    def __str__(self):
        return "\n".join("[" + ", ".join(r) + "]" for r in self.text())


@dataclass(frozen=True)
class Homology:
    matrix: ProjMatrix
    center: ProjPoint
    axis: MPoly


class GroupTable:
    """The group as an ordered tuple of matrices (BFS order from the generators)."""

    def __init__(self, tower, elements, generators, words=None):
        self.tower = tower
        self.elements = tuple(elements)
        self.generators = dict(generators)
        self.words = dict(words or {})
        self.index = {m: i for i, m in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, m):
        return m in self.index

    def dump(self) -> dict:
        mats = [m.text() for m in self.elements]
        body = repr(mats).encode()
        return {"tower": self.tower.descriptor(), "order": len(mats), "matrices": mats,
                "sha256": hashlib.sha256(body).hexdigest()}

    @classmethod
    def from_dump(cls, data: dict) -> GroupTable:
        T = FieldTower.from_descriptor(data["tower"])
        mats = [ProjMatrix(T, [[T.parse(c) for c in row] for row in m]) for m in data["matrices"]]
        body = repr([m.text() for m in mats]).encode()
        if hashlib.sha256(body).hexdigest() != data["sha256"]:
            raise GroupError("group cache hash mismatch")
        gens = klein_generators(T)
        return cls(T, mats, gens)


def klein_generators(K: FieldTower | None = None) -> dict:
    """rho(g), rho(h), rho(i) over QQ(zeta_7)."""
    K = K or cyclotomic7()
    z = K.generator()
    zero, one = K.zero(), K.one()
    g = ProjMatrix(K, [[z ** 4, zero, zero], [zero, z ** 2, zero], [zero, zero, z]])
    h = ProjMatrix(K, [[zero, one, zero], [zero, zero, one], [one, zero, zero]])
    a = z - z ** 6
    b = z ** 2 - z ** 5
    c = z ** 4 - z ** 3
    s = (2 * z ** 4 + 2 * z ** 2 + 2 * z + 1) / 7
    i = ProjMatrix(K, [[s * a, s * b, s * c], [s * b, s * c, s * a], [s * c, s * a, s * b]])
    return {"g": g, "h": h, "i": i}


def build_group(K: FieldTower | None = None, bound: int = 10 * GROUP_ORDER,
                generators: dict | None = None) -> GroupTable:
    """Closure of the three generators (or of ``generators``) under multiplication."""
    gens = generators or klein_generators(K)
    K = next(iter(gens.values())).tower
    for name, m in gens.items():
        if m.det() != K.one():
            raise GroupError(f"generator {name} has determinant {m.det()}")
    ident = ProjMatrix.identity(K)
    seen = {ident: ""}
    order = [ident]
    queue = deque([ident])
    while queue:
        m = queue.popleft()
        for name, g in gens.items():
            n = m * g
            if n not in seen:
                seen[n] = seen[m] + name
                order.append(n)
                queue.append(n)
                if len(order) > bound:
                    raise GroupError(f"closure exceeded {bound} elements; check the generators")
    if generators is None and len(order) != GROUP_ORDER:
        log.warning("exact closure gave %d elements", len(order))
    return GroupTable(K, order, gens, seen)


def _rank(T, rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if not T.is_zero(rows[r][c])), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = T.inv(rows[rank][c])
        for r in range(len(rows)):
            if r != rank and not T.is_zero(rows[r][c]):
                f = T.mul(rows[r][c], inv)
                rows[r] = [T.sub(a, T.mul(f, b)) for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def involutions(G: GroupTable) -> list[Homology]:
    """Every element of order two, split into center and axis."""
    T = G.tower
    ident = ProjMatrix.identity(T)
    half = T(1) / 2
    out = []
    for m in G.elements:
        if m == ident or not (m * m) == ident:
            continue
        plus = [[(half * ((1 if i == j else 0) + m.entry(i, j))).raw for j in range(3)] for i in range(3)]
        minus = [[(half * ((1 if i == j else 0) - m.entry(i, j))).raw for j in range(3)] for i in range(3)]
        if _rank(T, plus) != 1 or _rank(T, minus) != 2:
            raise GroupError("involution with eigenspace dimensions other than (1, 2)")
        col = next(j for j in range(3) if any(not T.is_zero(plus[i][j]) for i in range(3)))
        center = ProjPoint._from_raw(T, tuple(plus[i][col] for i in range(3)))
        row = next(r for r in plus if any(not T.is_zero(v) for v in r))
        axis = MPoly(T, {(1, 0, 0): FieldElement(T, row[0]), (0, 1, 0): FieldElement(T, row[1]),
                         (0, 0, 1): FieldElement(T, row[2])})
        axis = axis.monic()
        if m.apply(center) != center:
            raise GroupError("involution does not fix its center")
        out.append(Homology(m, center, axis))
    return out


def orbit(p, G: GroupTable) -> list[ProjPoint]:
    """Distinct images of ``p`` in group order (first occurrence kept)."""
    P = p if isinstance(p, ProjPoint) else ProjPoint(p)
    if not P.tower.is_extension_of(G.tower):
        P = P.embed(_join(P.tower, G.tower))
    seen = {}
    for m in G.elements:
        q = m.apply(P)
        if q not in seen:
            seen[q] = None
    return list(seen)


def _join(a: FieldTower, b: FieldTower) -> FieldTower:
    if a.is_extension_of(b):
        return a
    if b.is_extension_of(a):
        return b
    raise TowerError(f"no common tower for {a!r} and {b!r}")


def triangular_grid(d: int):
    """Points (i, j, 1) with i + j <= d; unisolvent for forms of degree d."""
    return [(i, j, 1) for i in range(d + 1) for j in range(d + 1 - i)]


def transform_scalar(f: MPoly, m: ProjMatrix, method: str = "auto"):
    """``lam`` with ``f(M v) == lam * f(v)`` identically, or NotProportional.

    Monomial matrices are handled by exact substitution; dense ones by
    comparing values on a unisolvent grid, which decides the identity of two
    forms of degree ``d`` exactly.
    """
    d = f.degree()
    T = m.tower
    dense = any(sum(1 for c in row if not T.is_zero(c)) > 1 for row in m.rows)
    if method == "substitute" or (method == "auto" and (not dense or d <= 6)):
        g = linear_substitute(f.embed(T), [[m.entry(i, j) for j in range(3)] for i in range(3)])
        return proportional(g, f.embed(T))
    grid = triangular_grid(d)
    lam = None
    for q in grid:
        v = evaluate(f, q)
        w = evaluate(f, _apply_raw(m, q))
        if lam is None:
            if v.is_zero():
                if not w.is_zero():
                    raise NotProportional("value mismatch at a zero of f")
                continue
            lam = w / v
        elif w != lam * v:
            raise NotProportional(f"value mismatch at {q}")
    return lam


def _apply_raw(m: ProjMatrix, q):
    T = m.tower
    return tuple(sum((m.entry(i, j) * q[j] for j in range(3)), T.zero()) for i in range(3))


def check_invariance(f: MPoly, G: GroupTable) -> dict:
    """Per-generator scalars ``lam`` with ``f o M = lam f``; raises
    NotProportional when some generator does not preserve V(f)."""
    return {name: transform_scalar(f, m) for name, m in G.generators.items()}


def is_invariant(f: MPoly, G: GroupTable) -> bool:
    try:
        lams = check_invariance(f, G)
    except NotProportional:
        return False
    return all(l == 1 for l in lams.values())


ORBIT_LABELS = ("O21", "O24", "O28", "O42", "O56", "K1-84", "generic-168", "Unclassified")


def classify_point(p, catalogue, special_orbits: dict) -> str:
    """Orbit label from the vanishing pattern of (phi4, phi6, phi14, phi21).

    ``special_orbits`` maps "O21" and "O28" to their point lists; those two
    orbits cannot be told apart from other points of V(phi21) by vanishing
    alone, so membership is tested directly.
    """
    P = p if isinstance(p, ProjPoint) else ProjPoint(p)
    z4, z6, z14, z21 = catalogue.signature(P)
    sig = (z4, z6, z14, z21)
    if sig == (True, True, False, False):
        return "O24"
    if sig == (True, False, True, False):
        return "O56"
    if sig == (False, True, True, True):
        return "O42"
    if sig == (False, False, False, True):
        for label in ("O21", "O28"):
            if any(P == q for q in special_orbits[label]):
                return label
        return "K1-84"
    if not z21 and sum(sig) <= 1:
        return "generic-168"
    return "Unclassified"
