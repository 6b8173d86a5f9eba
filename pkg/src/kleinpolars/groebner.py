"""Buchberger's algorithm for homogeneous ideals in three variables.

Graded reverse lexicographic order, normal selection strategy, Buchberger's
product and chain criteria (Gebauer-Moeller installation), deterministic pair
queue, optional degree truncation, resource budgets with JSON checkpoints.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import logging
import time
from dataclasses import dataclass, field

from .exactnum import FieldTower
from .mpoly import MPoly, grevlex_key

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    def __init__(self, reason: str, checkpoint: dict):
        super().__init__(reason)
        self.reason = reason
        self.checkpoint = checkpoint


def _lead(terms: dict):
    return max(terms, key=grevlex_key)


def _divides(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and a[2] <= b[2]


def _lcm(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]), max(a[2], b[2]))


def _monic(T: FieldTower, terms: dict) -> dict:
    lm = _lead(terms)
    c = terms[lm]
    if c == T.one_raw:
        return dict(terms)
    inv = T.inv(c)
    return {e: T.mul(v, inv) for e, v in terms.items()}


class Reducer:
    """Normal forms modulo a list of monic polynomials (raw term dicts)."""

    def __init__(self, T: FieldTower, polys):
        self.T = T
        self.polys = list(polys)
        self.leads = [_lead(p) for p in self.polys]

    def add(self, p: dict):
        self.polys.append(p)
        self.leads.append(_lead(p))

    def _find(self, m, skip=None):
        for i, lm in enumerate(self.leads):
            if i != skip and _divides(lm, m):
                return i
        return None

    def reduce(self, f: dict, full: bool = True, skip=None) -> dict:
        """Normal form of ``f``; ``full=False`` stops at the first irreducible
        leading term (top reduction)."""
        T = self.T
        sub, mul, is_zero = T.sub, T.mul, T.is_zero
        p = dict(f)
        heap = [(_neg(grevlex_key(e)), e) for e in p]
        heapq.heapify(heap)
        out = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            i = self._find(m, skip)
            if i is None:
                out[m] = c
                if not full:
                    out.update(p)
                    return out
                continue
            g = self.polys[i]
            lm = self.leads[i]
            sh = (m[0] - lm[0], m[1] - lm[1], m[2] - lm[2])
            for e, d in g.items():
                if e == lm:
                    continue
                n = (e[0] + sh[0], e[1] + sh[1], e[2] + sh[2])
                old = p.get(n)
                if old is None:
                    p[n] = T.neg(mul(c, d))
                    heapq.heappush(heap, (_neg(grevlex_key(n)), n))
                else:
                    v = sub(old, mul(c, d))
                    if is_zero(v):
                        del p[n]
                    else:
                        p[n] = v
        return out


def _neg(key):
    return tuple(-k for k in key)


@dataclass
class GroebnerResult:
    tower: FieldTower
    basis: list  # list of MPoly, reduced, sorted by leading monomial
    truncated_at: int | None
    stats: dict = field(default_factory=dict)

    def leading_monomials(self):
        return [g.leading_monomial() for g in self.basis]

    def normal_form(self, f: MPoly) -> MPoly:
        return normal_form(f, self.basis)

    def contains(self, f: MPoly) -> bool:
        if self.truncated_at is not None and f.degree() is not None and f.degree() > self.truncated_at:
            raise ValueError("membership above the truncation degree is undecided")
        return normal_form(f, self.basis).is_zero()

    def digest(self) -> str:
        return basis_hash(self.tower, self.basis)


def basis_hash(tower: FieldTower, basis) -> str:
    body = json.dumps({"tower": tower.descriptor(), "basis": [str(g) for g in basis]}, sort_keys=True)
    return hashlib.sha256(body.encode()).hexdigest()


def normal_form(f: MPoly, basis) -> MPoly:
    T = f.tower
    for g in basis:
        if g.tower.is_extension_of(T) and g.tower != T:
            T = g.tower
    polys = [_monic(T, g.embed(T).terms) for g in basis if not g.is_zero()]
    red = Reducer(T, polys)
    return MPoly(T, red.reduce(f.embed(T).terms), _trusted=True)


def _pair_key(p):
    lcm, i, j = p
    return (sum(lcm), grevlex_key(lcm), i, j)


class Buchberger:
    """Resumable Buchberger run; see :func:`buchberger` for the one-shot API."""

    def __init__(self, generators, truncate: int | None = None):
        gens = [g for g in generators if not g.is_zero()]
        if not gens:
            raise ValueError("ideal needs a nonzero generator")
        T = gens[0].tower
        for g in gens:
            if g.tower.is_extension_of(T):
                T = g.tower
        if not all(g.is_homogeneous() for g in gens):
            raise ValueError("this engine handles homogeneous ideals only")
        self.T = T
        self.truncate = truncate
        self.G = []          # monic raw dicts
        self.alive = []      # basis element not superseded
        self.pairs = []      # heap of (key, (lcm, i, j))
        self.pending = sorted((g.embed(T) for g in gens), key=lambda g: (g.degree(), grevlex_key(g.leading_monomial())))
        self.stats = {"spairs": 0, "zero_reductions": 0, "product_criterion": 0,
                      "chain_criterion": 0, "skipped_above_truncation": 0}
        self.red = Reducer(T, [])

    # -- Gebauer-Moeller update ----------------------------------------------------------
    def _insert(self, h: dict):
        k = len(self.G)
        lh = _lead(h)
        self.G.append(h)
        self.alive.append(True)
        self.red.add(h)
        new = []
        for i in range(k):
            if self.alive[i]:
                new.append((_lcm(self.leads(i), lh), i, k))
        # chain criterion among the new pairs
        keep = []
        for a, (lcm_a, i, _) in enumerate(new):
            li = self.leads(i)
            coprime = li[0] * lh[0] == 0 and li[1] * lh[1] == 0 and li[2] * lh[2] == 0
            dominated = False
            for b, (lcm_b, j, _) in enumerate(new):
                if b == a:
                    continue
                if _divides(lcm_b, lcm_a) and (lcm_b != lcm_a or b < a):
                    dominated = True
                    break
            if dominated:
                self.stats["chain_criterion"] += 1
                continue
            keep.append((lcm_a, i, k, coprime))
        for lcm_a, i, _, coprime in keep:
            if coprime:
                self.stats["product_criterion"] += 1
                continue
            heapq.heappush(self.pairs, (_pair_key((lcm_a, i, k)), (lcm_a, i, k)))
        # old pairs (i, j) made redundant by the new element
        survivors = []
        for key, (lcm, i, j) in self.pairs:
            if j == k:
                survivors.append((key, (lcm, i, j)))
                continue
            if (_divides(lh, lcm) and _lcm(self.leads(i), lh) != lcm and _lcm(self.leads(j), lh) != lcm):
                self.stats["chain_criterion"] += 1
                continue
            survivors.append((key, (lcm, i, j)))
        heapq.heapify(survivors)
        self.pairs = survivors
        # earlier elements whose leading term is a multiple of the new one
        for i in range(k):
            if self.alive[i] and _divides(lh, self.leads(i)):
                self.alive[i] = False

    def leads(self, i):
        return self.red.leads[i]

    def _spoly(self, lcm, i, j) -> dict:
        T = self.T
        out = {}
        for idx, sign in ((i, 1), (j, -1)):
            g = self.G[idx]
            lm = self.leads(idx)
            sh = (lcm[0] - lm[0], lcm[1] - lm[1], lcm[2] - lm[2])
            for e, c in g.items():
                n = (e[0] + sh[0], e[1] + sh[1], e[2] + sh[2])
                v = c if sign == 1 else T.neg(c)
                if n in out:
                    v = T.add(out[n], v)
                    if T.is_zero(v):
                        del out[n]
                        continue
                out[n] = v
        return out

    def run(self, max_spairs: int | None = None, wall: float | None = None, max_basis: int | None = None):
        t0 = time.monotonic()
        counted = 0
        while self.pending or self.pairs:
            # normal strategy: lowest-degree work first, generators interleaved
            gdeg = self.pending[0].degree() if self.pending else None
            pdeg = self.pairs[0][0][0] if self.pairs else None
            if gdeg is not None and (pdeg is None or gdeg <= pdeg):
                g = self.pending.pop(0)
                if self.truncate is not None and g.degree() > self.truncate:
                    self.stats["skipped_above_truncation"] += 1
                    continue
                h = self.red.reduce(g.terms)
            else:
                key, (lcm, i, j) = heapq.heappop(self.pairs)
                if self.truncate is not None and sum(lcm) > self.truncate:
                    self.stats["skipped_above_truncation"] += 1 + len(self.pairs)
                    self.pairs = []
                    continue
                self.stats["spairs"] += 1
                counted += 1
                h = self.red.reduce(self._spoly(lcm, i, j))
            if not h:
                self.stats["zero_reductions"] += 1
            else:
                self._insert(_monic(self.T, h))
            if max_spairs is not None and self.stats["spairs"] >= max_spairs and (self.pairs or self.pending):
                raise BudgetExceeded(f"S-pair budget {max_spairs} reached", self.checkpoint())
            if wall is not None and time.monotonic() - t0 > wall and (self.pairs or self.pending):
                raise BudgetExceeded(f"wall budget {wall}s reached", self.checkpoint())
            if max_basis is not None and len(self.G) > max_basis:
                raise BudgetExceeded(f"basis size budget {max_basis} reached", self.checkpoint())
        return self.result()

    def result(self) -> GroebnerResult:
        T = self.T
        polys = [self.G[i] for i in range(len(self.G)) if self.alive[i]]
        # minimal basis: drop elements whose leading term another one divides
        leads = [_lead(p) for p in polys]
        keep = []
        for a, la in enumerate(leads):
            if any(b != a and _divides(lb, la) and (lb != la or b < a) for b, lb in enumerate(leads)):
                continue
            keep.append(polys[a])
        # interreduce tails
        reduced = []
        for a, p in enumerate(keep):
            others = Reducer(T, [q for b, q in enumerate(keep) if b != a])
            lm = _lead(p)
            tail = {e: c for e, c in p.items() if e != lm}
            r = others.reduce(tail)
            r[lm] = p[lm]
            reduced.append(_monic(T, r))
        reduced.sort(key=lambda p: grevlex_key(_lead(p)))
        basis = [MPoly(T, p, _trusted=True) for p in reduced]
        return GroebnerResult(T, basis, self.truncate, dict(self.stats))

    # -- checkpointing -----------------------------------------------------------------
    def checkpoint(self) -> dict:
        return {
            "tower": self.T.descriptor(),
            "truncate": self.truncate,
            "basis": [str(MPoly(self.T, g, _trusted=True)) for g in self.G],
            "alive": list(self.alive),
            "pairs": sorted([[list(lcm), i, j] for _, (lcm, i, j) in self.pairs], key=lambda p: (p[1], p[2])),
            "pending": [str(g) for g in self.pending],
            "stats": dict(self.stats),
        }

    @classmethod
    def resume(cls, state: dict) -> Buchberger:
        T = FieldTower.from_descriptor(state["tower"])
        obj = cls.__new__(cls)
        obj.T = T
        obj.truncate = state["truncate"]
        obj.G = [MPoly.parse(s, T).terms for s in state["basis"]]
        obj.alive = list(state["alive"])
        obj.red = Reducer(T, obj.G)
        obj.pairs = []
        for lcm, i, j in state["pairs"]:
            lcm = tuple(lcm)
            obj.pairs.append((_pair_key((lcm, i, j)), (lcm, i, j)))
        heapq.heapify(obj.pairs)
        obj.pending = [MPoly.parse(s, T) for s in state["pending"]]
        obj.stats = dict(state["stats"])
        return obj


def buchberger(generators, truncate: int | None = None, max_spairs: int | None = None,
               wall: float | None = None, max_basis: int | None = None) -> GroebnerResult:
    """Reduced Groebner basis (grevlex) of the homogeneous ideal generated by
    ``generators``; with ``truncate=D`` only S-pairs of degree <= D are
    processed, which decides membership of forms of degree <= D."""
    return Buchberger(generators, truncate).run(max_spairs, wall, max_basis)


def is_groebner(basis, truncate: int | None = None) -> bool:
    """Buchberger's criterion: every S-polynomial (up to the truncation
    degree) reduces to zero."""
    polys = [g for g in basis if not g.is_zero()]
    if not polys:
        return True
    T = polys[0].tower
    raw = [_monic(T, g.terms) for g in polys]
    red = Reducer(T, raw)
    B = Buchberger.__new__(Buchberger)
    B.T, B.G, B.red = T, raw, red
    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            lcm = _lcm(red.leads[i], red.leads[j])
            if truncate is not None and sum(lcm) > truncate:
                continue
            if red.leads[i][0] * red.leads[j][0] == 0 and red.leads[i][1] * red.leads[j][1] == 0 \
                    and red.leads[i][2] * red.leads[j][2] == 0:
                continue
            if red.reduce(B._spoly(lcm, i, j)):
                return False
    return True
