"""The 21 reducible polars of Klein's quartic and the conic-line
arrangement they form: construction, local analysis, census, indices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .covariant import GradientMap, build_catalogue, polar
from .exactnum import FieldElement, FieldTower, cube_root_field, cyclotomic7, sqrt, tower_extend
from .mpoly import (MPoly, NotDivisible, NotProportional, binary_discriminant, binary_roots_chart,
                    divide_exact, divides, evaluate, is_proportional, restrict_to_line)
from .symmetry import GroupTable, ProjPoint, build_group, involutions, orbit

log = logging.getLogger(__name__)


class ArrangementError(RuntimeError):
    """A check that the construction relies on came out false."""


# -- data types ----------------------------------------------------------------------

@dataclass
class ReduciblePolar:
    index: int
    center: ProjPoint
    axis: MPoly
    conic: MPoly
    discriminant: FieldElement
    nodes: list = field(default_factory=list)

    @property
    def form(self) -> MPoly:
        return self.axis * self.conic


@dataclass
class Arrangement:
    components: list  # (label, MPoly)

    @property
    def degree(self) -> int:
        return sum(f.degree() for _, f in self.components)

    def lines(self) -> int:
        return sum(1 for _, f in self.components if f.degree() == 1)

    def conics(self) -> int:
        return sum(1 for _, f in self.components if f.degree() == 2)

    def select(self, labels) -> Arrangement:
        keep = set(labels)
        return Arrangement([(l, f) for l, f in self.components if l in keep])

    def product(self) -> MPoly:
        acc = None
        for _, f in self.components:
            acc = f if acc is None else acc * f
        return acc

    def incident(self, point) -> list:
        return [l for l, f in self.components if evaluate(f, point).is_zero()]


@dataclass
class SingularityReport:
    point: ProjPoint
    multiplicity: int
    ordinary: bool
    incident: list
    weight: int = 1  # number of points of the census this report stands for
    label: str = ""
    tangents: list = field(default_factory=list)

    def summary(self) -> dict:
        return {"label": self.label, "tower": self.point.tower.descriptor(),
                "point": self.point.text(), "multiplicity": self.multiplicity,
                "ordinary": self.ordinary, "incident": self.incident, "weight": self.weight}


@dataclass
class Census:
    """``t[r]`` points where exactly ``r`` components meet; ``reports`` are
    representatives with weights whose sum reproduces ``t``."""

    t: dict
    reports: list = field(default_factory=list)
    infinitely_near: list = field(default_factory=list)

    def __post_init__(self):
        self.t = {int(r): int(n) for r, n in sorted(self.t.items()) if n}

    @property
    def singular_count(self) -> int:
        return sum(self.t.values())

    def tuple(self, *rs) -> tuple:
        return tuple(self.t.get(r, 0) for r in rs)

    def identity(self, l: int, k: int) -> tuple:
        """Both sides of the pair count for ``l`` lines and ``k`` conics."""
        lhs = sum(math.comb(r, 2) * n for r, n in self.t.items())
        rhs = math.comb(l, 2) + 2 * k * l + 4 * math.comb(k, 2)
        return lhs, rhs

    @classmethod
    def from_reports(cls, reports, labels=None) -> Census:
        """Census of the sub-arrangement whose labels are given (all by default)."""
        t = {}
        kept = []
        for rep in reports:
            inc = rep.incident if labels is None else [l for l in rep.incident if l in labels]
            if len(inc) >= 2:
                t[len(inc)] = t.get(len(inc), 0) + rep.weight
                kept.append(rep)
        return cls(t, kept)

    def as_dict(self) -> dict:
        return {str(r): n for r, n in self.t.items()}


# -- shared objects ------------------------------------------------------------------

class KleinData:
    """Group, invariants, special orbits and the polar arrangement, built once."""

    def __init__(self, group: GroupTable | None = None):
        self.K = cyclotomic7()
        self.G = group or build_group(self.K)
        self.cat = build_catalogue()
        self.grad = GradientMap(self.cat.phi4)
        self.homologies = involutions(self.G)
        z = self.K.generator()
        self.p21 = ProjPoint((self.K.one(), z ** 4 + z ** 3, -(z ** 4 + z ** 3 + 1)))
        self.p28 = ProjPoint((1, 1, 1), self.K)
        self.p24 = ProjPoint((1, 0, 0), self.K)
        self.Kw = cube_root_field(self.K)
        w = self.Kw.generator("w")
        self.p56 = ProjPoint((w ** 2, w, self.Kw.one()))
        self._orbits = {}
        self._polars = None
        self._phi = {}

    def orbit(self, label: str) -> list:
        if label not in self._orbits:
            if label == "O42":
                self._orbits[label] = [q for P in self.polars() for q in P.nodes]
            else:
                rep = {"O21": self.p21, "O24": self.p24, "O28": self.p28, "O56": self.p56}[label]
                self._orbits[label] = orbit(rep, self.G)
        return self._orbits[label]

    def polars(self) -> list:
        if self._polars is None:
            self._polars = build_reducible_polars(self)
        return self._polars

    def arrangement(self) -> Arrangement:
        P = self.polars()
        return Arrangement([(f"L{p.index}", p.axis) for p in P] + [(f"C{p.index}", p.conic) for p in P])

    def phi(self, d: int) -> MPoly:
        """Phi_21, Phi_42, Phi_63, Phi_126, Phi_189 from the pullback chain."""
        if not self._phi:
            self._phi[21] = self.cat.phi21
        if d not in self._phi:
            if d == 42:
                self._phi[42] = divide_exact(self.phi(63), self.cat.phi21)
            elif d in (63, 126, 189):
                self._phi[d] = self.grad.pullback(self.phi(d // 3))
            else:
                raise KeyError(d)
        return self._phi[d]


@lru_cache(maxsize=1)
def klein_data() -> KleinData:
    return KleinData()


# -- polars --------------------------------------------------------------------------

def conic_matrix(q: MPoly):
    """Symmetric matrix M with q = v^T M v (entries in q's tower)."""
    T = q.tower
    idx = {(2, 0, 0): (0, 0), (0, 2, 0): (1, 1), (0, 0, 2): (2, 2),
           (1, 1, 0): (0, 1), (1, 0, 1): (0, 2), (0, 1, 1): (1, 2)}
    M = [[T.zero() for _ in range(3)] for _ in range(3)]
    for e, (i, j) in idx.items():
        c = q.coefficient(e)
        if i == j:
            M[i][i] = c
        else:
            M[i][j] = M[j][i] = c / 2
    return M


def is_smooth_conic(q: MPoly) -> bool:
    if q.degree() != 2:
        raise ValueError("not a conic")
    M = conic_matrix(q)
    d = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
         - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
         + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    return not d.is_zero()


def quadratic_points(q_form, tower: FieldTower, name: str = "t"):
    """Roots of a binary quadratic as P^2 points, plus the tower holding them.

    A square discriminant keeps the roots in ``tower``; otherwise the
    discriminant's square root is adjoined (irreducibility is checked by
    :func:`tower_extend`).
    """
    D = binary_discriminant(q_form)
    if D.is_zero():
        raise ArrangementError("double root where two distinct points are required")
    r = sqrt(D)
    if r is not None:
        E, root = tower, r
    else:
        E = tower_extend(tower, name, [-D, 0, 1])
        root = E.generator(name)
    pts = [ProjPoint(p) for p in binary_roots_chart(q_form, E, root)]
    return E, pts


def build_reducible_polars(data: KleinData) -> list:
    """One reducible polar per involution center, with its two nodes.

    The nodes of the first polar are computed in ``K(sqrt D)``; all 42 are its
    images under the group (which acts K-linearly) and are then assigned to
    the polars whose line and conic both pass through them.
    """
    phi4 = data.cat.phi4
    out = []
    for j, h in enumerate(data.homologies):
        P = polar(phi4, h.center)
        try:
            conic = divide_exact(P, h.axis)
        except NotDivisible as exc:
            raise ArrangementError(f"polar {j} is not divisible by its axis") from exc
        if not is_smooth_conic(conic):
            raise ArrangementError(f"conic of polar {j} is singular")
        D = binary_discriminant(restrict_to_line(conic, h.axis))
        if D.is_zero():
            raise ArrangementError(f"line and conic of polar {j} are tangent")
        out.append(ReduciblePolar(j, h.center, h.axis, conic, D))
    first = out[0]
    E, roots = quadratic_points(restrict_to_line(first.conic, first.axis), data.K)
    nodes = orbit(roots[0], data.G)
    if len(nodes) != 42:
        raise ArrangementError(f"node orbit has {len(nodes)} points, expected 42")
    for P in out:
        P.nodes = [q for q in nodes if evaluate(P.axis, q).is_zero() and evaluate(P.conic, q).is_zero()]
        if len(P.nodes) != 2:
            raise ArrangementError(f"polar {P.index} received {len(P.nodes)} nodes")
    if set(first.nodes) != set(roots):
        raise ArrangementError("node assignment disagrees with the direct computation")
    return out


def node_tower(polars) -> FieldTower:
    return polars[0].nodes[0].tower


# -- local analysis ------------------------------------------------------------------

def multiplicity(f: MPoly, p, max_order: int | None = None) -> int:
    """Least ``m`` such that some order-``m`` partial of ``f`` is nonzero at ``p``."""
    if f.is_zero():
        raise ValueError("multiplicity of the zero polynomial")
    P = p if isinstance(p, ProjPoint) else ProjPoint(p)
    layer = {(0, 0, 0): f}
    top = f.degree() if max_order is None else max_order
    for m in range(top + 1):
        if any(not evaluate(g, P).is_zero() for g in layer.values()):
            return m
        nxt = {}
        for a, g in layer.items():
            for v in range(3):
                b = list(a)
                b[v] += 1
                b = tuple(b)
                if b not in nxt:
                    nxt[b] = g.diff(v)
        layer = {a: g for a, g in nxt.items() if not g.is_zero()}
    raise ArrangementError("multiplicity exceeds the requested order")


def _gradient_at(f: MPoly, P: ProjPoint):
    return [evaluate(g, P) for g in f.gradient()]


def _parallel(u, v) -> bool:
    return all((u[i] * v[j] - u[j] * v[i]).is_zero() for i in range(3) for j in range(i + 1, 3))


def is_ordinary(components, p) -> tuple:
    """Pairwise distinct tangent directions of smooth branches through ``p``.

    ``components`` is a list of (label, form) all vanishing at ``p``.
    Returns ``(ordinary, certificate)``.
    """
    P = p if isinstance(p, ProjPoint) else ProjPoint(p)
    grads = []
    for label, f in components:
        if not evaluate(f, P).is_zero():
            raise ValueError(f"component {label} does not pass through the point")
        g = _gradient_at(f, P)
        if all(c.is_zero() for c in g):
            raise ValueError(f"component {label} is singular at the point")
        grads.append((label, g))
    clashes = [(a, b) for i, (a, u) in enumerate(grads) for b, v in grads[i + 1:] if _parallel(u, v)]
    cert = {"tangents": {l: [str(c) for c in g] for l, g in grads}, "tangent_clashes": clashes}
    return not clashes, cert


def analyse_point(arr: Arrangement, P: ProjPoint, label: str = "", weight: int = 1,
                  total: MPoly | None = None) -> SingularityReport:
    inc = arr.incident(P)
    comps = [(l, f) for l, f in arr.components if l in inc]
    ordinary, cert = is_ordinary(comps, P)
    mult = len(inc)
    if total is not None:
        m = multiplicity(total, P, max_order=len(inc) + 1)
        if m != mult:
            raise ArrangementError(f"{label}: multiplicity {m} but {mult} incident components")
    return SingularityReport(P, mult, ordinary, inc, weight, label, cert["tangent_clashes"])


# -- the two fibre computations --------------------------------------------------------

FIBRE28_LINES = (
    "x+(z7^4+z7^3)*y-(z7^4+z7^3+1)*z",
    "-(z7^4+z7^3+1)*x+y+(z7^4+z7^3)*z",
    "(z7^4+z7^3)*x-(z7^4+z7^3+1)*y+z",
)
FIBRE28_CONIC = ("(z7^4+z7^3)*x^2+(z7^5+z7^2)*(z7^5+z7^2+1)*x*y+(z7^5+z7^2)*y^2"
                 "+(-z7^5-z7^2+1)*x*z+(-z7^4-z7^3+1)*y*z+(z7^5+z7^2)*(z7^4+z7^3-1)*z^2")
FIBRE21_LINES = (
    "x+(z7^5+z7)*y+(z7^5+z7^4+z7^2+1)*z",
    "x-(z7^5+z7^4+z7^3+z7+1)*y+(z7^5+z7^3+z7^2+1)*z",
    "x+(z7^5+1)*y-(z7^3+z7^2+z7)*z",
    "x+(z7^2+1)*y+(z7^3+z7^2+z7+1)*z",
)
FIBRE21_CONIC = ("(z7^5+z7)*x^2-(z7^4+z7^3-1)*x*y+(z7^5+z7^3)*y^2"
                 "+(-z7^3+z7^2-z7)*x*z+(z7^6-z7^4-z7)*y*z+(z7^5+z7^4)*z^2")


def _cyclic(f: MPoly) -> MPoly:
    # x -> y -> z -> x on exponents
    return MPoly(f.tower, {(e[2], e[0], e[1]): c for e, c in f.terms.items()}, _trusted=True)


def fibre_analysis(data: KleinData, which: int) -> dict:
    """The nine preimages under the gradient map of the O_28 point [1:1:1]
    (``which=28``) or of the O_21 point p_21 (``which=21``).

    Transcribed lines through the point are validated first (each divides
    Phi_21 and vanishes there).  Each pullback of a line splits as
    (line through the point) x conic; on each line, the conics not paired
    with it must cut proportional binary quadratics with nonzero
    discriminant.  Those two roots per line, the point itself and (for O_28)
    the two O_56 points over it make up the fibre.
    """
    K = data.K
    p = data.p28 if which == 28 else data.p21
    texts = FIBRE28_LINES if which == 28 else FIBRE21_LINES
    lines = [MPoly.parse(t, K) for t in texts]
    phi21 = data.cat.phi21.embed(K)
    checks = {}
    for i, L in enumerate(lines):
        if not evaluate(L, p).is_zero() or not divides(L, phi21):
            raise ArrangementError(f"transcribed line {i + 1} is not a component through the point")
    checks["lines_validated"] = len(lines)
    if which == 28:
        s = lines[0] + lines[1] + lines[2]
        checks["lines_sum_zero"] = s.is_zero()
    conics, partner = [], []
    for j, L in enumerate(lines):
        pb = data.grad.pullback(L)
        hits = [i for i, M in enumerate(lines) if divides(M, pb)]
        if len(hits) != 1:
            raise ArrangementError(f"pullback of line {j + 1} has linear parts {hits}")
        partner.append(hits[0])
        conics.append(divide_exact(pb, lines[hits[0]]))
    checks["line_images"] = {f"L{j + 1}": f"L{partner[j] + 1}" for j in range(len(lines))}
    printed = MPoly.parse(FIBRE28_CONIC if which == 28 else FIBRE21_CONIC, K)
    checks["printed_conic_matches"] = is_proportional(conics[0], printed)
    if which == 28:
        checks["printed_conics_cyclic"] = (is_proportional(conics[1], _cyclic(printed)) and
                                           is_proportional(conics[2], _cyclic(_cyclic(printed))))
    for j, C in enumerate(conics):
        if evaluate(C, p).is_zero():
            raise ArrangementError(f"conic {j + 1} passes through the point")
    checks["no_conic_through_point"] = True
    fibre = [("base", p)]
    quad = []
    for i, L in enumerate(lines):
        meeting = [j for j in range(len(lines)) if partner[j] != i]
        forms = [restrict_to_line(conics[j], L) for j in meeting]
        for j, q in zip(meeting[1:], forms[1:]):
            try:
                forms[0].proportional(q)
            except NotProportional as exc:
                raise ArrangementError(f"conics {meeting[0] + 1} and {j + 1} cut line {i + 1} "
                                       "in different pairs") from exc
        D = binary_discriminant(forms[0])
        if D.is_zero():
            raise ArrangementError(f"double point on line {i + 1}")
        E, pts = quadratic_points(forms[0], K)
        quad.append({"line": i + 1, "conics": [j + 1 for j in meeting], "discriminant": str(D),
                     "tower": E.descriptor()})
        fibre += [(f"line{i + 1}", q) for q in pts]
    checks["restrictions"] = quad
    if which == 28:
        over = [q for q in data.orbit("O56") if ProjPoint(data.grad(q)) == p.embed(q.tower)]
        if len(over) != 2:
            raise ArrangementError(f"{len(over)} points of O56 map to [1:1:1]")
        for q in over:
            if not all(evaluate(C, q).is_zero() for C in conics):
                raise ArrangementError("an O56 point over [1:1:1] misses one of the conics")
        fibre += [("O56", q) for q in over]
    for lab, q in fibre:
        img = ProjPoint(data.grad(q))
        if img != p.embed(img.tower):
            raise ArrangementError(f"fibre point {lab} does not map to the base point")
    return {"point": p, "lines": lines, "conics": conics, "partner": partner,
            "fibre": fibre, "checks": checks}


# -- census ----------------------------------------------------------------------------

def klein_lines_pairs(data: KleinData) -> dict:
    """Every pair of the 21 axes meets in O_21 or O_28."""
    O21, O28 = set(data.orbit("O21")), set(data.orbit("O28"))
    axes = [h.axis for h in data.homologies]
    hits = {"O21": 0, "O28": 0}
    for i in range(len(axes)):
        a = [axes[i].coefficient(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        for j in range(i + 1, len(axes)):
            b = [axes[j].coefficient(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
            q = ProjPoint((a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]))
            if q in O21:
                hits["O21"] += 1
            elif q in O28:
                hits["O28"] += 1
            else:
                raise ArrangementError(f"axes {i} and {j} meet outside O21 and O28")
    return hits


def census_K(data: KleinData | None = None, with_multiplicity: bool = True) -> Census:
    """Singularities of the 42-component arrangement, by the fibre argument.

    Intersections of two distinct polars lie over intersections of two axes,
    which are all in O_21 or O_28; so Sing(K) is the 42 nodes together with
    the fibres over O_21 and O_28.  A fibre over a point of the orbit is a
    group translate of the fibre over the representative, so each fibre point
    carries weight 21 or 28.
    """
    data = data or klein_data()
    arr = data.arrangement()
    total = data.phi(63) if with_multiplicity else None
    reports = []
    for P in data.polars():
        for q in P.nodes:
            rep = analyse_point(arr, q, f"node{P.index}", 1)
            if rep.incident != [f"L{P.index}", f"C{P.index}"]:
                raise ArrangementError(f"node of polar {P.index} lies on {rep.incident}")
            reports.append(rep)
    for which in (28, 21):
        fa = fibre_analysis(data, which)
        for lab, q in fa["fibre"]:
            reports.append(analyse_point(arr, q, f"fibre{which}:{lab}", which, total))
        expected = {28: 3, 21: 4}[which]
        bad = [r.label for r in reports[-9:] if r.multiplicity != expected]
        if len(fa["fibre"]) != 9 or bad:
            raise ArrangementError(f"fibre over O{which}: unexpected multiplicities at {bad}")
    census = Census.from_reports(reports)
    return census


def census_sub(census: Census, kind: str) -> Census:
    """Restriction of a conic-line census to its lines ('L') or conics ('C')."""
    labels = {l for r in census.reports for l in r.incident if l.startswith(kind)}
    return Census.from_reports(census.reports, labels)


# -- numerical invariants of a census ---------------------------------------------------

def harbourne_index(d: int, census: Census, lines: int | None = None, conics: int | None = None) -> Fraction:
    if census.singular_count == 0:
        raise ValueError("Harbourne index of a curve without singular points")
    h = Fraction(d * d - sum(r * r * n for r, n in census.t.items()), census.singular_count)
    if lines is not None and conics is not None:
        alt = Fraction(4 * conics + lines - sum(r * n for r, n in census.t.items()), census.singular_count)
        if alt != h:
            raise ArrangementError(f"the two index formulas disagree: {h} vs {alt}")
    return h


def chern_numbers(k: int, d: int, census: Census) -> tuple:
    """(c1bar^2, c2bar, slope) for ``k`` smooth curves of degree ``d``."""
    if k < 3 or d < 1:
        raise ValueError("need at least three curves of positive degree")
    if any(r >= k for r in census.t):
        raise ValueError("all curves pass through a common point")
    c1 = 9 + (d * d - 6 * d) * k + sum((3 * r - 4) * n for r, n in census.t.items())
    c2 = 3 + (d * d - 3 * d) * k + sum((r - 1) * n for r, n in census.t.items())
    return c1, c2, Fraction(c1, c2)


def tjurina_and_freeness(d: int, census: Census, ordinary: bool = True) -> dict:
    if not ordinary:
        raise ValueError("the Milnor-number shortcut needs ordinary singularities")
    tau = sum((r - 1) ** 2 * n for r, n in census.t.items())
    n = d - 1

    def search(shift):
        # tau == n^2 - r(n - r) - shift  <=>  r^2 - n r + (n^2 - tau - shift) = 0
        c = n * n - tau - shift
        disc = n * n - 4 * c
        roots = [r for r in range(n + 1) if r * r - n * r + c == 0]
        return {"quadratic": [1, -n, c], "discriminant": disc, "integer_roots": roots}

    free, nearly = search(0), search(1)
    nu = -((-3 * n * n) // 4) - tau
    return {"tau": tau, "free": free, "is_free": bool(free["integer_roots"]),
            "nearly_free": nearly, "is_nearly_free": bool(nearly["integer_roots"]), "defect": nu}


def conic_inequality_check(census: Census, l: int, k: int) -> dict:
    bound = Fraction(2 * (l + 2 * k), 3)
    hyp = all(r <= bound for r in census.t)
    t = census.t
    lhs = t.get(2, 0) + Fraction(3, 4) * t.get(3, 0) + (4 * k + 2 * l - 4) * k
    rhs = l + sum((Fraction(r * r, 4) - r) * n for r, n in t.items() if r >= 5)
    return {"hypothesis": hyp, "lhs": lhs, "rhs": rhs, "holds": hyp and lhs >= rhs}


# -- incidences ----------------------------------------------------------------------

def incidence_counts(data: KleinData | None = None) -> dict:
    data = data or klein_data()
    O21, O28 = data.orbit("O21"), data.orbit("O28")
    rows = []
    for j, h in enumerate(data.homologies):
        rows.append({"line": j,
                     "O21": sum(1 for q in O21 if evaluate(h.axis, q).is_zero()),
                     "O28": sum(1 for q in O28 if evaluate(h.axis, q).is_zero())})
    c21 = sum(1 for q in O21 if sum(evaluate(h.axis, q).is_zero() for h in data.homologies) == 4)
    c28 = sum(1 for q in O28 if sum(evaluate(h.axis, q).is_zero() for h in data.homologies) == 3)
    census = Census({3: c28, 4: c21})
    return {"rows": rows, "census": census, "h": harbourne_index(21, census, lines=21, conics=0)}


def conic_o56_incidences(data: KleinData | None = None) -> dict:
    """How many O_56 points each conic contains, and which conics pass
    through [w^2:w:1] (with the ordinariness certificate there)."""
    data = data or klein_data()
    O56 = data.orbit("O56")
    per = [sum(1 for q in O56 if evaluate(P.conic, q).is_zero()) for P in data.polars()]
    arr = data.arrangement()
    rep = analyse_point(arr, data.p56, "O56")
    return {"per_conic": per, "through_rep": rep.incident, "ordinary": rep.ordinary,
            "on_lines": any(l.startswith("L") for l in rep.incident)}


# -- iteration -------------------------------------------------------------------------

def iterate_pullback(k: int, data: KleinData | None = None, allow_long: bool = False) -> dict:
    """Pullback chain (grad^j)^*(Phi_21) for j <= k and its factorization.

    For k >= 2 also the tangency evidence at the 42 nodes: the newest factor
    is smooth there, tangent to the conic and transverse to the line; and
    the gradient map sends each node to a node.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > 2 and not allow_long:
        raise ValueError("k > 2 is a long-running computation")
    data = data or klein_data()
    forms = [data.cat.phi21]
    factors = [data.cat.phi21]
    for j in range(1, k + 1):
        nxt = data.grad.pullback(forms[-1])
        try:
            new = divide_exact(nxt, forms[-1])
        except NotDivisible as exc:
            raise ArrangementError(f"step {j}: pullback not divisible by the previous form") from exc
        if j >= 2:
            direct = data.grad.pullback(factors[-1])
            if direct != new:
                raise ArrangementError(f"step {j}: new factor differs from the pullback of the last one")
        forms.append(nxt)
        factors.append(new)
    out = {"k": k, "degrees": [f.degree() for f in forms], "factor_degrees": [f.degree() for f in factors],
           "forms": forms, "factors": factors}
    if k >= 2:
        nodes = {q for P in data.polars() for q in P.nodes}
        tang = []
        newest = factors[-1]
        grad_new = newest.gradient()
        for P in data.polars():
            for q in P.nodes:
                g = [evaluate(c, q) for c in grad_new]
                row = {"polar": P.index,
                       "vanishes": evaluate(newest, q).is_zero(),
                       "smooth": not all(c.is_zero() for c in g),
                       "tangent_to_conic": _parallel(g, _gradient_at(P.conic, q)),
                       "tangent_to_line": _parallel(g, _gradient_at(P.axis, q)),
                       "image_is_node": ProjPoint(data.grad(q)) in nodes}
                tang.append(row)
        out["tangency"] = tang
    return out


# -- census certificate ------------------------------------------------------------------

def census_certificate(census: Census, arr: Arrangement) -> dict:
    """Components, weighted representatives and the resulting census, sealed."""
    from .certificate import seal
    T = arr.components[0][1].tower
    return seal({
        "kind": "census",
        "version": 1,
        "tower": T.descriptor(),
        "components": [[l, str(f)] for l, f in arr.components],
        "reports": [r.summary() for r in census.reports],
        "t": census.as_dict(),
    })


def recheck_census(cert: dict) -> dict:
    """Replay a census certificate: each representative lies on exactly the
    recorded components, with independent tangents when marked ordinary,
    and the weighted counts add up to the recorded census."""
    from .certificate import verify_seal
    verify_seal(cert)
    T = FieldTower.from_descriptor(cert["tower"])
    comps = [(l, MPoly.parse(s, T)) for l, s in cert["components"]]
    arr = Arrangement(comps)
    incident_ok, ordinary_ok = True, True
    t = {}
    for rep in cert["reports"]:
        PT = FieldTower.from_descriptor(rep["tower"])
        P = ProjPoint(tuple(PT.parse(c) for c in rep["point"]))
        inc = arr.incident(P)
        if inc != rep["incident"] or len(inc) != rep["multiplicity"]:
            incident_ok = False
            continue
        if rep["ordinary"]:
            ordinary_ok &= is_ordinary([(l, f) for l, f in comps if l in inc], P)[0]
        t[str(len(inc))] = t.get(str(len(inc)), 0) + rep["weight"]
    out = {"integrity": True, "incidences": incident_ok, "ordinary": ordinary_ok,
           "census": t == cert["t"]}
    out["ok"] = all(out.values())
    return out
