"""Ideals of finite point sets, symbolic-power membership and certificates
for the failure of I^(3) in I^2."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .certificate import IntegrityError, seal, verify_seal
from .exactnum import FieldTower, QQ, cube_root_field
from .groebner import BudgetExceeded, GroebnerResult, basis_hash, buchberger, is_groebner, normal_form
from .linalg import Echelon, kernel, monomials
from .mpoly import MPoly, evaluate
from .symmetry import ProjPoint

log = logging.getLogger(__name__)

CERT_VERSION = 1


# -- point sets and their ideals -------------------------------------------------------

@dataclass
class PointSet:
    points: list
    label: str = ""

    def __post_init__(self):
        pts = [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in self.points]
        seen = set()
        for p in pts:
            key = (p.tower, p)
            if key in seen:
                raise ValueError(f"repeated point {p}")
            seen.add(key)
        self.points = pts

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _split(T: FieldTower, raw, B: FieldTower):
    """Coordinates of a raw element of T over the prefix tower B."""
    if T == B:
        return [raw]
    if B.base is None:
        return list(raw) if T.base is not None else [raw]
    n = B.size
    return [tuple(raw[i:i + n]) for i in range(0, T.size, n)]


def evaluation_rows(points: PointSet, d: int, B: FieldTower):
    """Linear conditions over B on coefficient vectors of degree-d forms."""
    mons = monomials(d)
    rows = []
    for p in points:
        T = p.tower
        if not T.is_extension_of(B):
            raise ValueError(f"point tower {T!r} does not contain {B!r}")
        c = [q.raw for q in p.coords]
        pw = []
        for v in range(3):
            acc = [T.one_raw]
            for _ in range(d):
                acc.append(T.mul(acc[-1], c[v]))
            pw.append(acc)
        vals = [T.mul(T.mul(pw[0][e[0]], pw[1][e[1]]), pw[2][e[2]]) for e in mons]
        parts = [_split(T, v, B) for v in vals]
        for k in range(len(parts[0])):
            rows.append({j: parts[j][k] for j in range(len(mons)) if not B.is_zero(parts[j][k])})
    return rows, mons


def _vec_to_poly(B: FieldTower, vec: dict, mons) -> MPoly:
    return MPoly(B, {mons[j]: v for j, v in vec.items()}, _trusted=True)


def _poly_to_vec(f: MPoly, index: dict) -> dict:
    return {index[e]: c for e, c in f.terms.items()}


@dataclass
class Ideal:
    tower: FieldTower
    generators: list
    hilbert: dict = field(default_factory=dict)
    label: str = ""
    _gb: dict = field(default_factory=dict, repr=False)

    def power(self, m: int) -> Ideal:
        gens = []
        for combo in combinations_with_replacement(range(len(self.generators)), m):
            prod = self.generators[combo[0]]
            for i in combo[1:]:
                prod = prod * self.generators[i]
            gens.append(prod)
        return Ideal(self.tower, gens, label=f"{self.label}^{m}")

    def generator_degrees(self):
        return [g.degree() for g in self.generators]

    def groebner(self, truncate: int | None = None, **budget) -> GroebnerResult:
        if truncate not in self._gb:
            self._gb[truncate] = buchberger(self.generators, truncate=truncate, **budget)
        return self._gb[truncate]

    def contains(self, f: MPoly) -> bool:
        return self.groebner(truncate=f.degree()).contains(f)


def point_ideal(points: PointSet, base: FieldTower | None = None, max_degree: int = 60) -> Ideal:
    """Saturated ideal of a finite point set, generated degree by degree.

    Forms of degree d vanishing on the points are the kernel of the
    evaluation map; the kernel is computed over ``base`` (the coordinates of
    each value over ``base`` give separate linear conditions), so a point set
    stable under the Galois group of its towers over ``base`` yields an ideal
    defined over ``base``.  Once the Hilbert function reaches ``len(points)``
    at degree D, the ideal is generated in degrees <= D + 1; degree D + 2 is
    checked as well.
    """
    if base is None:
        base = points.points[0].tower
    s = len(points)
    gens = []
    hilbert = {}
    prev_kernel = []
    stable_at = None
    d = 0
    while d <= max_degree:
        rows, mons = evaluation_rows(points, d, base)
        index = {e: j for j, e in enumerate(mons)}
        ker = kernel(base, rows, len(mons))
        hilbert[d] = len(mons) - len(ker)
        generated = Echelon(base)
        for g in prev_kernel:
            for v in MPoly.gens(base):
                generated.add(_poly_to_vec(g * v, index))
        for vec in ker:
            if generated.add(vec):
                gens.append(_vec_to_poly(base, vec, mons))
        if len(generated) != len(ker):
            raise RuntimeError("generated part exceeds the kernel")
        prev_kernel = [_vec_to_poly(base, v, mons) for v in ker]
        if hilbert[d] == s and stable_at is None:
            stable_at = d
        if stable_at is not None and d >= stable_at + 2:
            break
        d += 1
    else:
        raise RuntimeError(f"Hilbert function did not reach {s} by degree {max_degree}")
    for g in gens:
        for p in points:
            if not evaluate(g, p).is_zero():
                raise RuntimeError("a generator does not vanish at a point")
    new_after = [g for g in gens if g.degree() > stable_at + 1]
    if new_after:
        raise RuntimeError("new generators above the regularity bound")
    return Ideal(base, gens, hilbert, points.label)


# -- symbolic powers -----------------------------------------------------------------

def partials_up_to(f: MPoly, order: int) -> dict:
    out = {(0, 0, 0): f}
    layer = dict(out)
    for _ in range(order):
        nxt = {}
        for a, g in layer.items():
            for v in range(3):
                b = list(a)
                b[v] += 1
                b = tuple(b)
                if b not in out and b not in nxt:
                    nxt[b] = g.diff(v)
        out.update(nxt)
        layer = nxt
    return out


def symbolic_membership(f: MPoly, points, m: int, partials: dict | None = None) -> tuple:
    """Does ``f`` vanish to order >= m at every point?  Returns (bool, transcript)."""
    if m < 1:
        raise ValueError("m must be positive")
    parts = partials if partials is not None else partials_up_to(f, m - 1)
    transcript = []
    ok = True
    for p in points:
        bad = [list(a) for a, g in sorted(parts.items()) if sum(a) < m and not evaluate(g, p).is_zero()]
        transcript.append({"point": p.text(), "tower": p.tower.descriptor(),
                           "partials_checked": sum(1 for a in parts if sum(a) < m),
                           "nonvanishing": bad})
        if bad:
            ok = False
    return ok, transcript


# -- ordinary powers: membership by linear algebra ---------------------------------------

def membership_linear(f: MPoly, generators) -> dict:
    """Decide ``f in (generators)`` in the degree of ``f`` by spanning
    {monomial * g} over the coefficient field (an independent check of the
    Groebner normal form)."""
    D = f.degree()
    T = f.tower
    for g in generators:
        if g.tower.is_extension_of(T):
            T = g.tower
    mons = monomials(D)
    index = {e: j for j, e in enumerate(mons)}
    E = Echelon(T)
    for g in generators:
        g = g.embed(T)
        k = D - g.degree()
        if k < 0:
            continue
        for e in monomials(k):
            sh = MPoly(T, {e: T.one_raw}, _trusted=True)
            E.add(_poly_to_vec(sh * g, index))
    member = E.contains(_poly_to_vec(f.embed(T), index))
    return {"degree": D, "dimension": len(mons), "span_rank": len(E), "member": member}


# -- the three containment cases -----------------------------------------------------------

def dual_hesse_points():
    L = cube_root_field(QQ)
    w = L.generator()
    pts = [ProjPoint((1, 0, 0), L), ProjPoint((0, 1, 0), L), ProjPoint((0, 0, 1), L)]
    for a in range(3):
        for b in range(3):
            pts.append(ProjPoint((L.one(), w ** a, w ** b)))
    return L, PointSet(pts, "dual-Hesse triple points")


def dual_hesse_witness(L: FieldTower) -> MPoly:
    return MPoly.parse("(x^3-y^3)*(y^3-z^3)*(z^3-x^3)", L)


def dual_hesse_lines(L: FieldTower):
    w = L.generator()
    x, y, z = MPoly.gens(L)
    out = []
    for u, v in ((x, y), (y, z), (z, x)):
        for k in range(3):
            out.append(u - v.scale(w ** k))
    return out


def containment_certificate(case: str, base: FieldTower, witness: MPoly, points, m: int,
                            ideal: Ideal, square: Ideal, symbolic: tuple, groebner=None,
                            linear=None, extra=None) -> dict:
    ok_sym, transcript = symbolic
    cert = {
        "version": CERT_VERSION,
        "case": case,
        "tower": base.descriptor(),
        "witness": str(witness),
        "m": m,
        "symbolic": {"holds": ok_sym, "points": len(transcript), "transcript": transcript},
        "ideal": {"generators": [str(g) for g in ideal.generators],
                  "degrees": ideal.generator_degrees(),
                  "hilbert": {str(k): v for k, v in ideal.hilbert.items()}},
        "square": {"generators": len(square.generators)},
    }
    if groebner is not None:
        nf = groebner.normal_form(witness)
        cert["groebner"] = {"basis": [str(g) for g in groebner.basis],
                            "basis_sha256": groebner.digest(),
                            "truncated_at": groebner.truncated_at,
                            "normal_form": str(nf), "nonzero": not nf.is_zero(),
                            "stats": groebner.stats}
    if linear is not None:
        cert["linear_algebra"] = linear
    if extra:
        cert.update(extra)
    directions = [ok_sym]
    if groebner is not None:
        directions.append(cert["groebner"]["nonzero"])
    if linear is not None:
        directions.append(not linear["member"])
    cert["containment_fails"] = all(directions) and (groebner is not None or linear is not None)
    return seal(cert)


def case_dual_hesse() -> dict:
    L, pts = dual_hesse_points()
    F = dual_hesse_witness(L)
    lines = dual_hesse_lines(L)
    prod = lines[0]
    for l in lines[1:]:
        prod = prod * l
    if prod != F:
        raise RuntimeError("the nine lines do not multiply to the witness")
    I = point_ideal(pts, L)
    I2 = I.power(2)
    gb = I2.groebner(truncate=F.degree())
    return containment_certificate("dual_hesse", L, F, pts, 3, I, I2,
                                   symbolic_membership(F, pts, 3), groebner=gb,
                                   linear=membership_linear(F, I2.generators))


def klein_singular_points(data=None):
    from .arrangement import klein_data
    data = data or klein_data()
    return data, PointSet(list(data.orbit("O21")) + list(data.orbit("O28")), "Sing(K1)")


def case_klein_lines(data=None, with_groebner: bool = True, **budget) -> dict:
    """Phi_21 against the 49 singular points of Klein's line arrangement.

    The point set is a union of Galois-stable orbits over QQ(zeta_7)/QQ, so
    its ideal is computed over QQ; the Groebner basis of I^2 is truncated at
    degree 21, which decides membership of the degree-21 witness.
    """
    data, pts = klein_singular_points(data)
    F = data.cat.phi21
    I = point_ideal(pts, QQ)
    I2 = I.power(2)
    sym = symbolic_membership(F, pts, 3)
    gb = None
    extra = {}
    if with_groebner:
        try:
            gb = I2.groebner(truncate=F.degree(), **budget)
        except BudgetExceeded as exc:
            extra["groebner_checkpoint"] = exc.checkpoint
            extra["groebner_status"] = f"incomplete: {exc.reason}"
    return containment_certificate("klein_lines", QQ, F, pts, 3, I, I2, sym, groebner=gb,
                                   linear=membership_linear(F, I2.generators), extra=extra)


def mult3_representatives(data=None):
    """Representatives of the points of multiplicity >= 3 of the conic-line
    arrangement: the nine preimages of [1:1:1] and of p_21.  Every such point
    is a group translate of one of them."""
    from .arrangement import fibre_analysis, klein_data
    data = data or klein_data()
    reps = []
    for which in (28, 21):
        for _, q in fibre_analysis(data, which)["fibre"]:
            reps.append((q, which))
    return data, reps


def case_klein_mult3(data=None, with_groebner: bool = False, **budget) -> dict:
    """Phi_63 against the 441 points of multiplicity >= 3.

    Symbolic side: Phi_63 is group invariant, so order >= 3 at the 18
    representatives gives order >= 3 on all 441 points.  The ideal I_3 is
    generated by the pullbacks of the generators of the 49-point ideal; the
    Groebner side (truncated at degree 63) is long-running and optional.
    """
    data, reps = mult3_representatives(data)
    F = data.phi(63)
    lam = {k: str(v) for k, v in _invariance_via_components(data).items()}
    pts = PointSet([q for q, _ in reps], "Sing3(K) representatives")
    sym = symbolic_membership(F, pts, 3)
    extra = {"invariance": lam, "representative_weights": [w for _, w in reps],
             "points_covered": 9 * 28 + 9 * 21}
    _, base49 = klein_singular_points(data)
    I49 = point_ideal(base49, QQ)
    I3 = Ideal(QQ, [data.grad.pullback(g) for g in I49.generators], label="I3")
    for q, _ in reps:
        for g in I3.generators:
            if not evaluate(g, q).is_zero():
                raise RuntimeError("a pulled-back generator misses a representative point")
    I3sq = I3.power(2)
    gb = None
    if with_groebner:
        try:
            gb = I3sq.groebner(truncate=F.degree(), **budget)
        except BudgetExceeded as exc:
            extra["groebner_checkpoint"] = exc.checkpoint
            extra["groebner_status"] = f"incomplete: {exc.reason}"
    else:
        extra["groebner_status"] = "skipped-long-running"
    cert = containment_certificate("klein_mult3", QQ, F, pts, 3, I3, I3sq, sym, groebner=gb, extra=extra)
    return cert


def case_klein_i2(data=None, with_groebner: bool = True, **budget) -> dict:
    """Phi_6 * Phi_63 against all 483 singular points of the conic-line
    arrangement (the 42 nodes and the 441 points of multiplicity >= 3).

    Long-running: the point ideal is computed over QQ from the full orbits,
    and its square's Groebner basis is truncated at degree 69.
    """
    from .symmetry import orbit
    data, reps = mult3_representatives(data)
    F = data.cat.phi6 * data.phi(63)
    nodes = list(data.orbit("O42"))
    pts = list(nodes)
    for q, w in reps:
        orb = orbit(q, data.G)
        if len(orb) != w:
            raise RuntimeError(f"orbit of size {len(orb)} where {w} was expected")
        pts += orb
    P = PointSet(pts, "Sing(K)")
    check = PointSet(nodes[:1] + [q for q, _ in reps], "representatives")
    # order >= 3 on one node and on the representatives spreads to every
    # point by invariance of F
    sym = symbolic_membership(F, check, 3)
    I = point_ideal(P, QQ, max_degree=80)
    I2 = I.power(2)
    gb, extra = None, {"points_covered": len(P)}
    if with_groebner:
        try:
            gb = I2.groebner(truncate=F.degree(), **budget)
        except BudgetExceeded as exc:
            extra["groebner_checkpoint"] = exc.checkpoint
            extra["groebner_status"] = f"incomplete: {exc.reason}"
    return containment_certificate("klein_i2", QQ, F, check, 3, I, I2, sym, groebner=gb, extra=extra)


def _invariance_via_components(data) -> dict:
    """Each generator permutes the 42 components up to scalars, so it maps
    Phi_63 (their product up to one scalar) to a multiple of itself; the
    multiple is then read off at a point where Phi_63 does not vanish."""
    from .mpoly import is_proportional
    from .symmetry import _apply_raw
    arr = data.arrangement()
    comps = [f for _, f in arr.components]
    F = data.phi(63)
    prod = arr.product()
    from .mpoly import proportional
    proportional(prod, F.embed(prod.tower))
    out = {}
    probe = (1, 2, 3)
    v = evaluate(F, probe)
    if v.is_zero():
        raise RuntimeError("probe point lies on the arrangement")
    for name, M in data.G.generators.items():
        images = [M.act_on_form(f) for f in comps]
        for img in images:
            if not any(img.degree() == f.degree() and is_proportional(img, f) for f in comps):
                raise RuntimeError(f"generator {name} does not permute the components")
        out[name] = evaluate(F, _apply_raw(M, probe)) / v
    return out


def nested_containment_family(data=None) -> dict:
    """Symbolic direction for X = T and X = T u O_42 with Phi_189.

    On O_42: Phi_21, Phi_42, Phi_126 each vanish at every node, so their
    product has order >= 3 there (checked directly at one node as well).
    On T: Phi_189 = Phi_126 * Phi_63 and Phi_63 has order >= 3 on the 441
    points of multiplicity >= 3; the remaining points of T are handled by
    the pullback lemma (order of f o grad at q is at least the order of f
    at grad(q)), recorded as a derived implication.
    """
    from .arrangement import klein_data
    data = data or klein_data()
    phi126, phi42, phi21 = data.phi(126), data.phi(42), data.phi(21)
    phi189 = data.phi(189)
    prod = phi126 * phi42 * phi21
    if prod != phi189:
        raise RuntimeError("Phi_189 is not Phi_126 * Phi_42 * Phi_21")
    nodes = [q for P in data.polars() for q in P.nodes]
    vanish = {name: all(evaluate(f, q).is_zero() for q in nodes)
              for name, f in (("phi21", phi21), ("phi42", phi42), ("phi126", phi126))}
    probe_ok, probe_tr = symbolic_membership(phi189, PointSet([nodes[0]]), 3)
    _, reps = mult3_representatives(data)
    sym63 = symbolic_membership(data.phi(63), PointSet([q for q, _ in reps]), 3)[0]
    sym189_reps = symbolic_membership(phi189, PointSet([q for q, _ in reps]), 3)[0]
    o42_ok = all(vanish.values()) and probe_ok
    t_ok = sym63 and sym189_reps
    return {
        "factorization": True,
        "O42": {"factors_vanish": vanish, "direct_order3_at_node": probe_ok, "holds": o42_ok},
        "T": {"phi63_order3_on_441": sym63, "phi189_order3_at_representatives": sym189_reps,
              "other_points": "pullback lemma (derived)", "holds": t_ok},
        "families": {"X=T": t_ok, "X=T+O42": t_ok and o42_ok},
        "non_membership": "derived from the klein_mult3 case by the pullback argument",
    }


def _span_dim(gens, d: int, T: FieldTower) -> int:
    mons = monomials(d)
    index = {e: j for j, e in enumerate(mons)}
    E = Echelon(T)
    for g in gens:
        k = d - g.degree()
        if k < 0:
            continue
        for e in monomials(k):
            E.add(_poly_to_vec(MPoly(T, {e: T.one_raw}, _trusted=True) * g, index))
    return len(E)


def _ideal_replay(gens, pts, hilbert: dict) -> bool:
    """The stored generators vanish on the points and span, degree by
    degree, a space of codimension ``hilbert[d]``.  Up to the degree where
    the Hilbert function has reached the number of points this pins the
    generated ideal down as the full ideal of the points."""
    for g in gens:
        for p in pts:
            if not evaluate(g, p).is_zero():
                return False
    T = gens[0].tower
    s = len(pts)
    stable = min(d for d, v in hilbert.items() if v == s)
    for d in range(0, stable + 2):
        if d not in hilbert:
            return False
        if (d + 1) * (d + 2) // 2 - _span_dim(gens, d, T) != hilbert[d]:
            return False
    return True


# -- recheck ---------------------------------------------------------------------------

def recheck_certificate(cert: dict, replay_spairs: bool = True) -> dict:
    """Replay a containment certificate: integrity hash, the stored ideal's
    generators vanish on the points, the witness's derivative transcript, and
    the normal form of the witness modulo the stored basis."""
    verify_seal(cert)
    T = FieldTower.from_descriptor(cert["tower"])
    F = MPoly.parse(cert["witness"], T)
    results = {"integrity": True}
    m = cert["m"]
    pts = []
    for entry in cert["symbolic"]["transcript"]:
        PT = FieldTower.from_descriptor(entry["tower"])
        pts.append(ProjPoint(tuple(PT.parse(c) for c in entry["point"])))
    ok, _ = symbolic_membership(F.embed(T), pts, m)
    results["symbolic"] = ok == cert["symbolic"]["holds"] and ok
    hilbert = {int(k): v for k, v in cert["ideal"]["hilbert"].items()}
    if hilbert and len(pts) == max(hilbert.values()):
        gens = [MPoly.parse(s, T) for s in cert["ideal"]["generators"]]
        results["ideal_replay"] = _ideal_replay(gens, pts, hilbert)
    if "groebner" in cert:
        basis = [MPoly.parse(s, T) for s in cert["groebner"]["basis"]]
        if basis_hash(T, basis) != cert["groebner"]["basis_sha256"]:
            raise IntegrityError("stored basis does not match its hash")
        nf = normal_form(F, basis)
        results["normal_form"] = str(nf) == cert["groebner"]["normal_form"] and not nf.is_zero()
        gens = [MPoly.parse(s, T) for s in cert["ideal"]["generators"]]
        sq = [gens[i] * gens[j] for i in range(len(gens)) for j in range(i, len(gens))]
        D = cert["groebner"]["truncated_at"]
        # I^2 inside (basis), basis a (truncated) Groebner basis, nonzero normal
        # form: together these put the witness outside I^2
        results["square_reduces_to_zero"] = all(
            normal_form(g, basis).is_zero() for g in sq if D is None or g.degree() <= D)
        if replay_spairs:
            results["basis_is_groebner"] = is_groebner(basis, D)
    results["ok"] = all(v for v in results.values())
    return results
