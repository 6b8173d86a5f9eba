"""Differential covariants and the invariant catalogue of Klein's quartic."""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactnum import QQ, FieldElement, mpq
from .mpoly import MPoly, evaluate, substitute


def det(m):
    """Determinant of a square matrix of polynomials by cofactor expansion."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        return m[0][0] - m[0][0]
    return acc


def hessian_matrix(f: MPoly):
    grad = f.gradient()
    return [[g.diff(j) for j in range(3)] for g in grad]


def hessian(f: MPoly) -> MPoly:
    if (f.degree() or 0) < 2:
        raise ValueError("hessian needs degree >= 2")
    return det(hessian_matrix(f))


def bordered_hessian(f: MPoly, g: MPoly) -> MPoly:
    """4x4 determinant: Hessian of f bordered by the gradient of g."""
    if (f.degree() or 0) < 2 or (g.degree() or 0) < 1:
        raise ValueError("bordered hessian needs deg f >= 2 and deg g >= 1")
    H = hessian_matrix(f)
    dg = g.gradient()
    zero = MPoly(f.tower, {})
    m = [H[i] + [dg[i]] for i in range(3)] + [list(dg) + [zero]]
    return det(m)


def jacobian_det(f: MPoly, g: MPoly, h: MPoly) -> MPoly:
    for p in (f, g, h):
        if (p.degree() or 0) < 1:
            raise ValueError("jacobian needs nonconstant forms")
    return det([list(f.gradient()), list(g.gradient()), list(h.gradient())])


def polar(f: MPoly, point) -> MPoly:
    """``a f_x + b f_y + c f_z`` for the point ``[a:b:c]``."""
    coords = getattr(point, "coords", point)
    if (f.degree() or 0) < 1:
        raise ValueError("polar of a constant")
    if all((c.is_zero() if isinstance(c, FieldElement) else c == 0) for c in coords):
        raise ValueError("polar with respect to the zero vector")
    T = f.tower
    for c in coords:
        if isinstance(c, FieldElement) and c.tower.is_extension_of(T):
            T = c.tower
    f = f.embed(T)
    acc = MPoly(T, {})
    for c, d in zip(coords, f.gradient()):
        acc = acc + d.scale(c)
    return acc


class GradientMap:
    """The morphism ``p -> (f_x(p) : f_y(p) : f_z(p))``."""

    def __init__(self, f: MPoly):
        self.source = f
        self.components = f.gradient()

    def __call__(self, point):
        return tuple(evaluate(c, point) for c in self.components)

    def pullback(self, g: MPoly) -> MPoly:
        return substitute(g, *self.components)


def pullback(gmap: GradientMap, f: MPoly) -> MPoly:
    return gmap.pullback(f)


PHI4_TEXT = "x^3*y+y^3*z+z^3*x"
PHI6_TEXT = "x*y^5+y*z^5+z*x^5-5*x^2*y^2*z^2"


@dataclass
class InvariantCatalogue:
    phi4: MPoly
    phi6: MPoly
    phi14: MPoly
    phi21: MPoly
    # phi_d = scale * (defining determinant)
    normalizations: dict = field(default_factory=dict)

    def forms(self) -> dict:
        return {"phi4": self.phi4, "phi6": self.phi6, "phi14": self.phi14, "phi21": self.phi21}

    def signature(self, point) -> tuple:
        """Which of (phi4, phi6, phi14, phi21) vanish at the point."""
        return tuple(evaluate(f, point).is_zero() for f in self.forms().values())

    def dump(self) -> dict:
        return {name: {"degree": f.degree(), "poly": str(f), "sha256": f.content_hash()}
                for name, f in self.forms().items()}


def build_catalogue() -> InvariantCatalogue:
    phi4 = MPoly.parse(PHI4_TEXT, QQ)
    phi6 = hessian(phi4).scale(mpq(-1, 54))
    phi14 = bordered_hessian(phi4, phi6).scale(mpq(1, 9))
    phi21 = jacobian_det(phi4, phi6, phi14).scale(mpq(1, 14))
    return InvariantCatalogue(
        phi4, phi6, phi14, phi21,
        normalizations={"phi6": "-1/54*H(phi4)", "phi14": "1/9*BH(phi4,phi6)",
                        "phi21": "1/14*J(phi4,phi6,phi14)"})


def steinerian(cat: InvariantCatalogue) -> MPoly:
    return cat.phi4 ** 3 * 4 + cat.phi6 ** 2


def steinerian_check(cat: InvariantCatalogue, orbit21, control_point=None) -> dict:
    """Certificate that ``4 phi4^3 + phi6^2`` vanishes on the 21-point orbit
    and is singled out there by the ratio ``phi6^2 / phi4^3 = -4``."""
    S = steinerian(cat)
    values = []
    ratios = set()
    for p in orbit21:
        values.append(evaluate(S, p).is_zero())
        a = evaluate(cat.phi4, p)
        b = evaluate(cat.phi6, p)
        ratios.add(str(b * b / (a * a * a)))
    cert = {
        "form": "4*phi4^3+phi6^2",
        "vanishes_on_orbit": all(values),
        "orbit_size": len(values),
        "ratios": sorted(ratios),
    }
    if control_point is not None:
        v = evaluate(S, control_point)
        cert["control_value"] = str(v)
        cert["control_nonzero"] = not v.is_zero()
    cert["ok"] = cert["vanishes_on_orbit"] and cert["ratios"] == ["-4"] and \
        cert.get("control_nonzero", True)
    return cert


def jacobian_syzygy_dimension(f: MPoly, r: int) -> int:
    """Dimension of the space of (a, b, c) of degree ``r`` with
    a f_x + b f_y + c f_z = 0, by exact linear algebra."""
    from .linalg import Echelon, monomials
    if r < 0:
        return 0
    grad = [g for g in f.gradient()]
    d = f.degree() - 1 + r
    index = {e: j for j, e in enumerate(monomials(d))}
    E = Echelon(f.tower)
    n = 0
    for g in grad:
        for e in monomials(r):
            n += 1
            row = {index[(a[0] + e[0], a[1] + e[1], a[2] + e[2])]: c for a, c in g.terms.items()}
            E.add(row)
    return n - len(E)


def base_point_certificate(f: MPoly) -> dict:
    """The partials of ``f`` have no common projective zero iff their ideal
    contains a power of each variable; read off the leading monomials of a
    Groebner basis."""
    from .groebner import buchberger
    gb = buchberger(list(f.gradient()))
    leads = [g.leading_monomial() for g in gb.basis]
    pure = {}
    for v in range(3):
        powers = [e[v] for e in leads if sum(e) == e[v]]
        pure["xyz"[v]] = min(powers) if powers else None
    return {"basis_size": len(gb.basis), "basis_sha256": gb.digest(), "pure_powers": pure,
            "base_point_free": all(p is not None for p in pure.values())}
