"""Named verification suites and the report they produce."""

from __future__ import annotations

import json
import logging
import platform
import random
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arrangement import (ArrangementError, Census, KleinData, SingularityReport, census_K,
                          census_certificate, census_sub, chern_numbers, conic_inequality_check,
                          conic_o56_incidences, fibre_analysis, harbourne_index, incidence_counts,
                          iterate_pullback, klein_lines_pairs, recheck_census, tjurina_and_freeness)
from .cache import Cache
from .certificate import IntegrityError, digest
from .covariant import PHI6_TEXT, base_point_certificate, hessian, jacobian_syzygy_dimension, steinerian_check
from .exactnum import FieldTower
from .groebner import BudgetExceeded
from .ideals import (case_dual_hesse, case_klein_i2, case_klein_lines, case_klein_mult3,
                     nested_containment_family, recheck_certificate)
from .mpoly import MPoly, NotProportional, divides, evaluate, proportional
from .symmetry import GROUP_ORDER, GroupTable, ProjPoint, build_group, check_invariance, classify_point

log = logging.getLogger(__name__)

PASS, FAIL, SKIP = "pass", "fail", "skipped-long-running"

SUITES = ("group", "orbits", "catalogue", "polars", "census", "indices", "chern",
          "freeness", "containment", "iterate")
CASES = ("dual_hesse", "klein_lines", "klein_mult3", "klein_i2")
DEFAULT_CASES = ("dual_hesse", "klein_lines", "klein_mult3")


class UsageError(ValueError):
    pass


def exact(q) -> dict:
    """An exact rational as a string, with a decimal for display only."""
    q = Fraction(q)
    text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return {"exact": text, "decimal": f"{float(q):.6g}"}


@dataclass
class Flags:
    case: str | None = None
    long: bool = False
    no_cache: bool = False
    budget_spairs: int | None = None
    budget_wall: float | None = None
    k: int = 2
    certs: str | None = None
    spot_check: int = 8

    def budget(self) -> dict:
        return {"max_spairs": self.budget_spairs, "wall": self.budget_wall}


@dataclass
class CheckResult:
    id: str
    claim: str
    status: str
    values: dict
    runtime: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    toolchain: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    generated_at: str = ""

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def as_dict(self, timestamps: bool = True) -> dict:
        checks = sorted(self.checks, key=lambda c: c.id)
        out = {"suite": self.suite, "flags": self.flags, "toolchain": self.toolchain,
               "artifacts": dict(sorted(self.artifacts.items())),
               "checks": [c.as_dict() for c in checks]}
        if timestamps:
            out["generated_at"] = self.generated_at
        else:
            for c in out["checks"]:
                c.pop("runtime")
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [("check", "status", "time/s", "values")]
        for c in sorted(self.checks, key=lambda c: c.id):
            rows.append((c.id, c.status, f"{c.runtime:.2f}", _short(c.values)))
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        lines = [f"{a:<{w0}}  {b:<{w1}}  {t:>7}  {v}" for a, b, t, v in rows]
        counts = {st: sum(1 for c in self.checks if c.status == st) for st in (PASS, FAIL, SKIP)}
        lines.append(", ".join(f"{n} {st}" for st, n in counts.items()))
        return "\n".join(lines)


def _short(values: dict, width: int = 100) -> str:
    parts = []
    for k, v in values.items():
        if isinstance(v, dict) and set(v) == {"exact", "decimal"}:
            v = f"{v['exact']} (~{v['decimal']})"
        parts.append(f"{k}={v}")
    text = "; ".join(str(p) for p in parts)
    return text if len(text) <= width else text[:width - 3] + "..."


def toolchain() -> dict:
    import gmpy2
    return {"python": platform.python_version(), "gmpy2": gmpy2.version(), "kleinpolars": __version__}


class Session:
    """Shared state of one run: cached artifacts and intermediate results."""

    def __init__(self, flags: Flags, cache: Cache | None = None):
        self.flags = flags
        self.cache = cache or Cache(enabled=not flags.no_cache)
        self.artifacts = {}
        self._data = None
        self._census = None
        self._certs = {}

    # -- cached artifacts

    @property
    def data(self) -> KleinData:
        if self._data is None:
            self._data = KleinData(self._group())
        return self._data

    def _group(self) -> GroupTable:
        entry = self.cache.get("group_table", {"generators": "klein-rho-g-h-i"})
        if entry is not None:
            G = GroupTable.from_dump(entry.payload)
            self._spot_check_group(G)
        else:
            G = build_group()
            self.cache.put("group_table", {"generators": "klein-rho-g-h-i"}, G.dump())
        self.artifacts["group_table"] = G.dump()["sha256"]
        return G

    def _spot_check_group(self, G: GroupTable):
        """A cached table must contain the generators, be closed on a random
        sample of products, and have the expected order."""
        if len(G) != GROUP_ORDER:
            raise IntegrityError("cached group table has the wrong order")
        for name, g in G.generators.items():
            if g not in G:
                raise IntegrityError(f"cached group table lacks generator {name}")
        rng = random.Random(len(G))
        for _ in range(self.flags.spot_check):
            a, b = rng.choice(G.elements), rng.choice(G.elements)
            if a * b not in G:
                raise IntegrityError("cached group table is not closed")

    def census(self) -> Census:
        if self._census is None:
            inputs = {"arrangement": "klein-42", "group": self.data.G.dump()["sha256"]}
            entry = self.cache.get("census_K", inputs)
            if entry is not None:
                replay = recheck_census(entry.payload)
                if not replay["ok"]:
                    raise IntegrityError(f"cached census fails replay: {replay}")
                self._census = _census_from_certificate(entry.payload)
                cert = entry.payload
            else:
                self._census = census_K(self.data)
                cert = census_certificate(self._census, self.data.arrangement())
                self.cache.put("census_K", inputs, cert)
            self.artifacts["census_certificate"] = cert["sha256"]
            self._certs["census.K"] = cert
        return self._census

    def containment(self, case: str, with_groebner: bool) -> dict:
        inputs = {"case": case, "groebner": with_groebner}
        entry = self.cache.get("containment", inputs)
        if entry is not None:
            cert = entry.payload
            replay = recheck_certificate(cert)
            if not replay["ok"]:
                raise IntegrityError(f"cached {case} certificate fails replay: {replay}")
        else:
            budget = self.flags.budget()
            if case == "dual_hesse":
                cert = case_dual_hesse()
            elif case == "klein_lines":
                cert = case_klein_lines(self.data, with_groebner=with_groebner, **budget)
            elif case == "klein_mult3":
                cert = case_klein_mult3(self.data, with_groebner=with_groebner, **budget)
            elif case == "klein_i2":
                cert = case_klein_i2(self.data, with_groebner=with_groebner, **budget)
            else:
                raise UsageError(f"unknown case {case!r}")
            if "groebner_checkpoint" not in cert:
                self.cache.put("containment", inputs, cert)
        self.artifacts[f"certificate:{case}"] = cert["sha256"]
        self._certs[f"containment.{case}"] = cert
        return cert

    def certificate(self, check_id: str) -> dict:
        return self._certs[check_id]

    def write_certificates(self, directory: str):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for cid, cert in sorted(self._certs.items()):
            (d / f"{cid}.json").write_text(json.dumps(cert, sort_keys=True))

    def checkpoint_path(self, name: str, state: dict) -> str:
        root = Path(self.flags.certs) if self.flags.certs else self.cache.root
        root.mkdir(parents=True, exist_ok=True)
        path = root / f"checkpoint-{name}.json"
        path.write_text(json.dumps(state))
        return str(path)


def _census_from_certificate(cert: dict) -> Census:
    reports = []
    for r in cert["reports"]:
        T = FieldTower.from_descriptor(r["tower"])
        P = ProjPoint(tuple(T.parse(c) for c in r["point"]))
        reports.append(SingularityReport(P, r["multiplicity"], r["ordinary"], r["incident"],
                                         r["weight"], r["label"]))
    return Census.from_reports(reports)


# -- the checks ------------------------------------------------------------------------

class Runner:
    def __init__(self, session: Session):
        self.s = session
        self.results = []

    def check(self, cid: str, claim: str, fn, long_running: bool = False):
        if long_running and not self.s.flags.long:
            self.results.append(CheckResult(cid, claim, SKIP, {"reason": "needs --long"}, 0.0))
            return
        t0 = time.perf_counter()
        try:
            ok, values = fn()
        except BudgetExceeded as exc:
            ref = self.s.checkpoint_path(cid, exc.checkpoint)
            ok, values = False, {"error": f"budget exceeded: {exc.reason}", "checkpoint": ref}
        except (ArrangementError, IntegrityError, NotProportional, ValueError, RuntimeError) as exc:
            log.exception("check %s raised", cid)
            ok, values = False, {"error": f"{type(exc).__name__}: {exc}"}
        status = SKIP if ok is None else (PASS if ok else FAIL)
        self.results.append(CheckResult(cid, claim, status, values, round(time.perf_counter() - t0, 3)))


def suite_group(r: Runner):
    s = r.s

    def order():
        G = s.data.G
        return len(G) == GROUP_ORDER, {"order": len(G)}

    def transpose():
        G = s.data.G
        closed = all(m.transpose() in G for m in G)
        return closed, {"closed_under_transpose": closed}

    def invols():
        H = s.data.homologies
        # a harmonic homology: the center lies off the axis
        off = all(not evaluate(h.axis, h.center).is_zero() for h in H)
        return len(H) == 21 and off, {"involutions": len(H), "centers_off_axes": off}

    def centers():
        cs = {h.center for h in s.data.homologies}
        same = cs == set(s.data.orbit("O21"))
        return same, {"centers": len(cs), "equal_to_O21": same}

    r.check("group.order", "group-closure-168", order)
    r.check("group.transpose", "group-transpose-closed", transpose)
    r.check("group.involutions", "group-21-involutions", invols)
    r.check("group.centers", "involution-centers-O21", centers)


def suite_orbits(r: Runner):
    s = r.s
    expected = {"O28": 28, "O24": 24, "O21": 21, "O56": 56}

    def sizes():
        got = {k: len(s.data.orbit(k)) for k in expected}
        return got == expected, got

    def noncontainment():
        cat = s.data.cat
        reps = {"O21": s.data.p21, "O28": s.data.p28, "O24": s.data.p24, "O56": s.data.p56}
        names = ("phi4", "phi6", "phi14", "phi21")
        must_miss = {"O21": ("phi4", "phi6", "phi14"), "O28": ("phi4", "phi6", "phi14"),
                     "O24": ("phi14", "phi21"), "O56": ("phi6", "phi21")}
        out, ok = {}, True
        for k, p in reps.items():
            sig = dict(zip(names, cat.signature(p)))
            out[k] = sorted(n for n, z in sig.items() if z)
            ok &= not any(sig[n] for n in must_miss[k])
        return ok, {"vanishing_at_representative": out}

    def classification():
        d = s.data
        special = {"O21": d.orbit("O21"), "O28": d.orbit("O28")}
        reps = {"O21": d.p21, "O28": d.p28, "O24": d.p24, "O56": d.p56,
                "O42": d.orbit("O42")[0]}
        got = {k: classify_point(p, d.cat, special) for k, p in reps.items()}
        return all(got[k] == k for k in got), got

    def incidences():
        inc = incidence_counts(s.data)
        per21 = sorted({row["O21"] for row in inc["rows"]})
        per28 = sorted({row["O28"] for row in inc["rows"]})
        return per21 == [4] and per28 == [4], {"O21_per_line": per21, "O28_per_line": per28}

    def images():
        d = s.data
        targets = {"O21": ("O21", d.p21), "O56": ("O28", d.p56), "O42": ("O42", d.orbit("O42")[0])}
        got = {}
        for src, (dst, p) in targets.items():
            img = ProjPoint(d.grad(p))
            got[src] = dst if any(img == q for q in d.orbit(dst)) else "elsewhere"
        return all(got[k] == targets[k][0] for k in got), {"image_orbit": got}

    r.check("orbits.sizes", "special-orbit-sizes", sizes)
    r.check("orbits.gradient_images", "gradient-maps-orbits-to-orbits", images)
    r.check("orbits.noncontainment", "orbit-noncontainment-clauses", noncontainment)
    r.check("orbits.classification", "orbit-signatures", classification)
    r.check("orbits.incidences", "four-points-per-line", incidences)


def suite_catalogue(r: Runner):
    s = r.s

    def hess():
        cat = s.data.cat
        H = hessian(cat.phi4)
        displayed = MPoly.parse(PHI6_TEXT, cat.phi4.tower)
        ok = H == cat.phi6.scale(-54) and cat.phi6 == displayed
        return ok, {"hessian_equals_minus54_phi6": H == cat.phi6.scale(-54),
                    "phi6_terms": len(cat.phi6), "phi6_matches_expansion": cat.phi6 == displayed}

    def degrees():
        cat = s.data.cat
        got = {n: f.degree() for n, f in cat.forms().items()}
        return got == {"phi4": 4, "phi6": 6, "phi14": 14, "phi21": 21}, got

    def axes():
        d = s.data
        prod = None
        for h in d.homologies:
            prod = h.axis if prod is None else prod * h.axis
        lam = proportional(d.cat.phi21.embed(prod.tower), prod)
        return True, {"axes": len(d.homologies), "phi21_over_product": str(lam)}

    def invariance():
        d = s.data
        out = {n: {g: str(v) for g, v in check_invariance(f, d.G).items()}
               for n, f in d.cat.forms().items()}
        ok = all(v == "1" for lam in out.values() for v in lam.values())
        return ok, {"scalars": out}

    def stein():
        d = s.data
        c = steinerian_check(d.cat, d.orbit("O21"), control_point=d.p28)
        return c["ok"], {k: v for k, v in c.items() if k != "ok"}

    def dump_hash():
        dump = s.data.cat.dump()
        h = digest(dump)
        s.artifacts["catalogue"] = h
        return True, {n: v["sha256"][:16] for n, v in dump.items()}

    r.check("catalogue.hessian", "hessian-phi4", hess)
    r.check("catalogue.degrees", "invariant-degrees", degrees)
    r.check("catalogue.phi21_axes", "phi21-is-product-of-axes", axes)
    r.check("catalogue.invariance", "invariance-of-catalogue", invariance)
    r.check("catalogue.steinerian", "steinerian-on-O21", stein)
    def base_points():
        c = base_point_certificate(s.data.cat.phi4)
        return c["base_point_free"], {"pure_powers": c["pure_powers"], "basis_size": c["basis_size"]}

    r.check("catalogue.hash", "catalogue-content-hash", dump_hash)
    r.check("catalogue.gradient_base_points", "gradient-map-base-point-free", base_points)


def suite_polars(r: Runner):
    s = r.s

    def count():
        P = s.data.polars()
        # each involution's center has a polar containing its axis
        through = all(divides(p.axis, p.form) for p in P)
        nonzero = sum(1 for p in P if not p.discriminant.is_zero())
        return len(P) == 21 and through and nonzero == 21, {
            "reducible_polars": len(P), "transverse": nonzero}

    def nodes():
        d = s.data
        N = d.orbit("O42")
        distinct = len(set(N))
        on = all(evaluate(d.cat.phi6, q).is_zero() and evaluate(d.cat.phi14, q).is_zero() for q in N)
        return distinct == 42 and on, {"nodes": distinct, "on_phi6_and_phi14": on,
                                       "tower": N[0].tower.descriptor()[-1]}

    def conics56():
        c = conic_o56_incidences(s.data)
        ok = set(c["per_conic"]) == {8} and len(c["through_rep"]) == 3 and c["ordinary"] \
            and not c["on_lines"]
        return ok, {"O56_per_conic": sorted(set(c["per_conic"])), "conics_through_rep": c["through_rep"],
                    "ordinary": c["ordinary"]}

    r.check("polars.count", "21-reducible-polars", count)
    r.check("polars.nodes", "42-nodes", nodes)
    r.check("polars.conics_O56", "eight-O56-points-per-conic", conics56)


def suite_census(r: Runner):
    s = r.s

    def pairs():
        h = klein_lines_pairs(s.data)
        return h == {"O21": 126, "O28": 84}, h

    def fibre(which):
        def run():
            fa = fibre_analysis(s.data, which)
            c = fa["checks"]
            flags = {k: v for k, v in c.items() if isinstance(v, bool)}
            ok = all(flags.values()) and len(fa["fibre"]) == 9
            return ok, {"fibre_points": len(fa["fibre"]), **flags,
                        "discriminants_nonzero": len(c["restrictions"])}
        return run

    def census():
        c = s.census()
        ordinary = all(rep.ordinary for rep in c.reports)
        return c.tuple(2, 3, 4) == (42, 252, 189) and ordinary, {
            "t": c.as_dict(), "ordinary": ordinary}

    def k2():
        c = census_sub(s.census(), "C")
        return c.tuple(2, 3) == (168, 224) and set(c.t) == {2, 3}, {"t": c.as_dict()}

    def k1():
        c = census_sub(s.census(), "L")
        return c.t == {3: 28, 4: 21}, {"t": c.as_dict()}

    def identity():
        lhs, rhs = s.census().identity(21, 21)
        return lhs == rhs == 1932, {"lhs": lhs, "rhs": rhs}

    def inequality():
        c = conic_inequality_check(s.census(), 21, 21)
        return c["holds"], {"lhs": exact(c["lhs"]), "rhs": exact(c["rhs"])}

    r.check("census.pairs", "axes-meet-in-O21-O28", pairs)
    r.check("census.fibre28", "nine-preimages-of-O28-point", fibre(28))
    r.check("census.fibre21", "nine-preimages-of-O21-point", fibre(21))
    r.check("census.K", "census-of-K", census)
    r.check("census.K2", "census-of-K2", k2)
    r.check("census.K1", "census-of-K1", k1)
    r.check("census.identity", "pair-count-identity", identity)
    r.check("census.conic_inequality", "conic-line-inequality", inequality)


def suite_indices(r: Runner):
    s = r.s
    targets = {"K": Fraction(-71, 23), "K2": Fraction(-33, 14), "K1": Fraction(-3), "W1": Fraction(-225, 67)}

    def one(name):
        def run():
            if name == "K":
                h = harbourne_index(63, s.census(), lines=21, conics=21)
            elif name == "K2":
                h = harbourne_index(42, census_sub(s.census(), "C"), lines=0, conics=21)
            elif name == "K1":
                h = harbourne_index(21, census_sub(s.census(), "L"), lines=21, conics=0)
            else:
                # 45 lines with t3 = 120, t4 = 45, t5 = 36
                h = harbourne_index(45, Census({3: 120, 4: 45, 5: 36}), lines=45, conics=0)
            return h == targets[name], {"h": exact(h)}
        return run

    for name in targets:
        r.check(f"indices.h_{name}", f"harbourne-index-{name}", one(name))


def suite_chern(r: Runner):
    s = r.s

    def k2():
        c1, c2, slope = chern_numbers(21, 2, census_sub(s.census(), "C"))
        ok = (c1, c2) == (1297, 577) and slope < Fraction(8, 3)
        return ok, {"c1bar2": c1, "c2bar": c2, "slope": exact(slope), "below_8_3": slope < Fraction(8, 3)}

    r.check("chern.K2", "log-chern-slope-K2", k2)


def suite_freeness(r: Runner):
    s = r.s

    def info():
        return tjurina_and_freeness(63, s.census())

    def tau():
        f = info()
        return f["tau"] == 2751, {"tau": f["tau"]}

    def free():
        f = info()["free"]
        return f["discriminant"] == -528 and not f["integer_roots"], {
            "quadratic": f["quadratic"], "discriminant": f["discriminant"], "integer_roots": f["integer_roots"]}

    def nearly():
        f = info()["nearly_free"]
        return f["discriminant"] == -524 and not f["integer_roots"], {
            "quadratic": f["quadratic"], "discriminant": f["discriminant"], "integer_roots": f["integer_roots"]}

    def defect():
        f = info()
        return f["defect"] == 132, {"defect": f["defect"]}

    def syzygy():
        phi63 = s.data.phi(63)
        dims = {r_: jacobian_syzygy_dimension(phi63, r_) for r_ in (30, 31)}
        return dims[30] == 0 and dims[31] > 0, {"syzygies_by_degree": dims}

    r.check("freeness.tau", "total-tjurina-number", tau)
    r.check("freeness.not_free", "free-quadratic-no-root", free)
    r.check("freeness.not_nearly_free", "nearly-free-quadratic-no-root", nearly)
    r.check("freeness.defect", "freeness-defect", defect)
    r.check("freeness.syzygy_r31", "lowest-syzygy-degree-31", syzygy, long_running=True)


def _containment_values(cert: dict) -> dict:
    out = {"symbolic": cert["symbolic"]["holds"], "points": cert["symbolic"]["points"],
           "ideal_degrees": cert["ideal"]["degrees"], "square_generators": cert["square"]["generators"]}
    if "groebner" in cert:
        g = cert["groebner"]
        out.update({"normal_form_nonzero": g["nonzero"], "basis_size": len(g["basis"]),
                    "basis_sha256": g["basis_sha256"][:16]})
    if "linear_algebra" in cert:
        out["linear_member"] = cert["linear_algebra"]["member"]
    if "groebner_status" in cert:
        out["groebner_status"] = cert["groebner_status"]
    return out


def suite_containment(r: Runner):
    s = r.s
    if s.flags.case is not None and s.flags.case not in CASES:
        raise UsageError(f"unknown case {s.flags.case!r}; choose from {', '.join(CASES)}")
    cases = (s.flags.case,) if s.flags.case else CASES

    def full(case, groebner):
        def run():
            cert = s.containment(case, groebner)
            if "groebner_checkpoint" in cert:
                ref = s.checkpoint_path(f"containment.{case}", cert["groebner_checkpoint"])
                return False, {**_containment_values(cert), "checkpoint": ref}
            replay = recheck_certificate(cert, replay_spairs=False)
            return cert["containment_fails"] and replay["ok"], _containment_values(cert)
        return run

    def symbolic(case):
        def run():
            cert = s.containment(case, False)
            return cert["symbolic"]["holds"], _containment_values(cert)
        return run

    for case in cases:
        if case == "dual_hesse":
            r.check("containment.dual_hesse", "dual-hesse-I3-not-in-I2", full(case, True))
        elif case == "klein_lines":
            r.check("containment.klein_lines", "klein-lines-I3-not-in-I2", full(case, True))
        elif case == "klein_mult3":
            r.check("containment.klein_mult3.symbolic", "phi63-in-symbolic-cube", symbolic(case))
            r.check("containment.klein_mult3.groebner", "phi63-not-in-square", full(case, True),
                    long_running=True)
        elif case == "klein_i2":
            r.check("containment.klein_i2", "phi6-phi63-not-in-square", full(case, True),
                    long_running=True)


def suite_iterate(r: Runner):
    s = r.s
    k = s.flags.k
    state = {}

    def chain():
        if "it" not in state:
            state["it"] = iterate_pullback(min(k, 2), s.data)
        return state["it"]

    def k1():
        it = iterate_pullback(1, s.data)
        ok = it["factors"][1] == s.data.phi(42) and it["forms"][1] == s.data.phi(21) * s.data.phi(42)
        return ok, {"degrees": it["degrees"], "factor_degrees": it["factor_degrees"]}

    def k2():
        it = chain()
        d = s.data
        ok = it["forms"][2] == d.phi(126) * d.phi(42) * d.phi(21)
        return ok, {"degrees": it["degrees"], "factor_degrees": it["factor_degrees"]}

    def lemma71():
        rows = chain()["tangency"]
        n = sum(1 for row in rows if row["image_is_node"])
        return n == 42, {"nodes_mapped_to_nodes": n}

    def lemma73():
        rows = chain()["tangency"]
        good = sum(1 for row in rows if row["vanishes"] and row["smooth"] and row["tangent_to_conic"]
                   and not row["tangent_to_line"])
        return good == 42, {"nodes_tangent_to_conic": good}

    def nested():
        res = nested_containment_family(s.data)
        return all(res["families"].values()), {"families": res["families"],
                                               "O42": res["O42"]["holds"], "T": res["T"]["holds"]}

    def deeper():
        it = iterate_pullback(k, s.data, allow_long=True)
        return True, {"degrees": it["degrees"], "factor_degrees": it["factor_degrees"]}

    r.check("iterate.k1", "phi63-factorization", k1)
    if k >= 2:
        r.check("iterate.k2", "phi189-factorization", k2)
        r.check("iterate.nodes_to_nodes", "gradient-preserves-O42", lemma71)
        r.check("iterate.tangency", "phi126-tangent-to-conics", lemma73)
        r.check("iterate.nested", "nested-containment-symbolic", nested)
    if k > 2:
        r.check(f"iterate.k{k}", f"pullback-chain-k{k}", deeper, long_running=True)


SUITE_FUNCS = {
    "group": suite_group, "orbits": suite_orbits, "catalogue": suite_catalogue,
    "polars": suite_polars, "census": suite_census, "indices": suite_indices,
    "chern": suite_chern, "freeness": suite_freeness, "containment": suite_containment,
    "iterate": suite_iterate,
}


def run_suite(name: str, flags: Flags | None = None, cache: Cache | None = None,
              session: Session | None = None) -> SuiteReport:
    flags = flags or Flags()
    if name != "all" and name not in SUITE_FUNCS:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, all")
    session = session or Session(flags, cache)
    runner = Runner(session)
    for n in (SUITES if name == "all" else (name,)):
        SUITE_FUNCS[n](runner)
    if flags.certs:
        session.write_certificates(flags.certs)
    fl = {k: v for k, v in asdict(flags).items() if k not in ("certs", "spot_check")}
    return SuiteReport(name, runner.results, toolchain(), dict(session.artifacts), fl,
                       datetime.now(timezone.utc).isoformat(timespec="seconds"))


def recheck_path(path: str) -> dict:
    """Replay a certificate file (census or containment)."""
    cert = json.loads(Path(path).read_text())
    if cert.get("kind") == "census":
        return recheck_census(cert)
    return recheck_certificate(cert)
