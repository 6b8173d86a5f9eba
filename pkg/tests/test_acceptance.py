"""Acceptance criteria 1-11, each run from a cold cache with its time budget.

Every test records a one-line verdict in ``conftest.ACCEPTANCE``; the
terminal summary prints them, pass or fail, in criterion order.
"""

import time

import pytest

import test_properties as props
from conftest import ACCEPTANCE
from kleinpolars.cache import Cache
from kleinpolars.suites import PASS, SKIP, Flags, Session, run_suite


@pytest.fixture
def session(tmp_path):
    return Session(Flags(), Cache(tmp_path / "cache"))


def _run(n, budget, name, session, **flags):
    """Run suite ``name``, record a verdict for criterion ``n`` and return
    {check id: values}.  Long-running checks may remain skipped."""
    session.flags = Flags(**flags)
    ACCEPTANCE[n] = (False, f"{name}: did not finish")
    t0 = time.monotonic()
    rep = run_suite(name, session.flags, session=session)
    dt = time.monotonic() - t0
    bad = [c.id for c in rep.checks if c.status not in (PASS, SKIP)]
    ok = not bad and dt < budget
    detail = f"{name}: {sum(c.status == PASS for c in rep.checks)} checks pass in {dt:.1f}s (budget {budget}s)"
    if bad:
        detail += f"; failing: {', '.join(bad)}"
    ACCEPTANCE[n] = (ok, detail)
    assert not bad, detail
    assert dt < budget, detail
    return {c.id: c.values for c in rep.checks}


def _confirm(n, cond, what):
    if not cond:
        ok, detail = ACCEPTANCE[n]
        ACCEPTANCE[n] = (False, f"{detail}; value mismatch: {what}")
    assert cond, what


def test_criterion_01_group(session):
    v = _run(1, 10, "group", session)
    _confirm(1, v["group.order"]["order"] == 168, "order")
    _confirm(1, v["group.transpose"]["closed_under_transpose"], "transpose")
    _confirm(1, v["group.involutions"]["involutions"] == 21, "involutions")


def test_criterion_02_orbits(session):
    v = _run(2, 30, "orbits", session)
    _confirm(2, v["orbits.sizes"] == {"O21": 21, "O24": 24, "O28": 28, "O56": 56}, "orbit sizes")
    _confirm(2, v["orbits.noncontainment"]["vanishing_at_representative"]["O24"] == ["phi4", "phi6"],
             "non-containment")


def test_criterion_03_catalogue(session):
    v = _run(3, 60, "catalogue", session)
    h = v["catalogue.hessian"]
    _confirm(3, h["hessian_equals_minus54_phi6"] and h["phi6_matches_expansion"], "Hessian")
    _confirm(3, v["catalogue.degrees"]["phi14"] == 14 and v["catalogue.degrees"]["phi21"] == 21, "degrees")
    _confirm(3, v["catalogue.phi21_axes"]["axes"] == 21, "axes")
    scal = v["catalogue.invariance"]["scalars"]
    _confirm(3, set(scal) == {"phi4", "phi6", "phi14", "phi21"}, "invariance of all four forms")


def test_criterion_04_polars(session):
    v = _run(4, 300, "polars", session)
    _confirm(4, v["polars.count"] == {"reducible_polars": 21, "transverse": 21}, "21 transverse polars")
    _confirm(4, v["polars.nodes"]["nodes"] == 42 and v["polars.nodes"]["on_phi6_and_phi14"], "nodes")
    _confirm(4, v["polars.conics_O56"]["O56_per_conic"] == [8], "8 O56 points per conic")
    _confirm(4, len(v["polars.conics_O56"]["conics_through_rep"]) == 3, "3 conics through rep")


def test_criterion_05_census(session):
    v = _run(5, 300, "census", session)
    _confirm(5, v["census.K"]["t"] == {"2": 42, "3": 252, "4": 189}, "census of K")
    _confirm(5, v["census.K2"]["t"] == {"2": 168, "3": 224}, "census of K2")
    _confirm(5, v["census.identity"] == {"lhs": 1932, "rhs": 1932}, "combinatorial identity")


@pytest.fixture(scope="module")
def census_session(tmp_path_factory):
    s = Session(Flags(), Cache(tmp_path_factory.mktemp("acc") / "cache"))
    s.census()
    return s


def test_criterion_06_indices(census_session):
    s = census_session
    v = _run(6, 1, "indices", s)
    first = ACCEPTANCE[6][1]
    c = _run(6, 1, "chern", s)
    h = {k: v[f"indices.{k}"]["h"]["exact"] for k in ("h_K", "h_K2", "h_K1", "h_W1")}
    ACCEPTANCE[6] = (True, f"{first}; {ACCEPTANCE[6][1]}")
    _confirm(6, h == {"h_K": "-71/23", "h_K2": "-33/14", "h_K1": "-3", "h_W1": "-225/67"}, "indices")
    ch = c["chern.K2"]
    _confirm(6, ch["slope"]["exact"] == "1297/577" and ch["below_8_3"], "Chern slope")


def test_criterion_07_freeness(census_session):
    v = _run(7, 1, "freeness", census_session)
    _confirm(7, v["freeness.tau"]["tau"] == 2751, "tau")
    _confirm(7, v["freeness.not_free"]["discriminant"] == -528 and not v["freeness.not_free"]["integer_roots"],
             "free quadratic")
    nf = v["freeness.not_nearly_free"]
    _confirm(7, nf["discriminant"] == -524 and not nf["integer_roots"], "nearly-free quadratic")
    _confirm(7, v["freeness.defect"]["defect"] == 132, "defect")


def test_criterion_08_dual_hesse(session):
    v = _run(8, 120, "containment", session, case="dual_hesse")
    d = v["containment.dual_hesse"]
    _confirm(8, d["symbolic"] and d["points"] == 12 and d["normal_form_nonzero"], "dual-Hesse")


def test_criterion_09_klein_lines(session):
    v = _run(9, 300, "containment", session, case="klein_lines")
    d = v["containment.klein_lines"]
    _confirm(9, d["symbolic"] and d["points"] == 49, "symbolic direction")
    _confirm(9, d["normal_form_nonzero"] and not d["linear_member"], "Groebner direction")


def test_criterion_10_iterate(session):
    v = _run(10, 1800, "iterate", session)
    _confirm(10, v["iterate.k1"]["factor_degrees"] == [21, 42], "phi63 factorization")
    _confirm(10, v["iterate.k2"]["factor_degrees"] == [21, 42, 126], "phi189 factorization")
    _confirm(10, v["iterate.nodes_to_nodes"]["nodes_mapped_to_nodes"] == 42, "nodes to nodes")
    _confirm(10, v["iterate.tangency"]["nodes_tangent_to_conic"] == 42, "tangency")
    _confirm(10, v["iterate.nested"]["families"] == {"X=T": True, "X=T+O42": True}, "nested containment")


PROPERTY_SUITES = {
    "field-QQ": props.prop_field_QQ, "field-K": props.prop_field_K, "field-E": props.prop_field_E,
    "divide": props.prop_divide_exact, "pullback": props.prop_pullback, "euler": props.prop_euler,
    "buchberger": props.prop_buchberger_oracle, "membership": props.prop_membership,
    "order": props.prop_order_additive, "power": props.prop_power_in_symbolic_power,
}


def test_criterion_11_properties():
    ACCEPTANCE[11] = (False, "property suites did not finish")
    counts = {}
    for name, prop in PROPERTY_SUITES.items():
        before = props.COUNT[name]
        prop()
        counts[name] = props.COUNT[name] - before
    short = [n for n, c in counts.items() if c < props.MIN_CASES]
    ok = not short
    ACCEPTANCE[11] = (ok, f"{len(counts)} property suites, {min(counts.values())}-{max(counts.values())} "
                          f"cases each, 0 failures" + (f"; too few cases: {short}" if short else ""))
    assert ok
