import json
from fractions import Fraction

import pytest

from kleinpolars.arrangement import (ArrangementError, Census, census_certificate, census_sub, chern_numbers,
                                     conic_inequality_check, fibre_analysis, harbourne_index,
                                     incidence_counts, is_ordinary, is_smooth_conic, iterate_pullback,
                                     klein_lines_pairs, multiplicity, recheck_census, tjurina_and_freeness)
from kleinpolars.certificate import IntegrityError
from kleinpolars.exactnum import QQ
from kleinpolars.mpoly import MPoly, binary_discriminant, evaluate, restrict_to_line
from kleinpolars.symmetry import ProjPoint

x, y, z = MPoly.gens(QQ)


def test_reducible_polars(data):
    P = data.polars()
    assert len(P) == 21
    for p in P:
        assert is_smooth_conic(p.conic)
        assert not binary_discriminant(restrict_to_line(p.conic, p.axis)).is_zero()
        assert len(p.nodes) == 2


def test_nodes_form_O42(data):
    nodes = data.orbit("O42")
    assert len(set(nodes)) == 42
    for q in nodes:
        assert evaluate(data.cat.phi6, q).is_zero()
        assert evaluate(data.cat.phi14, q).is_zero()
        assert not evaluate(data.cat.phi4, q).is_zero()


def test_node_tower_is_recorded(data):
    desc = data.orbit("O42")[0].tower.descriptor()
    assert desc[-1]["name"] == "t" and len(desc[-1]["modulus"]) == 3


def test_multiplicity_examples(data):
    phi63 = data.phi(63)
    assert multiplicity(phi63, data.p28) == 3
    assert multiplicity(phi63, data.p21) == 4
    assert multiplicity(x * y, (0, 0, 1)) == 2
    assert multiplicity(phi63, (1, 2, 3)) == 0


def test_ordinary_examples(data):
    ok, _ = is_ordinary([("x", x), ("y", y)], (0, 0, 1))
    assert ok
    # a line tangent to a conic
    ok, cert = is_ordinary([("C", y * z - x * x), ("L", y)], (0, 0, 1))
    assert not ok and cert["tangent_clashes"] == [("C", "L")]
    with pytest.raises(ValueError):
        is_ordinary([("cusp", y * y * z - x ** 3)], (0, 0, 1))
    arr = data.arrangement()
    inc = arr.incident(data.p56)
    assert inc == ["C0", "C1", "C2"]
    assert is_ordinary([(l, f) for l, f in arr.components if l in inc], data.p56)[0]


def test_fibres(data):
    for which, mult in ((28, 3), (21, 4)):
        fa = fibre_analysis(data, which)
        assert len(fa["fibre"]) == 9
        assert fa["checks"]["printed_conic_matches"]
        arr = data.arrangement()
        for _, q in fa["fibre"]:
            assert len(arr.incident(q)) == mult


def test_fibre21_pairing_is_not_the_identity(data):
    fa = fibre_analysis(data, 21)
    assert fa["partner"] != list(range(4))
    assert fibre_analysis(data, 28)["partner"] == [0, 1, 2]


def test_axis_pairs(data):
    assert klein_lines_pairs(data) == {"O21": 126, "O28": 84}


def test_census(census):
    assert census.tuple(2, 3, 4) == (42, 252, 189)
    assert all(r.ordinary for r in census.reports)
    assert census.identity(21, 21) == (1932, 1932)
    assert census.singular_count == 483


def test_sub_censuses(census):
    assert census_sub(census, "C").t == {2: 168, 3: 224}
    assert census_sub(census, "L").t == {3: 28, 4: 21}


def test_harbourne_indices(census):
    assert harbourne_index(63, census, lines=21, conics=21) == Fraction(-71, 23)
    assert harbourne_index(42, census_sub(census, "C"), lines=0, conics=21) == Fraction(-33, 14)
    assert harbourne_index(21, census_sub(census, "L"), lines=21, conics=0) == -3
    assert harbourne_index(45, Census({3: 120, 4: 45, 5: 36})) == Fraction(-225, 67)
    with pytest.raises(ValueError):
        harbourne_index(3, Census({}))
    with pytest.raises(ArrangementError):
        harbourne_index(63, census, lines=20, conics=21)


def test_chern(census):
    c1, c2, slope = chern_numbers(21, 2, census_sub(census, "C"))
    assert (c1, c2, slope) == (1297, 577, Fraction(1297, 577))
    assert slope < Fraction(8, 3)
    with pytest.raises(ValueError):
        chern_numbers(3, 1, Census({3: 1}))


def test_tjurina_and_freeness(census):
    f = tjurina_and_freeness(63, census)
    assert f["tau"] == 2751
    assert f["free"]["quadratic"] == [1, -62, 1093] and f["free"]["discriminant"] == -528
    assert f["nearly_free"]["quadratic"] == [1, -62, 1092] and f["nearly_free"]["discriminant"] == -524
    assert not f["is_free"] and not f["is_nearly_free"]
    assert f["defect"] == 132
    small = tjurina_and_freeness(3, Census({2: 1}))
    assert small["tau"] == 1 and not small["is_free"]
    with pytest.raises(ValueError):
        tjurina_and_freeness(63, census, ordinary=False)


def test_free_arrangement_is_detected():
    # the braid arrangement xyz(x-y)(y-z)(x-z): 4 triple points, 3 nodes
    f = tjurina_and_freeness(6, Census({2: 3, 3: 4}))
    assert f["is_free"] and f["free"]["integer_roots"] == [2, 3]


def test_conic_inequality(census):
    c = conic_inequality_check(census, 21, 21)
    assert c["holds"] and c["lhs"] == 2793 and c["rhs"] == 21


def test_incidences(data):
    inc = incidence_counts(data)
    assert {r["O21"] for r in inc["rows"]} == {4}
    assert {r["O28"] for r in inc["rows"]} == {4}
    assert inc["census"].t == {3: 28, 4: 21}
    assert inc["h"] == -3


def test_iterate_k1(data):
    it = iterate_pullback(1, data)
    assert it["degrees"] == [21, 63] and it["factor_degrees"] == [21, 42]
    with pytest.raises(ValueError):
        iterate_pullback(0, data)
    with pytest.raises(ValueError):
        iterate_pullback(3, data)


def test_iterate_k2_tangency(data):
    it = iterate_pullback(2, data)
    assert it["factor_degrees"] == [21, 42, 126]
    assert len(it["tangency"]) == 42
    for row in it["tangency"]:
        assert row["vanishes"] and row["smooth"] and row["tangent_to_conic"]
        assert not row["tangent_to_line"] and row["image_is_node"]


def test_census_certificate_round_trip(census, data):
    cert = census_certificate(census, data.arrangement())
    again = json.loads(json.dumps(cert))
    assert recheck_census(again)["ok"]
    again["t"]["3"] = 253
    with pytest.raises(IntegrityError):
        recheck_census(again)


def test_census_certificate_detects_wrong_incidence(census, data):
    from kleinpolars.certificate import seal
    cert = census_certificate(census, data.arrangement())
    body = {k: v for k, v in cert.items() if k != "sha256"}
    body["reports"] = [dict(r) for r in body["reports"]]
    body["reports"][0]["incident"] = body["reports"][0]["incident"][:1]
    res = recheck_census(seal(body))
    assert not res["incidences"] and not res["ok"]


def test_point_off_arrangement(data):
    arr = data.arrangement()
    assert arr.incident(ProjPoint((1, 2, 3), data.K)) == []
    assert arr.degree == 63 and arr.lines() == 21 and arr.conics() == 21
