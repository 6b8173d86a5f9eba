import json

import pytest

from kleinpolars.certificate import IntegrityError, seal
from kleinpolars.exactnum import QQ
from kleinpolars.groebner import buchberger
from kleinpolars.ideals import (PointSet, case_dual_hesse, case_klein_lines, dual_hesse_points,
                                klein_singular_points, membership_linear, point_ideal,
                                recheck_certificate, symbolic_membership)
from kleinpolars.mpoly import MPoly

x, y, z = MPoly.gens(QQ)


@pytest.fixture(scope="module")
def hesse_cert():
    return case_dual_hesse()


@pytest.fixture(scope="module")
def lines_cert(data):
    return case_klein_lines(data)


def test_ideal_of_one_point():
    I = point_ideal(PointSet([(0, 0, 1)]), QQ)
    assert sorted(map(str, I.generators)) == ["x", "y"]
    assert I.hilbert == {0: 1, 1: 1, 2: 1}


def test_repeated_point_rejected():
    with pytest.raises(ValueError):
        PointSet([(0, 0, 1), (0, 0, 2)])


def test_dual_hesse_ideal():
    L, pts = dual_hesse_points()
    I = point_ideal(pts, L)
    assert len(pts) == 12
    assert I.generator_degrees() == [4, 4, 4]


def test_symbolic_membership_small():
    pt = PointSet([(0, 0, 1)])
    ok, tr = symbolic_membership(x, pt, 2)
    assert not ok and tr[0]["nonvanishing"] == [[1, 0, 0]]
    assert symbolic_membership(x * y, pt, 2)[0]
    with pytest.raises(ValueError):
        symbolic_membership(x, pt, 0)


def test_symbolic_order_is_additive_on_products():
    pt = PointSet([(0, 0, 1)])
    f, g = x * x + y * z, x * y - y * y
    assert symbolic_membership(f, pt, 1)[0] and not symbolic_membership(f, pt, 2)[0]
    assert symbolic_membership(g, pt, 2)[0] and not symbolic_membership(g, pt, 3)[0]
    assert symbolic_membership(f * g, pt, 3)[0] and not symbolic_membership(f * g, pt, 4)[0]


def test_linear_membership_agrees_with_groebner():
    gens = [x * x - y * z, x * y - z * z]
    gb = buchberger(gens)
    for f in (x ** 3 - x * y * z, x * y * z - z ** 3, x ** 3 + y ** 3, z ** 4):
        assert membership_linear(f, gens)["member"] == gb.contains(f)


def test_klein_lines_ideal(data):
    _, pts = klein_singular_points(data)
    I = point_ideal(pts, QQ)
    assert len(pts) == 49
    assert [I.hilbert[d] for d in range(12)] == [1, 3, 6, 10, 15, 21, 28, 36, 42, 46, 48, 49]
    assert I.generator_degrees() == [8, 8, 8]


def test_dual_hesse_certificate(hesse_cert):
    c = hesse_cert
    assert c["containment_fails"]
    assert c["symbolic"]["holds"] and c["groebner"]["nonzero"] and not c["linear_algebra"]["member"]
    assert recheck_certificate(json.loads(json.dumps(c)))["ok"]


def test_klein_lines_certificate(lines_cert):
    c = lines_cert
    assert c["containment_fails"]
    assert c["ideal"]["degrees"] == [8, 8, 8]
    res = recheck_certificate(json.loads(json.dumps(c)))
    assert res["ok"] and res["ideal_replay"] and res["basis_is_groebner"]


def test_tampered_certificate_is_rejected(hesse_cert):
    c = json.loads(json.dumps(hesse_cert))
    c["witness"] = c["witness"].replace("x^3", "x^2", 1)
    with pytest.raises(IntegrityError):
        recheck_certificate(c)


def test_resealed_wrong_ideal_fails_replay(hesse_cert):
    body = {k: v for k, v in hesse_cert.items() if k != "sha256"}
    body["ideal"] = dict(body["ideal"], generators=body["ideal"]["generators"][:2])
    res = recheck_certificate(seal(body), replay_spairs=False)
    assert not res["ideal_replay"] and not res["ok"]
