import json
from pathlib import Path

import pytest

from kleinpolars.certificate import digest
from kleinpolars.covariant import (PHI6_TEXT, base_point_certificate, bordered_hessian, build_catalogue,
                                   hessian, jacobian_det, jacobian_syzygy_dimension, polar,
                                   steinerian_check)
from kleinpolars.exactnum import QQ
from kleinpolars.mpoly import MPoly, divide_exact, evaluate

GOLDEN = Path(__file__).parent / "golden"
x, y, z = MPoly.gens(QQ)


@pytest.fixture(scope="module")
def cat():
    return build_catalogue()


def test_hessian_examples(cat):
    assert hessian(cat.phi4) == cat.phi6.scale(-54)
    assert hessian(x ** 2 + y ** 2 + z ** 2) == 8
    assert hessian(x * y * z) == 2 * x * y * z
    with pytest.raises(ValueError):
        hessian(x + y)


def test_phi6_matches_displayed_expansion(cat):
    assert cat.phi6 == MPoly.parse(PHI6_TEXT)


def test_bordered_hessian(cat):
    assert bordered_hessian(cat.phi4, cat.phi6) == cat.phi14.scale(9)
    assert cat.phi14.degree() == 14
    with pytest.raises(ValueError):
        bordered_hessian(x, cat.phi6)


def test_jacobian(cat):
    assert jacobian_det(x, y, z) == 1
    assert jacobian_det(cat.phi4, cat.phi6, cat.phi14) == cat.phi21.scale(14)
    assert cat.phi21.degree() == 21
    assert evaluate(cat.phi21, (1, 1, 1)).is_zero()
    assert jacobian_det(x + y, z * z, (x + y) * z * z).is_zero()


def test_polar_examples(cat, data):
    assert polar(cat.phi4, (1, 0, 0)) == 3 * x ** 2 * y + z ** 3
    assert polar(x ** 4, (0, 1, 0)).is_zero()
    with pytest.raises(ValueError):
        polar(cat.phi4, (0, 0, 0))
    P = polar(cat.phi4, data.p21)
    axis = next(h.axis for h in data.homologies if h.center == data.p21)
    assert divide_exact(P, axis).degree() == 2


def test_pullback_factorizations(data):
    assert data.grad.pullback(data.phi(21)) == data.phi(21) * data.phi(42)
    assert data.phi(189) == data.phi(126) * data.phi(42) * data.phi(21)


def test_steinerian(cat, data):
    c = steinerian_check(cat, data.orbit("O21"), control_point=data.p28)
    assert c["ok"] and c["ratios"] == ["-4"] and c["control_nonzero"]


def test_gradient_map_has_no_base_point(cat):
    c = base_point_certificate(cat.phi4)
    assert c["base_point_free"]
    assert not base_point_certificate(x ** 2 * y + y ** 2 * z)["base_point_free"]


def test_syzygy_dimension_small_cases():
    # partials of a Fermat cubic: only Koszul syzygies, from degree 2
    assert [jacobian_syzygy_dimension(x ** 3 + y ** 3 + z ** 3, r) for r in range(3)] == [0, 0, 3]
    # three concurrent-free lines: x*y*z has two independent linear syzygies
    assert jacobian_syzygy_dimension(x * y * z, 1) == 2


def test_catalogue_golden(cat):
    golden = json.loads((GOLDEN / "catalogue.json").read_text())
    dump = cat.dump()
    assert {k: v for k, v in golden.items() if k != "sha256"} == dump
    assert golden["sha256"] == digest(dump)
