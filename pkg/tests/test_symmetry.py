from pathlib import Path

import pytest

from kleinpolars.exactnum import cube_root_field, cyclotomic7
from kleinpolars.mpoly import MPoly, NotProportional, divides, line_chart
from kleinpolars.symmetry import (GroupError, GroupTable, ProjMatrix, ProjPoint, build_group,
                                  check_invariance, classify_point, is_invariant, klein_generators,
                                  orbit, transform_scalar)

GOLDEN = Path(__file__).parent / "golden"


def test_projpoint_normalization():
    K = cyclotomic7()
    z = K.generator()
    p = ProjPoint((2 * z, 4 * z, 6 * z))
    assert p == ProjPoint((1, 2, 3), K)
    assert ProjPoint((0, 3, 6), K).coords[1] == 1
    with pytest.raises(ValueError):
        ProjPoint((0, 0, 0), K)


def test_generators(data):
    gens = klein_generators(data.K)
    I = ProjMatrix.identity(data.K)
    assert gens["i"] * gens["i"] == I
    assert all(m.det() == 1 for m in gens.values())


def test_group_table(data):
    G = data.G
    assert len(G) == 168
    assert all(m.transpose() in G for m in G)
    assert all(m.inverse() in G for m in G)
    assert all(m.det() == 1 for m in G)


def test_group_dump_round_trip_and_golden(data):
    dump = data.G.dump()
    assert dump["sha256"] == (GOLDEN / "group.sha256").read_text().split()[0]
    again = GroupTable.from_dump(dump)
    assert again.elements == data.G.elements
    dump["matrices"][3][0][0] = "2"
    with pytest.raises(GroupError):
        GroupTable.from_dump(dump)


def test_closure_bound():
    K = cyclotomic7()
    # an element of infinite order pushes the closure over the bound
    gens = {"a": ProjMatrix(K, [[2, 0, 0], [0, 1, 0], [0, 0, K(1) / 2]])}
    with pytest.raises(GroupError, match="exceeded"):
        build_group(K, bound=50, generators=gens)


def test_involutions(data):
    H = data.homologies
    assert len(H) == 21
    phi21 = data.cat.phi21.embed(data.K)
    for h in H:
        assert h.matrix.apply(h.center) == h.center
        assert divides(h.axis, phi21)
        # the axis is fixed pointwise
        for q in line_chart(h.axis):
            assert h.matrix.apply(ProjPoint(q)) == ProjPoint(q)
    assert {h.center for h in H} == set(data.orbit("O21"))


def test_orbit_sizes(data):
    assert len(orbit(data.p28, data.G)) == 28
    assert len(orbit(data.p24, data.G)) == 24
    assert len(orbit(data.p21, data.G)) == 21
    assert len(orbit(data.p56, data.G)) == 56
    O28 = orbit(data.p28, data.G)
    assert set(orbit(O28[5], data.G)) == set(O28)


def test_invariance(data):
    for f in data.cat.forms().values():
        assert is_invariant(f, data.G)
    x = MPoly.gens(data.K)[0]
    assert not is_invariant(x, data.G)
    with pytest.raises(NotProportional):
        check_invariance(x, data.G)


def test_transform_methods_agree(data):
    M = data.G.generators["i"]
    f = data.cat.phi6
    assert transform_scalar(f, M, "substitute") == transform_scalar(f, M, "grid") == 1


def test_classify(data):
    special = {"O21": data.orbit("O21"), "O28": data.orbit("O28")}
    assert classify_point(data.p24, data.cat, special) == "O24"
    assert classify_point(data.p56, data.cat, special) == "O56"
    assert classify_point(data.p28, data.cat, special) == "O28"
    assert classify_point(data.p21, data.cat, special) == "O21"
    assert classify_point(data.orbit("O42")[0], data.cat, special) == "O42"
    assert classify_point(ProjPoint((1, 2, 5), data.K), data.cat, special) == "generic-168"


def test_gradient_maps_orbits(data):
    O28 = {q.embed(data.Kw) for q in data.orbit("O28")}
    assert all(ProjPoint(data.grad(q)) in O28 for q in data.orbit("O56"))
    nodes = set(data.orbit("O42"))
    assert all(ProjPoint(data.grad(q)) in nodes for q in data.orbit("O42"))


def test_omega_point_in_compositum():
    Kw = cube_root_field(cyclotomic7())
    w = Kw.generator("w")
    p = ProjPoint((w * w, w, Kw.one()))
    assert p.tower == Kw
