import pytest

from kleinpolars.arrangement import FIBRE21_CONIC, FIBRE21_LINES, FIBRE28_CONIC, FIBRE28_LINES
from kleinpolars.exactnum import QQ, TowerError, cube_root_field, cyclotomic7
from kleinpolars.mpoly import (BinaryForm, MPoly, NotDivisible, NotProportional, binary_discriminant,
                               divide_exact, evaluate, proportional, restrict_to_line, substitute)
from kleinpolars.symmetry import ProjPoint

x, y, z = MPoly.gens(QQ)
PHI4 = x ** 3 * y + y ** 3 * z + z ** 3 * x


@pytest.fixture(scope="module")
def K():
    return cyclotomic7()


def test_zero_has_no_degree():
    assert (PHI4 * 0).is_zero()
    assert (PHI4 * 0).degree() is None


def test_text_round_trip():
    f = MPoly.parse("x*y^5+y*z^5+z*x^5-5*x^2*y^2*z^2")
    assert MPoly.parse(str(f)) == f
    assert str(f) == str(MPoly.parse(str(f)))


def test_text_round_trip_over_cyclotomic(K):
    L = MPoly.parse(FIBRE21_CONIC, K)
    assert MPoly.parse(str(L), K) == L


def test_fibre28_lines_sum_to_zero(K):
    lines = [MPoly.parse(t, K) for t in FIBRE28_LINES]
    assert (lines[0] + lines[1] + lines[2]).is_zero()


def test_degree_additivity(data):
    assert (data.phi(21) * data.phi(42)).degree() == 63


def test_divide_exact_small():
    assert divide_exact(x ** 2 * y, x) == x * y
    with pytest.raises(ZeroDivisionError):
        divide_exact(x, x * 0)


def test_phi42_from_division(data):
    q = divide_exact(data.phi(63), data.phi(21))
    assert q.degree() == 42 and q == data.phi(42)


def test_phi4_not_divisible_by_a_line(K):
    L = MPoly.parse(FIBRE28_LINES[0], K)
    with pytest.raises(NotDivisible) as info:
        divide_exact(PHI4.embed(K), L)
    assert info.value.leading is not None


def test_partials():
    assert PHI4.diff("x") == 3 * x ** 2 * y + z ** 3
    assert MPoly.constant(QQ, 5).diff(0).is_zero()


def test_euler_relation_phi6():
    phi6 = MPoly.parse("x*y^5+y*z^5+z*x^5-5*x^2*y^2*z^2")
    gx, gy, gz = phi6.gradient()
    assert x * gx + y * gy + z * gz == 6 * phi6


def test_higher_partial():
    f = x ** 3 * y ** 2
    assert f.higher_partial((2, 1, 0)) == 12 * x * y


def test_evaluate_examples():
    phi6 = MPoly.parse("x*y^5+y*z^5+z*x^5-5*x^2*y^2*z^2")
    assert evaluate(PHI4, (1, 0, 0)) == 0
    assert evaluate(phi6, (1, 1, 1)) == -2
    W = cube_root_field()
    w = W.generator()
    assert evaluate(PHI4, ProjPoint((w * w, w, W.one()))).is_zero()


def test_evaluate_rejects_unrelated_tower(K):
    W = cube_root_field()
    f = MPoly.parse("z7*x", K)
    with pytest.raises(TowerError):
        evaluate(f, ProjPoint((W.generator(), W.one(), W.one())))


def test_substitute_identity_and_degree(data):
    u, v, w = y * z, x * x, x * y + z * z
    assert substitute(x, u, v, w) == u
    assert substitute(PHI4, u, v, w).degree() == 8
    with pytest.raises(ValueError):
        substitute(x, x, y * y, z)


def test_pullback_of_line_vanishes_at_fixed_point(data, K):
    L = MPoly.parse(FIBRE28_LINES[0], K)
    pb = data.grad.pullback(L)
    assert evaluate(pb, (1, 1, 1)).is_zero()


def test_restriction_examples(K, data):
    L1, L2, L3 = (MPoly.parse(t, K) for t in FIBRE28_LINES)
    assert restrict_to_line(L2, L2).is_zero()
    assert restrict_to_line(data.phi(21), L1).is_zero()
    G1 = MPoly.parse(FIBRE28_CONIC, K)
    q = restrict_to_line(G1, L2)
    assert q.degree == 2 and not binary_discriminant(q).is_zero()


def test_restriction_zero_iff_divisible(K):
    L = MPoly.parse(FIBRE21_LINES[0], K)
    G = MPoly.parse(FIBRE21_CONIC, K)
    assert restrict_to_line(L * G, L).is_zero()
    assert not restrict_to_line(G, L).is_zero()
    with pytest.raises(NotDivisible):
        divide_exact(G, L)


def test_binary_discriminants():
    su = BinaryForm(QQ, 2, (QQ.zero_raw, QQ.one_raw, QQ.zero_raw))
    assert binary_discriminant(su) == 1
    sq = BinaryForm(QQ, 2, tuple(QQ(c).raw for c in (1, -2, 1)))
    assert binary_discriminant(sq) == 0
    with pytest.raises(ValueError):
        binary_discriminant(BinaryForm(QQ, 1, (QQ.one_raw, QQ.one_raw)))


def test_proportional():
    assert proportional(2 * x, x) == 2
    with pytest.raises(NotProportional):
        proportional(x, y)


def test_mixed_tower_arithmetic_rejected(K):
    W = cube_root_field()
    with pytest.raises(TowerError):
        MPoly.parse("z7*x", K) + MPoly.parse("w*x", W)
