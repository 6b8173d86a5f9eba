"""Randomized property suites.  Each runs at least MIN_CASES examples and
counts them, so a silently shrunken run shows up as a failure."""

from collections import Counter

import sympy
from gmpy2 import mpq
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from kleinpolars.exactnum import QQ, cyclotomic7, tower_extend
from kleinpolars.groebner import buchberger
from kleinpolars.ideals import PointSet, membership_linear, point_ideal, symbolic_membership
from kleinpolars.linalg import monomials
from kleinpolars.mpoly import MPoly, divide_exact, substitute

MIN_CASES = 200
SETTINGS = settings(max_examples=MIN_CASES, deadline=None, database=None,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                                           HealthCheck.filter_too_much])
COUNT = Counter()

K = cyclotomic7()
_z = K.generator()
E = tower_extend(K, "t", [-(72 - 36 * (_z ** 4 + _z ** 3)), 0, 1])
TOWERS = {"QQ": QQ, "K": K, "E": E}

small_q = st.fractions(min_value=-9, max_value=9, max_denominator=5)
small_int = st.integers(min_value=-4, max_value=4)


def elements(T):
    n = 1 if T.base is None else T.size
    return st.lists(small_q, min_size=n, max_size=n).map(
        lambda cs: T.element([mpq(c.numerator, c.denominator) for c in cs]))


@st.composite
def forms(draw, d, tower=QQ, max_terms=4, coeff=small_int):
    mons = monomials(d)
    picks = draw(st.lists(st.sampled_from(mons), min_size=1, max_size=max_terms, unique=True))
    terms = {e: draw(coeff) for e in picks}
    return MPoly(tower, terms)


@st.composite
def nonzero_forms(draw, d, tower=QQ, max_terms=4):
    f = draw(forms(d, tower, max_terms))
    assume(not f.is_zero())
    return f


@st.composite
def small_ideals(draw):
    n = draw(st.integers(min_value=2, max_value=3))
    gens = [draw(nonzero_forms(draw(st.integers(min_value=1, max_value=3)), max_terms=3)) for _ in range(n)]
    return gens


# -- field axioms ---------------------------------------------------------------

def _field_axioms(name):
    T = TOWERS[name]

    @SETTINGS
    @given(elements(T), elements(T), elements(T))
    def prop(a, b, c):
        COUNT[f"field-{name}"] += 1
        assert a + b == b + a and a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == T.zero() and a * T.one() == a
        if not a.is_zero():
            assert a * a.inverse() == T.one()
            assert (b / a) * a == b
    return prop


prop_field_QQ = _field_axioms("QQ")
prop_field_K = _field_axioms("K")
prop_field_E = _field_axioms("E")


def test_field_axioms_QQ():
    prop_field_QQ()
    assert COUNT["field-QQ"] >= MIN_CASES


def test_field_axioms_cyclotomic():
    prop_field_K()
    assert COUNT["field-K"] >= MIN_CASES


def test_field_axioms_node_tower():
    prop_field_E()
    assert COUNT["field-E"] >= MIN_CASES


# -- polynomial identities ---------------------------------------------------------

@SETTINGS
@given(st.integers(0, 4), st.integers(0, 3), st.data())
def prop_divide_exact(df, dg, data):
    f = data.draw(nonzero_forms(df))
    g = data.draw(nonzero_forms(dg))
    COUNT["divide"] += 1
    assert divide_exact(f * g, g) == f


def test_divide_exact_round_trip():
    prop_divide_exact()
    assert COUNT["divide"] >= MIN_CASES


@SETTINGS
@given(st.integers(1, 2), st.data())
def prop_pullback(k, data):
    f = data.draw(forms(data.draw(st.integers(0, 3)), max_terms=3))
    g = data.draw(forms(data.draw(st.integers(0, 3)), max_terms=3))
    u, v, w = (data.draw(nonzero_forms(k, max_terms=3)) for _ in range(3))
    COUNT["pullback"] += 1
    assert substitute(f * g, u, v, w) == substitute(f, u, v, w) * substitute(g, u, v, w)


def test_pullback_is_multiplicative():
    prop_pullback()
    assert COUNT["pullback"] >= MIN_CASES


@SETTINGS
@given(st.sampled_from(["QQ", "K"]), st.integers(1, 7), st.data())
def prop_euler(name, d, data):
    T = TOWERS[name]
    f = data.draw(forms(d, T, max_terms=5))
    if name == "K":
        f = f.scale(data.draw(elements(K)))
    COUNT["euler"] += 1
    x, y, z = MPoly.gens(T)
    gx, gy, gz = f.gradient()
    assert x * gx + y * gy + z * gz == d * f


def test_euler_relation():
    prop_euler()
    assert COUNT["euler"] >= MIN_CASES


# -- Buchberger ---------------------------------------------------------------------

X, Y, Z = sympy.symbols("x y z")


def _to_sympy(f: MPoly):
    return sum((sympy.Rational(int(c.numerator), int(c.denominator)) * X ** e[0] * Y ** e[1] * Z ** e[2]
                for e, c in f.terms.items()), sympy.Integer(0))


def _from_sympy(p) -> MPoly:
    P = sympy.Poly(p, X, Y, Z, domain="QQ")
    return MPoly(QQ, {e: mpq(int(c.p), int(c.q)) for e, c in P.terms()})


@SETTINGS
@given(small_ideals(), st.randoms(use_true_random=False))
def prop_buchberger_oracle(gens, rnd):
    COUNT["buchberger"] += 1
    gb = buchberger(gens)
    again = buchberger(gens)
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert gb.digest() == again.digest() == buchberger(shuffled).digest()
    ref = sympy.groebner([_to_sympy(g) for g in gens], X, Y, Z, order="grevlex", domain="QQ")
    ours = {str(g.monic()) for g in gb.basis}
    theirs = {str(_from_sympy(p).monic()) for p in ref.exprs}
    assert ours == theirs


def test_buchberger_matches_reference():
    prop_buchberger_oracle()
    assert COUNT["buchberger"] >= MIN_CASES


@SETTINGS
@given(small_ideals(), st.booleans(), st.data())
def prop_membership(gens, build_member, data):
    D = max(g.degree() for g in gens) + data.draw(st.integers(0, 1))
    if build_member:
        f = MPoly(QQ, {})
        for g in gens:
            f = f + data.draw(forms(D - g.degree(), max_terms=2)) * g
    else:
        f = data.draw(forms(D, max_terms=4))
    assume(not f.is_zero())
    COUNT["membership"] += 1
    gb = buchberger(gens, truncate=D)
    ours = gb.contains(f)
    assert ours == membership_linear(f, gens)["member"]
    ref = sympy.groebner([_to_sympy(g) for g in gens], X, Y, Z, order="grevlex", domain="QQ")
    assert ours == ref.contains(_to_sympy(f))
    if build_member:
        assert ours


def test_membership_oracle():
    prop_membership()
    assert COUNT["membership"] >= MIN_CASES


# -- symbolic powers -------------------------------------------------------------------

points = st.tuples(small_int, small_int, st.just(1))


def _order(f: MPoly, p) -> int:
    m = 0
    while m <= f.degree() and symbolic_membership(f, PointSet([p]), m + 1)[0]:
        m += 1
    return m


@st.composite
def forms_through(draw, p):
    """Product of k lines through ``p`` with a random form."""
    a, b, c = p
    f = draw(nonzero_forms(draw(st.integers(0, 2)), max_terms=3))
    x, y, z = MPoly.gens(QQ)
    for _ in range(draw(st.integers(0, 2))):
        s, t = draw(small_int), draw(small_int)
        assume((s, t) != (0, 0))
        # s*(x - a z) + t*(y - b z) vanishes at (a, b, 1)
        f = f * ((x - a * z) * s + (y - b * z) * t)
    return f


@SETTINGS
@given(points, st.data())
def prop_order_additive(p, data):
    f = data.draw(forms_through(p))
    g = data.draw(forms_through(p))
    COUNT["order"] += 1
    assert _order(f * g, p) == _order(f, p) + _order(g, p)


def test_symbolic_order_is_additive():
    prop_order_additive()
    assert COUNT["order"] >= MIN_CASES


@SETTINGS
@given(st.lists(points, min_size=1, max_size=3, unique=True), st.integers(1, 2), st.data())
def prop_power_in_symbolic_power(pts, m, data):
    I = point_ideal(PointSet(list(pts)), QQ)
    Im = I.power(m)
    D = max(g.degree() for g in Im.generators)
    f = MPoly(QQ, {})
    for g in Im.generators:
        f = f + data.draw(forms(D - g.degree(), max_terms=2)) * g
    assume(not f.is_zero())
    COUNT["power"] += 1
    assert symbolic_membership(f, PointSet(list(pts)), m)[0]


def test_ordinary_power_inside_symbolic_power():
    prop_power_in_symbolic_power()
    assert COUNT["power"] >= MIN_CASES
