from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import term_map_power, term_map_product
from lndkit import (
    MonomialOrder,
    NotDivisibleError,
    ParseError,
    PolyRing,
    Polynomial,
    RingMismatchError,
    UndeclaredVariableError,
    parse,
    render,
    univariate_gcd,
)

ZT = PolyRing(("Z", "T"))
W = PolyRing(("W",))
B = PolyRing(("X1", "X2", "X3", "X4"))


# -- parse -----------------------------------------------------------------


def test_parse_zero():
    p = parse("0", ZT)
    assert p.is_zero
    assert p.terms == {}


def test_parse_matches_hand_built_terms():
    assert parse("Z^3 - T^2", ZT).terms == {(3, 0): 1, (0, 2): -1}


def test_parse_expands_like_repeated_multiplication():
    # oracle: (Z+1)^2 by term-map products, then times Z, minus T^2
    z_plus_1 = {(1, 0): 1, (0, 0): 1}
    expected = term_map_product({(1, 0): 1}, term_map_power(z_plus_1, 2, 2))
    expected[(0, 2)] = expected.get((0, 2), 0) - 1
    assert parse("Z*(Z+1)^2 - T^2", ZT).terms == expected
    assert parse("Z*(Z+1)^2 - T^2", ZT) == parse("Z^3 + 2*Z^2 + Z - T^2", ZT)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3/4*Z", {(1, 0): Fraction(3, 4)}),
        ("-Z", {(1, 0): -1}),
        ("-(Z - T)", {(1, 0): -1, (0, 1): 1}),
        ("Z**2", {(2, 0): 1}),
        ("2*3", {(0, 0): 6}),
        ("(Z)^0", {(0, 0): 1}),
        ("  Z  +  T ", {(1, 0): 1, (0, 1): 1}),
        ("Z - -T", {(1, 0): 1, (0, 1): 1}),
    ],
)
def test_parse_forms(text, expected):
    assert parse(text, ZT).terms == expected


@pytest.mark.parametrize(
    "text, exc",
    [
        ("Q", UndeclaredVariableError),
        ("Z^-1", ParseError),
        ("Z +", ParseError),
        ("(Z", ParseError),
        ("Z)", ParseError),
        ("", ParseError),
        ("Z ^ T", ParseError),
        ("1/0", ParseError),
        ("Z $ T", ParseError),
        ("Z/2", ParseError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse(text, ZT)


def test_render_is_canonical_and_deterministic():
    p = ZT("Z*(Z+1)^2 - T^2")
    assert render(p) == "Z^3 + 2*Z^2 - T^2 + Z"
    assert render(ZT("-3/2*Z*T + 1")) == "-3/2*Z*T + 1"
    assert render(ZT("0")) == "0"


# -- arithmetic --------------------------------------------------------------


def test_add_zero_identity():
    p = ZT("Z^2 - 3*T")
    assert p + ZT.zero() == p


def test_difference_of_squares():
    assert ZT("Z - T") * ZT("Z + T") == ZT("Z^2 - T^2")


def test_pow_matches_repeated_multiplication():
    expected = term_map_power({(1,): 1, (0,): 1}, 3, 1)
    assert (W("W + 1") ** 3).terms == expected
    assert W("W+1") ** 3 == W("W^3 + 3*W^2 + 3*W + 1")


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        ZT("Z") + W("W")


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        ZT("Z") ** -1


# -- derivative, substitute, division, gcd ------------------------------------


def test_partial_derivatives():
    assert W("W^3").derivative("W") == W("3*W^2")
    assert ZT("T").derivative("Z").is_zero
    assert ZT("Z*(Z+1)^2 - T^2").derivative("T") == ZT("-2*T")
    with pytest.raises(KeyError):
        ZT("Z").derivative("W")


def test_substitute_cusp_parametrization():
    F = ZT("Z^3 - T^2")
    assert F.substitute({"Z": W("W^2"), "T": W("W^3")}, W).is_zero


def test_substitute_identity():
    F = ZT("Z^3 - 2*Z*T + 5")
    assert F.substitute({"Z": ZT("Z"), "T": ZT("T")}) == F


def test_substitute_nodal_cubic():
    F = ZT("Z*(Z+1)^2 - T^2")
    assert F.substitute({"Z": W("W^2"), "T": W("W*(W^2+1)")}).is_zero


def test_substitute_errors():
    with pytest.raises(KeyError):
        ZT("Z").substitute({"Z": W("W")})
    with pytest.raises(RingMismatchError):
        ZT("Z").substitute({"Z": W("W"), "T": ZT("T")}, W)


def test_exact_divide():
    R = PolyRing(("X1", "Z"))
    assert R("X1*Z").exact_divide(R("X1")) == R("Z")
    assert ZT("Z^2 - T^2") / ZT("Z - T") == ZT("Z + T")
    with pytest.raises(NotDivisibleError):
        ZT("Z^2 + T").exact_divide(ZT("Z"))
    with pytest.raises(ZeroDivisionError):
        ZT("Z").exact_divide(ZT.zero())


def test_exact_divide_builds_y_for_nodal_cubic():
    z = B("X2^2 - X1*X3")
    t = B("X2^3 + X2 - X1*X4")
    Fzt = ZT("Z*(Z+1)^2 - T^2").substitute({"Z": z, "T": t}, B)
    y = Fzt.exact_divide(B("X1"))
    assert B("X1") * y == Fzt


def test_univariate_gcd():
    assert univariate_gcd(W("2*W"), W("3*W^2 + 1")) == W.one()
    assert univariate_gcd(W("2*W^2 - 2"), W.zero()) == W("W^2 - 1")
    assert univariate_gcd(W("W^2 - 1"), W("W - 1")) == W("W - 1")
    with pytest.raises(ValueError):
        univariate_gcd(ZT("Z"), ZT("T"))


def test_orders_rank_monomials():
    lex = PolyRing(("x", "y", "z"), MonomialOrder("lex"))
    grlex = lex.with_order(MonomialOrder("grlex"))
    grevlex = lex.with_order(MonomialOrder("grevlex"))
    text = "x*z^2 + y^2*z + x^2 + y^4"
    assert render(lex(text)) == "x^2 + x*z^2 + y^4 + y^2*z"
    assert render(grlex(text)) == "y^4 + x*z^2 + y^2*z + x^2"
    assert render(grevlex(text)) == "y^4 + y^2*z + x*z^2 + x^2"
    swapped = lex.with_order(MonomialOrder("lex", perm=(2, 1, 0)))
    assert swapped(text).leading_monomial() == (1, 0, 2)


def test_block_order_eliminates_first_block():
    R = PolyRing(("W", "Z", "T"), MonomialOrder("grevlex", blocks=(1, 2)))
    # any monomial with W beats any monomial without W
    assert R("W + Z^5*T^5").leading_monomial() == (1, 0, 0)


# -- properties ----------------------------------------------------------------

coeffs = st.integers(-4, 4).map(Fraction) | st.fractions(max_denominator=4).filter(lambda f: abs(f) < 5)


def polys(ring, max_deg=3, max_terms=5):
    mono = st.tuples(*[st.integers(0, max_deg) for _ in ring.variables]).filter(lambda m: sum(m) <= max_deg)
    return st.dictionaries(mono, coeffs, max_size=max_terms).map(lambda d: Polynomial(ring, d))


R3 = PolyRing(("a", "b", "c"))


@settings(max_examples=150, deadline=None)
@given(polys(R3), polys(R3), polys(R3))
def test_ring_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert p - p == R3.zero()


@settings(max_examples=150, deadline=None)
@given(polys(R3), polys(R3), st.sampled_from(R3.variables))
def test_derivative_is_a_derivation(p, q, v):
    assert (p * q).derivative(v) == p * q.derivative(v) + q * p.derivative(v)


@settings(max_examples=100, deadline=None)
@given(polys(R3), polys(R3), polys(ZT, 2, 3), polys(ZT, 2, 3), polys(ZT, 2, 3))
def test_substitute_is_a_homomorphism(p, q, ia, ib, ic):
    images = {"a": ia, "b": ib, "c": ic}
    assert (p * q).substitute(images, ZT) == p.substitute(images, ZT) * q.substitute(images, ZT)
    assert (p + q).substitute(images, ZT) == p.substitute(images, ZT) + q.substitute(images, ZT)


@settings(max_examples=150, deadline=None)
@given(polys(R3), polys(R3))
def test_exact_divide_multiply_back(p, q):
    if q.is_zero:
        return
    assert (p * q).exact_divide(q) == p


@settings(max_examples=150, deadline=None)
@given(polys(R3))
def test_render_parse_round_trip(p):
    assert parse(render(p), R3) == p
