from fractions import Fraction

import pytest

from bunkbed.exact import bunkbed_gap
from bunkbed.exceptions import CapExceededError
from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import build_bunkbed
from bunkbed.polynomial import (
    RationalPolynomial,
    VerdictKind,
    connection_polynomial,
    gap_polynomial,
    nonneg_on_unit_interval,
)

x = RationalPolynomial.variable()
one = RationalPolynomial.constant(1)
half = RationalPolynomial.constant(Fraction(1, 2))

GRID = ('0', '1/4', '1/2', '3/4', '1')


def test_single_edge_polynomials(k2):
    gap = gap_polynomial(k2, 'a', 'b')
    assert gap.json() == ['0', '1', '-2', '1']
    assert nonneg_on_unit_interval(gap).nonnegative

    same = connection_polynomial(build_bunkbed(k2), 'a-', 'b-')
    assert same.json() == ['0', '1', '0', '1', '-1']


@pytest.mark.parametrize('q', GRID)
def test_gap_polynomial_matches_exact_engine(k3, q):
    poly = gap_polynomial(k3, 'a', 'b')
    exact = bunkbed_gap(build_bunkbed(k3.with_weights(q)), 'a', 'b')
    assert poly(q) == exact


def test_weight_zero_edges_stay_absent():
    g = generate(parse_class_spec('complete_minus_clique:4,2'))
    poly = gap_polynomial(g, 'V1_0', 'V1_1')
    for q in GRID:
        assert poly(q) == bunkbed_gap(build_bunkbed(g.with_weights(q)), 'V1_0', 'V1_1')

    # No direct edge inside the removed clique, so no linear term (K4 has one).
    k4 = gap_polynomial(generate(parse_class_spec('complete:4')), 'a', 'b')
    assert k4.coefficients[1] == 1
    assert poly.coefficients[1] == 0


def test_corpus_gap_polynomials(corpus_spec):
    g = generate(parse_class_spec(corpus_spec))
    v, w = g.vertices[:2]
    poly = gap_polynomial(g, v, w)

    assert poly.has_integer_coefficients
    assert poly == gap_polynomial(g, w, v)
    assert poly(0) == poly(1) == 0
    assert nonneg_on_unit_interval(poly).nonnegative
    for q in GRID:
        assert poly(q) == bunkbed_gap(build_bunkbed(g.with_weights(q)), v, w)


def test_gap_polynomial_with_holding(k2):
    # Verticals fixed by `H = {}`: the gap is `P(a- <-> b-)` alone.
    assert gap_polynomial(k2, 'a', 'b', holding=()).json() == ['0', '1']
    assert gap_polynomial(k2, 'a', 'b', holding=('a',)).is_zero


def test_polynomial_cap(k3):
    with pytest.raises(CapExceededError):
        gap_polynomial(k3, 'a', 'b', cap=8)


def test_arithmetic():
    p = x * x - one
    assert p.json() == ['-1', '0', '1']
    assert (p - p).is_zero
    assert p.degree == 2
    assert RationalPolynomial((1, 0, 0)).degree == 0

    quotient, remainder = p.divmod(x - one)
    assert quotient.json() == ['1', '1']
    assert remainder.is_zero
    assert p(3) == 8
    assert str(RationalPolynomial((0, -1, 2))) == '-p + 2*p^2'
    assert RationalPolynomial.from_json(['1/2', '0', '3']) == RationalPolynomial(
        (Fraction(1, 2), 0, 3)
    )


def test_gcd_and_square_free():
    p = (x - one) ** 2 * (x + one)
    assert p.gcd(p.derivative()).json() == ['-1', '1']
    assert p.square_free() == (x * x - one)
    assert p.multiplicity_factors() == [x + one, x - one]
    assert (x - half).taylor_shift(Fraction(1, 2)) == x


def test_verdicts():
    assert nonneg_on_unit_interval((x - half) ** 2).nonnegative
    assert nonneg_on_unit_interval(RationalPolynomial()).nonnegative
    assert nonneg_on_unit_interval(x * (one - x)).nonnegative

    negative = nonneg_on_unit_interval(x - half)
    assert negative.kind is VerdictKind.NEGATIVE
    assert negative.value < 0
    assert (x - half)(negative.witness) == negative.value

    constant = nonneg_on_unit_interval(RationalPolynomial.constant(-1))
    assert constant.witness == Fraction(1, 2)
    assert constant.json() == {'verdict': 'negative', 'witness': '1/2', 'value': '-1'}


def test_sign_change_inside_interval_is_found():
    poly = x * (one - x) * (x - RationalPolynomial.constant(Fraction(1, 3)))
    verdict = nonneg_on_unit_interval(poly)
    assert verdict.kind is VerdictKind.NEGATIVE
    assert 0 <= verdict.witness <= Fraction(1, 3)
    assert poly(verdict.witness) == verdict.value < 0


def test_double_root_inside_interval_is_not_a_sign_change():
    poly = (x - RationalPolynomial.constant(Fraction(1, 3))) ** 2 * (x + one)
    assert nonneg_on_unit_interval(poly).nonnegative
