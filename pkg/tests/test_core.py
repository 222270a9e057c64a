from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyharmonic.core import (
    INF,
    NEG_INF,
    ExtendedRational,
    ProblemSpec,
    compare,
    kns_converges,
    parse_alpha,
    singular_threshold,
    sobolev_exponent,
)


@pytest.mark.parametrize(
    "n, m, expected",
    [
        (3, 1, Fraction(5)),
        (5, 2, Fraction(9)),
        (7, 3, Fraction(13)),
        (4, 1, Fraction(3)),
        (6, 2, Fraction(5)),
        (8, 3, Fraction(7)),
        (9, 4, Fraction(17)),
    ],
)
def test_sobolev_exponent_finite(n, m, expected):
    assert sobolev_exponent(n, m) == expected


@pytest.mark.parametrize("n, m", [(1, 1), (2, 1), (3, 2), (4, 2), (6, 3), (8, 4)])
def test_sobolev_exponent_infinite_when_n_at_most_2m(n, m):
    ps = sobolev_exponent(n, m)
    assert ps == INF
    assert not ps.is_finite


def test_singular_threshold():
    assert singular_threshold(1) == NEG_INF
    assert singular_threshold(2) == Fraction(-1)
    assert singular_threshold(3) == Fraction(-1, 2)
    assert singular_threshold(4) == Fraction(-1, 3)


def test_parse_alpha_exact_and_inexact():
    assert parse_alpha("1/2") == (0.5, Fraction(1, 2))
    assert parse_alpha("-3") == (-3.0, Fraction(-3))
    assert parse_alpha(Fraction(2, 3))[1] == Fraction(2, 3)
    value, exact = parse_alpha("0.5")
    assert value == 0.5 and exact is None
    assert parse_alpha(2.5) == (2.5, None)


@pytest.mark.parametrize("bad", ["abc", "1/0", "nan", float("inf")])
def test_parse_alpha_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_alpha(bad)


def test_problem_spec_normalizes_alpha():
    spec = ProblemSpec(3, 2, "1/2", sign=1)
    assert spec.alpha == 0.5
    assert spec.alpha_exact == Fraction(1, 2)
    assert spec.is_exact
    assert spec.alpha_display() == "1/2"
    inexact = ProblemSpec(3, 2, "0.5")
    assert not inexact.is_exact
    assert inexact.to_json()["alpha_exact"] is False


@pytest.mark.parametrize("kwargs", [dict(n=0, m=1), dict(n=3, m=0), dict(n=3, m=1, sign=2),
                                    dict(n=2.5, m=1)])
def test_problem_spec_validation(kwargs):
    kwargs.setdefault("alpha", 1)
    with pytest.raises(ValueError):
        ProblemSpec(**kwargs)


def test_compare_is_exact_against_floats():
    # 0.1 as a double is slightly above 1/10
    assert compare(0.1, Fraction(1, 10)) == 1
    assert compare(Fraction(1, 3), 1 / 3) != 0
    assert compare(5, sobolev_exponent(3, 1)) == 0
    assert compare(1e300, INF) == -1
    assert compare(NEG_INF, -1e300) == -1


def test_kns_boundary_is_divergent():
    for m in (2, 3, 4):
        thr = singular_threshold(m).value
        assert not kns_converges(m, thr)
        assert kns_converges(m, thr - Fraction(1, 10 ** 9))
        assert not kns_converges(m, thr + Fraction(1, 10 ** 9))
    assert not kns_converges(1, -100)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=50)
extended = st.one_of(rationals.map(ExtendedRational), st.sampled_from([INF, NEG_INF]))


@given(extended, extended, extended)
def test_extended_rational_total_order(a, b, c):
    assert (a < b) + (a == b) + (b < a) == 1
    if a <= b and b <= c:
        assert a <= c


@given(rationals, rationals)
def test_extended_rational_agrees_with_fraction(a, b):
    assert (ExtendedRational(a) < ExtendedRational(b)) == (a < b)
    assert NEG_INF < ExtendedRational(a) < INF


@given(st.integers(1, 12), st.integers(1, 5))
def test_sobolev_exponent_exceeds_one(n, m):
    ps = sobolev_exponent(n, m)
    assert ps > Fraction(1)
    if ps.is_finite:
        assert ps.value == Fraction(n + 2 * m, n - 2 * m)
