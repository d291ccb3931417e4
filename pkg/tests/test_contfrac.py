"""Continued-fraction kernels: everything here is exact rational arithmetic."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkqm.contfrac import (
    AngleForm,
    RegularCF,
    SemiRegularCF,
    angle_from_semiregular,
    eval_angle,
    eval_regular,
    eval_semiregular,
    parse_cf,
    regular_expand,
    regular_to_semiregular,
    semiregular_expand,
)
from minkqm.errors import DomainError, MalformedExpansionError, NeedsMoreDigitsError


def rationals(qmax=10_000):
    return st.builds(
        lambda q, k: Fraction(1 + k % (q - 1), q), st.integers(2, qmax), st.integers(0, 10**9)
    )


# -- regular ------------------------------------------------------------------


def test_regular_expand_examples():
    assert regular_expand(Fraction(1, 2)).digits == (2,)
    assert regular_expand(Fraction(3, 7)).digits == (2, 3)
    assert regular_expand(Fraction(2, 5)).digits == (2, 2)


def test_eval_regular_examples():
    assert eval_regular(RegularCF((2,))) == Fraction(1, 2)
    assert eval_regular(RegularCF((2, 3))) == Fraction(3, 7)
    assert eval_regular(RegularCF((1, 1, 2))) == Fraction(3, 5)


def test_regular_domain_and_empty():
    for bad in (Fraction(0), Fraction(1), Fraction(7, 5), Fraction(-1, 3)):
        with pytest.raises(DomainError):
            regular_expand(bad)
    with pytest.raises(MalformedExpansionError):
        eval_regular(RegularCF(()))
    with pytest.raises(DomainError):
        RegularCF((2, 0, 3))


def test_canonicalization_merges_trailing_one():
    assert RegularCF((2, 2, 1)).canonical().digits == (2, 3)
    assert RegularCF((2, 3)).canonical().digits == (2, 3)


@settings(max_examples=300, deadline=None)
@given(rationals())
def test_regular_round_trip(x):
    cf = regular_expand(x)
    assert eval_regular(cf) == x
    assert cf.digits[-1] >= 2


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_eval_then_expand_canonicalizes(digits):
    digits[-1] = max(2, digits[-1])
    cf = RegularCF(tuple(digits))
    assert regular_expand(eval_regular(cf)) == cf.canonical()


# -- semi-regular -------------------------------------------------------------


def test_semiregular_expand_examples():
    assert semiregular_expand(Fraction(1, 2)).digits == (2,)
    assert semiregular_expand(Fraction(3, 7)).digits == (3, 2, 2)
    assert semiregular_expand(Fraction(2, 3)).digits == (2, 2)


def test_eval_semiregular_examples():
    assert eval_semiregular(SemiRegularCF((2,))) == Fraction(1, 2)
    assert eval_semiregular(SemiRegularCF((3, 2, 2))) == Fraction(3, 7)
    assert eval_semiregular(SemiRegularCF((2, 2, 2))) == Fraction(3, 4)


def test_unit_marker():
    u = semiregular_expand(Fraction(1))
    assert u.unit and eval_semiregular(u) == 1
    assert u.prefix(4) == (2, 2, 2, 2)
    with pytest.raises(DomainError):
        SemiRegularCF((2,), unit=True)


def test_all_two_runs_give_k_over_k_plus_one():
    for k in range(1, 65):
        assert eval_semiregular((2,) * k) == Fraction(k, k + 1)


def test_malformed_zero_denominator():
    with pytest.raises(MalformedExpansionError):
        eval_semiregular((1, 1))
    with pytest.raises(MalformedExpansionError):
        eval_semiregular(())


@settings(max_examples=300, deadline=None)
@given(rationals())
def test_semiregular_round_trip(x):
    cf = semiregular_expand(x)
    assert eval_semiregular(cf) == x
    assert all(b >= 2 for b in cf.digits)


# -- Ramharter conversion -----------------------------------------------------


def test_convert_examples():
    assert regular_to_semiregular(RegularCF((2, 3)), 3).digits == (3, 2, 2)
    assert regular_to_semiregular([1] * 8, 4).digits == (2, 3, 3, 3)
    assert regular_to_semiregular(RegularCF((2,)), 3).digits == (3, 2, 2)


def test_convert_padding_converges_to_value():
    # finite [0;2] maps to the infinite twin of 1/2; prefixes approach 1/2
    errs = []
    for K in (2, 6, 12, 24):
        val = eval_semiregular(regular_to_semiregular(RegularCF((2,)), K))
        errs.append(abs(val - Fraction(1, 2)))
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_convert_golden_ratio_prefixes():
    # all-ones digits map to [[2,3,3,3,...]]; values approach (sqrt(5)-1)/2
    val = eval_semiregular(regular_to_semiregular([1] * 40, 20))
    assert abs(float(val) - 0.6180339887498949) < 1e-12


def test_convert_needs_more_digits():
    with pytest.raises(NeedsMoreDigitsError):
        regular_to_semiregular(RegularCF((2, 3)), 4)
    with pytest.raises(DomainError):
        regular_to_semiregular(RegularCF((2, 3)), 0)


def test_convert_even_ending_is_exact_finite_expansion():
    # inputs ending on an even digit position map onto the finite expansion
    for x in (Fraction(3, 7), Fraction(5, 12), Fraction(8, 11)):
        digits = regular_expand(x)
        if len(digits.digits) % 2 == 0:
            k = len(semiregular_expand(x).digits)
            assert eval_semiregular(regular_to_semiregular(digits, k)) == x


# -- equivalence transformation -------------------------------------------------


def test_angle_examples():
    assert eval_angle(AngleForm((Fraction(1, 2),))) == Fraction(1, 2)
    assert eval_angle(AngleForm((Fraction(1, 3), Fraction(1, 6), Fraction(1, 4)))) == Fraction(3, 7)
    d = Fraction(2, 7)
    assert eval_angle(AngleForm((Fraction(1), d))) == 1 / (1 - d)


def test_angle_from_semiregular_entries():
    a = angle_from_semiregular((3, 2, 2))
    assert a.entries == (Fraction(1, 3), Fraction(1, 6), Fraction(1, 4))


def test_angle_matches_semiregular_exhaustively():
    for k in range(1, 5):
        for digits in product(range(2, 7), repeat=k):
            assert eval_angle(angle_from_semiregular(digits)) == eval_semiregular(digits)


def test_angle_validation_and_malformed():
    with pytest.raises(DomainError):
        AngleForm((Fraction(3, 2),))
    with pytest.raises(MalformedExpansionError):
        eval_angle((Fraction(1, 2), Fraction(1)))  # inner 1 - 1 = 0


# -- text forms ------------------------------------------------------------------


def test_text_round_trip():
    for text in ("[0;2,3]", "[0;1,1,2]", "[[3,2,2]]", "[[2]]"):
        assert str(parse_cf(text)) == text
    with pytest.raises(DomainError):
        parse_cf("[1;2,3]")
