import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynheights import CertifiedValue, HomogeneousLift, InputError, ProjPoint
from dynheights.arith import bareiss_det, content, det_fraction, ord_fraction, ord_int
from dynheights.certified import log_abs_certified, log_rational_multiple
from dynheights.formats import (
    lift_from_json_dict,
    lift_to_json_dict,
    map_hash,
    parse_pair,
    parse_point,
    point_from_json_dict,
)

from oracles import det_cofactor


# ---------------------------------------------------------------------------
# Integer kernels
# ---------------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=10**30), st.sampled_from([2, 3, 5, 97]), st.integers(0, 200))
def test_ord_int_matches_naive(unit, p, e):
    if unit % p == 0:
        unit += 1
    n = unit * p**e
    assert ord_int(n, p) == e
    assert ord_int(-n, p) == e


def test_ord_fraction():
    assert ord_fraction(Fraction(9, 2), 3) == 2
    assert ord_fraction(Fraction(1, 27), 3) == -3
    assert ord_fraction(0, 3) == float("inf")


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**9))
def test_bareiss_matches_cofactor(n, seed):
    rng = random.Random(seed)
    m = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    assert bareiss_det(m) == det_cofactor(m)
    mf = [[Fraction(x, rng.randint(1, 3)) for x in row] for row in m]
    assert det_fraction(mf) == det_cofactor(mf)


def test_content():
    assert content([6, 10, -4]) == 2
    assert content([0, 0, 7]) == 7
    assert content([]) == 0


# ---------------------------------------------------------------------------
# Certified values
# ---------------------------------------------------------------------------


def test_certified_invariants():
    with pytest.raises(ValueError):
        CertifiedValue(1.0, -1e-9)
    with pytest.raises(ValueError):
        CertifiedValue(1.0, 1e-9, exact=True)
    z = CertifiedValue.exact_zero()
    assert z.value == 0.0 and z.err == 0.0 and z.exact


def test_certified_addition_is_outward():
    a = CertifiedValue(1.0, 1e-10)
    b = CertifiedValue(2.0, 3e-10)
    c = a + b
    assert c.value == 3.0
    assert c.err >= 4e-10
    assert not c.exact


def test_certified_exact_chains_stay_exact():
    z = CertifiedValue.exact_zero()
    one = CertifiedValue.exact_float(1.0)
    total = z + one + one  # exact float additions keep the exact flag
    assert total.value == 2.0 and total.err == 0.0 and total.exact
    assert total.scale(2.0).exact
    # an addition that genuinely rounds must surrender exactness
    tiny = CertifiedValue.exact_float(1e-17)
    s = one + tiny
    assert not s.exact and s.err >= 1e-17 - 1e-32


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-1e6, 1e6), st.floats(0, 1e-3),
    st.floats(-1e6, 1e6), st.floats(0, 1e-3),
)
def test_certified_addition_contains_true_sum(v1, e1, v2, e2):
    import mpmath

    a, b = CertifiedValue(v1, e1), CertifiedValue(v2, e2)
    c = a + b
    # worst-case true values at the interval edges stay inside the result;
    # exact rational arithmetic leaves no room for reference rounding
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            truth = Fraction(v1) + s1 * Fraction(e1) + Fraction(v2) + s2 * Fraction(e2)
            assert abs(Fraction(c.value) - truth) <= Fraction(c.err)


@settings(max_examples=100, deadline=None)
@given(
    st.fractions(min_value=Fraction(-10**9), max_value=Fraction(10**9)).filter(lambda q: q != 0),
)
def test_log_abs_certified_contains_truth(q):
    cv = log_abs_certified(q)
    import mpmath

    truth = float(mpmath.log(abs(mpmath.mpf(q.numerator)) / q.denominator))
    assert abs(cv.value - truth) <= cv.err + 1e-15


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=Fraction(-1000), max_value=Fraction(1000)),
    st.sampled_from([2, 3, 5, 13]),
)
def test_log_rational_multiple_contains_truth(q, p):
    cv = log_rational_multiple(q, p)
    import mpmath

    truth = float(mpmath.mpf(q.numerator) / q.denominator * mpmath.log(p))
    assert abs(cv.value - truth) <= cv.err + 1e-15


def test_div_int():
    cv = CertifiedValue(1.0, 1e-12).div_int(3)
    assert cv.value == pytest.approx(1 / 3)
    assert cv.err >= 1e-12 / 3
    assert CertifiedValue.exact_zero().div_int(6).exact


# ---------------------------------------------------------------------------
# Wire formats
# ---------------------------------------------------------------------------


def test_map_json_round_trip():
    obj = {"d": 2, "P": ["1", "0", "-1"], "Q": ["0", "0", "1"]}
    F = lift_from_json_dict(obj)
    assert lift_to_json_dict(F) == obj
    assert len(map_hash(F)) == 16
    assert map_hash(F) == map_hash(lift_from_json_dict(json.loads(json.dumps(obj))))


def test_map_json_rejects_malformed():
    with pytest.raises(InputError):
        lift_from_json_dict({"d": 2, "P": ["1", "0"], "Q": ["0", "0", "1"]})
    with pytest.raises(InputError):
        lift_from_json_dict({"d": 2, "P": ["1", "0", "x"], "Q": ["0", "0", "1"]})


def test_point_parsing():
    assert parse_point("[2:1]") == ProjPoint(2, 1)
    assert parse_point(" [ -4 : 2 ] ") == ProjPoint(-2, 1)
    with pytest.raises(InputError):
        parse_point("[2:1")
    with pytest.raises(InputError):
        parse_point("[1/2:1]")  # rationals only allowed for affine pairs
    assert parse_pair("[1/27:1]") == (Fraction(1, 27), Fraction(1))
    assert point_from_json_dict({"x0": "2", "x1": "1"}) == ProjPoint(2, 1)


def test_binary_form_invariants():
    with pytest.raises(InputError):
        HomogeneousLift.from_coeffs([1, 0], [0, 1])  # degree 1 is not a dynamical lift
    # zero forms are rejected before any resultant is attempted
    with pytest.raises(InputError):
        HomogeneousLift.from_coeffs([0, 0, 0], [1, 0, 0])
