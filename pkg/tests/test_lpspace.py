"""Sequence-space tests.

Hand-computed oracles: small barycenter values reduce to explicit rational
sums (alpha_0 = 1/2, alpha_1 = 1/8, alpha_2 = 1/16, alpha^2_0 = 1/4), and
image norms over one- and two-point supports are worked out term by term in
the comments next to each assertion.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subaddlab import weights
from subaddlab.errors import NotInLpError, NotSummableError
from subaddlab.lpspace import (
    Enclosure,
    FiniteTable,
    IndicatorGE,
    IndicatorWindow,
    PowerGrowth,
    apply_A_pow,
    barycenter_residual,
    cesaro_A,
    cesaro_T,
    check_exponent,
    contraction_bound_check,
    image_p_norm,
    p_norm,
)


def test_function_kinds_evaluate():
    assert IndicatorGE(2)(1) == 0 and IndicatorGE(2)(2) == 1
    w = IndicatorWindow(1, 3)
    assert [w(k) for k in range(4)] == [0, 1, 1, 0]
    t = FiniteTable((1, -2, Fraction(3, 2)))
    assert t(1) == -2 and t(5) == 0
    g = PowerGrowth(0.5)
    assert g(0) == 0.0 and g(4) == 2.0


def test_function_validation():
    with pytest.raises(ValueError):
        IndicatorGE(-1)
    with pytest.raises(ValueError):
        IndicatorWindow(3, 2)
    with pytest.raises(ValueError):
        PowerGrowth(-0.1)
    with pytest.raises(ValueError):
        FiniteTable((1.0, math.inf))
    with pytest.raises(ValueError):
        IndicatorGE(1)(-1)


def test_check_exponent():
    assert check_exponent(2) == 2.0
    for bad in (1, 1.0, 0.5, math.inf):
        with pytest.raises(ValueError):
            check_exponent(bad)


def test_enclosure_algebra():
    with pytest.raises(ValueError):
        Enclosure(1, 0)
    e = Enclosure.point(Fraction(1, 3)) + Enclosure.point(Fraction(1, 6))
    assert e.lower == e.upper == Fraction(1, 2) and e.width == 0
    assert isinstance(e.midpoint, Fraction)
    s = Enclosure(Fraction(1, 4), Fraction(1, 2)).scale(Fraction(2))
    assert (s.lower, s.upper) == (Fraction(1, 2), Fraction(1))
    with pytest.raises(ValueError):
        e.scale(-1)
    # float arithmetic pads outward so the bracket can only grow
    f = Enclosure(0.1, 0.2) + Enclosure(0.3, 0.4)
    assert f.lower < 0.1 + 0.3 and f.upper > 0.2 + 0.4
    m = Enclosure(Fraction(1, 2), 0.75)
    assert isinstance(m.midpoint, float)


def test_p_norm_indicators_close_exactly():
    for p in (1.5, 2, 3):
        e = p_norm(IndicatorGE(1), p)
        assert abs(e.midpoint - 0.5 ** (1.0 / p)) < 1e-14
        assert e.lower <= 0.5 ** (1.0 / p) <= e.upper
        assert e.width < 1e-14
    # window [1, 3) carries mass alpha_1 + alpha_2 = 3/16
    e = p_norm(IndicatorWindow(1, 3), 2)
    assert e.lower <= math.sqrt(3 / 16) <= e.upper and e.width < 1e-14


def test_p_norm_finite_table():
    # alpha_0 1^2 + alpha_1 2^2 + alpha_2 (3/2)^2 = 1/2 + 1/2 + 9/64 = 73/64
    e = p_norm(FiniteTable((1, -2, Fraction(3, 2))), 2)
    true = math.sqrt(73) / 8
    assert e.lower <= true <= e.upper
    assert e.width < 1e-10


def test_p_norm_power_growth():
    e = p_norm(PowerGrowth(0.2), 2)
    assert 0 < e.lower < e.upper
    wide = p_norm(PowerGrowth(0.2), 2, K=1 << 12)
    tight = p_norm(PowerGrowth(0.2), 2, K=1 << 16)
    assert tight.width < wide.width
    assert max(wide.lower, tight.lower) <= min(wide.upper, tight.upper)
    with pytest.raises(NotInLpError):
        p_norm(PowerGrowth(0.3), 2)  # beta * p = 0.6 >= 1/2


def test_apply_exact_values():
    f = IndicatorGE(1)
    assert apply_A_pow(f, 1, 0).lower == Fraction(1, 2)
    assert apply_A_pow(f, 2, 0).lower == Fraction(3, 4)  # 1 - alpha^2_0
    assert apply_A_pow(IndicatorGE(2), 1, 0).lower == Fraction(3, 8)  # T(2)
    assert apply_A_pow(f, 5, 3).lower == Fraction(1)  # past the threshold
    assert apply_A_pow(f, 0, 0).width == 0 and apply_A_pow(f, 0, 0).lower == 0
    # window mass: alpha_1 + alpha_2
    assert apply_A_pow(IndicatorWindow(1, 3), 1, 0).lower == Fraction(3, 16)
    assert apply_A_pow(IndicatorWindow(1, 3), 1, 5).lower == 0
    # table: 1/2*1 + 1/8*(-2) + 1/16*(3/2) = 11/32
    t = FiniteTable((1, -2, Fraction(3, 2)))
    assert apply_A_pow(t, 1, 0).lower == Fraction(11, 32)
    assert apply_A_pow(t, 1, 2).lower == Fraction(3, 4)  # alpha_0 * 3/2
    assert apply_A_pow(t, 3, 99).lower == 0


def test_apply_validation():
    with pytest.raises(ValueError):
        apply_A_pow(IndicatorGE(1), -1, 0)
    with pytest.raises(ValueError):
        apply_A_pow(IndicatorGE(1), 1, -1)
    with pytest.raises(NotSummableError):
        apply_A_pow(PowerGrowth(0.5), 1, 0)
    with pytest.raises(NotSummableError):
        apply_A_pow(PowerGrowth(0.7), 2, 0, J=100)
    # n = 0 never touches the weights, so even heavy growth is fine there
    assert apply_A_pow(PowerGrowth(0.7), 0, 4).lower == 4.0**0.7


def test_truncated_enclosure_contains_exact_value():
    f = IndicatorGE(1)
    exact = Fraction(1, 2)
    for J in (1, 2, 5, 30):
        enc = apply_A_pow(f, 1, 0, J=J)
        assert enc.lower <= exact <= enc.upper
        assert enc.lower == sum(
            (weights.alpha_exact(j) for j in range(1, J)), Fraction(0)
        )
    # windows and tables close once the truncation covers the support
    enc = apply_A_pow(IndicatorWindow(1, 3), 1, 0, J=10)
    assert enc.lower == enc.upper == Fraction(3, 16)
    enc = apply_A_pow(FiniteTable((0, 1)), 1, 0, J=7)
    assert enc.lower == enc.upper == Fraction(1, 8)


def test_log_backend_enclosure_contains_true_tail():
    # at m = 2500 the exact backend is out of reach; the oracle is the
    # closed-form tail T(2500), which the log enclosure must straddle
    m = 2500
    true = float(weights.tail_exact(m))
    enc = apply_A_pow(IndicatorGE(m), 1, 0, backend="log")
    assert enc.lower <= true <= enc.upper
    assert enc.width < 1e-10
    trunc = apply_A_pow(IndicatorGE(m), 1, 0, J=m + 50, backend="log")
    assert trunc.lower <= true <= trunc.upper


def test_cesaro_translation_average():
    f = IndicatorGE(1)
    assert cesaro_T(f, 4, 0) == Fraction(3, 4)
    assert cesaro_T(f, 1, 0) == 0
    assert cesaro_T(f, 3, 2) == 1
    v = cesaro_T(PowerGrowth(0.5), 3, 0)
    assert isinstance(v, float)
    assert abs(v - (0.0 + 1.0 + math.sqrt(2.0)) / 3) < 1e-15
    with pytest.raises(ValueError):
        cesaro_T(f, 0, 0)


def test_cesaro_barycenter_average():
    # (f(0) + A f(0) + A^2 f(0)) / 3 = (0 + 1/2 + 3/4) / 3 = 5/12
    enc = cesaro_A(IndicatorGE(1), 3, 0)
    assert enc.lower == enc.upper == Fraction(5, 12)
    trunc = cesaro_A(IndicatorGE(1), 3, 0, J=40)
    assert trunc.lower <= Fraction(5, 12) <= trunc.upper
    with pytest.raises(ValueError):
        cesaro_A(IndicatorGE(1), 0, 0)


def test_barycenter_residual_is_exactly_zero():
    assert barycenter_residual(IndicatorGE(3), 0, 50) == 0
    assert barycenter_residual(IndicatorWindow(2, 7), 1, 40) == 0
    assert barycenter_residual(FiniteTable((1, -2, Fraction(3, 2))), 0, 30) == 0
    with pytest.raises(ValueError):
        barycenter_residual(PowerGrowth(0.2), 0, 50)


def test_image_norm_hand_oracles():
    # IndicatorGE(1), n=1, p=2: image is (1/2, 1, 1, ...), norm^2 =
    # alpha_0/4 + T(1) = 1/8 + 1/2 = 5/8
    e = image_p_norm(IndicatorGE(1), 1, 2)
    true = math.sqrt(5 / 8)
    assert e.lower <= true <= e.upper and e.width < 1e-10
    # table (0, 1): image is (1/8, 1/2, 0, ...), norm^2 = 5/128
    e = image_p_norm(FiniteTable((0, 1)), 1, 2)
    true = math.sqrt(5 / 128)
    assert e.lower <= true <= e.upper and e.width < 1e-10
    # signed table (1, -1): image is (3/8, -1/2, 0, ...), norm^2 =
    # (1/2)(9/64) + (1/8)(1/4) = 13/128; the sign must not leak into the norm
    e = image_p_norm(FiniteTable((1, -1)), 1, 2)
    true = math.sqrt(13 / 128)
    assert e.lower <= true <= e.upper and e.width < 1e-10


def test_image_norm_n_zero_reduces_to_p_norm():
    a = image_p_norm(IndicatorWindow(1, 3), 0, 2)
    b = p_norm(IndicatorWindow(1, 3), 2)
    assert a == b


def test_image_norm_power_growth():
    e = image_p_norm(PowerGrowth(0.2), 2, 2, K=1 << 13, J=1 << 13)
    n = p_norm(PowerGrowth(0.2), 2)
    assert 0 < e.lower
    # Jensen dominance: the image norm never exceeds (n+1)^(1/p) ||f||_p
    assert e.lower <= math.sqrt(3) * float(n.upper) * (1 + 1e-9)
    with pytest.raises(NotSummableError):
        image_p_norm(PowerGrowth(0.6), 1, 2)
    with pytest.raises(NotInLpError):
        image_p_norm(PowerGrowth(0.3), 1, 2)  # summable pointwise, not in l^2


def test_contraction_bound_cases():
    assert contraction_bound_check(IndicatorGE(1), 2).ok
    assert contraction_bound_check(FiniteTable((1, -2, Fraction(3, 2))), 1.5).ok
    c = contraction_bound_check(PowerGrowth(0.2), 2, K=1 << 13, J=1 << 13)
    assert c.ok and c.lhs <= c.rhs + 1


small_tables = st.lists(
    st.integers(min_value=-5, max_value=5), min_size=1, max_size=8
)


@given(
    f_vals=small_tables,
    g_vals=small_tables,
    n=st.integers(min_value=1, max_value=6),
    k=st.integers(min_value=0, max_value=4),
)
@settings(max_examples=120, deadline=None)
def test_property_exact_linearity(f_vals, g_vals, n, k):
    length = max(len(f_vals), len(g_vals))
    padded_f = f_vals + [0] * (length - len(f_vals))
    padded_g = g_vals + [0] * (length - len(g_vals))
    summed = FiniteTable(tuple(a + b for a, b in zip(padded_f, padded_g)))
    lhs = apply_A_pow(summed, n, k).lower
    rhs = apply_A_pow(FiniteTable(tuple(f_vals)), n, k).lower + apply_A_pow(
        FiniteTable(tuple(g_vals)), n, k
    ).lower
    assert lhs == rhs


@given(
    f_vals=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=8),
    bumps=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=8),
    n=st.integers(min_value=1, max_value=6),
    k=st.integers(min_value=0, max_value=4),
)
@settings(max_examples=120, deadline=None)
def test_property_positivity_and_monotonicity(f_vals, bumps, n, k):
    length = max(len(f_vals), len(bumps))
    f = FiniteTable(tuple(f_vals + [0] * (length - len(f_vals))))
    g = FiniteTable(
        tuple(
            a + b
            for a, b in zip(
                f_vals + [0] * (length - len(f_vals)),
                bumps + [0] * (length - len(bumps)),
            )
        )
    )
    lo = apply_A_pow(f, n, k).lower
    hi = apply_A_pow(g, n, k).lower
    assert 0 <= lo <= hi
