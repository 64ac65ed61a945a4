"""Experiment-driver tests.

Independent oracles: the survival table for n = 2, m = 4 is worked out by
hand from the exact squared weights, the maximal-function profile has the
closed form m/(2m-k) for k < m and 1 on [m, 2m), and the probe ratio is
cross-checked against the quotient of closed-form weights it abbreviates.
Empirical curve values (slopes, doubling ratios) are pinned to windows, not
exact floats, since they depend on documented truncation choices.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from subaddlab import experiments, weights
from subaddlab.errors import EmptyGridError, NotInLpError
from subaddlab.lpspace import IndicatorGE, PowerGrowth


def test_witness_fn():
    assert experiments.witness_fn(3) == IndicatorGE(9)
    with pytest.raises(ValueError):
        experiments.witness_fn(0)


def test_survival_lower_by_hand():
    # prefix sums of (1/4, 1/8, 5/64, 7/128): survival at k is 1 - prefix(4-k)
    surv = experiments._survival_lower(2, 4)
    expected = [Fraction(63, 128), Fraction(35, 64), Fraction(5, 8), Fraction(3, 4)]
    assert np.allclose(surv, [float(v) for v in expected], rtol=0, atol=1e-15)
    # the log route must stay below the true survival (lower bounds)
    lo = experiments._survival_lower(2, 2100)
    exactish = 1.0 - float(sum(weights.exact_row(2, 1998), Fraction(0)))
    assert 0.0 <= lo[2100 - 1998] <= exactish + 1e-12


def test_growth_curve_structure():
    res = experiments.growth_curve(2.0, n_max=16)
    assert res.fit_window == (4, 16) and res.p == 2.0
    assert len(res.rows) == 16
    r1, r2 = res.rows[0], res.rows[1]
    assert abs(r1.norm_fn - math.sqrt(0.5)) < 1e-15
    assert abs(r2.norm_fn - math.sqrt(35 / 128)) < 1e-15  # T(4) = 35/128
    for row in res.rows:
        assert 0 < row.norm_anfn_lower
        assert row.ratio <= row.upper_bound * (1 + 1e-12)
        assert row.upper_bound == (row.n + 1) ** 0.5
    assert res.rows[-1].ratio > res.rows[0].ratio
    # measured 0.5258 at this window; the exponent target is 1/p = 0.5
    assert 0.45 < res.slope < 0.60


def test_growth_curve_validation():
    with pytest.raises(ValueError):
        experiments.growth_curve(2.0, n_max=4)
    with pytest.raises(ValueError):
        experiments.growth_curve(1.0, n_max=8)


def test_blowup_expectation_pin():
    rows = experiments.blowup_curve(2.0, n_max=1)
    assert rows[0] == experiments.BlowupRow(0, 0.0, 0.0)
    # E S_1^0.2 at the default truncation, measured 0.8346081
    assert 0.83 < rows[1].e_lower < 0.84
    assert rows[1].norm_lower == 0.5**0.5 * rows[1].e_lower


def test_blowup_curve_structure():
    rows = experiments.blowup_curve(2.0, n_max=8, J=1 << 16)
    assert len(rows) == 9
    for a, b in zip(rows, rows[1:]):
        assert b.e_lower > a.e_lower
        assert b.norm_lower == 0.5**0.5 * b.e_lower
    with pytest.raises(NotInLpError):
        experiments.blowup_curve(2.0, beta=0.3)
    with pytest.raises(NotInLpError):
        experiments.blowup_curve(2.0, beta=0.0)


def test_pointwise_divergence_doubling_depends_on_beta():
    # beta = 0.32: n^(2 beta) covers a factor 2 between n_max/4 and n_max
    rows = experiments.pointwise_divergence(PowerGrowth(0.32), n_max=32, J=1 << 18)
    v = experiments.divergence_verdicts(rows)
    assert v["nondecreasing"] and v["doubled"]
    # beta = 0.2 grows too slowly to double over the same span; the verdict
    # must report that honestly rather than blur it into a pass
    rows = experiments.pointwise_divergence(PowerGrowth(0.2), n_max=24, J=1 << 18)
    v = experiments.divergence_verdicts(rows)
    assert v["nondecreasing"] and not v["doubled"]
    values = [x for _, x in rows]
    assert values[0] == 0.0 and values[-1] > 1.0


def test_pointwise_divergence_validation():
    with pytest.raises(ValueError):
        experiments.pointwise_divergence(IndicatorGE(1))
    with pytest.raises(ValueError):
        experiments.pointwise_divergence(PowerGrowth(0.5))
    with pytest.raises(ValueError):
        experiments.pointwise_divergence(PowerGrowth(0.0))


def test_probe_ratio_closed_form_agrees_with_weight_quotient():
    for n in range(1, 9):
        for j in range(0, 61):
            direct = experiments.probe_ratio_exact(n, j)
            quotient = weights.alpha_pow_exact(n, j) / (n * weights.alpha_exact(j))
            assert direct == quotient
    assert experiments.probe_ratio_exact(2, 4) == Fraction(3, 4)
    with pytest.raises(ValueError):
        experiments.probe_ratio_exact(0, 4)


def test_probe_minimum_frozen():
    rep6 = experiments.lower_bound_probe(1, 6, 2000)
    rep12 = experiments.lower_bound_probe(1, 12, 2000)
    assert rep6.min_observed == Fraction(1309, 1824)
    assert rep6.argmin == (4, 16)
    assert rep12.min_observed == Fraction(1309, 1824)
    assert rep12.argmin == (4, 16)
    assert rep12.min_observed > Fraction(1, 5)
    assert all(r > 0 for _, _, r in rep12.rows)


def test_probe_validation():
    with pytest.raises(EmptyGridError):
        experiments.lower_bound_probe(1, 2, 3)  # needs j >= 4 at n = 2
    with pytest.raises(ValueError):
        experiments.lower_bound_probe(0.5, 6, 100)
    with pytest.raises(ValueError):
        experiments.lower_bound_probe(1, 1, 100)


def test_maximal_profile_closed_form():
    for m in (1, 2, 3, 5, 8):
        prof = experiments.maximal_profile(m, 4 * m)
        assert len(prof) == 2 * m
        for k in range(2 * m):
            expected = Fraction(m, 2 * m - k) if k < m else Fraction(1)
            assert prof[k] == expected
    with pytest.raises(ValueError):
        experiments.maximal_profile(2, 3)
    with pytest.raises(ValueError):
        experiments.maximal_profile(0, 4)


def test_maximal_ratio_values():
    assert abs(experiments.maximal_ratio_T(1, 2) - math.sqrt(2)) < 1e-15
    # longer horizons change nothing: every supremum is attained by n <= 2m
    for m in (2, 4, 8):
        assert experiments.maximal_ratio_T(m, 2, N=4 * m) == experiments.maximal_ratio_T(
            m, 2, N=8 * m
        )
    ratios = [experiments.maximal_ratio_T(m, 2) for m in (4, 16, 64, 256)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > 5.0  # unbounded in m: already past 5 at m = 256


def test_sato_closed_form_matches_product_oracle():
    for a in (1, Fraction(3, 2), Fraction(1, 3)):
        for n in range(0, 40):
            assert experiments.sato_power(n, a) == experiments.sato_matrix_product(n, a)
    with pytest.raises(ValueError):
        experiments.sato_power(3, 0)
    with pytest.raises(ValueError):
        experiments.sato_power(-1, 1)
    with pytest.raises(ValueError):
        experiments.SatoMatrix(Fraction(2), Fraction(0), Fraction(0), Fraction(1))


def test_sato_norm_growth():
    rows = experiments.sato_norm_growth(1, 2, 8)
    assert rows[0] == (0, 1.0)
    assert abs(rows[2][1] - math.sqrt(5)) < 1e-15
    assert abs(rows[3][1] - math.sqrt(10)) < 1e-15
    assert all(b[1] > a[1] for a, b in zip(rows, rows[1:]))
    # the norms grow linearly, so the subadditive normalized limit is a > 0
    for n, v in rows[1:]:
        assert n <= v <= n + 1 + 1e-12


def test_normalized_decay():
    rows = experiments.normalized_decay_check(2, 100)
    assert rows[0] == (1, math.sqrt(2))
    assert abs(rows[2][1] - 2 / 3) < 1e-15
    assert all(b[1] < a[1] for a, b in zip(rows, rows[1:]))
    assert rows[-1][1] < 0.101
    with pytest.raises(ValueError):
        experiments.normalized_decay_check(2, 1)
