"""Verification suites: named boolean verdicts over the whole construction.

The core suite is exact-arithmetic identities plus the two-backend agreement
scan; it is what a correctness mutation should trip.  The full suite adds the
desk-scale quantitative experiments (norm growth, blow-up, maximal function,
probe, Monte Carlo agreement).  Every check is deterministic: randomized
checks draw from fixed seeds, so a verdict flip always means a real change.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import experiments, mc, weights
from .lpspace import (
    FiniteTable,
    IndicatorGE,
    IndicatorWindow,
    PowerGrowth,
    apply_A_pow,
    barycenter_residual,
    cesaro_A,
    cesaro_T,
    contraction_bound_check,
    image_p_norm,
    p_norm,
)

DEFAULT_SEED = 104729

_PINNED = {
    (1, 0): Fraction(1, 2),
    (1, 1): Fraction(1, 8),
    (1, 2): Fraction(1, 16),
    (1, 3): Fraction(5, 128),
    (2, 0): Fraction(1, 4),
    (2, 1): Fraction(1, 8),
    (2, 2): Fraction(5, 64),
    (2, 4): Fraction(21, 512),
    (3, 0): Fraction(1, 8),
    (3, 1): Fraction(3, 32),
    (3, 2): Fraction(9, 128),
}


def check_exact_table() -> bool:
    ok = all(weights.alpha_pow_exact(n, j) == v for (n, j), v in _PINNED.items())
    ok &= all(
        weights.alpha_exact(j) == weights.alpha_pow_exact(1, j) for j in range(64)
    )
    # independent route: iterated convolution of the base row
    conv2 = weights.convolution_power(2, 8)
    conv3 = weights.convolution_power(3, 8)
    ok &= conv2.weights[0] == Fraction(1, 4)
    ok &= conv2.weights[2] == Fraction(5, 64)
    ok &= conv3.weights[2] == Fraction(9, 128)
    return bool(ok)


def check_closed_form_vs_convolution() -> bool:
    return weights.scan_convolution_agreement(6, 200).ok


def check_subadditivity() -> bool:
    return weights.scan_subadditivity(24, 400).ok


def check_normalized_monotonicity() -> bool:
    return weights.scan_normalized_monotonicity(20, 200).ok


def check_tail_identity() -> bool:
    return weights.scan_tail_identity(300).ok


def check_asymptotic_constant() -> bool:
    k = 10**6
    val = math.exp(weights.alpha_pow_log(1, k) + 1.5 * math.log(k))
    return abs(val / weights.ASYMPTOTIC_CONSTANT - 1.0) <= 0.01


def check_backend_agreement(bias: float = 0.0) -> bool:
    return weights.scan_backend_agreement(bias=bias).ok


def check_pgf_point_checks() -> bool:
    c0 = weights.pgf_check(0, 10)
    ok = c0.closed_form == 0.5 and c0.partial_sum == 0.5 and abs(c0.gap) <= 1e-25
    c1 = weights.pgf_check(Fraction(3, 4), 200)
    ok &= abs(c1.closed_form - 2.0 / 3.0) <= 1e-14
    ok &= -1e-25 <= c1.gap <= float(weights.tail_exact(200))
    c2 = weights.pgf_check(0.99, 10**5)
    ok &= abs(c2.closed_form - 10.0 / 11.0) <= 1e-13
    ok &= -1e-20 <= c2.gap <= weights.tail_float_bounds(10**5)[1]
    return bool(ok)


def check_barycenter_residual_zero() -> bool:
    cases = (
        (IndicatorGE(3), 0, 50),
        (IndicatorWindow(2, 7), 1, 40),
        (FiniteTable((Fraction(1), Fraction(-2), Fraction(3, 2))), 0, 30),
    )
    return all(barycenter_residual(f, k, J) == 0 for f, k, J in cases)


def check_cesaro_identities() -> bool:
    ok = cesaro_T(IndicatorGE(1), 4, 0) == Fraction(3, 4)
    enc = cesaro_A(IndicatorGE(1), 3, 0)
    ok &= enc.lower == enc.upper == Fraction(5, 12)
    # the finite average of a step function telescopes to a hit count
    for m in (0, 2, 5, 9):
        f = IndicatorGE(m)
        for n in range(1, 11):
            for k in range(7):
                hits = n - min(n, max(0, m - k))
                ok &= cesaro_T(f, n, k) == Fraction(hits, n)
    return bool(ok)


def check_sato_closed_form() -> bool:
    for a in (1, Fraction(3, 2)):
        for n in range(101):
            if experiments.sato_power(n, a) != experiments.sato_matrix_product(n, a):
                return False
    for n in range(51):
        for m in range(51):
            pn = experiments.sato_power(n, 1)
            pm = experiments.sato_power(m, 1)
            pnm = experiments.sato_power(n + m, 1)
            if not (
                pnm.a11 <= pn.a11 + pm.a11
                and pnm.a12 <= pn.a12 + pm.a12
                and pnm.a21 <= pn.a21 + pm.a21
                and pnm.a22 <= pn.a22 + pm.a22
            ):
                return False
    return True


def check_sato_norms() -> bool:
    rows = experiments.sato_norm_growth(1, 2, 10)
    vals = [v for _, v in rows]
    ok = abs(rows[2][1] - math.sqrt(5.0)) <= 1e-12
    ok &= all(b > a for a, b in zip(vals, vals[1:]))
    ok &= all(v >= n - 1e-12 for n, v in rows)
    ok &= all(v <= n + 1 + 1e-12 for n, v in rows)
    return bool(ok)


def check_normalized_decay() -> bool:
    rows = experiments.normalized_decay_check(2, 10**4)
    vals = [v for _, v in rows]
    ok = abs(rows[2][1] - 2.0 / 3.0) <= 1e-15
    ok &= abs(rows[98][1] - 10.0 / 99.0) <= 1e-15
    ok &= all(b < a for a, b in zip(vals, vals[1:]))
    ok &= vals[-1] <= 0.0101
    return bool(ok)


def check_operator_subadditivity() -> bool:
    """A^{n+m}(f)(k) <= A^n(f)(k) + A^m(f)(k) for f >= 0, exact."""
    fam = (
        IndicatorGE(3),
        IndicatorWindow(1, 6),
        FiniteTable((Fraction(2), Fraction(0), Fraction(1, 2), Fraction(3))),
    )
    for f in fam:
        vals = {
            (n, k): apply_A_pow(f, n, k, backend="exact").lower
            for n in range(1, 11)
            for k in range(21)
        }
        for n in range(1, 10):
            for m in range(n, 11 - n):
                for k in range(21):
                    if vals[(n + m, k)] > vals[(n, k)] + vals[(m, k)]:
                        return False
    return True


def check_semigroup_identity() -> bool:
    """A^n(A^m f) == A^{n+m} f exactly on a signed finite table."""
    f = FiniteTable(
        (Fraction(1), Fraction(-1, 2), Fraction(3), Fraction(0), Fraction(2, 3), Fraction(-4))
    )
    L = len(f.values)
    for m in (1, 2, 3):
        # A^m f vanishes past the support of f, so it is again a finite table
        g = FiniteTable(tuple(apply_A_pow(f, m, k, backend="exact").lower for k in range(L)))
        for n in (1, 2, 4):
            for k in range(L):
                lhs = apply_A_pow(g, n, k, backend="exact").lower
                rhs = apply_A_pow(f, n + m, k, backend="exact").lower
                if lhs != rhs:
                    return False
    return True


def check_normalized_decrease() -> bool:
    """A^{n+1}(f)(k)/(n+1) <= A^n(f)(k)/n for indicators, exact."""
    for m in (1, 3, 10):
        f = IndicatorGE(m)
        for k in range(21):
            prev = apply_A_pow(f, 1, k, backend="exact").lower
            for n in range(1, 13):
                nxt = apply_A_pow(f, n + 1, k, backend="exact").lower
                if nxt * n > prev * (n + 1):
                    return False
                prev = nxt
    return True


def check_norm_upper_bound() -> bool:
    """||A^n f||_p <= (n+1)^(1/p) ||f||_p on seeded random finite tables."""
    rng = np.random.default_rng(0xA1FA)
    for _ in range(100):
        length = int(rng.integers(1, 13))
        vals = tuple(Fraction(int(v), 4) for v in rng.integers(-8, 9, size=length))
        f = FiniteTable(vals)
        for p in (1.1, 1.5, 2.0, 3.0):
            nf = p_norm(f, p)
            for n in range(1, 13):
                img = image_p_norm(f, n, p)
                bound = (n + 1) ** (1.0 / p)
                rhs = bound * float(nf.lower)
                tol = (
                    1e-9 * (1 + abs(rhs))
                    + bound * float(nf.width)
                    + float(img.width)
                )
                if float(img.upper) > rhs + tol:
                    return False
    return True


def check_contraction_bound() -> bool:
    cases = (
        (IndicatorGE(2), 2.0),
        (IndicatorWindow(1, 5), 1.5),
        (FiniteTable((1, -2, Fraction(3, 2))), 3.0),
    )
    return all(contraction_bound_check(f, p).ok for f, p in cases)


def check_growth_slopes() -> bool:
    for p in (1.25, 2.0, 3.0):
        res = experiments.growth_curve(p, 32)
        if not 0.85 / p <= res.slope <= 1.15 / p:
            return False
        if not all(r.ratio <= r.upper_bound * (1 + 1e-12) for r in res.rows):
            return False
    return True


def check_blowup_monotone() -> bool:
    rows = experiments.blowup_curve(2.0)
    e = [r.e_lower for r in rows]
    ok = all(b > a for a, b in zip(e, e[1:]))
    ok &= e[32] >= 1.3 * e[8]
    return bool(ok)


def check_pointwise_divergence() -> bool:
    v_slow = experiments.divergence_verdicts(
        experiments.pointwise_divergence(PowerGrowth(0.2), 0, 24)
    )
    # end-vs-quarter doubling needs 4^(2 beta) >= 2, so probe it above 1/4
    v_fast = experiments.divergence_verdicts(
        experiments.pointwise_divergence(PowerGrowth(0.32), 0, 32)
    )
    return v_slow["nondecreasing"] and v_fast["nondecreasing"] and v_fast["doubled"]


def check_probe_positive() -> bool:
    rep6 = experiments.lower_bound_probe(1, 6, 2000)
    rep12 = experiments.lower_bound_probe(1, 12, 2000)
    ok = rep6.min_observed > 0 and rep12.min_observed > 0
    ok &= rep12.min_observed >= Fraction(1, 2) * rep6.min_observed
    ok &= rep12.min_observed > Fraction(1, 5)
    return bool(ok)


def check_maximal_growth() -> bool:
    grid = (4, 16, 64, 256)
    ratios = [experiments.maximal_ratio_T(m, 2.0) for m in grid]
    ok = all(b > a for a, b in zip(ratios, ratios[1:]))
    ok &= ratios[2] >= 1.15 * ratios[1]
    ok &= ratios[3] >= 1.15 * ratios[2]
    # the profile sup is attained by n <= 2m, so a longer horizon changes nothing
    ok &= all(
        experiments.maximal_ratio_T(m, 2.0, N=4 * m)
        == experiments.maximal_ratio_T(m, 2.0, N=8 * m)
        for m in (2, 4, 8)
    )
    return bool(ok)


def mc_within(est: mc.McEstimate, enc) -> bool:
    """Interval-overlap agreement: the 3-half-width ball around the estimate
    must reach the enclosure midpoint after discounting the enclosure's own
    radius.  Degenerate enclosures reduce this to plain |mc - exact| <= 3 hw.
    """
    mid = float(enc.midpoint)
    radius = float(enc.width) / 2.0
    return abs(est.mean - mid) <= 3.0 * est.half_width + radius + 1e-12


def check_mc_agreement(seed: int = DEFAULT_SEED) -> bool:
    est0 = mc.mc_apply_A(
        IndicatorWindow(0, 1), 2, 0, 10**4, mc.make_generator(seed, 0)
    )
    ok = abs(est0.mean - 0.25) <= 3.0 * est0.half_width + 1e-12

    cases = (
        (IndicatorGE(1), 1, 0, 10**5, None),
        (FiniteTable((1,)), 2, 0, 10**4, None),
        (PowerGrowth(0.2), 4, 0, 10**4, 1 << 20),
    )
    for stream, (f, n, k, trials, J) in enumerate(cases, start=1):
        est = mc.mc_apply_A(f, n, k, trials, mc.make_generator(seed, stream))
        enc = apply_A_pow(f, n, k, J=J)
        ok &= mc_within(est, enc)

    est_t = mc.mc_apply_A(
        IndicatorGE(100), 1, 0, 10**6, mc.make_generator(seed, 9)
    )
    exact_t = float(weights.tail_exact(100))
    ok &= abs(est_t.mean - exact_t) <= 3.0 * est_t.half_width + 1e-12

    # frequency test: first 64 states exactly, everything else in one bucket
    from scipy import stats

    trials = 10**5
    draws = mc._sample_array(mc.make_generator(seed, 13), trials)
    counts = np.bincount(np.minimum(draws, 64), minlength=65)
    probs = [float(weights.alpha_exact(j)) for j in range(64)]
    probs.append(float(weights.tail_exact(64)))
    expected = trials * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    ok &= float(stats.chi2.sf(chi2, df=64)) >= 1e-3
    return bool(ok)


CORE_CHECKS = (
    ("exact_table", check_exact_table),
    ("closed_form_vs_convolution", check_closed_form_vs_convolution),
    ("subadditivity", check_subadditivity),
    ("normalized_monotonicity", check_normalized_monotonicity),
    ("tail_identity", check_tail_identity),
    ("asymptotic_constant", check_asymptotic_constant),
    ("backend_agreement", check_backend_agreement),
    ("pgf_point_checks", check_pgf_point_checks),
    ("barycenter_residual_zero", check_barycenter_residual_zero),
    ("cesaro_identities", check_cesaro_identities),
    ("operator_subadditivity", check_operator_subadditivity),
    ("semigroup_identity", check_semigroup_identity),
    ("normalized_decrease", check_normalized_decrease),
    ("sato_closed_form", check_sato_closed_form),
    ("sato_norms", check_sato_norms),
    ("normalized_decay", check_normalized_decay),
)

FULL_CHECKS = (
    ("norm_upper_bound", check_norm_upper_bound),
    ("contraction_bound", check_contraction_bound),
    ("growth_slopes", check_growth_slopes),
    ("blowup_monotone", check_blowup_monotone),
    ("pointwise_divergence", check_pointwise_divergence),
    ("probe_positive", check_probe_positive),
    ("maximal_growth", check_maximal_growth),
    ("mc_agreement", check_mc_agreement),
)


def core_suite(bias: float = 0.0) -> dict:
    out = {}
    for name, fn in CORE_CHECKS:
        out[name] = fn(bias) if name == "backend_agreement" else fn()
    return out


def full_suite(seed: int = DEFAULT_SEED, bias: float = 0.0) -> dict:
    out = core_suite(bias=bias)
    for name, fn in FULL_CHECKS:
        out[name] = fn(seed) if name == "mc_agreement" else fn()
    return out
