"""Desk-scale experiments that exercise the counterexample's moving parts.

Each experiment returns plain rows (dataclasses or tuples) so the CLI can
serialize them; verdict logic lives with the caller.  Exact arithmetic is
used wherever the grid allows it, certified lower bounds elsewhere: a growth
row's norm column is a lower bound obtained by truncation, never an estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import weights
from .errors import EmptyGridError, NotInLpError
from .limits import check_row_length, current_limits
from .lpspace import IndicatorGE, PowerGrowth, SeqFunction, apply_A_pow, check_exponent


def witness_fn(n: int) -> IndicatorGE:
    """The blow-up witness: the indicator of {k >= n^2}."""
    if n < 1:
        raise ValueError("need n >= 1")
    return IndicatorGE(n * n)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    norm_fn: float
    norm_anfn_lower: float
    ratio: float
    upper_bound: float


@dataclass(frozen=True)
class GrowthResult:
    rows: tuple
    slope: float
    fit_window: tuple
    p: float


def _survival_lower(n: int, m: int) -> np.ndarray:
    """Lower bounds on P(S_n >= m - k) for k = 0..m-1."""
    lim = current_limits()
    if (m - 1) + n <= lim.exact_limit:
        row = weights.exact_row(n, m)
        pref = [Fraction(0)]
        for w in row:
            pref.append(pref[-1] + w)
        # P(S_n >= m - k) = 1 - prefix(m - k); exact, so conversion is the
        # only rounding and a half-ulp never hurts a lower bound materially
        return np.array([float(1 - pref[m - k]) for k in range(m)])
    logs = weights.log_row(n, m)
    cs = np.cumsum(np.exp(np.asarray(logs)))
    slop = weights.row_slop(m)
    surv = 1.0 - cs[::-1] * (1.0 + slop)
    return np.maximum(surv, 0.0)


def growth_curve(p, n_max: int = 32, fit_from: Optional[int] = None) -> GrowthResult:
    """Certified lower bounds on R(n) = ||A^n f_n||_p / ||f_n||_p and a slope fit.

    The norm lower bound truncates the defining sum at K = n^2:
    ||A^n f_n||_p^p >= sum_{k<n^2} alpha_k P(S_n + k >= n^2)^p.  Every
    omitted term is nonnegative, and the truncated bound tracks the n^(1/p)
    growth without the constant-offset term that flattens a log-log fit at
    desk scale.  The fit is ordinary least squares on (log n, log R(n)) for
    n >= fit_from (default n_max//4, at least 2).
    """
    p = check_exponent(p)
    if n_max < 8:
        raise ValueError("need n_max >= 8 for a meaningful fit")
    check_row_length(n_max * n_max)
    if fit_from is None:
        fit_from = max(2, n_max // 4)
    rows = []
    for n in range(1, n_max + 1):
        m = n * n
        t_m = weights.tail_exact(m)
        norm_fn = float(t_m) ** (1.0 / p)
        surv = _survival_lower(n, m)
        base = np.exp(np.asarray(weights.log_row(1, m)))
        q_sum = float(np.sum(base * surv**p))
        # base and survival carry at most one row_slop of relative drift each
        slop = 3 * weights.row_slop(m) + 1e-12
        norm_lower = max(0.0, q_sum * (1 - slop)) ** (1.0 / p)
        ratio = norm_lower / norm_fn
        rows.append(
            GrowthRow(n, norm_fn, norm_lower, ratio, (n + 1) ** (1.0 / p))
        )
    xs = [math.log(r.n) for r in rows if r.n >= fit_from]
    ys = [math.log(r.ratio) for r in rows if r.n >= fit_from]
    slope = float(np.polyfit(xs, ys, 1)[0])
    return GrowthResult(tuple(rows), slope, (fit_from, n_max), p)


@dataclass(frozen=True)
class BlowupRow:
    n: int
    e_lower: float
    norm_lower: float


def blowup_curve(p, beta: Optional[float] = None, n_max: int = 32, J: int = 1 << 20):
    """Lower bounds on E f(S_n) for f = k^beta, and the induced norm bound.

    The norm bound is ||A^n f||_p >= alpha_0^(1/p) * E f(S_n).  A fixed
    truncation J keeps the rows comparable across n, so the (strict) growth
    of the underlying expectations survives the float slop.
    """
    p = check_exponent(p)
    if beta is None:
        beta = 2.0 / (5.0 * p)
    if not 0 < beta * p < 0.5:
        raise NotInLpError(f"needs 0 < beta*p < 1/2, got beta*p = {beta * p}")
    f = PowerGrowth(beta)
    scale = 0.5 ** (1.0 / p)  # alpha_0^(1/p)
    rows = [BlowupRow(0, 0.0, 0.0)]
    for n in range(1, n_max + 1):
        e_lower = float(apply_A_pow(f, n, 0, J=J).lower)
        rows.append(BlowupRow(n, e_lower, scale * e_lower))
    return tuple(rows)


def pointwise_divergence(f: SeqFunction, k: int = 0, n_max: int = 32, J: int = 1 << 20):
    """Rows (n, lower(A^n f(k))) for n = 0..n_max at a fixed truncation."""
    if not isinstance(f, PowerGrowth) or not 0 < f.beta < 0.5:
        raise ValueError("needs PowerGrowth with 0 < beta < 1/2")
    rows = [(0, float(f(k)))]
    for n in range(1, n_max + 1):
        rows.append((n, float(apply_A_pow(f, n, k, J=J).lower)))
    return tuple(rows)


def divergence_verdicts(rows) -> dict:
    """Monotonicity and the end-vs-quarter doubling of a divergence run.

    Doubling of the lower bounds between n_max/4 and n_max needs the growth
    rate n^(2*beta) to cover a factor 2 over that span, i.e. 4^(2*beta) >= 2;
    below beta = 1/4 it genuinely does not happen, and the verdict says so.
    """
    values = [v for _, v in rows]
    nondecreasing = all(b + 1e-12 >= a for a, b in zip(values, values[1:]))
    quarter = values[(len(values) - 1) // 4]
    doubled = values[-1] >= 2.0 * quarter
    return {"nondecreasing": nondecreasing, "doubled": doubled}


def probe_ratio_exact(n: int, j: int) -> Fraction:
    """alpha^n_j / (n * alpha_j) as an exact small product.

    Equals (j+1)/(j+n) * 2^(1-n) * prod_{i=1}^{n-1} (2j+i)/(j+i); never goes
    through full rows, so it stays cheap at any j.
    """
    if n < 1 or j < 0:
        raise ValueError("need n >= 1 and j >= 0")
    num = j + 1
    den = (j + n) << (n - 1)
    for i in range(1, n):
        num *= 2 * j + i
        den *= j + i
    return Fraction(num, den)


@dataclass(frozen=True)
class ProbeReport:
    c0: float
    n_max: int
    j_max: int
    rows: tuple
    min_observed: Fraction
    argmin: tuple


def lower_bound_probe(c0=1, n_max: int = 12, j_max: int = 2000) -> ProbeReport:
    """Minimum of alpha^n_j/(n alpha_j) over {2 <= n <= n_max, j <= j_max, c0*j >= n^2}."""
    if c0 < 1:
        raise ValueError("need c0 >= 1")
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    c0_exact = Fraction(c0)
    rows = []
    best = None
    argmin = None
    for n in range(2, n_max + 1):
        nn = n * n
        j_lo = nn if c0_exact == 1 else math.ceil(nn / c0_exact)
        while c0_exact * j_lo < nn:  # guard ceil against any float-derived c0
            j_lo += 1
        for j in range(j_lo, j_max + 1):
            ratio = probe_ratio_exact(n, j)
            rows.append((n, j, ratio))
            if best is None or ratio < best:
                best, argmin = ratio, (n, j)
    if not rows:
        raise EmptyGridError(
            f"no admissible (n, j) with c0*j >= n^2 for c0={c0}, "
            f"n_max={n_max}, j_max={j_max}"
        )
    return ProbeReport(float(c0), n_max, j_max, tuple(rows), best, argmin)


def maximal_profile(m: int, N: int) -> tuple:
    """sup_{1<=n<=N} M_n(T)(g)(k) for g the window [m, 2m), at each k < 2m.

    M_n(T)(g)(k) counts window hits among k..k+n-1 divided by n; the count is
    min(n, 2m-k) - max(0, m-k) clipped at 0, so the sweep is pure integer
    arithmetic with one cross-multiplied comparison per candidate.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if N < 2 * m:
        raise ValueError("horizon too short: need N >= 2m")
    out = []
    for k in range(2 * m):
        best_num, best_den = 0, 1
        for n in range(1, N + 1):
            hits = min(n, 2 * m - k) - max(0, m - k)
            if hits > 0 and hits * best_den > best_num * n:
                best_num, best_den = hits, n
        out.append(Fraction(best_num, best_den))
    return tuple(out)


def maximal_ratio_T(m: int, p, N: Optional[int] = None) -> float:
    """||sup_n M_n(T)(g_m)||_p / ||g_m||_p for the window witness g_m.

    The maximal function vanishes for k >= 2m, so both norms are finite sums
    closed by exact tails; the supremum over n is exhaustive because each
    k < 2m attains it by n <= 2m (default horizon N = 4m keeps headroom).
    """
    p = check_exponent(p)
    if N is None:
        N = 4 * m
    sup = maximal_profile(m, N)
    num = math.fsum(
        float(weights.alpha_exact(k)) * float(s) ** p for k, s in enumerate(sup) if s
    )
    den = float(weights.tail_exact(m) - weights.tail_exact(2 * m))
    return (num / den) ** (1.0 / p)


@dataclass(frozen=True)
class SatoMatrix:
    """A 2x2 unipotent upper-triangular matrix; the family is closed under products."""

    a11: Fraction
    a12: Fraction
    a21: Fraction
    a22: Fraction

    def __post_init__(self):
        if self.a21 != 0 or self.a11 != 1 or self.a22 != 1:
            raise ValueError("matrix must be unipotent upper-triangular")


def sato_power(n: int, a) -> SatoMatrix:
    """Closed form of the n-th power of [[1, a], [0, 1]]: [[1, n a], [0, 1]]."""
    if n < 0:
        raise ValueError("need n >= 0")
    a = Fraction(a)
    if a <= 0:
        raise ValueError("need a > 0")
    return SatoMatrix(Fraction(1), n * a, Fraction(0), Fraction(1))


def sato_matrix_product(n: int, a) -> SatoMatrix:
    """Brute-force n-fold product oracle for sato_power."""
    if n < 0:
        raise ValueError("need n >= 0")
    a = Fraction(a)
    if a <= 0:
        raise ValueError("need a > 0")
    m11, m12, m21, m22 = Fraction(1), Fraction(0), Fraction(0), Fraction(1)
    for _ in range(n):
        # multiply on the right by [[1, a], [0, 1]]
        m11, m12 = m11, m11 * a + m12
        m21, m22 = m21, m21 * a + m22
    return SatoMatrix(m11, m12, m21, m22)


def sato_norm_growth(a, p, n_max: int):
    """Rows (n, ||A^n e2||_p) = (n, ((n a)^p + 1)^(1/p)), strictly increasing."""
    p = check_exponent(p)
    a = Fraction(a)
    if a <= 0:
        raise ValueError("need a > 0")
    return tuple(
        (n, (float(n * a) ** p + 1.0) ** (1.0 / p)) for n in range(n_max + 1)
    )


def normalized_decay_check(p, n_max: int):
    """Rows (n, (n+1)^(1/p)/n): the normalized norm bound, decreasing to 0."""
    p = check_exponent(p)
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    return tuple((n, (n + 1.0) ** (1.0 / p) / n) for n in range(1, n_max + 1))
