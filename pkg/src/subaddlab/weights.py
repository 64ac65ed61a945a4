"""Exact and floating evaluation of the Catalan-type distribution and its powers.

The base law is alpha_j = C_j / 2^(2j+1) (C_j the j-th Catalan number): the
number of up-steps a simple symmetric walk makes before it first hits -1.
Its generating function is (1 - sqrt(1-x))/x, and the n-fold convolution
power has the closed form

    alpha^n_j = n / (2(j+n)) * 2^(1-2j-n) * binom(2j+n-1, j).

The base tail is exactly T(J) = sum_{j>=J} alpha_j = binom(2J, J) * 4^(-J).

Two backends.  "exact" works in Fraction arithmetic and is the authority for
every certified statement; "log" carries log-domain float64 weights for index
ranges where rationals get too wide.  Binomials are never formed from
factorial tables: exact rows use multiplicative running products, the log
backend uses log-gamma.  All public functions are pure, and cached rows fill
idempotently, so concurrent callers see behavior as if nothing were cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath
import numpy as np

from .errors import NotSummableError, ResourceLimitError
from .limits import check_row_length, current_limits

Weight = Union[Fraction, float]

LN2 = math.log(2.0)

# Limit of alpha_k * k^(3/2), by Stirling on the closed form.  The approach is
# monotone from below: alpha_k = T(k)/(2(k+1)) <= k^(-3/2)/(2 sqrt(pi)) for
# every k >= 1, which is what power_tail_bound leans on.
ASYMPTOTIC_CONSTANT = 0.28209479177387814  # 1/(2 sqrt(pi))

# Worst-case relative drift of a cumulative float row of length J (each step
# multiplies/adds one correctly-rounded factor).  Used to pad enclosures.
def row_slop(J: int) -> float:
    return 1e-13 + 4e-16 * max(J, 0)


def alpha_exact(j: int) -> Fraction:
    """alpha_j = C_j / 2^(2j+1), reduced."""
    if j < 0:
        raise ValueError("index must be >= 0")
    return Fraction(math.comb(2 * j, j), (j + 1) << (2 * j + 1))


def alpha_pow_exact(n: int, j: int) -> Fraction:
    """The n-fold convolution weight alpha^n_j, exact."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if j < 0:
        raise ValueError("index must be >= 0")
    # n/(2(j+n)) * 2^(1-2j-n) * binom(2j+n-1, j) == n*binom / ((j+n) << (2j+n))
    return Fraction(n * math.comb(2 * j + n - 1, j), (j + n) << (2 * j + n))


def alpha_pow_log(n: int, j: int) -> float:
    """log(alpha^n_j), accurate to ~1e-13 relative in the value for j+n <= 1e7.

    Plain double log-gamma differences lose eight digits here (three terms of
    size ~3e8 cancel), so the difference is formed at 40-digit working
    precision and rounded once at the end.
    """
    if n < 1:
        raise ValueError("power must be >= 1")
    if j < 0:
        raise ValueError("index must be >= 0")
    with mpmath.workdps(40):
        val = (
            mpmath.log(mpmath.mpf(n))
            - mpmath.log(2 * (j + n))
            + (1 - 2 * j - n) * mpmath.log(2)
            + mpmath.loggamma(2 * j + n)
            - mpmath.loggamma(j + 1)
            - mpmath.loggamma(j + n)
        )
        return float(val)


@lru_cache(maxsize=128)
def _row_exact(n: int, J: int) -> tuple:
    # alpha^n_{j+1} / alpha^n_j = (2j+n)(2j+n+1) / (4(j+1)(j+n+1))
    if J <= 0:
        return ()
    out = [Fraction(1, 1 << n)]
    w = out[0]
    for j in range(J - 1):
        w = w * Fraction((2 * j + n) * (2 * j + n + 1), 4 * (j + 1) * (j + n + 1))
        out.append(w)
    return tuple(out)


def _build_log_row(n: int, J: int) -> np.ndarray:
    """log alpha^n_j for j = 0..J-1, by cumulative sum of exact-in-float ratios."""
    if 2 * J + n > 60_000_000:
        # (2j+n)(2j+n+1) must stay below 2^53 for the ratio to be exact
        raise ResourceLimitError("log row too long for exact float ratios")
    out = np.empty(max(J, 1))
    out[0] = -n * LN2
    if J > 1:
        j = np.arange(J - 1, dtype=np.float64)
        num = (2.0 * j + n) * (2.0 * j + n + 1.0)
        den = 4.0 * (j + 1.0) * (j + n + 1.0)
        out[1:] = out[0] + np.cumsum(np.log(num / den))
    out = out[:J]
    out.flags.writeable = False
    return out


# only modest rows are worth keeping around; a 2^20-point row is 8 MB and is
# cheaper to rebuild than to evict useful entries for
_LOG_CACHE_MAX_J = 1 << 16

_row_log = lru_cache(maxsize=64)(_build_log_row)


def exact_row(n: int, J: int) -> tuple:
    """Weights alpha^n_0 .. alpha^n_{J-1} as Fractions."""
    if n < 1 or J < 0:
        raise ValueError("need n >= 1 and J >= 0")
    check_row_length(J)
    lim = current_limits()
    if J > 0 and (J - 1) + n > lim.exact_limit:
        raise ResourceLimitError(
            f"exact backend limited to j + n <= {lim.exact_limit}; "
            f"requested j + n = {(J - 1) + n}"
        )
    return _row_exact(n, J)


def log_row(n: int, J: int) -> np.ndarray:
    """log alpha^n_j for j = 0..J-1 (read-only array)."""
    if n < 1 or J < 0:
        raise ValueError("need n >= 1 and J >= 0")
    check_row_length(J)
    if J > _LOG_CACHE_MAX_J:
        return _build_log_row(n, J)
    return _row_log(n, J)[:J]


def tail_exact(J: int) -> Fraction:
    """T(J) = sum_{j>=J} alpha_j = binom(2J, J) / 4^J, exact."""
    if J < 0:
        raise ValueError("index must be >= 0")
    return Fraction(math.comb(2 * J, J), 1 << (2 * J))


def tail_pow_bound(n: int, J: int) -> Fraction:
    """Certified upper bound min(1, n*T(J)) on sum_{j>=J} alpha^n_j."""
    if n < 1:
        raise ValueError("power must be >= 1")
    return min(Fraction(1), n * tail_exact(J))


def tail_float_bounds(J: int) -> tuple[float, float]:
    """Certified float bracket for T(J).

    For J >= 1:  1/sqrt(pi (J + 1/2)) <= T(J) <= 1/sqrt(pi J).  Both follow
    from the Wallis-type monotonicity of T(J) sqrt(pi J) (increasing to 1)
    and T(J) sqrt(pi (J + 1/2)) (decreasing to 1).  A couple of ulps of
    outward rounding absorb the float evaluation itself.
    """
    if J < 0:
        raise ValueError("index must be >= 0")
    if J == 0:
        return (1.0, 1.0)
    hi = 1.0 / math.sqrt(math.pi * J)
    lo = 1.0 / math.sqrt(math.pi * (J + 0.5))
    for _ in range(3):
        hi = math.nextafter(hi, math.inf)
        lo = math.nextafter(lo, 0.0)
    return (lo, hi)


def power_tail_bound(q: float, K: int) -> float:
    """Certified upper bound on sum_{k>=K} alpha_k * k^q for 0 <= q < 1/2.

    Uses alpha_k <= k^(-3/2)/(2 sqrt(pi)) (valid for all k >= 1, see
    ASYMPTOTIC_CONSTANT) plus an integral comparison of the decreasing
    summand: sum_{k>=K} k^(q-3/2) <= K^(q-3/2) + K^(q-1/2)/(1/2-q).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if q < 0:
        raise ValueError("q must be >= 0")
    if q >= 0.5:
        raise NotSummableError("tail sum diverges for exponent q >= 1/2")
    bound = ASYMPTOTIC_CONSTANT * (K ** (q - 1.5) + K ** (q - 0.5) / (0.5 - q))
    return bound * (1.0 + 1e-12)


@dataclass(frozen=True)
class WeightTable:
    """A truncated weight row: alpha^n_j for j < len(weights), plus a tail bound.

    weights holds Fractions when backend == "exact" and log-domain floats when
    backend == "log".  n == 0 is allowed and means the convolution unit
    (point mass at 0), which convolve needs as its identity element.
    """

    n: int
    weights: tuple
    tail_bound: Weight
    backend: str = "exact"

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("power must be >= 0")
        if self.backend not in ("exact", "log"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.tail_bound < 0:
            raise ValueError("tail bound must be >= 0")
        if self.backend == "exact" and any(w < 0 for w in self.weights):
            raise ValueError("weights must be >= 0")

    def __len__(self) -> int:
        return len(self.weights)

    def linear(self):
        """Weights in the linear domain: Fractions (exact) or a float array (log)."""
        if self.backend == "exact":
            return self.weights
        return np.exp(np.asarray(self.weights, dtype=np.float64))

    def weight(self, j: int):
        if not 0 <= j < len(self.weights):
            raise IndexError(j)
        w = self.weights[j]
        return w if self.backend == "exact" else math.exp(w)

    def prefix_mass(self):
        """Sum of the stored weights (exact Fraction, or float for the log backend)."""
        if self.backend == "exact":
            return sum(self.weights, Fraction(0))
        return float(np.sum(self.linear()))


def delta_table(J: int = 1) -> WeightTable:
    """The convolution unit: point mass at 0, truncated at J."""
    if J < 1:
        raise ValueError("need J >= 1")
    return WeightTable(0, (Fraction(1),) + (Fraction(0),) * (J - 1), Fraction(0))


def build_table(n: int, J: int, backend: str = "auto") -> WeightTable:
    """Weight row for alpha^n truncated at J with a certified tail bound."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if J < 0:
        raise ValueError("truncation must be >= 0")
    check_row_length(J)
    lim = current_limits()
    if backend == "auto":
        backend = "exact" if (J == 0 or (J - 1) + n <= lim.exact_limit) else "log"
    if backend == "exact":
        weights = exact_row(n, J)
        tail = tail_pow_bound(n, J)
        return WeightTable(n, weights, tail, "exact")
    if backend == "log":
        weights = tuple(float(v) for v in log_row(n, J))
        if J == 0:
            tail = 1.0
        else:
            tail = min(1.0, n * tail_float_bounds(J)[1])
        return WeightTable(n, weights, tail, "log")
    raise ValueError(f"unknown backend {backend!r}")


def convolve(u: WeightTable, v: WeightTable) -> WeightTable:
    """Brute-force convolution on the common prefix.

    The tail bound propagates through the total-mass identity: mass of u*v
    beyond the prefix is at most (Pu + tu)(Pv + tv) - sum(prefix), i.e.
    u.tail + v.tail + cross terms.
    """
    J = min(len(u), len(v))
    exact = u.backend == "exact" and v.backend == "exact"
    if exact:
        a = u.weights
        b = v.weights
        prefix = [
            sum((a[i] * b[j - i] for i in range(j + 1)), Fraction(0))
            for j in range(J)
        ]
        mass = sum(prefix, Fraction(0))
        tail = (u.prefix_mass() + u.tail_bound) * (v.prefix_mass() + v.tail_bound) - mass
        tail = min(Fraction(1), max(Fraction(0), tail))
        return WeightTable(u.n + v.n, tuple(prefix), tail, "exact")
    a = np.asarray(u.linear(), dtype=np.float64)[:J]
    b = np.asarray(v.linear(), dtype=np.float64)[:J]
    prefix = np.convolve(a, b)[:J]
    mass = float(np.sum(prefix))
    tail = (float(np.sum(a)) + float(u.tail_bound)) * (
        float(np.sum(b)) + float(v.tail_bound)
    ) - mass
    tail = min(1.0, max(0.0, tail * (1 + 1e-12) + 1e-15))
    logw = tuple(math.log(x) if x > 0 else -math.inf for x in prefix)
    return WeightTable(u.n + v.n, logw, tail, "log")


def convolution_power(n: int, J: int) -> WeightTable:
    """n-fold convolution of the base row, the oracle for the closed form."""
    if n < 1 or J < 1:
        raise ValueError("need n >= 1 and J >= 1")
    base = WeightTable(1, _row_exact(1, J), tail_exact(J))
    acc = base
    for _ in range(n - 1):
        acc = convolve(acc, base)
    return acc


class PgfCheck:
    """Point check of the generating function against its partial sums."""

    __slots__ = ("partial_sum", "closed_form", "gap")

    def __init__(self, partial_sum: float, closed_form: float, gap: float):
        self.partial_sum = partial_sum
        self.closed_form = closed_form
        self.gap = gap

    def __repr__(self):
        return (
            f"PgfCheck(partial_sum={self.partial_sum!r}, "
            f"closed_form={self.closed_form!r}, gap={self.gap!r})"
        )


def pgf_check(x, J: int) -> PgfCheck:
    """Compare sum_{j<J} alpha_j x^j with (1 - sqrt(1-x))/x at 40-digit precision.

    The true gap is the (positive) discarded tail, at most T(J); the returned
    float gap carries working-precision rounding of order 1e-30, so it can dip
    that far below zero when the true gap is smaller still.
    """
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0, 1)")
    if J < 0:
        raise ValueError("truncation must be >= 0")
    with mpmath.workdps(40):
        xm = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
        if xm == 0:
            closed = mpmath.mpf(1) / 2
        else:
            closed = (1 - mpmath.sqrt(1 - xm)) / xm
        term = mpmath.mpf(1) / 2
        total = mpmath.mpf(0)
        for j in range(J):
            total += term
            # alpha_{j+1}/alpha_j = (2j+1)/(2(j+2)); one extra factor of x per step
            term = term * xm * (2 * j + 1) / (2 * (j + 2))
        gap = closed - total
        return PgfCheck(float(total), float(closed), float(gap))


@dataclass(frozen=True)
class ScanResult:
    checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def scan_subadditivity(nm_max: int = 24, j_max: int = 400) -> ScanResult:
    """Exact check of alpha^{n+m}_j <= alpha^n_j + alpha^m_j on a full grid."""
    rows = {n: _row_exact(n, j_max + 1) for n in range(1, nm_max)}
    checked = 0
    bad = []
    for n in range(1, nm_max):
        for m in range(n, nm_max - n + 1):
            rn, rm, rnm = rows[n], rows[m], rows[n + m] if n + m < nm_max else _row_exact(n + m, j_max + 1)
            for j in range(j_max + 1):
                checked += 1
                if rnm[j] > rn[j] + rm[j]:
                    bad.append((n, m, j))
    return ScanResult(checked, tuple(bad))


def scan_normalized_monotonicity(n_max: int = 20, j_max: int = 200) -> ScanResult:
    """Exact check that alpha^{n+1}_j/(n+1) <= alpha^n_j/n."""
    rows = {n: _row_exact(n, j_max + 1) for n in range(1, n_max + 2)}
    checked = 0
    bad = []
    for n in range(1, n_max + 1):
        rn, rn1 = rows[n], rows[n + 1]
        for j in range(j_max + 1):
            checked += 1
            if rn1[j] * n > rn[j] * (n + 1):
                bad.append((n, j))
    return ScanResult(checked, tuple(bad))


def scan_convolution_agreement(n_max: int = 6, j_max: int = 200) -> ScanResult:
    """Closed form vs iterated convolution, exact equality on the full grid."""
    J = j_max + 1
    checked = 0
    bad = []
    acc = WeightTable(1, _row_exact(1, J), tail_exact(J))
    base = acc
    for n in range(1, n_max + 1):
        if n > 1:
            acc = convolve(acc, base)
        closed = _row_exact(n, J)
        for j in range(J):
            checked += 1
            if closed[j] != acc.weights[j]:
                bad.append((n, j))
    return ScanResult(checked, tuple(bad))


def scan_tail_identity(j_max: int = 300) -> ScanResult:
    """Prefix + closed-form tail == 1, and T(J) - T(J+1) == alpha_J, exact."""
    checked = 0
    bad = []
    prefix = Fraction(0)
    for J in range(j_max + 1):
        checked += 1
        if prefix + tail_exact(J) != 1:
            bad.append(("prefix", J))
        if tail_exact(J) - tail_exact(J + 1) != alpha_exact(J):
            bad.append(("difference", J))
        prefix += alpha_exact(J)
    return ScanResult(checked, tuple(bad))


@dataclass(frozen=True)
class AgreementResult:
    checked: int
    max_rel_diff: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_rel_diff <= self.tolerance


def scan_backend_agreement(bias: float = 0.0, tolerance: float = 1e-9) -> AgreementResult:
    """Cross-validate the two backends on the overlap window j + n in [500, 2000].

    bias is a fault-injection hook: it is added to every log-domain value
    before comparison, so a nonzero bias must trip the verdict.
    """
    points = []
    for n in (1, 2, 3, 7, 20, 100, 500):
        for j in (0, 1, 5, 50, 199, 450, 500, 900, 1400, 1900):
            if 500 <= j + n <= 2000:
                points.append((n, j))
    points.extend([(1, 500), (1, 2000 - 1), (2, 1998), (1000, 1000)])
    worst = 0.0
    seen = set()
    for n, j in points:
        if (n, j) in seen or j + n > 2000:
            continue
        seen.add((n, j))
        exact = alpha_pow_exact(n, j)
        approx = math.exp(alpha_pow_log(n, j) + bias)
        rel = abs(approx / float(exact) - 1.0)
        worst = max(worst, rel)
    return AgreementResult(len(seen), worst, tolerance)
