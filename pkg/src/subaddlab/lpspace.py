"""The weighted sequence space l^p(N, alpha) and the barycenter operator A.

A function f on N lives in the space when sum_k alpha_k |f(k)|^p is finite.
The operator is A = sum_j alpha_j T^j (T the translation f -> f(.+1)), so
A^n(f)(k) = sum_j alpha^n_j f(j+k) = E f(S_n + k) for the random walk S_n.

Infinite sums are returned as Enclosure(lower, upper) pairs.  Exact rational
partial sums are used whenever the function and the backend allow it; the
float path carries a documented ~1e-12-level rounding allowance via
weights.row_slop plus a certified tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import weights
from .errors import NotInLpError, NotSummableError
from .limits import current_limits

Real = Union[int, float, Fraction]

# cap for adaptive truncation ladders; the relative-width target is often
# unreachable for heavy tails (the bound decays like K^(q-1/2)), so ladders
# stop here and the enclosure honestly stays wide
_ADAPTIVE_CAP = 1 << 21
_ADAPTIVE_START = 1 << 12


def check_exponent(p) -> float:
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError(f"exponent must satisfy 1 < p < inf, got {p}")
    return p


class SeqFunction:
    """A symbolic function on N.  Subclasses implement __call__."""

    def __call__(self, k: int):
        raise NotImplementedError


@dataclass(frozen=True)
class PowerGrowth(SeqFunction):
    """k^beta, with the value at k = 0 defined as 0."""

    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError("beta must be finite and >= 0")

    def __call__(self, k: int):
        if k < 0:
            raise ValueError("index must be >= 0")
        return 0.0 if k == 0 else float(k) ** self.beta


@dataclass(frozen=True)
class IndicatorGE(SeqFunction):
    """1 on {k >= m}, else 0."""

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("threshold must be >= 0")

    def __call__(self, k: int):
        if k < 0:
            raise ValueError("index must be >= 0")
        return 1 if k >= self.m else 0


@dataclass(frozen=True)
class IndicatorWindow(SeqFunction):
    """1 on the half-open window [a, b), else 0."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.a > self.b:
            raise ValueError("need 0 <= a <= b")

    def __call__(self, k: int):
        if k < 0:
            raise ValueError("index must be >= 0")
        return 1 if self.a <= k < self.b else 0


@dataclass(frozen=True)
class FiniteTable(SeqFunction):
    """Finitely supported function given by a value table; 0 beyond it."""

    values: tuple

    def __init__(self, values: Sequence[Real]):
        vals = tuple(values)
        for v in vals:
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError("table entries must be finite")
        object.__setattr__(self, "values", vals)

    def __call__(self, k: int):
        if k < 0:
            raise ValueError("index must be >= 0")
        return self.values[k] if k < len(self.values) else 0


def eval_fn(f: SeqFunction, k: int):
    """Pointwise evaluation (same as calling f directly)."""
    return f(k)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _pad_down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _pad_up(x: float) -> float:
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Enclosure:
    """A certified bracket [lower, upper] around a (possibly infinite) sum."""

    lower: Real
    upper: Real

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"inverted enclosure: {self.lower} > {self.upper}")

    @classmethod
    def point(cls, v: Real) -> "Enclosure":
        return cls(v, v)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        if _is_exact(self.lower) and _is_exact(self.upper):
            return (Fraction(self.lower) + Fraction(self.upper)) / 2
        return (float(self.lower) + float(self.upper)) / 2

    def __add__(self, other: "Enclosure") -> "Enclosure":
        if not isinstance(other, Enclosure):
            return NotImplemented
        if all(_is_exact(v) for v in (self.lower, self.upper, other.lower, other.upper)):
            return Enclosure(self.lower + other.lower, self.upper + other.upper)
        return Enclosure(
            _pad_down(float(self.lower) + float(other.lower)),
            _pad_up(float(self.upper) + float(other.upper)),
        )

    def scale(self, c: Real) -> "Enclosure":
        """Multiply both ends by a scalar c >= 0."""
        if c < 0:
            raise ValueError("scale factor must be >= 0")
        if _is_exact(c) and _is_exact(self.lower) and _is_exact(self.upper):
            return Enclosure(self.lower * c, self.upper * c)
        return Enclosure(
            _pad_down(float(self.lower) * float(c)),
            _pad_up(float(self.upper) * float(c)),
        )


def _root_enclosure(lo, hi, p: float) -> Enclosure:
    """Map a nonnegative enclosure through x -> x^(1/p), padding outward."""
    lo_f = max(0.0, float(lo))
    hi_f = max(0.0, float(hi))
    r_lo = lo_f ** (1.0 / p)
    r_hi = hi_f ** (1.0 / p)
    for _ in range(4):
        r_lo = _pad_down(r_lo)
        r_hi = _pad_up(r_hi)
    return Enclosure(max(0.0, r_lo), r_hi)


def _adaptive_ladder(start=_ADAPTIVE_START):
    """Yield (size, capped) truncation steps; the consumer breaks when satisfied."""
    cap = min(current_limits().max_j, _ADAPTIVE_CAP)
    K = min(start, cap)
    while True:
        yield K, K >= cap
        K = min(2 * K, cap)


def p_norm(f: SeqFunction, p, K: Optional[int] = None) -> Enclosure:
    """Enclosure of (sum_k alpha_k |f(k)|^p)^(1/p).

    Indicators close exactly through the tail identity; PowerGrowth uses an
    integral-comparison tail and is rejected outright when beta*p >= 1/2
    (the function is then outside the space).
    """
    p = check_exponent(p)
    if isinstance(f, IndicatorGE):
        mass = weights.tail_exact(f.m)
        return _root_enclosure(mass, mass, p)
    if isinstance(f, IndicatorWindow):
        mass = weights.tail_exact(f.a) - weights.tail_exact(f.b)
        return _root_enclosure(mass, mass, p)
    if isinstance(f, FiniteTable):
        terms = [
            float(weights.alpha_exact(k)) * abs(float(v)) ** p
            for k, v in enumerate(f.values)
        ]
        s = math.fsum(terms)
        slop = 1e-13 * (1 + len(terms))
        return _root_enclosure(s * (1 - slop), s * (1 + slop), p)
    if isinstance(f, PowerGrowth):
        q = f.beta * p
        if q >= 0.5:
            raise NotInLpError(
                f"k^{f.beta} is outside l^{p}(N, alpha): needs beta*p < 1/2, got {q}"
            )
        for size, capped in _adaptive_ladder(start=K or _ADAPTIVE_START):
            if K is not None:
                size, capped = K, True
            logs = weights.log_row(1, size)
            k = np.arange(1, size, dtype=np.float64)
            s = float(np.sum(np.exp(np.asarray(logs[1:]) + q * np.log(k))))
            tail = weights.power_tail_bound(q, size)
            if capped or tail <= max(1e-14, 1e-10 * s):
                slop = weights.row_slop(size)
                return _root_enclosure(s * (1 - slop), (s + tail) * (1 + slop), p)
    raise TypeError(f"unsupported function kind: {type(f).__name__}")


def _exact_value(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _prefix_enclosure(n: int, length: int, backend: str):
    """(weights list, exact flag) for alpha^n_0..alpha^n_{length-1}."""
    lim = current_limits()
    if backend == "auto":
        backend = "exact" if length == 0 or (length - 1) + n <= lim.exact_limit else "log"
    if backend == "exact":
        return weights.exact_row(n, length), True
    return np.exp(np.asarray(weights.log_row(n, length))), False


def apply_A_pow(
    f: SeqFunction,
    n: int,
    k: int,
    J: Optional[int] = None,
    backend: str = "auto",
) -> Enclosure:
    """Enclosure of A^n(f)(k) = sum_j alpha^n_j f(j+k).

    With J omitted, indicator and finite-table arguments resolve to the exact
    value (degenerate enclosure) on the exact backend: for IndicatorGE the
    series closes as 1 minus a finite prefix sum.  With J given, the lower
    end is literally the truncated sum over j < J and the upper end adds a
    certified bound on the discarded remainder.
    """
    if n < 0 or k < 0:
        raise ValueError("need n >= 0 and k >= 0")
    if isinstance(f, PowerGrowth) and n >= 1 and f.beta >= 0.5:
        raise NotSummableError(
            f"sum of alpha^n_j (j+k)^{f.beta} diverges: needs beta < 1/2"
        )
    if n == 0:
        v = f(k)
        return Enclosure.point(v)

    if J is not None:
        return _apply_truncated(f, n, k, J, backend)

    if isinstance(f, IndicatorGE):
        if k >= f.m:
            return Enclosure.point(Fraction(1))
        length = f.m - k
        row, exact = _prefix_enclosure(n, length, backend)
        if exact:
            return Enclosure.point(1 - sum(row, Fraction(0)))
        s = float(np.sum(row))
        slop = weights.row_slop(length)
        lo = max(0.0, 1.0 - s * (1 + slop))
        hi = min(1.0, 1.0 - s * (1 - slop))
        return Enclosure(lo, hi)
    if isinstance(f, IndicatorWindow):
        if k >= f.b:
            return Enclosure.point(Fraction(0))
        hi_len = f.b - k
        lo_len = max(0, f.a - k)
        row, exact = _prefix_enclosure(n, hi_len, backend)
        if exact:
            return Enclosure.point(sum(row[lo_len:hi_len], Fraction(0)))
        s = float(np.sum(row[lo_len:hi_len]))
        slop = weights.row_slop(hi_len)
        return Enclosure(max(0.0, s * (1 - slop)), min(1.0, s * (1 + slop)))
    if isinstance(f, FiniteTable):
        L = len(f.values)
        if k >= L:
            return Enclosure.point(Fraction(0))
        length = L - k
        row, exact = _prefix_enclosure(n, length, backend)
        if exact:
            total = sum(
                (row[j] * _exact_value(f.values[j + k]) for j in range(length)),
                Fraction(0),
            )
            return Enclosure.point(total)
        vals = np.array([float(f.values[j + k]) for j in range(length)])
        s = float(np.dot(row, vals))
        err = weights.row_slop(length) * float(np.dot(row, np.abs(vals)))
        return Enclosure(s - err, s + err)
    if isinstance(f, PowerGrowth):
        for size, capped in _adaptive_ladder():
            enc = _apply_truncated(f, n, k, size, backend)
            w = float(enc.width)
            if capped or w <= max(1e-14, 1e-10 * max(float(enc.lower), 1e-300)):
                return enc
    raise TypeError(f"unsupported function kind: {type(f).__name__}")


def _apply_truncated(f: SeqFunction, n: int, k: int, J: int, backend: str) -> Enclosure:
    """Lower = sum over j < J; upper adds the certified remainder bound."""
    if J < 0:
        raise ValueError("truncation must be >= 0")
    if isinstance(f, PowerGrowth):
        J_eff = max(J, 1)
        logs = np.asarray(weights.log_row(n, J_eff))
        j = np.arange(J_eff, dtype=np.float64) + float(k)
        with np.errstate(divide="ignore"):
            terms = np.where(j > 0, np.exp(logs + f.beta * np.log(np.maximum(j, 1e-300))), 0.0)
        s = float(np.sum(terms))
        slop = weights.row_slop(J_eff)
        tail = (
            n * (1.0 + k / J_eff) ** f.beta * weights.power_tail_bound(f.beta, J_eff)
        )
        return Enclosure(max(0.0, s * (1 - slop)), (s + tail) * (1 + slop))

    # bounded kinds: remainder <= sup|f| * (1 - prefix mass of alpha^n)
    if isinstance(f, (IndicatorGE, IndicatorWindow)):
        sup_rem = Fraction(1)
        support_end = f.m if isinstance(f, IndicatorGE) else f.b
        natural = max(0, support_end - k) if isinstance(f, IndicatorWindow) else None
    elif isinstance(f, FiniteTable):
        sup_rem = max(
            (abs(_exact_value(v)) for v in f.values), default=Fraction(0)
        )
        natural = max(0, len(f.values) - k)
    else:
        raise TypeError(f"unsupported function kind: {type(f).__name__}")

    row, exact = _prefix_enclosure(n, J, backend)
    if exact:
        partial = Fraction(0)
        mass = Fraction(0)
        for j in range(J):
            v = _exact_value(f(j + k))
            mass += row[j]
            if v:
                partial += row[j] * v
        if natural is not None and J >= natural:
            if isinstance(f, IndicatorWindow) or isinstance(f, FiniteTable):
                return Enclosure(partial, partial)
        rem = sup_rem * (1 - mass)
        return Enclosure(partial, partial + max(Fraction(0), rem))
    vals = np.array([float(f(j + k)) for j in range(J)])
    s = float(np.dot(row, vals))
    mass = float(np.sum(row))
    slop = weights.row_slop(J)
    err = slop * float(np.dot(row, np.abs(vals)))
    if natural is not None and J >= natural and not isinstance(f, IndicatorGE):
        return Enclosure(s - err, s + err)
    rem = float(sup_rem) * max(0.0, 1.0 - mass * (1 - slop))
    return Enclosure(s - err, s + err + rem)


def cesaro_T(f: SeqFunction, n: int, k: int):
    """M_n(T)(f)(k) = (1/n) sum_{j<n} f(j+k), an exact finite sum."""
    if n < 1:
        raise ValueError("need n >= 1")
    if k < 0:
        raise ValueError("index must be >= 0")
    vals = [f(k + j) for j in range(n)]
    if all(_is_exact(v) for v in vals):
        return Fraction(sum(vals), n)
    return math.fsum(float(v) for v in vals) / n


def cesaro_A(f: SeqFunction, n: int, k: int, J: Optional[int] = None) -> Enclosure:
    """Enclosure of (1/n) sum_{i<n} A^i(f)(k), with A^0 the identity."""
    if n < 1:
        raise ValueError("need n >= 1")
    acc = apply_A_pow(f, 0, k, J=J)
    for i in range(1, n):
        acc = acc + apply_A_pow(f, i, k, J=J)
    return acc.scale(Fraction(1, n))


def barycenter_residual(f: SeqFunction, k: int, J: int):
    """|A(f)(k) truncated at J, via the operator route, minus the direct sum|.

    Both routes are the same finite rational sum, so the residual is exactly
    zero; it is computed and returned for audit rather than asserted.
    """
    if isinstance(f, PowerGrowth):
        raise ValueError("needs a bounded function (indicator or finite table)")
    lhs = apply_A_pow(f, 1, k, J=J, backend="exact").lower
    rhs = sum(
        (weights.alpha_exact(j) * _exact_value(f(j + k)) for j in range(J)),
        Fraction(0),
    )
    return abs(lhs - rhs)


def image_p_norm(
    f: SeqFunction,
    n: int,
    p,
    K: Optional[int] = None,
    J: Optional[int] = None,
) -> Enclosure:
    """Enclosure of ||A^n f||_p.

    For indicators and finite tables the sum over k closes exactly: the image
    is constant (or zero) past the function's support, so only finitely many
    image values are needed plus one exact tail mass.  For PowerGrowth the
    k-tail is bounded through A^n(f)(k) <= C_n k^beta with
    C_n = sum_j alpha^n_j (1+j)^beta.
    """
    p = check_exponent(p)
    if n < 0:
        raise ValueError("need n >= 0")
    if n == 0:
        return p_norm(f, p, K)
    if isinstance(f, (IndicatorGE, IndicatorWindow, FiniteTable)):
        if isinstance(f, IndicatorGE):
            support = f.m
            closing = weights.tail_exact(f.m)  # image is exactly 1 for k >= m
        elif isinstance(f, IndicatorWindow):
            support = f.b
            closing = Fraction(0)
        else:
            support = len(f.values)
            closing = Fraction(0)
        lo_terms, hi_terms = [], []
        for k in range(support):
            enc = apply_A_pow(f, n, k, J=J)
            ak = float(weights.alpha_exact(k))
            a, b = float(enc.lower), float(enc.upper)
            abs_lo = 0.0 if a <= 0.0 <= b else min(abs(a), abs(b))
            abs_hi = max(abs(a), abs(b))
            lo_terms.append(ak * abs_lo**p)
            hi_terms.append(ak * abs_hi**p)
        lo = math.fsum(lo_terms) + float(closing)
        hi = math.fsum(hi_terms) + float(closing)
        slop = 1e-13 * (1 + support)
        return _root_enclosure(lo * (1 - slop), hi * (1 + slop), p)
    if isinstance(f, PowerGrowth):
        if f.beta >= 0.5:
            raise NotSummableError("image diverges pointwise: needs beta < 1/2")
        q = f.beta * p
        if q >= 0.5:
            raise NotInLpError(f"image outside the space: beta*p = {q} >= 1/2")
        K_eff = K or _ADAPTIVE_START
        J_eff = J or _ADAPTIVE_START
        logs_n = np.asarray(weights.log_row(n, J_eff))
        base = np.exp(np.asarray(weights.log_row(1, K_eff)))
        j_idx = np.arange(J_eff, dtype=np.float64)
        tail_coeff = n * weights.power_tail_bound(f.beta, J_eff)
        slop = weights.row_slop(J_eff)
        lo_sum = 0.0
        hi_sum = 0.0
        chunk = 1024
        for start in range(0, K_eff, chunk):
            stop = min(start + chunk, K_eff)
            ks = np.arange(start, stop, dtype=np.float64)
            grid = j_idx[None, :] + ks[:, None]
            with np.errstate(divide="ignore"):
                vals = np.where(
                    grid > 0,
                    np.exp(logs_n[None, :] + f.beta * np.log(np.maximum(grid, 1e-300))),
                    0.0,
                )
            inner = vals.sum(axis=1)
            inner_tail = tail_coeff * (1.0 + ks / J_eff) ** f.beta
            ak = base[start:stop]
            lo_sum += float(np.sum(ak * np.maximum(inner * (1 - slop), 0.0) ** p))
            hi_sum += float(np.sum(ak * ((inner + inner_tail) * (1 + slop)) ** p))
        # k-tail: A^n f(k) <= C_n k^beta for k >= 1 since (j+k)^beta <= ((1+j)k)^beta
        c_n = float(apply_A_pow(f, n, 1, J=J_eff).upper)
        outer_tail = c_n**p * weights.power_tail_bound(q, K_eff)
        slop = weights.row_slop(K_eff)
        return _root_enclosure(
            lo_sum * (1 - slop), (hi_sum + outer_tail) * (1 + slop), p
        )
    raise TypeError(f"unsupported function kind: {type(f).__name__}")


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def contraction_bound_check(
    f: SeqFunction, p, K: Optional[int] = None, J: Optional[int] = None
) -> BoundCheck:
    """Verify ||A f||_p <= 2^(1/p) ||f||_p up to enclosure resolution.

    lhs is the upper end of the image norm; rhs is 2^(1/p) times the lower
    end of ||f||_p; the tolerance absorbs both enclosure widths plus a 1e-9
    relative allowance.
    """
    p = check_exponent(p)
    nf = p_norm(f, p, K)
    img = image_p_norm(f, 1, p, K=K, J=J)
    lhs = float(img.upper)
    rhs = 2.0 ** (1.0 / p) * float(nf.lower)
    tol = 1e-9 * (1 + abs(rhs)) + 2.0 ** (1.0 / p) * float(nf.width) + float(img.width)
    return BoundCheck(lhs, rhs, lhs <= rhs + tol)
