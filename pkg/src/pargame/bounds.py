"""Closed-form parallel repetition bounds and the recurrences behind them.

All quantities here are floats.  Logarithms are base 2.  The constants are
the published ones and are not tuned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ValidationError

C_LOCAL = 6000.0  # denominator in the local-strategy bounds
C_NS = 6400.0  # denominator in the no-signaling bound
STEP_LOCAL = 15.0  # constant in the one-step conditioning inequality
STEP_NS = 10.0
SOUNDNESS_SLACK = 1e-12

THEOREMS = ("local", "cover", "ns")


def _check_v(v) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValidationError(f"value {v} outside [0, 1]")
    return v


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ValidationError(f"number of repetitions must be a positive integer, got {n}")
    return int(n)


def bound_local(v, n, ab_product_size) -> float:
    """``(1 - (1 - v)^3 / 6000) ** (n / log |A||B|)``."""
    v, n = _check_v(v), _check_n(n)
    if ab_product_size < 2:
        raise ValidationError("|A||B| must be at least 2 for the logarithmic exponent to be defined")
    return (1.0 - (1.0 - v) ** 3 / C_LOCAL) ** (n / math.log2(ab_product_size))


def bound_cover(v, n, alpha) -> float:
    """Bound in terms of the size ``alpha`` of a fractional product cover.

    ``alpha > 1`` uses the same shape as :func:`bound_local` with ``log alpha``;
    ``alpha = 1`` gives ``(1 - (1 - v)^2 / 6000) ** n``.
    """
    v, n = _check_v(v), _check_n(n)
    if alpha < 1:
        raise ValidationError("cover size must be at least 1")
    if alpha == 1:
        return (1.0 - (1.0 - v) ** 2 / C_LOCAL) ** n
    return (1.0 - (1.0 - v) ** 3 / C_LOCAL) ** (n / math.log2(alpha))


def bound_ns(v_ns, n) -> float:
    """``(1 - (1 - v_ns)^2 / 6400) ** n``."""
    v, n = _check_v(v_ns), _check_n(n)
    return (1.0 - (1.0 - v) ** 2 / C_NS) ** n


@dataclass(frozen=True)
class BoundQuery:
    v: Fraction | float
    n: int
    log_s: float = 0.0  # log2 |A||B| (local) or log2 alpha (cover)
    theorem: str = "local"
    constant: float | None = None

    def __post_init__(self):
        _check_v(self.v)
        _check_n(self.n)
        if self.log_s < 0:
            raise ValidationError("log_s must be nonnegative")
        if self.theorem not in THEOREMS:
            raise ValidationError(f"theorem must be one of {THEOREMS}")
        if self.constant is None:
            object.__setattr__(self, "constant", STEP_NS if self.theorem == "ns" else STEP_LOCAL)


@dataclass(frozen=True)
class RecurrenceTrace:
    p: tuple  # p_0 .. p_n
    m_star: int
    bound: float
    log_p: tuple = field(default=(), repr=False)  # log2(1/p_m), exact even when p_m underflows

    def as_json(self) -> list:
        return [{"m": m, "p_m": pm} for m, pm in enumerate(self.p)]


def _factor(q: BoundQuery, m: int, log_inv_p: float) -> float:
    v = float(q.v)
    n = q.n
    if q.theorem == "ns" or (q.theorem == "cover" and q.log_s == 0):
        inner = log_inv_p
    else:
        inner = m * q.log_s + log_inv_p
    return v + q.constant * math.sqrt(inner / (n - m))


def recurrence_bound(q: BoundQuery) -> RecurrenceTrace:
    """Iterate ``p_{m+1} = p_m * min(1, factor_m)`` from ``p_0 = 1``.

    The factor is ``v + c sqrt((m log_s + log 1/p_m) / (n - m))`` for the
    local form (and the cover form with ``log_s = log alpha > 0``) and
    ``v + c sqrt(log(1/p_m) / (n - m))`` for the no-signaling form and the
    cover form with ``alpha = 1``.  Every ``p_m`` bounds the probability of
    winning all rounds, so the smallest one with ``m < n`` is returned (the
    trace still carries ``p_n``).  With ``v = 0`` the sequence hits 0.
    """
    if q.n < 2:
        raise ValidationError("the recurrence needs n >= 2")
    logs = [0.0]
    for m in range(q.n):
        f = min(1.0, _factor(q, m, logs[-1]))
        logs.append(logs[-1] - (math.log2(f) if f > 0 else -math.inf))
    p = tuple(2.0 ** -L for L in logs)
    m_star = max(range(q.n), key=lambda m: (logs[m], -m))
    return RecurrenceTrace(p, m_star, p[m_star], tuple(logs))


@dataclass(frozen=True)
class ComparisonSequence:
    m_prime: int
    product: float
    approximation: float  # (1 - (1 - v)^3 / 2) ** (3 n / (4 ell))
    integral_form: float  # exp((4v - 1 + 2 v^2 ln v - 3 v^2) n / (2 ell))
    log2_product: float
    log2_approximation: float


def comparison_sequence(v, n, ell) -> ComparisonSequence:
    """The comparison sequence ``p'_{m+1} = p'_m (v + sqrt(m ell / n))`` at ``m' = ceil(n (1 - v)^2 / ell)``."""
    v = _check_v(v)
    n = _check_n(n)
    if ell <= 0:
        raise ValidationError("ell must be positive")
    m_prime = math.ceil(n * (1.0 - v) ** 2 / ell)
    log_prod = 0.0
    for i in range(m_prime):
        term = v + math.sqrt(i * ell / n)
        log_prod += math.log2(term) if term > 0 else -math.inf
    approx_log = (3.0 * n / (4.0 * ell)) * math.log2(1.0 - (1.0 - v) ** 3 / 2.0)
    vlogv = v * v * math.log(v) if v > 0 else 0.0
    integral = math.exp((4 * v - 1 + 2 * vlogv - 3 * v * v) * n / (2 * ell))
    return ComparisonSequence(m_prime, 2.0 ** log_prod, 2.0 ** approx_log, integral, log_prod, approx_log)


def base_change_sides(v) -> tuple:
    """Natural logs of ``(1 - (1 - v)/2) ** ((1 - v)^2 / 3000)`` and ``1 - (1 - v)^3 / 6000``."""
    v = _check_v(v)
    a = (1.0 - v) ** 2 / 3000.0
    b = (1.0 - v) / 2.0
    return a * math.log1p(-b), math.log1p(-(1.0 - v) ** 3 / C_LOCAL)


def base_change_holds(v) -> bool:
    """Whether ``(1 - (1 - v)/2) ** ((1 - v)^2 / 3000) <= 1 - (1 - v)^3 / 6000``, up to a few ulps."""
    lhs, rhs = base_change_sides(v)
    return lhs <= rhs + 4 * math.ulp(rhs)


def theorem_bound(theorem: str, v, n, ab_product_size: int | None = None, alpha: int | None = None) -> float:
    if theorem == "local":
        if ab_product_size is None:
            raise ValidationError("the local bound needs |A||B|")
        return bound_local(v, n, ab_product_size)
    if theorem == "cover":
        if alpha is None:
            raise ValidationError("the cover bound needs alpha")
        return bound_cover(v, n, alpha)
    if theorem == "ns":
        return bound_ns(v, n)
    raise ValidationError(f"theorem must be one of {THEOREMS}")
