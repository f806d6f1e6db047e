"""Compensated summation of positive series with certified truncation.

The evaluator sums terms in increasing index order (error-free ``math.fsum``
per fixed-size chunk, then an error-free combine of the chunk sums) and
stops once an analytic bound on the neglected tail is small enough, the
term budget is hit, or a heuristic stagnation rule fires.

Tail bounds come in a handful of integrable shapes.  Each shape provides a
sound upper bound on the neglected tail; shapes marked exact (the bound
coincides with the terms) also provide a lower bound, which lets the
evaluator centre the reported value inside the bracket.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import gammaincc

__all__ = [
    "SumStatus",
    "SumEvaluation",
    "PowerIntegralTail",
    "AffinePowerTail",
    "StretchedIntegralTail",
    "GeomSeriesTail",
    "PolyLogTail",
    "RatioTail",
    "Divergence",
    "TailBound",
    "Plan",
    "certified_sum",
    "CHUNK",
]

CHUNK = 1024
_SLACK = 1 + 1e-9  # inflation applied to analytic bounds against fp rounding


class SumStatus(enum.Enum):
    CERTIFIED = "Certified"
    HEURISTIC = "Heuristic"
    DIVERGENT = "DivergenceCertified"


@dataclass(frozen=True)
class SumEvaluation:
    """Value of one criterion sum plus its truncation evidence.

    ``converged`` is False only when the term budget ran out before any stop
    rule fired; such values are partial sums with no quality claim.
    """

    value: float
    terms_used: int
    remainder_bound: float | None
    status: SumStatus
    note: str = ""
    converged: bool = True

    @property
    def certified(self) -> bool:
        return self.status is SumStatus.CERTIFIED

    @property
    def divergent(self) -> bool:
        return self.status is SumStatus.DIVERGENT

    def upper(self) -> float:
        """A sound upper bound on the true sum (inf when not certified)."""
        if self.status is SumStatus.DIVERGENT:
            return math.inf
        if self.remainder_bound is None:
            return math.inf
        return self.value + self.remainder_bound

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "terms_used": self.terms_used,
            "remainder_bound": self.remainder_bound,
            "status": self.status.value,
            "note": self.note,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# Tail bound shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerIntegralTail:
    """Terms bounded by C * j**-p with p > 1 for j >= from_j."""

    coeff: float
    p: float
    from_j: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError("power tail needs p > 1")

    def _integral(self, a: float) -> float:
        return self.coeff * a ** (1.0 - self.p) / (self.p - 1.0)

    def upper_tail(self, J: int) -> float:
        return self._integral(J) * _SLACK

    def lower_tail(self, J: int) -> float:
        if not self.exact:
            return 0.0
        return self._integral(J + 1) / _SLACK


@dataclass(frozen=True)
class AffinePowerTail:
    """Terms bounded by C * (alpha + beta*j)**-T, T > 1, beta > 0."""

    coeff: float
    alpha: float
    beta: float
    T: float
    from_j: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.T <= 1 or self.beta <= 0:
            raise ValueError("affine power tail needs T > 1 and beta > 0")
        if self.alpha + self.beta * self.from_j <= 0:
            raise ValueError("affine base must be positive from from_j on")

    def _integral(self, a: float) -> float:
        base = self.alpha + self.beta * a
        return self.coeff * base ** (1.0 - self.T) / (self.beta * (self.T - 1.0))

    def upper_tail(self, J: int) -> float:
        return self._integral(J) * _SLACK

    def lower_tail(self, J: int) -> float:
        if not self.exact:
            return 0.0
        return self._integral(J + 1) / _SLACK


@dataclass(frozen=True)
class StretchedIntegralTail:
    """Terms bounded by C * exp(-B * j**gamma) for j >= from_j."""

    coeff: float
    B: float
    gamma: float
    from_j: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.B <= 0 or self.gamma <= 0:
            raise ValueError("stretched tail needs B, gamma > 0")

    def _integral(self, a: float) -> float:
        # int_a^inf C exp(-B x^g) dx = C Gamma(1/g) Q(1/g, B a^g) / (g B^(1/g))
        s = 1.0 / self.gamma
        x = self.B * a**self.gamma
        try:
            q = float(gammaincc(s, x))
        except Exception:
            q = 0.0
        if q > 0.0:
            try:
                return self.coeff * math.exp(math.lgamma(s) + math.log(q)) / (
                    self.gamma * self.B**s
                )
            except (OverflowError, ValueError):
                pass
        # Deep tail: Q underflowed.  Use Gamma(s, x) <= 2 x^(s-1) e^-x,
        # valid for x >= 2 max(1, s - 1).
        if x >= 2.0 * max(1.0, s - 1.0):
            log_val = (
                math.log(self.coeff)
                + (s - 1.0) * math.log(x)
                - x
                + math.log(2.0)
                - math.log(self.gamma)
                - s * math.log(self.B)
            )
            if log_val < math.log(5e-324):
                return 0.0
            return math.exp(log_val)
        # No usable bound at this index yet; report +inf so the evaluator
        # keeps summing.
        return math.inf

    def upper_tail(self, J: int) -> float:
        return self._integral(J) * _SLACK

    def lower_tail(self, J: int) -> float:
        if not self.exact:
            return 0.0
        val = self._integral(J + 1)
        return 0.0 if not math.isfinite(val) else val / _SLACK


@dataclass(frozen=True)
class GeomSeriesTail:
    """Terms bounded by C * q**j; the geometric tail sums in closed form."""

    coeff: float
    q: float
    from_j: int = 1
    exact: bool = False

    def __post_init__(self):
        if not (0 < self.q < 1):
            raise ValueError("geometric tail needs q in (0, 1)")

    def _series(self, J: int) -> float:
        try:
            return self.coeff * self.q ** (J + 1) / (1.0 - self.q)
        except OverflowError:
            return math.inf

    def upper_tail(self, J: int) -> float:
        return self._series(J) * _SLACK

    def lower_tail(self, J: int) -> float:
        if not self.exact:
            return 0.0
        return self._series(J) / _SLACK


@dataclass(frozen=True)
class PolyLogTail:
    """Terms bounded by g(j) = exp(-c (K + beta ln j)**s) with s > 1.

    from_j must be large enough that the exponent grows with slope >= 2 in
    u = ln j, i.e. c s beta (K + beta u)**(s-1) >= 2; then the tail past J is
    at most J * g(J).
    """

    c: float
    K: float
    beta: float
    s: float
    from_j: int = 1
    exact: bool = False

    def _g(self, x: float) -> float:
        base = self.K + self.beta * math.log(x)
        try:
            return math.exp(-self.c * base**self.s)
        except OverflowError:
            return 0.0

    def upper_tail(self, J: int) -> float:
        return J * self._g(J) * _SLACK

    def lower_tail(self, J: int) -> float:
        return 0.0


@dataclass(frozen=True)
class RatioTail:
    """Terms bounded by g with g(j+1)/g(j) nonincreasing for j >= from_j.

    Suits doubly-exponential decay where no named integral applies: the tail
    past J is dominated by the geometric series with the first ratio.
    """

    g: Callable[[float], float]
    from_j: int = 1
    exact: bool = False

    def upper_tail(self, J: int) -> float:
        g1 = self.g(J + 1)
        g2 = self.g(J + 2)
        if g1 <= 0.0:
            return 0.0
        ratio = g2 / g1
        if ratio >= 1.0:
            return math.inf
        return g1 / (1.0 - ratio) * _SLACK

    def lower_tail(self, J: int) -> float:
        return 0.0


TailBound = Union[
    PowerIntegralTail,
    AffinePowerTail,
    StretchedIntegralTail,
    GeomSeriesTail,
    PolyLogTail,
    RatioTail,
]


@dataclass(frozen=True)
class Divergence:
    """A certificate that the series diverges.

    reason is 'term-limit' (terms stay above ``floor`` from j0 on) or
    'harmonic' (terms dominate coeff/j from j0 on).
    """

    reason: str
    j0: int
    floor: float
    note: str = ""


Plan = Union[TailBound, Divergence, None]


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


def _combine(chunk_sums: list[float]) -> float:
    return math.fsum(chunk_sums)


def certified_sum(
    terms: Callable[[int, int], np.ndarray],
    start: int,
    plan: Plan,
    *,
    tol: float = 1e-10,
    max_terms: int = 2_000_000,
    min_terms: int = 0,
    hard_end: int | None = None,
    prefactor: float = 1.0,
    note: str = "",
) -> SumEvaluation:
    """Sum ``terms(j0, j1)`` (an array for j in [j0, j1)) from ``start``.

    ``hard_end`` marks a finite spectrum: the series truly ends there and the
    result is exact.  ``prefactor`` scales the final value and remainder.
    ``min_terms`` forces at least that many terms before a certified stop,
    which the certification-soundness tests use to extend evaluations.
    """
    if isinstance(plan, Divergence):
        if plan.reason == "harmonic":
            msg = f"divergent (harmonic: terms >= {plan.floor:.3g}/j from j={plan.j0})"
        else:
            msg = f"divergent (term-limit: terms >= {plan.floor:.3g} from j={plan.j0})"
        return SumEvaluation(math.inf, 0, None, SumStatus.DIVERGENT, note or msg)

    max_terms = max(max_terms, min_terms)
    chunk_sums: list[float] = []
    count = 0
    j = start
    tail: TailBound | None = plan
    if tail is not None and hard_end is None and tail.from_j - start + 1 > max_terms:
        tail = None  # bound validity starts beyond the budget
        note = note or "tail bound valid only beyond term budget"

    while True:
        if hard_end is not None and j > hard_end:
            value = prefactor * _combine(chunk_sums)
            return SumEvaluation(value, count, 0.0, SumStatus.CERTIFIED, note or "finite spectrum")
        j1 = j + CHUNK
        if hard_end is not None:
            j1 = min(j1, hard_end + 1)
        if count + (j1 - j) > max_terms:
            j1 = j + (max_terms - count)
        block_max = math.inf
        if j1 > j:
            block = terms(j, j1)
            chunk_sums.append(math.fsum(block.tolist()))
            block_max = float(np.max(np.abs(block))) if block.size else 0.0
            count += j1 - j
            j = j1
        partial = _combine(chunk_sums)
        J = j - 1  # last index summed

        if tail is not None and J >= tail.from_j and count >= min_terms:
            up = tail.upper_tail(J)
            lo = tail.lower_tail(J)
            if math.isfinite(up):
                width = up - lo
                mid = partial + 0.5 * (up + lo)
                scale = max(abs(mid), 1e-300)
                if width <= tol * scale or count >= max_terms:
                    value = prefactor * mid
                    remainder = prefactor * max(width, 0.0) * _SLACK
                    return SumEvaluation(value, count, remainder, SumStatus.CERTIFIED, note)
        if tail is None and hard_end is None and count >= min_terms:
            # Heuristic stop: one full chunk (>= 64 consecutive terms) whose
            # every term is below tol * current value.
            if block_max < tol * max(partial, 1e-300):
                return SumEvaluation(prefactor * partial, count, None, SumStatus.HEURISTIC, note)
        if count >= max_terms:
            return SumEvaluation(
                prefactor * partial,
                count,
                None,
                SumStatus.HEURISTIC,
                note or "term budget exhausted before any stop rule",
                converged=False,
            )
