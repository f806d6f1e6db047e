"""Criterion sums and statistics whose boundedness characterises tractability.

For a fixed dimension d and normalized eigenvalues rho(j) = lambda(d, j) / CRI_d
the module evaluates

=========  ==================================================================
spt-alg    sum_{j>=start} rho(j)**tau
spt-exp    sum_{j>=start} rho(j)**(j**-tau)
pt-alg     d**-tau1 * sum_{j>=ceil(C d**tau3)} rho(j)**tau2
pt-exp     same start/prefactor with rho(j)**(j**-tau2) terms
qpt-alg    d**-2 * (sum_{j>=start} rho(j)**(tau2 (1+ln d)))**(1/tau2)
qpt-exp    d**-tau * sum_j [1 + (1/2) ln max(1, 1/rho(j))]**(-tau (1+ln d))
wt-alg     exp(-c d**t) * sum_j exp(-c (1/rho(j))**(s/2))
wt-exp     exp(-c d**t) * sum_j exp(-c [1 + ln(2 max(1, 1/rho(j)))]**s)
uwt        inf over d <= floor((ln n)**k) of the rho(d, n) decay statistics
=========  ==================================================================

Where the model carries a tail envelope the summation is truncated with a
certified remainder; exact (two-sided) envelopes additionally support
divergence certificates: a term-limit test (terms bounded away from zero
beyond a computable index) and a harmonic comparison (terms >= A/j).
Everything else degrades to an honest heuristic evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .eigenmodel import (
    EigenModel,
    ErrorCriterion,
    GeometricTail,
    PowerLawTail,
    StretchedExpTail,
    TailEnvelope,
    log_ratio,
    log_ratios,
    ratio_envelope,
    support,
)
from .errors import BeyondRankError
from .summation import (
    AffinePowerTail,
    Divergence,
    GeomSeriesTail,
    Plan,
    PolyLogTail,
    PowerIntegralTail,
    RatioTail,
    StretchedIntegralTail,
    SumEvaluation,
    SumStatus,
    certified_sum,
)

__all__ = [
    "CriterionParams",
    "SupEvaluation",
    "SUM_KINDS",
    "sum_spt_alg",
    "sum_spt_exp",
    "sum_pt_alg",
    "sum_pt_exp",
    "sum_qpt_alg",
    "sum_qpt_exp",
    "sum_wt_alg",
    "sum_wt_exp",
    "uwt_statistic",
    "sup_over_d",
    "evaluate_sum",
    "convergence_plan",
    "ceil_stable",
]

_DEFAULT_TOL = 1e-10
_DEFAULT_MAX_TERMS = 2_000_000


@dataclass(frozen=True)
class CriterionParams:
    """Parameter bundle for the criterion sums; unused fields stay None."""

    tau: float | None = None
    tau1: float | None = None
    tau2: float | None = None
    tau3: float | None = None
    c_tilde: float | None = None
    c: float | None = None
    s: float | None = None
    t: float | None = None
    k: int | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def ceil_stable(x: float) -> int:
    """Ceiling that snaps values within one ulp of an integer first."""
    nearest = round(x)
    if abs(x - nearest) <= math.ulp(max(abs(x), 1.0)):
        return int(nearest)
    return int(math.ceil(x))


# ---------------------------------------------------------------------------
# Tail planning: map a ratio envelope to a certified tail bound or a
# divergence certificate for each term shape.
# ---------------------------------------------------------------------------


# The divergence searches run over u = ln j: certified onset indices can sit
# far beyond the float range (they are never summed, only recorded).


def _log_doubling_search(f: Callable[[float], float], u_start: float, target: float) -> float | None:
    """Smallest probed u >= u_start with f(u) <= target, doubling upward.

    Caller guarantees f is nonincreasing on [u_start, inf), so the found
    point certifies f(u) <= target everywhere beyond it.
    """
    u = max(1.0, u_start)
    for _ in range(200):
        if f(u) <= target:
            return u
        u *= 2.0
    return None


def _log_increasing_from(f: Callable[[float], float], u_start: float) -> float | None:
    """Smallest probed u >= u_start with f(u) >= 0 (f nondecreasing there)."""
    u = max(1.0, u_start)
    for _ in range(200):
        if f(u) >= 0.0:
            return u
        u *= 2.0
    return None


def _index_at_least(u: float, floor: int = 1) -> int:
    """Smallest power of two at or above e**u, as an exact integer."""
    return max(floor, 1 << max(0, int(math.ceil(u / math.log(2.0)))))


def _pow_or_none(base: float, exponent: float) -> float | None:
    try:
        v = math.pow(base, exponent)
    except (OverflowError, ValueError):
        return None
    return v if math.isfinite(v) else None


def _plan_power(env: TailEnvelope | None, p: float, start: int) -> Plan:
    """Plan for terms rho(j)**p."""
    if env is None:
        return None
    j0 = max(start, env.valid_from)
    form = env.form
    if isinstance(form, PowerLawTail):
        coeff = _pow_or_none(form.scale, p)
        if coeff is None:
            return None
        if form.beta * p > 1.0:
            return PowerIntegralTail(coeff, form.beta * p, from_j=j0, exact=env.exact)
        if env.exact:
            return Divergence("harmonic", j0, coeff)
        return None
    if isinstance(form, GeometricTail):
        coeff = _pow_or_none(form.scale, p)
        q = _pow_or_none(form.ratio, p)
        if coeff is None or q is None or q >= 1:
            return None
        exact = env.exact
        if q <= 0.0:  # underflowed ratio: widen to a still-sound bound
            q, exact = 1e-308, False
        return GeomSeriesTail(coeff, q, from_j=j0, exact=exact)
    coeff = _pow_or_none(form.scale, p)
    if coeff is None:
        return None
    return StretchedIntegralTail(coeff, p * form.rate, form.power, from_j=j0, exact=env.exact)


def _plan_coupled(env: TailEnvelope | None, tau: float, start: int) -> Plan:
    """Plan for terms rho(j)**(j**-tau)."""
    if env is None:
        return None
    j0 = max(start, env.valid_from)
    form = env.form
    log_a = math.log(form.scale)

    if isinstance(form, (GeometricTail, StretchedExpTail)):
        if isinstance(form, GeometricTail):
            rate, power = -math.log(form.ratio), 1.0
        else:
            rate, power = form.rate, form.power
        if tau < power:
            coeff = max(1.0, form.scale)
            return StretchedIntegralTail(coeff, rate, power - tau, from_j=j0, exact=False)
        if env.exact:
            # -ln(term) = rate*j**(power-tau) + max(0,-ln a)*j**-tau is
            # nonincreasing for tau >= power; its limit is rate at tau=power,
            # 0 above.
            limit = rate if tau == power else 0.0

            def hub(u: float) -> float:
                return rate * math.exp((power - tau) * u) + max(0.0, -log_a) * math.exp(-tau * u)

            found = _log_doubling_search(hub, math.log(j0), limit + math.log(2.0))
            if found is not None:
                return Divergence("term-limit", _index_at_least(found, j0), 0.5 * math.exp(-limit))
        return None

    # Power-law envelope: upper bounds cannot certify convergence here; the
    # exact case has terms exp(-j**-tau (beta ln j - ln a)) -> 1.
    if env.exact:
        beta = form.beta

        def hub(u: float) -> float:
            return (beta * u + max(0.0, -log_a)) * math.exp(-tau * u)

        # hub is decreasing once u > 1/tau (the ln a correction only adds a
        # decreasing nonnegative part).
        found = _log_doubling_search(hub, max(math.log(j0), 1.0 / tau), math.log(2.0))
        if found is not None:
            return Divergence("term-limit", _index_at_least(found, j0), 0.5)
    return None


def _plan_qpt_exp(env: TailEnvelope | None, T: float, start: int) -> Plan:
    """Plan for terms [1 + 0.5 ln max(1, 1/rho)]**-T."""
    if env is None:
        return None
    form = env.form
    log_a = math.log(form.scale)

    if isinstance(form, (GeometricTail, StretchedExpTail)):
        if isinstance(form, GeometricTail):
            kappa, power = -math.log(form.ratio), 1.0
        else:
            kappa, power = form.rate, form.power
        # Past j2 the envelope is <= 1, so the max() clamp is inactive.
        j2 = 1 if log_a <= 0 else int(math.ceil((log_a / kappa) ** (1.0 / power))) + 1
        j0 = max(start, env.valid_from, j2)
        if power == 1.0:
            alpha, beta = 1.0 - 0.5 * log_a, 0.5 * kappa
            if T > 1.0:
                return AffinePowerTail(1.0, alpha, beta, T, from_j=j0, exact=env.exact)
            if env.exact:
                j_h = max(j0, int(math.ceil(alpha / beta)) + 1)
                floor = _pow_or_none(2.0 * beta, -T)
                if floor is not None:
                    return Divergence("harmonic", j_h, floor)
            return None
        # base >= (kappa/4) j**power once the constant part stops mattering.
        need = max(0.0, (0.5 * log_a - 1.0) / (0.25 * kappa))
        j3 = max(j0, int(math.ceil(need ** (1.0 / power))) + 1 if need > 0 else j0)
        if power * T > 1.0:
            coeff = _pow_or_none(0.25 * kappa, -T)
            if coeff is None:
                return None
            return PowerIntegralTail(coeff, power * T, from_j=j3, exact=False)
        if env.exact:
            # base <= kappa j**power once 1 + 0.5 max(0, -ln a) <= 0.5 kappa j**power.
            need = (2.0 + max(0.0, -log_a)) / kappa
            j4 = max(j0, int(math.ceil(need ** (1.0 / power))) + 1)
            floor = _pow_or_none(kappa, -T)
            if floor is not None:
                return Divergence("harmonic", j4, floor)
        return None

    # Power-law envelope: polylog terms, divergent for every T.
    if env.exact:
        beta = form.beta
        j2 = max(start, env.valid_from, int(math.ceil(form.scale ** (1.0 / beta))) + 1)

        def phi(u: float) -> float:
            return u - T * math.log(1.0 + 0.5 * (beta * u - log_a))

        # phi is increasing once the base exceeds T beta / 2.
        u3 = (2.0 * max(0.5 * T * beta - 1.0, 0.0) + log_a) / beta
        found = _log_increasing_from(phi, max(u3, math.log(j2)))
        if found is not None:
            return Divergence("harmonic", _index_at_least(found, j2), 1.0)
    return None


def _plan_wt_alg(env: TailEnvelope | None, c: float, s: float, start: int) -> Plan:
    """Plan for terms exp(-c (1/rho)**(s/2)); always convergent under an envelope."""
    if env is None:
        return None
    j0 = max(start, env.valid_from)
    form = env.form
    half_s = 0.5 * s
    scale_pow = _pow_or_none(form.scale, -half_s)
    if scale_pow is None:
        return None
    if isinstance(form, PowerLawTail):
        return StretchedIntegralTail(
            1.0, c * scale_pow, form.beta * half_s, from_j=j0, exact=env.exact
        )
    if isinstance(form, GeometricTail):
        big_q = form.ratio**-half_s

        def g(x: float) -> float:
            try:
                return math.exp(-c * scale_pow * big_q**x)
            except OverflowError:
                return 0.0

        return RatioTail(g, from_j=j0, exact=False)
    # Stretched envelope: doubly exponential terms; ratios decrease once
    # exp(B2 x**gamma) is convex.
    b2 = half_s * form.rate
    j1 = j0
    if form.power < 1.0:
        j1 = max(j0, int(math.ceil(((1.0 - form.power) / (b2 * form.power)) ** (1.0 / form.power))) + 1)

    def g2(x: float) -> float:
        try:
            return math.exp(-c * scale_pow * math.exp(b2 * x**form.power))
        except OverflowError:
            return 0.0

    return RatioTail(g2, from_j=j1, exact=False)


def _plan_wt_exp(env: TailEnvelope | None, c: float, s: float, start: int) -> Plan:
    """Plan for terms exp(-c [1 + ln(2 max(1, 1/rho))]**s)."""
    if env is None:
        return None
    form = env.form
    log_a = math.log(form.scale)
    konst = 1.0 + math.log(2.0) - log_a

    if isinstance(form, PowerLawTail):
        beta = form.beta
        j2 = max(start, env.valid_from, int(math.ceil(form.scale ** (1.0 / beta))) + 1)
        if s == 1.0:
            coeff = math.exp(-c * konst)
            if c * beta > 1.0:
                return PowerIntegralTail(coeff, c * beta, from_j=j2, exact=env.exact)
            if env.exact:
                return Divergence("harmonic", j2, coeff)
            return None
        if s > 1.0:
            # Valid once the exponent c (K + beta u)**s grows with slope >= 2
            # in u = ln j; then the tail past J is at most J * g(J).
            u_min = ((2.0 / (c * s * beta)) ** (1.0 / (s - 1.0)) - konst) / beta
            u_min = max(u_min, 0.0)
            if u_min > 600.0:
                return None  # bound valid only beyond any summable index
            j_star = max(j2, int(math.ceil(math.exp(u_min))) + 1)
            return PolyLogTail(c, konst, beta, s, from_j=j_star, exact=env.exact)
        # s < 1: divergent whenever the envelope is exact.
        if env.exact:
            u3 = ((c * s * beta) ** (1.0 / (1.0 - s)) - konst) / beta
            found = _log_increasing_from(
                lambda u: u - c * (konst + beta * u) ** s, max(u3, math.log(j2))
            )
            if found is not None:
                return Divergence("harmonic", _index_at_least(found, j2), 1.0)
        return None

    if isinstance(form, GeometricTail):
        kappa, power = -math.log(form.ratio), 1.0
    else:
        kappa, power = form.rate, form.power
    j2 = 1 if log_a <= 0 else int(math.ceil((log_a / kappa) ** (1.0 / power))) + 1
    j0 = max(start, env.valid_from, j2)
    if power == 1.0 and s == 1.0:
        coeff = math.exp(-c * konst)
        q = math.exp(-c * kappa)
        return GeomSeriesTail(coeff, q, from_j=j0, exact=env.exact)
    factor = 1.0 if konst >= 0.0 else 0.5
    if konst < 0.0:
        need = (2.0 * abs(konst) / kappa) ** (1.0 / power)
        j0 = max(j0, int(math.ceil(need)) + 1)
    B = c * (factor * kappa) ** s
    return StretchedIntegralTail(1.0, B, power * s, from_j=j0, exact=False)


# ---------------------------------------------------------------------------
# Term functions
# ---------------------------------------------------------------------------


# Terms are computed from L(j) = ln(lambda/CRI): closed forms stay exact in
# log space where the linear values would saturate at the underflow clamp.


def _power_terms(model: EigenModel, d: int, criterion: ErrorCriterion, p: float):
    def block(j0: int, j1: int) -> np.ndarray:
        L = log_ratios(model, d, np.arange(j0, j1, dtype=np.int64), criterion)
        with np.errstate(under="ignore"):
            return np.exp(p * L)

    return block


def _coupled_terms(model: EigenModel, d: int, criterion: ErrorCriterion, tau: float):
    def block(j0: int, j1: int) -> np.ndarray:
        j = np.arange(j0, j1, dtype=np.int64)
        L = log_ratios(model, d, j, criterion)
        with np.errstate(under="ignore"):
            return np.exp(j.astype(float) ** -tau * L)

    return block


def _qpt_exp_terms(model: EigenModel, d: int, criterion: ErrorCriterion, T: float):
    def block(j0: int, j1: int) -> np.ndarray:
        L = log_ratios(model, d, np.arange(j0, j1, dtype=np.int64), criterion)
        with np.errstate(under="ignore", over="ignore"):
            base = 1.0 + 0.5 * np.maximum(0.0, -L)
            return base**-T

    return block


def _wt_alg_terms(model: EigenModel, d: int, criterion: ErrorCriterion, c: float, s: float):
    def block(j0: int, j1: int) -> np.ndarray:
        L = log_ratios(model, d, np.arange(j0, j1, dtype=np.int64), criterion)
        with np.errstate(under="ignore", over="ignore"):
            return np.exp(-c * np.exp(-0.5 * s * L))

    return block


def _wt_exp_terms(model: EigenModel, d: int, criterion: ErrorCriterion, c: float, s: float):
    def block(j0: int, j1: int) -> np.ndarray:
        L = log_ratios(model, d, np.arange(j0, j1, dtype=np.int64), criterion)
        with np.errstate(under="ignore", over="ignore"):
            base = 1.0 + math.log(2.0) + np.maximum(0.0, -L)
            return np.exp(-c * base**s)

    return block


# ---------------------------------------------------------------------------
# The sums
# ---------------------------------------------------------------------------


def _start_index(criterion: ErrorCriterion, c_tilde: float, d: int, tau3: float) -> int:
    if criterion is ErrorCriterion.NOR:
        return 1
    return max(1, ceil_stable(c_tilde * float(d) ** tau3))


def sum_spt_alg(
    model: EigenModel,
    d: int,
    tau: float,
    c_tilde_index: int = 1,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """sum of rho**tau from the given start index (start forced to 1 for NOR)."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    start = 1 if criterion is ErrorCriterion.NOR else max(1, int(c_tilde_index))
    env = ratio_envelope(model, d, criterion, start)
    plan = _plan_power(env, tau, start)
    return certified_sum(
        _power_terms(model, d, criterion, tau),
        start,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
    )


def sum_spt_exp(
    model: EigenModel,
    d: int,
    tau: float,
    c_tilde_index: int = 1,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """sum of rho**(j**-tau); terms couple the value with its index."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    start = 1 if criterion is ErrorCriterion.NOR else max(1, int(c_tilde_index))
    env = ratio_envelope(model, d, criterion, start)
    plan = _plan_coupled(env, tau, start)
    return certified_sum(
        _coupled_terms(model, d, criterion, tau),
        start,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
    )


def sum_pt_alg(
    model: EigenModel,
    d: int,
    tau1: float,
    tau2: float,
    tau3: float,
    c_tilde: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """d**-tau1 times the rho**tau2 tail from ceil(C d**tau3) (NOR: from 1)."""
    if tau1 < 0 or tau3 < 0 or not tau2 > 0 or not c_tilde > 0:
        raise ValueError("need tau1, tau3 >= 0 and tau2, c_tilde > 0")
    start = _start_index(criterion, c_tilde, d, tau3)
    env = ratio_envelope(model, d, criterion, start)
    plan = _plan_power(env, tau2, start)
    return certified_sum(
        _power_terms(model, d, criterion, tau2),
        start,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
        prefactor=float(d) ** -tau1,
    )


def sum_pt_exp(
    model: EigenModel,
    d: int,
    tau1: float,
    tau2: float,
    tau3: float,
    c_tilde: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    if tau1 < 0 or tau3 < 0 or not tau2 > 0 or not c_tilde > 0:
        raise ValueError("need tau1, tau3 >= 0 and tau2, c_tilde > 0")
    start = _start_index(criterion, c_tilde, d, tau3)
    env = ratio_envelope(model, d, criterion, start)
    plan = _plan_coupled(env, tau2, start)
    return certified_sum(
        _coupled_terms(model, d, criterion, tau2),
        start,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
        prefactor=float(d) ** -tau1,
    )


def sum_qpt_alg(
    model: EigenModel,
    d: int,
    tau1: float,
    tau2: float,
    c_tilde: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """d**-2 (sum rho**(tau2 (1+ln d)))**(1/tau2); ABS starts at ceil(C d**tau1)."""
    if tau1 < 0 or not tau2 > 0 or not c_tilde > 0:
        raise ValueError("need tau1 >= 0 and tau2, c_tilde > 0")
    start = _start_index(criterion, c_tilde, d, tau1)
    exponent = tau2 * (1.0 + math.log(d))
    env = ratio_envelope(model, d, criterion, start)
    plan = _plan_power(env, exponent, start)
    inner = certified_sum(
        _power_terms(model, d, criterion, exponent),
        start,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
    )
    pref = float(d) ** -2.0
    if inner.divergent:
        return SumEvaluation(math.inf, inner.terms_used, None, SumStatus.DIVERGENT, inner.note)
    try:
        if inner.remainder_bound is None:
            value = pref * inner.value ** (1.0 / tau2)
            if not math.isfinite(value):
                raise OverflowError
            return SumEvaluation(value, inner.terms_used, None, inner.status, inner.note)
        hi = pref * (inner.value + inner.remainder_bound) ** (1.0 / tau2)
        lo = pref * max(inner.value - inner.remainder_bound, 0.0) ** (1.0 / tau2)
        if not math.isfinite(hi):
            raise OverflowError
    except OverflowError:
        # The sum is finite but its 1/tau2 power exceeds the double range.
        return SumEvaluation(
            math.inf,
            inner.terms_used,
            None,
            SumStatus.HEURISTIC,
            "finite inner sum, outer power exceeds the double range",
        )
    return SumEvaluation(
        0.5 * (hi + lo),
        inner.terms_used,
        0.5 * (hi - lo) * (1 + 1e-9),
        inner.status,
        inner.note,
    )


def sum_qpt_exp(
    model: EigenModel,
    d: int,
    tau: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """d**-tau sum_j [1 + 0.5 ln max(1, CRI/lambda)]**(-tau (1+ln d))."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    T = tau * (1.0 + math.log(d))
    env = ratio_envelope(model, d, criterion, 1)
    plan = _plan_qpt_exp(env, T, 1)
    return certified_sum(
        _qpt_exp_terms(model, d, criterion, T),
        1,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
        prefactor=float(d) ** -tau,
    )


def sum_wt_alg(
    model: EigenModel,
    d: int,
    c: float,
    s: float,
    t: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """exp(-c d**t) sum_j exp(-c (CRI/lambda)**(s/2))."""
    if not (c > 0 and s > 0 and t > 0):
        raise ValueError("c, s, t must be positive")
    env = ratio_envelope(model, d, criterion, 1)
    plan = _plan_wt_alg(env, c, s, 1)
    return certified_sum(
        _wt_alg_terms(model, d, criterion, c, s),
        1,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
        prefactor=math.exp(-c * float(d) ** t),
    )


def sum_wt_exp(
    model: EigenModel,
    d: int,
    c: float,
    s: float,
    t: float,
    criterion: ErrorCriterion = ErrorCriterion.ABS,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """exp(-c d**t) sum_j exp(-c [1 + ln(2 max(1, CRI/lambda))]**s)."""
    if not (c > 0 and s > 0 and t > 0):
        raise ValueError("c, s, t must be positive")
    env = ratio_envelope(model, d, criterion, 1)
    plan = _plan_wt_exp(env, c, s, 1)
    return certified_sum(
        _wt_exp_terms(model, d, criterion, c, s),
        1,
        plan,
        tol=tol,
        max_terms=max_terms,
        min_terms=min_terms,
        hard_end=support(model, d),
        prefactor=math.exp(-c * float(d) ** t),
    )


# ---------------------------------------------------------------------------
# UWT statistics
# ---------------------------------------------------------------------------


def uwt_statistic(
    model: EigenModel,
    n: int,
    k: int = 1,
    case: str = "ALG",
    criterion: ErrorCriterion = ErrorCriterion.ABS,
) -> float:
    """inf over d <= floor((ln n)**k) of the eigenvalue decay statistic at n.

    ALG uses ln(CRI_d/lambda(d, n)) / ln ln n, EXP the same with an extra
    ln(max(1, .)) on the numerator.  Requires n >= 3 so ln ln n > 0.  Indices
    past a finite rank count as infinitely small eigenvalues.
    """
    if n < 3:
        raise ValueError("n must be >= 3 so ln ln n is positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    if case not in ("ALG", "EXP"):
        raise ValueError("case must be ALG or EXP")
    loglog = math.log(math.log(n))
    d_hi = max(1, int(math.log(n) ** k))
    best = math.inf
    for d in range(1, d_hi + 1):
        try:
            num = -log_ratio(model, d, n, criterion)
        except BeyondRankError:
            num = math.inf  # exhausted spectrum: infinitely fast decay at this d
        if case == "EXP" and math.isfinite(num):
            num = math.log(max(1.0, num))
        best = min(best, num / loglog if math.isfinite(num) else math.inf)
        if model.d_independent:
            break
    return best


# ---------------------------------------------------------------------------
# Supremum over d
# ---------------------------------------------------------------------------


def _kind_call(kind: str):
    table = {
        "spt-alg": lambda model, d, p, criterion, **kw: sum_spt_alg(
            model, d, p.tau, int(p.c_tilde or 1), criterion, **kw
        ),
        "spt-exp": lambda model, d, p, criterion, **kw: sum_spt_exp(
            model, d, p.tau, int(p.c_tilde or 1), criterion, **kw
        ),
        "pt-alg": lambda model, d, p, criterion, **kw: sum_pt_alg(
            model, d, p.tau1 or 0.0, p.tau2, p.tau3 or 0.0, p.c_tilde or 1.0, criterion, **kw
        ),
        "pt-exp": lambda model, d, p, criterion, **kw: sum_pt_exp(
            model, d, p.tau1 or 0.0, p.tau2, p.tau3 or 0.0, p.c_tilde or 1.0, criterion, **kw
        ),
        "qpt-alg": lambda model, d, p, criterion, **kw: sum_qpt_alg(
            model, d, p.tau1 or 0.0, p.tau2, p.c_tilde or 1.0, criterion, **kw
        ),
        "qpt-exp": lambda model, d, p, criterion, **kw: sum_qpt_exp(
            model, d, p.tau, criterion, **kw
        ),
        "wt-alg": lambda model, d, p, criterion, **kw: sum_wt_alg(
            model, d, p.c, p.s, p.t, criterion, **kw
        ),
        "wt-exp": lambda model, d, p, criterion, **kw: sum_wt_exp(
            model, d, p.c, p.s, p.t, criterion, **kw
        ),
    }
    if kind not in table:
        raise ValueError(f"unknown criterion sum {kind!r}")
    return table[kind]


def evaluate_sum(
    model: EigenModel,
    kind: str,
    d: int,
    params: CriterionParams,
    criterion: ErrorCriterion,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
    min_terms: int = 0,
) -> SumEvaluation:
    """Evaluate one named criterion sum at a single d."""
    return _kind_call(kind)(
        model, d, params, criterion, tol=tol, max_terms=max_terms, min_terms=min_terms
    )


@dataclass(frozen=True)
class SupEvaluation:
    """The d-sweep of one criterion sum with an observed supremum and trend."""

    values: tuple[float, ...]
    sup_observed: float
    trend: str  # Bounded | Growing | Mixed
    status: SumStatus
    kind: str
    d_max: int
    all_converged: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "values": list(self.values),
            "sup_observed": self.sup_observed,
            "trend": self.trend,
            "status": self.status.value,
            "kind": self.kind,
            "d_max": self.d_max,
            "all_converged": self.all_converged,
        }


def _classify_trend(values: list[float]) -> str:
    d_max = len(values)
    if d_max <= 2:
        return "Bounded"
    if any(math.isinf(v) for v in values):
        return "Growing"
    window_start = max(1, d_max // 2)  # 1-based d
    quarter = max(1, d_max // 4)
    window = values[window_start - 1 :]
    head = values[: window_start - 1] or [values[0]]
    monotone = all(b >= a * (1 - 1e-12) for a, b in zip(window, window[1:]))
    if monotone and values[-1] >= 2.0 * values[quarter - 1] and values[-1] > values[0]:
        return "Growing"
    if max(window) <= max(head) * (1 + 1e-9) or max(window) <= 1.1 * min(window):
        return "Bounded"
    return "Mixed"


def sup_over_d(
    model: EigenModel,
    kind: str,
    params: CriterionParams,
    criterion: ErrorCriterion,
    d_max: int,
    *,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _DEFAULT_MAX_TERMS,
) -> SupEvaluation:
    """Evaluate the chosen sum for d = 1..d_max and summarise the sweep."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    call = _kind_call(kind)
    evals = [
        call(model, d, params, criterion, tol=tol, max_terms=max_terms)
        for d in range(1, d_max + 1)
    ]
    values = [e.value for e in evals]
    if any(e.divergent for e in evals):
        status = SumStatus.DIVERGENT
    elif all(e.certified for e in evals):
        status = SumStatus.CERTIFIED
    else:
        status = SumStatus.HEURISTIC
    return SupEvaluation(
        values=tuple(values),
        sup_observed=max(values),
        trend=_classify_trend(values),
        status=status,
        kind=kind,
        d_max=d_max,
        all_converged=all(e.converged for e in evals),
        notes=tuple(e.note for e in evals if e.note),
    )


def convergence_plan(
    model: EigenModel,
    kind: str,
    d: int,
    params: CriterionParams,
    criterion: ErrorCriterion,
) -> Plan:
    """The tail plan a sum evaluation would use, without summing anything.

    Classifier probes use this as a cheap convergence decision: a tail bound
    means certified convergence, a Divergence certificate certified
    divergence, None means no certificate either way.  Finite-rank spectra
    always yield a trivially convergent plan.
    """
    rank = support(model, d)
    if rank is not None:
        # Finite spectra converge trivially; any tail bound object works as
        # the convergence marker since nothing is summed through it.
        return GeomSeriesTail(1.0, 0.5, from_j=rank + 1, exact=False)
    if kind in ("spt-alg", "pt-alg", "qpt-alg"):
        if kind == "spt-alg":
            start = 1 if criterion is ErrorCriterion.NOR else int(params.c_tilde or 1)
            p = params.tau
        elif kind == "pt-alg":
            start = _start_index(criterion, params.c_tilde or 1.0, d, params.tau3 or 0.0)
            p = params.tau2
        else:
            start = _start_index(criterion, params.c_tilde or 1.0, d, params.tau1 or 0.0)
            p = params.tau2 * (1.0 + math.log(d))
        return _plan_power(ratio_envelope(model, d, criterion, start), p, start)
    if kind in ("spt-exp", "pt-exp"):
        if kind == "spt-exp":
            start = 1 if criterion is ErrorCriterion.NOR else int(params.c_tilde or 1)
            tau = params.tau
        else:
            start = _start_index(criterion, params.c_tilde or 1.0, d, params.tau3 or 0.0)
            tau = params.tau2
        return _plan_coupled(ratio_envelope(model, d, criterion, start), tau, start)
    if kind == "qpt-exp":
        T = params.tau * (1.0 + math.log(d))
        return _plan_qpt_exp(ratio_envelope(model, d, criterion, 1), T, 1)
    if kind == "wt-alg":
        return _plan_wt_alg(ratio_envelope(model, d, criterion, 1), params.c, params.s, 1)
    if kind == "wt-exp":
        return _plan_wt_exp(ratio_envelope(model, d, criterion, 1), params.c, params.s, 1)
    raise ValueError(f"unknown criterion sum {kind!r}")


SUM_KINDS = (
    "spt-alg",
    "spt-exp",
    "pt-alg",
    "pt-exp",
    "qpt-alg",
    "qpt-exp",
    "wt-alg",
    "wt-exp",
)
