"""Tractability classification, exponent bracketing, and growth fits.

A verdict is one of

Holds          a certificate covers every dimension (closed-form boundedness
               for effectively d-independent models, a finite spectrum, or a
               recognised decay family),
Fails          a divergence certificate exists (or, for the eigenvalue decay
               statistics, a certified bounded plateau),
SupportedUpTo  finite evidence agrees with the notion up to the probed
               limits but nothing lifts it to every d or every parameter,
Inconclusive   the evidence is mixed or certification was impossible.

The searched parameter grids and the bisection refinement are deliberately
coarse-to-fine: a log grid locates a passing/failing pair, bisection then
narrows the induced exponent bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exprdsl
from .complexity import ComplexityQuery, info_complexity
from .criteria import (
    CriterionParams,
    SupEvaluation,
    convergence_plan,
    evaluate_sum,
    sup_over_d,
    uwt_statistic,
)
from .eigenmodel import (
    EigenModel,
    ErrorCriterion,
    Expression,
    GeometricTail,
    PowerLawTail,
    StretchedExpTail,
    eigenvalue,
    ratio,
    ratio_envelope,
    support,
)
from .errors import DegenerateGridError, NoPassingPointError
from .summation import Divergence, SumStatus

__all__ = [
    "Limits",
    "Notion",
    "TractabilityVerdict",
    "ExponentBracket",
    "GrowthFit",
    "decide",
    "exponent_bracket",
    "growth_fit",
    "check_implications",
    "classify_all",
    "standard_notions",
]

_TAU_GRID = tuple(2.0**e for e in range(-8, 9))
_AUX_GRID = (0.0, 0.5, 1.0, 2.0, 4.0)  # tau1 / tau3 style exponents
_EVIDENCE_TAU_GRID = (1.0, 2.0, 4.0, 0.5, 0.25)  # convergent-first ordering
_EVIDENCE_MAX_TERMS = 32_768
_EVIDENCE_TOL = 1e-6  # trend evidence needs stops, not certified digits


@dataclass(frozen=True)
class Limits:
    d_max: int = 64
    j_max: int = 1 << 26
    n_max: int = 1_000_000
    tol: float = 1e-10
    c_min: float = 2.0**-10

    def as_dict(self) -> dict:
        return {
            "d_max": self.d_max,
            "j_max": self.j_max,
            "n_max": self.n_max,
            "tol": self.tol,
            "c_min": self.c_min,
        }


@dataclass(frozen=True)
class Notion:
    kind: str  # SPT | PT | QPT | WT | UWT
    case: str  # ALG | EXP
    criterion: ErrorCriterion
    s: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind not in ("SPT", "PT", "QPT", "WT", "UWT"):
            raise ValueError(f"unknown notion kind {self.kind!r}")
        if self.case not in ("ALG", "EXP"):
            raise ValueError("case must be ALG or EXP")
        if self.kind == "WT" and not (self.s and self.t and self.s > 0 and self.t > 0):
            raise ValueError("WT requires positive s and t")

    @property
    def name(self) -> str:
        kind = self.kind
        if kind == "WT":
            kind = f"WT({self.s:g},{self.t:g})"
        return f"{self.case}-{kind}-{self.criterion.value}"

    @property
    def sum_kind(self) -> str:
        if self.kind == "UWT":
            raise ValueError("UWT is decided from the decay statistic, not a criterion sum")
        return {"SPT": "spt", "PT": "pt", "QPT": "qpt", "WT": "wt"}[self.kind] + (
            "-alg" if self.case == "ALG" else "-exp"
        )


@dataclass(frozen=True)
class TractabilityVerdict:
    notion: Notion
    status: str  # Holds | Fails | SupportedUpTo | Inconclusive
    witness: CriterionParams | None
    evidence: dict
    limits: Limits

    def as_dict(self) -> dict:
        return {
            "notion": self.notion.name,
            "status": self.status,
            "witness": self.witness.as_dict() if self.witness else None,
            "evidence": self.evidence,
            "limits": self.limits.as_dict(),
        }


@dataclass(frozen=True)
class ExponentBracket:
    lo: float
    hi: float
    lo_witness: CriterionParams | None
    hi_witness: CriterionParams | None

    def as_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_witness": self.lo_witness.as_dict() if self.lo_witness else None,
            "hi_witness": self.hi_witness.as_dict() if self.hi_witness else None,
        }


@dataclass(frozen=True)
class GrowthFit:
    C: float
    p: float
    q: float
    residual: float

    def as_dict(self) -> dict:
        return {"C": self.C, "p": self.p, "q": self.q, "residual": self.residual}


# ---------------------------------------------------------------------------
# Certificate availability
# ---------------------------------------------------------------------------


def _family_d_independent(model: EigenModel) -> bool:
    fam = model.family
    if isinstance(fam, Expression):
        return "d" not in exprdsl.variables_used(fam.tree)
    return True


def _scale_nonincreasing(model: EigenModel) -> bool:
    if model.d_scale is None:
        return True
    probes = sorted(set(list(range(1, 65)) + [128, 256, 512, 1024, 2048, 4096]))
    values = [model.scale_at(d) for d in probes]
    return all(b <= a * (1 + 1e-12) for a, b in zip(values, values[1:]))


def _effectively_d_independent(model: EigenModel, criterion: ErrorCriterion) -> bool:
    """True when finite-d evidence provably covers every d.

    The normalized criterion cancels a per-dimension scale exactly; under the
    absolute criterion a probed nonincreasing scale keeps every criterion
    term monotone in d.
    """
    if not _family_d_independent(model):
        return False
    if criterion is ErrorCriterion.NOR:
        return True
    return _scale_nonincreasing(model)


def _sup_attained_at_d1(model: EigenModel, sum_kind: str, criterion: ErrorCriterion) -> bool:
    """Every criterion term is nonincreasing in d, so sup_d = value at d=1.

    Holds for effectively d-independent models; the algebraic QPT sum under
    ABS additionally needs ratios <= 1 because its inner exponent grows
    with d.
    """
    if not _effectively_d_independent(model, criterion):
        return False
    if sum_kind == "qpt-alg" and criterion is ErrorCriterion.ABS:
        return eigenvalue(model, 1, 1) <= 1.0
    return True


def _exact_env_form(model: EigenModel, criterion: ErrorCriterion):
    env = ratio_envelope(model, 1, criterion, 1)
    if env is not None and env.exact:
        return env.form
    return None


# ---------------------------------------------------------------------------
# Parameter probing
# ---------------------------------------------------------------------------


def _probe_params(notion: Notion, value: float, aux: float = 0.0) -> CriterionParams:
    if notion.kind == "SPT":
        return CriterionParams(tau=value, c_tilde=1.0)
    if notion.kind == "PT":
        return CriterionParams(tau1=aux, tau2=value, tau3=aux, c_tilde=1.0)
    if notion.kind == "QPT" and notion.case == "ALG":
        return CriterionParams(tau1=aux, tau2=value, c_tilde=1.0)
    return CriterionParams(tau=value)  # QPT-EXP


def _certified_probe(
    model: EigenModel, notion: Notion, params: CriterionParams
) -> str:
    """'pass' / 'fail' / 'unknown' from the tail-plan algebra at d=1."""
    plan = convergence_plan(model, notion.sum_kind, 1, params, notion.criterion)
    if plan is None:
        return "unknown"
    if isinstance(plan, Divergence):
        return "fail"
    return "pass"


def _pass_direction(notion: Notion) -> str:
    """Side of the parameter axis on which the criterion is easier.

    Algebraic power sums and the exponential QPT sum pass for large
    parameters; the index-coupled exponential SPT/PT sums for small ones.
    """
    if notion.case == "EXP" and notion.kind in ("SPT", "PT"):
        return "small"
    return "large"


def _exponent_of(notion: Notion, value: float, aux: float = 0.0) -> float:
    if notion.kind == "SPT":
        return 2.0 * value if notion.case == "ALG" else 1.0 / value
    if notion.kind == "QPT" and notion.case == "ALG":
        return max(aux, 2.0 * value)
    return value  # QPT-EXP


# ---------------------------------------------------------------------------
# decide()
# ---------------------------------------------------------------------------


def decide(model: EigenModel, notion: Notion, limits: Limits = Limits()) -> TractabilityVerdict:
    """Evaluate one tractability notion for the model within the limits."""
    if notion.kind == "UWT":
        return _decide_uwt(model, notion, limits)
    if notion.kind == "WT":
        return _decide_wt(model, notion, limits)
    return _decide_summable(model, notion, limits)


def _decide_summable(model: EigenModel, notion: Notion, limits: Limits) -> TractabilityVerdict:
    if _sup_attained_at_d1(model, notion.sum_kind, notion.criterion):
        verdict = _decide_summable_certified(model, notion, limits)
        if verdict is not None:
            return verdict
    return _decide_summable_evidence(model, notion, limits)


def _decide_summable_certified(
    model: EigenModel, notion: Notion, limits: Limits
) -> TractabilityVerdict | None:
    passing: tuple[float, CriterionParams] | None = None
    failing: float | None = None
    for tau in _TAU_GRID:
        params = _probe_params(notion, tau)
        outcome = _certified_probe(model, notion, params)
        if outcome == "pass" and passing is None:
            passing = (tau, params)
        elif outcome == "fail":
            failing = tau if failing is None else (
                max(failing, tau) if _pass_direction(notion) == "large" else min(failing, tau)
            )
        if _pass_direction(notion) == "large" and passing:
            break
    if passing is not None:
        tau_pass, params = passing
        if failing is not None:
            mid = 0.5 * (tau_pass + failing)
            mid_params = _probe_params(notion, mid)
            if _certified_probe(model, notion, mid_params) == "pass":
                tau_pass, params = mid, mid_params
        elif tau_pass != 1.0:
            # Everything passes: prefer a moderate witness whose value is
            # comfortably representable.
            one = _probe_params(notion, 1.0)
            if _certified_probe(model, notion, one) == "pass":
                tau_pass, params = 1.0, one
        witness_eval = evaluate_sum(
            model, notion.sum_kind, 1, params, notion.criterion,
            tol=limits.tol, max_terms=_EVIDENCE_MAX_TERMS,
        )
        return TractabilityVerdict(
            notion, "Holds", params,
            {
                "certificate": "sup over d attained at d=1; tail plan certifies convergence",
                "value_at_d1": witness_eval.as_dict(),
            },
            limits,
        )
    # No passing parameter anywhere on the grid: certified failure when the
    # whole grid carries divergence certificates and the family-level
    # analysis says no parameter can help (power-law spectra under the
    # exponential criteria).
    form = _exact_env_form(model, notion.criterion)
    if isinstance(form, PowerLawTail) and notion.case == "EXP":
        all_fail = all(
            _certified_probe(model, notion, _probe_params(notion, tau)) == "fail"
            for tau in _TAU_GRID
        )
        if all_fail:
            return TractabilityVerdict(
                notion, "Fails", None,
                {
                    "certificate": "power-law spectrum: terms stay bounded away from zero "
                    "(or decay only polylogarithmically) for every parameter",
                    "grid": list(_TAU_GRID),
                },
                limits,
            )
    if failing is not None:
        # Certificates exist but all say divergence; without the family-level
        # argument the quantifier over parameters stays open.
        return TractabilityVerdict(
            notion, "Inconclusive", None,
            {"note": "every certificate on the parameter grid is a divergence", "grid": list(_TAU_GRID)},
            limits,
        )
    return None  # no certificates at all: fall back to evidence


def _decide_summable_evidence(
    model: EigenModel, notion: Notion, limits: Limits
) -> TractabilityVerdict:
    aux_grid = (
        _AUX_GRID
        if (notion.kind in ("PT", "QPT") and notion.criterion is ErrorCriterion.ABS)
        else (0.0,)
    )
    d_sweep = min(limits.d_max, 16)
    best: tuple[CriterionParams, SupEvaluation] | None = None
    for tau in _EVIDENCE_TAU_GRID:
        # Convergence of the j-sum does not depend on the start index, so a
        # cheap single evaluation at d=1 screens the whole aux grid.
        probe = evaluate_sum(
            model, notion.sum_kind, 1, _probe_params(notion, tau), notion.criterion,
            tol=_EVIDENCE_TOL, max_terms=_EVIDENCE_MAX_TERMS,
        )
        if not probe.converged or probe.divergent:
            continue
        for aux in aux_grid:
            params = _probe_params(notion, tau, aux)
            sweep = sup_over_d(
                model, notion.sum_kind, params, notion.criterion, d_sweep,
                tol=_EVIDENCE_TOL, max_terms=_EVIDENCE_MAX_TERMS,
            )
            if sweep.status is SumStatus.DIVERGENT or not sweep.all_converged:
                continue
            if sweep.trend == "Bounded":
                best = (params, sweep)
                break
        if best:
            break
    if best:
        params, sweep = best
        return TractabilityVerdict(
            notion, "SupportedUpTo", params,
            {"sup": sweep.as_dict(), "note": "finite-d evidence only"},
            limits,
        )
    return TractabilityVerdict(
        notion, "Inconclusive", None,
        {"note": "no parameter produced a bounded, fully evaluated sweep"},
        limits,
    )


def _decide_wt(model: EigenModel, notion: Notion, limits: Limits) -> TractabilityVerdict:
    s, t = float(notion.s), float(notion.t)
    sum_kind = notion.sum_kind
    certifiable = _sup_attained_at_d1(model, sum_kind, notion.criterion)
    form = _exact_env_form(model, notion.criterion)
    rank = support(model, 1)

    c_grid: list[float] = []
    c = 1.0
    while c >= limits.c_min:
        c_grid.append(c)
        c *= 0.5

    if certifiable and (form is not None or rank is not None):
        # Family-level resolution of the 'for all c > 0' quantifier.
        quantifier = _wt_quantifier(form, sum_kind, s, rank, limits)
        if isinstance(quantifier, float):  # a failing c
            params = CriterionParams(c=quantifier, s=s, t=t)
            if _certified_probe_wt(model, sum_kind, params, notion.criterion) == "fail":
                return TractabilityVerdict(
                    notion, "Fails", params,
                    {
                        "certificate": f"divergent inner sum at c={quantifier:g} "
                        "(power-law spectrum under the doubly logarithmic terms)",
                    },
                    limits,
                )
        elif quantifier == "holds":
            witness = CriterionParams(c=1.0, s=s, t=t)
            value = evaluate_sum(
                model, sum_kind, 1, witness, notion.criterion,
                tol=limits.tol, max_terms=_EVIDENCE_MAX_TERMS,
            )
            return TractabilityVerdict(
                notion, "Holds", witness,
                {
                    "certificate": "inner sum converges for every c > 0 on this family; "
                    "sup over d attained at d=1",
                    "smallest_tested_c": c_grid[-1],
                    "value_at_c1": value.as_dict(),
                },
                limits,
            )

    # Evidence path over the c grid.  The multiplicity certificate runs on
    # exact eigenvalue counts and is independent of any summation budget.
    worst_note = ""
    d_sweep = min(limits.d_max, 24)
    for c in c_grid:
        params = CriterionParams(c=c, s=s, t=t)
        cert = _multiplicity_growth(model, params, notion.criterion, d_sweep)
        if cert is not None:
            return TractabilityVerdict(
                notion, "Fails", params, {"certificate": cert, "witness_c": c}, limits
            )
        probe = evaluate_sum(
            model, sum_kind, 1, params, notion.criterion,
            tol=_EVIDENCE_TOL, max_terms=_EVIDENCE_MAX_TERMS,
        )
        if probe.divergent:
            return TractabilityVerdict(
                notion, "Fails", params,
                {"certificate": "divergent inner sum", "witness_c": c},
                limits,
            )
        if not probe.converged:
            worst_note = worst_note or f"inner sum undecided within budget at c={c:g}"
            continue
        sweep = sup_over_d(
            model, sum_kind, params, notion.criterion, d_sweep,
            tol=_EVIDENCE_TOL, max_terms=_EVIDENCE_MAX_TERMS,
        )
        if sweep.status is SumStatus.DIVERGENT:
            return TractabilityVerdict(
                notion, "Fails", params,
                {"certificate": "divergent inner sum", "witness_c": c, "sup": sweep.as_dict()},
                limits,
            )
        if not (sweep.trend == "Bounded" and sweep.all_converged):
            worst_note = worst_note or f"inconclusive sweep at c={c:g} (trend {sweep.trend})"
    if worst_note:
        return TractabilityVerdict(notion, "Inconclusive", None, {"note": worst_note}, limits)
    return TractabilityVerdict(
        notion, "SupportedUpTo", CriterionParams(c=c_grid[-1], s=s, t=t),
        {"note": "bounded sweeps for every tested c", "smallest_tested_c": c_grid[-1]},
        limits,
    )


def _wt_quantifier(form, sum_kind: str, s: float, rank: int | None, limits: Limits):
    """Resolve 'for all c > 0' analytically on an exact family.

    Returns "holds" when the inner sum converges for every c, a failing c
    when some c certifiably diverges, or None when undecided.  The algebraic
    sum has (super-)stretched-exponential terms on every supported envelope;
    the exponential sum only struggles on power-law spectra, where the terms
    are exp(-c (K + beta ln j)**s): summable for every c iff s > 1.
    """
    if rank is not None:
        return "holds"
    if form is None:
        return None
    if sum_kind == "wt-alg":
        return "holds"
    if isinstance(form, (GeometricTail, StretchedExpTail)):
        return "holds"
    if s > 1.0:
        return "holds"
    if s == 1.0:
        return min(limits.c_min, 0.5 / form.beta)
    return 1.0


def _certified_probe_wt(
    model: EigenModel, sum_kind: str, params: CriterionParams, criterion: ErrorCriterion
) -> str:
    plan = convergence_plan(model, sum_kind, 1, params, criterion)
    if plan is None:
        return "unknown"
    return "fail" if isinstance(plan, Divergence) else "pass"


def _multiplicity_growth(
    model: EigenModel, params: CriterionParams, criterion: ErrorCriterion, d_max: int
) -> str | None:
    """Exact lower bounds from the multiplicity of ratios >= 1.

    Each eigenvalue with lambda >= CRI contributes a fixed positive term, so
    m(d) * exp(-c d**t) lower-bounds the sweep; monotone growth of this exact
    bound across the probed range certifies the growing trend.
    """
    c, s, t = params.c, params.s, params.t
    lows = []
    for d in range(1, d_max + 1):
        m = _count_ratios_at_least_one(model, d, criterion)
        lows.append(m * math.exp(-c * (1.0 + math.log(2.0)) ** s) * math.exp(-c * float(d) ** t))
    half = lows[max(0, d_max // 2 - 1) :]
    quarter = lows[max(0, d_max // 4 - 1)]
    monotone = all(b >= a * (1 - 1e-12) for a, b in zip(half, half[1:]))
    if monotone and lows[-1] >= 2.0 * max(quarter, 1e-300) and lows[-1] > lows[0]:
        return (
            "multiplicity growth: the count of eigenvalues at or above CRI_d grows "
            "faster than exp(c d^t) damps it"
        )
    return None


def _count_ratios_at_least_one(model: EigenModel, d: int, criterion: ErrorCriterion) -> int:
    rank = support(model, d)
    cap = rank if rank is not None else 1 << 22
    if ratio(model, d, 1, criterion) < 1.0:
        return 0
    lo, hi = 1, 1
    while ratio(model, d, hi, criterion) >= 1.0:
        lo = hi
        if hi >= cap:
            return cap
        hi = min(hi * 2, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ratio(model, d, mid, criterion) >= 1.0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# UWT
# ---------------------------------------------------------------------------


def _uwt_grid(n_max: int) -> list[int]:
    ns = []
    n = 16
    while n < n_max:
        ns.append(n)
        n *= 2
    ns.append(n_max)
    return sorted(set(ns))


def _uwt_closed_form(form, case: str, n: float) -> float:
    """The decay statistic computed from an exact envelope form."""
    if isinstance(form, PowerLawTail):
        num = form.beta * math.log(n) - math.log(form.scale)
    elif isinstance(form, GeometricTail):
        num = -math.log(form.ratio) * n - math.log(form.scale)
    else:
        num = form.rate * n**form.power - math.log(form.scale)
    if case == "EXP":
        num = math.log(max(1.0, num))
    return num / math.log(math.log(n))


def _decide_uwt(model: EigenModel, notion: Notion, limits: Limits) -> TractabilityVerdict:
    case = notion.case
    criterion = notion.criterion
    grid = _uwt_grid(limits.n_max)
    ks = (1, 2, 3)
    stats = {
        k: [uwt_statistic(model, n, k, case, criterion) for n in grid] for k in ks
    }
    evidence = {
        "n_grid": grid,
        "statistics": {str(k): stats[k] for k in ks},
        "threshold_at_top": math.log(math.log(grid[-1])),
    }

    recognisable = _effectively_d_independent(model, criterion)
    form = _exact_env_form(model, criterion)
    rank = support(model, 1)

    if recognisable and rank is not None and grid[-1] > rank:
        if math.isinf(stats[1][-1]):
            return TractabilityVerdict(
                notion, "Holds", None,
                {**evidence, "certificate": "finite spectrum: the statistic is infinite past the rank"},
                limits,
            )

    if recognisable and isinstance(form, (GeometricTail, StretchedExpTail)):
        # Decay at least stretched-exponential: the statistic grows without
        # bound at a polynomial (ALG) or logarithmic-ratio (EXP) rate.
        closed = [_uwt_closed_form(form, case, n) for n in grid]
        agree = all(
            abs(a - b) <= 1e-9 * max(1.0, abs(b)) for a, b in zip(stats[1], closed)
        )
        if agree and stats[1][-1] > math.log(math.log(grid[-1])):
            return TractabilityVerdict(
                notion, "Holds", None,
                {**evidence, "certificate": "closed-form statistic recognised for the family; "
                                            "it grows without bound"},
                limits,
            )

    if recognisable and isinstance(form, PowerLawTail) and case == "EXP":
        closed = [_uwt_closed_form(form, "EXP", n) for n in grid]
        plateau = all(
            abs(a - b) <= 1e-12 * max(1.0, abs(b)) for a, b in zip(stats[1], closed)
        )
        if plateau:
            # ln(beta ln n - ln A)/ln ln n tends to 1: bounded, so the limit
            # cannot be infinite.
            return TractabilityVerdict(
                notion, "Fails", None,
                {**evidence, "certificate": "exact plateau: the statistic matches the bounded "
                                            "closed form ln(beta ln n - ln A)/ln ln n"},
                limits,
            )

    # Evidence: the statistic must clear ln ln n at the top of the grid for
    # every window exponent k, with a nondecreasing run over the last half.
    top_threshold = math.log(math.log(grid[-1]))
    supported = True
    for k in ks:
        seq = stats[k]
        if not seq or not (seq[-1] > top_threshold):
            supported = False
            break
        half = seq[len(seq) // 2 :]
        finite = [v for v in half if math.isfinite(v)]
        if len(finite) >= 2 and any(b < a * (1 - 1e-9) for a, b in zip(finite, finite[1:])):
            supported = False
            break
    if supported:
        return TractabilityVerdict(
            notion, "SupportedUpTo", None,
            {**evidence, "note": "statistic clears ln ln n at the top of the grid and is "
                                 "nondecreasing over its last half"},
            limits,
        )
    return TractabilityVerdict(
        notion, "Inconclusive", None,
        {**evidence, "note": "statistic stays at or below ln ln n (no plateau certificate)"},
        limits,
    )


# ---------------------------------------------------------------------------
# Exponent brackets
# ---------------------------------------------------------------------------

_BRACKET_NOTIONS = ("SPT", "QPT")


def exponent_bracket(
    model: EigenModel, notion: Notion, limits: Limits = Limits()
) -> ExponentBracket:
    """Bisection bracket for the tractability exponent of SPT or QPT.

    The searched parameter maps to the exponent via 2*tau (ALG-SPT), 1/tau
    (EXP-SPT), max(tau1, 2*tau2) (ALG-QPT, minimised over a tau1 grid), or
    tau (EXP-QPT).
    """
    if notion.kind not in _BRACKET_NOTIONS:
        raise ValueError("exponent brackets are defined for SPT and QPT")
    if not _sup_attained_at_d1(model, notion.sum_kind, notion.criterion):
        raise NoPassingPointError(
            "exponent bracketing needs a d=1 certificate for this model"
        )
    if notion.kind == "QPT" and notion.case == "ALG":
        # Two coupled parameters: bisect tau2 per tau1 grid point and combine
        # (min of uppers bounds the infimum above, min of lowers below).
        brackets = [
            br
            for aux in (_AUX_GRID if notion.criterion is ErrorCriterion.ABS else (0.0,))
            if (br := _bisect_bracket(model, notion, aux)) is not None
        ]
        if not brackets:
            raise NoPassingPointError("no passing parameter on the grid")
        best_hi = min(brackets, key=lambda b: b.hi)
        best_lo = min(brackets, key=lambda b: b.lo)
        return ExponentBracket(best_lo.lo, best_hi.hi, best_lo.lo_witness, best_hi.hi_witness)
    br = _bisect_bracket(model, notion, 0.0)
    if br is None:
        raise NoPassingPointError("no passing parameter on the grid")
    return br


def _bisect_bracket(model: EigenModel, notion: Notion, aux: float) -> ExponentBracket | None:
    def passes(tau: float) -> bool:
        return _certified_probe(model, notion, _probe_params(notion, tau, aux)) == "pass"

    direction = _pass_direction(notion)
    grid = _TAU_GRID if direction == "large" else tuple(reversed(_TAU_GRID))
    tau_pass = next((tau for tau in grid if passes(tau)), None)
    if tau_pass is None:
        return None
    fail_side = [tau for tau in grid if (tau < tau_pass if direction == "large" else tau > tau_pass)]
    if fail_side:
        tau_fail = max(fail_side) if direction == "large" else min(fail_side)
        lo_param, hi_param = tau_fail, tau_pass
        for _ in range(20):
            if abs(_exponent_of(notion, hi_param, aux) - _exponent_of(notion, lo_param, aux)) <= 0.01:
                break
            mid = 0.5 * (lo_param + hi_param)
            if passes(mid):
                hi_param = mid
            else:
                lo_param = mid
        endpoints = sorted(
            (
                (_exponent_of(notion, lo_param, aux), _probe_params(notion, lo_param, aux)),
                (_exponent_of(notion, hi_param, aux), _probe_params(notion, hi_param, aux)),
            ),
            key=lambda pair: pair[0],
        )
        return ExponentBracket(endpoints[0][0], endpoints[1][0], endpoints[0][1], endpoints[1][1])
    # Nothing fails: the exponent infimum sits at (or below) the grid floor.
    hi_param = tau_pass
    for _ in range(20):
        if _exponent_of(notion, hi_param, aux) <= 0.02:
            break
        candidate = hi_param * (0.5 if direction == "large" else 2.0)
        if not passes(candidate):
            break
        hi_param = candidate
    return ExponentBracket(
        0.0, _exponent_of(notion, hi_param, aux), None, _probe_params(notion, hi_param, aux)
    )


# ---------------------------------------------------------------------------
# Growth fits
# ---------------------------------------------------------------------------


def growth_fit(
    model: EigenModel,
    case: str,
    criterion: ErrorCriterion,
    eps_grid,
    d_grid,
    limits: Limits = Limits(),
) -> GrowthFit:
    """Least-squares fit of ln max(1, n(eps, d)) against the case regressors.

    Empirical corroboration only; the fitted (C, p, q) carry no infimum
    claim.
    """
    eps_grid = [float(e) for e in eps_grid]
    d_grid = [int(d) for d in d_grid]
    if len(eps_grid) < 8 or len(d_grid) < 8:
        raise DegenerateGridError("need at least 8 points per axis")
    rows = []
    ys = []
    for d in d_grid:
        for eps in eps_grid:
            res = info_complexity(model, ComplexityQuery(d, eps, criterion), limits.j_max)
            inv = max(1.0, 1.0 / eps)
            x = math.log(inv) if case == "ALG" else math.log(1.0 + math.log(inv))
            rows.append([1.0, math.log(d), x])
            ys.append(math.log(max(1, res.n)))
    A = np.asarray(rows)
    y = np.asarray(ys)
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return GrowthFit(C=float(math.exp(coef[0])), p=float(coef[2]), q=float(coef[1]), residual=resid)


# ---------------------------------------------------------------------------
# Implication chain
# ---------------------------------------------------------------------------

_CHAIN = ("SPT", "PT", "QPT")


def check_implications(verdicts: list[TractabilityVerdict]) -> list[dict]:
    """Flag certificate-level violations of the tractability implications.

    SPT => PT => QPT => WT(s,t) for every s,t; WT(s2,t2) => WT(s1,t1) for
    s1 >= s2, t1 >= t2; UWT => WT(s,t) for every s,t.  Only Holds upstream
    combined with Fails downstream is a hard inconsistency.
    """
    issues: list[dict] = []
    by_group: dict[tuple[str, str], list[TractabilityVerdict]] = {}
    for v in verdicts:
        by_group.setdefault((v.notion.case, v.notion.criterion.value), []).append(v)

    for (case, crit), group in sorted(by_group.items()):
        named = {v.notion.kind if v.notion.kind != "WT" else v.notion.name: v for v in group}
        wts = [v for v in group if v.notion.kind == "WT"]

        def flag(up: TractabilityVerdict, down: TractabilityVerdict):
            issues.append(
                {
                    "case": case,
                    "criterion": crit,
                    "upstream": up.notion.name,
                    "downstream": down.notion.name,
                    "detail": f"{up.notion.name} Holds but {down.notion.name} Fails",
                }
            )

        chain = [named.get(k) for k in _CHAIN]
        for i, up in enumerate(chain):
            if up is None or up.status != "Holds":
                continue
            for down in chain[i + 1 :]:
                if down is not None and down.status == "Fails":
                    flag(up, down)
            for wt in wts:
                if wt.status == "Fails":
                    flag(up, wt)
        for a in wts:
            for b in wts:
                if a is b:
                    continue
                if a.notion.s <= b.notion.s and a.notion.t <= b.notion.t:
                    if a.status == "Holds" and b.status == "Fails":
                        flag(a, b)
        uwt = named.get("UWT")
        if uwt is not None and uwt.status == "Holds":
            for wt in wts:
                if wt.status == "Fails":
                    flag(uwt, wt)
    return issues


def standard_notions(criterion: ErrorCriterion) -> list[Notion]:
    out = []
    for case in ("ALG", "EXP"):
        out.append(Notion("SPT", case, criterion))
        out.append(Notion("PT", case, criterion))
        out.append(Notion("QPT", case, criterion))
        out.append(Notion("WT", case, criterion, s=1.0, t=1.0))
        out.append(Notion("WT", case, criterion, s=2.0, t=2.0))
        out.append(Notion("UWT", case, criterion))
    return out


def classify_all(
    model: EigenModel,
    criterion: ErrorCriterion,
    limits: Limits = Limits(),
    notions: list[Notion] | None = None,
    workers: int = 1,
) -> dict:
    """Verdicts for the standard notion set plus the consistency report.

    ``workers`` parallelises independent notions; the merge is an ordered
    reduction so the report is byte-identical for any worker count.
    """
    notions = notions if notions is not None else standard_notions(criterion)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda nt: decide(model, nt, limits), notions))
    else:
        verdicts = [decide(model, nt, limits) for nt in notions]
    issues = check_implications(verdicts)
    return {
        "verdicts": [v.as_dict() for v in verdicts],
        "inconsistencies": issues,
    }
