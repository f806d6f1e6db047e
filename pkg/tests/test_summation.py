import math

import numpy as np
import pytest

from tract.summation import (
    AffinePowerTail,
    Divergence,
    GeomSeriesTail,
    PolyLogTail,
    PowerIntegralTail,
    RatioTail,
    StretchedIntegralTail,
    SumStatus,
    certified_sum,
)


def _block(fn):
    def terms(j0, j1):
        return np.asarray([fn(j) for j in range(j0, j1)], dtype=float)

    return terms


class TestTailBounds:
    def test_power_integral_brackets_true_tail(self):
        import mpmath

        p = 1.7
        tail = PowerIntegralTail(1.0, p, from_j=1, exact=True)
        for J in (10, 100, 1000):
            true = float(mpmath.zeta(p) - mpmath.fsum(mpmath.mpf(j) ** -p for j in range(1, J + 1)))
            assert tail.lower_tail(J) <= true <= tail.upper_tail(J)

    def test_affine_power_brackets_true_tail(self):
        tail = AffinePowerTail(1.0, 1.0, 2.0, 3.0, from_j=1, exact=True)
        for J in (10, 200):
            true = sum((1.0 + 2.0 * j) ** -3.0 for j in range(J + 1, 200_000))
            assert tail.lower_tail(J) <= true <= tail.upper_tail(J)

    def test_stretched_brackets_true_tail(self):
        tail = StretchedIntegralTail(2.0, 0.5, 0.5, from_j=1, exact=True)
        for J in (10, 100):
            true = sum(2.0 * math.exp(-0.5 * j**0.5) for j in range(J + 1, 100_000))
            assert tail.lower_tail(J) <= true <= tail.upper_tail(J)

    def test_geometric_series_closed_form(self):
        tail = GeomSeriesTail(3.0, 0.25, exact=True)
        true = 3.0 * 0.25**11 / 0.75
        assert tail.lower_tail(10) <= true <= tail.upper_tail(10)

    def test_polylog_bound_is_sound(self):
        c, K, beta, s = 1.0, 1.0, 2.0, 2.0
        tail = PolyLogTail(c, K, beta, s, from_j=3)
        g = lambda j: math.exp(-c * (K + beta * math.log(j)) ** s)
        for J in (5, 20):
            true = sum(g(j) for j in range(J + 1, 50_000))
            assert true <= tail.upper_tail(J)

    def test_ratio_tail_double_exponential(self):
        g = lambda x: math.exp(-math.exp(0.5 * x))
        tail = RatioTail(g, from_j=1)
        for J in (2, 6):
            true = sum(g(j) for j in range(J + 1, 200))
            assert true <= tail.upper_tail(J)


class TestEngine:
    def test_certified_value_within_remainder(self):
        plan = PowerIntegralTail(1.0, 2.0, from_j=1, exact=True)
        ev = certified_sum(_block(lambda j: j**-2.0), 1, plan, tol=1e-10)
        assert ev.status is SumStatus.CERTIFIED
        assert abs(ev.value - math.pi**2 / 6) <= ev.remainder_bound

    def test_min_terms_extension_stays_within_remainder(self):
        plan = PowerIntegralTail(1.0, 1.5, from_j=1, exact=True)
        terms = _block(lambda j: j**-1.5)
        base = certified_sum(terms, 1, plan, tol=1e-8)
        extended = certified_sum(terms, 1, plan, tol=1e-8, min_terms=10 * base.terms_used)
        assert abs(extended.value - base.value) <= base.remainder_bound + 1e-12 * abs(base.value)

    def test_divergence_plan_short_circuits(self):
        ev = certified_sum(_block(lambda j: 1.0), 1, Divergence("term-limit", 1, 0.5))
        assert ev.status is SumStatus.DIVERGENT
        assert math.isinf(ev.value)

    def test_finite_spectrum_is_exact(self):
        ev = certified_sum(_block(lambda j: 0.5**j), 1, None, hard_end=3)
        assert ev.status is SumStatus.CERTIFIED
        assert ev.remainder_bound == 0.0
        assert ev.value == 0.5 + 0.25 + 0.125

    def test_heuristic_stop(self):
        ev = certified_sum(_block(lambda j: math.exp(-j)), 1, None, tol=1e-10)
        assert ev.status is SumStatus.HEURISTIC
        assert ev.converged
        assert ev.value == pytest.approx(1.0 / (math.e - 1.0), rel=1e-10)

    def test_budget_exhaustion_flagged(self):
        ev = certified_sum(_block(lambda j: 1.0 / j), 1, None, tol=1e-10, max_terms=5000)
        assert ev.status is SumStatus.HEURISTIC
        assert not ev.converged

    def test_prefactor_applied(self):
        plan = GeomSeriesTail(1.0, 0.5, exact=True)
        ev = certified_sum(_block(lambda j: 0.5**j), 1, plan, prefactor=0.25)
        assert ev.value == pytest.approx(0.25, rel=1e-12)
