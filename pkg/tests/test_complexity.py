import math

import numpy as np
import pytest

from tract import (
    ComplexityQuery,
    EigenModel,
    ErrorCriterion,
    FiniteRank,
    count_oracle,
    info_complexity,
    nth_minimal_error,
)
from tract.errors import UnboundedError

ABS = ErrorCriterion.ABS
NOR = ErrorCriterion.NOR


class TestInfoComplexity:
    def test_geometric_abs(self, geo):
        # threshold 1/4: lambda_1 = 1/2 above, lambda_2 = 1/4 at it (ties count)
        assert info_complexity(geo, ComplexityQuery(3, 0.5, ABS)).n == 1

    def test_geometric_nor(self, geo):
        # threshold = eps^2 lambda_1 = 1/8: lambda_3 = 1/8 satisfies it
        assert info_complexity(geo, ComplexityQuery(3, 0.5, NOR)).n == 2

    def test_zero_at_large_eps_abs(self, geo, poly2, exp1):
        for model in (geo, poly2, exp1):
            norm = math.sqrt(1.0)  # lambda(1,1) <= 1 for these fixtures
            res = info_complexity(model, ComplexityQuery(1, max(1.0, norm), ABS))
            assert res.n == 0

    def test_zero_at_eps_one_nor(self, geo, poly2, exp1):
        for model in (geo, poly2, exp1):
            for d in (1, 2, 7):
                assert info_complexity(model, ComplexityQuery(d, 1.0, NOR)).n == 0

    def test_finite_rank_caps(self):
        model = EigenModel(FiniteRank((1.0, 0.5)))
        res = info_complexity(model, ComplexityQuery(1, 0.01, ABS))
        assert res.n == 2 and res.capped

    def test_unbounded_reported(self, geo):
        with pytest.raises(UnboundedError):
            info_complexity(geo, ComplexityQuery(1, 1e-200, ABS), j_max=64)


class TestCountOracle:
    def test_geometric(self, geo):
        assert count_oracle(geo, ComplexityQuery(1, 0.5, ABS), 100).n == 1

    def test_poly_decay(self, poly2):
        # j^-2 > 0.01 exactly for j <= 9
        assert count_oracle(poly2, ComplexityQuery(1, 0.1, ABS), 10_000).n == 9

    def test_finite_rank_capped(self):
        model = EigenModel(FiniteRank((1.0, 0.5)))
        res = count_oracle(model, ComplexityQuery(1, 0.01, ABS))
        assert res.n == 2 and res.capped


class TestOracleEquivalence:
    def test_exact_agreement_on_grids(self, geo, poly2, exp1):
        rng = np.random.default_rng(7)
        for model, j_max in ((geo, 3000), (poly2, 3000), (exp1, 3000)):
            for criterion in (ABS, NOR):
                eps_values = np.exp(rng.uniform(np.log(0.05), np.log(2.0), size=40))
                for d in (1, 2, 5, 32):
                    for eps in eps_values:
                        q = ComplexityQuery(d, float(eps), criterion)
                        assert (
                            info_complexity(model, q).n
                            == count_oracle(model, q, j_max).n
                        )

    def test_eps_monotonicity(self, poly2):
        values = [
            info_complexity(poly2, ComplexityQuery(1, eps, ABS)).n
            for eps in np.geomspace(0.05, 2.0, 60)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestNthMinimalError:
    def test_initial_error_is_norm(self, geo):
        assert nth_minimal_error(geo, 1, 0) == pytest.approx(math.sqrt(0.5))

    def test_poly(self, poly2):
        assert nth_minimal_error(poly2, 1, 2) == pytest.approx(1.0 / 3.0)

    def test_exhausted_rank_gives_zero(self):
        model = EigenModel(FiniteRank((1.0,)))
        assert nth_minimal_error(model, 1, 1) == 0.0

    def test_consistency_with_complexity(self, geo, poly2):
        # ulp slack: an exact threshold tie can flip under the square root
        for model in (geo, poly2):
            for criterion in (ABS, NOR):
                root_cri = nth_minimal_error(model, 2, 0) if criterion is NOR else 1.0
                for eps in np.geomspace(0.06, 0.9, 25):
                    n = info_complexity(model, ComplexityQuery(2, float(eps), criterion)).n
                    if n >= 1:
                        assert nth_minimal_error(model, 2, n) <= eps * root_cri * (1 + 4e-16)
                        assert nth_minimal_error(model, 2, n - 1) > eps * root_cri * (1 - 4e-16)

    def test_abs_nor_coincide_when_top_eigenvalue_is_one(self, poly2):
        for eps in np.geomspace(0.05, 3.0, 30):
            a = info_complexity(poly2, ComplexityQuery(3, float(eps), ABS)).n
            b = info_complexity(poly2, ComplexityQuery(3, float(eps), NOR)).n
            assert a == b
