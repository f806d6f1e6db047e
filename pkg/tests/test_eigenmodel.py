import numpy as np
import pytest

from tract import (
    EigenModel,
    ErrorCriterion,
    ExpDecay,
    Expression,
    FiniteRank,
    Geometric,
    GeometricTail,
    PolyDecay,
    PowerLawTail,
    Tabulated,
    TailEnvelope,
    cri,
    eigenvalue,
    eigenvalues,
    tail_bound,
    validate,
)
from tract.eigenmodel import MIN_POSITIVE, log_ratios, ratio, ratios
from tract.errors import BeyondRankError, EvalDomainError
from tract import exprdsl

ABS = ErrorCriterion.ABS
NOR = ErrorCriterion.NOR


class TestEigenvalue:
    def test_geometric(self, geo):
        assert eigenvalue(geo, 3, 4) == 0.0625

    def test_poly(self, poly2):
        assert eigenvalue(poly2, 1, 3) == pytest.approx(1.0 / 9.0, abs=0)

    def test_exp_matches_expression_model(self):
        model = EigenModel(ExpDecay(1.0, 1.0, 1.0))
        expr = EigenModel(Expression("exp(0-j)"))
        for j in range(1, 50):
            assert eigenvalue(model, 5, j) == pytest.approx(
                eigenvalue(expr, 5, j), rel=1e-15
            )

    def test_beyond_rank(self):
        model = EigenModel(FiniteRank((1.0, 0.5)))
        assert eigenvalue(model, 1, 2) == 0.5
        with pytest.raises(BeyondRankError):
            eigenvalue(model, 1, 3)

    def test_underflow_clamps(self):
        model = EigenModel(ExpDecay(1.0, 2.0, 1.0))
        assert eigenvalue(model, 1, 10_000) == MIN_POSITIVE

    def test_negative_formula_rejected(self):
        model = EigenModel(Expression("1 - j"))
        with pytest.raises(EvalDomainError):
            eigenvalue(model, 1, 5)

    def test_vectorised_agrees_with_scalar(self, geo, poly2, exp1):
        js = np.arange(1, 64)
        for model in (geo, poly2, exp1):
            vec = eigenvalues(model, 2, js)
            assert vec == pytest.approx([eigenvalue(model, 2, int(j)) for j in js], rel=0)


class TestCri:
    def test_abs_is_one(self, geo):
        assert cri(geo, 7, ABS) == 1.0

    def test_nor_geometric(self, geo):
        assert cri(geo, 2, NOR) == 0.5

    def test_nor_scaled_poly(self):
        model = EigenModel(PolyDecay(3.0, 1.0))
        assert cri(model, 1, NOR) == 3.0


class TestTailBound:
    def test_geometric_is_its_own_envelope(self, geo):
        env = tail_bound(geo, 1, 10)
        assert isinstance(env.form, GeometricTail)
        assert env.form.ratio == 0.5
        assert env.valid_from == 10
        assert env.exact

    def test_declared_envelope_keeps_its_onset(self):
        tail = TailEnvelope(PowerLawTail(2.0, 3.0), valid_from=50)
        model = EigenModel(Tabulated(tuple(1.0 / (j + 1) for j in range(60)), tail))
        env = tail_bound(model, 4, 10)
        assert isinstance(env.form, PowerLawTail)
        assert env.form.scale == 2.0 and env.form.beta == 3.0
        assert env.valid_from == 50

    def test_expression_without_tail_has_none(self):
        model = EigenModel(Expression("1/j"))
        assert tail_bound(model, 1, 100) is None

    def test_expression_with_declared_tail_under_nor(self):
        from tract.eigenmodel import ratio_envelope

        tail = TailEnvelope(PowerLawTail(2.0, 3.0), valid_from=1)
        model = EigenModel(Expression("2/(j*j*j)"), declared_tail=tail)
        env = ratio_envelope(model, 1, NOR, 1)
        assert env is not None
        # normalised by lambda(d, 1) = 2
        assert env.form.scale == pytest.approx(1.0)

    def test_d_scale_rescales_envelope(self):
        model = EigenModel(Geometric(1.0, 0.5), d_scale=exprdsl.parse("1/d"))
        env = tail_bound(model, 4, 1)
        assert env.form.scale == pytest.approx(0.25)

    def test_d_scale_underflow_clamps(self):
        model = EigenModel(PolyDecay(1.0, 2.0), d_scale=exprdsl.parse("exp(0-d)"))
        assert eigenvalue(model, 2000, 1) == MIN_POSITIVE

    def test_d_scale_negative_rejected(self):
        model = EigenModel(PolyDecay(1.0, 2.0), d_scale=exprdsl.parse("1-d"))
        with pytest.raises(EvalDomainError):
            eigenvalue(model, 3, 1)


class TestValidate:
    def test_monotone_family_passes(self, geo):
        assert validate(geo, d_max=10, j_probe=10_000).ok

    def test_non_monotone_table_fails_with_witness(self):
        model = EigenModel(
            Tabulated((1.0, 0.5, 0.7), TailEnvelope(GeometricTail(1.0, 0.5), valid_from=4))
        )
        report = validate(model, d_max=1, j_probe=3)
        assert not report.ok
        witnesses = {(v.d, v.j) for v in report.violations if v.kind == "increase"}
        assert (1, 3) in witnesses

    def test_envelope_violation_detected(self):
        # envelope(3) = 0.125 < lambda(3) = 0.25: domination fails at j=3.
        model = EigenModel(
            Tabulated((1.0, 1.0, 0.25), TailEnvelope(GeometricTail(1.0, 0.5), valid_from=3))
        )
        report = validate(model, d_max=1, j_probe=3)
        assert not report.ok
        assert any(v.kind == "envelope" and v.j == 3 for v in report.violations)

    def test_probed_monotonicity_on_every_index(self, poly2):
        report = validate(poly2, d_max=4, j_probe=10_000)
        assert report.ok


class TestRatios:
    def test_nor_normalisation(self, geo):
        js = np.arange(1, 300)
        vals = ratios(geo, 3, js, NOR)
        assert vals[0] == 1.0
        assert np.all(vals <= 1.0)

    def test_nor_scale_invariance_exact(self):
        base = EigenModel(Geometric(1.0, 0.5))
        scaled = EigenModel(Geometric(1.0, 0.5), d_scale=exprdsl.parse("exp(d)"))
        js = np.arange(1, 200)
        for d in (1, 3, 9):
            a = ratios(base, d, js, NOR)
            b = ratios(scaled, d, js, NOR)
            assert np.array_equal(a, b)
            assert np.array_equal(
                log_ratios(base, d, js, NOR), log_ratios(scaled, d, js, NOR)
            )

    def test_log_ratios_consistent_with_linear(self, exp2):
        js = np.arange(1, 100)
        lin = np.log(ratios(exp2, 1, js, ABS))
        logs = log_ratios(exp2, 1, js, ABS)
        assert logs == pytest.approx(lin, rel=1e-12, abs=1e-12)

    def test_log_ratios_avoid_clamp_saturation(self, exp2):
        # Far past the underflow clamp the log keeps tracking the true decay.
        val = log_ratios(exp2, 1, np.asarray([1000]), ABS)[0]
        assert val == pytest.approx(-2000.0)

    def test_ratio_scalar(self, geo):
        assert ratio(geo, 2, 3, NOR) == 0.25


class TestConfigIngestion:
    def test_roundtrip_geometric(self):
        from tract import model_from_config

        model = model_from_config({"kind": "Geometric", "params": {"a": 1, "r": 0.5}})
        assert eigenvalue(model, 1, 2) == 0.25

    def test_unknown_key_rejected(self):
        from tract import model_from_config

        with pytest.raises(ValueError, match="frequency"):
            model_from_config({"kind": "Geometric", "params": {"frequency": 2}})

    def test_tabulated_requires_tail(self):
        from tract import model_from_config

        with pytest.raises(ValueError, match="tail"):
            model_from_config({"kind": "Tabulated", "params": {"prefix": [1.0, 0.5]}})

    def test_declared_powerlaw_needs_beta_above_one(self):
        from tract import model_from_config

        with pytest.raises(ValueError, match="beta"):
            model_from_config(
                {
                    "kind": "Expression",
                    "params": {"formula": "1/j"},
                    "tail": {"form": "PowerLaw", "A": 1.0, "beta": 0.5},
                }
            )

    def test_d_scale_parsed(self):
        from tract import model_from_config

        model = model_from_config(
            {"kind": "Geometric", "params": {"a": 1, "r": 0.5}, "d_scale": "1/d"}
        )
        assert eigenvalue(model, 4, 1) == 0.125
