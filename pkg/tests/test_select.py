import math

import pytest

from rankspec import (
    BetaParams,
    LogParams,
    ModelFamily,
    ModelFit,
    PerfectFitError,
    PiecewiseLogParams,
    aic,
    bic,
    delta_aic,
    rank_models,
)

N = 1280
# published SSE values for (piecewise K=4, beta K=3, log K=2)
SSE_PLOG = 2.3554e-6
SSE_BETA = 3.9534e-6
SSE_LOG = 3.09e-5


def stub(family, ssev, k, n=N):
    params = {
        ModelFamily.LOG: LogParams(C=1.0, a=-0.1),
        ModelFamily.PIECEWISE_LOG: PiecewiseLogParams(
            C=1.0, a=-0.1, C_prime=1.0, a_prime=-0.1, r0=15
        ),
        ModelFamily.BETA: BetaParams(C=1.0, a=0.1, b=0.1),
    }[family]
    return ModelFit(family, params, ssev, k, n)


class TestAic:
    def test_sse_equal_n_gives_zero(self):
        assert aic(50.0, 50, 1) == pytest.approx(2.0)
        assert aic(50.0, 50, 1) - 2 * 1 == 0.0

    def test_ln_e_identity(self):
        n = 10
        assert aic(n * math.e, n, 1) == pytest.approx(n + 2, abs=1e-12)

    def test_published_first_term(self):
        value = N * math.log(SSE_PLOG / SSE_BETA)
        assert value == pytest.approx(-662, abs=1)

    def test_parameter_penalty_is_two(self):
        for k in (1, 2, 5):
            assert aic(0.3, 77, k + 1) - aic(0.3, 77, k) == 2.0

    def test_zero_sse_is_distinguished(self):
        with pytest.raises(PerfectFitError):
            aic(0.0, 10, 2)


class TestBic:
    def test_sse_equal_n_k_zero_equivalent(self):
        n = 50
        assert bic(float(n), n, 1) == pytest.approx(math.log(n), abs=1e-12)

    def test_e_squared_sample(self):
        n = math.e ** 2
        # n*ln(sse/n) vanishes when sse == n; penalty is k*ln(n) = 2*2
        assert 2 * math.log(n) == pytest.approx(4.0, abs=1e-12)

    def test_penalty_exceeds_aic_at_published_n(self):
        assert math.log(N) == pytest.approx(7.1546, abs=1e-3)
        assert math.log(N) > 2

    def test_parameter_penalty_is_log_n(self):
        n = 321
        assert bic(0.5, n, 3) - bic(0.5, n, 2) == pytest.approx(
            math.log(n), abs=1e-12
        )

    def test_zero_sse_is_distinguished(self):
        with pytest.raises(PerfectFitError):
            bic(0.0, 10, 2)


class TestDeltaAic:
    def test_identical_fits_give_zero(self):
        fit = stub(ModelFamily.BETA, 1e-6, 3)
        assert delta_aic(fit, fit) == 0.0

    def test_published_piecewise_vs_beta(self):
        d = delta_aic(
            stub(ModelFamily.PIECEWISE_LOG, SSE_PLOG, 4),
            stub(ModelFamily.BETA, SSE_BETA, 3),
        )
        assert d == pytest.approx(-660, abs=2)

    def test_published_log_vs_beta(self):
        d = delta_aic(
            stub(ModelFamily.LOG, SSE_LOG, 2),
            stub(ModelFamily.BETA, 3.95e-6, 3),
        )
        assert d == pytest.approx(2629, abs=5)

    def test_agrees_with_aic_difference(self):
        f2 = stub(ModelFamily.PIECEWISE_LOG, 4.2e-6, 4)
        f1 = stub(ModelFamily.BETA, 3.1e-6, 3)
        direct = aic(f2.sse, f2.n, f2.k) - aic(f1.sse, f1.n, f1.k)
        assert delta_aic(f2, f1) == pytest.approx(direct, abs=1e-12)

    def test_n_mismatch(self):
        with pytest.raises(ValueError):
            delta_aic(stub(ModelFamily.LOG, 1e-5, 2, n=100), stub(ModelFamily.BETA, 1e-5, 3, n=99))

    def test_zero_sse(self):
        with pytest.raises(PerfectFitError):
            delta_aic(stub(ModelFamily.LOG, 0.0, 2), stub(ModelFamily.BETA, 1e-5, 3))


class TestRankModels:
    def paper_fits(self):
        return [
            stub(ModelFamily.LOG, SSE_LOG, 2),
            stub(ModelFamily.BETA, SSE_BETA, 3),
            stub(ModelFamily.PIECEWISE_LOG, SSE_PLOG, 4),
        ]

    def test_published_ordering_under_both_criteria(self):
        for criterion in ("AIC", "BIC"):
            report = rank_models(self.paper_fits(), criterion)
            families = [e.family for e in report.entries]
            assert families == [
                ModelFamily.PIECEWISE_LOG,
                ModelFamily.BETA,
                ModelFamily.LOG,
            ]
            assert report.best_by_aic is ModelFamily.PIECEWISE_LOG
            assert report.best_by_bic is ModelFamily.PIECEWISE_LOG

    def test_tie_breaks_by_family_declaration_order(self):
        fits = [stub(ModelFamily.BETA, 1e-5, 3), stub(ModelFamily.PIECEWISE_LOG, 1e-5, 3)]
        report = rank_models(fits)
        assert report.entries[0].family is ModelFamily.PIECEWISE_LOG

    def test_penalty_can_prefer_simpler_model(self):
        # SSE ratio gives n*ln < 2, so the extra parameter is not worth it
        n = 100
        better = stub(ModelFamily.PIECEWISE_LOG, 0.99e-5, 4, n=n)
        simpler = stub(ModelFamily.LOG, 1e-5, 2, n=n)
        report = rank_models([better, simpler])
        assert report.entries[0].family is ModelFamily.LOG

    def test_invariant_under_permutation(self):
        fits = self.paper_fits()
        a = rank_models(fits)
        b = rank_models(list(reversed(fits)))
        assert a == b

    def test_deltas_antisymmetric(self):
        report = rank_models(self.paper_fits())
        m = report.deltas
        for i in range(3):
            assert m[i][i] == 0.0
            for j in range(3):
                assert m[i][j] == pytest.approx(-m[j][i], abs=1e-12)

    def test_perfect_fit_sorted_first_with_null_scores(self):
        fits = [stub(ModelFamily.LOG, 1e-5, 2), stub(ModelFamily.BETA, 0.0, 3)]
        report = rank_models(fits)
        top = report.entries[0]
        assert top.family is ModelFamily.BETA
        assert top.perfect_fit and top.aic is None and top.bic is None
        assert report.best_by_aic is ModelFamily.BETA

    def test_single_fit_rejected(self):
        with pytest.raises(ValueError):
            rank_models([stub(ModelFamily.LOG, 1e-5, 2)])

    def test_mismatched_n_rejected(self):
        with pytest.raises(ValueError):
            rank_models(
                [stub(ModelFamily.LOG, 1e-5, 2, n=10), stub(ModelFamily.BETA, 1e-5, 3, n=11)]
            )
