import numpy as np
import pytest

from sofa_opt import make_domain
from sofa_opt.objectives import constant_objective, gaussian_bump, random_search_baseline
from sofa_opt.harness.metrics import (
    aggregate_records,
    convergence_probability,
    format_delta,
    function_error,
    metrics_header,
)


class TestFunctionError:
    def test_zero_at_optimum(self):
        assert function_error(1.0, 1.0) == 0.0

    def test_paper_threshold_value(self):
        assert function_error(1.0, 0.9998) == pytest.approx(2e-4, abs=1e-12)

    def test_negative_reported_not_clamped(self):
        assert function_error(1.0, 1.5) == -0.5


class TestFormatDelta:
    @pytest.mark.parametrize(
        "delta,expected",
        [(1e-3, "1e-3"), (5e-4, "5e-4"), (0.001, "1e-3"), (2e-2, "2e-2"), (1e-6, "1e-6")],
    )
    def test_values(self, delta, expected):
        assert format_delta(delta) == expected

    def test_header(self):
        assert metrics_header([1e-3, 5e-4]) == (
            "iteration,mean_err,p_1e-3,p_5e-4,unfeasible_frac"
        )


def make_records(n, iterations, seed=0):
    dom = make_domain([0.0, 0.0], [2.0, 2.0])
    obj = gaussian_bump([0.1, -0.2], 0.5)
    return [
        random_search_baseline(dom, obj, iterations, seed=seed + i) for i in range(n)
    ]


class TestConvergenceProbability:
    def test_all_converged(self):
        recs = make_records(4, 200)
        j_star = min(r.best_fitness[-1] for r in recs)
        assert convergence_probability(recs, j_star, 10.0, 200) == 1.0

    def test_none_converged(self):
        recs = make_records(4, 200)
        assert convergence_probability(recs, 10.0, 1e-6, 200) == 0.0

    def test_counting(self):
        recs = make_records(4, 500)
        finals = sorted(r.best_fitness[-1] for r in recs)
        j_star = finals[-1]
        # Choose delta separating exactly one run from the other three.
        delta = j_star - finals[0]
        got = convergence_probability(recs, j_star, delta, 500)
        expected = np.mean([abs(j_star - f) < delta for f in finals])
        assert got == expected
        assert 0.0 < got < 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            convergence_probability([], 1.0, 0.1, 1)
        with pytest.raises(ValueError):
            convergence_probability(make_records(1, 10), 1.0, 0.0, 10)


class TestAggregateRecords:
    def test_p_delta_monotone_and_bounded(self):
        recs = make_records(6, 400)
        j_star = max(r.best_fitness[-1] for r in recs)
        series = aggregate_records(recs, j_star, deltas=(1e-1, 1e-2))
        for dense in series.p_delta.values():
            assert np.all(dense >= 0.0) and np.all(dense <= 1.0)
            assert np.all(np.diff(dense) >= 0.0)

    def test_mean_err_non_increasing(self):
        recs = make_records(6, 400)
        j_star = max(r.best_fitness[-1] for r in recs)
        series = aggregate_records(recs, j_star, deltas=(1e-2,))
        assert np.all(np.diff(series.mean_err) <= 1e-15)

    def test_unfeasible_zero_for_clean_objective(self):
        recs = make_records(3, 100)
        series = aggregate_records(recs, 1.0, deltas=(1e-2,))
        assert np.all(series.unfeasible_frac == 0.0)
        assert np.all(series.unfeasible_windowed == 0.0)

    def test_windowed_average(self):
        dom = make_domain([0.0], [2.0])
        from sofa_opt.objectives import FitnessOutcome, Objective

        def fn(z):
            if z[0] > 0.0:
                return FitnessOutcome.infeasible("right")
            return FitnessOutcome.feasible(1.0)

        recs = [
            random_search_baseline(dom, Objective(fn=fn, dim=1), 300, seed=s)
            for s in range(4)
        ]
        series = aggregate_records(recs, 1.0, deltas=(1e-2,), window=50)
        # Trailing mean of a 0/1 fraction stays within [0, 1] and smooths the
        # instantaneous series.
        assert np.all(series.unfeasible_windowed >= 0.0)
        assert np.all(series.unfeasible_windowed <= 1.0)
        assert series.unfeasible_windowed.std() < series.unfeasible_frac.std()
        i = 249
        manual = series.unfeasible_frac[i - 49 : i + 1].mean()
        assert series.unfeasible_windowed[i] == pytest.approx(manual, rel=1e-12)
