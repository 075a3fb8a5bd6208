import numpy as np
import pytest
from scipy.stats import chisquare

from gbsplit.driver import run_gbs, worst_case_tests
from gbsplit.errors import InvalidSpecError
from gbsplit.sim import (
    InstanceSpec,
    concentration_experiment,
    generate,
    monte_carlo,
    run_trials,
    trial_seeds,
)
from gbsplit.theory import avg_aspect, mcdiarmid_bound


class TestGenerate:
    def test_iid_zero(self):
        assert generate(InstanceSpec.iid(50, 0.0, seed=3)).k == 0

    def test_fixed_all(self):
        pat = generate(InstanceSpec.fixed_k(12, 12, seed=1))
        assert pat.k == 12

    def test_fixed_k_weight(self):
        assert generate(InstanceSpec.fixed_k(1000, 137, seed=9)).k == 137

    def test_adversarial(self):
        pat = generate(InstanceSpec.adversarial(18, 2, 4))
        assert pat.defectives == [1, 2]
        assert run_gbs(pat, 4).tests_used == worst_case_tests(18, 2, 4) == 10

    @pytest.mark.parametrize("kwargs", [
        dict(n=5, model="iid", p=1.5),
        dict(n=5, model="fixed_k", k=6),
        dict(n=10, model="adversarial", k=1, m=3),
        dict(n=10, model="adversarial", k=1, m=4),
        dict(n=10, model="bogus"),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSpecError):
            InstanceSpec(**kwargs)

    def test_seeded(self):
        a = generate(InstanceSpec.iid(500, 0.2, seed=11)).bits
        b = generate(InstanceSpec.iid(500, 0.2, seed=11)).bits
        c = generate(InstanceSpec.iid(500, 0.2, seed=12)).bits
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_fixed_k_uniform_inclusion(self):
        n, k, reps = 10, 3, 6000
        counts = np.zeros(n)
        for s in trial_seeds(2024, reps):
            counts += generate(InstanceSpec.fixed_k(n, k, seed=s)).bits
        assert chisquare(counts).pvalue > 1e-3
        assert np.allclose(counts / reps, k / n, atol=0.02)

    def test_fixed_k_uniform_over_subsets(self):
        n, k, reps = 5, 2, 5000
        seen = {}
        for s in trial_seeds(7, reps):
            key = tuple(generate(InstanceSpec.fixed_k(n, k, seed=s)).defectives)
            seen[key] = seen.get(key, 0) + 1
        assert len(seen) == 10
        assert chisquare(list(seen.values())).pvalue > 1e-3


class TestMonteCarlo:
    def test_reproducible(self):
        spec = InstanceSpec.iid(2000, 0.1, seed=5)
        a = monte_carlo(spec, 7, 15)
        b = monte_carlo(spec, 7, 15)
        assert a == b

    def test_prefix_stable(self):
        assert trial_seeds(1, 3) == trial_seeds(1, 10)[:3]

    def test_plain_never_errs(self):
        stats = monte_carlo(InstanceSpec.iid(3000, 0.2, seed=1), 3, 30)
        assert stats.error_rate == 0.0
        assert stats.trials == 30 and len(stats.tests) == 30

    @pytest.mark.parametrize("n,tol", [(10**4, 0.02), (10**5, 0.01)])
    def test_mean_converges(self, n, tol):
        stats = monte_carlo(InstanceSpec.iid(n, 0.1, seed=n), 7, 20)
        target = avg_aspect(0.1, 7)
        assert abs(stats.mean_tests_per_item - target) / target < tol

    def test_fixed_k_agrees_with_iid(self):
        n, p = 10**5, 0.1
        iid = monte_carlo(InstanceSpec.iid(n, p, seed=1), 7, 10)
        fixed = monte_carlo(InstanceSpec.fixed_k(n, int(np.ceil(p * n)), seed=2), 7, 10)
        assert abs(iid.mean_tests_per_item - fixed.mean_tests_per_item) / iid.mean_tests_per_item < 0.01

    def test_capped_success_rate(self):
        spec = InstanceSpec.iid(10**4, 0.1, seed=42)
        stats = monte_carlo(spec, 7, 1000, mode="capped", budget_factor=1.05)
        assert stats.budget == int(np.ceil(1.05 * avg_aspect(0.1, 7) * 10**4))
        assert set(stats.tests) == {stats.budget}
        # the budget sits ~2.35 sd above the mean, so the true error rate is ~1%;
        # empirical frequencies are compared with a 3-sigma binomial allowance
        target = 0.01
        assert stats.error_rate <= target + 3 * np.sqrt(target * (1 - target) / stats.trials)

    def test_parallel_matches_serial(self):
        spec = InstanceSpec.iid(500, 0.15, seed=8)
        serial = run_trials(spec, 5, 12, workers=1)
        parallel = run_trials(spec, 5, 12, workers=2)
        assert serial == parallel

    def test_tail_freq(self):
        stats = monte_carlo(InstanceSpec.iid(1000, 0.1, seed=3), 7, 200)
        assert 0 <= stats.tail_freq(0.05) <= 1
        assert stats.tail_freq(0.5) == 0.0

    def test_bad_mode(self):
        with pytest.raises(InvalidSpecError):
            monte_carlo(InstanceSpec.iid(10, 0.1), 2, 1, mode="nope")


class TestConcentration:
    def test_rows(self):
        rows = concentration_experiment(0.1, 7, [500, 2000], 0.5, 50, seed=1)
        assert [r.n for r in rows] == [500, 2000]
        for r in rows:
            assert r.tail_freq == 0.0
            assert r.bound == mcdiarmid_bound(r.n, 7, 0.5, 0.1)

    def test_grid_below_m(self):
        with pytest.raises(InvalidSpecError):
            concentration_experiment(0.1, 7, [5], 0.1, 2)
