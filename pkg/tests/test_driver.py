from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gbsplit.driver import (
    RunConfig,
    run_gbs,
    run_gbs_capped,
    worst_case_slack_bound,
    worst_case_tests,
)
from gbsplit.errors import DomainError, EndEffectsError, InvalidBlockSizeError
from gbsplit.splitting import DefectivePattern

from oracles import naive_gbs

patterns = st.lists(st.booleans(), min_size=0, max_size=80).map(DefectivePattern)


def count_tests(n, defectives, m):
    return run_gbs(DefectivePattern.from_defectives(n, defectives), m).tests_used


class TestRunGBS:
    def test_individual_testing(self):
        for d in ([], [1], [2, 4], [1, 2, 3, 4]):
            res = run_gbs(DefectivePattern.from_defectives(4, d), 1)
            assert res.tests_used == 4 and res.success

    def test_all_negative(self):
        assert count_tests(8, [], 4) == 2

    def test_adversarial_worst_case(self):
        res = run_gbs(DefectivePattern.from_defectives(18, [1, 2]), 4)
        assert res.tests_used == 10 == worst_case_tests(18, 2, 4)
        assert res.end_tests == 0

    def test_end_effects_counted(self):
        # defective at 2 clears only item 1; items 3..5 are left for individual tests
        res = run_gbs(DefectivePattern.from_defectives(5, [2]), 4)
        assert res.tests_used == 1 + 2 + 3 and res.end_tests == 3

    def test_all_defective_pair_blocks(self):
        # 7 passes of (block test + 1 split test), last item tested alone
        res = run_gbs(DefectivePattern(np.ones(8, dtype=bool)), 2)
        assert res.tests_used == 15 and res.end_tests == 1

    def test_empty_instance(self):
        res = run_gbs(DefectivePattern([]), 3)
        assert res.tests_used == 0 and res.success

    def test_bad_m(self):
        with pytest.raises(InvalidBlockSizeError):
            run_gbs(DefectivePattern([True]), 0)

    def test_transcript_matches_count(self):
        res = run_gbs(DefectivePattern.from_defectives(20, [3, 4, 11, 19]), 5)
        assert len(res.transcript) == res.tests_used
        pat = DefectivePattern.from_defectives(20, [3, 4, 11, 19])
        assert all(pat.any(pool) == r for pool, r in res.transcript)

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 6, 7])
    def test_exhaustive_matches_literal_oracle(self, m):
        for n in range(0, 10):
            for mask in range(1 << n):
                pat = DefectivePattern.from_int(n, mask)
                res = run_gbs(pat, m, record=False)
                found, tests = naive_gbs(n, pat.defectives, m)
                assert res.success
                assert res.tests_used == tests
                assert set(np.flatnonzero(res.classification) + 1) == found

    @given(patterns, st.integers(1, 20))
    def test_random_matches_literal_oracle(self, pat, m):
        res = run_gbs(pat, m)
        found, tests = naive_gbs(pat.n, pat.defectives, m)
        assert res.success
        assert res.tests_used == tests
        assert res.resolution_order == list(range(1, pat.n + 1))

    @given(patterns, st.integers(1, 9))
    def test_slack_bound(self, pat, m):
        t = run_gbs(pat, m, record=False).tests_used
        bound = (pat.n - pat.k) / m + (1 + (m - 1).bit_length() + 1) * pat.k + (m - 1)
        assert t <= worst_case_slack_bound(pat.n, pat.k, m) <= bound


class TestBoundedDifferences:
    @given(st.lists(st.booleans(), min_size=1, max_size=60), st.integers(1, 12), st.data())
    def test_single_flip(self, bits, m, data):
        i = data.draw(st.integers(0, len(bits) - 1))
        flipped = list(bits)
        flipped[i] = not flipped[i]
        t0 = run_gbs(DefectivePattern(bits), m, record=False).tests_used
        t1 = run_gbs(DefectivePattern(flipped), m, record=False).tests_used
        assert abs(t0 - t1) <= 2 * m


class TestCapped:
    def test_padding(self):
        pat = DefectivePattern.from_defectives(30, [4, 17, 18])
        plain = run_gbs(pat, 4)
        res = run_gbs_capped(pat, 4, plain.tests_used + 5)
        assert res.success and res.completed
        assert res.tests_used == plain.tests_used + 5 and res.padding == 5

    def test_exact_budget_completes(self):
        pat = DefectivePattern.from_defectives(30, [4, 17, 18])
        t = run_gbs(pat, 4).tests_used
        res = run_gbs_capped(pat, 4, t)
        assert res.success and res.completed and res.padding == 0

    def test_zero_budget(self):
        res = run_gbs_capped(DefectivePattern.from_defectives(10, [7]), 3, 0)
        assert not res.success and res.tests_used == 0
        assert not res.classification.any()

    def test_zero_budget_no_defectives_guesses_right(self):
        res = run_gbs_capped(DefectivePattern([False] * 10), 3, 0)
        assert res.success and not res.completed

    def test_halt_guesses_nondefective(self):
        pat = DefectivePattern.from_defectives(16, [2, 15])
        res = run_gbs_capped(pat, 4, 3)
        assert res.classification.tolist() == [i == 1 for i in range(16)]
        assert not res.success and len(res.transcript) == 3

    @given(patterns, st.integers(1, 8))
    def test_monotone_in_budget(self, pat, m):
        full = run_gbs(pat, m, record=False).tests_used
        outcomes = [run_gbs_capped(pat, m, b, record=False).success for b in range(full + 2)]
        assert outcomes == sorted(outcomes)
        assert outcomes[full]
        assert all(run_gbs_capped(pat, m, b, record=False).tests_used == b for b in (0, full // 2, full + 1))

    def test_config_validation(self):
        with pytest.raises(DomainError):
            RunConfig(5, 2, "capped")
        with pytest.raises(DomainError):
            RunConfig(5, 2, "plain", 3)
        with pytest.raises(DomainError):
            run_gbs_capped(DefectivePattern([True]), 1, -1)


class TestWorstCase:
    def test_values(self):
        assert worst_case_tests(18, 2, 4) == 10
        assert worst_case_tests(7, 0, 1) == 7
        assert worst_case_tests(8, 8, 2) == 16

    def test_faults(self):
        with pytest.raises(DomainError):
            worst_case_tests(10, 1, 3)
        with pytest.raises(EndEffectsError):
            worst_case_tests(10, 1, 4)

    def test_all_defective_falls_short_of_formula(self):
        # the last m-1 defectives are found by single tests, cheaper than a pass
        assert count_tests(8, range(1, 9), 2) == 15 < worst_case_tests(8, 8, 2)

    def test_exhaustive_max_n18_k2_m4(self):
        runs = [run_gbs(DefectivePattern.from_defectives(18, c), 4, record=False)
                for c in combinations(range(1, 19), 2)]
        assert max(r.core_tests for r in runs) == worst_case_tests(18, 2, 4)
        # end-of-run individual tests push the raw maximum above the formula, by at most m - 1
        assert max(r.tests_used for r in runs) == 12
