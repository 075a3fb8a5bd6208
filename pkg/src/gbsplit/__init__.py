"""Generalized binary splitting for adaptive group testing in the linear regime."""

from .driver import RunConfig, RunResult, run_gbs, run_gbs_capped, worst_case_tests
from .sim import InstanceSpec, RunStats, concentration_experiment, generate, monte_carlo
from .splitting import (
    CodewordTable,
    DefectivePattern,
    SplitResult,
    TestOracle,
    binary_split,
    binary_split_general,
    binary_split_pow2,
    huffman_codewords,
)
from .theory import (
    TheoryPoint,
    avg_aspect,
    binary_entropy,
    combinatorial_entropy,
    mcdiarmid_bound,
    pass_expected_items,
    pass_expected_tests,
    small_error_optimal_m,
    theorem2_aspect,
    zero_error_aspect,
    zero_error_optimal_m,
)

__version__ = "0.1.0"
