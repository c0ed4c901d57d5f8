"""Learning Boolean functions and networks with conditional-mutual-information
greedy search and permutation significance tests."""
from ._accel import backend_name
from .boolean import (NA, BooleanNetwork, BooleanTable, Dataset, MissingPatternError,
                      eval_function, eval_stochastic, pairs_from_timeseries, random_network,
                      shift_register, simulate, step_network)
from .inference import (InferenceResult, NetworkInferenceResult, Selection, backward_eliminate,
                        fit_truth_table, forward_select, infer_function, infer_network)
from .info import (ColumnSet, conditional_entropy, conditional_mutual_information, entropy,
                   joint_entropy, mutual_information, pattern_counts)
from .oracle import OracleResult, essential_inputs, exact_support, exhaustive_minimal_subset
from .significance import CmiTestResult, SignificanceConfig, permutation_test

__version__ = "0.1.0"

__all__ = [
    "NA", "BooleanNetwork", "BooleanTable", "CmiTestResult", "ColumnSet", "Dataset",
    "InferenceResult", "MissingPatternError", "NetworkInferenceResult", "OracleResult",
    "Selection", "SignificanceConfig", "backend_name", "backward_eliminate",
    "conditional_entropy", "conditional_mutual_information", "entropy", "essential_inputs",
    "eval_function", "eval_stochastic", "exact_support", "exhaustive_minimal_subset",
    "fit_truth_table", "forward_select", "infer_function", "infer_network", "joint_entropy",
    "mutual_information", "pairs_from_timeseries", "pattern_counts", "permutation_test",
    "random_network", "shift_register", "simulate", "step_network",
]
