"""grandkit: code-agnostic GRAND decoding toolkit.

ORBGRAND and GRANDAB decoders for arbitrary GF(2) linear block codes,
distinct-integer-partition pattern generation in logistic-weight order,
an AWGN Monte-Carlo benchmark harness, and a cycle model of the
shift-register decoder schedule.
"""

__version__ = "0.1.0"

from .channel import ChannelConfig, QuantSpec, llr, quantize, transmit
from .codes import (CaPolarSpec, LinearCode, build_ca_polar, build_random_linear,
                    ca_polar_spec, derive_parity_from_generator, load_matrix,
                    save_matrix)
from .cycles import (CycleReport, RegisterLayout, ScheduleConfig, parallel_coverage,
                     steps_for_lw, trace_latency, worst_case_cycles)
from .decoders import (DecodeOutcome, SortPermutation, apply_partition,
                       grandab_decode, orbgrand_decode, sort_indices,
                       syndrome_combination_check)
from .gf2 import (BitWord, Gf2Matrix, encode, right_inverse, single_flip_syndromes,
                  syndrome, xor)
from .patterns import (PatternBudget, count_queries, lambda_max, partitions_of,
                       pattern_stream)

__all__ = [
    "__version__",
    "BitWord", "Gf2Matrix", "xor", "syndrome", "single_flip_syndromes",
    "right_inverse", "encode",
    "LinearCode", "CaPolarSpec", "build_ca_polar", "ca_polar_spec",
    "build_random_linear", "derive_parity_from_generator", "load_matrix",
    "save_matrix",
    "PatternBudget", "lambda_max", "partitions_of", "pattern_stream",
    "count_queries",
    "SortPermutation", "DecodeOutcome", "sort_indices", "apply_partition",
    "orbgrand_decode", "grandab_decode", "syndrome_combination_check",
    "ChannelConfig", "QuantSpec", "transmit", "llr", "quantize",
    "ScheduleConfig", "RegisterLayout", "CycleReport", "steps_for_lw",
    "worst_case_cycles", "parallel_coverage", "trace_latency",
]
