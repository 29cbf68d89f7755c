"""Exact calculator for norms induced by hereditary families of finite sets."""

from .constructions import (IntervalSet, SchreierWitness, WindowExhausted, build_l1_blocks,
                            schreier_witness, schur_witness, tree_example_vector,
                            verify_growth_lower_bound, verify_stable_inequality)
from .duality import (ExtremePoint, convexity_ratio, dual_norm, envelope_decomposition_search,
                      envelope_gauge, extreme_points, quasi_dual_functional_norm)
from .family import (SetFamily, disjoint_sum, hereditary_closure, is_large_proxy,
                     partition_family, schreier, schreier_order, tree_family)
from .lp import LinearProgram, LPResult, solve_lp
from .norms import (PartitionCertificate, is_k_stable, norm_for_partition, norm_lower,
                    norm_upper, norm_upper_exact, norm_upper_greedy,
                    phi_consecutive_schreier, sup_norm)
from .vector import SparseVector

__version__ = "0.1.0"
