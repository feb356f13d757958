"""Palette sparsification list colouring: pipeline, oracles and experiment harness."""

from .coloring import PHASES, PartialColoring, PhaseFailure, verify_coloring
from .decomposition import Decomposition, DecompositionReport, decompose, verify
from .dense import (ClusterParams, ClusterState, ProcessOutcome, build_allowed_bigraph,
                    cluster_params, cluster_state, color_dense, complete_cluster, order_colors,
                    run_pairing_process)
from .graph import (GENERATOR_KINDS, GeneratorSpec, Graph, build_graph, generate,
                    read_edge_list, regularize, write_edge_list)
from .harness import (CSV_COLUMNS, ExperimentSummary, TrialConfig, TrialResult, run_experiment,
                      run_trial, trial_seed)
from .matching import (Bigraph, MatchingResult, canonical_minimizer, hall_violator,
                       max_matching, pm_probability_exact, switch)
from .oracle import OracleVerdict, coverage_probability, exact_list_colorable
from .palette import ListAssignment, RngStream, list_size, sample_lists
from .sparse import (SparseDiagnostics, TentativeOutcome, color_sparse, compute_bad_vertices,
                     prune_color_degrees, residual_lists, tentative_color, theta_prime)

__version__ = "0.1.0"
