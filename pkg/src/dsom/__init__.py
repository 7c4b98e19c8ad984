"""Dissimilarity self-organizing map (batch DSOM / median SOM) on a
pairwise-dissimilarity matrix, with six interchangeable representation
strategies that produce bit-identical results at measurably different
operation counts."""

from .core import (AffectationStats, IterationRecord, MapState, affect_all,
                   energy, export_trace, init_prototypes, run_dsom)
from .dissim import (DissimilarityMatrix, MatrixFormatError, bundled_words,
                     levenshtein, levenshtein_matrix, load_matrix, load_points,
                     load_words, save_matrix, save_points, sq_euclidean_matrix)
from .harness import (DeterminismError, EquivalenceError, EquivalenceVerdict,
                      ExperimentConfig, MatrixFile, RunReport, StrategyResult,
                      TraceDivergence, UniformPoints, WordListFile,
                      compare_traces, gen_uniform, read_report, run_experiment,
                      verify_equivalence, write_report)
from .representation import (PartialSumCache, RepresentationStats, Strategy,
                             all_strategies, base_strategies, bound,
                             compute_partial_sums, represent_bnb,
                             represent_naive, represent_partial_sums, score)
from .topology import (HEXAGONAL, RECTANGULAR, MapGraph, NeighborhoodSchedule,
                       build_grid, default_schedule, neighborhood,
                       neighborhood_table, temperature)

__version__ = "0.1.0"

__all__ = [
    "AffectationStats", "DeterminismError", "DissimilarityMatrix",
    "EquivalenceError", "EquivalenceVerdict", "ExperimentConfig",
    "HEXAGONAL", "IterationRecord", "MapGraph", "MapState", "MatrixFile",
    "MatrixFormatError", "NeighborhoodSchedule", "PartialSumCache",
    "RECTANGULAR", "RepresentationStats", "RunReport", "Strategy",
    "StrategyResult", "TraceDivergence", "UniformPoints", "WordListFile",
    "affect_all", "all_strategies", "base_strategies", "bound",
    "bundled_words", "compare_traces", "compute_partial_sums",
    "default_schedule", "energy", "export_trace", "gen_uniform",
    "init_prototypes", "levenshtein", "levenshtein_matrix", "load_matrix",
    "load_points", "load_words", "neighborhood", "neighborhood_table",
    "read_report", "represent_bnb", "represent_naive",
    "represent_partial_sums", "run_dsom", "run_experiment", "save_matrix",
    "save_points", "score", "sq_euclidean_matrix", "temperature",
    "verify_equivalence", "write_report", "build_grid",
]
