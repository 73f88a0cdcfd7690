"""Gene Ontology annotation evolution analysis and negative example selection."""

from __future__ import annotations

__version__ = "0.1.0"

from .annotations import (EXPERIMENTAL_CODES, AnnotationRelease, NoveltySet, novelty, novelty_counts,
                          parse_gaf, term_frequency, tpr_close)
from .errors import (DomainError, EmptyReleaseWarning, GonegError, ParseError, StructureError,
                     UnknownTermError)
from .evaluation import EvaluationReport, eligible_terms, false_negatives, run_benchmark, tune_k
from .evolution import AnalysisResult, analyze, categorize, fork_analysis, rank_analysis
from .ontology import BRANCHES, OntologyDag, Term, parse_obo
from .selection import METHODS, SelectionConfig, SelectionResult, candidate_order, select
from .similarity import (SimilarityMatrix, build_matrix, jaccard_similarity, lin_similarity,
                         normalized_rank, quantile_threshold)
from .stats import WilcoxonResult, wilcoxon_signed_rank

__all__ = [
    "AnalysisResult", "AnnotationRelease", "BRANCHES", "DomainError", "EXPERIMENTAL_CODES",
    "EmptyReleaseWarning", "EvaluationReport", "GonegError", "METHODS", "NoveltySet", "OntologyDag",
    "ParseError", "SelectionConfig", "SelectionResult", "SimilarityMatrix", "StructureError", "Term",
    "UnknownTermError", "WilcoxonResult", "analyze", "build_matrix", "candidate_order", "categorize",
    "eligible_terms", "false_negatives", "fork_analysis", "jaccard_similarity", "lin_similarity",
    "normalized_rank", "novelty", "novelty_counts", "parse_gaf", "parse_obo", "quantile_threshold",
    "rank_analysis", "run_benchmark", "select", "term_frequency", "tpr_close", "tune_k",
    "wilcoxon_signed_rank",
]
