"""Negative example selection heuristics under a fixed budget.

Every method produces a full candidate order over the proteins not
annotated to the term (closed old release). The first ``n_pool`` entries
come from the heuristic itself; the rest is uniform random fill. Taking a
prefix of length B gives the selection for budget B, so selections for
growing budgets are nested.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .annotations import AnnotationRelease
from .errors import DomainError
from .ontology import OntologyDag
from .similarity import SimilarityMatrix, quantile_threshold

METHODS = ("nsfs-j", "nsfs-l", "sibling", "noancdesc", "snob", "random")
NSFS_MEASURE = {"nsfs-j": "jaccard", "nsfs-l": "lin"}
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SelectionConfig:
    method: str
    budget: int
    K: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.budget < 1:
            raise DomainError("budget must be a positive integer")
        if (self.K is not None) != (self.method in NSFS_MEASURE):
            raise DomainError("K is required for NSFS methods and not accepted otherwise")
        if self.K is not None and not 0 < self.K < 1:
            raise DomainError("K must lie strictly between 0 and 1")


@dataclass(frozen=True)
class SelectionResult:
    term: str
    negatives: tuple[str, ...]
    n_heuristic: int
    n_filled: int


@dataclass(frozen=True)
class CandidateOrder:
    term: str
    order: np.ndarray  # protein row indices, selection order
    n_pool: int

    def take(self, budget: int, proteins: Sequence[str]) -> SelectionResult:
        chosen = self.order[:budget]
        n_heur = min(budget, self.n_pool, len(chosen))
        return SelectionResult(self.term, tuple(proteins[i] for i in chosen), n_heur, len(chosen) - n_heur)


def term_rng(seed: int, term: str, repeat: int = 0) -> np.random.Generator:
    """Independent stream per (seed, term, repeat); order of evaluation is irrelevant."""
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, int(term[3:]), repeat]))


# pools: boolean masks over release.proteins

def _candidates(release: AnnotationRelease, k: str) -> np.ndarray:
    return ~release.column(k, closed=True)


def _annotated_any(mat, cols: np.ndarray) -> np.ndarray:
    if len(cols) == 0:
        return np.zeros(mat.shape[0], dtype=bool)
    return mat[:, cols].getnnz(axis=1) > 0


def nsfs_pool(k: str, release: AnnotationRelease, matrix: SimilarityMatrix, K: float) -> np.ndarray:
    """Unannotated proteins with no annotation to a term more similar to ``k`` than the K-quantile."""
    if k not in matrix:
        raise DomainError(f"{k} is not in the {matrix.branch} similarity matrix")
    row = matrix.row(k)
    threshold = quantile_threshold(row, K)
    dag = release.dag
    hot = np.array([dag.index(matrix.terms[p]) for p in np.flatnonzero(row > threshold)], dtype=np.int64)
    return _candidates(release, k) & ~_annotated_any(release.closed, hot)


def sibling_pool(k: str, release: AnnotationRelease, dag: OntologyDag) -> np.ndarray:
    cols = np.array(sorted(dag.index(s) for s in dag.siblings(k)), dtype=np.int64)
    return _candidates(release, k) & _annotated_any(release.closed, cols)


def noancdesc_pool(k: str, release: AnnotationRelease, dag: OntologyDag) -> np.ndarray:
    """No direct annotation to any ancestor or descendant of ``k``."""
    related = dag.ancestors(k) | dag.descendants(k)
    cols = np.array(sorted(dag.index(s) for s in related), dtype=np.int64)
    return _candidates(release, k) & ~_annotated_any(release.direct, cols)


def snob_scores(k: str, release: AnnotationRelease, mode: str = "closed") -> np.ndarray:
    """Mean empirical P(k | s) over each protein's annotated terms s (0 if none)."""
    if mode not in ("closed", "direct"):
        raise DomainError(f"mode must be 'closed' or 'direct', not {mode!r}")
    mat = release.closed if mode == "closed" else release.direct
    mat = mat.astype(np.float64)
    yk = release.column(k, closed=True).astype(np.float64)
    per_term = np.asarray(mat.sum(axis=0)).ravel()
    co = mat.T @ yk
    p = np.divide(co, per_term, out=np.zeros_like(co), where=per_term > 0)
    total = mat @ p
    size = np.asarray(mat.sum(axis=1)).ravel()
    sigma = np.divide(total, size, out=np.zeros_like(total), where=size > 0)
    # equal scores reached through different summation orders must tie
    return np.round(sigma, 12)


# candidate orders

def _set_order(term: str, pool: np.ndarray, candidates: np.ndarray, rng: np.random.Generator) -> CandidateOrder:
    heur = np.flatnonzero(pool & candidates)
    rest = np.flatnonzero(candidates & ~pool)
    return CandidateOrder(term, np.concatenate([rng.permutation(heur), rng.permutation(rest)]), len(heur))


def candidate_orders(
    method: str,
    k: str,
    release: AnnotationRelease,
    dag: OntologyDag,
    matrix: SimilarityMatrix | None = None,
    K: float | None = None,
    seed: int = 0,
    repeats: Sequence[int] = (0,),
    snob_mode: str = "closed",
) -> list[CandidateOrder]:
    """One candidate order per repeat index; the heuristic pool is computed once."""
    candidates = _candidates(release, k)
    if method == "snob":
        sigma = snob_scores(k, release, snob_mode)
        cand_idx = np.flatnonzero(candidates)
        out = []
        for r in repeats:
            shuffled = term_rng(seed, k, r).permutation(cand_idx)
            order = shuffled[np.argsort(sigma[shuffled], kind="stable")]
            out.append(CandidateOrder(k, order, len(order)))
        return out
    if method in NSFS_MEASURE:
        if matrix is None or K is None:
            raise DomainError(f"{method} needs a similarity matrix and K")
        if matrix.measure != NSFS_MEASURE[method]:
            raise DomainError(f"{method} needs a {NSFS_MEASURE[method]} matrix, got {matrix.measure}")
        pool = nsfs_pool(k, release, matrix, K)
    elif method == "sibling":
        pool = sibling_pool(k, release, dag)
    elif method == "noancdesc":
        pool = noancdesc_pool(k, release, dag)
    elif method == "random":
        pool = candidates
    else:
        raise DomainError(f"unknown method {method!r}")
    return [_set_order(k, pool, candidates, term_rng(seed, k, r)) for r in repeats]


def candidate_order(
    method: str,
    k: str,
    release: AnnotationRelease,
    dag: OntologyDag,
    matrix: SimilarityMatrix | None = None,
    K: float | None = None,
    seed: int = 0,
    repeat: int = 0,
    snob_mode: str = "closed",
) -> CandidateOrder:
    return candidate_orders(method, k, release, dag, matrix, K, seed, (repeat,), snob_mode)[0]


def select(
    config: SelectionConfig,
    k: str,
    release: AnnotationRelease,
    dag: OntologyDag,
    matrix: SimilarityMatrix | None = None,
) -> SelectionResult:
    order = candidate_order(config.method, k, release, dag, matrix, config.K, config.seed)
    return order.take(config.budget, release.proteins)


def select_nsfs(k, release, matrix, K, B, seed) -> SelectionResult:
    method = "nsfs-j" if matrix.measure == "jaccard" else "nsfs-l"
    return select(SelectionConfig(method, B, K, seed), k, release, release.dag, matrix)


def select_sibling(k, release, dag, B, seed) -> SelectionResult:
    return select(SelectionConfig("sibling", B, None, seed), k, release, dag)


def select_noancdesc(k, release, dag, B, seed) -> SelectionResult:
    return select(SelectionConfig("noancdesc", B, None, seed), k, release, dag)


def select_snob(k, release, B, seed) -> SelectionResult:
    return select(SelectionConfig("snob", B, None, seed), k, release, release.dag)


def select_random(k, release, B, seed) -> SelectionResult:
    return select(SelectionConfig("random", B, None, seed), k, release, release.dag)
