"""Temporal-holdout benchmark of the negative selection heuristics.

Selections are made on the older release and scored against the newer one:
a selected protein the newer release annotates to the term (after closure)
is a false negative.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .annotations import AnnotationRelease, align, novelty_matrix
from .errors import DomainError
from .ontology import BRANCHES, OntologyDag
from .selection import METHODS, NSFS_MEASURE, SelectionResult, candidate_orders
from .similarity import SimilarityMatrix, build_matrix
from .stats import wilcoxon_signed_rank

LOGGER = logging.getLogger(__name__)

DEFAULT_BUDGETS = (500, 750, 1000, 1250, 1500)
DEFAULT_K_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
DEFAULT_REPEATS = 10
DEFAULT_MASK_FRACTION = 0.1


def false_negatives(result: SelectionResult, new: AnnotationRelease, k: str, closed: bool = True) -> int:
    positives = new.column(k, closed=closed)
    return sum(1 for p in result.negatives if p in new and positives[new.protein_index(p)])


def eligible_terms(old: AnnotationRelease, new: AnnotationRelease, branch: str) -> list[str]:
    """Terms of ``branch`` that gained at least one protein (closed annotations)."""
    _, diff = novelty_matrix(old, new, "closed")
    dag = old.dag
    cols = dag.branch_indices(branch)
    counts = np.diff(diff.indptr)[cols]
    return [dag.terms[j] for j in cols[counts > 0]]


def _fn_curve(order: np.ndarray, positives: np.ndarray, budgets: Sequence[int]) -> np.ndarray:
    hits = np.concatenate([[0], np.cumsum(positives[order])])
    return np.array([hits[min(b, len(order))] for b in budgets], dtype=float)


def _parallel_map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# K tuning

def k_sweep_pseudo(
    old: AnnotationRelease,
    dag: OntologyDag,
    matrix: SimilarityMatrix,
    grid: Sequence[float],
    B: int,
    seed: int,
    mask_fraction: float = DEFAULT_MASK_FRACTION,
    repeats: int = 1,
    threads: int = 1,
) -> dict[float, float]:
    """Mean pseudo-false-negatives of NSFS per K on an internal holdout of ``old``.

    A random fraction of the branch's direct annotations is hidden; NSFS runs
    on the masked release (with a similarity matrix rebuilt on it) and every
    selected protein carrying a hidden annotation counts as a pseudo-FN.
    """
    if not grid:
        raise DomainError("K grid is empty")
    if not 0 < mask_fraction < 1:
        raise DomainError("mask fraction must lie strictly between 0 and 1; nothing to hold out")
    branch, measure = matrix.branch, matrix.measure
    method = "nsfs-j" if measure == "jaccard" else "nsfs-l"
    coo = old.direct.tocoo()
    in_branch = np.isin(coo.col, dag.branch_indices(branch))
    rows, cols = coo.row[in_branch], coo.col[in_branch]
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    n_mask = int(round(mask_fraction * len(rows)))
    if n_mask == 0:
        raise DomainError("masking selects no annotation; nothing to hold out")

    totals = {K: [] for K in grid}
    for rep in range(repeats):
        rng = np.random.default_rng(np.random.SeedSequence([seed & ((1 << 64) - 1), 0x6B74, rep]))
        pick = rng.choice(len(rows), size=n_mask, replace=False)
        masked = old.without(rows[pick], cols[pick])
        masked_matrix = build_matrix(measure, masked, dag, branch, threads)
        terms = eligible_terms(masked, old, branch)
        if not terms:
            continue
        for K in grid:
            def pseudo_fn(k: str) -> float:
                positives = old.column(k) & ~masked.column(k)
                o = candidate_orders(method, k, masked, dag, masked_matrix, K, seed, (rep,))[0]
                return float(np.count_nonzero(positives[o.order[:B]]))
            totals[K].extend(_parallel_map(pseudo_fn, terms, threads))
    if not any(totals.values()):
        raise DomainError("internal holdout produced no pseudo-positive terms")
    return {K: float(np.mean(v)) for K, v in totals.items()}


def tune_k(
    old: AnnotationRelease,
    dag: OntologyDag,
    matrix: SimilarityMatrix,
    grid: Sequence[float] = DEFAULT_K_GRID,
    B: int = 500,
    seed: int = 0,
    mask_fraction: float = DEFAULT_MASK_FRACTION,
    repeats: int = 1,
    threads: int = 1,
) -> float:
    """Grid value of K with the fewest internal-holdout pseudo-FNs (ties go to the larger K)."""
    if not grid:
        raise DomainError("K grid is empty")
    if len(grid) == 1:
        return float(grid[0])
    scores = k_sweep_pseudo(old, dag, matrix, grid, B, seed, mask_fraction, repeats, threads)
    return float(min(scores, key=lambda K: (scores[K], -K)))


# benchmark

@dataclass
class EvaluationReport:
    rows: list[tuple[str, str, int, str, float]]  # branch, method, budget, term, mean FN
    means: dict[str, dict[str, dict[int, float]]]
    pvalues: dict[str, dict[int, dict[str, dict[str, float]]]]
    metadata: dict = field(default_factory=dict)

    def curves(self) -> dict[str, dict[str, list[float]]]:
        """Mean FN per budget for every branch and method, in budget order."""
        return {b: {m: [v for _, v in sorted(per.items())] for m, per in ms.items()}
                for b, ms in self.means.items()}

    def to_json(self) -> dict:
        return {
            "config": self.metadata,
            "means": {b: {m: {str(B): v for B, v in per.items()} for m, per in ms.items()}
                      for b, ms in self.means.items()},
            "pvalues": {b: {str(B): ps for B, ps in per.items()} for b, per in self.pvalues.items()},
            "curves": self.curves(),
        }

    def write(self, outdir: str | os.PathLike) -> None:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "fn_per_term.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["branch", "method", "budget", "term", "fn"])
            for branch, method, budget, term, fn in self.rows:
                writer.writerow([branch, method, budget, term, repr(fn)])
        with open(os.path.join(outdir, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def run_benchmark(
    methods: Sequence[str],
    budgets: Sequence[int],
    old: AnnotationRelease,
    new: AnnotationRelease,
    dag: OntologyDag,
    seed: int = 0,
    repeats: int = DEFAULT_REPEATS,
    branches: Sequence[str] = BRANCHES,
    k_values: Mapping[str, float] | None = None,
    k_grid: Sequence[float] = DEFAULT_K_GRID,
    mask_fraction: float = DEFAULT_MASK_FRACTION,
    matrices: Mapping[tuple[str, str], SimilarityMatrix] | None = None,
    fn_mode: str = "closed",
    snob_mode: str = "closed",
    threads: int = 1,
) -> EvaluationReport:
    """False negatives per term for each method and budget, with pairwise Wilcoxon tests.

    ``k_values`` fixes K per NSFS method; missing ones are tuned on the old
    release with :func:`tune_k` at the smallest budget. Random choices are
    averaged over ``repeats`` seeded streams.
    """
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise DomainError(f"unknown methods: {', '.join(unknown)}")
    if not methods or not budgets:
        raise DomainError("need at least one method and one budget")
    budgets = sorted(set(int(b) for b in budgets))
    if budgets[0] < 1:
        raise DomainError("budgets must be positive")
    if fn_mode not in ("closed", "direct"):
        raise DomainError(f"fn_mode must be 'closed' or 'direct', not {fn_mode!r}")
    k_values = dict(k_values or {})
    matrices = dict(matrices or {})
    old_a, new_a = align(old, new)

    rows: list[tuple[str, str, int, str, float]] = []
    means: dict[str, dict[str, dict[int, float]]] = {}
    pvalues: dict[str, dict[int, dict[str, dict[str, float]]]] = {}
    used_k: dict[str, dict[str, float]] = {}
    n_terms: dict[str, int] = {}

    for branch in branches:
        terms = eligible_terms(old_a, new_a, branch)
        n_terms[branch] = len(terms)
        if not terms:
            LOGGER.info("branch %s: no eligible terms", branch)
            continue
        branch_k: dict[str, float] = {}
        branch_mats: dict[str, SimilarityMatrix] = {}
        for method in methods:
            measure = NSFS_MEASURE.get(method)
            if measure is None:
                continue
            mat = matrices.get((measure, branch))
            if mat is None:
                mat = build_matrix(measure, old_a, dag, branch, threads)
                matrices[(measure, branch)] = mat
            branch_mats[method] = mat
            if method in k_values:
                branch_k[method] = float(k_values[method])
            else:
                branch_k[method] = tune_k(old_a, dag, mat, k_grid, budgets[0], seed, mask_fraction, 1, threads)
                LOGGER.info("branch %s: tuned K=%s for %s", branch, branch_k[method], method)
        used_k[branch] = branch_k

        def term_curves(k: str) -> dict[str, np.ndarray]:
            positives = new_a.column(k, closed=fn_mode == "closed")
            out = {}
            for method in methods:
                orders = candidate_orders(method, k, old_a, dag, branch_mats.get(method),
                                          branch_k.get(method), seed, range(repeats), snob_mode)
                out[method] = np.mean([_fn_curve(o.order, positives, budgets) for o in orders], axis=0)
            return out

        per_term = _parallel_map(term_curves, terms, threads)
        table = {m: np.array([c[m] for c in per_term]) for m in methods}  # terms x budgets
        for method in methods:
            for bi, budget in enumerate(budgets):
                for ti, term in enumerate(terms):
                    rows.append((branch, method, budget, term, float(table[method][ti, bi])))
        means[branch] = {m: {B: float(table[m][:, bi].mean()) for bi, B in enumerate(budgets)}
                         for m in methods}
        pvalues[branch] = {}
        for bi, budget in enumerate(budgets):
            ps: dict[str, dict[str, float]] = {m: {} for m in methods}
            for a, b in itertools.combinations(methods, 2):
                p = wilcoxon_signed_rank(table[a][:, bi], table[b][:, bi]).pvalue
                ps[a][b] = p
                ps[b][a] = p
            pvalues[branch][budget] = ps

    if not means:
        raise DomainError("no eligible terms: no term gained annotations between the releases")
    metadata = {
        "releases": {"old": old.label, "new": new.label},
        "methods": list(methods),
        "budgets": budgets,
        "branches": [b for b in branches],
        "seed": seed,
        "repeats": repeats,
        "k": used_k,
        "eligible_terms": n_terms,
        "fn_mode": fn_mode,
        "snob_mode": snob_mode,
    }
    return EvaluationReport(rows, means, pvalues, metadata)


def sweep_k(
    measure: str,
    old: AnnotationRelease,
    new: AnnotationRelease,
    dag: OntologyDag,
    branch: str,
    grid: Sequence[float] = DEFAULT_K_GRID,
    budgets: Sequence[int] = DEFAULT_BUDGETS,
    seed: int = 0,
    repeats: int = DEFAULT_REPEATS,
    matrix: SimilarityMatrix | None = None,
    threads: int = 1,
) -> dict[float, dict[int, float]]:
    """Temporal-holdout mean FN of NSFS for each fixed K in ``grid`` and each budget."""
    method = "nsfs-j" if measure == "jaccard" else "nsfs-l"
    if matrix is None:
        matrix = build_matrix(measure, old, dag, branch, threads)
    out = {}
    for K in grid:
        report = run_benchmark([method], budgets, old, new, dag, seed, repeats, [branch],
                               k_values={method: K}, matrices={(measure, branch): matrix},
                               threads=threads)
        out[float(K)] = report.means[branch][method]
    return out
