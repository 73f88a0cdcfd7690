"""Where do novel annotations land relative to a protein's existing ones?

Three analyses over direct-mode novelty between two releases: category
counts (First/Anc/Desc/Sib/Other), normalized similarity ranks of old terms
in the new term's similarity row, and distances from old terms to the fork
point of the new annotation path.
"""

from __future__ import annotations

import csv
import json
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .annotations import AnnotationRelease, NoveltySet, novelty, novelty_counts
from .errors import DomainError
from .ontology import BRANCHES, OntologyDag
from .similarity import SimilarityMatrix, normalized_ranks

CATEGORIES = ("First", "Anc", "Desc", "Sib", "Other")
# a pair satisfying several relations is reported under the first one listed
_PRECEDENCE = ("Desc", "Anc", "Sib", "Other")


@dataclass(frozen=True, order=True)
class CategoryRecord:
    protein: str
    new_term: str
    old_term: str | None
    category: str


@dataclass(frozen=True)
class RankRecord:
    measure: str
    branch: str
    term: str
    protein: str
    old_term: str
    rank: float


@dataclass(frozen=True)
class ForkRecord:
    branch: str
    term: str
    protein: str
    old_term: str
    fork_term: str
    distance: int
    category: str


@dataclass(frozen=True)
class DistributionSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    n: int

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "DistributionSummary":
        arr = np.asarray(list(values), dtype=float)
        if arr.size == 0:
            raise DomainError("cannot summarize an empty sample")
        q1, med, q3 = np.percentile(arr, [25, 50, 75])
        return cls(float(arr.min()), float(q1), float(med), float(q3), float(arr.max()),
                   float(arr.mean()), int(arr.size))


def pair_category(dag: OntologyDag, k: str, s: str) -> str:
    if k in dag.descendants(s):
        return "Desc"
    if k in dag.ancestors(s):
        return "Anc"
    if k in dag.siblings(s):
        return "Sib"
    return "Other"


def categorize(i: str, k: str, old_terms: Iterable[str], dag: OntologyDag) -> list[CategoryRecord]:
    """Categorize the new annotation (i, k) against each of the protein's old terms."""
    old_terms = sorted(set(old_terms))
    if k in old_terms:
        raise DomainError(f"{k} is already among the old annotations of {i}")
    if not old_terms:
        return [CategoryRecord(i, k, None, "First")]
    return [CategoryRecord(i, k, s, pair_category(dag, k, s)) for s in old_terms]


def categorize_novelty(
    sets: Iterable[NoveltySet], old: AnnotationRelease, dag: OntologyDag
) -> list[CategoryRecord]:
    records: list[CategoryRecord] = []
    for ns in sets:
        for i in sorted(ns.proteins):
            old_terms = old.direct_terms(i) if i in old else frozenset()
            records.extend(categorize(i, ns.term, old_terms, dag))
    return records


def _protein_category(cats: Sequence[str]) -> str:
    if "First" in cats:
        return "First"
    return next(c for c in _PRECEDENCE if c in cats)


def category_proportions(
    records: Iterable[CategoryRecord], dag: OntologyDag, unit: str = "pair"
) -> dict[str, dict[str, float]]:
    """Per-branch category proportions averaged (unweighted) across new terms.

    ``unit="pair"`` counts every (protein, old term) pair, First counting
    once; ``unit="protein"`` gives each novel protein the highest-precedence
    category among its pairs.
    """
    if unit not in ("pair", "protein"):
        raise DomainError(f"unit must be 'pair' or 'protein', not {unit!r}")
    by_term: dict[str, dict[str, list[str]]] = defaultdict(lambda: defaultdict(list))
    for rec in records:
        by_term[rec.new_term][rec.protein].append(rec.category)
    if not by_term:
        raise DomainError("no category records")

    per_branch: dict[str, list[np.ndarray]] = defaultdict(list)
    for term, proteins in by_term.items():
        if unit == "pair":
            cats = [c for cs in proteins.values() for c in cs]
        else:
            cats = [_protein_category(cs) for cs in proteins.values()]
        vec = np.array([cats.count(c) for c in CATEGORIES], dtype=float)
        per_branch[dag.branch(term)].append(vec / vec.sum())
    return {
        b: dict(zip(CATEGORIES, (float(v) for v in np.mean(vecs, axis=0))))
        for b, vecs in sorted(per_branch.items())
    }


def rank_analysis(
    sets: Iterable[NoveltySet],
    matrix: SimilarityMatrix,
    old: AnnotationRelease,
    threads: int = 1,
) -> tuple[list[RankRecord], DistributionSummary]:
    """Ranks of old same-branch terms within each new term's similarity row.

    Returns the per-pair records and a summary of the per-term mean ranks.
    """
    dag = old.dag
    work = [ns for ns in sets if ns.term in matrix]

    def one_term(ns: NoveltySet) -> list[RankRecord]:
        pairs = []
        for i in sorted(ns.proteins):
            if i not in old:
                continue
            for s in sorted(old.direct_terms(i)):
                if s != ns.term and dag.branch(s) == matrix.branch:
                    pairs.append((i, s))
        if not pairs:
            return []
        ranks = normalized_ranks(matrix, ns.term, [s for _, s in pairs])
        return [RankRecord(matrix.measure, matrix.branch, ns.term, i, s, float(r))
                for (i, s), r in zip(pairs, ranks)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one_term, work))
    else:
        chunks = [one_term(ns) for ns in work]
    records = [r for chunk in chunks for r in chunk]
    if not records:
        raise DomainError(f"no novel protein has earlier {matrix.branch} annotations")
    term_means = [float(np.mean([r.rank for r in chunk])) for chunk in chunks if chunk]
    return records, DistributionSummary.from_values(term_means)


def fork_point(dag: OntologyDag, k: str, s: str, category: str) -> str:
    if category == "Sib":
        shared = dag.parents(k) & dag.parents(s)
        return min(shared, key=lambda q: (-dag.level(q), q))
    if category == "Other":
        return dag.deepest_fork_ancestor(k, s)
    raise DomainError(f"{category} pairs do not open a new annotation path")


def fork_analysis(records: Iterable[CategoryRecord], dag: OntologyDag) -> list[ForkRecord]:
    """Longest-path distance from each Sib/Other old term to its fork point."""
    out = []
    for rec in records:
        if rec.category not in ("Sib", "Other"):
            continue
        q = fork_point(dag, rec.new_term, rec.old_term, rec.category)
        out.append(ForkRecord(dag.branch(rec.new_term), rec.new_term, rec.protein, rec.old_term,
                              q, dag.longest_path_distance(q, rec.old_term), rec.category))
    return out


def fork_summaries(forks: Iterable[ForkRecord]) -> dict[str, dict[str, dict]]:
    groups: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    for f in forks:
        groups[f.branch]["all"].append(f.distance)
        groups[f.branch][f.category].append(f.distance)
    return {
        b: {subset: asdict(DistributionSummary.from_values(v)) for subset, v in sorted(g.items())}
        for b, g in sorted(groups.items())
    }


@dataclass
class AnalysisResult:
    categories: list[CategoryRecord]
    ranks: list[RankRecord]
    forks: list[ForkRecord]
    summary: dict = field(default_factory=dict)

    def write(self, outdir: str | os.PathLike) -> None:
        os.makedirs(outdir, exist_ok=True)
        _write_csv(os.path.join(outdir, "categories.csv"),
                   ["term", "protein", "old_term", "category"],
                   ([r.new_term, r.protein, r.old_term or "", r.category] for r in self.categories))
        _write_csv(os.path.join(outdir, "ranks.csv"),
                   ["branch", "term", "protein", "old_term", "rank", "measure"],
                   ([r.branch, r.term, r.protein, r.old_term, repr(r.rank), r.measure] for r in self.ranks))
        _write_csv(os.path.join(outdir, "forks.csv"),
                   ["branch", "term", "old_term", "fork_term", "distance", "protein", "category"],
                   ([f.branch, f.term, f.old_term, f.fork_term, f.distance, f.protein, f.category]
                    for f in self.forks))
        with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.summary, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def analyze(
    old: AnnotationRelease,
    new: AnnotationRelease,
    dag: OntologyDag,
    matrices: Mapping[tuple[str, str], SimilarityMatrix],
    branches: Sequence[str] = BRANCHES,
    threads: int = 1,
) -> AnalysisResult:
    """Run all three analyses; ``matrices`` maps (measure, branch) to the old-release matrix."""
    sets = [ns for ns in novelty(old, new, "direct") if dag.branch(ns.term) in branches]
    if not sets:
        raise DomainError("no novel annotations between the two releases")
    records = categorize_novelty(sets, old, dag)
    forks = fork_analysis(records, dag)

    ranks: list[RankRecord] = []
    rank_summary: dict[str, dict[str, dict]] = defaultdict(dict)
    for (measure, branch), matrix in sorted(matrices.items()):
        if branch not in branches:
            continue
        try:
            recs, summ = rank_analysis(sets, matrix, old, threads)
        except DomainError:
            continue
        ranks.extend(recs)
        rank_summary[measure][branch] = asdict(summ)

    counts = novelty_counts(sets, dag)
    summary = {
        "releases": {"old": old.label, "new": new.label},
        "novelty": {b: counts[b] for b in branches},
        "categories": {
            "pair": category_proportions(records, dag, "pair"),
            "protein": category_proportions(records, dag, "protein"),
        },
        "ranks": dict(rank_summary),
        "forks": fork_summaries(forks) if forks else {},
    }
    return AnalysisResult(records, ranks, forks, summary)
