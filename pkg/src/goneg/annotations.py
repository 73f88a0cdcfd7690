"""GAF ingestion, true-path-rule closure and per-term novelty sets."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import DomainError, EmptyReleaseWarning, ParseError, UnknownTermError
from .ontology import BRANCHES, OntologyDag
from .textio import Source, open_text, source_name

LOGGER = logging.getLogger(__name__)

EXPERIMENTAL_CODES = frozenset({"EXP", "IDA", "IPI", "IMP", "IGI", "IEP"})

# 0-based GAF columns
_COL_OBJECT_ID = 1
_COL_QUALIFIER = 3
_COL_GO_ID = 4
_COL_EVIDENCE = 6
_MIN_COLUMNS = 15
_MAX_COLUMNS = 17


class AnnotationRelease:
    """Direct protein x term annotations of one release, indexed against a DAG.

    ``direct`` is a boolean CSR matrix with one row per protein (sorted
    accessions) and one column per DAG term (``dag.terms`` order). The
    true-path-rule closure is computed on first access of ``closed``.
    """

    def __init__(
        self,
        label: str,
        dag: OntologyDag,
        proteins: Sequence[str],
        direct: sparse.spmatrix,
        evidence_filter: Iterable[str] = EXPERIMENTAL_CODES,
        stats: Mapping[str, int] | None = None,
    ):
        self.label = label
        self.dag = dag
        self.proteins: tuple[str, ...] = tuple(proteins)
        self._protein_index = {p: i for i, p in enumerate(self.proteins)}
        if len(self._protein_index) != len(self.proteins):
            raise ValueError("duplicate protein identifiers")
        direct = sparse.csr_matrix(direct, dtype=bool)
        if direct.shape != (len(self.proteins), len(dag)):
            raise ValueError(f"matrix shape {direct.shape} does not match {len(self.proteins)} x {len(dag)}")
        direct.eliminate_zeros()
        direct.sort_indices()
        self.direct = direct
        self.evidence_filter = frozenset(evidence_filter)
        self.stats = dict(stats or {})

    @classmethod
    def from_pairs(
        cls,
        label: str,
        dag: OntologyDag,
        pairs: Iterable[tuple[str, str]],
        proteins: Iterable[str] | None = None,
        evidence_filter: Iterable[str] = EXPERIMENTAL_CODES,
        stats: Mapping[str, int] | None = None,
    ) -> "AnnotationRelease":
        pairs = list(pairs)
        universe = set(proteins or ())
        universe.update(p for p, _ in pairs)
        ordered = sorted(universe)
        pidx = {p: i for i, p in enumerate(ordered)}
        rows = np.fromiter((pidx[p] for p, _ in pairs), dtype=np.int64, count=len(pairs))
        cols = np.fromiter((dag.index(t) for _, t in pairs), dtype=np.int64, count=len(pairs))
        mat = sparse.coo_matrix(
            (np.ones(len(pairs), dtype=bool), (rows, cols)), shape=(len(ordered), len(dag))
        ).tocsr()
        return cls(label, dag, ordered, mat, evidence_filter, stats)

    def __repr__(self) -> str:
        return f"AnnotationRelease({self.label!r}, proteins={self.n}, direct={self.direct.nnz})"

    @property
    def n(self) -> int:
        return len(self.proteins)

    def protein_index(self, protein: str) -> int:
        try:
            return self._protein_index[protein]
        except KeyError:
            raise KeyError(f"unknown protein {protein!r}") from None

    def __contains__(self, protein: object) -> bool:
        return protein in self._protein_index

    @cached_property
    def closed(self) -> sparse.csr_matrix:
        return tpr_close(self, self.dag)

    def _row_terms(self, mat: sparse.csr_matrix, protein: str) -> frozenset[str]:
        i = self.protein_index(protein)
        cols = mat.indices[mat.indptr[i]:mat.indptr[i + 1]]
        return frozenset(self.dag.terms[j] for j in cols)

    def direct_terms(self, protein: str) -> frozenset[str]:
        return self._row_terms(self.direct, protein)

    def closed_terms(self, protein: str) -> frozenset[str]:
        return self._row_terms(self.closed, protein)

    def pairs(self) -> list[tuple[str, str]]:
        coo = self.direct.tocoo()
        return sorted((self.proteins[i], self.dag.terms[j]) for i, j in zip(coo.row, coo.col))

    @cached_property
    def _closed_csc(self) -> sparse.csc_matrix:
        return self.closed.tocsc()

    @cached_property
    def _direct_csc(self) -> sparse.csc_matrix:
        return self.direct.tocsc()

    def column(self, term: str, closed: bool = True) -> np.ndarray:
        """Boolean membership vector of ``term`` over ``self.proteins``."""
        mat = self._closed_csc if closed else self._direct_csc
        j = self.dag.index(term)
        out = np.zeros(self.n, dtype=bool)
        out[mat.indices[mat.indptr[j]:mat.indptr[j + 1]]] = True
        return out

    @cached_property
    def closed_counts(self) -> np.ndarray:
        """Number of proteins annotated to each term after closure."""
        return np.asarray(self.closed.sum(axis=0)).ravel().astype(np.int64)

    @cached_property
    def _branch_counts(self) -> dict[str, int]:
        closed = self.closed.tocsc()
        out = {}
        for branch in BRANCHES:
            cols = self.dag.branch_indices(branch)
            hit = closed[:, cols].getnnz(axis=1) if len(cols) else np.zeros(0)
            out[branch] = int(np.count_nonzero(hit))
        return out

    def branch_protein_count(self, branch: str) -> int:
        """Proteins with at least one annotation in ``branch``."""
        return self._branch_counts[branch]

    def reindexed(self, proteins: Sequence[str]) -> "AnnotationRelease":
        """Same annotations over a larger protein universe (extra rows all zero)."""
        target = tuple(proteins)
        tidx = {p: i for i, p in enumerate(target)}
        missing = [p for p in self.proteins if p not in tidx]
        if missing:
            raise ValueError(f"target universe lacks {len(missing)} proteins, e.g. {missing[0]!r}")
        if target == self.proteins:
            return self
        coo = self.direct.tocoo()
        remap = np.array([tidx[p] for p in self.proteins], dtype=np.int64)
        mat = sparse.coo_matrix(
            (coo.data, (remap[coo.row] if len(coo.row) else coo.row, coo.col)),
            shape=(len(target), len(self.dag)),
        ).tocsr()
        return AnnotationRelease(self.label, self.dag, target, mat, self.evidence_filter, self.stats)

    def without(self, rows: np.ndarray, cols: np.ndarray) -> "AnnotationRelease":
        """Copy with the direct annotations at (rows[t], cols[t]) removed."""
        coo = self.direct.tocoo()
        m = len(self.dag)
        drop = np.asarray(rows, dtype=np.int64) * m + np.asarray(cols, dtype=np.int64)
        keep = ~np.isin(coo.row.astype(np.int64) * m + coo.col, drop)
        mat = sparse.coo_matrix(
            (coo.data[keep], (coo.row[keep], coo.col[keep])), shape=self.direct.shape
        ).tocsr()
        return AnnotationRelease(
            f"{self.label}-masked", self.dag, self.proteins, mat, self.evidence_filter
        )


@dataclass(frozen=True)
class NoveltySet:
    term: str
    proteins: frozenset[str] = field(default_factory=frozenset)


def parse_gaf(
    stream: Source,
    dag: OntologyDag,
    evidence_filter: Iterable[str] = EXPERIMENTAL_CODES,
    label: str | None = None,
    synonyms: Mapping[str, str] | None = None,
) -> AnnotationRelease:
    """Read a GAF 2.x file, keeping non-negated rows with an accepted evidence code.

    Terms unknown to the DAG (obsolete or newer than the structure file) are
    skipped and counted in ``release.stats``. Alternate GO ids resolve to
    their primary term. ``synonyms`` maps raw column-2 identifiers onto
    canonical protein ids.
    """
    evidence_filter = frozenset(evidence_filter)
    if not evidence_filter:
        raise DomainError("evidence filter must not be empty")
    name = source_name(stream)
    synonyms = synonyms or {}
    stats = dict(rows=0, kept=0, negated=0, evidence=0, unknown_term=0, duplicate=0)
    seen: set[tuple[str, str]] = set()

    with open_text(stream) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("!"):
                continue
            cols = line.split("\t")
            if not _MIN_COLUMNS <= len(cols) <= _MAX_COLUMNS:
                raise ParseError(
                    f"expected {_MAX_COLUMNS} tab-separated columns, found {len(cols)}", lineno, name
                )
            stats["rows"] += 1
            qualifiers = {q.strip().upper() for q in cols[_COL_QUALIFIER].split("|")}
            if "NOT" in qualifiers:
                stats["negated"] += 1
                continue
            if cols[_COL_EVIDENCE].strip() not in evidence_filter:
                stats["evidence"] += 1
                continue
            protein = cols[_COL_OBJECT_ID].strip()
            if not protein:
                raise ParseError("empty DB object id", lineno, name)
            protein = synonyms.get(protein, protein)
            try:
                term = dag.resolve(cols[_COL_GO_ID].strip())
            except UnknownTermError:
                stats["unknown_term"] += 1
                continue
            key = (protein, term)
            if key in seen:
                stats["duplicate"] += 1
                continue
            seen.add(key)
            stats["kept"] += 1

    if stats["unknown_term"]:
        LOGGER.warning("%s: skipped %d rows with obsolete or unknown terms", name or "GAF", stats["unknown_term"])
    if not seen:
        warnings.warn(f"{name or 'GAF input'}: no annotations survived filtering", EmptyReleaseWarning, stacklevel=2)
    return AnnotationRelease.from_pairs(label or name or "release", dag, sorted(seen), None, evidence_filter, stats)


def tpr_close(release: AnnotationRelease, dag: OntologyDag) -> sparse.csr_matrix:
    """Propagate every direct annotation to all ancestors of its term."""
    m = len(dag)
    up = (dag.ancestor_matrix + sparse.identity(m, dtype=bool, format="csr")).astype(np.int32)
    closed = (release.direct.astype(np.int32) @ up) > 0
    closed = sparse.csr_matrix(closed, dtype=bool)
    closed.sort_indices()
    return closed


def align(old: AnnotationRelease, new: AnnotationRelease) -> tuple[AnnotationRelease, AnnotationRelease]:
    """Reindex both releases on the union of their proteins."""
    if old.dag is not new.dag:
        raise DomainError("releases are indexed against different ontologies")
    universe = sorted(set(old.proteins) | set(new.proteins))
    return old.reindexed(universe), new.reindexed(universe)


def novelty_matrix(old: AnnotationRelease, new: AnnotationRelease, mode: str = "direct") -> tuple[tuple[str, ...], sparse.csc_matrix]:
    """Boolean proteins x terms matrix of annotations present in ``new`` only."""
    if mode not in ("direct", "closed"):
        raise DomainError(f"mode must be 'direct' or 'closed', not {mode!r}")
    old, new = align(old, new)
    a = old.direct if mode == "direct" else old.closed
    b = new.direct if mode == "direct" else new.closed
    diff = b.astype(np.int8) - b.multiply(a).astype(np.int8)
    diff = sparse.csc_matrix(diff > 0)
    diff.sort_indices()
    return old.proteins, diff


def novelty(old: AnnotationRelease, new: AnnotationRelease, mode: str = "direct") -> list[NoveltySet]:
    """One :class:`NoveltySet` per term that gained proteins, sorted by term."""
    proteins, diff = novelty_matrix(old, new, mode)
    out = []
    for j in np.flatnonzero(np.diff(diff.indptr)):
        rows = diff.indices[diff.indptr[j]:diff.indptr[j + 1]]
        out.append(NoveltySet(old.dag.terms[j], frozenset(proteins[i] for i in rows)))
    return out


def novelty_counts(sets: Iterable[NoveltySet], dag: OntologyDag) -> dict[str, dict[str, int]]:
    """Per-branch number of novel proteins and of novel (protein, term) pairs."""
    proteins: dict[str, set[str]] = {b: set() for b in BRANCHES}
    pairs = {b: 0 for b in BRANCHES}
    terms = {b: 0 for b in BRANCHES}
    for ns in sets:
        b = dag.branch(ns.term)
        proteins[b] |= ns.proteins
        pairs[b] += len(ns.proteins)
        terms[b] += 1
    return {b: {"proteins": len(proteins[b]), "annotations": pairs[b], "terms": terms[b]} for b in BRANCHES}


def term_frequency(release: AnnotationRelease, dag: OntologyDag, k: str) -> float:
    """Fraction of the branch's annotated proteins carrying ``k`` after closure."""
    j = dag.index(k)
    n = release.branch_protein_count(dag.branch(k))
    if n == 0:
        raise DomainError(f"no protein is annotated in branch {dag.branch(k)}")
    return int(release.closed_counts[j]) / n


def branch_frequencies(release: AnnotationRelease, branch: str) -> np.ndarray:
    """Term frequencies for every term of ``branch`` in ``dag.branch_terms`` order."""
    n = release.branch_protein_count(branch)
    cols = release.dag.branch_indices(branch)
    if n == 0:
        return np.zeros(len(cols))
    return release.closed_counts[cols] / n
