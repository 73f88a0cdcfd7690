"""Term-term similarity (Lin, Jaccard), normalized ranks and quantile thresholds.

Matrices are built per branch over the TPR-closed annotations of one
release. Terms nobody is annotated to have similarity 0 with every term
(including themselves), so only the annotated ("active") block is stored.
"""

from __future__ import annotations

import csv
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .annotations import AnnotationRelease, term_frequency
from .errors import DomainError, ParseError
from .ontology import OntologyDag

MEASURES = ("lin", "jaccard")


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    measure: str
    branch: str
    terms: tuple[str, ...]
    active: np.ndarray  # positions in ``terms`` carrying the stored block
    values: np.ndarray  # len(active) x len(active)

    def __post_init__(self):
        pos = {t: i for i, t in enumerate(self.terms)}
        slot = np.full(len(self.terms), -1, dtype=np.int64)
        slot[self.active] = np.arange(len(self.active))
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "_slot", slot)

    @property
    def m(self) -> int:
        return len(self.terms)

    def position(self, term: str) -> int:
        try:
            return self._pos[term]
        except KeyError:
            raise DomainError(f"{term} is not a {self.branch} term") from None

    def __contains__(self, term: object) -> bool:
        return term in self._pos

    def value(self, k: str, r: str) -> float:
        a, b = self._slot[self.position(k)], self._slot[self.position(r)]
        if a < 0 or b < 0:
            return 0.0
        return float(self.values[a, b])

    def row(self, k: str) -> np.ndarray:
        """Full similarity vector of ``k`` against every branch term."""
        out = np.zeros(self.m)
        a = self._slot[self.position(k)]
        if a >= 0:
            out[self.active] = self.values[a]
        return out

    def dense(self) -> np.ndarray:
        out = np.zeros((self.m, self.m))
        out[np.ix_(self.active, self.active)] = self.values
        return out


# single pairs

def lin_similarity(k: str, r: str, release: AnnotationRelease, dag: OntologyDag) -> float:
    """Lin similarity through the most informative common ancestor.

    Degenerate cases: an unannotated term gives 0; a term with frequency 1
    has similarity 1 with itself and 0 with any other term.
    """
    if dag.branch(k) != dag.branch(r):
        return 0.0
    try:
        nu_k = term_frequency(release, dag, k)
        nu_r = term_frequency(release, dag, r)
    except DomainError:
        return 0.0
    if nu_k == 0 or nu_r == 0:
        return 0.0
    if k == r:
        return 1.0
    common = (dag.ancestors(k) | {k}) & (dag.ancestors(r) | {r})
    if not common:
        return 0.0
    nu_ma = min(term_frequency(release, dag, q) for q in common)
    denom = math.log(nu_k) + math.log(nu_r)
    if denom == 0:
        return 0.0
    return min(1.0, max(0.0, 2 * math.log(nu_ma) / denom)) + 0.0


def jaccard_similarity(k: str, r: str, release: AnnotationRelease) -> float:
    """Shared over combined annotated proteins (after closure); 0 if neither is used."""
    a = release.column(k)
    b = release.column(r)
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


# matrices

def _active_block(release: AnnotationRelease, dag: OntologyDag, branch: str):
    cols = dag.branch_indices(branch)
    counts = release.closed_counts[cols]
    active = np.flatnonzero(counts > 0)
    return cols, counts, active


def _lin_block(release, dag, branch, cols, counts, active, threads: int) -> np.ndarray:
    n = release.branch_protein_count(branch)
    gcols = cols[active]
    nu = counts[active] / n
    log_nu = np.log(nu)
    # up[x, y]: active term y is x itself or one of its ancestors
    anc = dag.ancestor_matrix[gcols][:, gcols].toarray()
    up = anc | np.eye(len(active), dtype=bool)
    out = np.empty((len(active), len(active)))

    def fill(x: int) -> None:
        up_cols = np.flatnonzero(up[x])
        nu_ma = np.where(up[:, up_cols], nu[up_cols], np.inf).min(axis=1)
        denom = log_nu[x] + log_nu
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = 2 * np.log(nu_ma) / denom
        vals = np.where((denom == 0) | ~np.isfinite(nu_ma) | ~np.isfinite(vals), 0.0, vals)
        vals[x] = 1.0
        out[x] = np.clip(vals, 0.0, 1.0) + 0.0

    _run_rows(fill, len(active), threads)
    return out


def _jaccard_block(release, cols, counts, active) -> np.ndarray:
    x = release.closed[:, cols[active]].astype(np.float64).tocsc()
    inter = (x.T @ x).toarray()
    c = counts[active].astype(np.float64)
    union = c[:, None] + c[None, :] - inter
    return inter / union


def _run_rows(fill, count: int, threads: int) -> None:
    if threads and threads > 1 and count > 64:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(count)))
    else:
        for x in range(count):
            fill(x)


def build_matrix(
    measure: str,
    release: AnnotationRelease,
    dag: OntologyDag,
    branch: str,
    threads: int = 1,
) -> SimilarityMatrix:
    if measure not in MEASURES:
        raise DomainError(f"unknown similarity measure {measure!r}")
    terms = dag.branch_terms(branch)
    if not terms:
        raise DomainError(f"branch {branch} has no terms")
    cols, counts, active = _active_block(release, dag, branch)
    if len(active) == 0:
        values = np.zeros((0, 0))
    elif measure == "lin":
        values = _lin_block(release, dag, branch, cols, counts, active, threads)
    else:
        values = _jaccard_block(release, cols, counts, active)
    return SimilarityMatrix(measure, branch, terms, active, values)


# ranks and thresholds

def rank_in_row(row: Sequence[float], j: int) -> float:
    """Mid-rank of ``row[j]`` in increasing order, divided by the row length."""
    row = np.asarray(row, dtype=float)
    v = row[j]
    less = np.count_nonzero(row < v)
    equal = np.count_nonzero(row == v)
    return (less + (equal + 1) / 2) / len(row)


def _ranks_against(sorted_row: np.ndarray, values: np.ndarray) -> np.ndarray:
    lo = np.searchsorted(sorted_row, values, side="left")
    hi = np.searchsorted(sorted_row, values, side="right")
    return (lo + (hi - lo + 1) / 2) / len(sorted_row)


def normalized_ranks(matrix: SimilarityMatrix, k: str, others: Iterable[str]) -> np.ndarray:
    """Normalized rank of each term in ``others`` within the row of ``k``.

    The self-similarity of ``k`` is left out of the row, so a term that is
    the single most similar one to ``k`` gets rank 1.
    """
    others = list(others)
    if k in others:
        raise DomainError("cannot rank a term against itself")
    if matrix.m < 2:
        raise DomainError("ranking needs at least two terms in the branch")
    row = matrix.row(k)
    pk = matrix.position(k)
    rest = np.delete(row, pk)
    values = np.array([row[matrix.position(s)] for s in others])
    return _ranks_against(np.sort(rest), values)


def normalized_rank(matrix: SimilarityMatrix, k: str, s: str) -> float:
    return float(normalized_ranks(matrix, k, [s])[0])


def quantile_threshold(row: Sequence[float], K: float) -> float:
    """Lower empirical K-quantile: element ceil(K*m) (1-based) of the sorted row."""
    if not 0 < K < 1:
        raise DomainError(f"K must lie strictly between 0 and 1, got {K}")
    values = np.sort(np.asarray(row, dtype=float))
    m = len(values)
    if m == 0:
        raise DomainError("empty similarity row")
    # round first so that e.g. 0.7 * 10 does not become index 8
    idx = math.ceil(round(K * m, 9))
    idx = min(max(idx, 1), m)
    return float(values[idx - 1])


# persistence

_MAGIC = b"GONEGSIM"
_VERSION = 1
_MEASURE_TAG = {"lin": b"L", "jaccard": b"J"}
_TAG_MEASURE = {v: k for k, v in _MEASURE_TAG.items()}
_HEADER = struct.Struct("<8sB1s2sII")


def write_matrix(matrix: SimilarityMatrix, stream: IO[bytes]) -> None:
    """Binary cache: header, active term ids, row-major little-endian float32 block."""
    a = len(matrix.active)
    stream.write(_HEADER.pack(_MAGIC, _VERSION, _MEASURE_TAG[matrix.measure],
                              matrix.branch.encode("ascii"), matrix.m, a))
    for pos in matrix.active:
        stream.write(matrix.terms[pos].encode("ascii"))
    stream.write(np.ascontiguousarray(matrix.values, dtype="<f4").tobytes())


def read_matrix(stream: IO[bytes], dag: OntologyDag) -> SimilarityMatrix:
    head = stream.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise ParseError("truncated similarity cache header")
    magic, version, tag, branch, m, a = _HEADER.unpack(head)
    if magic != _MAGIC or version != _VERSION or tag not in _TAG_MEASURE:
        raise ParseError("not a similarity cache file")
    branch = branch.decode("ascii")
    terms = dag.branch_terms(branch)
    if len(terms) != m:
        raise ParseError(f"cache holds {m} {branch} terms, ontology has {len(terms)}")
    ids = [stream.read(10).decode("ascii") for _ in range(a)]
    pos = {t: i for i, t in enumerate(terms)}
    try:
        active = np.array([pos[t] for t in ids], dtype=np.int64)
    except KeyError as exc:
        raise ParseError(f"cache references term {exc.args[0]} missing from the ontology") from None
    raw = stream.read(4 * a * a)
    if len(raw) != 4 * a * a:
        raise ParseError("truncated similarity cache body")
    values = np.frombuffer(raw, dtype="<f4").reshape(a, a).astype(np.float64)
    return SimilarityMatrix(_TAG_MEASURE[tag], branch, terms, active, values)


def write_matrix_csv(matrix: SimilarityMatrix, stream: IO[str], full: bool = False) -> None:
    """Square CSV with a header row of terms; annotated terms only unless ``full``."""
    if full:
        terms = list(matrix.terms)
        values = matrix.dense()
    else:
        terms = [matrix.terms[p] for p in matrix.active]
        values = matrix.values
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["term", *terms])
    for t, row in zip(terms, values):
        writer.writerow([t, *(repr(float(v)) for v in row)])
