"""GO structure: OBO parsing and DAG queries.

The graph stores child -> parent edges for the three GO branches. A synthetic
dummy root sits above the three branch roots; it is never reported by
``ancestors`` and never makes branch roots siblings of each other, but it is
the fork point of last resort for terms that share no real ancestor.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import DomainError, ParseError, StructureError, UnknownTermError
from .textio import Source, open_text, source_name

LOGGER = logging.getLogger(__name__)

BRANCHES = ("BP", "MF", "CC")
NAMESPACE_TO_BRANCH = {
    "biological_process": "BP",
    "molecular_function": "MF",
    "cellular_component": "CC",
}
# GAF column 9 aspect letters
ASPECT_TO_BRANCH = {"P": "BP", "F": "MF", "C": "CC"}

DUMMY_ROOT = "GO:0000000"
DEFAULT_RELATIONS = frozenset({"is_a", "part_of"})
TERM_ID_RE = re.compile(r"^GO:\d{7}$")


@dataclass(frozen=True)
class Term:
    id: str
    name: str
    branch: str


def is_term_id(value: str) -> bool:
    return bool(TERM_ID_RE.match(value))


class OntologyDag:
    """Immutable GO term graph.

    Build one with :func:`parse_obo` or directly from terms and
    ``(child, parent)`` edges. Terms are indexed in sorted accession order;
    that index is the column order of every annotation matrix.
    """

    def __init__(
        self,
        terms: Iterable[Term],
        edges: Iterable[tuple[str, str]],
        alt_ids: Mapping[str, str] | None = None,
    ):
        by_id: dict[str, Term] = {}
        for term in terms:
            if not is_term_id(term.id):
                raise StructureError(f"invalid term accession {term.id!r}")
            if term.id == DUMMY_ROOT:
                raise StructureError(f"{DUMMY_ROOT} is reserved for the dummy root")
            if term.branch not in BRANCHES:
                raise StructureError(f"term {term.id} has unknown branch {term.branch!r}")
            if term.id in by_id:
                raise StructureError(f"duplicate term {term.id}")
            by_id[term.id] = term

        self._terms = by_id
        self.terms: tuple[str, ...] = tuple(sorted(by_id))
        self._index = {t: i for i, t in enumerate(self.terms)}

        parents: dict[str, set[str]] = {t: set() for t in self.terms}
        children: dict[str, set[str]] = {t: set() for t in self.terms}
        for child, parent in edges:
            if child not in by_id:
                raise StructureError(f"edge from unknown term {child}")
            if parent not in by_id:
                raise StructureError(f"edge {child} -> {parent} references unknown term {parent}")
            if child == parent:
                raise StructureError(f"cycle detected: self loop on {child}")
            if by_id[child].branch != by_id[parent].branch:
                raise StructureError(f"edge {child} -> {parent} crosses branches")
            parents[child].add(parent)
            children[parent].add(child)
        self._parents = {t: frozenset(p) for t, p in parents.items()}
        self._children = {t: frozenset(c) for t, c in children.items()}

        self._alt_ids = {a: c for a, c in (alt_ids or {}).items() if c in by_id and a not in by_id}

        order = self._topological_order()
        self._levels = self._compute_levels(order)
        self.ancestor_matrix = self._compute_ancestor_matrix(order)
        self.descendant_matrix = self.ancestor_matrix.T.tocsr()
        self._branch_terms = {
            b: tuple(t for t in self.terms if by_id[t].branch == b) for b in BRANCHES
        }
        self.dropped_cross_branch = 0

    # construction helpers

    def _topological_order(self) -> list[str]:
        """Parents-first order (Kahn). Raises StructureError naming a cycle member."""
        pending = {t: len(p) for t, p in self._parents.items()}
        queue = deque(sorted(t for t, n in pending.items() if n == 0))
        order: list[str] = []
        while queue:
            term = queue.popleft()
            order.append(term)
            for child in sorted(self._children[term]):
                pending[child] -= 1
                if pending[child] == 0:
                    queue.append(child)
        if len(order) != len(self.terms):
            stuck = {t for t, n in pending.items() if n > 0}
            # every stuck term has a stuck parent; walking upwards must revisit a node
            node = min(stuck)
            seen: set[str] = set()
            while node not in seen:
                seen.add(node)
                node = min(p for p in self._parents[node] if p in stuck)
            raise StructureError(f"cycle detected through {node}")
        return order

    def _compute_levels(self, order: list[str]) -> dict[str, int]:
        levels: dict[str, int] = {}
        for term in order:
            ps = self._parents[term]
            levels[term] = 1 + max(levels[p] for p in ps) if ps else 0
        return levels

    def _compute_ancestor_matrix(self, order: list[str]) -> sparse.csr_matrix:
        idx = self._index
        anc: dict[int, np.ndarray] = {}
        for term in order:
            i = idx[term]
            ps = [idx[p] for p in self._parents[term]]
            if not ps:
                anc[i] = np.empty(0, dtype=np.int64)
                continue
            parts = [anc[p] for p in ps] + [np.asarray(ps, dtype=np.int64)]
            anc[i] = np.unique(np.concatenate(parts))
        m = len(self.terms)
        indptr = np.zeros(m + 1, dtype=np.int64)
        for i in range(m):
            indptr[i + 1] = indptr[i] + len(anc[i])
        indices = np.concatenate([anc[i] for i in range(m)]) if m else np.empty(0, np.int64)
        data = np.ones(len(indices), dtype=bool)
        return sparse.csr_matrix((data, indices, indptr), shape=(m, m))

    # lookups

    def __contains__(self, term: object) -> bool:
        return term in self._terms

    def __len__(self) -> int:
        return len(self.terms)

    def resolve(self, accession: str) -> str:
        """Canonical accession for a primary or alternate id."""
        if accession in self._terms:
            return accession
        try:
            return self._alt_ids[accession]
        except KeyError:
            raise UnknownTermError(accession) from None

    def _check(self, term: str) -> None:
        if term not in self._terms:
            raise UnknownTermError(term)

    def term(self, term: str) -> Term:
        self._check(term)
        return self._terms[term]

    def index(self, term: str) -> int:
        self._check(term)
        return self._index[term]

    def branch(self, term: str) -> str:
        return self.term(term).branch

    def branch_terms(self, branch: str) -> tuple[str, ...]:
        if branch not in BRANCHES:
            raise DomainError(f"unknown branch {branch!r}")
        return self._branch_terms[branch]

    def branch_indices(self, branch: str) -> np.ndarray:
        return np.fromiter((self._index[t] for t in self.branch_terms(branch)), dtype=np.int64)

    def roots(self, branch: str | None = None) -> tuple[str, ...]:
        terms = self.terms if branch is None else self.branch_terms(branch)
        return tuple(t for t in terms if not self._parents[t])

    def parents(self, term: str) -> frozenset[str]:
        """Branch-internal parents; branch roots return the empty set."""
        self._check(term)
        return self._parents[term]

    def children(self, term: str) -> frozenset[str]:
        self._check(term)
        return self._children[term]

    def ancestors(self, term: str) -> frozenset[str]:
        i = self.index(term)
        row = self.ancestor_matrix.indices[self.ancestor_matrix.indptr[i]:self.ancestor_matrix.indptr[i + 1]]
        return frozenset(self.terms[j] for j in row)

    def descendants(self, term: str) -> frozenset[str]:
        i = self.index(term)
        mat = self.descendant_matrix
        row = mat.indices[mat.indptr[i]:mat.indptr[i + 1]]
        return frozenset(self.terms[j] for j in row)

    def siblings(self, term: str) -> frozenset[str]:
        out: set[str] = set()
        for parent in self.parents(term):
            out |= self._children[parent]
        out.discard(term)
        return frozenset(out)

    def level(self, term: str) -> int:
        if term == DUMMY_ROOT:
            return -1
        self._check(term)
        return self._levels[term]

    @property
    def max_level(self) -> int:
        return max(self._levels.values(), default=0)

    def deepest_fork_ancestor(self, k: str, s: str) -> str:
        """Deepest common ancestor of two unrelated terms, or the dummy root."""
        if k == s:
            raise DomainError("fork ancestor needs two distinct terms")
        anc_k = self.ancestors(k)
        anc_s = self.ancestors(s)
        if k in anc_s or s in anc_k:
            raise DomainError(f"{k} and {s} lie on a common path; there is no fork")
        common = anc_k & anc_s
        if not common:
            return DUMMY_ROOT
        return min(common, key=lambda q: (-self._levels[q], q))

    def longest_path_distance(self, q: str, s: str) -> int:
        """Edge count of the longest upward path from ``s`` to ``q``."""
        self._check(s)
        if q == s:
            return 0
        if q == DUMMY_ROOT:
            return self._levels[s] + 1
        anc_s = self.ancestors(s)
        if q not in anc_s:
            raise DomainError(f"{q} is not an ancestor of {s}")
        dist = {s: 0}
        # level strictly decreases along child -> parent edges
        for node in sorted(anc_s | {s}, key=lambda t: -self._levels[t]):
            d = dist.get(node)
            if d is None:
                continue
            for p in self._parents[node]:
                if dist.get(p, -1) < d + 1:
                    dist[p] = d + 1
        return dist[q]


# module-level spellings of the DAG queries

def ancestors(dag: OntologyDag, k: str) -> frozenset[str]:
    return dag.ancestors(k)


def descendants(dag: OntologyDag, k: str) -> frozenset[str]:
    return dag.descendants(k)


def siblings(dag: OntologyDag, k: str) -> frozenset[str]:
    return dag.siblings(k)


def level(dag: OntologyDag, k: str) -> int:
    return dag.level(k)


def deepest_fork_ancestor(dag: OntologyDag, k: str, s: str) -> str:
    return dag.deepest_fork_ancestor(k, s)


def longest_path_distance(dag: OntologyDag, q: str, s: str) -> int:
    return dag.longest_path_distance(q, s)


# OBO parsing

def _strip_comment(value: str) -> str:
    # trailing "! comment" and "{qualifiers}" are not part of the value
    if " !" in value:
        value = value.split(" !", 1)[0]
    if value.endswith("}") and "{" in value:
        value = value[: value.rindex("{")]
    return value.strip()


@dataclass
class _Stanza:
    lineno: int
    id: str | None = None
    name: str = ""
    namespace: str | None = None
    obsolete: bool = False
    alt_ids: list[str] | None = None
    links: list[tuple[str, str, int]] | None = None  # (relation, target, lineno)


def parse_obo(stream: Source, relations: Iterable[str] = DEFAULT_RELATIONS) -> OntologyDag:
    """Parse an OBO 1.2/1.4 file into an :class:`OntologyDag`.

    ``relations`` selects which links become edges: ``is_a`` and any
    ``relationship:`` type such as ``part_of``. Obsolete terms are dropped.
    Links between different branches are dropped with a warning.
    """
    relations = frozenset(relations)
    name = source_name(stream)
    stanzas: list[_Stanza] = []
    current: _Stanza | None = None
    in_term = False

    with open_text(stream) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("!"):
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise ParseError(f"malformed stanza header {line!r}", lineno, name)
                in_term = line == "[Term]"
                current = _Stanza(lineno=lineno, alt_ids=[], links=[]) if in_term else None
                if current is not None:
                    stanzas.append(current)
                continue
            if ":" not in line:
                raise ParseError(f"expected 'tag: value', got {line!r}", lineno, name)
            if not in_term or current is None:
                continue
            tag, value = line.split(":", 1)
            tag = tag.strip()
            value = value.strip()
            if not tag or any(c.isspace() for c in tag):
                raise ParseError(f"malformed tag in {line!r}", lineno, name)
            if tag == "id":
                if current.id is not None:
                    raise ParseError("stanza has two id lines", lineno, name)
                term_id = _strip_comment(value)
                if not is_term_id(term_id):
                    raise ParseError(f"invalid GO accession {term_id!r}", lineno, name)
                current.id = term_id
            elif tag == "name":
                current.name = value
            elif tag == "namespace":
                current.namespace = _strip_comment(value)
            elif tag == "is_obsolete":
                current.obsolete = _strip_comment(value).lower() == "true"
            elif tag == "alt_id":
                current.alt_ids.append(_strip_comment(value))
            elif tag == "is_a":
                target = _strip_comment(value).split()
                if not target:
                    raise ParseError("empty is_a", lineno, name)
                current.links.append(("is_a", target[0], lineno))
            elif tag == "relationship":
                parts = _strip_comment(value).split()
                if len(parts) < 2:
                    raise ParseError(f"malformed relationship {value!r}", lineno, name)
                current.links.append((parts[0], parts[1], lineno))

    terms: list[Term] = []
    alt_ids: dict[str, str] = {}
    obsolete: set[str] = set()
    for st in stanzas:
        if st.id is None:
            raise ParseError("[Term] stanza without id", st.lineno, name)
        if st.obsolete:
            obsolete.add(st.id)
            continue
        branch = NAMESPACE_TO_BRANCH.get(st.namespace or "")
        if branch is None:
            raise ParseError(f"term {st.id} has missing or unknown namespace {st.namespace!r}", st.lineno, name)
        terms.append(Term(st.id, st.name, branch))
        for alt in st.alt_ids:
            alt_ids[alt] = st.id

    known = {t.id: t for t in terms}
    edges: list[tuple[str, str]] = []
    cross = 0
    for st in stanzas:
        if st.obsolete:
            continue
        for rel, target, lineno in st.links:
            if rel not in relations:
                continue
            parent = target if target in known else alt_ids.get(target)
            if parent is None:
                what = "obsolete" if target in obsolete else "undeclared"
                raise StructureError(f"line {lineno}: {st.id} {rel} {target}: target term is {what}")
            if known[parent].branch != known[st.id].branch:
                cross += 1
                continue
            edges.append((st.id, parent))
    if cross:
        LOGGER.warning("dropped %d cross-branch edges", cross)

    dag = OntologyDag(terms, edges, alt_ids)
    dag.dropped_cross_branch = cross
    LOGGER.info("parsed %d terms (%d obsolete dropped)", len(dag), len(obsolete))
    return dag
