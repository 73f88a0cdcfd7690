"""Synthetic ontologies and release pairs with planted annotation patterns.

Proteins belong to functional modules: small sets of terms scattered across
the DAG that tend to be annotated together. Novel annotations in the newer
release are drawn from the protein's own module, so new terms are highly
co-annotated (Jaccard-similar) with the protein's earlier terms while being
far apart in the hierarchy.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np

from .annotations import AnnotationRelease
from .ontology import OntologyDag, Term

BRANCH_ROOTS = {"BP": "GO:0008150", "MF": "GO:0003674", "CC": "GO:0005575"}
BRANCH_NAMESPACE = {"BP": "biological_process", "MF": "molecular_function", "CC": "cellular_component"}
BRANCH_ASPECT = {"BP": "P", "MF": "F", "CC": "C"}


@dataclass
class SyntheticData:
    dag: OntologyDag
    old: AnnotationRelease
    new: AnnotationRelease
    modules: list[tuple[str, ...]]
    part_of: set[tuple[str, str]] = field(default_factory=set)
    obsolete: tuple[str, ...] = ()


def _random_dag(sizes: Mapping[str, int], rng: np.random.Generator, extra_parent: float, part_of_rate: float,
                depth_bias: float):
    terms: list[Term] = []
    edges: list[tuple[str, str]] = []
    part_of: set[tuple[str, str]] = set()
    next_id = 1_000_000
    for branch, size in sizes.items():
        root = BRANCH_ROOTS[branch]
        members = [root]
        levels = {root: 0}
        terms.append(Term(root, f"{branch.lower()} root", branch))
        for _ in range(size - 1):
            tid = f"GO:{next_id:07d}"
            next_id += 1
            # depth_bias > 1 favours recently added terms, growing a deeper DAG
            weights = np.linspace(1.0, depth_bias, len(members))
            parent = members[rng.choice(len(members), p=weights / weights.sum())]
            parents = {parent}
            if len(members) > 3 and rng.random() < extra_parent:
                parents.add(members[rng.integers(1, len(members))])
            for p in sorted(parents):
                edges.append((tid, p))
                if rng.random() < part_of_rate:
                    part_of.add((tid, p))
            levels[tid] = 1 + max(levels[p] for p in parents)
            members.append(tid)
            terms.append(Term(tid, f"synthetic term {next_id - 1_000_000}", branch))
    return terms, edges, part_of


def generate(
    sizes: Mapping[str, int] | None = None,
    n_proteins: int = 600,
    module_size: int = 5,
    old_per_protein: int = 3,
    novel_fraction: float = 0.6,
    noise_rate: float = 0.05,
    extra_parent: float = 0.1,
    part_of_rate: float = 0.2,
    depth_bias: float = 1.0,
    leaf_modules: bool = True,
    seed: int = 0,
) -> SyntheticData:
    """Build a DAG and an (old, new) release pair with module-driven novelty."""
    rng = np.random.default_rng(seed)
    sizes = dict(sizes or {"BP": 200})
    terms, edges, part_of = _random_dag(sizes, rng, extra_parent, part_of_rate, depth_bias)
    dag = OntologyDag(terms, edges)

    modules: list[tuple[str, ...]] = []
    for branch in sizes:
        # module members are deep terms (leaves by default) spread over the whole branch
        pool = [t for t in dag.branch_terms(branch)
                if dag.level(t) >= 2 and not (leaf_modules and dag.children(t))]
        rng.shuffle(pool)
        for start in range(0, len(pool) - module_size + 1, module_size):
            modules.append(tuple(sorted(pool[start:start + module_size])))
    if not modules:
        raise ValueError("branches too small to host a module")
    all_terms = [t for t in dag.terms if dag.level(t) >= 1]

    proteins = [f"P{i:05d}" for i in range(n_proteins)]
    old_pairs: list[tuple[str, str]] = []
    new_pairs: list[tuple[str, str]] = []
    for p in proteins:
        module = modules[rng.integers(len(modules))]
        picked = list(rng.choice(module, size=min(old_per_protein, len(module)), replace=False))
        if rng.random() < noise_rate:
            picked.append(all_terms[rng.integers(len(all_terms))])
        old_terms = sorted(set(picked))
        new_terms = list(old_terms)
        rest = [t for t in module if t not in old_terms]
        if rest and rng.random() < novel_fraction:
            new_terms.append(rest[rng.integers(len(rest))])
        old_pairs.extend((p, t) for t in old_terms)
        new_pairs.extend((p, t) for t in sorted(set(new_terms)))

    old = AnnotationRelease.from_pairs("synthetic-old", dag, old_pairs, proteins)
    new = AnnotationRelease.from_pairs("synthetic-new", dag, new_pairs, proteins)
    return SyntheticData(dag, old, new, modules, part_of)


# writers

def write_obo(data: SyntheticData, stream: IO[str], obsolete: int = 1) -> None:
    """OBO 1.2 text for the synthetic DAG, plus a few obsolete stanzas."""
    dag = data.dag
    stream.write("format-version: 1.2\ndata-version: synthetic\n\n")
    for t in dag.terms:
        term = dag.term(t)
        stream.write(f"[Term]\nid: {t}\nname: {term.name}\nnamespace: {BRANCH_NAMESPACE[term.branch]}\n")
        for p in sorted(dag.parents(t)):
            if (t, p) in data.part_of:
                stream.write(f"relationship: part_of {p} ! {dag.term(p).name}\n")
            else:
                stream.write(f"is_a: {p} ! {dag.term(p).name}\n")
        stream.write("\n")
    for i in range(obsolete):
        stream.write(f"[Term]\nid: GO:{9_000_000 + i:07d}\nname: obsolete synthetic term\n"
                     f"namespace: biological_process\nis_obsolete: true\n\n")
    stream.write("[Typedef]\nid: part_of\nname: part of\nis_transitive: true\n")


def write_gaf(
    release: AnnotationRelease,
    stream: IO[str],
    seed: int = 0,
    decoy_rate: float = 0.1,
) -> None:
    """GAF 2.1 text for a release; adds filtered-out decoy rows (IEA and NOT)."""
    rng = np.random.default_rng(seed)
    dag = release.dag
    stream.write("!gaf-version: 2.1\n!generated-by: goneg synthetic\n")
    terms = dag.terms
    for protein, term in release.pairs():
        stream.write(_gaf_row(protein, term, "IDA", "", dag))
        if rng.random() < decoy_rate:
            decoy = terms[rng.integers(len(terms))]
            code, qual = ("IEA", "") if rng.random() < 0.5 else ("IMP", "NOT")
            stream.write(_gaf_row(protein, decoy, code, qual, dag))


def _gaf_row(protein: str, term: str, code: str, qualifier: str, dag: OntologyDag) -> str:
    aspect = BRANCH_ASPECT[dag.branch(term)]
    cols = ["SYN", protein, protein.lower(), qualifier, term, "PMID:0000000", code, "", aspect,
            "synthetic protein", "", "protein", "taxon:4932", "20170509", "SYN", "", ""]
    return "\t".join(cols) + "\n"


def obo_text(data: SyntheticData) -> str:
    buf = io.StringIO()
    write_obo(data, buf)
    return buf.getvalue()


def gaf_text(release: AnnotationRelease, seed: int = 0) -> str:
    buf = io.StringIO()
    write_gaf(release, buf, seed)
    return buf.getvalue()
