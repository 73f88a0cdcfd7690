from __future__ import annotations

import gzip
import io
import logging
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from conftest import data_path
from goneg.errors import DomainError, ParseError, StructureError, UnknownTermError
from goneg.ontology import DUMMY_ROOT, OntologyDag, Term, parse_obo

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)

HEADER = "format-version: 1.2\n\n"


def obo(*stanzas: str) -> io.StringIO:
    return io.StringIO(HEADER + "\n".join(stanzas))


def term(tid: str, ns: str = "biological_process", *extra: str) -> str:
    lines = [f"[Term]", f"id: {tid}", f"name: {tid}", f"namespace: {ns}", *extra]
    return "\n".join(lines) + "\n"


def test_excerpt_levels_and_roots(excerpt_dag):
    dag = excerpt_dag
    assert dag.roots("BP") == ("GO:0008150",)
    assert dag.level("GO:0008150") == 0
    assert dag.level("GO:0030476") == 4
    assert dag.level(DUMMY_ROOT) == -1
    assert dag.max_level == 4


def test_sibling_through_shared_parent(excerpt_dag):
    assert "GO:0032120" in excerpt_dag.siblings("GO:0030476")
    assert excerpt_dag.parents("GO:0032120") & excerpt_dag.parents("GO:0030476") == {"GO:1903046"}


def test_part_of_edges_create_ancestry(excerpt_dag):
    assert "GO:0005737" in excerpt_dag.ancestors("GO:0005938")
    is_a_only = parse_obo(data_path("go_excerpt.obo"), relations={"is_a"})
    assert "GO:0005737" not in is_a_only.ancestors("GO:0005938")


def test_gzip_and_bytes_inputs(excerpt_dag):
    raw = open(data_path("go_excerpt.obo"), "rb").read()
    from_gz = parse_obo(io.BytesIO(gzip.compress(raw)))
    from_bytes = parse_obo(io.BytesIO(raw))
    assert from_gz.terms == from_bytes.terms == excerpt_dag.terms


def test_obsolete_terms_and_alt_ids():
    dag = parse_obo(obo(
        term("GO:0008150"),
        term("GO:0000002", "biological_process", "alt_id: GO:0000003", "is_a: GO:0008150"),
        term("GO:0000004", "biological_process", "is_obsolete: true"),
    ))
    assert "GO:0000004" not in dag
    assert dag.resolve("GO:0000003") == "GO:0000002"
    with pytest.raises(UnknownTermError):
        dag.resolve("GO:0000004")


def test_cross_branch_edge_dropped(caplog):
    with caplog.at_level(logging.WARNING):
        dag = parse_obo(obo(
            term("GO:0008150"),
            term("GO:0003674", "molecular_function"),
            term("GO:0000002", "biological_process", "is_a: GO:0008150",
                 "relationship: part_of GO:0003674"),
        ))
    assert dag.dropped_cross_branch == 1
    assert dag.parents("GO:0000002") == {"GO:0008150"}
    assert "cross-branch" in caplog.text


def test_relations_not_selected_are_ignored():
    dag = parse_obo(obo(
        term("GO:0008150"),
        term("GO:0000002", "biological_process", "is_a: GO:0008150"),
        term("GO:0000005", "biological_process", "is_a: GO:0008150", "relationship: regulates GO:0000002"),
    ))
    assert dag.parents("GO:0000005") == {"GO:0008150"}


@pytest.mark.parametrize("target", ["GO:0000009", "GO:0000004"])
def test_edge_to_missing_or_obsolete_term(target):
    with pytest.raises(StructureError, match="GO:0000002"):
        parse_obo(obo(
            term("GO:0008150"),
            term("GO:0000004", "biological_process", "is_obsolete: true"),
            term("GO:0000002", "biological_process", f"is_a: {target}"),
        ))


def test_cycle_detected():
    with pytest.raises(StructureError, match="cycle"):
        parse_obo(obo(
            term("GO:0008150"),
            term("GO:0000002", "biological_process", "is_a: GO:0008150", "is_a: GO:0000003"),
            term("GO:0000003", "biological_process", "is_a: GO:0000002"),
        ))


@pytest.mark.parametrize("text, lineno", [
    (HEADER + "[Term\nid: GO:0000001\n", 3),
    (HEADER + "[Term]\nid GO:0000001\n", 4),
    (HEADER + "[Term]\nid: GO:1\nnamespace: biological_process\n", 4),
    (HEADER + "[Term]\nid: GO:0000001\nname: x\n", 3),
])
def test_malformed_obo_reports_line(text, lineno):
    with pytest.raises(ParseError) as info:
        parse_obo(io.StringIO(text))
    assert info.value.lineno == lineno


def test_fork_and_distance_domain(excerpt_dag):
    dag = excerpt_dag
    with pytest.raises(DomainError):
        dag.deepest_fork_ancestor("GO:0030476", "GO:1903046")
    assert dag.deepest_fork_ancestor("GO:0030476", "GO:0032120") == "GO:1903046"
    assert dag.longest_path_distance("GO:0008150", "GO:0030476") == 4
    assert dag.longest_path_distance(DUMMY_ROOT, "GO:0030476") == 5
    with pytest.raises(DomainError):
        dag.longest_path_distance("GO:0030476", "GO:0008150")


def test_longest_path_prefers_longer_route():
    terms = [Term(t, t, "BP") for t in ("GO:0008150", "GO:0000001", "GO:0000002", "GO:0000003")]
    edges = [("GO:0000001", "GO:0008150"), ("GO:0000002", "GO:0000001"),
             ("GO:0000003", "GO:0000002"), ("GO:0000003", "GO:0008150")]
    dag = OntologyDag(terms, edges)
    assert dag.level("GO:0000003") == 3
    assert dag.longest_path_distance("GO:0008150", "GO:0000003") == 3


@settings(max_examples=60, deadline=None)
@given(SEEDS)
def test_graph_queries_match_oracle(seed):
    inst = O.random_instance(random.Random(seed), max_terms=40, max_proteins=1)
    dag = inst.dag()
    lev = O.levels(inst)
    for t in inst.terms:
        assert dag.ancestors(t) == O.ancestors(inst, t)
        assert dag.descendants(t) == O.descendants(inst, t)
        assert dag.siblings(t) == O.siblings(inst, t)
        assert dag.level(t) == lev[t]
        assert dag.longest_path_distance(DUMMY_ROOT, t) == lev[t] + 1
        for q in O.ancestors(inst, t):
            assert dag.longest_path_distance(q, t) == O.longest_path(inst, q, t)


@settings(max_examples=60, deadline=None)
@given(SEEDS)
def test_fork_ancestor_matches_oracle(seed):
    rng = random.Random(seed)
    inst = O.random_instance(rng, max_terms=40, max_proteins=1)
    dag = inst.dag()
    terms = inst.terms
    for _ in range(20):
        k, s = rng.sample(terms, 2) if len(terms) > 1 else (terms[0], terms[0])
        if k == s or k in O.ancestors(inst, s) or s in O.ancestors(inst, k):
            continue
        assert dag.deepest_fork_ancestor(k, s) == O.fork_ancestor(inst, k, s)


@settings(max_examples=40, deadline=None)
@given(SEEDS)
def test_level_strictly_increases_along_edges(seed):
    inst = O.random_instance(random.Random(seed), max_terms=50, max_proteins=1)
    dag = inst.dag()
    for t in dag.terms:
        for p in dag.parents(t):
            assert dag.level(p) < dag.level(t)
