from __future__ import annotations

import gzip
import io
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from goneg.annotations import (AnnotationRelease, align, novelty, novelty_counts, parse_gaf,
                               term_frequency, tpr_close)
from goneg.errors import DomainError, EmptyReleaseWarning, ParseError

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)


def gaf_row(protein, term, code="IDA", qualifier="", ncols=17):
    cols = ["SGD", protein, protein, qualifier, term, "PMID:1", code, "", "P", "", "", "protein",
            "taxon:559292", "20200101", "SGD", "", ""]
    return "\t".join(cols[:ncols]) + "\n"


def test_excerpt_releases(excerpt_releases):
    old, new = excerpt_releases
    assert old.direct_terms("S000003001") == {"GO:0030476"}
    assert new.direct_terms("S000003001") == {"GO:0030476", "GO:0032120"}
    assert "GO:0005737" in old.closed_terms("S000000001")  # through part_of


def test_filters_and_stats(excerpt_dag):
    text = "!gaf-version: 2.1\n" + "".join([
        gaf_row("A", "GO:0030476"),
        gaf_row("A", "GO:0030476", code="IMP"),            # duplicate pair
        gaf_row("B", "GO:0030476", qualifier="NOT"),       # negated
        gaf_row("B", "GO:0030476", qualifier="contributes_to|NOT"),
        gaf_row("C", "GO:0030476", code="IEA"),            # non-experimental
        gaf_row("D", "GO:9999999"),                        # unknown term
        gaf_row("E", "GO:0032120", ncols=15),              # GAF 1.0 width
    ])
    rel = parse_gaf(io.StringIO(text), excerpt_dag)
    assert rel.proteins == ("A", "E")
    assert rel.stats == dict(rows=7, kept=2, negated=2, evidence=1, unknown_term=1, duplicate=1)


def test_custom_evidence_and_synonyms(excerpt_dag):
    text = gaf_row("old-id", "GO:0030476", code="IEA")
    rel = parse_gaf(io.StringIO(text), excerpt_dag, evidence_filter={"IEA"}, synonyms={"old-id": "NEW"})
    assert rel.proteins == ("NEW",)
    with pytest.raises(DomainError):
        parse_gaf(io.StringIO(text), excerpt_dag, evidence_filter=set())


def test_gzip_input(excerpt_dag):
    raw = gaf_row("A", "GO:0030476").encode()
    rel = parse_gaf(io.BytesIO(gzip.compress(raw)), excerpt_dag)
    assert rel.proteins == ("A",)


def test_bad_column_count_names_line(excerpt_dag):
    text = "!c\n" + gaf_row("A", "GO:0030476") + "A\tB\tC\n"
    with pytest.raises(ParseError) as info:
        parse_gaf(io.StringIO(text), excerpt_dag)
    assert info.value.lineno == 3


def test_empty_release_warns(excerpt_dag):
    with pytest.warns(EmptyReleaseWarning):
        rel = parse_gaf(io.StringIO(gaf_row("A", "GO:0030476", code="IEA")), excerpt_dag)
    assert rel.n == 0


def test_novelty_on_excerpt(excerpt_releases, excerpt_dag):
    old, new = excerpt_releases
    sets = {ns.term: ns.proteins for ns in novelty(old, new)}
    assert sets == {"GO:0032120": {"S000003001"}, "GO:0005737": {"S000000001"}}
    closed = {ns.term for ns in novelty(old, new, "closed")}
    assert closed == {"GO:0032120"}  # cytoplasm was already implied for KAR9
    counts = novelty_counts(novelty(old, new), excerpt_dag)
    assert counts["BP"] == {"proteins": 1, "annotations": 1, "terms": 1}
    assert counts["MF"] == {"proteins": 0, "annotations": 0, "terms": 0}


def test_novelty_with_new_proteins(excerpt_dag):
    old = AnnotationRelease.from_pairs("o", excerpt_dag, [("A", "GO:0030476")])
    new = AnnotationRelease.from_pairs("n", excerpt_dag, [("A", "GO:0030476"), ("B", "GO:0030476")])
    assert [ns.proteins for ns in novelty(old, new)] == [{"B"}]
    a, b = align(old, new)
    assert a.proteins == b.proteins == ("A", "B")
    assert not novelty(new, old)


def test_term_frequency_denominator(excerpt_dag):
    rel = AnnotationRelease.from_pairs("r", excerpt_dag, [("A", "GO:0030476"), ("B", "GO:0032120"),
                                                          ("C", "GO:0005938")])
    # C is annotated only in CC, so the BP denominator is 2
    assert term_frequency(rel, excerpt_dag, "GO:0030476") == 0.5
    assert term_frequency(rel, excerpt_dag, "GO:1903046") == 1.0
    with pytest.raises(DomainError):
        term_frequency(rel, excerpt_dag, "GO:0003674")


def test_without_removes_exact_cells(toy):
    dag, old, _ = toy
    coo = old.direct.tocoo()
    masked = old.without(coo.row[:3], coo.col[:3])
    assert masked.direct.nnz == old.direct.nnz - 3
    assert not masked.direct[coo.row[:3], coo.col[:3]].any()


@settings(max_examples=60, deadline=None)
@given(SEEDS)
def test_closure_matches_matrix_power(seed):
    inst = O.random_instance(random.Random(seed))
    dag = inst.dag()
    rel = inst.release(dag)
    expected = O.closure_matrix(inst)
    assert np.array_equal(tpr_close(rel, dag).toarray(), expected)
    assert np.array_equal(rel.closed.toarray(), expected)


@settings(max_examples=40, deadline=None)
@given(SEEDS)
def test_closure_is_idempotent_and_upward_closed(seed):
    inst = O.random_instance(random.Random(seed))
    dag = inst.dag()
    rel = inst.release(dag)
    again = AnnotationRelease(rel.label, dag, rel.proteins, rel.closed)
    assert (again.closed != rel.closed).nnz == 0
    for p in rel.proteins[:20]:
        terms = rel.closed_terms(p)
        for t in terms:
            assert dag.ancestors(t) <= terms


@settings(max_examples=40, deadline=None)
@given(SEEDS)
def test_frequencies_match_oracle(seed):
    inst = O.random_instance(random.Random(seed))
    dag = inst.dag()
    rel = inst.release(dag)
    for t in inst.terms:
        if rel.branch_protein_count(dag.branch(t)) == 0:
            continue
        assert term_frequency(rel, dag, t) == pytest.approx(float(O.frequency(inst, t)), abs=1e-15)
