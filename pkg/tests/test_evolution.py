from __future__ import annotations

import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from goneg.annotations import AnnotationRelease, novelty
from goneg.errors import DomainError
from goneg.evolution import (CATEGORIES, CategoryRecord, DistributionSummary, analyze, categorize,
                             category_proportions, fork_analysis, fork_point, pair_category,
                             rank_analysis)
from goneg.ontology import DUMMY_ROOT, OntologyDag, Term
from goneg.similarity import build_matrix

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)


def chain_dag(edges, branch="BP"):
    names = sorted({t for e in edges for t in e})
    return OntologyDag([Term(t, t, branch) for t in names], edges)


def test_excerpt_sibling_and_ancestor_cases(excerpt_dag, excerpt_releases):
    old, new = excerpt_releases
    sets = novelty(old, new)
    recs = {r.new_term: r for ns in sets for i in ns.proteins
            for r in categorize(i, ns.term, old.direct_terms(i), excerpt_dag)}
    assert recs["GO:0032120"].category == "Sib"
    assert recs["GO:0032120"].old_term == "GO:0030476"
    assert recs["GO:0005737"].category == "Anc"


def test_first_when_no_old_terms(excerpt_dag):
    assert categorize("X", "GO:0030476", [], excerpt_dag) == [CategoryRecord("X", "GO:0030476", None, "First")]
    with pytest.raises(DomainError):
        categorize("X", "GO:0030476", ["GO:0030476"], excerpt_dag)


def test_cross_branch_pair_is_other_with_dummy_fork(excerpt_dag):
    k, s = "GO:0030476", "GO:0005938"
    assert pair_category(excerpt_dag, k, s) == "Other"
    assert fork_point(excerpt_dag, k, s, "Other") == DUMMY_ROOT
    rec = CategoryRecord("X", k, s, "Other")
    (fork,) = fork_analysis([rec], excerpt_dag)
    assert fork.distance == excerpt_dag.level(s) + 1


def test_sibling_fork_under_single_parent():
    dag = chain_dag([("GO:0000002", "GO:0000001"), ("GO:0000003", "GO:0000001")])
    (fork,) = fork_analysis([CategoryRecord("X", "GO:0000002", "GO:0000003", "Sib")], dag)
    assert (fork.fork_term, fork.distance) == ("GO:0000001", 1)


def test_sibling_fork_uses_deepest_shared_parent():
    # both share the root and a deeper parent
    dag = chain_dag([("GO:0000002", "GO:0000001"), ("GO:0000003", "GO:0000002"),
                     ("GO:0000004", "GO:0000002"), ("GO:0000003", "GO:0000001"),
                     ("GO:0000004", "GO:0000001")])
    assert fork_point(dag, "GO:0000003", "GO:0000004", "Sib") == "GO:0000002"


def test_diamond_fork_distance_takes_longest_path():
    # s reaches q by a path of length 2 and by one of length 4
    edges = [("GO:0000010", "GO:0000001"), ("GO:0000011", "GO:0000010"), ("GO:0000012", "GO:0000011"),
             ("GO:0000013", "GO:0000012"), ("GO:0000013", "GO:0000014"), ("GO:0000014", "GO:0000010"),
             ("GO:0000020", "GO:0000010")]
    dag = chain_dag(edges)
    assert pair_category(dag, "GO:0000020", "GO:0000013") == "Other"
    assert fork_point(dag, "GO:0000020", "GO:0000013", "Other") == "GO:0000010"
    assert dag.longest_path_distance("GO:0000010", "GO:0000013") == 3
    (fork,) = fork_analysis([CategoryRecord("X", "GO:0000020", "GO:0000013", "Other")], dag)
    assert fork.distance == 3


def test_fork_point_rejects_path_categories(excerpt_dag):
    with pytest.raises(DomainError):
        fork_point(excerpt_dag, "GO:1903046", "GO:0030476", "Anc")


@settings(max_examples=40, deadline=None)
@given(SEEDS)
def test_category_matches_relation_predicates(seed):
    rng = random.Random(seed)
    inst = O.random_instance(rng, max_terms=40, max_proteins=1)
    dag = inst.dag()
    for _ in range(40):
        k, s = rng.choice(inst.terms), rng.choice(inst.terms)
        if k == s:
            continue
        if k in O.descendants(inst, s):
            want = "Desc"
        elif k in O.ancestors(inst, s):
            want = "Anc"
        elif k in O.siblings(inst, s):
            want = "Sib"
        else:
            want = "Other"
        assert pair_category(dag, k, s) == want
        if want in ("Sib", "Other"):
            q = fork_point(dag, k, s, want)
            d = dag.longest_path_distance(q, s)
            if q == DUMMY_ROOT:
                assert d == O.levels(inst)[s] + 1
            else:
                assert d == O.longest_path(inst, q, s)
                assert 1 <= d <= O.levels(inst)[s]


def test_proportions_examples(excerpt_dag):
    k = "GO:0032120"
    only_first = [CategoryRecord("A", k, None, "First")]
    assert category_proportions(only_first, excerpt_dag)["BP"] == {"First": 1.0, "Anc": 0.0, "Desc": 0.0,
                                                                  "Sib": 0.0, "Other": 0.0}
    pairs = [CategoryRecord("A", k, "GO:0030476", "Sib"), CategoryRecord("A", k, "GO:0005938", "Other")]
    assert category_proportions(pairs, excerpt_dag)["BP"]["Sib"] == 0.5
    two_terms = pairs + [CategoryRecord("B", "GO:0030476", None, "First")]
    assert category_proportions(two_terms, excerpt_dag)["BP"] == pytest.approx(
        {"First": 0.5, "Anc": 0.0, "Desc": 0.0, "Sib": 0.25, "Other": 0.25})
    # per protein, A counts once under its highest-precedence category
    assert category_proportions(pairs, excerpt_dag, "protein")["BP"]["Sib"] == 1.0
    with pytest.raises(DomainError):
        category_proportions([], excerpt_dag)


def test_proportions_are_stochastic(toy):
    dag, old, new = toy
    result = analyze(old, new, dag, {})
    for unit in ("pair", "protein"):
        for vec in result.summary["categories"][unit].values():
            assert set(vec) == set(CATEGORIES)
            assert min(vec.values()) >= 0
            assert sum(vec.values()) == pytest.approx(1.0, abs=1e-9)


def test_rank_analysis_matches_oracle_ranks(toy):
    dag, old, new = toy
    mat = build_matrix("jaccard", old, dag, "BP")
    sets = novelty(old, new)
    records, summary = rank_analysis(sets, mat, old)
    dense = mat.dense()
    for r in records[:200]:
        row = {t: dense[mat.position(r.term), j] for j, t in enumerate(mat.terms)}
        assert r.rank == pytest.approx(O.normalized_rank(row, r.term, r.old_term), abs=1e-12)
        assert 0 < r.rank <= 1
    assert summary.min <= summary.q1 <= summary.median <= summary.q3 <= summary.max


def test_rank_analysis_full_ties_give_half():
    # the new term was never annotated before, so its whole row is one tie
    dag = chain_dag([(f"GO:000000{i}", "GO:0000001") for i in range(2, 8)])
    old = AnnotationRelease.from_pairs("o", dag, [("A", "GO:0000002")])
    new = AnnotationRelease.from_pairs("n", dag, [("A", "GO:0000002"), ("A", "GO:0000003")])
    mat = build_matrix("jaccard", dag=dag, release=old, branch="BP")
    records, summary = rank_analysis(novelty(old, new), mat, old)
    # 6 tied entries once the diagonal is dropped: mid-rank 3.5 of 6
    assert summary.median == summary.mean == pytest.approx(7 / 12, abs=1e-15)


def test_rank_analysis_needs_old_terms(excerpt_dag):
    old = AnnotationRelease.from_pairs("o", excerpt_dag, [("A", "GO:0030476")])
    new = AnnotationRelease.from_pairs("n", excerpt_dag, [("A", "GO:0030476"), ("B", "GO:0032120")])
    mat = build_matrix("jaccard", old, excerpt_dag, "BP")
    with pytest.raises(DomainError):
        rank_analysis(novelty(old, new), mat, old)


def test_summary_ordering():
    s = DistributionSummary.from_values([3, 1, 2, 10])
    assert (s.min, s.median, s.max, s.n) == (1, 2.5, 10, 4)
    with pytest.raises(DomainError):
        DistributionSummary.from_values([])


def test_analyze_writes_all_artifacts(toy, tmp_path):
    dag, old, new = toy
    mats = {(m, b): build_matrix(m, old, dag, b) for m in ("lin", "jaccard") for b in ("BP", "MF", "CC")}
    result = analyze(old, new, dag, mats, ("MF",))
    result.write(tmp_path)
    for name in ("categories.csv", "ranks.csv", "forks.csv", "summary.json"):
        assert (tmp_path / name).exists()
    assert {dag.branch(r.new_term) for r in result.categories} == {"MF"}
    assert {r.branch for r in result.ranks} == {"MF"}
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary["ranks"]) == {"lin", "jaccard"}
    assert np.isclose(sum(summary["categories"]["pair"]["MF"].values()), 1.0)


def test_analyze_identical_releases(toy):
    dag, old, _ = toy
    with pytest.raises(DomainError):
        analyze(old, old, dag, {})
