import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from lexigraph.lexicon import AttributeInventory, Lexicon, ParadigmSet
from lexigraph.projection import (
    EmptyParadigmSetError,
    nearest_paradigms,
    project,
    project_lexicon,
)

from oracles import brute_force_nearest


def paradigm_set(rows):
    inv = AttributeInventory(tuple(f"A:{i}" for i in range(len(rows[0]))))
    return ParadigmSet.from_lexicon(Lexicon({f"w{k}": r for k, r in enumerate(rows)}, inv))


def test_paradigm_projects_to_itself():
    P = paradigm_set([[1, -1, 1], [-1, -1, 1], [1, 1, 1]])
    for p in P:
        assert project(p, P).tolist() == p.tolist()


def test_tie_goes_to_lexicographically_smallest():
    P = paradigm_set([[1, -1], [-1, 1]])
    assert project([0.0, 0.0], P).tolist() == [-1, 1]


def test_three_attribute_example():
    v = np.array([0.9, 0.2, -0.8])
    rows = [[1, 1, -1], [1, -1, -1], [-1, -1, 1]]
    dists = [float(np.sum((v - np.array(r)) ** 2)) for r in rows]
    assert dists == pytest.approx([0.69, 1.49, 8.29])
    assert project(v, paradigm_set(rows)).tolist() == [1, 1, -1]


def test_empty_paradigm_set():
    empty = ParadigmSet.from_lexicon(Lexicon({}, AttributeInventory(("A:a",))))
    with pytest.raises(EmptyParadigmSetError):
        project([0.3], empty)
    reached = Lexicon({"x": [0.4]}, empty.inventory)
    with pytest.raises(EmptyParadigmSetError):
        project_lexicon(reached, empty)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        project([0.1, 0.2, 0.3], paradigm_set([[1, -1]]))


class TestProjectLexicon:
    P = paradigm_set([[1, -1], [-1, 1]])

    def test_empty_lexicon(self):
        out = project_lexicon(Lexicon({}, self.P.inventory), self.P)
        assert len(out) == 0

    def test_gold_inputs_unchanged(self):
        lex = Lexicon({"a": [1, -1], "b": [-1, 1]}, self.P.inventory)
        assert project_lexicon(lex, self.P) == lex

    def test_unreached_nodes_skipped_unless_forced(self):
        lex = Lexicon({"a": [0.3, -0.1], "z": [0.0, 0.0]}, self.P.inventory)
        assert project_lexicon(lex, self.P).words == ["a"]
        forced = project_lexicon(lex, self.P, skip_unlabeled=False)
        assert forced["z"].tolist() == [-1, 1]

    def test_inventory_mismatch(self):
        other = Lexicon({"a": [0.3, 0.1]}, AttributeInventory(("B:0", "B:1")))
        with pytest.raises(ValueError):
            project_lexicon(other, self.P)


gold_rows = st.lists(
    st.lists(st.sampled_from([-1.0, 1.0]), min_size=4, max_size=4), min_size=1, max_size=12
)
real_vectors = hnp.arrays(
    float, st.tuples(st.integers(1, 30), st.just(4)), elements=st.floats(-1, 1, width=32)
)


@settings(max_examples=100)
@given(gold_rows, real_vectors)
def test_matches_brute_force(rows, vectors):
    P = paradigm_set(rows)
    got = nearest_paradigms(vectors, P, chunk=7)
    for v, k in zip(vectors, got):
        assert tuple(P.paradigms[k].tolist()) == brute_force_nearest(v.tolist(), P.paradigms.tolist())


@settings(max_examples=60)
@given(gold_rows, real_vectors)
def test_idempotent(rows, vectors):
    P = paradigm_set(rows)
    for v in vectors:
        once = project(v, P)
        assert project(once, P).tolist() == once.tolist()
