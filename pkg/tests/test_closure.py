"""Subpower closure, derivation terms and the loop oracle."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopbench.algebra import OpTable, builtin
from loopbench.closure import (
    Apply,
    Generator,
    evaluate_term,
    format_term,
    loop_oracle,
    subpower_closure,
    term_size,
)
from loopbench.digraph import Digraph
from loopbench.errors import BudgetExceeded, InvalidInput

from .conftest import complete_digraph


@st.composite
def closure_case(draw):
    m = draw(st.integers(2, 3))
    table = draw(st.lists(st.integers(0, m - 1), min_size=m * m, max_size=m * m))
    gens = draw(st.lists(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), min_size=1, max_size=3))
    return OpTable(2, m, tuple(table)), gens


class TestSubpowerClosure:
    def test_min_on_swapped_pair(self):
        closure = subpower_closure([builtin("min-chain")], [(0, 1), (1, 0)], track=True)
        assert closure.elements == [(0, 1), (1, 0), (0, 0)]
        assert closure.derivations[(0, 0)] == Apply(0, (Generator(0), Generator(1)))
        assert format_term(closure.derivations[(0, 0)], ["a", "b"], ["t"]) == "t(a, b)"

    def test_untracked(self):
        closure = subpower_closure([builtin("min-chain")], [(0, 1), (1, 0)])
        assert closure.derivations is None
        assert len(closure.elements) == 3

    def test_duplicate_generators_keep_first_index(self):
        closure = subpower_closure([builtin("min-chain")], [(0, 1), (0, 1), (1, 0)], track=True)
        assert closure.elements[:2] == [(0, 1), (1, 0)]
        assert closure.derivations[(1, 0)] == Generator(2)

    def test_empty_generators(self):
        assert subpower_closure([builtin("min-chain")], []).elements == []

    def test_cap(self):
        with pytest.raises(BudgetExceeded) as exc:
            subpower_closure([builtin("min-chain")], [(0, 1), (1, 0)], cap=2)
        assert exc.value.limit == 2

    def test_invalid_generators(self):
        with pytest.raises(InvalidInput):
            subpower_closure([builtin("min-chain")], [(0, 1), (1,)])
        with pytest.raises(InvalidInput):
            subpower_closure([builtin("min-chain")], [(0, 2)])
        with pytest.raises(InvalidInput):
            subpower_closure([], [(0, 1)])

    def test_projection_closes_nothing(self):
        gens = [(0, 1, 1), (1, 0, 1)]
        assert subpower_closure([builtin("projection:1:3")], gens).elements == gens

    @settings(max_examples=50)
    @given(closure_case())
    def test_closure_is_closed(self, case):
        t, gens = case
        elements = subpower_closure([t], gens).elements
        again = subpower_closure([t], elements).elements
        assert set(again) == set(elements)

    @settings(max_examples=50)
    @given(closure_case())
    def test_derivations_evaluate_back(self, case):
        t, gens = case
        closure = subpower_closure([t], gens, track=True)
        for element, term in closure.derivations.items():
            assert evaluate_term(term, gens, [t]) == element

    def test_two_operations(self):
        t_min = builtin("min-chain:3")
        t_max = OpTable.from_function(2, 3, max)
        closure = subpower_closure([t_min, t_max], [(0, 2), (2, 0)], track=True)
        assert set(closure.elements) == {(0, 2), (2, 0), (0, 0), (2, 2)}
        assert closure.derivations[(2, 2)].op == 1


class TestTerms:
    def test_term_size_counts_shared_nodes_once(self):
        x = Generator(0)
        inner = Apply(0, (x, Generator(1)))
        outer = Apply(0, (inner, inner))
        assert term_size(outer) == 4

    def test_arity_mismatch(self):
        with pytest.raises(InvalidInput):
            evaluate_term(Apply(0, (Generator(0),)), [(0, 1)], [builtin("min-chain")])


class TestLoopOracle:
    def test_incompatible_min_on_triangle(self):
        g = complete_digraph(3, loops=False)
        t = builtin("min-chain:3")
        vertex, term = loop_oracle(t, g)
        assert vertex == 0
        assert evaluate_term(term, g.sorted_edges(), [t]) == (0, 0)
        names = [f"({u},{v})" for u, v in g.sorted_edges()]
        assert format_term(term, names, ["t"]) == "t((0,1), (1,0))"

    def test_compatible_with_loop(self):
        vertex, term = loop_oracle(builtin("min-chain"), complete_digraph(2, loops=True))
        assert vertex == 0
        assert term == Generator(0)

    def test_compatible_without_loop(self):
        assert loop_oracle(builtin("projection:0:2:3"), complete_digraph(3, loops=False)) is None

    def test_loopless_closure(self):
        g = Digraph(2, frozenset({(0, 1)}))
        assert loop_oracle(builtin("min-chain"), g) is None
