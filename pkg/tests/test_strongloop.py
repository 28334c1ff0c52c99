"""Coordinate digraphs, fan-in vertices and the strong loop pipeline."""

from itertools import product

import pytest

from loopbench.algebra import TaylorSystem, builtin, find_taylor_system, is_compatible_graph, star_power_eval
from loopbench.digraph import Digraph, algebraic_length_one, is_strongly_connected
from loopbench.errors import HypothesisError, InvalidInput, VerificationFailed
from loopbench.strongloop import (
    closure_walk,
    coordinate_digraph,
    fanin_failures,
    fanin_vertex,
    largest_missing_cycle_length,
    pigeonhole_positions,
    strong_loop_pipeline,
    strong_witnesses,
    substitution_for_walk,
    taylor_corollary_witness,
    transitive_closure,
)

from .conftest import TWO_THREE, complete_digraph, cycle


class TestCoordinateDigraph:
    @pytest.mark.parametrize("key", ["min-chain:3", "majority3:3", "minority3"])
    def test_idempotent_gives_loops(self, key):
        t = builtin(key)
        for i in range(t.arity):
            p = coordinate_digraph(t, i).graph
            assert all(p.has_edge(v, v) for v in range(t.domain_size))

    def test_projection(self):
        t = builtin("projection:0:2")
        assert coordinate_digraph(t, 0).graph.edges == frozenset({(0, 0), (1, 1)})
        assert len(coordinate_digraph(t, 1).graph.edges) == 4

    def test_min_chain_points_down(self):
        p = coordinate_digraph(builtin("min-chain:3"), 0).graph
        assert p.edges == frozenset((x, y) for x in range(3) for y in range(3) if y <= x)

    def test_coordinate_range(self):
        with pytest.raises(InvalidInput):
            coordinate_digraph(builtin("min-chain"), 2)


class TestTransitiveClosure:
    def test_path(self):
        g = Digraph(3, frozenset({(0, 1), (1, 2)}))
        assert transitive_closure(g).edges == frozenset({(0, 1), (1, 2), (0, 2)})

    def test_cycle_gets_loops(self):
        assert transitive_closure(cycle(2)).edges == frozenset(product(range(2), repeat=2))


class TestWitnesses:
    def test_min_chain(self):
        g = Digraph(2, frozenset({(1, 0), (0, 1)}))
        assert strong_witnesses(builtin("min-chain"), g) == [(1, 0), (1, 0)]

    def test_projection_has_none(self):
        assert strong_witnesses(builtin("projection:0:2"), Digraph(2, frozenset({(0, 1)}))) is None


class TestFanin:
    def test_min_chain(self):
        t = builtin("min-chain:3")
        assert fanin_vertex(t, 0, []) == 0
        assert fanin_vertex(t, 0, [2]) == 2
        assert fanin_vertex(t, 0, [0, 1, 2]) == 0
        assert fanin_failures(t) == []

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_fanin_vertex_is_reached_from_everything(self, m):
        t = builtin(f"min-chain:{m}")
        for i in range(2):
            closure = transitive_closure(coordinate_digraph(t, i).graph)
            b = fanin_vertex(t, i, range(m), closure)
            assert all(closure.has_edge(x, b) for x in range(m))

    def test_projection_fails(self):
        t = builtin("projection:0:2")
        assert fanin_vertex(t, 0, [0, 1]) is None
        assert (0, 0, 1) in fanin_failures(t)


class TestStarWalks:
    @pytest.mark.parametrize("i", [0, 1])
    def test_substitution_reaches_walk_end(self, i):
        t = builtin("min-chain:3")
        closure = transitive_closure(coordinate_digraph(t, i).graph)
        for u, v in closure.sorted_edges():
            walk = closure_walk(t, i, u, v)
            k = len(walk) - 1
            f = substitution_for_walk(t, i, walk)
            assert f([i] * k) == u
            assert star_power_eval(t, k, f) == v

    def test_longer_walk(self):
        t = builtin("majority3:3")
        f = substitution_for_walk(t, 0, (2, 2, 2))
        assert f([0, 0]) == 2
        assert star_power_eval(t, 2, f) == 2

    def test_pigeonhole(self):
        assert pigeonhole_positions((0, 1, 1, 0, 1), 2, 3) == (1, [1, 2, 4])
        with pytest.raises(InvalidInput):
            pigeonhole_positions((0, 1), 2, 3)


class TestTaylorCorollary:
    @pytest.mark.parametrize("key", ["majority3", "minority3", "min-chain"])
    def test_common_successor(self, key):
        t = builtin(key)
        system = find_taylor_system(t, range(t.domain_size))
        for i in range(t.arity):
            p = coordinate_digraph(t, i).graph
            for u, v in product(range(t.domain_size), repeat=2):
                w = taylor_corollary_witness(t, system, i, u, v)
                assert p.has_edge(u, w) and p.has_edge(v, w)

    def test_false_row(self):
        system = TaylorSystem((("xx", "yx"), ("xx", "xy")))
        with pytest.raises(VerificationFailed):
            taylor_corollary_witness(builtin("projection:0:2"), system, 0, 0, 1)


class TestPipeline:
    def test_looped_pair(self, looped_pair, min_chain):
        report = strong_loop_pipeline(min_chain, looped_pair)
        assert (report.loop_vertex, report.k) == (0, 0)
        assert report.oracle_vertex == 0
        assert report.oracle_term == "(0,0)"
        assert report.fanin == [0, 0]

    def test_hypothesis_order(self):
        with pytest.raises(HypothesisError) as exc:
            strong_loop_pipeline(builtin("projection:0:2:3"), complete_digraph(3, loops=True))
        assert exc.value.hypothesis == "fan-in"
        with pytest.raises(HypothesisError) as exc:
            strong_loop_pipeline(builtin("min-chain:3"), cycle(3))
        assert exc.value.hypothesis == "compatibility"
        with pytest.raises(HypothesisError) as exc:
            strong_loop_pipeline(builtin("min-chain:3"), Digraph(3, frozenset({(0, 1), (1, 2)})))
        assert exc.value.hypothesis == "strong connectivity"

    def test_missing_cycle_lengths(self):
        assert largest_missing_cycle_length(TWO_THREE) == 1
        assert largest_missing_cycle_length(complete_digraph(2, loops=True)) == 0
        assert largest_missing_cycle_length(complete_digraph(3, loops=False)) == 1

    def test_every_compatible_digraph_on_three_vertices(self):
        """Strongly connected digraphs of algebraic length 1 compatible with min have loops."""
        t = builtin("min-chain:3")
        pairs = list(product(range(3), repeat=2))
        checked = 0
        for mask in range(1, 2 ** len(pairs)):
            g = Digraph(3, frozenset(p for j, p in enumerate(pairs) if mask >> j & 1))
            if not (is_strongly_connected(g) and is_compatible_graph(t, g) and algebraic_length_one(g)):
                continue
            report = strong_loop_pipeline(t, g)
            assert report.loop_vertex is not None
            checked += 1
        assert checked > 0
