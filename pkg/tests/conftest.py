"""Shared digraphs, operations and verified instances."""

from itertools import product

import pytest

from loopbench.algebra import builtin
from loopbench.config import ReducedParams
from loopbench.digraph import Digraph
from loopbench.loopfinder import prepare_instance


def complete_digraph(m: int, loops: bool) -> Digraph:
    return Digraph(m, frozenset((u, v) for u, v in product(range(m), repeat=2) if loops or u != v))


def cycle(m: int, undirected: bool = False) -> Digraph:
    pairs = [(i, (i + 1) % m) for i in range(m)]
    if undirected:
        return Digraph.undirected_from(m, pairs)
    return Digraph(m, frozenset(pairs))


# 2-cycle 0-1 and 3-cycle 0-2-3 sharing vertex 0
TWO_THREE = Digraph(4, frozenset({(0, 1), (1, 0), (0, 2), (2, 3), (3, 0)}))


@pytest.fixture
def two_three():
    return TWO_THREE


@pytest.fixture
def k3():
    return complete_digraph(3, loops=False)


@pytest.fixture
def looped_pair():
    return complete_digraph(2, loops=True)


@pytest.fixture
def min_chain():
    return builtin("min-chain")


@pytest.fixture
def min3():
    return builtin("min-chain:3")


@pytest.fixture
def majority():
    return builtin("majority3")


@pytest.fixture
def minority():
    return builtin("minority3")


@pytest.fixture
def k3_ctx(k3, min3):
    """Full parameters n=2, K=2 (N=39) on the loopless triangle; min is not compatible with it."""
    return prepare_instance(k3, min3, [[1, 0], [0, 1]], require_compatible=False)


@pytest.fixture
def reduced_ctx(looped_pair, min_chain):
    """W = R = L = 1 on the looped pair: N = 3 and every word passes."""
    return prepare_instance(looped_pair, min_chain, [[0, 1], [1, 1]], ReducedParams(W=1, R=1, L=1))


@pytest.fixture
def single_ctx():
    """n = 1 on a single looped vertex."""
    g = Digraph(1, frozenset({(0, 0)}))
    return prepare_instance(g, builtin("projection:0:1:1"), [[0]])
