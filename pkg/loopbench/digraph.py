"""Finite digraphs: strong components, algebraic length, relational powers and walks.

Adjacency is a boolean numpy matrix; boolean products go through int64 matmul
followed by ``> 0`` so powers never overflow.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from loopbench.errors import HypothesisError, InvalidInput

logger = logging.getLogger("loopbench")

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    vertex_count: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)
    undirected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(u), int(v)) for u, v in self.edges))
        if self.vertex_count < 0:
            raise InvalidInput(f"vertex count must be non-negative, got {self.vertex_count}")
        for u, v in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InvalidInput(f"edge ({u}, {v}) outside [0, {self.vertex_count})")
        if self.undirected and any((v, u) not in self.edges for u, v in self.edges):
            raise InvalidInput("graph declared undirected but its edge set is not symmetric")

    @classmethod
    def from_adjacency(cls, matrix: np.ndarray, undirected: bool = False) -> "Digraph":
        us, vs = np.nonzero(matrix)
        return cls(int(matrix.shape[0]), frozenset(zip(us.tolist(), vs.tolist())), undirected)

    @classmethod
    def undirected_from(cls, vertex_count: int, pairs: Iterable[Edge]) -> "Digraph":
        edges = set()
        for u, v in pairs:
            edges.add((u, v))
            edges.add((v, u))
        return cls(vertex_count, frozenset(edges), True)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=bool)
        for u, v in self.edges:
            a[u, v] = True
        a.setflags(write=False)
        return a

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def successors(self, u: int) -> List[int]:
        return np.flatnonzero(self.adjacency[u]).tolist()

    def loops(self) -> List[int]:
        return sorted(u for u, v in self.edges if u == v)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def to_networkx(self) -> nx.DiGraph:
        h = nx.DiGraph()
        h.add_nodes_from(range(self.vertex_count))
        h.add_edges_from(self.sorted_edges())
        return h

    def induced(self, vertices: Sequence[int]) -> Tuple["Digraph", Tuple[int, ...]]:
        """Subgraph on ``vertices`` relabeled to 0..len-1 in sorted order."""
        kept = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(kept)}
        edges = frozenset((index[u], index[v]) for u, v in self.edges if u in index and v in index)
        return Digraph(len(kept), edges, self.undirected), kept


def bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def bool_power(a: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(a.shape[0], dtype=bool)
    base = a
    while k:
        if k & 1:
            result = bool_product(result, base)
        base = bool_product(base, base)
        k >>= 1
    return result


def scc_decompose(g: Digraph) -> List[List[int]]:
    """Strong components in topological order of the condensation.

    Ties between incomparable components go to the one with the smaller
    least vertex.
    """
    if g.vertex_count == 0:
        return []
    cond = nx.condensation(g.to_networkx())
    members = {c: sorted(cond.nodes[c]["members"]) for c in cond.nodes}
    order = nx.lexicographical_topological_sort(cond, key=lambda c: members[c][0])
    return [members[c] for c in order]


def is_strongly_connected(g: Digraph) -> bool:
    return g.vertex_count > 0 and len(scc_decompose(g)) == 1


def algebraic_length(g: Digraph) -> int:
    """gcd of all cycle lengths of a strongly connected digraph."""
    if not is_strongly_connected(g):
        raise InvalidInput("algebraic length is only computed for strongly connected digraphs")
    if not g.edges:
        raise InvalidInput("algebraic length needs at least one edge")
    level = nx.single_source_shortest_path_length(g.to_networkx(), 0)
    d = 0
    for u, v in g.sorted_edges():
        d = gcd(d, abs(level[u] + 1 - level[v]))
    return d


def algebraic_length_one(g: Digraph) -> bool:
    return algebraic_length(g) == 1


def relational_power(g: Digraph, k: int) -> Digraph:
    if k < 1:
        raise InvalidInput(f"relational power needs k >= 1, got {k}")
    return Digraph.from_adjacency(bool_power(g.adjacency, k), g.undirected)


def wielandt_bound(m: int) -> int:
    return (m - 1) ** 2 + 1


def uniform_walk_constant(g: Digraph) -> int:
    """Least K such that every pair of vertices is joined by a k-walk for all k >= K."""
    if not is_strongly_connected(g):
        raise HypothesisError("strong connectivity", "uniform walk constant needs a strongly connected digraph")
    if not g.edges or not algebraic_length_one(g):
        raise HypothesisError("algebraic length", "uniform walk constant needs algebraic length 1")
    a = g.adjacency
    p = a
    for k in range(1, wielandt_bound(g.vertex_count) + 1):
        if p.all():
            return k
        p = bool_product(p, a)
    raise HypothesisError(
        "algebraic length",
        f"no complete power up to the Wielandt bound {wielandt_bound(g.vertex_count)}",
    )


def _lex_walk(
    adj: np.ndarray, reach: Callable[[int], np.ndarray], u: int, v: int, k: int
) -> Optional[Tuple[int, ...]]:
    # smallest successor that can still reach v in the remaining steps
    if not reach(k)[u, v]:
        return None
    walk = [u]
    cur = u
    for remaining in range(k, 0, -1):
        nxt = reach(remaining - 1)[:, v]
        for w in np.flatnonzero(adj[cur]):
            if nxt[w]:
                cur = int(w)
                break
        walk.append(cur)
    return tuple(walk)


def find_walk(g: Digraph, u: int, v: int, k: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically smallest k-walk from u to v, or None."""
    if k < 0:
        raise InvalidInput(f"walk length must be non-negative, got {k}")
    powers = [np.eye(g.vertex_count, dtype=bool)]
    for _ in range(k):
        powers.append(bool_product(powers[-1], g.adjacency))
    return _lex_walk(g.adjacency, powers.__getitem__, u, v, k)


class WalkTable:
    """Deterministic walk(u, v, k) for K <= k <= k_max.

    Powers of the adjacency are kept only up to K; from there on every power
    is the complete relation.
    """

    def __init__(self, graph: Digraph, k_max: int):
        self.graph = graph
        self.K = uniform_walk_constant(graph)
        if k_max < self.K:
            raise InvalidInput(f"k_max {k_max} is below the uniform walk constant {self.K}")
        self.k_max = k_max
        powers = [np.eye(graph.vertex_count, dtype=bool)]
        for _ in range(self.K):
            powers.append(bool_product(powers[-1], graph.adjacency))
        self._powers = powers
        self._walks: Dict[Tuple[int, int, int], Tuple[int, ...]] = {}

    def _reach(self, k: int) -> np.ndarray:
        return self._powers[min(k, self.K)]

    def walk(self, u: int, v: int, k: int) -> Tuple[int, ...]:
        if not self.K <= k <= self.k_max:
            raise InvalidInput(f"walk length {k} outside [{self.K}, {self.k_max}]")
        key = (u, v, k)
        cached = self._walks.get(key)
        if cached is None:
            cached = _lex_walk(self.graph.adjacency, self._reach, u, v, k)
            self._walks[key] = cached
        return cached


def build_walk_table(g: Digraph, k_max: int) -> WalkTable:
    return WalkTable(g, k_max)


def cycle_lengths(g: Digraph, max_len: int) -> Set[int]:
    """Lengths l <= max_len for which some closed l-walk exists."""
    found = set()
    if g.vertex_count == 0:
        return found
    p = g.adjacency
    for length in range(1, max_len + 1):
        if np.diagonal(p).any():
            found.add(length)
        p = bool_product(p, g.adjacency)
    return found


def has_cycle_walks_from(g: Digraph, lower: int) -> bool:
    """True iff g has a closed walk of every length >= lower.

    Exact: lengths of closed walks are eventually all integers only when some
    strong component has algebraic length 1, and past that component's walk
    constant nothing is missing.
    """
    if lower < 1:
        raise InvalidInput(f"lower bound must be at least 1, got {lower}")
    saturation = []
    for comp in scc_decompose(g):
        sub, _ = g.induced(comp)
        if sub.edges and algebraic_length_one(sub):
            saturation.append(uniform_walk_constant(sub))
    if not saturation:
        return False
    bound = max(lower, min(saturation))
    return set(range(lower, bound + 1)) <= cycle_lengths(g, bound)


def has_all_cycle_lengths(g: Digraph) -> bool:
    """Closed walks of every length greater than one."""
    return has_cycle_walks_from(g, 2)


def has_all_cycle_lengths_with_loops(g: Digraph) -> bool:
    """Closed walks of every length, loops included."""
    return has_cycle_walks_from(g, 1)


def shortest_lex_path(g: Digraph, source: int, target: int) -> Optional[Tuple[int, ...]]:
    """Shortest path with the smallest vertex chosen at every step."""
    dist = nx.single_source_shortest_path_length(g.to_networkx().reverse(copy=False), target)
    if source not in dist:
        return None
    path = [source]
    cur = source
    while cur != target:
        cur = next(w for w in g.successors(cur) if dist.get(w) == dist[cur] - 1)
        path.append(cur)
    return tuple(path)


def _closed_walk(g: Digraph, length: int) -> Optional[Tuple[int, ...]]:
    diag = np.diagonal(bool_power(g.adjacency, length))
    starts = np.flatnonzero(diag)
    if starts.size == 0:
        return None
    v = int(starts[0])
    return find_walk(g, v, v, length)


def _walk_edges(walk: Sequence[int]) -> Set[Edge]:
    return {(walk[i], walk[i + 1]) for i in range(len(walk) - 1)}


def _relabeled(edges: Set[Edge], extra: Iterable[int], undirected: bool) -> Tuple[Digraph, Tuple[int, ...]]:
    kept = tuple(sorted({w for e in edges for w in e} | set(extra)))
    index = {v: i for i, v in enumerate(kept)}
    return Digraph(len(kept), frozenset((index[u], index[v]) for u, v in edges), undirected), kept


def finite_core(g: Digraph, anchors: Iterable[int] = ()) -> Tuple[Digraph, Tuple[int, ...]]:
    """Finite strongly connected subdigraph with closed walks of every length >= 2.

    Two coprime cycles are joined through a root vertex; then one cycle of
    every length below the saturation point of that pair and every anchor
    are connected to the root in both directions.

    Returns:
        (core, kept) where core is relabeled to 0..len(kept)-1 and kept[i]
        is the original vertex behind core vertex i.
    """
    anchors = sorted(set(anchors))
    for a in anchors:
        if not 0 <= a < g.vertex_count:
            raise InvalidInput(f"anchor {a} is not a vertex")
    if not is_strongly_connected(g):
        raise HypothesisError("strong connectivity", "finite core needs a strongly connected digraph")
    if not has_all_cycle_lengths(g):
        raise HypothesisError("cycle lengths", "digraph lacks closed walks of some length >= 2")

    bound = max(3, wielandt_bound(g.vertex_count) + 1)
    lengths = sorted(cycle_lengths(g, bound) - {1})
    pair = next(
        (l1, l2) for j, l2 in enumerate(lengths) for l1 in lengths[:j] if gcd(l1, l2) == 1
    )
    first = _closed_walk(g, pair[0])
    second = _closed_walk(g, pair[1])
    root = first[0]

    edges: Set[Edge] = _walk_edges(first) | _walk_edges(second)

    def connect(u: int):
        if u == root:
            return
        edges.update(_walk_edges(shortest_lex_path(g, root, u)))
        edges.update(_walk_edges(shortest_lex_path(g, u, root)))

    connect(second[0])
    base, _ = _relabeled(edges, (), False)
    saturation = uniform_walk_constant(base)
    present = cycle_lengths(base, saturation)
    for length in range(2, saturation):
        if length in present:
            continue
        walk = _closed_walk(g, length)
        edges |= _walk_edges(walk)
        connect(walk[0])
    for a in anchors:
        connect(a)

    symmetric = g.undirected and all((v, u) in edges for u, v in edges)
    core, kept = _relabeled(edges, anchors, symmetric)
    logger.info("Finite core keeps %d of %d vertices", len(kept), g.vertex_count)
    return core, kept


def odd_girth(g: Digraph) -> Optional[int]:
    """Length of the shortest odd cycle of an undirected graph, or None if bipartite."""
    h = nx.Graph(g.sorted_edges())
    best = None
    for s in sorted(h.nodes):
        dist = nx.single_source_shortest_path_length(h, s)
        for u, v in h.edges:
            if u in dist and v in dist and dist[u] == dist[v]:
                candidate = 2 * dist[u] + 1
                if best is None or candidate < best:
                    best = candidate
    return best


def odd_girth_reduce(g: Digraph) -> Tuple[int, Digraph]:
    if not g.undirected:
        raise HypothesisError("undirected", "odd girth reduction needs an undirected graph")
    if g.loops():
        raise HypothesisError("loops", f"graph already has loops at {g.loops()}")
    if not is_strongly_connected(g):
        raise HypothesisError("connected", "odd girth reduction needs a connected graph")
    if nx.is_bipartite(nx.Graph(g.sorted_edges())):
        raise HypothesisError("bipartite", "graph has no odd cycle")
    l = odd_girth(g)
    reduced = g if l == 3 else relational_power(g, l - 2)
    if not g.edges <= reduced.edges:
        raise HypothesisError("bipartite", "power lost an original edge")
    logger.info("Odd girth %d, reduced graph has %d edges", l, len(reduced.edges))
    return l, reduced
