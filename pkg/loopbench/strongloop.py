"""Coordinate digraphs P(t, i), their transitive closures and the strong loop pipeline.

P(t, i) has an edge x_i -> t(x_0, ..., x_{n-1}) for every argument tuple.
The pipeline checks the fan-in hypothesis on every closure, then either
reports a loop of the input digraph or builds the loop-free power G^(k) and
its witnesses, which for valid inputs cannot happen.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from loopbench.algebra import (
    DEFAULT_STAR_LEAVES,
    OpTable,
    StarSubstitution,
    TaylorSystem,
    is_compatible_graph,
    is_idempotent,
)
from loopbench.closure import DEFAULT_CLOSURE_SIZE, format_term, loop_oracle
from loopbench.digraph import (
    Digraph,
    algebraic_length_one,
    cycle_lengths,
    is_strongly_connected,
    relational_power,
    shortest_lex_path,
    wielandt_bound,
)
from loopbench.errors import BudgetExceeded, HypothesisError, InvalidInput, VerificationFailed
from loopbench.models import StrongLoopReport

logger = logging.getLogger("loopbench")


@dataclass(frozen=True)
class CoordinateDigraph:
    op: OpTable
    coordinate: int
    graph: Digraph


def _check_coordinate(t: OpTable, i: int):
    if not 0 <= i < t.arity:
        raise InvalidInput(f"coordinate {i} outside [0, {t.arity})")


def coordinate_digraph(t: OpTable, i: int) -> CoordinateDigraph:
    """P(t, i) by enumerating all m**n argument tuples."""
    _check_coordinate(t, i)
    args = np.indices(t.values.shape).reshape(t.arity, -1)
    edges = frozenset(zip(args[i].tolist(), t.values.reshape(-1).tolist()))
    return CoordinateDigraph(t, i, Digraph(t.domain_size, edges))


def transitive_closure(g: Digraph) -> Digraph:
    """u -> v whenever a walk of length >= 1 leads from u to v."""
    closed = nx.transitive_closure(g.to_networkx(), reflexive=False)
    return Digraph(g.vertex_count, frozenset(closed.edges()), g.undirected)


def coordinate_closures(t: OpTable) -> List[Digraph]:
    return [transitive_closure(coordinate_digraph(t, i).graph) for i in range(t.arity)]


def strong_witnesses(t: OpTable, g: Digraph) -> Optional[List[Tuple[int, int]]]:
    """Per coordinate, the smallest edge of g that is also an edge of the closure of P(t, i)."""
    if g.vertex_count != t.domain_size:
        raise InvalidInput(f"digraph has {g.vertex_count} vertices, operation domain is {t.domain_size}")
    witnesses = []
    for i, closure in enumerate(coordinate_closures(t)):
        common = sorted(g.edges & closure.edges)
        if not common:
            logger.debug("Coordinate %d: no common edge", i)
            return None
        witnesses.append(common[0])
    return witnesses


def fanin_vertex(t: OpTable, i: int, subset: Sequence[int], closure: Optional[Digraph] = None) -> Optional[int]:
    """Some b with a closure edge x -> b for every x in subset.

    Elements are merged in increasing order: the running b and the next x
    are replaced by the smallest w with closure edges from both.
    """
    _check_coordinate(t, i)
    closure = transitive_closure(coordinate_digraph(t, i).graph) if closure is None else closure
    xs = sorted(set(subset))
    if not xs:
        return 0
    reach = closure.adjacency
    first = xs[0]
    if reach[first, first]:
        b = first
    else:
        succ = np.flatnonzero(reach[first])
        if succ.size == 0:
            return None
        b = int(succ[0])
    for x in xs[1:]:
        common = np.flatnonzero(reach[b] & reach[x])
        if common.size == 0:
            logger.debug("Coordinate %d: %d and %d have no common closure successor", i, b, x)
            return None
        b = int(common[0])
    return b


def fanin_failures(t: OpTable) -> List[Tuple[int, int, int]]:
    """(i, u, v) with u <= v lacking any w with closure edges u -> w and v -> w."""
    failures = []
    for i, closure in enumerate(coordinate_closures(t)):
        reach = closure.adjacency.astype(np.int64)
        meets = (reach @ reach.T) > 0
        us, vs = np.nonzero(~meets)
        failures.extend((i, u, v) for u, v in zip(us.tolist(), vs.tolist()) if u <= v)
    return failures


def largest_missing_cycle_length(g: Digraph) -> int:
    """Largest k without a closed k-walk; 0 when g has a loop."""
    bound = wielandt_bound(g.vertex_count)
    present = cycle_lengths(g, bound)
    missing = [k for k in range(1, bound + 1) if k not in present]
    return missing[-1] if missing else 0


def closure_walk(t: OpTable, i: int, u: int, v: int) -> Optional[Tuple[int, ...]]:
    """A P(t, i)-walk of length >= 1 from u to v.

    The shortest lexicographic path for u != v; for u == v the loop, or else
    the way back through the smallest successor that returns to u.
    """
    p = coordinate_digraph(t, i).graph
    if u == v:
        if p.has_edge(u, u):
            return (u, u)
        back = [w for w in p.successors(u) if shortest_lex_path(p, w, u) is not None]
        if not back:
            return None
        return (u,) + shortest_lex_path(p, back[0], u)
    return shortest_lex_path(p, u, v)


def _edge_args(t: OpTable, i: int, u: int, v: int) -> Tuple[int, ...]:
    args = np.indices(t.values.shape).reshape(t.arity, -1)
    hits = np.flatnonzero((args[i] == u) & (t.values.reshape(-1) == v))
    if hits.size == 0:
        raise InvalidInput(f"{u} -> {v} is not an edge of P({t.label}, {i})")
    return tuple(int(a) for a in args[:, hits[0]])


def substitution_for_walk(
    t: OpTable, i: int, walk: Sequence[int], budget: int = DEFAULT_STAR_LEAVES
) -> StarSubstitution:
    """f of depth k = len(walk) - 1 with f([i]*k) = walk[0] and t^{*k}(f) = walk[-1].

    Step j uses the first argument tuple e with e[i] = walk[j], t(e) = walk[j+1];
    the block of first letter i recurses on the shorter walk, the other blocks
    are constant at e[c], which t^{*} keeps only for idempotent t.
    """
    _check_coordinate(t, i)
    if not walk:
        raise InvalidInput("walk must have at least one vertex")
    k = len(walk) - 1
    n = t.arity
    if n**k > budget:
        raise BudgetExceeded("star-power leaves", n**k, budget)
    table = np.array([walk[0]], dtype=np.int64)
    for depth in range(1, k + 1):
        e = _edge_args(t, i, walk[depth - 1], walk[depth])
        block = n ** (depth - 1)
        table = np.concatenate([table if c == i else np.full(block, e[c], dtype=np.int64) for c in range(n)])
    return StarSubstitution(k, n, table=table.tolist())


def pigeonhole_positions(x: Sequence[int], n: int, k: int) -> Tuple[int, List[int]]:
    """Smallest letter i occurring at least k times in x, with its first k positions."""
    if k < 1 or n < 1:
        raise InvalidInput("pigeonhole needs n >= 1 and k >= 1")
    if len(x) != (k - 1) * n + 1:
        raise InvalidInput(f"word must have length (k-1)n+1 = {(k - 1) * n + 1}, got {len(x)}")
    for i in range(n):
        positions = [p for p, a in enumerate(x) if a == i]
        if len(positions) >= k:
            return i, positions[:k]
    raise InvalidInput(f"word leaves the alphabet [0, {n})")


def taylor_corollary_witness(t: OpTable, system: TaylorSystem, i: int, u: int, v: int) -> int:
    """w = t(row i left with x:=u, y:=v) = t(row i right), a common P(t, i)-successor of u and v."""
    _check_coordinate(t, i)
    if system.arity != t.arity:
        raise InvalidInput(f"system for arity {system.arity}, operation has arity {t.arity}")
    left, right = system.rows[i]
    env = {"x": u, "y": v}
    w = t(*(env[c] for c in left))
    w2 = t(*(env[c] for c in right))
    if w != w2:
        raise VerificationFailed("taylor row", f"row {i} gives {w} and {w2} at x={u}, y={v}")
    return w


def strong_loop_pipeline(t: OpTable, g: Digraph, cap: int = DEFAULT_CLOSURE_SIZE) -> StrongLoopReport:
    """Loop of a strongly connected, compatible digraph of algebraic length 1.

    Raises:
        HypothesisError: naming the first failing hypothesis.
        VerificationFailed: when the loop-free power is reached.
    """
    if g.vertex_count != t.domain_size:
        raise InvalidInput(f"digraph has {g.vertex_count} vertices, operation domain is {t.domain_size}")
    if not is_idempotent(t):
        raise HypothesisError("idempotency", f"{t.label} is not idempotent")
    failures = fanin_failures(t)
    if failures:
        i, u, v = failures[0]
        raise HypothesisError("fan-in", f"coordinate {i}: {u} and {v} have no common closure successor")
    if not is_strongly_connected(g):
        raise HypothesisError("strong connectivity", "digraph is not strongly connected")
    if not is_compatible_graph(t, g):
        raise HypothesisError("compatibility", f"{t.label} is not compatible with the digraph")
    if not g.edges or not algebraic_length_one(g):
        raise HypothesisError("algebraic length", "digraph does not have algebraic length 1")

    closures = coordinate_closures(t)
    everything = range(t.domain_size)
    fanin = [fanin_vertex(t, i, everything, closure) for i, closure in enumerate(closures)]
    report = StrongLoopReport(op=t.label, witnesses=strong_witnesses(t, g), fanin=fanin)

    found = loop_oracle(t, g, cap)
    if g.loops():
        if found is None:
            raise VerificationFailed("oracle", f"digraph has loops at {g.loops()} but the oracle found none")
        vertex, term = found
        names = [f"({u},{v})" for u, v in g.sorted_edges()]
        return report.model_copy(update={
            "loop_vertex": g.loops()[0],
            "k": 0,
            "oracle_vertex": vertex,
            "oracle_term": format_term(term, names, ["t"]),
        })

    k = largest_missing_cycle_length(g)
    power = relational_power(g, k)
    pairs = []
    for i, b in enumerate(fanin):
        preds = np.flatnonzero(power.adjacency[:, b])
        if preds.size == 0 or not closures[i].has_edge(int(preds[0]), b):
            raise VerificationFailed("strong witnesses", f"coordinate {i}: no witness into {b} in G^({k})")
        pairs.append((int(preds[0]), b))
    logger.warning("No loop although all hypotheses hold; G^(%d) witnesses %s", k, pairs)
    raise VerificationFailed(
        "strong loop",
        f"G^({k}) has {len(power.edges)} edges and witnesses {pairs}; the oracle found "
        f"{'no loop' if found is None else f'a loop at {found[0]}'}",
    )
