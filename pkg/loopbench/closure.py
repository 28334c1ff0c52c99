"""Subpower closure with derivation tracking, and the loop oracle built on it."""

import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from loopbench.algebra import OpTable, is_compatible_graph
from loopbench.digraph import Digraph
from loopbench.errors import BudgetExceeded, InvalidInput, VerificationFailed

logger = logging.getLogger("loopbench")

DEFAULT_CLOSURE_SIZE = 10**7


@dataclass(frozen=True)
class Generator:
    index: int


@dataclass(frozen=True)
class Apply:
    op: int
    children: Tuple["TermDag", ...]


TermDag = Union[Generator, Apply]


def evaluate_term(
    term: TermDag,
    generators: Sequence[Sequence[int]],
    ops: Sequence[OpTable],
    memo: Optional[Dict[int, Tuple[int, ...]]] = None,
) -> Tuple[int, ...]:
    """Coordinatewise value of a derivation over the generator tuples."""
    memo = {} if memo is None else memo
    key = id(term)
    if key in memo:
        return memo[key]
    if isinstance(term, Generator):
        value = tuple(generators[term.index])
    else:
        op = ops[term.op]
        if len(term.children) != op.arity:
            raise InvalidInput(f"{op.label} applied to {len(term.children)} children")
        args = [evaluate_term(c, generators, ops, memo) for c in term.children]
        value = tuple(op(*col) for col in zip(*args))
    memo[key] = value
    return value


def format_term(term: TermDag, generator_names: Sequence[str], op_names: Sequence[str]) -> str:
    """Prefix notation, e.g. ``t(x, t(x, y))``."""
    if isinstance(term, Generator):
        return generator_names[term.index]
    inner = ", ".join(format_term(c, generator_names, op_names) for c in term.children)
    return f"{op_names[term.op]}({inner})"


def term_size(term: TermDag) -> int:
    """Number of distinct nodes in the DAG."""
    seen = set()
    stack = [term]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Apply):
            stack.extend(node.children)
    return len(seen)


class Closure(NamedTuple):
    elements: List[Tuple[int, ...]]
    derivations: Optional[Dict[Tuple[int, ...], TermDag]]


def _index_block(old: int, total: int, arity: int, j: int) -> np.ndarray:
    """Argument index tuples with the first frontier argument at position j.

    Positions before j range over old elements, j over the frontier
    [old, total), positions after j over everything; rows are lexicographic.
    """
    ranges = [np.arange(old)] * j + [np.arange(old, total)] + [np.arange(total)] * (arity - j - 1)
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def subpower_closure(
    ops: Sequence[OpTable],
    generators: Sequence[Sequence[int]],
    track: bool = False,
    cap: int = DEFAULT_CLOSURE_SIZE,
) -> Closure:
    """Least set of tuples containing the generators and closed under every op.

    Semi-naive rounds: each round only forms argument tuples that use at least
    one element found in the previous round. Elements are listed in discovery
    order, which is deterministic, so derivations are reproducible; the first
    derivation found for an element is kept.
    """
    if not ops:
        raise InvalidInput("closure needs at least one operation")
    domain = ops[0].domain_size
    if any(op.domain_size != domain for op in ops):
        raise InvalidInput("operations disagree on the domain")
    gens = [tuple(int(v) for v in g) for g in generators]
    if not gens:
        return Closure([], {} if track else None)
    arity = len(gens[0])
    for g in gens:
        if len(g) != arity:
            raise InvalidInput("generator tuples must share one arity")
        if min(g) < 0 or max(g) >= domain:
            raise InvalidInput(f"generator {g} leaves the domain [0, {domain})")

    index: Dict[Tuple[int, ...], int] = {}
    elements: List[Tuple[int, ...]] = []
    terms: List[TermDag] = []
    for i, g in enumerate(gens):
        if g not in index:
            index[g] = len(elements)
            elements.append(g)
            terms.append(Generator(i))
    if len(elements) > cap:
        raise BudgetExceeded("closure", len(elements), cap)

    old = 0
    rounds = 0
    while old < len(elements):
        total = len(elements)
        table = np.array(elements, dtype=np.int64)
        fresh: List[Tuple[int, ...]] = []
        fresh_terms: List[TermDag] = []
        for op_idx, op in enumerate(ops):
            for j in range(op.arity):
                block = _index_block(old, total, op.arity, j)
                if block.size == 0:
                    continue
                image = np.stack(
                    [op.apply_columns([table[block[:, a], c] for a in range(op.arity)]) for c in range(arity)],
                    axis=1,
                )
                for row, args in zip(image.tolist(), block.tolist()):
                    tup = tuple(row)
                    if tup in index:
                        continue
                    index[tup] = total + len(fresh)
                    fresh.append(tup)
                    if track:
                        fresh_terms.append(Apply(op_idx, tuple(terms[a] for a in args)))
                    if total + len(fresh) > cap:
                        raise BudgetExceeded("closure", total + len(fresh), cap, frontier=total - old)
        rounds += 1
        logger.debug("Closure round %d: %d new, %d total", rounds, len(fresh), total + len(fresh))
        elements.extend(fresh)
        if track:
            terms.extend(fresh_terms)
        old = total

    derivations = dict(zip(elements, terms)) if track else None
    return Closure(elements, derivations)


def loop_oracle(
    t: OpTable, g: Digraph, cap: int = DEFAULT_CLOSURE_SIZE
) -> Optional[Tuple[int, TermDag]]:
    """Loop (a, a) in the closure of g's edges under t, with its derivation.

    Generators are g's edges in sorted order. A compatible t closes nothing
    new, so only g's own loops are scanned.
    """
    edges = g.sorted_edges()
    if is_compatible_graph(t, g):
        loops = g.loops()
        if not loops:
            return None
        v = loops[0]
        return v, Generator(edges.index((v, v)))
    closure = subpower_closure([t], edges, track=True, cap=cap)
    for pair in closure.elements:
        if pair[0] == pair[1]:
            term = closure.derivations[pair]
            if evaluate_term(term, edges, [t]) != pair:
                raise VerificationFailed("derivation", f"term for {pair} does not evaluate back")
            return pair[0], term
    return None
