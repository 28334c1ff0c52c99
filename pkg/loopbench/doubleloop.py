"""Local free algebra on two generators, the quadruple relation Q and double loop terms.

A free element is a binary term operation restricted to X x X, stored as its
table over the pairs (z0, z1) of X in lexicographic order; two terms with
the same table are the same element. A quadruple of free elements is stored
flat as the concatenation of its four tables, so Q is an ordinary subpower
of the base algebra and the closure machinery applies unchanged.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from loopbench.algebra import OpTable, TaylorSystem, find_taylor_system
from loopbench.closure import DEFAULT_CLOSURE_SIZE, TermDag, evaluate_term, format_term, subpower_closure
from loopbench.config import Budgets
from loopbench.digraph import Digraph
from loopbench.equations import Equation, TermOperation, apply, check_local_satisfaction
from loopbench.errors import BudgetExceeded, InvalidInput, VerificationFailed
from loopbench.models import DoubleLoopReport

logger = logging.getLogger("loopbench")

# Columns [a0, a1, b0, b1] with a0 != a1 or b0 != b1, lexicographic with x < y.
DOUBLE_LOOP_COLUMNS: Tuple[str, ...] = tuple(
    "".join(c) for c in product("xy", repeat=4) if c[0] != c[1] or c[2] != c[3]
)
DOUBLE_LOOP_ROWS: Tuple[str, ...] = tuple("".join(c[r] for c in DOUBLE_LOOP_COLUMNS) for r in range(4))
TERM_VARIABLES: Tuple[str, ...] = tuple(f"z{j}" for j in range(len(DOUBLE_LOOP_COLUMNS)))

Quad = Tuple[int, int, int, int]


@dataclass
class FreeAlgebra:
    ops: List[OpTable]
    subset: Tuple[int, ...]
    elements: List[Tuple[int, ...]]
    derivations: Dict[Tuple[int, ...], TermDag]

    def __post_init__(self):
        self._index = {e: i for i, e in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def x(self) -> int:
        return 0

    @property
    def y(self) -> int:
        # x and y coincide when X has a single element
        return 0 if self.size == 1 else 1

    def index(self, table: Sequence[int]) -> int:
        key = tuple(int(v) for v in table)
        if key not in self._index:
            raise InvalidInput(f"{list(key)} is not an element of the local free algebra")
        return self._index[key]

    def apply(self, op: int, args: Sequence[int]) -> int:
        """Index of ops[op] applied pointwise to the elements ``args``."""
        tables = [self.elements[a] for a in args]
        return self.index([self.ops[op](*col) for col in zip(*tables)])

    def name(self, element: int) -> str:
        op_names = ["t"] if len(self.ops) == 1 else [f"t{k}" for k in range(len(self.ops))]
        return format_term(self.derivations[self.elements[element]], ["x", "y"], op_names)


def _as_ops(alg) -> List[OpTable]:
    return [alg] if isinstance(alg, OpTable) else list(alg)


def local_free_algebra(
    alg,
    subset: Sequence[int],
    cap: int = DEFAULT_CLOSURE_SIZE,
    max_subset: int = Budgets().double_loop_subset,
    max_domain: int = Budgets().double_loop_domain,
) -> FreeAlgebra:
    """Binary term operations X^2 -> A of the algebra, with one derivation each.

    Args:
        alg: An OpTable or a sequence of OpTables on one domain.
        subset: The nonempty set X.
        cap: Closure size limit.
        max_subset, max_domain: Size guards on |X| and |A|.
    """
    ops = _as_ops(alg)
    if not ops:
        raise InvalidInput("the algebra needs at least one operation")
    xs = tuple(sorted(set(int(v) for v in subset)))
    domain = ops[0].domain_size
    if not xs:
        raise InvalidInput("subset X must be nonempty")
    if xs[0] < 0 or xs[-1] >= domain:
        raise InvalidInput(f"subset X leaves the domain [0, {domain})")
    if len(xs) > max_subset:
        raise BudgetExceeded("double-loop subset", len(xs), max_subset)
    if domain > max_domain:
        raise BudgetExceeded("double-loop domain", domain, max_domain)

    pairs = list(product(xs, repeat=2))
    x = tuple(z0 for z0, _ in pairs)
    y = tuple(z1 for _, z1 in pairs)
    closure = subpower_closure(ops, [x, y], track=True, cap=cap)
    logger.info("Local free algebra on %s has %d elements", list(xs), len(closure.elements))
    return FreeAlgebra(ops, xs, closure.elements, closure.derivations)


@dataclass
class QuadRelation:
    free: FreeAlgebra
    elements: List[Quad]
    derivations: Dict[Quad, TermDag]
    generators: List[Tuple[int, ...]]  # flat, in DOUBLE_LOOP_COLUMNS order

    def __contains__(self, quad) -> bool:
        return tuple(quad) in self.derivations


def _flat(free: FreeAlgebra, quad: Sequence[int]) -> Tuple[int, ...]:
    return tuple(v for e in quad for v in free.elements[e])


def generate_Q(free: FreeAlgebra, cap: int = DEFAULT_CLOSURE_SIZE) -> QuadRelation:
    """Closure in F^4 of the 12 column quadruples under the pointwise operations."""
    letter = {"x": free.x, "y": free.y}
    generators = [_flat(free, [letter[c] for c in col]) for col in DOUBLE_LOOP_COLUMNS]
    closure = subpower_closure(free.ops, generators, track=True, cap=cap)
    width = len(free.elements[0])
    elements = []
    derivations = {}
    for flat in closure.elements:
        quad = tuple(free.index(flat[k * width:(k + 1) * width]) for k in range(4))
        elements.append(quad)
        derivations[quad] = closure.derivations[flat]
    logger.info("Q has %d quadruples", len(elements))
    return QuadRelation(free, elements, derivations, generators)


def find_double_loop(q: QuadRelation) -> Optional[Tuple[int, int, TermDag]]:
    """First quadruple [a, a, b, b] of Q in discovery order, with its derivation."""
    for quad in q.elements:
        if quad[0] == quad[1] and quad[2] == quad[3]:
            return quad[0], quad[2], q.derivations[quad]
    return None


def double_loop_equations(symbol: str = "d") -> List[Equation]:
    r0, r1, r2, r3 = DOUBLE_LOOP_ROWS
    return [Equation(apply(symbol, r0), apply(symbol, r1)), Equation(apply(symbol, r2), apply(symbol, r3))]


def _grouped_row(row: str, symbol: str) -> str:
    groups: Dict[str, str] = {}
    for col, letter in zip(DOUBLE_LOOP_COLUMNS, row):
        groups[col[:2]] = groups.get(col[:2], "") + letter
    return f"{symbol}({','.join(groups.values())})"


def grouped_equations(symbol: str = "d") -> List[str]:
    """The equations with variables grouped by the columns' (a0, a1) part."""
    r0, r1, r2, r3 = (_grouped_row(r, symbol) for r in DOUBLE_LOOP_ROWS)
    return [f"{r0} = {r1}", f"{r2} = {r3}"]


@dataclass
class DoubleLoopTerm:
    term: TermOperation
    text: str
    equations: List[Equation]
    verified: bool


def extract_double_loop_term(
    derivation: TermDag, alg, subset: Sequence[int], symbol: str = "d"
) -> DoubleLoopTerm:
    """Read the 12-ary term d off a derivation over Q's generators and check it on X.

    Raises:
        VerificationFailed: when d misses a double loop equation on X.
    """
    ops = _as_ops(alg)
    d = TermOperation(derivation, len(DOUBLE_LOOP_COLUMNS), ops)
    equations = double_loop_equations(symbol)
    verified = check_local_satisfaction({symbol: d}, equations, subset)
    op_names = ["t"] if len(ops) == 1 else [f"t{k}" for k in range(len(ops))]
    text = format_term(derivation, TERM_VARIABLES, op_names)
    if not verified:
        raise VerificationFailed("double loop equations", f"{symbol} = {text} fails on {sorted(set(subset))}")
    return DoubleLoopTerm(d, text, equations, verified)


def double_loop_graph(q: QuadRelation) -> Digraph:
    """Undirected graph on F with a0 - a1 whenever [a0, a1, b, b] is in Q."""
    edges = {(a0, a1) for a0, a1, b0, b1 in q.elements if b0 == b1}
    return Digraph(q.free.size, frozenset(edges), undirected=True)


def _other(free: FreeAlgebra, e: int) -> int:
    return free.y if e == free.x else free.x


def check_edge_absorption(q: QuadRelation, system: TaylorSystem) -> List[str]:
    """Claimed edges t(a) - t(a') for a, a' in {x, y}^n agreeing exactly at i.

    Row i of ``system`` supplies b, b'; the quadruple [t(a), t(a'), t(b), t(b')]
    must lie in Q with t(b) = t(b') in F. Returns readable failures.
    """
    free = q.free
    if len(free.ops) != 1 or free.ops[0].arity != system.arity:
        raise InvalidInput("edge absorption needs a single operation of the system's arity")
    letter = {"x": free.x, "y": free.y}
    failures = []
    for i, (left, right) in enumerate(system.rows):
        b = free.apply(0, [letter[c] for c in left])
        b2 = free.apply(0, [letter[c] for c in right])
        for a in product((free.x, free.y), repeat=system.arity):
            a2 = [a[j] if j == i else _other(free, a[j]) for j in range(system.arity)]
            quad = (free.apply(0, a), free.apply(0, a2), b, b2)
            if quad not in q or b != b2:
                failures.append(f"row {i}: {[free.name(e) for e in quad]} is not an edge witness")
    return failures


def free_taylor_propagates(free: FreeAlgebra, system: TaylorSystem) -> bool:
    """Every row of ``system`` holds in F with x, y substituted for the pattern letters."""
    if len(free.ops) != 1 or free.ops[0].arity != system.arity:
        raise InvalidInput("Taylor propagation needs a single operation of the system's arity")
    letter = {"x": free.x, "y": free.y}
    for left, right in system.rows:
        if free.apply(0, [letter[c] for c in left]) != free.apply(0, [letter[c] for c in right]):
            return False
    if system.idempotent_required:
        return all(free.apply(0, [e] * system.arity) == e for e in (free.x, free.y))
    return True


def double_loop_report(t: OpTable, subset: Sequence[int], budgets: Budgets = Budgets()) -> DoubleLoopReport:
    """Free algebra, Q, double loop search and term extraction in one report."""
    xs = sorted(set(subset))
    free = local_free_algebra(
        t, xs, budgets.closure_size, budgets.double_loop_subset, budgets.double_loop_domain
    )
    q = generate_Q(free, budgets.closure_size)
    system = find_taylor_system(t, xs, require_idempotent=False)
    propagates = None if system is None else free_taylor_propagates(free, system)
    report = DoubleLoopReport(
        op=t.label,
        subset=xs,
        free_size=free.size,
        q_size=len(q.elements),
        found=False,
        loop_in_edge_graph=bool(double_loop_graph(q).loops()),
        taylor_propagates=propagates,
        equations=[str(e) for e in double_loop_equations()],
    )
    found = find_double_loop(q)
    if found is None:
        return report
    a, b, derivation = found
    if evaluate_term(derivation, q.generators, free.ops) != _flat(free, (a, a, b, b)):
        raise VerificationFailed("derivation", "double loop derivation does not evaluate back")
    d = extract_double_loop_term(derivation, t, xs)
    return report.model_copy(update={
        "found": True,
        "a": free.name(a),
        "b": free.name(b),
        "term": d.text,
        "grouped": "; ".join(grouped_equations()),
        "verified": d.verified,
    })
