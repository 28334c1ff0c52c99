"""Equations between terms and their local satisfaction on a subset."""

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from loopbench.algebra import OpTable, TaylorSystem
from loopbench.closure import Generator, TermDag
from loopbench.errors import InvalidInput


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Sym:
    """Application of a named operation symbol."""

    symbol: str
    args: Tuple["Expr", ...]


Expr = Union[Var, Sym]


@dataclass(frozen=True)
class Equation:
    left: Expr
    right: Expr

    def variables(self) -> List[str]:
        names: List[str] = []
        for side in (self.left, self.right):
            _collect(side, names)
        return names

    def __str__(self) -> str:
        return f"{format_expr(self.left)} = {format_expr(self.right)}"


def _collect(expr: Expr, names: List[str]):
    if isinstance(expr, Var):
        if expr.name not in names:
            names.append(expr.name)
    else:
        for a in expr.args:
            _collect(a, names)


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Var):
        return expr.name
    return f"{expr.symbol}({','.join(format_expr(a) for a in expr.args)})"


def apply(symbol: str, letters: str) -> Sym:
    """Shorthand: apply("t", "xyy") is t(x, y, y)."""
    return Sym(symbol, tuple(Var(c) for c in letters))


class TermOperation:
    """An n-ary operation given by a derivation over projections.

    Generator i of the derivation is the i-th argument; Apply nodes use the
    basic operations of the algebra.
    """

    def __init__(self, term: TermDag, arity: int, ops: Sequence[OpTable]):
        self.term = term
        self.arity = arity
        self.ops = list(ops)

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InvalidInput(f"term operation takes {self.arity} arguments, got {len(args)}")
        memo: Dict[int, int] = {}

        def ev(node: TermDag) -> int:
            key = id(node)
            if key not in memo:
                if isinstance(node, Generator):
                    memo[key] = args[node.index]
                else:
                    memo[key] = self.ops[node.op](*(ev(c) for c in node.children))
            return memo[key]

        return ev(self.term)


Interpretation = Mapping[str, Union[OpTable, TermOperation]]


def _check_arities(expr: Expr, assignment: Interpretation):
    if isinstance(expr, Var):
        return
    if expr.symbol not in assignment:
        raise InvalidInput(f"no operation assigned to symbol {expr.symbol!r}")
    if assignment[expr.symbol].arity != len(expr.args):
        raise InvalidInput(
            f"symbol {expr.symbol!r} has arity {assignment[expr.symbol].arity}, used with {len(expr.args)}"
        )
    for a in expr.args:
        _check_arities(a, assignment)


def evaluate_expr(expr: Expr, assignment: Interpretation, env: Mapping[str, int]) -> int:
    if isinstance(expr, Var):
        return env[expr.name]
    return assignment[expr.symbol](*(evaluate_expr(a, assignment, env) for a in expr.args))


def check_local_satisfaction(
    assignment: Interpretation, equations: Sequence[Equation], subset: Sequence[int]
) -> bool:
    """True iff every equation holds whenever its variables are chosen from subset."""
    xs = sorted(set(subset))
    for eq in equations:
        _check_arities(eq.left, assignment)
        _check_arities(eq.right, assignment)
    for eq in equations:
        names = eq.variables()
        for values in product(xs, repeat=len(names)):
            env = dict(zip(names, values))
            if evaluate_expr(eq.left, assignment, env) != evaluate_expr(eq.right, assignment, env):
                return False
    return True


def idempotency_equation(symbol: str, arity: int) -> Equation:
    return Equation(apply(symbol, "x" * arity), Var("x"))


def taylor_equations(system: TaylorSystem, symbol: str = "t") -> List[Equation]:
    eqs = [Equation(apply(symbol, left), apply(symbol, right)) for left, right in system.rows]
    if system.idempotent_required:
        eqs.append(idempotency_equation(symbol, system.arity))
    return eqs
