"""Finite operation tables, star powers and Taylor systems.

Argument tuples index a table lexicographically with the LEFTMOST argument
most significant: t(a0, ..., a_{n-1}) lives at sum(a_j * m**(n-1-j)).
Star-power substitutions use the same convention for words over [:n].
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from loopbench.digraph import Digraph, algebraic_length_one, scc_decompose
from loopbench.errors import BudgetExceeded, InvalidInput

logger = logging.getLogger("loopbench")

MAX_ARITY = 6
MAX_DOMAIN = 32
DEFAULT_STAR_LEAVES = 2**24


@dataclass(frozen=True)
class OpTable:
    arity: int
    domain_size: int
    table: Tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if self.arity < 1 or self.domain_size < 1:
            raise InvalidInput("arity and domain size must be positive")
        if self.arity > MAX_ARITY or self.domain_size > MAX_DOMAIN:
            raise InvalidInput(
                f"operation of arity {self.arity} on {self.domain_size} elements is beyond "
                f"arity {MAX_ARITY} / domain {MAX_DOMAIN}"
            )
        expected = self.domain_size**self.arity
        if len(self.table) != expected:
            raise InvalidInput(f"table has {len(self.table)} entries, expected {expected}")
        for i, v in enumerate(self.table):
            if not 0 <= v < self.domain_size:
                raise InvalidInput(f"table entry {i} = {v} outside [0, {self.domain_size})")

    @classmethod
    def from_function(cls, arity: int, domain_size: int, fn: Callable[..., int], name: str = "") -> "OpTable":
        return cls(arity, domain_size, tuple(fn(*args) for args in product(range(domain_size), repeat=arity)), name)

    @cached_property
    def values(self) -> np.ndarray:
        """Table as an arity-dimensional array, values[a0, ..., a_{n-1}]."""
        arr = np.array(self.table, dtype=np.int64).reshape((self.domain_size,) * self.arity)
        arr.setflags(write=False)
        return arr

    def index(self, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.domain_size + a
        return idx

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InvalidInput(f"{self.label} takes {self.arity} arguments, got {len(args)}")
        return self.table[self.index(args)]

    def apply_columns(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Coordinatewise application to equally shaped integer arrays."""
        return self.values[tuple(columns)]

    @property
    def label(self) -> str:
        return self.name or f"op{self.arity}"


def _projection(i: int, n: int, m: int) -> OpTable:
    if not 0 <= i < n:
        raise InvalidInput(f"projection coordinate {i} outside [0, {n})")
    return OpTable.from_function(n, m, lambda *a: a[i], f"projection:{i}:{n}")


def _majority(*a: int) -> int:
    x, y, z = a
    if y == z:
        return y
    return x


def builtin(key: str) -> OpTable:
    """Named operations.

    "projection:i:n[:m]", "min-chain[:m]", "majority3[:m]", "minority3".
    Domains default to {0, 1}.
    """
    parts = key.split(":")
    name, args = parts[0], parts[1:]
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise InvalidInput(f"malformed builtin operation {key!r}")
    if name == "projection" and len(nums) in (2, 3):
        return _projection(nums[0], nums[1], nums[2] if len(nums) == 3 else 2)
    if name == "min-chain" and len(nums) <= 1:
        return OpTable.from_function(2, nums[0] if nums else 2, min, key)
    if name == "majority3" and len(nums) <= 1:
        return OpTable.from_function(3, nums[0] if nums else 2, _majority, key)
    if name == "minority3" and not nums:
        return OpTable.from_function(3, 2, lambda x, y, z: x ^ y ^ z, key)
    raise InvalidInput(f"unknown builtin operation {key!r}")


BUILTIN_NAMES = ("projection:0:3", "min-chain", "majority3", "minority3")


def is_idempotent(t: OpTable) -> bool:
    return all(t(*([a] * t.arity)) == a for a in range(t.domain_size))


def is_compatible(t: OpTable, relation: Iterable[Sequence[int]]) -> bool:
    """True iff applying t coordinatewise to any n tuples of the relation stays inside it."""
    rows = sorted({tuple(int(v) for v in r) for r in relation})
    if not rows:
        return True
    arity = len(rows[0])
    if arity < 1 or any(len(r) != arity for r in rows):
        raise InvalidInput("relation tuples must share a positive arity")
    rel = np.array(rows, dtype=np.int64)
    if rel.min() < 0 or rel.max() >= t.domain_size:
        raise InvalidInput(f"relation has values outside the domain [0, {t.domain_size})")
    codes = set(_encode(rel, t.domain_size).tolist())
    rest = _grid(len(rows), t.arity - 1)
    for first in range(len(rows)):
        # fix the first argument row to keep the index grid small
        picks = [np.full(rest.shape[1], first)] + list(rest)
        image = np.stack([t.apply_columns([rel[p, c] for p in picks]) for c in range(arity)], axis=1)
        if not set(_encode(image, t.domain_size).tolist()) <= codes:
            return False
    return True


def is_compatible_graph(t: OpTable, g: Digraph) -> bool:
    if g.vertex_count != t.domain_size:
        raise InvalidInput(f"digraph has {g.vertex_count} vertices, operation domain is {t.domain_size}")
    return is_compatible(t, g.sorted_edges())


def _grid(size: int, k: int) -> np.ndarray:
    """All k-tuples over range(size) as columns of a (k, size**k) array, lexicographic."""
    if k == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.indices((size,) * k).reshape(k, -1)


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for c in range(rows.shape[1]):
        code = code * base + rows[:, c]
    return code


def component_closed(t: OpTable, component: Sequence[int]) -> bool:
    """True iff t maps component^n into the component."""
    members = np.array(sorted(set(component)), dtype=np.int64)
    grid = _grid(len(members), t.arity)
    image = t.apply_columns([members[row] for row in grid])
    return bool(np.isin(image, members).all())


def closed_components(t: OpTable, g: Digraph) -> List[List[int]]:
    """Strong components of algebraic length 1, each checked for closure under t."""
    closed = []
    for comp in scc_decompose(g):
        sub, _ = g.induced(comp)
        if sub.edges and algebraic_length_one(sub):
            if not component_closed(t, comp):
                logger.warning("Component %s is not closed under %s", comp, t.label)
                continue
            closed.append(comp)
    return closed


class StarSubstitution:
    """Assignment of domain elements to the n**depth words indexing star-power variables.

    Backed either by a table in lexicographic word order or by a function on
    word tuples; the function form is never materialized by star_power_eval.
    """

    def __init__(self, depth: int, n: int, table: Optional[Sequence[int]] = None,
                 fn: Optional[Callable[[Tuple[int, ...]], int]] = None):
        if depth < 0 or n < 1:
            raise InvalidInput("substitution needs depth >= 0 and n >= 1")
        if (table is None) == (fn is None):
            raise InvalidInput("give exactly one of table or fn")
        if table is not None and len(table) != n**depth:
            raise InvalidInput(f"substitution table needs {n**depth} entries, got {len(table)}")
        self.depth = depth
        self.n = n
        self._table = None if table is None else np.asarray(table, dtype=np.int64)
        self._fn = fn

    @classmethod
    def constant(cls, depth: int, n: int, value: int) -> "StarSubstitution":
        return cls(depth, n, table=[value] * n**depth)

    def __call__(self, word: Sequence[int]) -> int:
        if self._fn is not None:
            return self._fn(tuple(word))
        idx = 0
        for a in word:
            idx = idx * self.n + a
        return int(self._table[idx])

    def table(self, budget: int = DEFAULT_STAR_LEAVES) -> np.ndarray:
        if self._table is None:
            _check_leaves(self.n, self.depth, budget)
            self._table = np.array(
                [self._fn(w) for w in product(range(self.n), repeat=self.depth)], dtype=np.int64
            )
        return self._table


def _check_leaves(n: int, depth: int, budget: int):
    leaves = n**depth
    if leaves > budget:
        raise BudgetExceeded("star-power leaves", leaves, budget)


def _check_substitution(t: OpTable, k: int, f: StarSubstitution):
    if f.depth != k:
        raise InvalidInput(f"substitution depth {f.depth} does not match star power {k}")
    if f.n != t.arity:
        raise InvalidInput(f"substitution over [:{f.n}] for an operation of arity {t.arity}")


def star_power_eval(t: OpTable, k: int, f: StarSubstitution, budget: int = DEFAULT_STAR_LEAVES) -> int:
    """t^{*k}(f) by the outer decomposition t(t^{*k-1}(f_0), ..., t^{*k-1}(f_{n-1})).

    Walks the composition tree depth first; f is queried once per leaf.
    """
    _check_substitution(t, k, f)
    _check_leaves(t.arity, k, budget)
    n = t.arity
    prefix: List[int] = []

    def descend() -> int:
        if len(prefix) == k:
            return f(prefix)
        args = []
        for i in range(n):
            prefix.append(i)
            args.append(descend())
            prefix.pop()
        return t.table[t.index(args)]

    return descend()


def star_power_eval_folded(t: OpTable, k: int, f: StarSubstitution, budget: int = DEFAULT_STAR_LEAVES) -> int:
    """t^{*k}(f) by the inner decomposition t^{*k-1}(f') with f'(x) = t(f(x+[0]), ..., f(x+[n-1]))."""
    _check_substitution(t, k, f)
    values = f.table(budget)
    n = t.arity
    for _ in range(k):
        groups = values.reshape(-1, n)
        values = t.apply_columns([groups[:, j] for j in range(n)])
    return int(values[0])


@dataclass(frozen=True)
class TaylorSystem:
    """One pair of {x, y} argument patterns per coordinate.

    Row i reads t(left) = t(right) with left[i] == "x" and right[i] == "y".
    """

    rows: Tuple[Tuple[str, str], ...]
    idempotent_required: bool = True

    def __post_init__(self):
        for i, (left, right) in enumerate(self.rows):
            if len(left) != len(self.rows) or len(right) != len(self.rows):
                raise InvalidInput(f"row {i} patterns must have length {len(self.rows)}")
            if left[i] != "x" or right[i] != "y":
                raise InvalidInput(f"row {i} must have x on the left and y on the right at coordinate {i}")
            if set(left + right) - {"x", "y"}:
                raise InvalidInput(f"row {i} uses letters other than x and y")

    @property
    def arity(self) -> int:
        return len(self.rows)

    def describe(self) -> List[str]:
        return [f"t({','.join(l)}) = t({','.join(r)})" for l, r in self.rows]


def _row_holds(t: OpTable, left: str, right: str, subset: Sequence[int]) -> bool:
    for x, y in product(subset, repeat=2):
        env = {"x": x, "y": y}
        if t(*(env[c] for c in left)) != t(*(env[c] for c in right)):
            return False
    return True


def _row_candidates(n: int, i: int):
    # question marks filled in lexicographic order, x before y
    for fill in product("xy", repeat=2 * (n - 1)):
        left = "".join(fill[: i]) + "x" + "".join(fill[i: n - 1])
        right = "".join(fill[n - 1: n - 1 + i]) + "y" + "".join(fill[n - 1 + i:])
        yield left, right


def _check_subset(t: OpTable, subset: Sequence[int]) -> List[int]:
    xs = sorted(set(subset))
    if not xs:
        raise InvalidInput("subset X must be nonempty")
    if xs[0] < 0 or xs[-1] >= t.domain_size:
        raise InvalidInput(f"subset X leaves the domain [0, {t.domain_size})")
    return xs


def find_taylor_system(t: OpTable, subset: Sequence[int], require_idempotent: bool = True) -> Optional[TaylorSystem]:
    """Search a Taylor system holding locally on subset; quasi-Taylor when idempotency is not required."""
    xs = _check_subset(t, subset)
    if require_idempotent and any(t(*([x] * t.arity)) != x for x in xs):
        return None
    rows = []
    for i in range(t.arity):
        row = next((c for c in _row_candidates(t.arity, i) if _row_holds(t, *c, xs)), None)
        if row is None:
            logger.debug("No Taylor row %d for %s on %s", i, t.label, xs)
            return None
        rows.append(row)
    return TaylorSystem(tuple(rows), require_idempotent)


def check_taylor_system(t: OpTable, system: TaylorSystem, subset: Sequence[int]) -> bool:
    """Re-evaluate every row (and idempotency when required) on subset."""
    xs = _check_subset(t, subset)
    if system.arity != t.arity:
        raise InvalidInput(f"system for arity {system.arity}, operation has arity {t.arity}")
    if system.idempotent_required and any(t(*([x] * t.arity)) != x for x in xs):
        return False
    return all(_row_holds(t, l, r, xs) for l, r in system.rows)
