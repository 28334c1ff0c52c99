"""Construction of the substitution f: parameters, priority/value tables, local maxima.

Words are plain tuples of letters here; the analysis of a word of length N
computes its positional priorities and values once and is memoized per
context.
"""

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from loopbench.algebra import OpTable
from loopbench.digraph import Digraph, WalkTable, bool_power, find_walk
from loopbench.errors import CorollaryViolation, HypothesisError, InvalidInput
from loopbench.models import (
    DichotomyReport,
    LemmaViolation,
    LocalMaxReport,
    ShiftClassEntry,
    ShiftLemmaReport,
    TableEntry,
)
from loopbench.words import Word, all_words, is_constant, shortest_period

logger = logging.getLogger("loopbench")

Letters = Tuple[int, ...]
AlphaMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    K: int
    W: int
    M: int
    R: int
    L: int
    N: int
    reduced: bool = False

    def as_dict(self) -> Dict[str, int]:
        return {"n": self.n, "K": self.K, "W": self.W, "M": self.M, "R": self.R, "L": self.L, "N": self.N}


def make_params(n: int, K: int) -> ConstructionParams:
    if n < 1:
        raise InvalidInput(f"alphabet size must be positive, got {n}")
    if K < 2:
        raise InvalidInput(f"walk constant must be at least 2, got {K}")
    W = 3 * K - 3
    M = 2 * (K - 1) * n**W + (K - 1)
    R = M + K - 1
    L = R + K - 2
    return ConstructionParams(n, K, W, M, R, L, L + W + R)


def reduced_params(n: int, K: int, W: int, R: int, L: int) -> ConstructionParams:
    """Hand-picked (W, R, L); only N = L + W + R and the range constraints are kept."""
    if n < 1 or K < 1:
        raise InvalidInput("alphabet size and walk constant must be positive")
    if W < 1 or R < 1:
        raise InvalidInput(f"reduced parameters need W >= 1 and R >= 1, got W={W}, R={R}")
    if L < K - 1:
        raise InvalidInput(f"reduced parameters need L >= K-1 = {K - 1}, got L={L}")
    return ConstructionParams(n, K, W, max(R - K + 1, 0), R, L, L + W + R, reduced=True)


def normalize_alpha(alpha: Sequence[Sequence[int]], n: int, vertex_count: int) -> AlphaMatrix:
    rows = tuple(tuple(int(v) for v in row) for row in alpha)
    if len(rows) != n or any(len(row) != n for row in rows):
        raise InvalidInput(f"alpha must be an {n}x{n} matrix")
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if not 0 <= v < vertex_count:
                raise InvalidInput(f"alpha[{i}][{j}] = {v} is not a vertex")
    return rows


def alpha_edge_failures(alpha: AlphaMatrix, t: OpTable, g: Digraph) -> List[int]:
    """Rows i for which alpha[i][i] -> t(alpha[i][0], ..., alpha[i][n-1]) is not an edge."""
    return [i for i, row in enumerate(alpha) if not g.has_edge(row[i], t(*row))]


@dataclass(frozen=True)
class ShiftClass:
    period: int
    members: Tuple[Letters, ...]
    cycle: Tuple[int, ...]


@dataclass(frozen=True)
class PriorityValueTable:
    """pi and nu on all windows of length W, indexed by lexicographic word code."""

    n: int
    W: int
    priority: Tuple[int, ...]
    value: Tuple[int, ...]
    items: Tuple[int, ...]
    classes: Tuple[ShiftClass, ...] = ()

    def code(self, w: Sequence[int]) -> int:
        c = 0
        for a in w:
            c = c * self.n + a
        return c

    def word(self, code: int) -> Letters:
        letters = []
        for _ in range(self.W):
            code, a = divmod(code, self.n)
            letters.append(a)
        return tuple(reversed(letters))

    def priority_of(self, w: Sequence[int]) -> int:
        return self.priority[self.code(w)]

    def value_of(self, w: Sequence[int]) -> int:
        return self.value[self.code(w)]

    def with_values(self, changes: Mapping[Letters, int]) -> "PriorityValueTable":
        value = list(self.value)
        for w, v in changes.items():
            value[self.code(w)] = v
        return replace(self, value=tuple(value))

    def with_priorities(self, changes: Mapping[Letters, int]) -> "PriorityValueTable":
        priority = list(self.priority)
        for w, p in changes.items():
            priority[self.code(w)] = p
        return replace(self, priority=tuple(priority))

    def entries(self) -> List[TableEntry]:
        return [
            TableEntry(word=list(self.word(c)), priority=self.priority[c], value=self.value[c], item=self.items[c])
            for c in range(len(self.priority))
        ]

    def class_entries(self) -> List[ShiftClassEntry]:
        return [
            ShiftClassEntry(period=s.period, members=[list(m) for m in s.members], cycle=list(s.cycle))
            for s in self.classes
        ]


def classify_window(w: Sequence[int], K: int) -> int:
    """Which of the defining items (1 to 4) governs window w."""
    if is_constant(w):
        return 1
    if 2 <= shortest_period(w) < K:
        return 2
    if is_constant(w[:-1]):
        return 3
    return 4


def smallest_cycle(g: Digraph, k: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically smallest closed k-walk through the smallest vertex on any."""
    diag = np.diagonal(bool_power(g.adjacency, k))
    starts = np.flatnonzero(diag)
    if starts.size == 0:
        return None
    v = int(starts[0])
    return find_walk(g, v, v, k)


def _shift(w: Letters, k: int, i: int) -> Letters:
    return tuple(w[(i + j) % k] for j in range(len(w)))


def build_priority_value(g: Digraph, params: ConstructionParams, alpha: AlphaMatrix) -> PriorityValueTable:
    n, W, K, R = params.n, params.W, params.K, params.R
    size = n**W
    priority = [0] * size
    value = [0] * size
    items = [0] * size
    assigned = [False] * size
    classes = []
    cycles: Dict[int, Tuple[int, ...]] = {}
    negative = 0
    table = PriorityValueTable(n, W, (), (), ())

    for code, w in enumerate(all_words(n, W)):
        item = classify_window(w, K)
        items[code] = item
        if item == 1:
            priority[code], value[code] = 0, alpha[w[0]][w[0]]
        elif item == 2:
            if assigned[code]:
                continue
            k = shortest_period(w)
            if k not in cycles:
                cycle = smallest_cycle(g, k)
                if cycle is None:
                    raise HypothesisError("cycle lengths", f"no closed {k}-walk for windows of period {k}")
                cycles[k] = cycle
            members = []
            for i in range(k):
                member = _shift(w, k, i)
                mc = table.code(member)
                if assigned[mc] or shortest_period(member) != k:
                    logger.debug("Skipping shift %s of %s", member, w)
                    continue
                assigned[mc] = True
                priority[mc], value[mc] = R, cycles[k][i]
                members.append(member)
            classes.append(ShiftClass(k, tuple(members), cycles[k]))
        elif item == 3:
            priority[code], value[code] = R, alpha[w[0]][w[0]]
        else:
            negative -= 1
            priority[code], value[code] = negative, alpha[w[0]][w[0]]

    logger.debug("Window table: %d windows, %d shift classes, %d negative", size, len(classes), -negative)
    return PriorityValueTable(n, W, tuple(priority), tuple(value), tuple(items), tuple(classes))


@dataclass(frozen=True)
class WordAnalysis:
    word: Letters
    priorities: Tuple[int, ...]
    values: Tuple[int, ...]
    local_max: Tuple[bool, ...]
    run_end: Tuple[int, ...]

    @property
    def maxima(self) -> List[int]:
        return [p for p, m in enumerate(self.local_max) if m]


class ConstructionContext:
    """Everything eval_f needs: graph, operation, alpha, parameters, walks, window table."""

    def __init__(
        self,
        graph: Digraph,
        op: OpTable,
        alpha: AlphaMatrix,
        params: ConstructionParams,
        walks: WalkTable,
        table: PriorityValueTable,
        cache_size: int = 4096,
    ):
        self.graph = graph
        self.op = op
        self.alpha = alpha
        self.params = params
        self.walks = walks
        self.table = table
        self.cache_size = cache_size
        self.analyze = lru_cache(maxsize=cache_size)(self.analyze_uncached)

    @classmethod
    def build(cls, graph: Digraph, op: OpTable, alpha, params: ConstructionParams) -> "ConstructionContext":
        alpha = normalize_alpha(alpha, params.n, graph.vertex_count)
        walks = WalkTable(graph, max(params.N, 1))
        if walks.K > params.K:
            raise InvalidInput(f"parameters use K={params.K} below the walk constant {walks.K}")
        table = build_priority_value(graph, params, alpha)
        return cls(graph, op, alpha, params, walks, table)

    def with_table(self, table: PriorityValueTable) -> "ConstructionContext":
        return ConstructionContext(self.graph, self.op, self.alpha, self.params, self.walks, table, self.cache_size)

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["analyze"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self.analyze = lru_cache(maxsize=self.cache_size)(self.analyze_uncached)

    def check_word(self, x) -> Letters:
        letters = x.letters if isinstance(x, Word) else tuple(int(a) for a in x)
        if len(letters) != self.params.N:
            raise InvalidInput(f"word has length {len(letters)}, expected N={self.params.N}")
        if any(not 0 <= a < self.params.n for a in letters):
            raise InvalidInput(f"word leaves the alphabet [0, {self.params.n})")
        return letters

    def analyze_uncached(self, x: Letters) -> WordAnalysis:
        p_ = self.params
        N, W, R, L, K = p_.N, p_.W, p_.R, p_.L, p_.K
        last = N - W
        run_end = [N] * N
        for i in range(N - 2, -1, -1):
            run_end[i] = run_end[i + 1] if x[i] == x[i + 1] else i + 1

        tab = self.table
        priorities = []
        values = []
        for p in range(last + 1):
            window = x[p:p + W]
            if run_end[p] - p >= W:
                priorities.append(min(run_end[p] - W - p, R - 1))
            else:
                priorities.append(tab.priority_of(window))
            v = tab.value_of(window)
            if 1 <= p <= L and run_end[p - 1] - (p - 1) >= W + R:
                v = self.alpha[x[p - 1]][x[p - 1 + W + R]]
            values.append(v)

        local_max = []
        for p in range(last + 1):
            if priorities[p] == R:
                local_max.append(True)
            elif K - 1 <= p <= last - (K - 1):
                lo, hi = max(0, p - K + 1), min(last, p + K - 1)
                local_max.append(all(priorities[p] >= priorities[q] for q in range(lo, hi + 1)))
            else:
                local_max.append(False)
        return WordAnalysis(x, tuple(priorities), tuple(values), tuple(local_max), tuple(run_end))


def _check_position(ctx: ConstructionContext, p: int):
    if not 0 <= p <= ctx.params.N - ctx.params.W:
        raise InvalidInput(f"position {p} outside [0, {ctx.params.N - ctx.params.W}]")


def position_priority(x, p: int, ctx: ConstructionContext) -> int:
    _check_position(ctx, p)
    return ctx.analyze(ctx.check_word(x)).priorities[p]


def position_value(x, p: int, ctx: ConstructionContext) -> int:
    _check_position(ctx, p)
    return ctx.analyze(ctx.check_word(x)).values[p]


def is_local_max(x, p: int, ctx: ConstructionContext) -> bool:
    _check_position(ctx, p)
    return ctx.analyze(ctx.check_word(x)).local_max[p]


def _eval(a: WordAnalysis, ctx: ConstructionContext) -> int:
    L, K = ctx.params.L, ctx.params.K
    if a.local_max[L]:
        return a.values[L]
    maxima = a.maxima
    left = [p for p in maxima if p < L]
    right = [q for q in maxima if q > L]
    if not left or not right:
        side = "left" if not left else "right"
        raise CorollaryViolation("local-max-around-L", a.word, f"no local maximum on the {side} of L={L}")
    p, q = left[-1], right[0]
    if q - p < K:
        raise CorollaryViolation("walk-long-enough", a.word, f"closest local maxima {p} and {q} are closer than K={K}")
    return ctx.walks.walk(a.values[p], a.values[q], q - p)[L - p]


def eval_f(x, ctx: ConstructionContext, cached: bool = True) -> int:
    """f(x): nu_x(L) when L is a local maximum, else the walk between the nearest maxima."""
    x = ctx.check_word(x)
    return _eval(ctx.analyze(x) if cached else ctx.analyze_uncached(x), ctx)


def _successor(x: Letters, j: int) -> Letters:
    return x[1:] + (j,)


def check_dichotomy(x, ctx: ConstructionContext) -> DichotomyReport:
    """Either case 1 (alpha row i) or case 2 (edges to all successors) must hold for x."""
    x = ctx.check_word(x)
    n, alpha, g = ctx.params.n, ctx.alpha, ctx.graph
    try:
        fx = eval_f(x, ctx)
        succ = [eval_f(_successor(x, j), ctx) for j in range(n)]
    except CorollaryViolation as exc:
        return DichotomyReport(word=list(x), corollary=exc.corollary, detail=exc.detail)
    for i in range(n):
        if fx == alpha[i][i] and all(succ[j] == alpha[i][j] for j in range(n)):
            return DichotomyReport(word=list(x), case=1, letter=i, value=fx, successors=succ)
    missing = [j for j in range(n) if not g.has_edge(fx, succ[j])]
    if not missing:
        return DichotomyReport(word=list(x), case=2, value=fx, successors=succ)
    return DichotomyReport(
        word=list(x),
        letter=missing[0],
        value=fx,
        successors=succ,
        detail=f"no alpha row matches and {fx} -> {succ[missing[0]]} is not an edge",
    )


def check_shift_lemmas(x, i: int, ctx: ConstructionContext) -> ShiftLemmaReport:
    """Compare positions of x and y = x[1:] + [i] against the three shift lemmas."""
    x = ctx.check_word(x)
    if not 0 <= i < ctx.params.n:
        raise InvalidInput(f"letter {i} outside [0, {ctx.params.n})")
    p_ = ctx.params
    N, W, R, L, K = p_.N, p_.W, p_.R, p_.L, p_.K
    last = N - W
    y = _successor(x, i)
    ax, ay = ctx.analyze(x), ctx.analyze(y)
    tail_constant = is_constant(x[L:])
    violations: List[LemmaViolation] = []

    for p in range(2, last + 1):
        if ax.values[p] != ay.values[p - 1] and not (tail_constant and p == L + 1):
            violations.append(LemmaViolation(
                lemma="value-shift", position=p,
                detail=f"nu_x({p}) = {ax.values[p]} but nu_y({p - 1}) = {ay.values[p - 1]}",
            ))

    for p in range(1, last + 1):
        px, py = ax.priorities[p], ay.priorities[p - 1]
        if p > L + 1 and ay.run_end[p - 1] == N:
            ok = py == px + 1 and 0 <= py <= R
        else:
            ok = py == px
        if not ok:
            violations.append(LemmaViolation(
                lemma="priority-shift", position=p, detail=f"pi_x({p}) = {px}, pi_y({p - 1}) = {py}",
            ))

    # priority reading of the local maximum shift
    for p in range(max(K, 1), last + 1):
        mx, my = ax.local_max[p], ay.local_max[p - 1]
        if mx and not my:
            violations.append(LemmaViolation(
                lemma="local-max-shift", position=p, detail=f"{p} is a local maximum in x but {p - 1} is not in y",
            ))
        elif my and not mx:
            between = any(ax.local_max[q] for q in range(L + 1, p))
            if p < L + 2 or not between:
                violations.append(LemmaViolation(
                    lemma="local-max-shift", position=p,
                    detail=f"{p - 1} is a local maximum in y, {p} is not in x, and no maximum in [{L + 1}, {p})",
                ))
    return ShiftLemmaReport(word=list(x), letter=i, violations=violations)


def check_local_max_lemmas(x, ctx: ConstructionContext) -> LocalMaxReport:
    """Close local maxima, walk length, maxima around L and maxima in every long interval."""
    x = ctx.check_word(x)
    p_ = ctx.params
    N, W, R, L, K = p_.N, p_.W, p_.R, p_.L, p_.K
    a = ctx.analyze(x)
    maxima = a.maxima
    violations: List[LemmaViolation] = []

    # priority reading: pi_x(p) = pi_x(q) >= R-1
    for idx, p in enumerate(maxima):
        for q in maxima[idx + 1:]:
            if q - p >= K:
                break
            segment = x[p:q + W]
            if not (a.priorities[p] == a.priorities[q] >= R - 1 and shortest_period(segment) < K):
                violations.append(LemmaViolation(
                    lemma="close-local-max", position=p,
                    detail=f"maxima {p}, {q}: priorities {a.priorities[p]}, {a.priorities[q]}, "
                           f"period {shortest_period(segment)}",
                ))

    if not a.local_max[L]:
        left = [p for p in maxima if p < L]
        right = [q for q in maxima if q > L]
        if not left or not right:
            violations.append(LemmaViolation(
                lemma="local-max-around-L", position=L, detail="missing local maximum on one side of L",
            ))
        elif right[0] - left[-1] < K:
            violations.append(LemmaViolation(
                lemma="walk-long-enough", position=L, detail=f"maxima {left[-1]} and {right[0]} closer than K",
            ))

    last = N - W
    for p in range(K - 1, min(L + 1, last) + 1):
        hi = min(p + R - 1, last)
        if not any(a.local_max[q] for q in range(p, hi + 1)):
            violations.append(LemmaViolation(
                lemma="local-max-big-interval", position=p, detail=f"no local maximum in [{p}, {hi}]",
            ))
    return LocalMaxReport(word=list(x), maxima=maxima, violations=violations)


def check_table_axioms(ctx: ConstructionContext) -> List[str]:
    """Items 1 to 5 over every window; returns human-readable failures."""
    tab, p_, alpha, g = ctx.table, ctx.params, ctx.alpha, ctx.graph
    failures = []
    negatives: Dict[int, Letters] = {}
    for code in range(len(tab.priority)):
        w = tab.word(code)
        pi, nu = tab.priority[code], tab.value[code]
        item = classify_window(w, p_.K)
        if item == 1 and (pi, nu) != (0, alpha[w[0]][w[0]]):
            failures.append(f"{list(w)}: constant window has ({pi}, {nu})")
        elif item == 2:
            k = shortest_period(w)
            nxt = _shift(w, k, 1)
            if pi != p_.R:
                failures.append(f"{list(w)}: period {k} window has priority {pi}")
            elif shortest_period(nxt) == k and not g.has_edge(nu, tab.value_of(nxt)):
                failures.append(f"{list(w)}: {nu} -> {tab.value_of(nxt)} is not an edge of the shift cycle")
        elif item == 3 and pi != p_.R:
            failures.append(f"{list(w)}: almost constant window has priority {pi}")
        elif item == 4:
            if pi >= 0:
                failures.append(f"{list(w)}: window has non-negative priority {pi}")
            elif pi in negatives:
                failures.append(f"{list(w)}: priority {pi} shared with {list(negatives[pi])}")
            else:
                negatives[pi] = w
    for s in tab.classes:
        cyc = s.cycle
        if len(cyc) != s.period + 1 or cyc[0] != cyc[-1] or any(not g.has_edge(cyc[i], cyc[i + 1]) for i in range(s.period)):
            failures.append(f"shift class of period {s.period}: {list(cyc)} is not a closed walk")
    return failures
