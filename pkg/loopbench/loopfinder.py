"""End-to-end loop pipelines: hypothesis checks, dichotomy sweeps and loop extraction."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from loopbench.algebra import OpTable, StarSubstitution, is_compatible_graph, is_idempotent, star_power_eval
from loopbench.closure import format_term, loop_oracle
from loopbench.config import Budgets, ReducedParams
from loopbench.construction import (
    ConstructionContext,
    alpha_edge_failures,
    check_dichotomy,
    eval_f,
    make_params,
    normalize_alpha,
    reduced_params,
)
from loopbench.digraph import (
    Digraph,
    has_all_cycle_lengths,
    is_strongly_connected,
    odd_girth_reduce,
    uniform_walk_constant,
)
from loopbench.errors import BudgetExceeded, CorollaryViolation, HypothesisError, InvalidInput, VerificationFailed
from loopbench.models import DichotomyReport, LoopReport, SampleRecord, SampleSummary
from loopbench.sampling import run_samples, summarize
from loopbench.words import all_words

logger = logging.getLogger("loopbench")

Substitution = Callable[[Tuple[int, ...]], int]


def prepare_instance(
    g: Digraph,
    t: OpTable,
    alpha: Sequence[Sequence[int]],
    overrides: Optional[ReducedParams] = None,
    require_compatible: bool = True,
) -> ConstructionContext:
    """Check the local loop hypotheses and assemble a construction context.

    Args:
        g: The digraph, on the same vertex set as the operation's domain.
        t: An idempotent operation.
        alpha: n x n vertices with alpha[i][i] -> t(alpha[i]) an edge of g.
        overrides: Reduced (W, R, L) replacing the formulas.
        require_compatible: When False an incompatible t is only logged; the
            dichotomy itself never uses compatibility.

    Raises:
        HypothesisError: naming the first hypothesis that fails.
    """
    if g.vertex_count != t.domain_size:
        raise InvalidInput(f"digraph has {g.vertex_count} vertices, operation domain is {t.domain_size}")
    if not is_idempotent(t):
        raise HypothesisError("idempotency", f"{t.label} is not idempotent")
    if not is_compatible_graph(t, g):
        if require_compatible:
            raise HypothesisError("compatibility", f"{t.label} is not compatible with the digraph")
        logger.warning("%s is not compatible with the digraph; checking the dichotomy only", t.label)
    if not is_strongly_connected(g):
        raise HypothesisError("strong connectivity", "digraph is not strongly connected")
    if not has_all_cycle_lengths(g):
        raise HypothesisError("cycle lengths", "digraph lacks closed walks of some length >= 2")
    n = t.arity
    alpha = normalize_alpha(alpha, n, g.vertex_count)
    failures = alpha_edge_failures(alpha, t, g)
    if failures:
        raise HypothesisError("alpha edges", f"rows {failures} do not give edges alpha[i][i] -> t(alpha[i])")

    K = max(2, uniform_walk_constant(g))
    if overrides is None:
        params = make_params(n, K)
    else:
        params = reduced_params(n, K, overrides.W, overrides.R, overrides.L)
    ctx = ConstructionContext.build(g, t, alpha, params)
    logger.info("Instance prepared: n=%d K=%d N=%d%s", n, K, params.N, " (reduced)" if params.reduced else "")
    return ctx


@dataclass
class Sweep:
    words_checked: int
    violations: List[DichotomyReport]
    values: np.ndarray  # f by word code; -1 where eval_f failed


def _mode(ctx: ConstructionContext, exhaustive: bool) -> str:
    if not exhaustive:
        return "full-sampled"
    return "reduced-exhaustive" if ctx.params.reduced else "full-exhaustive"


def sweep_words(ctx: ConstructionContext, budget: int = Budgets().exhaustive_words, progress: bool = False) -> Sweep:
    """Evaluate f on all n**N words, then test the dichotomy from the value table."""
    n, N = ctx.params.n, ctx.params.N
    total = n**N
    if total > budget:
        raise BudgetExceeded("exhaustive words", total, budget)
    values = np.full(total, -1, dtype=np.int64)
    failed = set()
    words = tqdm(all_words(n, N), total=total, desc="Evaluating f", disable=not progress)
    for code, x in enumerate(words):
        try:
            values[code] = eval_f(x, ctx, cached=False)
        except CorollaryViolation:
            failed.add(code)

    violations = []
    tail = n ** (N - 1)
    alpha, g = ctx.alpha, ctx.graph
    for code, x in enumerate(all_words(n, N)):
        succ = [(code % tail) * n + j for j in range(n)]
        if code in failed or any(s in failed for s in succ):
            violations.append(check_dichotomy(x, ctx))
            continue
        fx = int(values[code])
        fs = [int(values[s]) for s in succ]
        case1 = any(fx == alpha[i][i] and all(fs[j] == alpha[i][j] for j in range(n)) for i in range(n))
        if not case1 and not all(g.has_edge(fx, v) for v in fs):
            violations.append(check_dichotomy(x, ctx))
    logger.info("Swept %d words, %d dichotomy violations", total, len(violations))
    return Sweep(total, violations, values)


def _exhaustive_report(ctx: ConstructionContext, sweep: Sweep) -> LoopReport:
    return LoopReport(
        mode=_mode(ctx, exhaustive=True),
        N=ctx.params.N,
        K=ctx.params.K,
        reduced=ctx.params.reduced,
        dichotomy_passed=not sweep.violations,
        words_checked=sweep.words_checked,
        violations=sweep.violations,
    )


def verify_dichotomy_exhaustive(
    ctx: ConstructionContext, budget: int = Budgets().exhaustive_words, progress: bool = False
) -> LoopReport:
    """Dichotomy on every word of length N; violating words are listed in the report."""
    return _exhaustive_report(ctx, sweep_words(ctx, budget, progress))


def loop_from_substitutions(
    ctx: ConstructionContext,
    f0: Substitution,
    f1: Substitution,
    budget: int = Budgets().star_leaves,
) -> Tuple[int, int]:
    """a = t^{*(N+1)}(f0) and b = t^{*(N+1)}(f1); they must agree and form an edge.

    Raises:
        VerificationFailed: "star-power identity" when a != b, "loop edge"
            when (a, b) is not an edge of the digraph.
    """
    t, n, depth = ctx.op, ctx.params.n, ctx.params.N + 1
    a = star_power_eval(t, depth, StarSubstitution(depth, n, fn=f0), budget)
    b = star_power_eval(t, depth, StarSubstitution(depth, n, fn=f1), budget)
    logger.debug("Star power values: a=%d b=%d", a, b)
    if a != b:
        raise VerificationFailed("star-power identity", f"t^*(N+1)(f0) = {a} but t^*(N+1)(f1) = {b}")
    if not ctx.graph.has_edge(a, b):
        raise VerificationFailed("loop edge", f"({a}, {b}) is not an edge of the digraph")
    return a, b


def _shifted_substitutions(ctx: ConstructionContext, values: np.ndarray) -> Tuple[Substitution, Substitution]:
    n, N = ctx.params.n, ctx.params.N

    def code(w: Sequence[int]) -> int:
        c = 0
        for a in w:
            c = c * n + a
        return c

    def f0(w: Tuple[int, ...]) -> int:
        return int(values[code(w[:N])])

    def f1(w: Tuple[int, ...]) -> int:
        return int(values[code(w[1:])])

    return f0, f1


def extract_loop(
    ctx: ConstructionContext,
    budgets: Budgets = Budgets(),
    progress: bool = False,
    sweep: Optional[Sweep] = None,
) -> int:
    """Loop vertex t^{*(N+1)}(f0) for f0(x) = f(x[:N]) and f1(x) = f(x[1:]).

    Needs a dichotomy sweep without violations; a precomputed ``sweep`` is
    reused when given.
    """
    if sweep is None:
        sweep = sweep_words(ctx, budgets.exhaustive_words, progress)
    if sweep.violations:
        raise HypothesisError("dichotomy", f"{len(sweep.violations)} words violate the dichotomy")
    f0, f1 = _shifted_substitutions(ctx, sweep.values)
    a, _ = loop_from_substitutions(ctx, f0, f1, budgets.star_leaves)
    logger.info("Extracted loop at %d", a)
    return a


def oracle_cross_check(report: LoopReport, t: OpTable, g: Digraph, cap: int) -> LoopReport:
    found = loop_oracle(t, g, cap)
    if found is None:
        return report
    vertex, term = found
    names = [f"({u},{v})" for u, v in g.sorted_edges()]
    return report.model_copy(update={"oracle_vertex": vertex, "oracle_term": format_term(term, names, ["t"])})


def require_oracle_loop(report: LoopReport, t: OpTable, g: Digraph, cap: int) -> LoopReport:
    """oracle_cross_check for an instance meeting every hypothesis; finding no loop is a hard failure."""
    if report.oracle_vertex is None:
        report = oracle_cross_check(report, t, g, cap)
    if report.oracle_vertex is None:
        raise VerificationFailed("oracle", "all hypotheses hold but the closure of the edges has no loop")
    return report


def sample_dichotomy(
    ctx: ConstructionContext,
    samples: int,
    seed: int,
    n_jobs: int = 1,
    progress: bool = False,
) -> Tuple[List[SampleRecord], SampleSummary, LoopReport]:
    """Seeded dichotomy, shift and local maximum checks on ``samples`` words."""
    records = run_samples(ctx, samples, seed, n_jobs=n_jobs, progress=progress)
    summary = summarize(records, seed, ctx.params)
    report = LoopReport(
        mode=_mode(ctx, exhaustive=False),
        N=ctx.params.N,
        K=ctx.params.K,
        reduced=ctx.params.reduced,
        dichotomy_passed=summary.dichotomy_violations == 0,
        words_checked=len(records),
        violations=[r.dichotomy for r in records if not r.dichotomy.ok],
        shift_violation_count=summary.shift_violations,
    )
    logger.info(
        "Sampled %d words (seed %d): %d dichotomy, %d shift violations",
        len(records), seed, summary.dichotomy_violations, summary.shift_violations,
    )
    return records, summary, report


def reduce_undirected(g: Digraph) -> Tuple[Digraph, Optional[Dict[str, int]]]:
    """g itself, or g^(l-2) for an undirected g lacking some closed walk length >= 2.

    l is the odd girth; the reduction record is None when nothing changed.
    """
    if not g.undirected or has_all_cycle_lengths(g):
        return g, None
    l, power = odd_girth_reduce(g)
    logger.info("Undirected branch: continuing on the relational power %d", l - 2)
    return power, {"odd_girth": l, "power": l - 2}


def extract_loop_report(
    ctx: ConstructionContext, budgets: Budgets = Budgets(), progress: bool = False
) -> LoopReport:
    """Exhaustive sweep, and extraction plus the oracle cross-check when it passes."""
    sweep = sweep_words(ctx, budgets.exhaustive_words, progress)
    report = _exhaustive_report(ctx, sweep)
    if not report.dichotomy_passed:
        return report
    vertex = extract_loop(ctx, budgets, sweep=sweep)
    report = report.model_copy(update={"loop_vertex": vertex, "star_values": [vertex, vertex]})
    report = oracle_cross_check(report, ctx.op, ctx.graph, budgets.closure_size)
    if report.oracle_vertex is None:
        raise VerificationFailed("oracle", f"extracted loop at {vertex} but the closure of the edges has none")
    return report


def main_theorem_pipeline(
    g: Digraph,
    t: OpTable,
    alpha: Sequence[Sequence[int]],
    overrides: Optional[ReducedParams] = None,
    samples: int = 1000,
    seed: int = 0,
    budgets: Budgets = Budgets(),
    n_jobs: int = 1,
    progress: bool = False,
) -> LoopReport:
    """Loop existence for either branch of the main theorem.

    Undirected inputs go through reduce_undirected first. Reduced parameters
    get an exhaustive sweep and, when it passes, star-power extraction; full
    parameters are sampled. The loop oracle always runs and must find a loop.
    """
    g, reduction = reduce_undirected(g)
    ctx = prepare_instance(g, t, alpha, overrides)
    if ctx.params.reduced:
        report = extract_loop_report(ctx, budgets, progress)
    else:
        _, _, report = sample_dichotomy(ctx, samples, seed, n_jobs, progress)
    report = report.model_copy(update={"reduction": reduction})
    return require_oracle_loop(report, t, g, budgets.closure_size)
