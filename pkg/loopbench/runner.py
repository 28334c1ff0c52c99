"""Subcommand dispatch for the loopbench CLI.

Every subcommand returns a pydantic report. Exit status 0 means the run is
consistent, 2 that a property violation was found, 1 a usage, parse,
budget or hypothesis error. Reports go to ``out``; errors go to ``err`` as
one ErrorResponse JSON line.
"""

import logging
import sys
from typing import Callable, Dict, Iterable, List, Optional, TextIO, Tuple

from pydantic import BaseModel

from loopbench.algebra import OpTable, closed_components, find_taylor_system, is_compatible_graph, is_idempotent
from loopbench.closure import format_term, loop_oracle
from loopbench.config import RunConfig
from loopbench.construction import check_table_axioms
from loopbench.digraph import (
    Digraph,
    algebraic_length,
    cycle_lengths,
    has_all_cycle_lengths,
    has_all_cycle_lengths_with_loops,
    is_strongly_connected,
    odd_girth,
    scc_decompose,
    uniform_walk_constant,
    wielandt_bound,
)
from loopbench.doubleloop import double_loop_report
from loopbench.errors import error_code, exit_status
from loopbench.formats import load_alpha, load_builtin, load_digraph, load_op
from loopbench.loopfinder import (
    extract_loop_report,
    main_theorem_pipeline,
    oracle_cross_check,
    prepare_instance,
    reduce_undirected,
    require_oracle_loop,
    sample_dichotomy,
)
from loopbench.models import (
    AnalyzeReport,
    CompatReport,
    ConstructReport,
    ErrorResponse,
    OracleLoopReport,
    TaylorReport,
)
from loopbench.strongloop import strong_loop_pipeline

logger = logging.getLogger("loopbench")

# (documents to print, exit status)
Outcome = Tuple[List[BaseModel], int]


def _graph(config: RunConfig) -> Digraph:
    return load_digraph(config.graph, config.undirected)


def _op(config: RunConfig) -> OpTable:
    if config.op_builtin is not None:
        return load_builtin(config.op_builtin)
    return load_op(config.op)


def _subset(config: RunConfig, t: OpTable) -> List[int]:
    return sorted(set(config.subset)) if config.subset else list(range(t.domain_size))


def run_analyze(config: RunConfig) -> Outcome:
    g = _graph(config)
    strong = is_strongly_connected(g)
    length = algebraic_length(g) if strong and g.edges else None
    report = AnalyzeReport(
        vertices=g.vertex_count,
        edges=len(g.edges),
        components=scc_decompose(g),
        strongly_connected=strong,
        algebraic_length=length,
        algebraic_length_one=None if length is None else length == 1,
        K=uniform_walk_constant(g) if length == 1 else None,
        cycle_lengths=sorted(cycle_lengths(g, wielandt_bound(g.vertex_count))),
        all_lengths_from_two=has_all_cycle_lengths(g),
        all_lengths_from_one=has_all_cycle_lengths_with_loops(g),
        loops=g.loops(),
        odd_girth=odd_girth(g) if g.undirected else None,
    )
    return [report], 0


def run_compat(config: RunConfig) -> Outcome:
    g, t = _graph(config), _op(config)
    report = CompatReport(
        op=t.label,
        idempotent=is_idempotent(t),
        compatible=is_compatible_graph(t, g),
        closed_components=closed_components(t, g),
    )
    return [report], 0


def run_oracle_loop(config: RunConfig) -> Outcome:
    g, t = _graph(config), _op(config)
    found = loop_oracle(t, g, config.budgets.closure_size)
    report = OracleLoopReport(op=t.label)
    if found is not None:
        vertex, term = found
        names = [f"({u},{v})" for u, v in g.sorted_edges()]
        report = OracleLoopReport(op=t.label, loop_vertex=vertex, term=format_term(term, names, ["t"]))
    return [report], 0


def run_taylor(config: RunConfig) -> Outcome:
    t = _op(config)
    xs = _subset(config, t)
    system = find_taylor_system(t, xs)
    report = TaylorReport(op=t.label, subset=xs, require_idempotent=True)
    if system is not None:
        report = report.model_copy(update={"rows": system.describe(), "verified": True})
    return [report], 0


def _context(config: RunConfig):
    g, t = _graph(config), _op(config)
    g, reduction = reduce_undirected(g)
    ctx = prepare_instance(g, t, load_alpha(config.alpha), config.reduced, require_compatible=False)
    return ctx, reduction


def run_construct(config: RunConfig) -> Outcome:
    ctx, _ = _context(config)
    failures = check_table_axioms(ctx)
    report = ConstructReport(
        **ctx.params.as_dict(),
        reduced=ctx.params.reduced,
        entries=ctx.table.entries(),
        shift_classes=ctx.table.class_entries(),
        axiom_violations=failures,
    )
    return [report], 2 if failures else 0


def run_sample(config: RunConfig) -> Outcome:
    ctx, reduction = _context(config)
    records, summary, report = sample_dichotomy(
        ctx, config.samples, config.seed, n_jobs=config.n_jobs, progress=config.progress
    )
    report = report.model_copy(update={"reduction": reduction})
    # a compatible operation meets every hypothesis, so the oracle must find a loop
    if is_compatible_graph(ctx.op, ctx.graph):
        report = require_oracle_loop(report, ctx.op, ctx.graph, config.budgets.closure_size)
    else:
        report = oracle_cross_check(report, ctx.op, ctx.graph, config.budgets.closure_size)
    bad = summary.dichotomy_violations + summary.shift_violations + summary.local_max_violations
    documents: List[BaseModel] = list(records) if config.format == "json" else []
    return documents + [summary, report], 2 if bad else 0


def run_extract_loop(config: RunConfig) -> Outcome:
    g, t = _graph(config), _op(config)
    g, reduction = reduce_undirected(g)
    ctx = prepare_instance(g, t, load_alpha(config.alpha), config.reduced)
    report = extract_loop_report(ctx, config.budgets, config.progress)
    report = report.model_copy(update={"reduction": reduction})
    return [report], 0 if report.dichotomy_passed else 2


def run_double_loop(config: RunConfig) -> Outcome:
    t = _op(config)
    report = double_loop_report(t, _subset(config, t), config.budgets)
    # a Taylor system without a double loop contradicts the double loop theorem
    taylor = report.taylor_propagates is not None and is_idempotent(t)
    return [report], 2 if taylor and not report.found else 0


def run_strong_loop(config: RunConfig) -> Outcome:
    g, t = _graph(config), _op(config)
    return [strong_loop_pipeline(t, g, config.budgets.closure_size)], 0


def run_loop(config: RunConfig) -> Outcome:
    g, t = _graph(config), _op(config)
    report = main_theorem_pipeline(
        g, t, load_alpha(config.alpha), config.reduced, config.samples, config.seed,
        config.budgets, config.n_jobs, config.progress,
    )
    return [report], 0 if report.dichotomy_passed and not report.shift_violation_count else 2


COMMANDS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "analyze": run_analyze,
    "compat": run_compat,
    "oracle-loop": run_oracle_loop,
    "taylor": run_taylor,
    "construct": run_construct,
    "sample": run_sample,
    "extract-loop": run_extract_loop,
    "double-loop": run_double_loop,
    "strong-loop": run_strong_loop,
    "loop": run_loop,
}


def render_text(report: BaseModel) -> str:
    """One "field: value" line per field; lists of records are summarized by length.

    Display only: record lists are collapsed, so the JSON lines are what downstream tools read.
    """
    lines = []
    for key, value in report.model_dump().items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            value = f"{len(value)} entries"
        elif value is None:
            value = "none"
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def write_documents(documents: Iterable[BaseModel], fmt: str, out: TextIO):
    for doc in documents:
        if fmt == "json":
            out.write(doc.model_dump_json() + "\n")
        else:
            out.write(render_text(doc) + "\n\n")


def run(config: RunConfig, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Dispatch one subcommand; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    logger.info("Running %s", config.subcommand)
    try:
        documents, status = COMMANDS[config.subcommand](config)
    except Exception as exc:
        err.write(ErrorResponse(detail=str(exc), error_code=error_code(exc)).model_dump_json() + "\n")
        return exit_status(exc)
    write_documents(documents, config.format, out)
    return status
