"""Hypothesis checks, exhaustive sweeps, loop extraction and the full pipeline."""

import pytest

from loopbench.algebra import OpTable, builtin
from loopbench.config import Budgets, ReducedParams
from loopbench.digraph import Digraph
from loopbench.errors import BudgetExceeded, HypothesisError, InvalidInput, VerificationFailed
from loopbench.loopfinder import (
    extract_loop,
    extract_loop_report,
    loop_from_substitutions,
    main_theorem_pipeline,
    prepare_instance,
    reduce_undirected,
    require_oracle_loop,
    sample_dichotomy,
    sweep_words,
    verify_dichotomy_exhaustive,
)

from .conftest import TWO_THREE, complete_digraph, cycle


@pytest.fixture
def failing_ctx(k3, min3):
    """Reduced parameters that are too small for the triangle."""
    return prepare_instance(k3, min3, [[1, 0], [0, 1]], ReducedParams(W=1, R=1, L=1), require_compatible=False)


class TestPrepareInstance:
    def test_two_three(self):
        ctx = prepare_instance(
            TWO_THREE, builtin("min-chain:4"), [[1, 0], [0, 1]], ReducedParams(W=1, R=1, L=5),
            require_compatible=False,
        )
        assert ctx.params.K == 6
        assert ctx.params.N == 7

    def test_full_parameters(self, k3_ctx):
        assert (k3_ctx.params.K, k3_ctx.params.N) == (2, 39)
        assert not k3_ctx.params.reduced

    def test_domain_mismatch(self, k3):
        with pytest.raises(InvalidInput):
            prepare_instance(k3, builtin("min-chain"), [[0, 0], [0, 0]])

    @pytest.mark.parametrize(
        "g,t,alpha,hypothesis",
        [
            (complete_digraph(2, loops=True), OpTable(2, 2, (1, 1, 1, 1)), [[0, 0], [0, 0]], "idempotency"),
            (complete_digraph(3, loops=False), builtin("min-chain:3"), [[1, 0], [0, 1]], "compatibility"),
            (Digraph(3, frozenset({(0, 1), (1, 2)})), builtin("projection:0:2:3"), [[0, 0], [0, 0]],
             "strong connectivity"),
            (cycle(3), builtin("projection:0:2:3"), [[0, 1], [1, 0]], "cycle lengths"),
            (complete_digraph(3, loops=False), builtin("projection:0:2:3"), [[0, 1], [1, 0]], "alpha edges"),
        ],
    )
    def test_hypotheses(self, g, t, alpha, hypothesis):
        with pytest.raises(HypothesisError) as exc:
            prepare_instance(g, t, alpha)
        assert exc.value.hypothesis == hypothesis

    def test_alpha_checked_without_compatibility(self, k3, min3):
        with pytest.raises(HypothesisError) as exc:
            prepare_instance(k3, min3, [[0, 0], [0, 0]], require_compatible=False)
        assert exc.value.hypothesis == "alpha edges"


class TestExhaustive:
    def test_reduced_success(self, reduced_ctx):
        report = verify_dichotomy_exhaustive(reduced_ctx)
        assert report.mode == "reduced-exhaustive"
        assert report.dichotomy_passed
        assert report.words_checked == 8

    def test_single_letter_alphabet(self, single_ctx):
        assert single_ctx.params.N == 11
        report = verify_dichotomy_exhaustive(single_ctx)
        assert report.mode == "full-exhaustive"
        assert report.words_checked == 1
        assert report.dichotomy_passed

    def test_reduced_failure_lists_words(self, failing_ctx):
        report = verify_dichotomy_exhaustive(failing_ctx)
        assert not report.dichotomy_passed
        assert [0, 1, 0] in [v.word for v in report.violations]
        assert all(not v.ok for v in report.violations)

    def test_sweep_is_deterministic(self, failing_ctx):
        first = verify_dichotomy_exhaustive(failing_ctx)
        second = verify_dichotomy_exhaustive(failing_ctx)
        assert first.model_dump() == second.model_dump()

    def test_budget(self, k3_ctx):
        with pytest.raises(BudgetExceeded) as exc:
            verify_dichotomy_exhaustive(k3_ctx)
        assert exc.value.required == 2**39

    def test_sweep_values(self, reduced_ctx):
        sweep = sweep_words(reduced_ctx)
        assert len(sweep.values) == 8
        assert (sweep.values >= 0).all()


class TestExtraction:
    def test_reduced_loop(self, reduced_ctx):
        v = extract_loop(reduced_ctx)
        assert reduced_ctx.graph.has_edge(v, v)

    def test_single_vertex(self, single_ctx):
        assert extract_loop(single_ctx) == 0

    def test_violations_block_extraction(self, failing_ctx):
        with pytest.raises(HypothesisError) as exc:
            extract_loop(failing_ctx)
        assert exc.value.hypothesis == "dichotomy"

    def test_star_power_identity(self, reduced_ctx):
        with pytest.raises(VerificationFailed) as exc:
            loop_from_substitutions(reduced_ctx, lambda w: 0, lambda w: 1)
        assert exc.value.check == "star-power identity"

    def test_loop_edge(self, failing_ctx):
        # a == b == 0 but the triangle has no loop
        with pytest.raises(VerificationFailed) as exc:
            loop_from_substitutions(failing_ctx, lambda w: 0, lambda w: 0)
        assert exc.value.check == "loop edge"

    def test_report_runs_oracle(self, reduced_ctx):
        report = extract_loop_report(reduced_ctx)
        assert report.loop_vertex is not None
        assert report.star_values == [report.loop_vertex, report.loop_vertex]
        assert report.oracle_vertex == 0
        assert report.oracle_term == "(0,0)"


class TestSampling:
    def test_loop_report(self, k3_ctx):
        records, summary, report = sample_dichotomy(k3_ctx, 30, seed=4)
        assert len(records) == 30
        assert report.mode == "full-sampled"
        assert report.dichotomy_passed
        assert report.words_checked == 30
        assert summary.seed == 4


class TestUndirected:
    def test_reduce(self):
        g, record = reduce_undirected(cycle(5, undirected=True))
        assert record == {"odd_girth": 5, "power": 3}
        assert not g.loops()

    def test_nothing_to_reduce(self):
        g = complete_digraph(3, loops=False)
        assert reduce_undirected(g) == (g, None)


class TestPipeline:
    def test_reduced_branch(self, looped_pair, min_chain):
        report = main_theorem_pipeline(looped_pair, min_chain, [[0, 1], [1, 1]], ReducedParams(W=1, R=1, L=1))
        assert report.mode == "reduced-exhaustive"
        assert report.loop_vertex is not None
        assert report.oracle_vertex == 0
        assert report.reduction is None

    def test_sampled_branch(self, looped_pair, min_chain):
        report = main_theorem_pipeline(looped_pair, min_chain, [[0, 1], [1, 1]], samples=50, seed=1)
        assert report.mode == "full-sampled"
        assert report.N == 39
        assert report.dichotomy_passed
        assert report.oracle_vertex == 0

    def test_oracle_miss_is_a_hard_failure(self, looped_pair, min_chain, monkeypatch):
        monkeypatch.setattr("loopbench.loopfinder.loop_oracle", lambda *args: None)
        with pytest.raises(VerificationFailed) as exc:
            main_theorem_pipeline(looped_pair, min_chain, [[0, 1], [1, 1]], samples=20, seed=1)
        assert exc.value.check == "oracle"

    def test_require_oracle_loop_keeps_found_vertex(self, k3_ctx, monkeypatch):
        _, _, report = sample_dichotomy(k3_ctx, 5, seed=0)
        report = report.model_copy(update={"oracle_vertex": 1, "oracle_term": "(1,0)"})
        monkeypatch.setattr("loopbench.loopfinder.loop_oracle", lambda *args: None)
        assert require_oracle_loop(report, k3_ctx.op, k3_ctx.graph, 100) == report

    def test_full_extraction_over_budget(self, looped_pair, min_chain):
        ctx = prepare_instance(looped_pair, min_chain, [[0, 1], [1, 1]])
        with pytest.raises(BudgetExceeded):
            extract_loop(ctx, Budgets())

    def test_c5_reduces_to_loopless_k5(self):
        with pytest.raises(HypothesisError) as exc:
            main_theorem_pipeline(cycle(5, undirected=True), builtin("projection:0:2:5"), [[0, 1], [1, 0]])
        assert exc.value.hypothesis == "alpha edges"

    def test_bipartite(self):
        with pytest.raises(HypothesisError) as exc:
            main_theorem_pipeline(cycle(6, undirected=True), builtin("projection:0:2:6"), [[0, 1], [1, 0]])
        assert exc.value.hypothesis == "bipartite"
