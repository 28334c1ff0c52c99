"""Local free algebras, the quadruple relation Q and double loop terms."""

import pytest

from loopbench.algebra import builtin, find_taylor_system
from loopbench.closure import Generator, evaluate_term
from loopbench.config import Budgets
from loopbench.doubleloop import (
    DOUBLE_LOOP_COLUMNS,
    check_edge_absorption,
    double_loop_equations,
    double_loop_graph,
    double_loop_report,
    extract_double_loop_term,
    find_double_loop,
    free_taylor_propagates,
    generate_Q,
    grouped_equations,
    local_free_algebra,
)
from loopbench.errors import BudgetExceeded, InvalidInput, VerificationFailed

TAYLOR_OPS = ["majority3", "minority3", "min-chain"]


class TestColumns:
    def test_twelve_columns(self):
        assert DOUBLE_LOOP_COLUMNS == (
            "xxxy", "xxyx", "xyxx", "xyxy", "xyyx", "xyyy",
            "yxxx", "yxxy", "yxyx", "yxyy", "yyxy", "yyyx",
        )

    def test_grouped_equations(self):
        assert grouped_equations() == [
            "d(xx,xxxx,yyyy,yy) = d(xx,yyyy,xxxx,yy)",
            "d(xy,xxyy,xxyy,xy) = d(yx,xyxy,xyxy,yx)",
        ]
        assert len(double_loop_equations()) == 2


class TestFreeAlgebra:
    def test_sizes(self):
        assert local_free_algebra(builtin("majority3"), [0, 1]).size == 2
        assert local_free_algebra(builtin("minority3"), [0, 1]).size == 2
        assert local_free_algebra(builtin("min-chain"), [0, 1]).size == 3
        assert local_free_algebra(builtin("min-chain"), [1]).size == 1

    def test_names_and_pointwise_application(self):
        free = local_free_algebra(builtin("min-chain"), [0, 1])
        assert free.elements[:2] == [(0, 0, 1, 1), (0, 1, 0, 1)]
        assert free.name(2) == "t(x, y)"
        assert free.apply(0, [free.x, free.y]) == 2
        assert free.apply(0, [2, free.x]) == 2

    def test_index_of_non_element(self):
        free = local_free_algebra(builtin("majority3"), [0, 1])
        with pytest.raises(InvalidInput):
            free.index((1, 1, 1, 1))

    def test_guards(self):
        with pytest.raises(BudgetExceeded) as exc:
            local_free_algebra(builtin("min-chain:5"), [0, 1])
        assert exc.value.kind == "double-loop domain"
        with pytest.raises(BudgetExceeded) as exc:
            local_free_algebra(builtin("min-chain:4"), [0, 1, 2, 3])
        assert exc.value.kind == "double-loop subset"
        with pytest.raises(InvalidInput):
            local_free_algebra(builtin("min-chain"), [])
        with pytest.raises(InvalidInput):
            local_free_algebra(builtin("min-chain"), [0, 2])


class TestQ:
    def test_projection_has_no_double_loop(self):
        free = local_free_algebra(builtin("projection:0:2"), [0, 1])
        q = generate_Q(free)
        assert len(q.elements) == 12
        assert find_double_loop(q) is None
        assert not double_loop_graph(q).loops()

    @pytest.mark.parametrize("key", TAYLOR_OPS)
    def test_taylor_operations_have_double_loops(self, key):
        t = builtin(key)
        free = local_free_algebra(t, [0, 1])
        q = generate_Q(free)
        found = find_double_loop(q)
        assert found is not None
        a, b, derivation = found
        flat = evaluate_term(derivation, q.generators, [t])
        assert flat == free.elements[a] * 2 + free.elements[b] * 2
        assert double_loop_graph(q).has_edge(a, a)

    @pytest.mark.parametrize("key", ["majority3:3", "min-chain:3"])
    def test_three_element_subset(self, key):
        free = local_free_algebra(builtin(key), [0, 1, 2])
        assert find_double_loop(generate_Q(free)) is not None

    def test_single_element_subset(self):
        free = local_free_algebra(builtin("majority3"), [1])
        a, b, derivation = find_double_loop(generate_Q(free))
        assert (a, b) == (0, 0)
        assert derivation == Generator(0)

    def test_graph_is_symmetric(self):
        q = generate_Q(local_free_algebra(builtin("min-chain"), [0, 1]))
        g = double_loop_graph(q)
        assert g.undirected


class TestTerms:
    @pytest.mark.parametrize("key", TAYLOR_OPS)
    def test_extracted_term_satisfies_equations(self, key):
        t = builtin(key)
        q = generate_Q(local_free_algebra(t, [0, 1]))
        _, _, derivation = find_double_loop(q)
        d = extract_double_loop_term(derivation, t, [0, 1])
        assert d.verified
        assert len(d.equations) == 2

    def test_generator_term_fails_on_two_elements(self):
        # d = z0 is a projection, which cannot satisfy the equations on {0, 1}
        with pytest.raises(VerificationFailed):
            extract_double_loop_term(Generator(0), builtin("min-chain"), [0, 1])


class TestTaylorPropagation:
    @pytest.mark.parametrize("key", TAYLOR_OPS)
    def test_edge_absorption(self, key):
        t = builtin(key)
        free = local_free_algebra(t, [0, 1])
        system = find_taylor_system(t, [0, 1], require_idempotent=False)
        assert free_taylor_propagates(free, system)
        assert check_edge_absorption(generate_Q(free), system) == []

    def test_arity_mismatch(self):
        free = local_free_algebra(builtin("min-chain"), [0, 1])
        system = find_taylor_system(builtin("majority3"), [0, 1])
        with pytest.raises(InvalidInput):
            free_taylor_propagates(free, system)


class TestReport:
    def test_majority(self):
        report = double_loop_report(builtin("majority3"), [0, 1])
        assert report.found and report.verified
        assert report.free_size == 2
        assert report.taylor_propagates
        assert report.loop_in_edge_graph
        assert report.grouped == "; ".join(grouped_equations())

    def test_projection(self):
        report = double_loop_report(builtin("projection:0:3"), [0, 1])
        assert not report.found
        assert report.q_size == 12
        assert report.taylor_propagates is None

    def test_budget_guard(self):
        with pytest.raises(BudgetExceeded):
            double_loop_report(builtin("min-chain:3"), [0, 1, 2], Budgets(double_loop_subset=2))
