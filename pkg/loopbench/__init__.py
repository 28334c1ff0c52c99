"""loopbench: constructive local loop lemma workbench for finite digraphs and idempotent operations."""

from loopbench.algebra import (
    OpTable,
    StarSubstitution,
    TaylorSystem,
    builtin,
    check_taylor_system,
    find_taylor_system,
    is_compatible,
    is_compatible_graph,
    is_idempotent,
    star_power_eval,
    star_power_eval_folded,
)
from loopbench.closure import Apply, Generator, loop_oracle, subpower_closure
from loopbench.config import Budgets, ReducedParams, RunConfig
from loopbench.construction import (
    ConstructionContext,
    ConstructionParams,
    check_dichotomy,
    check_shift_lemmas,
    eval_f,
    is_local_max,
    make_params,
    position_priority,
    position_value,
)
from loopbench.digraph import (
    Digraph,
    WalkTable,
    algebraic_length,
    algebraic_length_one,
    finite_core,
    odd_girth_reduce,
    relational_power,
    scc_decompose,
    uniform_walk_constant,
)
from loopbench.doubleloop import (
    extract_double_loop_term,
    find_double_loop,
    generate_Q,
    local_free_algebra,
)
from loopbench.equations import Equation, check_local_satisfaction
from loopbench.errors import (
    BudgetExceeded,
    CorollaryViolation,
    HypothesisError,
    InvalidInput,
    ParseError,
    VerificationFailed,
)
from loopbench.loopfinder import (
    extract_loop,
    main_theorem_pipeline,
    prepare_instance,
    require_oracle_loop,
    sample_dichotomy,
    verify_dichotomy_exhaustive,
)
from loopbench.models import LoopReport
from loopbench.runner import run
from loopbench.strongloop import (
    coordinate_digraph,
    fanin_vertex,
    strong_loop_pipeline,
    strong_witnesses,
    taylor_corollary_witness,
    transitive_closure,
)
from loopbench.words import Word, is_periodic, periodicity_lemma_check, shortest_period

__all__ = [
    # Words
    "Word",
    "is_periodic",
    "shortest_period",
    "periodicity_lemma_check",
    # Digraphs
    "Digraph",
    "WalkTable",
    "scc_decompose",
    "algebraic_length",
    "algebraic_length_one",
    "relational_power",
    "uniform_walk_constant",
    "finite_core",
    "odd_girth_reduce",
    # Operations
    "OpTable",
    "builtin",
    "is_idempotent",
    "is_compatible",
    "is_compatible_graph",
    "StarSubstitution",
    "star_power_eval",
    "star_power_eval_folded",
    "TaylorSystem",
    "find_taylor_system",
    "check_taylor_system",
    "Generator",
    "Apply",
    "subpower_closure",
    "loop_oracle",
    # Construction
    "ConstructionParams",
    "ConstructionContext",
    "make_params",
    "position_priority",
    "position_value",
    "is_local_max",
    "eval_f",
    "check_dichotomy",
    "check_shift_lemmas",
    # Loop pipelines
    "prepare_instance",
    "verify_dichotomy_exhaustive",
    "extract_loop",
    "sample_dichotomy",
    "main_theorem_pipeline",
    "require_oracle_loop",
    "LoopReport",
    # Double loop
    "local_free_algebra",
    "generate_Q",
    "find_double_loop",
    "extract_double_loop_term",
    "Equation",
    "check_local_satisfaction",
    # Strong loop
    "coordinate_digraph",
    "transitive_closure",
    "strong_witnesses",
    "fanin_vertex",
    "strong_loop_pipeline",
    "taylor_corollary_witness",
    # Config and CLI
    "Budgets",
    "ReducedParams",
    "RunConfig",
    "run",
    # Errors
    "InvalidInput",
    "BudgetExceeded",
    "HypothesisError",
    "CorollaryViolation",
    "VerificationFailed",
    "ParseError",
]
