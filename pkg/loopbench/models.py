"""Pydantic schemas for input files and JSON reports."""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel


# -- Input files --

class DigraphFile(BaseModel):
    vertices: int
    edges: List[Tuple[int, int]] = []
    undirected: bool = False


class OpTableFile(BaseModel):
    arity: int
    domain: int
    table: List[int]


# -- Construction --

class TableEntry(BaseModel):
    word: List[int]
    priority: int
    value: int
    item: int


class ShiftClassEntry(BaseModel):
    period: int
    members: List[List[int]]
    cycle: List[int]


class LemmaViolation(BaseModel):
    lemma: str
    position: int
    detail: str


class DichotomyReport(BaseModel):
    word: List[int]
    case: Optional[int] = None  # 1 or 2; None on violation
    letter: Optional[int] = None  # i of case 1, or the failing successor letter
    value: Optional[int] = None
    successors: List[int] = []
    corollary: Optional[str] = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.case is not None


class ShiftLemmaReport(BaseModel):
    word: List[int]
    letter: int
    violations: List[LemmaViolation] = []

    @property
    def ok(self) -> bool:
        return not self.violations


class LocalMaxReport(BaseModel):
    word: List[int]
    maxima: List[int]
    violations: List[LemmaViolation] = []

    @property
    def ok(self) -> bool:
        return not self.violations


class ConstructReport(BaseModel):
    n: int
    K: int
    W: int
    M: int
    R: int
    L: int
    N: int
    reduced: bool
    entries: List[TableEntry]
    shift_classes: List[ShiftClassEntry]
    axiom_violations: List[str]


# -- Loop pipelines --

class SampleRecord(BaseModel):
    index: int
    family: str
    word: List[int]
    dichotomy: DichotomyReport
    shift_violations: List[LemmaViolation] = []
    local_max_violations: List[LemmaViolation] = []

    @property
    def ok(self) -> bool:
        return self.dichotomy.ok and not self.shift_violations and not self.local_max_violations


class SampleSummary(BaseModel):
    seed: int
    samples: int
    N: int
    reduced: bool
    families: Dict[str, int]
    cases: Dict[str, int]
    dichotomy_violations: int
    shift_violations: int
    local_max_violations: int


class LoopReport(BaseModel):
    mode: Literal["full-sampled", "full-exhaustive", "reduced-exhaustive"]
    N: int
    K: int
    reduced: bool
    dichotomy_passed: Optional[bool] = None
    words_checked: int = 0
    violations: List[DichotomyReport] = []
    shift_violation_count: int = 0
    loop_vertex: Optional[int] = None
    star_values: Optional[List[int]] = None
    oracle_vertex: Optional[int] = None
    oracle_term: Optional[str] = None
    reduction: Optional[Dict[str, int]] = None


# -- Subcommand reports --

class AnalyzeReport(BaseModel):
    vertices: int
    edges: int
    components: List[List[int]]
    strongly_connected: bool
    algebraic_length: Optional[int] = None
    algebraic_length_one: Optional[bool] = None
    K: Optional[int] = None
    cycle_lengths: List[int]
    all_lengths_from_two: bool
    all_lengths_from_one: bool
    loops: List[int]
    odd_girth: Optional[int] = None


class CompatReport(BaseModel):
    op: str
    idempotent: bool
    compatible: bool
    closed_components: List[List[int]]


class OracleLoopReport(BaseModel):
    op: str
    loop_vertex: Optional[int] = None
    term: Optional[str] = None


class TaylorReport(BaseModel):
    op: str
    subset: List[int]
    require_idempotent: bool
    rows: Optional[List[str]] = None
    verified: Optional[bool] = None


class DoubleLoopReport(BaseModel):
    op: str
    subset: List[int]
    free_size: int
    q_size: int
    found: bool
    a: Optional[str] = None
    b: Optional[str] = None
    term: Optional[str] = None
    grouped: Optional[str] = None
    equations: List[str] = []
    verified: Optional[bool] = None
    taylor_propagates: Optional[bool] = None
    loop_in_edge_graph: Optional[bool] = None


class StrongLoopReport(BaseModel):
    op: str
    witnesses: Optional[List[Tuple[int, int]]] = None
    fanin: List[Optional[int]] = []
    loop_vertex: Optional[int] = None
    k: Optional[int] = None
    oracle_vertex: Optional[int] = None
    oracle_term: Optional[str] = None


class ErrorResponse(BaseModel):
    detail: str
    error_code: str
