"""Budgets and run configuration for loopbench."""

from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, field_validator, model_validator

SUBCOMMANDS = (
    "analyze",
    "compat",
    "oracle-loop",
    "taylor",
    "construct",
    "sample",
    "extract-loop",
    "double-loop",
    "strong-loop",
    "loop",
)


class Budgets(BaseModel):
    closure_size: int = 10**7
    star_leaves: int = 2**24
    exhaustive_words: int = 2**20
    double_loop_subset: int = 3
    double_loop_domain: int = 4

    @field_validator("closure_size", "star_leaves", "exhaustive_words")
    @classmethod
    def positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("budgets must be positive")
        return v


class ReducedParams(BaseModel):
    """Hand-picked (W, R, L) replacing the construction's formulas."""

    W: int
    R: int
    L: int

    @field_validator("W", "R")
    @classmethod
    def at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("W and R must be at least 1")
        return v

    @field_validator("L")
    @classmethod
    def non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("L must be non-negative")
        return v

    @classmethod
    def parse(cls, text: str) -> "ReducedParams":
        """Parse the CLI form "W,R,L"."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected W,R,L but got {text!r}")
        w, r, l = (int(p) for p in parts)
        return cls(W=w, R=r, L=l)


# Inputs each subcommand cannot run without.
_REQUIRED = {
    "analyze": ("graph",),
    "compat": ("graph", "op"),
    "oracle-loop": ("graph", "op"),
    "taylor": ("op",),
    "construct": ("graph", "op", "alpha"),
    "sample": ("graph", "op", "alpha"),
    "extract-loop": ("graph", "op", "alpha"),
    "double-loop": ("op",),
    "strong-loop": ("graph", "op"),
    "loop": ("graph", "op", "alpha"),
}


class RunConfig(BaseModel):
    subcommand: Literal[SUBCOMMANDS]
    graph: Optional[Path] = None
    op: Optional[Path] = None
    op_builtin: Optional[str] = None
    alpha: Optional[Path] = None
    subset: Optional[List[int]] = None
    undirected: bool = False
    seed: int = 0
    samples: int = 1000
    reduced: Optional[ReducedParams] = None
    budgets: Budgets = Budgets()
    format: Literal["json", "text"] = "json"
    n_jobs: int = 1
    progress: bool = False
    log_level: str = "WARNING"

    @field_validator("reduced", mode="before")
    @classmethod
    def parse_reduced(cls, v):
        if isinstance(v, str):
            return ReducedParams.parse(v)
        return v

    @field_validator("samples")
    @classmethod
    def non_negative_samples(cls, v: int) -> int:
        if v < 0:
            raise ValueError("samples must be non-negative")
        return v

    @model_validator(mode="after")
    def check_inputs(self) -> "RunConfig":
        if self.op is not None and self.op_builtin is not None:
            raise ValueError("--op and --op-builtin are mutually exclusive")
        for name in _REQUIRED[self.subcommand]:
            if name == "op":
                if self.op is None and self.op_builtin is None:
                    raise ValueError(f"{self.subcommand} needs --op or --op-builtin")
            elif getattr(self, name) is None:
                raise ValueError(f"{self.subcommand} needs --{name}")
        return self
