"""CLI entry point: python -m loopbench"""

import argparse
import logging
import sys

from pydantic import ValidationError

from loopbench.config import SUBCOMMANDS, Budgets, RunConfig
from loopbench.errors import ParseError
from loopbench.formats import parse_subset
from loopbench.models import ErrorResponse
from loopbench.runner import run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="loopbench: local loop lemma workbench for finite digraphs")
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="What to run")
    parser.add_argument("--graph", default=None, help="Digraph file (JSON or text)")
    parser.add_argument("--op", default=None, help="Operation table file (JSON)")
    parser.add_argument(
        "--op-builtin",
        default=None,
        help='Builtin operation, e.g. "min-chain:3", "majority3", "projection:0:3"',
    )
    parser.add_argument("--alpha", default=None, help="Alpha matrix file (JSON n x n array of vertices)")
    parser.add_argument("--subset", default=None, help='Subset X as a comma list, e.g. "0,1" (default: whole domain)')
    parser.add_argument("--undirected", action="store_true", help="Treat the digraph's edges as undirected")
    parser.add_argument("--seed", type=int, default=0, help="Sampling seed (default: 0)")
    parser.add_argument("--samples", type=int, default=1000, help="Number of sampled words (default: 1000)")
    parser.add_argument("--reduced", default=None, metavar="W,R,L", help="Reduced construction parameters")
    parser.add_argument(
        "--budget-closure",
        type=int,
        default=Budgets().closure_size,
        help=f"Closure size cap (default: {Budgets().closure_size})",
    )
    parser.add_argument(
        "--budget-star",
        type=int,
        default=Budgets().star_leaves,
        help=f"Star-power leaf cap (default: {Budgets().star_leaves})",
    )
    parser.add_argument(
        "--budget-words",
        type=int,
        default=Budgets().exhaustive_words,
        help=f"Exhaustive sweep cap (default: {Budgets().exhaustive_words})",
    )
    parser.add_argument(
        "--format",
        choices=["json", "text"],
        default="json",
        help="Report format; text is for display only (default: json)",
    )
    parser.add_argument("--n-jobs", type=int, default=1, help="Parallel sampling workers (default: 1)")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")
    parser.add_argument("--log-level", default="WARNING", help="Logging level (default: WARNING)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    )

    try:
        config = RunConfig(
            subcommand=args.subcommand,
            graph=args.graph,
            op=args.op,
            op_builtin=args.op_builtin,
            alpha=args.alpha,
            subset=parse_subset(args.subset) if args.subset else None,
            undirected=args.undirected,
            seed=args.seed,
            samples=args.samples,
            reduced=args.reduced,
            budgets=Budgets(
                closure_size=args.budget_closure,
                star_leaves=args.budget_star,
                exhaustive_words=args.budget_words,
            ),
            format=args.format,
            n_jobs=args.n_jobs,
            progress=args.progress,
            log_level=args.log_level,
        )
    except ParseError as exc:
        sys.stderr.write(ErrorResponse(detail=str(exc), error_code="PARSE_ERROR").model_dump_json() + "\n")
        return 1
    except ValidationError as exc:
        detail = "; ".join(e["msg"] for e in exc.errors())
        sys.stderr.write(ErrorResponse(detail=detail, error_code="INVALID_INPUT").model_dump_json() + "\n")
        return 1

    return run(config)


if __name__ == "__main__":
    sys.exit(main())
