"""
emk command line: μ-functions, local Euler–Maclaurin expansions, exact
verification against Riemann sums, and Ehrhart data of rational polyhedra.

Environment variables:
  EMK_LOG_LEVEL – loguru level of the stderr sink (default WARNING)
  EMK_THREADS   – worker threads for per-face work and lattice enumeration (default 1)
  EMK_QUAD_TOL  – tolerance of the numeric quadrature path (default 1e-10)

Exit codes: 0 success, 2 invalid input, 3 verification mismatch.
"""

import argparse
import os
import sys
from pathlib import Path

import pydantic
from loguru import logger

from emk import __version__
from emk.algebra import parse_rational
from emk.commands import JobSpec, ehrhart, expand, local_eml, mu, verify
from emk.errors import EmkError, ValidationError, VerificationMismatch
from emk.report import to_json, write

# ── Configuration ────────────────────────────────────
EMK_LOG_LEVEL: str = os.getenv("EMK_LOG_LEVEL", "WARNING").upper()

COMMANDS = {
    "mu": mu,
    "expand": expand,
    "verify": verify,
    "ehrhart": ehrhart,
    "local-eml": local_eml,
}


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--polyhedron", type=Path, help="Polyhedron JSON (inequalities or generators).")
    common.add_argument("--cone", type=Path, help="Affine cone JSON {dim, vertex, rays}.")
    common.add_argument("--scalar-product", type=Path, dest="scalar_product", help="Scalar product JSON {matrix}.")
    common.add_argument("--order", type=int, default=2, help="Expansion order K / μ depth (default: 2).")
    common.add_argument("--t", type=_rational, nargs="+", default=[], dest="ts", help="Dilation parameters.")
    common.add_argument("--h", default="one", help="Polynomial test function, e.g. \"x1^2*x2 - 1/2*x1\" (default: one).")
    common.add_argument("--mode", choices=["integer", "rational-t"], default="integer")
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument("--output", type=Path, help="Write the document here instead of stdout.")

    parser = argparse.ArgumentParser(prog="emk", description="Exact local Euler–Maclaurin expansions.")
    parser.add_argument("--version", action="version", version=f"emk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mu", parents=[common], help="μ-functions of a cone or of the transverse cones of a polyhedron.")
    sub.add_parser("expand", parents=[common], help="Terms of the asymptotic expansion up to --order.")
    verify_parser = sub.add_parser("verify", parents=[common], help="Compare the expansion with brute-force Riemann sums.")
    verify_parser.add_argument("--terms", type=Path, help="Re-use an expand JSON document.")
    sub.add_parser("ehrhart", parents=[common], help="Ehrhart polynomial (integer) or counts at rational t.")
    sub.add_parser("local-eml", parents=[common], help="Per-face μ and I data of a pointed affine cone.")
    return parser


def _emit(job: JobSpec, doc: dict) -> None:
    text = COMMANDS[job.command].render(doc) if job.format == "table" else to_json(doc)
    write(text, job.output)


def main(argv: list[str] | None = None) -> int:
    logger.remove()
    logger.add(sys.stderr, level=EMK_LOG_LEVEL)
    args = build_parser().parse_args(argv)
    try:
        job = JobSpec(**{k: v for k, v in vars(args).items() if k in JobSpec.__dataclass_fields__})
        logger.info(f"Running {job.command} (order {job.order}, mode {job.mode})")
        doc = COMMANDS[job.command].run(job)
        _emit(job, doc)
        return 0
    except VerificationMismatch as e:
        logger.error(str(e))
        if e.document is not None:
            _emit(job, e.document)
        print(f"emk: {e}", file=sys.stderr)
        return e.exit_code
    except pydantic.ValidationError as e:
        logger.error(f"Invalid input document: {e.error_count()} error(s)")
        print(f"emk: invalid input: {e.errors()[0]['msg']}", file=sys.stderr)
        return ValidationError.exit_code
    except EmkError as e:
        logger.error(str(e))
        print(f"emk: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
