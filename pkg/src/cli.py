"""
Command-line entry point: analyze, dichotomy, interp, semigroup, generate and sweep.
Exit codes: 0 every certificate passed, 1 a certificate failed, 2 bad input.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.dichotomy import DichotomyMethod
from src.dissipativity import GeneratorKind, generate
from src.reporting import (
    AnalysisOptions,
    IdentityKind,
    Stage,
    SweepFamily,
    analyze,
    dumps,
    emit,
    load_operator,
    operator_payload,
    parse_grid,
    save_operator,
    sweep,
)
from src.utils.config import config
from src.utils.errors import INPUT_ERRORS, KreinError
from src.utils.logging_setup import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

# Numbered spellings accepted by --identity
IDENTITY_ALIASES = {"2.6": IdentityKind.TOWER, "2.9": IdentityKind.SHIFTED, "2.10": IdentityKind.F_SCALE}


def _methods(choice: str) -> List[DichotomyMethod]:
    if choice == "both":
        return [DichotomyMethod.SCHUR, DichotomyMethod.CONTOUR]
    return [DichotomyMethod(choice)]


def _signature(text: str) -> tuple:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"signature must look like 'p,q', got {text!r}")
    return p, q


def _param(text: str) -> tuple:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"parameter must look like key=value, got {text!r}")
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key} needs a numeric value, got {value!r}")
    return key, int(number) if key in ("n", "rank") else number


def _report_and_exit(report, out: Optional[str]) -> int:
    text = emit(report, "json", out)
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAILED


# ============================================================================
# Subcommands
# ============================================================================


def cmd_analyze(args: argparse.Namespace) -> int:
    op = load_operator(args.file)
    options = AnalysisOptions(
        deflate=args.deflate, methods=_methods(args.method), tol=args.tol, contour_nodes=args.contour_nodes,
    )
    return _report_and_exit(analyze(op, options), args.out)


def cmd_dichotomy(args: argparse.Namespace) -> int:
    op = load_operator(args.file)
    options = AnalysisOptions(
        deflate=args.deflate, methods=_methods(args.method), tol=args.tol, contour_nodes=args.contour_nodes,
        stages=[Stage.DICHOTOMY, Stage.VERIFICATION],
    )
    return _report_and_exit(analyze(op, options), args.out)


def cmd_interp(args: argparse.Namespace) -> int:
    op = load_operator(args.file)
    if args.identity == "all":
        identities = list(IdentityKind)
    else:
        identities = [IDENTITY_ALIASES.get(args.identity) or IdentityKind(args.identity)]
    options = AnalysisOptions(deflate=args.deflate, identities=identities, stages=[Stage.INTERPOLATION])
    return _report_and_exit(analyze(op, options), args.out)


def cmd_semigroup(args: argparse.Namespace) -> int:
    op = load_operator(args.file)
    sides = ["plus", "minus"] if args.subspace == "both" else [args.subspace]
    options = AnalysisOptions(
        deflate=args.deflate, methods=[DichotomyMethod.SCHUR], sides=sides, horizon=args.T,
        stages=[Stage.SEMIGROUP],
    )
    return _report_and_exit(analyze(op, options), args.out)


def cmd_generate(args: argparse.Namespace) -> int:
    params = dict(args.param or [])
    if args.n is not None:
        params["n"] = args.n
    op = generate(args.kind, signature=args.signature, seed=args.seed, **params)
    if args.out:
        save_operator(op, args.out)
    else:
        sys.stdout.write(dumps(operator_payload(op).model_dump(mode="python", exclude_none=True)))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    frame = sweep(args.family, parse_grid(args.grid), seed=args.seed, n_jobs=args.jobs)
    text = emit(frame, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK if (frame["reason"] == "").all() else EXIT_FAILED


# ============================================================================
# Parser
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="krein-dichotomy",
        description="Invariant maximal semidefinite subspaces of J-dissipative matrices.",
    )
    p.add_argument("--strict", action="store_true", help="Halve every numerical tolerance.")
    p.add_argument("--log-level", default=None, help=f"Log level (default: {config.LOG_LEVEL}).")
    p.add_argument("--log-format", choices=["text", "json"], default=None, help="Log record format.")
    sub = p.add_subparsers(dest="command", required=True)

    def operator_command(name: str, help_text: str) -> argparse.ArgumentParser:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("file", help="Operator JSON file.")
        s.add_argument("--deflate", action="store_true", help="Split off eigenvalues on the imaginary axis.")
        s.add_argument("--out", default=None, help="Write the JSON report here instead of stdout.")
        return s

    s = operator_command("analyze", "Run every stage and print the certificate report.")
    s.add_argument("--method", choices=["schur", "contour", "both"], default="both")
    s.add_argument("--tol", type=float, default=None, help="Verification tolerance.")
    s.add_argument("--contour-nodes", type=int, default=None, dest="contour_nodes",
                   help="Starting Gauss nodes per contour panel.")
    s.set_defaults(handler=cmd_analyze)

    s = operator_command("dichotomy", "Compute and verify M+ and M-.")
    s.add_argument("--method", choices=["schur", "contour", "both"], default="both")
    s.add_argument("--tol", type=float, default=None, help="Verification tolerance.")
    s.add_argument("--contour-nodes", type=int, default=None, dest="contour_nodes")
    s.set_defaults(handler=cmd_dichotomy)

    s = operator_command("interp", "Check interpolation identities.")
    s.add_argument("--identity", choices=[k.value for k in IdentityKind] + list(IDENTITY_ALIASES) + ["all"], default="all")
    s.set_defaults(handler=cmd_interp)

    s = operator_command("semigroup", "Semigroup bounds and energy identities on M+ / M-.")
    s.add_argument("--subspace", choices=["plus", "minus", "both"], default="both")
    s.add_argument("--T", type=float, default=None, help="Energy horizon.")
    s.set_defaults(handler=cmd_semigroup)

    s = sub.add_parser("generate", help="Write a random operator of a given family.")
    s.add_argument("--kind", choices=[k.value for k in GeneratorKind], required=True)
    s.add_argument("--signature", type=_signature, default=(1, 1), help="p,q of the Krein space.")
    s.add_argument("--n", type=int, default=None, help="Dimension for the discretized family.")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--param", type=_param, action="append", help="Family parameter key=value (repeatable).")
    s.add_argument("--out", default=None)
    s.set_defaults(handler=cmd_generate)

    s = sub.add_parser("sweep", help="Tabulate constants of a family over a parameter grid.")
    s.add_argument("--family", choices=[f.value for f in SweepFamily], required=True)
    s.add_argument("--grid", required=True, help="'start:stop:count' or a comma separated list.")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--jobs", type=int, default=None, help=f"Workers (default: {config.worker_count}).")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out", default=None)
    s.set_defaults(handler=cmd_sweep)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_format)
    logger.debug(f"{config.PROJECT_NAME} ({config.ENV}) config: {config.to_dict()}")
    saved = {name: getattr(config, name) for name in config.TOLERANCE_FIELDS}
    if args.strict or config.STRICT_MODE:
        config.apply_tolerance_factor(0.5)
        logger.info("Strict mode: tolerances halved")
    try:
        return args.handler(args)
    except INPUT_ERRORS as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except KreinError as e:
        logger.error(f"✗ {type(e).__name__}: {e}")
        return EXIT_FAILED
    finally:
        for name, value in saved.items():
            setattr(config, name, value)


if __name__ == "__main__":
    sys.exit(main())
