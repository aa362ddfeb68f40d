import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from tracebound.analysis import AnalysisConfig, analyze, render, save_report
from tracebound.config import load_config, resolve_seed
from tracebound.ensembles import KINDS, EnsembleSpec
from tracebound.errors import ConvergenceError, ParameterError, TraceboundError
from tracebound.matrix_io import parse_complex_token
from tracebound.verification import run_suite

EXIT_OK = 0
EXIT_CLAIM_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_CONVERGENCE = 3


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _complex_list(text: str) -> Tuple[complex, ...]:
    try:
        return tuple(parse_complex_token(tok) for tok in text.split(",") if tok.strip())
    except TraceboundError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="YAML config file (default: config.yaml at the repo root).")
    parser.add_argument("--slack", type=float, default=None, help="Relative verification slack (default from config).")
    parser.add_argument("--seed", type=int, default=None, help="Ensemble seed; falls back to $TRACEBOUND_SEED, then config.")
    parser.add_argument("--values", type=_complex_list, default=None, help="Diagonal values for the diagonal ensemble, e.g. 0,0,0,4.")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracebound",
        description="Trace-based eigenvalue localisation bounds with oracle verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="Compute bounds for one matrix.")
    an.add_argument("--input", "-i", type=str, default=None, help="Matrix file (Matrix Market, JSON or CSV).")
    an.add_argument("--format", "-f", type=str, default=None, choices=["mm", "matrix_market", "json", "csv"])
    an.add_argument("--ensemble", type=str, default=None, choices=KINDS, help="Analyse a generated matrix instead of a file.")
    an.add_argument("--n", type=int, default=None, help="Order of the generated matrix.")
    an.add_argument("--scale", type=float, default=1.0)
    an.add_argument("--k", type=_int_list, default=None, help="Central disk indices (default: every k <= (n+1)/2).")
    an.add_argument("--r", type=_int_list, default=None, help="Moment orders (default from config).")
    an.add_argument("--mode", type=str, default="auto", choices=["auto", "oracle", "normal", "upper"], help="Source of S_lambda^2.")
    an.add_argument("--rank", type=int, default=None, help="Effective dimension m when A has n-m known zero eigenvalues.")
    an.add_argument("--known", type=_complex_list, default=(), help="Known eigenvalues for neighbor disks, e.g. 1,2-i.")
    an.add_argument("--real-spectrum", action="store_true", help="Assert that every eigenvalue is real.")
    an.add_argument("--verify", action="store_true", help="Check every claim against the reference eigensolver.")
    an.add_argument("--out", type=str, default=None, choices=["json", "table", "csv"])
    an.add_argument("--save", type=str, default=None, help="Also write the report (.json, .csv, .txt or .xlsx).")
    _add_common(an)

    ve = sub.add_parser("verify", help="Run the soundness suite over random ensembles.")
    ve.add_argument("--ensemble", type=str, default="hermitian", help=f"Comma-separated kinds from {', '.join(KINDS)}.")
    ve.add_argument("--n", type=_int_list, default=(8,), help="Comma-separated orders.")
    ve.add_argument("--trials", type=int, default=1)
    ve.add_argument("--scale", type=float, default=1.0)
    ve.add_argument("--workers", type=int, default=1)
    ve.add_argument("--out", type=str, default="table", choices=["table", "json"])
    _add_common(ve)
    return parser


def _ensemble_specs(kinds: Sequence[str], ns: Sequence[int], seed: int, scale: float, values) -> List[EnsembleSpec]:
    if values is not None:
        return [EnsembleSpec("diagonal", len(values), seed, scale, tuple(values))]
    return [EnsembleSpec(kind, n, seed, scale) for kind in kinds for n in ns]


def analyze_command(args: argparse.Namespace) -> int:
    settings = load_config(args.config)
    seed = resolve_seed(args.seed, settings)
    ensemble = None
    if args.ensemble is not None or args.values is not None:
        kind = "diagonal" if args.values is not None else args.ensemble
        n = len(args.values) if args.values is not None else args.n
        if n is None:
            raise ParameterError("--n is required with --ensemble")
        ensemble = _ensemble_specs([kind], [n], seed, args.scale, args.values)[0]

    config = AnalysisConfig(
        input_path=args.input,
        input_format=args.format,
        ensemble=ensemble,
        k_values=args.k,
        r_values=args.r if args.r is not None else settings.r_values,
        s_lambda_mode=args.mode,
        rank_override=args.rank,
        known=tuple(args.known),
        real_spectrum=args.real_spectrum,
        verify=args.verify,
        output_format=args.out or settings.output_format,
        slack=args.slack if args.slack is not None else settings.slack,
        seed=seed,
        settings=settings,
    )
    report = analyze(config)
    sys.stdout.write(render(report, config.output_format, settings.decimals))
    if args.save:
        path = save_report(report, args.save, settings.decimals)
        print(f"Report saved: {path}", file=sys.stderr)
    return EXIT_OK if report.all_verified else EXIT_CLAIM_FAILURE


def verify_command(args: argparse.Namespace) -> int:
    settings = load_config(args.config)
    seed = resolve_seed(args.seed, settings)
    kinds = [k.strip() for k in args.ensemble.split(",") if k.strip()]
    specs = _ensemble_specs(kinds, args.n, seed, args.scale, args.values)
    slack = args.slack if args.slack is not None else settings.slack
    report = run_suite(
        specs,
        args.trials,
        slack=slack,
        workers=args.workers,
        normal_tol=settings.normal_tol,
        eig_tol=settings.eig_tol,
        sweeps_per_order=settings.sweeps_per_order,
    )

    if args.out == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.summary_frame().to_string(index=False))
        print()
        print(report.checks_frame().to_string(index=False))
        print()
        for failure in report.failures:
            print(f"FAILED {failure.kind} n={failure.n} seed={failure.seed} trial={failure.trial}: {failure.description} (margin {failure.margin:.3e})")
        print(
            f"Claims checked: {report.claims_checked}, failures: {len(report.failures)}, "
            f"convergence failures: {len(report.convergence_failures)}, min margin: {report.min_margin:.3e}"
        )
    if report.failures:
        return EXIT_CLAIM_FAILURE
    if report.convergence_failures:
        return EXIT_CONVERGENCE
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    command = analyze_command if args.command == "analyze" else verify_command
    try:
        return command(args)
    except ConvergenceError as exc:
        print(f"Eigensolver did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except TraceboundError as exc:
        print(f"Input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
