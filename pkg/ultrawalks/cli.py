import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List

from .config import FORMATS, ExperimentConfig, load_config
from .dynamics import WalkKind, classical_transition, quantum_transition
from .errors import UltrawalksError
from .experiment import (
    OutputLayout,
    generator_file,
    generator_from_config,
    limiting_file,
    run,
    snapshot_file,
    spectrum_summary,
)
from .generator import validate_generator
from .limiting import compare, limiting_quadrature, limiting_spectral
from .matrix_io import write_matrix
from .spectral import SpectralData, eigendecompose
from .validation import run_validation

logger = logging.getLogger(__name__)


def _print_json(document: Any) -> None:
    print(json.dumps(document, indent=2))


def _relative(layout: OutputLayout, paths: List[Path]) -> List[str]:
    return [layout.relative(path) for path in paths]


def _config(args: argparse.Namespace) -> ExperimentConfig:
    base = load_config(args.config) if args.config else ExperimentConfig()
    config = base.with_overrides(
        p=args.p,
        l=args.l,
        alpha=args.alpha,
        kernel_file=args.kernel_file,
        adjacency_file=args.adjacency_file,
        times=args.times,
        T=args.T,
        steps=args.steps,
        tau=args.tau,
        out=args.out,
        formats=args.format,
        workers=args.workers,
    )
    return config.validate()


def _spectral(config: ExperimentConfig) -> SpectralData:
    return eigendecompose(generator_from_config(config), config.averaging.tau_cluster)


def cmd_run(args: argparse.Namespace) -> None:
    manifest = run(_config(args))
    _print_json({"out": str(manifest.base_dir), **manifest.as_dict()})
    if not manifest.validation_passed:
        sys.exit(1)


def cmd_matrix(args: argparse.Namespace) -> None:
    config = _config(args)
    g = generator_from_config(config)
    layout = OutputLayout(config.out)
    paths = write_matrix(layout.generator_stem(), generator_file(g), config.formats)
    _print_json({"written": _relative(layout, paths), "validation": validate_generator(g).as_dict()})


def _cmd_snapshots(args: argparse.Namespace, kind: WalkKind) -> None:
    config = _config(args)
    s = _spectral(config)
    layout = OutputLayout(config.out)
    transition = classical_transition if kind is WalkKind.CLASSICAL else quantum_transition
    records: List[Dict[str, Any]] = []
    for t in config.times:
        snapshot = transition(s, t)
        paths = write_matrix(layout.snapshot_stem(kind, t), snapshot_file(snapshot), config.formats)
        records.append(
            {
                "t": t,
                "min": float(snapshot.matrix.min()),
                "max": float(snapshot.matrix.max()),
                "written": _relative(layout, paths),
            }
        )
    _print_json(records)


def cmd_ctmc(args: argparse.Namespace) -> None:
    _cmd_snapshots(args, WalkKind.CLASSICAL)


def cmd_ctqmc(args: argparse.Namespace) -> None:
    _cmd_snapshots(args, WalkKind.QUANTUM)


def cmd_spectrum(args: argparse.Namespace) -> None:
    _print_json(spectrum_summary(_spectral(_config(args))))


def _limit(args: argparse.Namespace, config: ExperimentConfig):
    s = _spectral(config)
    if args.method == "quadrature":
        return limiting_quadrature(s, config.averaging.T, config.averaging.steps)
    return limiting_spectral(s, config.averaging.tau_cluster)


def cmd_limiting(args: argparse.Namespace) -> None:
    config = _config(args)
    limit = _limit(args, config)
    layout = OutputLayout(config.out)
    paths = write_matrix(layout.limiting_stem(limit.method), limiting_file(limit), config.formats)
    _print_json({"method": limit.method, "written": _relative(layout, paths), "warnings": list(limit.warnings)})


def cmd_compare(args: argparse.Namespace) -> None:
    config = _config(args)
    limit = _limit(args, config)
    _print_json({"method": limit.method, **compare(limit).as_dict()})


def cmd_validate(args: argparse.Namespace) -> None:
    config = _config(args)
    g = generator_from_config(config)
    suite = run_validation(g, config.times, config.averaging.tau_cluster)
    _print_json(suite.as_dict())
    if not suite.passed:
        sys.exit(1)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment config; flags override its values")
    common.add_argument("--p", type=int, help="Prime p")
    common.add_argument("--l", type=int, help="Truncation level l (p**l states)")
    kernel = common.add_mutually_exclusive_group()
    kernel.add_argument("--alpha", type=float, help="Bessel kernel exponent (1 selects the log kernel)")
    kernel.add_argument("--kernel-file", type=Path, help="Tabulated radial kernel (JSON)")
    kernel.add_argument("--adjacency-file", type=Path, help="Graph adjacency on G_l (JSON)")
    common.add_argument("--times", type=float, nargs="+", help="Snapshot times")
    common.add_argument("--T", type=float, help="Averaging window for the quadrature limit")
    common.add_argument("--steps", type=int, help="Quadrature points on [0, T]")
    common.add_argument("--tau", type=float, help="Eigenvalue clustering tolerance")
    common.add_argument("--out", type=Path, help="Output directory (default: $ULTRAWALKS_OUT or ./ultrawalks-out)")
    common.add_argument("--format", nargs="+", choices=FORMATS, help="Output formats")
    common.add_argument("--workers", type=int, help="Worker threads")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Random walks on ultrametric p-adic state spaces")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    run_p = subparsers.add_parser("run", parents=[common], help="Emit every figure's data with a manifest")
    run_p.set_defaults(func=cmd_run)

    matrix_p = subparsers.add_parser("matrix", parents=[common], help="Write the generator matrix")
    matrix_p.set_defaults(func=cmd_matrix)

    ctmc_p = subparsers.add_parser("ctmc", parents=[common], help="Classical transition matrices p(t)")
    ctmc_p.set_defaults(func=cmd_ctmc)

    ctqmc_p = subparsers.add_parser("ctqmc", parents=[common], help="Quantum transition matrices pi(t)")
    ctqmc_p.set_defaults(func=cmd_ctqmc)

    spectrum_p = subparsers.add_parser("spectrum", parents=[common], help="Eigenvalues with multiplicities")
    spectrum_p.set_defaults(func=cmd_spectrum)

    for name, func, help_text in (
        ("limiting", cmd_limiting, "Write the limiting distribution chi"),
        ("compare", cmd_compare, "Compare chi with the stationary distribution"),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("--method", choices=("spectral", "quadrature"), default="spectral")
        sub.set_defaults(func=func)

    validate_p = subparsers.add_parser("validate", parents=[common], help="Run the invariant suite")
    validate_p.set_defaults(func=cmd_validate)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if args.config is None:
        if args.p is None or args.l is None:
            parser.error("--p and --l are required without --config")
        if args.alpha is None and args.kernel_file is None and args.adjacency_file is None:
            parser.error("one of --alpha, --kernel-file, --adjacency-file is required without --config")
    try:
        args.func(args)
    except (UltrawalksError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
