"""Command-line front end.

    fama-wpcn run --scenario fig3 --trials 100000 --seed 7 --out fig3.csv
    fama-wpcn validate --scenario fig5
    fama-wpcn list

Exit status: 0 ok, 2 configuration error, 3 validation failure, 4 I/O error.
The default output directory is taken from ``FAMA_WPCN_OUT`` (else ".").
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigError, DomainError, ModelError, ValidationFailure

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4
OUT_ENV = "FAMA_WPCN_OUT"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fama-wpcn", description="Outage analysis of fluid-antenna "
                "multiple-access wireless-powered networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--scenario", required=True,
                        help="built-in name (fig3..fig12) or key=value scenario file")
        sp.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per point")
        sp.add_argument("--seed", type=_nonneg_int, help="base seed")
        sp.add_argument("--glq-order", type=_positive_int, default=None,
                        help="Gauss-Laguerre order (default 96)")
        sp.add_argument("--eps", type=float, help="eigenvalue threshold for the block fit")
        sp.add_argument("--workers", type=_positive_int, default=1,
                        help="grid points evaluated concurrently")
        sp.add_argument("--jakes", action="store_true",
                        help="simulate the exact Jakes covariance instead of blocks")
        sp.add_argument("-v", "--verbose", action="store_true")

    run = sub.add_parser("run", help="evaluate a scenario and write CSV (+ SVG)")
    common(run)
    run.add_argument("--out", help="CSV path (default $FAMA_WPCN_OUT/<scenario>.csv)")
    run.add_argument("--format", choices=("csv", "csv+svg"), default="csv")

    val = sub.add_parser("validate", help="cross-check analytic forms against simulation")
    common(val)
    val.add_argument("--out", help="also write the CSV here")
    val.add_argument("--tolerance", type=float,
                     help="fixed absolute budget replacing the shipped tolerances")
    val.add_argument("--ci-multiplier", type=float,
                     help="CI half-widths added to the budget (default 3)")

    sub.add_parser("list", help="list built-in scenarios")
    return p


def _scenario(args):
    from .scenarios import load_scenario

    sc = load_scenario(args.scenario)
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.eps is not None:
        changes["eps"] = args.eps
    if args.jakes:
        changes["model"] = "jakes"
    return sc.replace(**changes) if changes else sc


def _out_path(args, sc) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV, ".")) / f"{sc.name}.csv"


def _write(rows, sc, path: Path, with_svg: bool):
    from .plotting import plot_rows
    from .runner import write_csv

    write_csv(rows, path)
    print(f"wrote {path}")
    if with_svg:
        for svg in plot_rows(sc, rows, path.with_suffix("")):
            print(f"wrote {svg}")


def _cmd_run(args) -> int:
    from .runner import run_scenario

    sc = _scenario(args)
    path = _out_path(args, sc)
    if not path.parent.is_dir():
        raise OSError(f"output directory does not exist: {path.parent}")
    rows = run_scenario(sc, args.glq_order, args.workers)
    _write(rows, sc, path, args.format == "csv+svg")
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .runner import run_scenario
    from .validation import cross_checks, format_report, raise_on_failure

    if args.tolerance is not None and not args.tolerance >= 0:
        raise ConfigError(f"--tolerance must be >= 0, got {args.tolerance}")
    sc = _scenario(args)
    if sc.kind != "outage" or "mc" not in sc.methods:
        raise ConfigError(f"scenario {sc.name!r} has no simulated rows to validate against")
    rows = run_scenario(sc, args.glq_order, args.workers)
    if args.out:
        _write(rows, sc, Path(args.out), False)
    checks = cross_checks(rows, args.tolerance, args.ci_multiplier)
    print(format_report(checks))
    raise_on_failure(checks)
    return EXIT_OK


def _cmd_list(args) -> int:
    from .scenarios import BUILTIN

    for name, sc in BUILTIN.items():
        print(f"{name:6s} {sc.kind:9s} {sc.sweep_var:12s} "
              f"{','.join(sc.strategies) or '-'} {','.join(sc.methods) or '-'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False)
                        else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "validate": _cmd_validate, "list": _cmd_list}[args.command]
    try:
        return handler(args)
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigError, DomainError, ModelError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
