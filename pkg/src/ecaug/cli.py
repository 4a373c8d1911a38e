"""Command-line front end.

Three subcommands: ``analyze`` runs the augmented-estimation pipeline on a
CSV dataset, ``simulate`` runs one Monte Carlo configuration, ``tables``
reproduces a full benchmark table. Exit codes: 0 success, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bias import BiasSpec
from .data import read_csv
from .errors import EcaugError, NumericalFailure, ValidationFailure
from .estimators import BUILTIN_ESTIMANDS
from .linmod import DesignSpec
from .pipeline import AnalysisConfig, analyze
from .propensity import KnownConstant
from .simulation import (
    TABLE_SCENARIOS,
    SimulationConfig,
    check_reference_cells,
    run_study,
    run_table,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_SCENARIO_CODES = {
    "1": "S1",
    "2": "S2",
    "2ln": "S2_lowNoise",
    "3": "S3",
    "4": "S4",
    "4c": "S4_constB",
}

_BIAS_CODES = {
    "me": BiasSpec.mean_exchangeability,
    "constant": BiasSpec.constant,
    "linear": BiasSpec.linear_in_x,
    "flexible": BiasSpec.flexible,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecaug",
        description="Treatment effect estimation for trials augmented by external controls",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="analyze a CSV dataset")
    pa.add_argument("--data", required=True, help="CSV with columns z,a,y,x1,...,xp")
    pa.add_argument("--estimand", default="att", choices=sorted(BUILTIN_ESTIMANDS))
    pa.add_argument("--bias-model", default="me", choices=sorted(_BIAS_CODES))
    pa.add_argument(
        "--linear-bias-cols",
        default=None,
        help="comma-separated 1-based covariate indices entering the linear bias form",
    )
    pa.add_argument("--ea", default="fit", help='"fit" or "const:<q>"')
    pa.add_argument("--boot", type=int, default=None, metavar="B")
    pa.add_argument("--seed", type=int, default=None, help="required with --boot")
    pa.add_argument("--level", type=float, default=0.95)
    pa.add_argument("--out", default=None, help="write the report here as well")

    ps = sub.add_parser("simulate", help="run one Monte Carlo configuration")
    ps.add_argument("--scenario", required=True, choices=sorted(_SCENARIO_CODES))
    ps.add_argument("--b", type=float, default=0.0)
    ps.add_argument("--ratio", type=int, required=True, metavar="M", help="1:m ratio")
    ps.add_argument("--reps", type=int, default=1000)
    ps.add_argument("--n", type=int, default=1000)
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--out", default=None, help="write the result CSV here")

    pt = sub.add_parser("tables", help="reproduce a full benchmark table")
    pt.add_argument("--which", required=True, choices=sorted(TABLE_SCENARIOS))
    pt.add_argument("--reps", type=int, default=1000)
    pt.add_argument("--seed", type=int, required=True)
    pt.add_argument("--n", type=int, default=1000)
    pt.add_argument("--jobs", type=int, default=1)
    pt.add_argument("--out", required=True, help="output directory")
    pt.add_argument(
        "--assert",
        dest="check",
        action="store_true",
        help="check the reference spot cells (exit 3 on mismatch); sensible at --reps 1000",
    )
    return parser


def _analysis_report(result, args) -> str:
    lines = []
    c = result.counts
    lines.append("== ecaug analysis ==")
    lines.append(f"estimand: {result.estimand}   bias model: {args.bias_model}")
    lines.append(f"arm counts: n11={c.n11} n10={c.n10} n00={c.n00} (N={c.total})")
    ov = result.overlap
    lines.append(
        "overlap: e_z in [{:.4f}, {:.4f}], e_a in [{:.4f}, {:.4f}], "
        "e_z*e_a max {:.4f}, flagged rows: {}".format(
            ov["e_z"]["min"],
            ov["e_z"]["max"],
            ov["e_a"]["min"],
            ov["e_a"]["max"],
            ov["e_z_times_e_a"]["max"],
            len(ov["flagged_rows"]),
        )
    )
    if result.theta.size:
        lines.append("theta: " + " ".join(f"{t:.6f}" for t in result.theta))
    lines.append(f"point estimate: {result.point:.6f}")
    sw = result.sandwich
    lines.append(
        f"sandwich: se={sw.std_error:.6f} ci=({sw.ci_low:.6f}, {sw.ci_high:.6f}) level={sw.level}"
    )
    if result.bootstrap is not None:
        bt = result.bootstrap
        lines.append(
            f"bootstrap[B={bt.replicates_used}]: se={bt.std_error:.6f} "
            f"ci=({bt.ci_low:.6f}, {bt.ci_high:.6f}) level={bt.level}"
        )
    return "\n".join(lines) + "\n"


def _cmd_analyze(args) -> int:
    if args.boot is not None and args.seed is None:
        raise ValidationFailure("--seed is required with --boot")
    dataset = read_csv(args.data)
    if args.bias_model == "linear" and args.linear_bias_cols:
        cols = tuple(int(t) - 1 for t in args.linear_bias_cols.split(","))
        bias_spec = BiasSpec.linear_in_x(cols)
    else:
        bias_spec = _BIAS_CODES[args.bias_model]()
    if args.ea == "fit":
        a_design = DesignSpec()
    elif args.ea.startswith("const:"):
        a_design = KnownConstant(float(args.ea.split(":", 1)[1]))
    else:
        raise ValidationFailure(f'--ea must be "fit" or "const:<q>", got {args.ea!r}')
    config = AnalysisConfig(
        estimand=BUILTIN_ESTIMANDS[args.estimand](),
        bias_spec=bias_spec,
        a_design=a_design,
    )
    result = analyze(
        dataset, config, boot_reps=args.boot, seed=args.seed or 0, level=args.level
    )
    report = _analysis_report(result, args)
    sys.stdout.write(report)
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = SimulationConfig(
        scenario=_SCENARIO_CODES[args.scenario],
        b=args.b,
        m=args.ratio,
        n=args.n,
        reps=args.reps,
        seed=args.seed,
    )
    table = run_study(config, n_jobs=args.jobs)
    sys.stdout.write(table.render_text())
    if args.out:
        table.to_csv(args.out)
    return EXIT_OK


def _cmd_tables(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = run_table(args.which, reps=args.reps, seed=args.seed, n_jobs=args.jobs, n=args.n)
    text = table.render_text()
    sys.stdout.write(text)
    table.to_csv(out_dir / f"table_{args.which}.csv")
    (out_dir / f"table_{args.which}.txt").write_text(text, encoding="utf-8")
    if args.check:
        lines = check_reference_cells(args.which, table)
        sys.stdout.write("\n".join(lines) + "\n")
        if any(line.startswith("OFF") for line in lines):
            return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, matching our validation code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_tables(args)
    except ValidationFailure as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EcaugError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
