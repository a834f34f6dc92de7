"""Command-line front end.

Subcommands::

    handeye generate   write a synthetic dataset (ground truth in metadata)
    handeye calibrate  solve a dataset with one method, write a solution doc
    handeye residuals  evaluate solution documents against a dataset
    handeye simulate   run stability sweeps, write CSV reports

Exit codes: 0 ok, 1 parse error, 2 schema error, 3 degenerate or
ill-conditioned input, 4 optimizer did not converge, 5 I/O error,
6 bad flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datafiles import (
    load_dataset,
    load_solution,
    save_dataset,
    save_solution,
    synthetic_dataset,
)
from .errors import (
    CalibrationError,
    FlagError,
    ParseError,
    SchemaError,
)
from .quaternion import axis_angle
from .simulate import (
    DEFAULT_METHODS,
    Distribution,
    Formulation,
    NoiseModel,
    NoiseTargets,
    StabilityReport,
    default_scenario,
    motion_count_sweep,
    noise_sweep,
    perspective_scenario,
)
from .solvers import Method, report_residuals, solve

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SCHEMA = 2
EXIT_DEGENERATE = 3
EXIT_NO_CONVERGENCE = 4
EXIT_IO = 5
EXIT_FLAGS = 6

CSV_HEADER = "sweep_var,method,e_rot,e_tr,failed_trials"

DEFAULT_LEVELS = (0.01, 0.02, 0.03, 0.04, 0.05, 0.06)


def report_csv(report: StabilityReport) -> str:
    """Fixed-header CSV of a stability report; bytes depend only on the data."""
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            f"{row.sweep_var:.12g},{row.method.value},"
            f"{row.e_rot:.12g},{row.e_tr:.12g},{row.failed_trials}"
        )
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="handeye", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset")
    gen.add_argument("--motions", type=int, default=4, help="number of motions (>= 2)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--formulation",
        choices=[f.value for f in Formulation],
        default=Formulation.CLASSICAL.value,
    )
    gen.add_argument("--noise-level", type=float, default=0.0, help="noise ratio, e.g. 0.02")
    gen.add_argument(
        "--noise-distribution",
        choices=[d.value for d in Distribution],
        default=Distribution.GAUSSIAN.value,
    )
    gen.add_argument(
        "--noise-targets",
        choices=[t.value for t in NoiseTargets],
        default=NoiseTargets.ROTATION_AND_TRANSLATION.value,
    )
    gen.add_argument("output", help="dataset path (YAML)")

    cal = sub.add_parser("calibrate", help="solve one dataset")
    cal.add_argument("input", help="dataset path")
    cal.add_argument(
        "--formulation",
        choices=[f.value for f in Formulation],
        default=None,
        help="must match the dataset when given",
    )
    cal.add_argument(
        "--method",
        choices=[m.value for m in Method],
        default=Method.NONLINEAR.value,
    )
    cal.add_argument("--output", default=None, help="solution path (YAML); default stdout")

    res = sub.add_parser("residuals", help="evaluate solutions against a dataset")
    res.add_argument("input", help="dataset path")
    res.add_argument("solutions", nargs="+", help="one or more solution documents")
    res.add_argument("--csv", default=None, help="also write the table as CSV")

    sim = sub.add_parser("simulate", help="stability sweeps")
    sim.add_argument(
        "--distribution",
        choices=[d.value for d in Distribution] + ["both"],
        default="both",
    )
    sim.add_argument(
        "--targets",
        choices=[t.value for t in NoiseTargets] + ["both"],
        default="both",
    )
    sim.add_argument("--levels", default=None, help="comma-separated noise ratios")
    sim.add_argument(
        "--motions", default=None, help="motion-count sweep, e.g. 2:9 or 2,4,9"
    )
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument(
        "--formulation",
        choices=[f.value for f in Formulation],
        default=Formulation.CLASSICAL.value,
    )
    sim.add_argument("--output", default=None, help="CSV path; default stdout")
    return parser


def _parse_levels(text: str) -> list[float]:
    try:
        levels = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as err:
        raise FlagError(f"--levels: {err}") from err
    if not levels or any(level < 0 for level in levels):
        raise FlagError("--levels: need non-negative ratios")
    return levels


def _parse_counts(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            counts = list(range(int(lo), int(hi) + 1))
        else:
            counts = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as err:
        raise FlagError(f"--motions: {err}") from err
    if not counts or any(n < 2 for n in counts):
        raise FlagError("--motions: need counts >= 2")
    return counts


def _cmd_generate(args) -> int:
    if args.motions < 2:
        raise FlagError(f"--motions: need at least 2, got {args.motions}")
    if args.noise_level < 0:
        raise FlagError("--noise-level: must be non-negative")
    noise = None
    if args.noise_level > 0:
        noise = NoiseModel(
            distribution=Distribution(args.noise_distribution),
            level=args.noise_level,
            targets=NoiseTargets(args.noise_targets),
            seed=args.seed,
        )
    dataset = synthetic_dataset(args.motions, args.seed, Formulation(args.formulation), noise)
    save_dataset(dataset, args.output)
    print(f"wrote {args.output}: {len(dataset.hand_poses)} positions ({args.formulation})")
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    dataset = load_dataset(args.input)
    if args.formulation is not None and Formulation(args.formulation) != dataset.formulation:
        raise SchemaError(
            f"--formulation {args.formulation} does not match dataset "
            f"({dataset.formulation.value})"
        )
    solution = solve(Method(args.method), dataset.constraints())
    if args.output is not None:
        save_solution(solution, args.output)
    axis, angle = axis_angle(solution.rotation)
    w, x, y, z = solution.rotation
    print(f"method:               {solution.method.value}")
    print(f"quaternion (w x y z): {w:.9f} {x:.9f} {y:.9f} {z:.9f}")
    print(f"axis / angle:         [{axis[0]:.6f} {axis[1]:.6f} {axis[2]:.6f}] / "
          f"{angle:.6f} rad")
    print("translation (mm):     "
          + " ".join(f"{val:.4f}" for val in solution.translation))
    print(f"rotation residual:    {solution.rotation_residual:.6e}")
    print(f"translation residual: {solution.translation_residual:.6e}")
    print(f"iterations:           {solution.iterations}")
    if not solution.converged:
        print("warning: optimizer hit its iteration cap before converging", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_residuals(args) -> int:
    dataset = load_dataset(args.input)
    constraints = dataset.constraints()
    rows = []
    for path in args.solutions:
        solution = load_solution(path)
        rot, tr = report_residuals(constraints, solution)
        rows.append((solution.method.value, rot, tr))
    name_width = max(len("method"), max(len(r[0]) for r in rows))
    header = f"{'method':<{name_width}}  {'rotation':>12}  {'translation':>12}"
    print(header)
    print("-" * len(header))
    for name, rot, tr in rows:
        print(f"{name:<{name_width}}  {rot:>12.4g}  {tr:>12.4g}")
    if args.csv is not None:
        lines = ["method,rotation_residual,translation_residual"]
        lines += [f"{name},{rot:.12g},{tr:.12g}" for name, rot, tr in rows]
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def _simulate_one(args, distribution: Distribution, targets: NoiseTargets) -> str:
    methods = DEFAULT_METHODS
    if args.motions is not None:
        counts = _parse_counts(args.motions)
        if Formulation(args.formulation) == Formulation.CLASSICAL:
            family = lambda n: default_scenario(n, args.seed)  # noqa: E731
        else:
            family = lambda n: perspective_scenario(n, args.seed)  # noqa: E731
        trans_level = 0.02 if targets == NoiseTargets.ROTATION_AND_TRANSLATION else 0.0
        report = motion_count_sweep(
            family,
            counts,
            rot_level=0.06,
            trans_level=trans_level,
            trials=args.trials,
            distribution=distribution,
            seed=args.seed,
            methods=methods,
        )
    else:
        levels = _parse_levels(args.levels) if args.levels is not None else list(DEFAULT_LEVELS)
        scenario = (
            default_scenario(2, args.seed)
            if Formulation(args.formulation) == Formulation.CLASSICAL
            else perspective_scenario(2, args.seed)
        )
        noise = NoiseModel(distribution=distribution, targets=targets, seed=args.seed)
        report = noise_sweep(scenario, levels, noise, args.trials, methods)
    return report_csv(report)


def _cmd_simulate(args) -> int:
    if args.levels is not None and args.motions is not None:
        raise FlagError("--levels and --motions are mutually exclusive")
    if args.trials < 1:
        raise FlagError("--trials: need at least 1")
    distributions = (
        [Distribution(args.distribution)]
        if args.distribution != "both"
        else [Distribution.UNIFORM, Distribution.GAUSSIAN]
    )
    targets = (
        [NoiseTargets(args.targets)]
        if args.targets != "both"
        else [NoiseTargets.ROTATION, NoiseTargets.ROTATION_AND_TRANSLATION]
    )
    combos = [(d, t) for d in distributions for t in targets]
    for dist, targ in combos:
        csv_text = _simulate_one(args, dist, targ)
        if args.output is None:
            print(f"# distribution={dist.value} targets={targ.value}")
            print(csv_text, end="")
        elif len(combos) == 1:
            Path(args.output).write_text(csv_text, encoding="utf-8")
        else:
            base = Path(args.output)
            path = base.with_name(f"{base.stem}_{dist.value}_{targ.value}{base.suffix}")
            path.write_text(csv_text, encoding="utf-8")
            print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "calibrate": _cmd_calibrate,
    "residuals": _cmd_residuals,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except FlagError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FLAGS
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except ZeroDivisionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except CalibrationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
