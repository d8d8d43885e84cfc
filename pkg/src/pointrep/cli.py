"""Command line front end.

* simulate: draw one sample and write it with its metadata sidecar
* estimate: threshold a sample (or genomic position files) and rebuild h̃
* calibrate: Monte Carlo risk surface over a (γ, δ) grid
* validate: unbiasedness and variance of chosen coefficients
* oracle: Monte Carlo oracle risk of a simulation setup
* experiment: the named reconstruction scenarios
* scan-motif: motif positions over both strands of a FASTA file

Every command writes its full result to files and prints a short summary
on stdout. Logging carries progress and diagnostics only.

"""

from __future__ import annotations

import argparse
import gzip
import logging
import math
import os
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from pointrep import __version__
from pointrep.artifacts import (
    atomic_write,
    csv_text,
    read_sample,
    write_coefficients,
    write_csv,
    write_positions,
    write_sample,
    write_step_function,
    write_surface,
    write_validation,
)
from pointrep.defaults import (
    DEFAULT_A,
    DEFAULT_D_CONST,
    DEFAULT_DELTA,
    DEFAULT_GAMMA,
    DEFAULT_J0,
    DEFAULT_NU,
    DEFAULT_REPS,
    DEFAULT_SCALE,
    DEFAULT_SPACER,
    MIN_VALIDATION_REPS,
    THREADS_ENV,
)
from pointrep.enums import ParentMode, Signal, ThresholdMode, VarianceMode
from pointrep.estimator import EstimatorConfig, ProcessSample, estimate
from pointrep.haar import HaarIndex, auto_j0, build_grid
from pointrep.ingest import read_fasta, read_positions, rescale, scan_fasta, to_sample
from pointrep.risk import (
    SCENARIOS,
    l2_risk,
    mc_validate,
    oracle_risk,
    reconstruction_runs,
    risk_surface,
)
from pointrep.simulate import SignalSpec, SimConfig, builtin_signal, simulate
from pointrep.stepfn import StepFunction

__all__ = ["main", "build_parser", "emit_reconstruction_plotdata", "parse_grid"]

logger = logging.getLogger(__name__)

PLOT_HEADER = ("x", "estimate")


# Argument types -----------------------------------------------------


def positive_int(value: str) -> int:
    try:
        ival = int(value)
    except ValueError:
        ival = 0
    if ival < 1:
        raise argparse.ArgumentTypeError(f'"{value}" is not a positive integer')
    return ival


def nonnegative_float(value: str) -> float:
    try:
        fval = float(value)
    except ValueError:
        fval = -1.0
    if not fval >= 0:
        raise argparse.ArgumentTypeError(f'"{value}" is not a nonnegative number')
    return fval


def level(value: str) -> int | str:
    """A resolution level, or ``auto`` to pick it from the parent count."""
    if value == "auto":
        return value
    return positive_int(value)


def haar_index(value: str) -> HaarIndex:
    try:
        return HaarIndex.parse(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(
            f'"{value}" is not an index j,k with j >= -1'
        ) from None


def parse_grid(text: str) -> tuple[float, ...]:
    """Read ``start:stop:step`` (stop included) or a comma separated list.

    Grid values are rounded to 10 decimals so that ``0.02:1:0.02`` holds
    exactly 0.18 rather than an accumulated neighbour of it.

    """
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not step > 0 or stop < start:
            raise ValueError(f"empty or unordered grid {text!r}")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    values = tuple(float(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("grid must not be empty")
    return values


def grid_arg(value: str) -> tuple[float, ...]:
    try:
        return parse_grid(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


# Shared argument groups ---------------------------------------------


def _add_simulation_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("simulation")
    group.add_argument("--signal", type=Signal, choices=list(Signal), default="signal1")
    group.add_argument("--nu", type=nonnegative_float, default=DEFAULT_NU)
    group.add_argument("--T", type=float, required=True, help="parent horizon")
    parents = group.add_mutually_exclusive_group(required=True)
    parents.add_argument("--mu", type=float, help="Poisson parent intensity")
    parents.add_argument("--n", type=int, help="fixed number of uniform parents")
    group.add_argument(
        "--orphan-intensity",
        type=nonnegative_float,
        default=0.0,
        help="rate of children without a parent on [0, T + 1]",
    )
    group.add_argument("--seed", type=int, default=0)


def _add_estimator_args(
    parser: argparse.ArgumentParser, allow_auto: bool = False
) -> None:
    group = parser.add_argument_group("estimator")
    group.add_argument(
        "--j0",
        type=level if allow_auto else positive_int,
        default=DEFAULT_J0,
        help="maximal resolution level" + (" or 'auto'" if allow_auto else ""),
    )
    group.add_argument("--A", type=positive_int, default=DEFAULT_A)
    group.add_argument(
        "--mothers-through-j0",
        action="store_true",
        help="include the mother level j0 (default stops at j0 - 1)",
    )
    group.add_argument("--gamma", type=nonnegative_float, default=DEFAULT_GAMMA)
    group.add_argument("--delta", type=nonnegative_float, default=DEFAULT_DELTA)
    group.add_argument("--d-const", type=nonnegative_float, default=DEFAULT_D_CONST)
    group.add_argument(
        "--threshold-mode",
        type=ThresholdMode,
        choices=list(ThresholdMode),
        default=ThresholdMode.practical,
    )
    group.add_argument("--variance-mode", type=VarianceMode, choices=list(VarianceMode))


def _add_runtime_args(parser: argparse.ArgumentParser, reps: int | None) -> None:
    group = parser.add_argument_group("runtime")
    if reps is not None:
        group.add_argument("--reps", type=positive_int, default=reps)
    group.add_argument(
        "--threads",
        type=positive_int,
        help=f"worker threads (default: ${THREADS_ENV} or 1)",
    )


def _sim_config(args: argparse.Namespace) -> SimConfig:
    if args.n is not None:
        return SimConfig(
            T=args.T,
            signal=SignalSpec(args.signal, args.nu),
            parent_mode=ParentMode.fixed,
            n=args.n,
            orphan_intensity=args.orphan_intensity,
            seed=args.seed,
        )
    return SimConfig(
        T=args.T,
        signal=SignalSpec(args.signal, args.nu),
        mu=args.mu,
        orphan_intensity=args.orphan_intensity,
        seed=args.seed,
    )


def _estimator_config(args: argparse.Namespace, j0: int) -> EstimatorConfig:
    return EstimatorConfig(
        j0=j0,
        A=args.A,
        mother_levels_through=j0 if args.mothers_through_j0 else None,
        gamma=args.gamma,
        threshold_mode=args.threshold_mode,
        delta=args.delta,
        d_const=args.d_const,
        variance_mode=args.variance_mode,
    )


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV, "").strip()
    if not env:
        return 1
    try:
        return positive_int(env)
    except argparse.ArgumentTypeError:
        raise ValueError(
            f"{THREADS_ENV} must be a positive integer, got {env!r}"
        ) from None


# Plot data ----------------------------------------------------------


def emit_reconstruction_plotdata(
    h_tilde: StepFunction, h_true: StepFunction | None = None
) -> str:
    """CSV text tracing h̃ (and the truth) through every breakpoint.

    Each merged breakpoint x gives two rows: the left limit at x, then
    the value from x on. Connecting the rows in order draws the step
    functions exactly.

    """
    functions = [h_tilde] if h_true is None else [h_tilde, h_true]
    header = PLOT_HEADER if h_true is None else (*PLOT_HEADER, "truth")
    xs = np.unique(np.concatenate([f.breakpoints for f in functions]))
    if xs.size == 0:
        xs = np.zeros(1)

    rows = []
    before = [0.0] * len(functions)
    for x in xs:
        after = [float(f(x)) for f in functions]
        rows.append((float(x), *before))
        rows.append((float(x), *after))
        before = after
    return csv_text(header, rows)


def _write_reconstruction(
    outdir: Path, h_tilde: StepFunction, h_true: StepFunction | None, stem: str
) -> None:
    write_step_function(outdir / f"{stem}.csv", h_tilde)
    atomic_write(
        outdir / f"{stem}-plotdata.csv", emit_reconstruction_plotdata(h_tilde, h_true)
    )


# Subcommands --------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    sim = _sim_config(args)
    sample = simulate(sim, args.stream)
    metadata = {**sim.metadata(), "stream": args.stream}
    write_sample(args.output, sample, metadata)
    logger.info(
        "simulated %d parents and %d children into %s",
        sample.n,
        sample.n_children,
        args.output,
    )
    return 0


def _read_text(path: Path) -> str:
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            return fh.read()
    return path.read_text(encoding="utf-8")


def _load_sample(args: argparse.Namespace) -> ProcessSample:
    if args.sample is not None:
        return read_sample(args.sample, args.T)
    if args.T is None:
        raise ValueError("--parents/--children need --T")
    parents = read_positions(_read_text(args.parents), str(args.parents))
    children = read_positions(_read_text(args.children), str(args.children))
    if args.scale != 1:
        parents, children = rescale(parents, args.scale), rescale(children, args.scale)
    return to_sample(parents, children, args.T)


def cmd_estimate(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    h_true = builtin_signal(args.truth, args.nu) if args.truth else None
    outdir: Path = args.output
    outdir.mkdir(parents=True, exist_ok=True)

    if sample.n == 0:
        # No parents: h̃ is the zero function
        logger.warning("sample has no parents; writing the zero estimate")
        _write_reconstruction(outdir, StepFunction.zero(), h_true, "h_tilde")
        print("kept 0 coefficients (no parents)")
        if h_true is not None:
            print(f"l2_risk={l2_risk(StepFunction.zero(), h_true)!r}")
        return 0

    j0 = auto_j0(sample.n) if args.j0 == "auto" else args.j0
    config = _estimator_config(args, j0)
    table, h_tilde = estimate(sample, config, threads=_threads(args))

    write_coefficients(outdir / "coefficients.csv", table)
    _write_reconstruction(outdir, h_tilde, h_true, "h_tilde")
    kept = int(np.count_nonzero(table.kept))
    print(f"kept {kept} of {len(table.grid)} coefficients (j0={j0})")
    if h_true is not None:
        print(f"l2_risk={l2_risk(h_tilde, h_true)!r}")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    sim = _sim_config(args)
    est = _estimator_config(args, args.j0)
    surface = risk_surface(
        sim, est, args.gamma_grid, args.delta_grid, args.reps, _threads(args)
    )
    write_surface(args.output, surface)
    gamma, second, risk, err = min(surface.cells(), key=lambda cell: cell[2])
    theoretical = est.threshold_mode is ThresholdMode.theoretical
    axis = "d_const" if theoretical else "delta"
    print(f"best gamma={gamma!r} {axis}={second!r} mean_risk={risk!r} stderr={err!r}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    rows = mc_validate(_sim_config(args), args.index, args.reps, _threads(args))
    write_validation(args.output, rows)
    for row in rows:
        print(
            f"{row.index} mean={row.mean!r} true_beta={row.true_beta!r} "
            f"z_score={row.z_score!r}"
        )
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    grid = build_grid(args.j0, args.A, args.j0 if args.mothers_through_j0 else None)
    risk = oracle_risk(_sim_config(args), grid, args.reps, _threads(args))
    print(f"oracle_risk={risk!r}")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    names = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    threads = _threads(args)
    for name in names:
        scenario = SCENARIOS[name]
        outdir: Path = args.output / name
        outdir.mkdir(parents=True, exist_ok=True)
        h_true = scenario.sim.signal.function()
        runs = reconstruction_runs(scenario.sim, scenario.est, args.reps, threads)
        for r, (h_tilde, _) in enumerate(runs):
            _write_reconstruction(outdir, h_tilde, h_true, f"rep{r:03d}")
        write_csv(
            outdir / "risks.csv",
            ("replication", "l2_risk"),
            ((r, risk) for r, (_, risk) in enumerate(runs)),
        )
        logger.info("%s: %d replications (%s)", name, len(runs), scenario.description)
        mean = math.fsum(risk for _, risk in runs) / len(runs)
        print(f"{name} mean_risk={mean!r}")
    return 0


def cmd_scan_motif(args: argparse.Namespace) -> int:
    sequence = read_fasta(_read_text(args.fasta))
    occ = scan_fasta(sequence, args.motif, args.spacer)
    write_positions(args.output, occ)
    virtual = 2 * len(sequence) + args.spacer
    print(f"{len(occ)} hits over {virtual} virtual bases")
    return 0


# Parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointrep",
        description="Wavelet thresholding estimates of parent/child reproduction "
        "functions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="simulate one sample")
    _add_simulation_args(p)
    p.add_argument("--stream", type=int, default=0, help="replication stream")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate h from a sample")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--sample", type=Path, help="sample CSV")
    source.add_argument("--parents", type=Path, help="parent position file")
    p.add_argument("--children", type=Path, help="child position file")
    p.add_argument(
        "--scale",
        type=float,
        default=DEFAULT_SCALE,
        help="bases per unit for position files",
    )
    p.add_argument("--T", type=float, help="parent horizon (overrides the sidecar)")
    p.add_argument("--truth", type=Signal, choices=list(Signal))
    p.add_argument("--nu", type=nonnegative_float, default=DEFAULT_NU)
    _add_estimator_args(p, allow_auto=True)
    _add_runtime_args(p, reps=None)
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("calibrate", help="risk surface over a (gamma, delta) grid")
    _add_simulation_args(p)
    _add_estimator_args(p)
    p.add_argument("--gamma-grid", type=grid_arg, default=parse_grid("0.02:1:0.02"))
    p.add_argument("--delta-grid", type=grid_arg, default=parse_grid("0:4:0.2"))
    _add_runtime_args(p, reps=DEFAULT_REPS)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("validate", help="Monte Carlo check of coefficient estimates")
    _add_simulation_args(p)
    p.add_argument(
        "--index",
        type=haar_index,
        action="append",
        required=True,
        metavar="J,K",
        help="repeatable; j = -1 selects a father",
    )
    _add_runtime_args(p, reps=MIN_VALIDATION_REPS)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("oracle", help="Monte Carlo oracle risk")
    _add_simulation_args(p)
    p.add_argument("--j0", type=positive_int, default=DEFAULT_J0)
    p.add_argument("--A", type=positive_int, default=DEFAULT_A)
    p.add_argument("--mothers-through-j0", action="store_true")
    _add_runtime_args(p, reps=DEFAULT_REPS)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("experiment", help="run named reconstruction scenarios")
    p.add_argument("scenario", choices=[*SCENARIOS, "all"])
    _add_runtime_args(p, reps=DEFAULT_REPS)
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("scan-motif", help="motif positions on both strands")
    p.add_argument("--fasta", type=Path, required=True, help="FASTA file, .gz allowed")
    p.add_argument("--motif", required=True)
    p.add_argument("--spacer", type=int, default=DEFAULT_SPACER)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(handler=cmd_scan_motif)

    return parser


def _configure_logging(verbosity: int) -> None:
    levels = (logging.WARNING, logging.INFO, logging.DEBUG)
    logging.basicConfig(
        level=levels[min(verbosity, len(levels) - 1)],
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "estimate" and args.parents is not None and not args.children:
        parser.error("--parents needs --children")
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (ValueError, OSError) as err:
        print(f"pointrep: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
