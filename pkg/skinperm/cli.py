"""
Command-line entry point: `skinperm {forward,train,invert,stats,simulate}`.

Exit codes: 0 success, 1 runtime or data failure, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from rich.console import Console
from rich.logging import RichHandler

from skinperm._version import __version__
from skinperm.artifacts import PathLike, atomic_write_json, atomic_write_text, csv_text, sha256_file
from skinperm.em.materials import (
    REFERENCE_TISSUES,
    ComplexPermittivity,
    FrequencyGrid,
    default_stack,
    skin_model_default,
)
from skinperm.errors import InvalidArgumentError, SkinpermError
from skinperm.forward import (
    ForwardConfig,
    QuadratureConfig,
    SweepBox,
    generate_training_table,
    load_table,
    reflection_sweep,
    save_table,
)
from skinperm.handlers import LogResultHandler
from skinperm.inverse import evaluate_holdout, load_bank, save_bank, summarize_holdout, train_bank
from skinperm.measurement import MeasurementTrace, align_trace, load_dataset, read_touchstone, write_touchstone
from skinperm.stats import emit_report, invert_trace

logger = logging.getLogger("skinperm")

DEFAULT_GRID = "140e9:220e9:101"
INVERSION_COLUMNS = ("freq_hz", "eps_real", "eps_imag", "extrapolated")


class RunConfig(BaseModel):
    """
    Effective configuration of one CLI run, written next to every output.
    """

    model_config = ConfigDict(frozen=True)

    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    inputs: Dict[str, str] = Field(default_factory=dict)  # path -> sha256
    tool_version: str = __version__

    @classmethod
    def of(cls, command: str, parameters: Dict[str, Any], input_paths: Tuple[PathLike, ...] = ()) -> "RunConfig":
        return cls(
            command=command,
            parameters=parameters,
            inputs={str(p): sha256_file(p) for p in input_paths if Path(p).is_file()},
        )


def run_config_path(path: PathLike) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".run.json")


def _write_run_config(out: PathLike, run: RunConfig) -> None:
    atomic_write_json(run_config_path(out), run.model_dump(mode="json"))


def _range(text: str) -> Tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidArgumentError(f"range must look like lo:hi, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise InvalidArgumentError(f"bad range {text!r}: {e}") from e


def _forward_config(args: argparse.Namespace) -> ForwardConfig:
    cfg = ForwardConfig(
        stack=default_stack(termination=args.termination),
        quadrature=QuadratureConfig(krho_max_factor=args.krho_max, rel_tol=args.rel_tol),
    )
    return cfg


# forward


def prepare_forward(args: argparse.Namespace) -> Dict[str, Any]:
    grid = FrequencyGrid.parse(args.grid)
    box = SweepBox(eps_real=_range(args.eps_real_range), eps_imag=_range(args.eps_imag_range))
    if args.samples < 4:
        raise InvalidArgumentError(f"--samples must be at least 4, got {args.samples}")
    if args.sampling == "lattice" and round(np.sqrt(args.samples)) ** 2 != args.samples:
        raise InvalidArgumentError(f"--sampling lattice needs a square --samples, got {args.samples}")
    cfg = _forward_config(args)
    cfg.waveguide.check_band(grid.start, grid.stop)
    return {"grid": grid, "box": box, "cfg": cfg}


def cmd_forward(args: argparse.Namespace, plan: Dict[str, Any]) -> int:
    table = generate_training_table(
        plan["box"], args.samples, plan["grid"], args.seed, plan["cfg"], sampling=args.sampling, n_jobs=args.jobs
    )
    save_table(table, args.out)
    run = RunConfig.of("forward", {
        "grid": str(plan["grid"]),
        "samples": args.samples,
        "seed": args.seed,
        "sampling": args.sampling,
        "sweep_box": plan["box"].model_dump(mode="json"),
        "forward": plan["cfg"].model_dump(mode="json"),
        "jobs": args.jobs,
    })
    _write_run_config(args.out, run)
    logger.info("wrote %d x %d table to %s", table.gamma.shape[0], table.n_samples, args.out)
    return 0


# train


def prepare_train(args: argparse.Namespace) -> Dict[str, Any]:
    if not args.spread > 0:
        raise InvalidArgumentError(f"--spread must be positive, got {args.spread}")
    if args.holdout is not None and not 0 < args.holdout < 1:
        raise InvalidArgumentError(f"--holdout must lie in (0, 1), got {args.holdout}")
    return {}


def cmd_train(args: argparse.Namespace, plan: Dict[str, Any]) -> int:
    table = load_table(args.table)
    bank = train_bank(table, spread=args.spread, n_jobs=args.jobs)
    save_bank(bank, args.out)
    parameters: Dict[str, Any] = {"spread": args.spread, "holdout": args.holdout, "seed": args.seed, "jobs": args.jobs}

    if args.holdout is not None:
        reports = evaluate_holdout(table, args.holdout, args.seed, args.spread, n_jobs=args.jobs)
        summary = summarize_holdout(reports)
        parameters["holdout_result"] = {
            "mean": summary.mean,
            "worst": summary.worst,
            "worst_freq_hz": summary.worst_freq,
            "n_train": reports[0].n_train,
            "n_test": reports[0].n_test,
        }
        print(
            f"holdout n_train={reports[0].n_train} n_test={reports[0].n_test} "
            f"mean_err={summary.mean:.3e} max_err={summary.worst:.3e} at {summary.worst_freq:.6g} Hz"
        )
    _write_run_config(args.out, RunConfig.of("train", parameters, (args.table,)))
    logger.info("wrote bank of %d models to %s", len(bank.models), args.out)
    return 0


# invert


def prepare_invert(args: argparse.Namespace) -> Dict[str, Any]:
    return {}


def cmd_invert(args: argparse.Namespace, plan: Dict[str, Any]) -> int:
    bank = load_bank(args.bank)
    trace = align_trace(read_touchstone(args.s1p), bank.frequencies)
    handlers = None
    if args.flag_extrapolation:
        handlers = [LogResultHandler(logging.WARNING, logger, predicate=lambda r: bool(r["extrapolated"]))]
    result = invert_trace(bank, trace, handlers, n_jobs=args.jobs)
    if result.n_flagged and not args.flag_extrapolation:
        logger.warning("%d of %d points are extrapolated (use --flag-extrapolation for details)",
                       result.n_flagged, len(result.freq))

    rows = zip(result.freq.tolist(), result.eps_real.tolist(), result.eps_imag.tolist(),
               result.extrapolated.astype(int).tolist())
    atomic_write_text(args.out, csv_text(INVERSION_COLUMNS, rows))
    parameters = {"flag_extrapolation": args.flag_extrapolation, "jobs": args.jobs}
    run = RunConfig.of("invert", parameters, (args.bank, args.s1p))
    _write_run_config(args.out, run)
    logger.info("wrote %d inverted points to %s", len(result.freq), args.out)
    return 0


# stats


def prepare_stats(args: argparse.Namespace) -> Dict[str, Any]:
    return {}


def cmd_stats(args: argparse.Namespace, plan: Dict[str, Any]) -> int:
    index, failures = load_dataset(args.dataset, n_jobs=args.jobs)
    for failure in failures:
        print(f"error: {failure.path}: {failure.reason}", file=sys.stderr)
    if len(index) == 0:
        logger.error("no usable traces under %s", args.dataset)
        return 1
    bank = load_bank(args.bank)
    run = RunConfig.of("stats", {"dataset": str(args.dataset), "jobs": args.jobs}, (args.bank,))
    report = emit_report(index, bank, args.out, n_jobs=args.jobs, failures=failures, config=run.model_dump(mode="json"))
    logger.info("wrote %d report files to %s", len(report.files), args.out)
    return 0


# simulate


def prepare_simulate(args: argparse.Namespace) -> Dict[str, Any]:
    grid = FrequencyGrid.parse(args.grid)
    if args.eps is not None:
        try:
            value = complex(args.eps.replace(" ", ""))
        except ValueError as e:
            raise InvalidArgumentError(f"--eps must look like 4.7-2.4j, got {args.eps!r}") from e
        constant = ComplexPermittivity.from_complex(value)
        skin_model: Callable[[float], ComplexPermittivity] = lambda _f: constant  # noqa: E731
        label = str(constant)
    elif args.skin_model == "default":
        skin_model, label = skin_model_default, "default"
    else:
        tissue = REFERENCE_TISSUES[args.skin_model]
        skin_model, label = (lambda _f: tissue), args.skin_model
    cfg = _forward_config(args)
    cfg.waveguide.check_band(grid.start, grid.stop)
    return {"grid": grid, "skin_model": skin_model, "label": label, "cfg": cfg}


def cmd_simulate(args: argparse.Namespace, plan: Dict[str, Any]) -> int:
    grid: FrequencyGrid = plan["grid"]
    gamma = reflection_sweep(grid, plan["skin_model"], plan["cfg"], n_jobs=args.jobs)
    write_touchstone(MeasurementTrace(grid.frequencies(), gamma, source=str(args.out)), args.out)
    run = RunConfig.of("simulate", {
        "grid": str(grid),
        "skin": plan["label"],
        "forward": plan["cfg"].model_dump(mode="json"),
    })
    _write_run_config(args.out, run)
    logger.info("wrote simulated trace (%s) to %s", plan["label"], args.out)
    return 0


def _add_forward_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", default=DEFAULT_GRID, help="frequency grid start:stop:npoints in Hz")
    p.add_argument("--termination", choices=["pec", "half_space"], default="pec",
                   help="skin backing: 3 mm PEC-backed block or semi-infinite skin")
    p.add_argument("--krho-max", type=float, default=40.0, help="spectral truncation in units of k0")
    p.add_argument("--rel-tol", type=float, default=1e-7, help="adaptive quadrature tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skinperm", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    def jobs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--jobs", type=int, default=-1, help="joblib workers (-1: all cores)")

    p = sub.add_parser("forward", help="generate a training table with the forward model")
    _add_forward_model_args(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--sampling", choices=["random", "lattice"], default="random")
    p.add_argument("--eps-real-range", default="3:6", help="lo:hi of eps'")
    p.add_argument("--eps-imag-range", default="1:4", help="lo:hi of eps''")
    p.add_argument("--out", required=True, type=Path)
    jobs(p)
    p.set_defaults(prepare=prepare_forward, run=cmd_forward)

    p = sub.add_parser("train", help="train the per-frequency RBN bank from a table")
    p.add_argument("--table", required=True, type=Path)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--holdout", type=float, default=None, help="train fraction of a hold-out check, e.g. 0.9")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    jobs(p)
    p.set_defaults(prepare=prepare_train, run=cmd_train)

    p = sub.add_parser("invert", help="invert one .s1p measurement")
    p.add_argument("--bank", required=True, type=Path)
    p.add_argument("--s1p", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--flag-extrapolation", action="store_true", help="log every extrapolated point")
    jobs(p)
    p.set_defaults(prepare=prepare_invert, run=cmd_invert)

    p = sub.add_parser("stats", help="invert a dataset and write the cohort report")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--bank", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    jobs(p)
    p.set_defaults(prepare=prepare_stats, run=cmd_stats)

    p = sub.add_parser("simulate", help="write a synthetic .s1p from the forward model")
    _add_forward_model_args(p)
    skin = p.add_mutually_exclusive_group()
    skin.add_argument("--eps", default=None, help="constant skin permittivity, e.g. 4.7-2.4j")
    skin.add_argument("--skin-model", choices=["default"] + sorted(REFERENCE_TISSUES), default="default")
    p.add_argument("--out", required=True, type=Path)
    jobs(p)
    p.set_defaults(prepare=prepare_simulate, run=cmd_simulate)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        plan = args.prepare(args)
    except (ValidationError, InvalidArgumentError) as e:
        parser.error(str(e))
    try:
        return args.run(args, plan)
    except (SkinpermError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
