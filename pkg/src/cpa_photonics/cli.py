"""Command-line interface for cpa-photonics."""

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from . import __version__
from .analysis.metrology import heralded_g2, window_maximum
from .circuits.clements import compile_cpa, cpa_phases, output_phase_relation
from .circuits.dilation import dilate, reduce_ancillas
from .circuits.lossybs import BeamSplitterKind, LossyBeamSplitter, solve, validate
from .config import RuntimeConfig
from .exceptions import CpaError, DataError, EmptyDataError, InvalidConfigError
from .experiment.config import SweepConfig
from .experiment.sweep import SweepRunner, analyze_sweep, run_sweep
from .hardware.calibration import (
    CalibrationStore,
    HeaterCalibration,
    current_table,
    fit_fringe,
    fit_iv,
)
from .quantum.fock import InputState
from .utils.decorators import measure_time
from .utils.serialization import (
    CSV_FLOAT_FORMAT,
    dumps,
    matrix_to_json,
    write_csv,
    write_json,
)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Provenance record written next to command outputs."""

    command: str
    config_path: Optional[str]
    outputs: List[str]
    config_hash: str
    seed: Optional[int]
    tool_version: str = __version__
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(
            timespec="seconds"
        )
    )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _angle(value: Optional[float], degrees: bool) -> Optional[float]:
    if value is None:
        return None
    return math.radians(value) if degrees else value


def _add_device_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--type",
        dest="kind",
        choices=[k.value for k in BeamSplitterKind],
        default=BeamSplitterKind.TYPE1.value,
        help="Device construction (default: type1)",
    )
    parser.add_argument(
        "--alpha", type=float, help="Absorption coefficient |A|^2 in [0, 0.5]"
    )
    parser.add_argument("--mirror", action="store_true", help="Mirror Type 1 root")
    parser.add_argument(
        "--t", nargs=2, type=float, metavar=("RE", "IM"), help="Custom t"
    )
    parser.add_argument(
        "--r", nargs=2, type=float, metavar=("RE", "IM"), help="Custom r"
    )


def _device_from_args(args: argparse.Namespace) -> LossyBeamSplitter:
    kind = BeamSplitterKind(args.kind)
    if kind is BeamSplitterKind.CUSTOM:
        if args.t is None or args.r is None:
            raise InvalidConfigError("custom devices need --t and --r")
        return solve(kind, t=complex(*args.t), r=complex(*args.r))
    if args.alpha is None:
        raise InvalidConfigError(f"--alpha is required for {kind.value} devices")
    return solve(kind, absorption=args.alpha, mirror=args.mirror)


def _emit(payload: Any, output: Optional[str]) -> None:
    if output:
        write_json(payload, output)
    else:
        sys.stdout.write(dumps(payload))


def _print_csv(table: pd.DataFrame) -> None:
    table.to_csv(
        sys.stdout, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
    )


def _read_table(path: str, columns: Sequence[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path)
    except FileNotFoundError as e:
        raise InvalidConfigError(f"{path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise EmptyDataError(f"{path}: no data") from e
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    if df.empty:
        raise EmptyDataError(f"{path}: no rows")
    return df


def cmd_solve_bs(args: argparse.Namespace) -> int:
    bs = _device_from_args(args)
    payload = bs.to_dict()
    payload["violations"] = [v.value for v in validate(bs)]
    _emit(payload, args.output)
    return 0


def cmd_dilate(args: argparse.Namespace) -> int:
    bs = _device_from_args(args)
    dilated = dilate(
        bs.matrix, threshold=args.threshold, min_ancillas=args.min_ancillas
    )
    if args.reduce:
        dilated = reduce_ancillas(dilated)
    _emit(
        {
            "matrix": matrix_to_json(dilated.matrix),
            "signal_modes": list(dilated.signal_modes),
            "ancilla_modes": list(dilated.ancilla_modes),
            "singular_values": list(dilated.singular_values),
        },
        args.output,
    )
    return 0


@measure_time
def cmd_compile(args: argparse.Namespace) -> int:
    if args.currents and not args.calibration:
        raise InvalidConfigError("--currents needs --calibration")
    bs = _device_from_args(args)
    program = compile_cpa(bs)
    offset = _angle(args.filter_offset, args.degrees)
    if offset:
        program = program.with_phase_offset(0, offset)
    theta2, phase_difference = cpa_phases(bs)
    payload = program.to_dict()
    payload["device"] = bs.to_dict()
    payload["closed_form"] = {"theta2": theta2, "phi3_minus_phi2": phase_difference}
    payload["output_phase_relation"] = output_phase_relation(program)
    _emit(payload, args.output)

    if args.calibration:
        table = current_table(program, CalibrationStore.load(args.calibration))
        if args.currents:
            write_csv(table, args.currents)
        else:
            _print_csv(table)
    return 0


@measure_time
def cmd_sweep(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    config = SweepConfig.from_json(args.config).with_overrides(
        name=args.name,
        shots=args.shots,
        seed=args.seed,
        absorptions=tuple(args.alphas) if args.alphas else None,
        phi_count=args.phi_count,
        filter_offset=_angle(args.filter_offset, args.degrees),
    )
    result = SweepRunner(
        config, workers=args.workers or runtime.workers, progress=runtime.progress
    ).run()

    out_dir = Path(args.output_dir)
    csv_path = write_csv(result.to_frame(), out_dir / f"{config.name}.csv")
    analysis_path = write_json(
        analyze_sweep(result), out_dir / f"{config.name}.analysis.json"
    )
    manifest = RunManifest(
        command="sweep",
        config_path=str(args.config),
        outputs=[str(csv_path), str(analysis_path)],
        config_hash=config.config_hash,
        seed=config.seed,
    )
    write_json(manifest.to_dict(), out_dir / f"{config.name}.manifest.json")
    return 0


@measure_time
def cmd_fisher(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    config = SweepConfig(
        name="fisher",
        bs_kind=args.kind,
        absorptions=tuple(args.alphas),
        phi_count=args.phi_count,
        input_state=args.state,
    )
    result = run_sweep(config, workers=args.workers or runtime.workers)
    rows = []
    for entry in analyze_sweep(result)["absorptions"]:
        fisher = entry["fisher"]
        row = {"alpha": entry["alpha"]}
        row.update({f"F_max_{k}": v for k, v in fisher["max_per_outcome"].items()})
        row["F_total_max"] = fisher["total_max"]
        row["F_total_argmax_phi"] = fisher["total_argmax_phi"]
        rows.append(row)
    table = pd.DataFrame(rows)
    if args.output:
        write_csv(table, args.output)
    else:
        _print_csv(table)
    return 0


def cmd_calibrate_fit(args: argparse.Namespace) -> int:
    iv = _read_table(args.iv, ["current_A", "voltage_V"])
    fringe = _read_table(args.fringe, ["power_mW", "optical_power"])
    iv_fit = fit_iv(iv["current_A"].to_numpy(), iv["voltage_V"].to_numpy())
    fringe_fit = fit_fringe(
        fringe["power_mW"].to_numpy(), fringe["optical_power"].to_numpy()
    )
    cal = HeaterCalibration.from_fits(iv_fit, fringe_fit)

    store_path = Path(args.store)
    store = (
        CalibrationStore.load(store_path)
        if store_path.exists()
        else CalibrationStore()
    )
    store.set(args.heater_id, cal)
    store.save(store_path)
    payload = cal.to_dict()
    payload.update(
        {
            "heater_id": args.heater_id,
            "period_mw": cal.period_mw,
            "visibility": cal.visibility,
            "iv_residual_rms": iv_fit.residual_rms,
            "fringe_residual_rms": fringe_fit.residual_rms,
        }
    )
    _emit(payload, None)
    return 0


def cmd_g2(args: argparse.Namespace) -> int:
    if args.rates:
        df = _read_table(args.rates, ["delay", "r_abh", "r_ah", "r_bh", "r_h"])
        g2 = heralded_g2(df["r_abh"], df["r_ah"], df["r_bh"], df["r_h"])
        payload: Dict[str, Any] = {"delay": df["delay"].tolist(), "g2": list(g2)}
        if args.window is not None:
            delay, peak = window_maximum(df["delay"], g2, args.window)
            payload["window_maximum"] = {"delay": delay, "g2": peak}
    else:
        values = (args.r_abh, args.r_ah, args.r_bh, args.r_h)
        if any(v is None for v in values):
            raise InvalidConfigError(
                "give --rates or all of --r-abh --r-ah --r-bh --r-h"
            )
        payload = {"g2": heralded_g2(*values)}
    _emit(payload, args.output)
    return 0


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Returns:
        Parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog="cpa-photonics",
        description="Compile and simulate programmable coherent perfect absorption",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level", type=str, help="Logging level (default: CPA_LOG_LEVEL)"
    )
    parser.add_argument(
        "--env-file", type=str, default=".env", help="Path to .env file (default: .env)"
    )
    parser.add_argument(
        "--degrees", action="store_true", help="Read angle arguments in degrees"
    )
    parser.add_argument("--no-progress", action="store_true", help="Hide progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-bs", help="Solve a lossy beam splitter")
    _add_device_args(p)
    p.add_argument("--output", type=str, help="Write JSON here instead of stdout")

    p = sub.add_parser("dilate", help="Dilate a lossy beam splitter to a unitary")
    _add_device_args(p)
    p.add_argument(
        "--min-ancillas", type=int, default=1, help="Minimum ancillas (default: 1)"
    )
    p.add_argument("--threshold", type=float, default=1e-9, help="Lossy threshold")
    p.add_argument("--reduce", action="store_true", help="Drop decoupled ancillas")
    p.add_argument("--output", type=str, help="Write JSON here instead of stdout")

    p = sub.add_parser("compile", help="Compile a CPA mesh program")
    _add_device_args(p)
    p.add_argument("--filter-offset", type=float, help="Extra phase on MZI1")
    p.add_argument("--calibration", type=str, help="Heater calibration store (JSON)")
    p.add_argument("--currents", type=str, help="Write the heater current table here")
    p.add_argument("--output", type=str, help="Write JSON here instead of stdout")

    p = sub.add_parser("sweep", help="Run an absorption/phase sweep")
    p.add_argument("config", type=str, help="Sweep config JSON")
    p.add_argument("--name", type=str, help="Output file prefix")
    p.add_argument("--shots", type=int, help="Heralded trials per grid point")
    p.add_argument("--seed", type=int, help="Master seed")
    p.add_argument("--alphas", type=float, nargs="+", help="Absorption grid")
    p.add_argument("--phi-count", type=int, help="Phase grid points")
    p.add_argument("--filter-offset", type=float, help="Extra phase on MZI1")
    p.add_argument(
        "--workers", type=int, help="Concurrent devices (default: CPA_WORKERS)"
    )
    p.add_argument("--output-dir", type=str, default=".", help="Output directory")

    p = sub.add_parser("fisher", help="Maximum Fisher information per outcome")
    p.add_argument("--type", dest="kind", choices=["type1", "type2"], default="type1")
    p.add_argument(
        "--state", choices=[s.value for s in InputState], default=InputState.NOON.value
    )
    p.add_argument(
        "--alphas", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    )
    p.add_argument("--phi-count", type=int, default=201)
    p.add_argument(
        "--workers", type=int, help="Concurrent devices (default: CPA_WORKERS)"
    )
    p.add_argument("--output", type=str, help="Write CSV here instead of stdout")

    p = sub.add_parser("calibrate-fit", help="Fit a heater calibration")
    p.add_argument("--heater-id", type=str, required=True, help="e.g. mzi1_theta")
    p.add_argument(
        "--iv", type=str, required=True, help="CSV with current_A, voltage_V"
    )
    p.add_argument(
        "--fringe",
        type=str,
        required=True,
        help="CSV with power_mW, optical_power",
    )
    p.add_argument(
        "--store", type=str, required=True, help="Calibration store to update"
    )

    p = sub.add_parser("g2", help="Heralded second-order correlation")
    p.add_argument("--rates", type=str, help="CSV with delay, r_abh, r_ah, r_bh, r_h")
    p.add_argument("--window", type=float, help="Coincidence window for the maximum")
    p.add_argument("--r-abh", type=float, help="Threefold rate R_ABH")
    p.add_argument("--r-ah", type=float, help="Twofold rate R_AH")
    p.add_argument("--r-bh", type=float, help="Twofold rate R_BH")
    p.add_argument("--r-h", type=float, help="Herald rate R_H")
    p.add_argument("--output", type=str, help="Write JSON here instead of stdout")

    return parser.parse_args(argv)


def _report(error: Exception, exit_code: int) -> int:
    sys.stderr.write(
        json.dumps(
            {
                "error": type(error).__name__,
                "message": str(error),
                "exit_code": exit_code,
            },
            sort_keys=True,
        )
        + "\n"
    )
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command.

    Returns:
        Exit code: 0 success, 2 invalid input, 3 numeric failure
    """
    args = parse_args(argv)
    try:
        runtime = RuntimeConfig.from_env(args.env_file)
    except ValueError as e:
        return _report(e, 2)
    if args.no_progress:
        runtime.progress = False

    level = (args.log_level or runtime.log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)

    handlers = {
        "solve-bs": lambda: cmd_solve_bs(args),
        "dilate": lambda: cmd_dilate(args),
        "compile": lambda: cmd_compile(args),
        "sweep": lambda: cmd_sweep(args, runtime),
        "fisher": lambda: cmd_fisher(args, runtime),
        "calibrate-fit": lambda: cmd_calibrate_fit(args),
        "g2": lambda: cmd_g2(args),
    }
    try:
        return handlers[args.command]()
    except CpaError as e:
        logger.error(f"{args.command} failed: {e}")
        return _report(e, e.exit_code)


def cli():
    """CLI entry point."""
    sys.exit(main())


if __name__ == "__main__":
    cli()
