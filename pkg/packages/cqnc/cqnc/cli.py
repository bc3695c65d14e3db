# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import argparse
import logging
from typing import Any, Callable, Optional, Sequence

from com.env import configure_logging, init_otel
from com.helpers import parse_range
from pydantic import ValidationError

from cqnc.lib.analysis import (
    RootVariant,
    SeriesKind,
    SeriesSpec,
    constraint_roots,
    fig2_series,
    sweep_frequency,
    sweep_power,
)
from cqnc.lib.checks import all_passed, run_checks
from cqnc.lib.config import RunConfig, load_config
from cqnc.lib.errors import ConfigError, CqncError
from cqnc.lib.oracle import ModelMode
from cqnc.lib.output import Table, params_metadata, sweep_table, write_table
from cqnc.lib.params import MATCHED_FIELDS, PhysicalParams, apply_cqnc_matching
from cqnc.lib.response import ChiPrimeConvention
from cqnc.lib.spectra import s_cqnc_floor, s_standard_om

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

Command = Callable[[RunConfig, PhysicalParams], tuple[Table, int]]


def _run_metadata(command: str, run: RunConfig, params: PhysicalParams) -> dict[str, str]:
    metadata = {
        "command": command,
        "mode": run.mode.value,
        "convention": run.convention.value,
        "thermal": "true" if run.thermal else "false",
    }
    metadata.update(params_metadata(params))
    return metadata


def _newtons(params: PhysicalParams) -> Optional[PhysicalParams]:
    """Params to convert with, when a mass makes N²/Hz columns possible"""
    return params if params.mass is not None else None


def cmd_psd(run: RunConfig, params: PhysicalParams) -> tuple[Table, int]:
    """Frequency sweep of the standard, hybrid and floor spectra plus the linear-model budget"""
    grid = run.frequency_grid(params)
    matched = apply_cqnc_matching(params)
    specs = fig2_series(params, run.opa_gains)
    specs.append(
        SeriesSpec(
            label="oracle",
            kind=SeriesKind.ORACLE,
            params=matched,
            mode=run.mode,
            convention=run.convention,
        )
    )
    result = sweep_frequency(specs, grid, run.thermal)

    metadata = _run_metadata("psd", run, params)
    # the hybrid and oracle series run on the matched copy
    metadata.update(params_metadata(matched, "matched", MATCHED_FIELDS))
    metadata["grid"] = f"{run.grid_spacing} {run.grid_count} points, {run.grid_min}..{run.grid_max} Omega"
    for ratio in (0.5, 1.5):
        omega = ratio * params.Omega
        suppression = float(s_standard_om(params, omega).total) / float(s_cqnc_floor(params, omega))
        metadata[f"summary.standard_over_floor_at_{ratio}Omega"] = repr(suppression)

    table = sweep_table(
        result,
        "omega_over_Omega",
        grid.omega / params.Omega,
        components_of="oracle",
        metadata=metadata,
        newtons=_newtons(params),
    )
    return table, EXIT_OK


def cmd_power_sweep(run: RunConfig, params: PhysicalParams) -> tuple[Table, int]:
    omega = run.omega_probe * params.Omega
    result = sweep_power(params, omega, run.powers(), run.power_opa_gains, run.thermal)
    metadata = _run_metadata("power-sweep", run, params)
    metadata["omega_over_Omega"] = repr(run.omega_probe)
    table = sweep_table(
        result, "P_L_watts", result.axis, metadata=metadata, newtons=_newtons(params)
    )
    return table, EXIT_OK


def cmd_check(run: RunConfig, params: PhysicalParams) -> tuple[Table, int]:
    results = run_checks(params, run.frequency_grid(params), run.convention, run.mode)
    passed = all_passed(results)
    metadata = _run_metadata("check", run, params)
    metadata["result"] = "pass" if passed else "fail"
    table = Table(
        columns=["name", "passed", "measured", "tolerance", "informational", "note"],
        rows=[
            [r.name, r.passed, r.measured, r.tolerance, r.informational, r.note]
            for r in results
        ],
        metadata=metadata,
    )
    return table, EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_roots(run: RunConfig, params: PhysicalParams) -> tuple[Table, int]:
    coupling = None if run.root_coupling is None else run.root_coupling * params.gamma_m
    roots = constraint_roots(params, coupling)
    metadata = _run_metadata("roots", run, params)
    metadata["g"] = repr(roots.g)
    for variant, deviation in roots.disagreement.items():
        metadata[f"disagreement.{variant.value}"] = repr(deviation)
    metadata["flagged"] = ",".join(v.value for v in roots.flagged) or "none"

    rows: list[list[Any]] = []
    for variant in RootVariant:
        root_set = roots.sets[variant]
        for index, value in enumerate(root_set.values):
            real = bool(root_set.is_real[index])
            rows.append(
                [
                    variant.value,
                    index + 1,
                    value.real,
                    value.imag,
                    real,
                    float(root_set.residuals[index]) if real else None,
                ]
            )
    table = Table(
        columns=["variant", "index", "omega_re", "omega_im", "is_real", "residual"],
        rows=rows,
        metadata=metadata,
    )
    return table, EXIT_OK


COMMANDS: dict[str, Command] = {
    "psd": cmd_psd,
    "power-sweep": cmd_power_sweep,
    "check": cmd_check,
    "roots": cmd_roots,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="TOML parameter/run file")
    common.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--mode", choices=[m.value for m in ModelMode], default=None)
    common.add_argument(
        "--convention", choices=[c.value for c in ChiPrimeConvention], default=None
    )
    common.add_argument("--thermal", choices=["on", "off"], default=None)
    common.add_argument(
        "--grid", type=str, default=None, help="frequency grid in units of Omega, e.g. R2000/0.1/2"
    )
    common.add_argument(
        "--powers", type=str, default=None, help="power grid in W, e.g. R200/1e-12/1"
    )

    parser = argparse.ArgumentParser(
        prog="cqnc",
        description="Noise spectra of a hybrid electro-optomechanical force sensor",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("psd", parents=[common], help="frequency sweep of every spectrum")
    subparsers.add_parser("power-sweep", parents=[common], help="spectra versus laser power")
    subparsers.add_parser("check", parents=[common], help="consistency and acceptance checks")
    subparsers.add_parser("roots", parents=[common], help="frequencies where g^2|chi_m|^2 = 1")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "out": args.out,
        "format": args.format,
        "mode": args.mode,
        "convention": args.convention,
        "thermal": None if args.thermal is None else args.thermal == "on",
    }
    if args.grid:
        spec = parse_range(args.grid)
        overrides.update(grid_min=spec["start"], grid_max=spec["stop"])
        if spec["count"] is not None:
            overrides["grid_count"] = spec["count"]
    if args.powers:
        spec = parse_range(args.powers)
        overrides.update(power_min=spec["start"], power_max=spec["stop"])
        if spec["count"] is not None:
            overrides["power_count"] = spec["count"]
    return overrides


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    init_otel()

    command = COMMANDS[args.command]
    try:
        run, params = load_config(args.config, _overrides(args))
        table, status = command(run, params)
        write_table(table, run.format, run.out)
    except (ConfigError, CqncError, ValidationError, ValueError) as err:
        LOGGER.error(str(err))
        return EXIT_USAGE
    except Exception:
        LOGGER.exception("Unexpected failure")
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    raise SystemExit(main())
