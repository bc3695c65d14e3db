# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

"""
Run configuration: a flat TOML table holding PhysicalParams fields, run keys,
`preset` and `unit`. Command-line flags override file values.
"""

import logging
import math
from pathlib import Path
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Literal, Optional

from com.helpers import get_fields_from_pydantic_model
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from cqnc.lib.errors import ConfigError, CqncError
from cqnc.lib.oracle import ModelMode
from cqnc.lib.params import (
    FREQUENCY_FIELDS,
    MATCHED_FIELDS,
    PhysicalParams,
    apply_cqnc_matching,
    make_fig2_params,
)
from cqnc.lib.response import ChiPrimeConvention, FrequencyGrid

LOGGER = logging.getLogger(__name__)

Preset = Literal["fig2", "cqnc-matched", "none"]
Unit = Literal["rad_s", "Hz"]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: ModelMode = Field(default=ModelMode.CONSISTENT, description="linear model wiring")
    convention: ChiPrimeConvention = Field(
        default=ChiPrimeConvention.PRODUCT, description="sign convention of chi_d'"
    )
    thermal: bool = Field(default=False, description="include the thermal force")
    grid_min: float = Field(default=0.1, description="lowest frequency, units of Omega")
    grid_max: float = Field(default=2.0, description="highest frequency, units of Omega")
    grid_count: int = Field(default=2000, description="number of frequencies")
    grid_spacing: Literal["linear", "log"] = Field(default="log", description="grid spacing")
    power_min: float = Field(default=1e-12, description="lowest laser power, W")
    power_max: float = Field(default=1.0, description="highest laser power, W")
    power_count: int = Field(default=200, description="number of powers, log spaced")
    opa_gains: list[float] = Field(
        default=[0.0, 0.1, 0.3], description="OPA gains of the frequency sweep, units of kappa"
    )
    power_opa_gains: list[float] = Field(
        default=[0.1, 0.3], description="OPA gains of the power sweep, units of kappa"
    )
    omega_probe: float = Field(
        default=1.0, description="power-sweep frequency, units of Omega"
    )
    root_coupling: Optional[float] = Field(
        default=None, description="coupling for the constraint roots, units of gamma_m; g when unset"
    )
    format: Literal["csv", "json"] = Field(default="csv", description="output format")
    out: Optional[str] = Field(default=None, description="output path, stdout when unset")

    @model_validator(mode="after")
    def check_grids(self):
        if self.grid_count < 2:
            raise ValueError(f"grid_count must be at least 2, got {self.grid_count}")
        if not self.grid_min < self.grid_max:
            raise ValueError(f"grid_min {self.grid_min} must be below grid_max {self.grid_max}")
        if self.grid_spacing == "log" and self.grid_min <= 0:
            raise ValueError("A log-spaced grid needs grid_min > 0")
        if self.power_count < 2:
            raise ValueError(f"power_count must be at least 2, got {self.power_count}")
        if not 0 < self.power_min < self.power_max:
            raise ValueError("Power range must satisfy 0 < power_min < power_max")
        if self.omega_probe <= 0:
            raise ValueError("omega_probe must be positive")
        if self.root_coupling is not None and self.root_coupling <= 0:
            raise ValueError("root_coupling must be positive")
        return self

    def frequency_grid(self, params: PhysicalParams) -> FrequencyGrid:
        return FrequencyGrid.spaced(
            params, self.grid_min, self.grid_max, self.grid_count, self.grid_spacing
        )

    def powers(self) -> np.ndarray:
        return np.geomspace(self.power_min, self.power_max, self.power_count)


def _read(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as err:
        raise ConfigError(f"Cannot read config {path}: {err.strerror or err}") from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"Config {path} is not valid TOML: {err}") from err


def build_params(
    values: dict[str, Any], preset: Preset = "fig2", unit: Unit = "rad_s"
) -> PhysicalParams:
    if unit not in ("rad_s", "Hz"):
        raise ConfigError(f"unit must be 'rad_s' or 'Hz', got {unit!r}")
    overrides = dict(values)
    if unit == "Hz":
        for name in FREQUENCY_FIELDS:
            if overrides.get(name) is not None:
                overrides[name] = overrides[name] * 2 * math.pi

    try:
        if preset == "none":
            params = PhysicalParams.model_validate(overrides)
        elif preset in ("fig2", "cqnc-matched"):
            base = make_fig2_params()
            params = base.replace(**overrides) if overrides else base
        else:
            raise ConfigError(f"Unknown preset {preset!r}")

        if preset == "cqnc-matched":
            params = apply_cqnc_matching(params)
            # explicit keys win over the matching they contradict
            kept = {
                name: overrides[name]
                for name in MATCHED_FIELDS
                if name in overrides and overrides[name] != getattr(params, name)
            }
            if kept:
                LOGGER.warning(
                    f"Keeping {', '.join(f'{k}={v}' for k, v in kept.items())} over the "
                    "cqnc-matched preset; the configuration is not matched"
                )
                params = params.replace(**kept)
    except ValidationError as err:
        raise ConfigError(f"Invalid parameters: {err}") from err
    except ConfigError:
        raise
    except CqncError as err:
        raise ConfigError(str(err)) from err
    return params


def load_config(
    path: Optional[str | Path], overrides: Optional[dict[str, Any]] = None
) -> tuple[RunConfig, PhysicalParams]:
    """Read the file (if any), split params from run keys, and apply flag overrides"""
    raw = _read(path) if path is not None else {}
    preset = raw.pop("preset", "fig2")
    unit = raw.pop("unit", "rad_s")

    param_fields = get_fields_from_pydantic_model(PhysicalParams)
    run_fields = get_fields_from_pydantic_model(RunConfig)
    unknown = sorted(key for key in raw if key not in param_fields and key not in run_fields)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

    run_values = {key: value for key, value in raw.items() if key in run_fields}
    run_values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        run = RunConfig.model_validate(run_values)
    except ValidationError as err:
        raise ConfigError(f"Invalid run configuration: {err}") from err

    params = build_params(
        {key: value for key, value in raw.items() if key in param_fields}, preset, unit
    )
    LOGGER.debug(f"Loaded config with preset={preset} unit={unit}")
    return run, params
