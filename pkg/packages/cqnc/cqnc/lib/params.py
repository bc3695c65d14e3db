# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import logging
import math
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cqnc.lib.constants import (
    CONSISTENCY_RTOL,
    HBAR,
    KB,
    MATCHING_SEPARATION,
    TWO_PI,
)
from cqnc.lib.errors import ParameterError

LOGGER = logging.getLogger(__name__)

# Every field that holds an angular frequency; these are scaled by 2π when a
# config file declares `unit = "Hz"`
FREQUENCY_FIELDS = (
    "Omega",
    "gamma_m",
    "kappa",
    "Gamma",
    "Delta_q",
    "Delta_c",
    "g0",
    "g",
    "G_opa",
    "G_em",
    "G_qubit",
    "Omega_R",
    "omega_L",
    "E_L",
)

POSITIVE_FIELDS = ("Omega", "gamma_m", "kappa", "Gamma", "g0", "omega_L")

# Set by apply_cqnc_matching
MATCHED_FIELDS = ("Delta_q", "Gamma", "G_em")


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=CONSISTENCY_RTOL, abs_tol=0.0)


def _coupling(g0: float, power: float, omega_L: float, kappa: float) -> float:
    return g0 * math.sqrt(power / (2 * HBAR * omega_L * kappa))


def _power(g0: float, g: float, omega_L: float, kappa: float) -> float:
    return 2 * HBAR * omega_L * kappa * (g / g0) ** 2


class PhysicalParams(BaseModel):
    """
    All rates, couplings and detunings of the hybrid system. Every frequency is
    angular (rad/s). Derived values are filled in during validation:

    - g from P_L (or P_L from g); if both are given they must agree
    - E_L from P_L
    - n_bar from T when T is set
    - G_em from G_qubit and d_bar when G_qubit is set
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    Omega: float = Field(description="mechanical angular frequency, rad/s")
    gamma_m: float = Field(description="mechanical damping rate, rad/s")
    kappa: float = Field(description="cavity decay rate, rad/s")
    Gamma: float = Field(description="qubit dephasing rate, rad/s")
    Delta_q: float = Field(default=0.0, description="qubit detuning, rad/s")
    Delta_c: float = Field(
        default=0.0, description="cavity detuning, rad/s; resonant drive only"
    )
    g0: float = Field(description="single-photon optomechanical coupling, rad/s")
    g: float = Field(default=0.0, description="linearized optomechanical coupling, rad/s")
    G_opa: float = Field(default=0.0, description="parametric amplifier gain, rad/s")
    theta_opa: float = Field(
        default=0.0, description="parametric pump phase, rad; fixed at zero"
    )
    G_em: float = Field(
        default=0.0, description="effective electromechanical coupling, rad/s"
    )
    G_qubit: Optional[float] = Field(
        default=None, description="bare qubit-phonon coupling, rad/s"
    )
    d_bar: float = Field(default=1.0, description="qubit steady-state mean")
    x_bar: float = Field(default=0.0, description="mechanical steady-state mean")
    Omega_R: float = Field(default=0.0, description="qubit drive amplitude, rad/s")
    omega_L: float = Field(description="laser angular frequency, rad/s")
    P_L: float = Field(default=0.0, description="laser power, W")
    E_L: float = Field(default=0.0, description="laser drive amplitude, rad/s")
    T: Optional[float] = Field(default=None, description="bath temperature, K")
    n_bar: float = Field(default=0.0, description="thermal occupation")
    mass: Optional[float] = Field(default=None, description="oscillator mass, kg")

    @model_validator(mode="before")
    @classmethod
    def derive_dependent_values(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)

        for name in ("g0", "omega_L", "kappa", "Omega"):
            value = data.get(name)
            if not isinstance(value, (int, float)) or value <= 0:
                # reported by the field/after validators
                return data

        g0, omega_L, kappa = data["g0"], data["omega_L"], data["kappa"]
        has_power = data.get("P_L") is not None
        has_coupling = data.get("g") is not None
        if has_power and data["P_L"] < 0:
            raise ParameterError(f"Laser power must be non-negative, got {data['P_L']}")
        if has_coupling and data["g"] < 0:
            raise ParameterError(f"Coupling g must be non-negative, got {data['g']}")

        if has_power and not has_coupling:
            data["g"] = _coupling(g0, data["P_L"], omega_L, kappa)
        elif has_coupling and not has_power:
            data["P_L"] = _power(g0, data["g"], omega_L, kappa)
        elif has_power and has_coupling:
            expected = _coupling(g0, data["P_L"], omega_L, kappa)
            if not _close(expected, data["g"]):
                raise ParameterError(
                    f"g={data['g']} is inconsistent with P_L={data['P_L']} (expected g={expected})"
                )
        else:
            data["P_L"] = 0.0
            data["g"] = 0.0

        drive = math.sqrt(data["P_L"] * kappa / (HBAR * omega_L))
        if data.get("E_L") is not None and not _close(data["E_L"], drive):
            raise ParameterError(f"E_L={data['E_L']} is inconsistent with P_L")
        data["E_L"] = drive

        temperature = data.get("T")
        if temperature is not None:
            if temperature < 0:
                raise ParameterError(f"Temperature must be non-negative, got {temperature}")
            occupation = KB * temperature / (HBAR * data["Omega"])
            if data.get("n_bar") is not None and not _close(data["n_bar"], occupation):
                raise ParameterError(f"n_bar={data['n_bar']} is inconsistent with T")
            data["n_bar"] = occupation

        if data.get("G_qubit") is not None:
            coupling = math.sqrt(2) * data["G_qubit"] * data.get("d_bar", 1.0)
            if data.get("G_em") is None:
                data["G_em"] = coupling
            elif not _close(data["G_em"], coupling):
                raise ParameterError(
                    f"G_em={data['G_em']} is inconsistent with sqrt(2)*G_qubit*d_bar={coupling}"
                )
        return data

    @model_validator(mode="after")
    def check_domain(self):
        for name in POSITIVE_FIELDS:
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.Delta_c != 0:
            raise ParameterError("Only resonant drive is modeled; Delta_c must be 0")
        if self.theta_opa != 0:
            raise ParameterError("The parametric pump phase is fixed; theta_opa must be 0")
        if self.n_bar < 0:
            raise ParameterError(f"n_bar must be non-negative, got {self.n_bar}")
        if self.mass is not None and self.mass <= 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        return self

    def replace(self, **changes: Any) -> "PhysicalParams":
        """Return a validated copy with `changes` applied and derived values recomputed"""
        data = self.model_dump()
        data.update(changes)
        if "P_L" in changes and "g" not in changes:
            data.pop("g")
        if "g" in changes and "P_L" not in changes:
            data.pop("P_L")
        if "E_L" not in changes:
            data.pop("E_L")
        if data.get("T") is not None and "n_bar" not in changes:
            data.pop("n_bar")
        if (
            "G_em" in changes
            and "G_qubit" not in changes
            and data.get("G_qubit") is not None
        ):
            if data["d_bar"] == 0:
                if changes["G_em"] != 0:
                    raise ParameterError(
                        f"G_em={changes['G_em']} needs a nonzero d_bar when G_qubit is set"
                    )
            else:
                data["G_qubit"] = changes["G_em"] / (math.sqrt(2) * data["d_bar"])
        elif "G_qubit" in changes or "d_bar" in changes:
            if "G_em" not in changes and data.get("G_qubit") is not None:
                data.pop("G_em")
        return PhysicalParams.model_validate(data)

    def with_power(self, power: float) -> "PhysicalParams":
        return self.replace(P_L=power)

    def with_coupling(self, g: float) -> "PhysicalParams":
        return self.replace(g=g)

    @property
    def bare_qubit_coupling(self) -> float:
        """G, falling back to G_em / (√2 d̄) when only the effective coupling is set"""
        if self.G_qubit is not None:
            return self.G_qubit
        if self.d_bar == 0:
            return 0.0
        return self.G_em / (math.sqrt(2) * self.d_bar)

    @property
    def force_psd_scale(self) -> float:
        """ħ m Ω γ_m in N²/Hz, the unit the dimensionless spectra are expressed in"""
        if self.mass is None:
            raise ParameterError("Converting to N^2/Hz requires the oscillator mass")
        return HBAR * self.mass * self.Omega * self.gamma_m


def to_newtons(params: PhysicalParams, psd):
    """Convert a dimensionless force PSD to N²/Hz"""
    return psd * params.force_psd_scale


def g_from_power(params: PhysicalParams, P: float) -> float:
    if P < 0:
        raise ParameterError(f"Laser power must be non-negative, got {P}")
    return _coupling(params.g0, P, params.omega_L, params.kappa)


def power_from_g(params: PhysicalParams, g: float) -> float:
    if g < 0:
        raise ParameterError(f"Coupling must be non-negative, got {g}")
    return _power(params.g0, g, params.omega_L, params.kappa)


def make_fig2_params() -> PhysicalParams:
    """
    The reference parameter set: Ω = 2π·300 kHz, γ_m = 2π·30 Hz, κ = 2π·1 MHz,
    g0 = 2π·300 Hz, a 780 nm laser (ω_L = 2π·384 THz) at 100 mW, zero temperature.
    The qubit is left detuned at zero with no electromechanical coupling and
    Γ = γ_m; apply_cqnc_matching turns it into the matched configuration.
    """
    return PhysicalParams(
        Omega=TWO_PI * 3e5,
        gamma_m=TWO_PI * 30,
        kappa=TWO_PI * 1e6,
        Gamma=TWO_PI * 30,
        g0=TWO_PI * 300,
        omega_L=TWO_PI * 3.84e14,
        P_L=0.1,
        T=0.0,
    )


def apply_cqnc_matching(params: PhysicalParams) -> PhysicalParams:
    """Δ_q = Ω, Γ = γ_m, G_em = g"""
    ratio = params.Omega / params.gamma_m
    if ratio < MATCHING_SEPARATION:
        LOGGER.warning(
            f"Omega/Gamma = {ratio:.3g} after matching; the cancellation needs Omega >> Gamma"
        )
    if (
        params.Delta_q == params.Omega
        and params.Gamma == params.gamma_m
        and params.G_em == params.g
    ):
        return params
    return params.replace(Delta_q=params.Omega, Gamma=params.gamma_m, G_em=params.g)


def is_cqnc_matched(params: PhysicalParams) -> bool:
    return (
        params.Delta_q == params.Omega
        and params.Gamma == params.gamma_m
        and params.G_em == params.g
    )
