# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

"""
Complex susceptibilities of the cavity, the mechanics and the bosonized qubit.

Every function takes the parameters and an angular frequency (scalar or numpy
array) and follows the d/dt -> +iω Fourier convention. At a pole the result is
NaN, never ±Inf, so sweeps can mark the point and move on.
"""

from enum import Enum
import logging
import math
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_validator

from cqnc.lib.params import PhysicalParams

LOGGER = logging.getLogger(__name__)


class ChiPrimeConvention(str, Enum):
    # −Δ_q ζ χ_d, the sign for which back-action cancels under matching
    PRODUCT = "product"
    # Ω/(Ω²−ω²+iωΓ+Γ²/4) as displayed; the negative of PRODUCT when Δ_q = Ω
    CLOSED_FORM = "closed-form"


def _reciprocal(denominator):
    denominator = np.asarray(denominator, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(denominator == 0, complex(np.nan, np.nan), 1.0 / denominator)
    return value[()] if value.ndim == 0 else value


def _omega(omega: ArrayLike) -> np.ndarray:
    return np.asarray(omega, dtype=float)


def is_pole(value) -> np.ndarray | bool:
    """True wherever a response or spectrum could not be evaluated"""
    result = ~np.isfinite(value)
    return bool(result) if np.ndim(result) == 0 else result


def chi_a(params: PhysicalParams, omega: ArrayLike):
    return _reciprocal(1j * _omega(omega) + params.kappa / 2)


def chi_m(params: PhysicalParams, omega: ArrayLike):
    w = _omega(omega)
    return params.Omega * _reciprocal(
        params.Omega**2 - w**2 + 1j * params.gamma_m * w
    )


def chi_d(params: PhysicalParams, omega: ArrayLike):
    return _reciprocal(1j * _omega(omega) + params.Gamma / 2)


def zeta(params: PhysicalParams, omega: ArrayLike):
    w = _omega(omega)
    return _reciprocal(1j * w + params.Gamma / 2 + params.Delta_q**2 * chi_d(params, w))


def chi_d_product(params: PhysicalParams, omega: ArrayLike):
    """−Δ_q ζ χ_d, the qubit response to the cavity amplitude as read back"""
    w = _omega(omega)
    return -params.Delta_q * zeta(params, w) * chi_d(params, w)


def chi_d_closed_form(params: PhysicalParams, omega: ArrayLike):
    w = _omega(omega)
    return params.Omega * _reciprocal(
        params.Omega**2 - w**2 + 1j * w * params.Gamma + params.Gamma**2 / 4
    )


def chi_d_prime(
    params: PhysicalParams,
    omega: ArrayLike,
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT,
):
    if ChiPrimeConvention(convention) is ChiPrimeConvention.PRODUCT:
        return chi_d_product(params, omega)
    return chi_d_closed_form(params, omega)


def opa_is_stable(params: PhysicalParams) -> bool:
    """The amplitude quadrature is anti-damped once 2𝒢 ≥ κ/2"""
    return 2 * params.G_opa < params.kappa / 2


def warn_if_opa_unstable(params: PhysicalParams) -> bool:
    stable = opa_is_stable(params)
    if not stable:
        LOGGER.warning(
            f"OPA gain G_opa={params.G_opa / params.kappa:.3g} kappa anti-damps the "
            "amplitude quadrature (2*G_opa >= kappa/2); the response is still evaluated"
        )
    return stable


def lambda_plus(params: PhysicalParams, omega: ArrayLike):
    warn_if_opa_unstable(params)
    return _reciprocal(1j * _omega(omega) + params.kappa / 2 - 2 * params.G_opa)


def lambda_minus(params: PhysicalParams, omega: ArrayLike):
    return _reciprocal(1j * _omega(omega) + params.kappa / 2 + 2 * params.G_opa)


def mechanical_peak(params: PhysicalParams) -> float:
    """Frequency where |χ_m| is largest"""
    return params.Omega * math.sqrt(max(0.0, 1 - params.gamma_m**2 / (2 * params.Omega**2)))


class FrequencyGrid(BaseModel):
    """Strictly increasing, finite, non-empty angular frequencies in rad/s"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    points: tuple[float, ...] = Field(min_length=1)

    @field_validator("points")
    @classmethod
    def strictly_increasing(cls, points: tuple[float, ...]) -> tuple[float, ...]:
        for previous, current in zip(points, points[1:]):
            if not current > previous:
                raise ValueError(
                    f"Frequency grid must be strictly increasing but got {previous} then {current}"
                )
        return points

    @classmethod
    def spaced(
        cls,
        params: PhysicalParams,
        lo: float,
        hi: float,
        count: int,
        spacing: Literal["linear", "log"] = "log",
    ) -> "FrequencyGrid":
        """`count` points from lo·Ω to hi·Ω"""
        if count < 2:
            raise ValueError(f"A spaced grid needs at least 2 points, got {count}")
        if not lo < hi:
            raise ValueError(f"Grid minimum {lo} must be below maximum {hi}")
        if spacing == "log":
            if lo <= 0:
                raise ValueError("A log-spaced grid needs a positive minimum")
            ratios = np.geomspace(lo, hi, count)
        elif spacing == "linear":
            ratios = np.linspace(lo, hi, count)
        else:
            raise ValueError(f"Unknown grid spacing {spacing}")
        return cls(points=tuple(float(r) for r in ratios * params.Omega))

    @property
    def omega(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)
