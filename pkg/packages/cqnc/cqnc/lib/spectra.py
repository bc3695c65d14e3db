# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

"""
Closed-form output coefficients, force estimator and added-noise spectra.

Spectra are dimensionless, in units of ħ m Ω γ_m. Vacuum quadratures carry a
symmetrized level of 1/2 and the thermal force a level of n̄.
"""

from enum import Enum
import logging
import math
from typing import Optional

import msgspec
import numpy as np
from numpy.typing import ArrayLike

from cqnc.lib.errors import NormalizationError, ParameterError
from cqnc.lib.params import PhysicalParams
from cqnc.lib.response import (
    ChiPrimeConvention,
    chi_d,
    chi_d_prime,
    chi_d_product,
    chi_m,
    lambda_minus,
    lambda_plus,
    zeta,
)

LOGGER = logging.getLogger(__name__)

VACUUM_LEVEL = 0.5


class CoefficientForm(str, Enum):
    # exact transfer coefficients of the consistent linear model
    DERIVED = "derived"
    # the coefficients exactly as displayed in the closed-form P_a^out
    PRINTED = "printed"


class NoiseCoefficients(msgspec.Struct, frozen=True, eq=False):
    """Coefficients of each input channel in P_a^out"""

    omega: np.ndarray
    c_xa_in: np.ndarray
    c_pa_in: np.ndarray
    c_xd_in: np.ndarray
    c_pd_in: np.ndarray
    c_force: np.ndarray


class NoiseBudget(msgspec.Struct, frozen=True, eq=False):
    """Per-frequency force PSD split by noise channel"""

    omega: np.ndarray
    thermal: np.ndarray
    shot: np.ndarray
    backaction: np.ndarray
    qubit_x: np.ndarray
    qubit_p: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.thermal + self.shot + self.backaction + self.qubit_x + self.qubit_p

    @property
    def qubit(self) -> np.ndarray:
        return self.qubit_x + self.qubit_p

    @property
    def pole(self) -> np.ndarray:
        return ~np.isfinite(self.total)

    @property
    def size(self) -> int:
        return int(np.size(self.total))

    def components(self) -> dict[str, np.ndarray]:
        return {
            "thermal": self.thermal,
            "shot": self.shot,
            "backaction": self.backaction,
            "qubit_x": self.qubit_x,
            "qubit_p": self.qubit_p,
        }


def make_budget(omega, thermal, shot, backaction, qubit_x, qubit_p) -> NoiseBudget:
    arrays = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (omega, thermal, shot, backaction, qubit_x, qubit_p))
    )
    omega_, thermal_, shot_, backaction_, qubit_x_, qubit_p_ = (np.array(a) for a in arrays)
    return NoiseBudget(
        omega=omega_,
        thermal=thermal_,
        shot=shot_,
        backaction=backaction_,
        qubit_x=qubit_x_,
        qubit_p=qubit_p_,
    )


def readback_sign(convention: ChiPrimeConvention) -> float:
    """Sign with which the qubit is read back into the cavity phase quadrature"""
    return 1.0 if ChiPrimeConvention(convention) is ChiPrimeConvention.PRODUCT else -1.0


def out_phase_coefficients(
    params: PhysicalParams,
    omega: ArrayLike,
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT,
    form: CoefficientForm = CoefficientForm.DERIVED,
) -> NoiseCoefficients:
    w = np.asarray(omega, dtype=float)
    kappa, g, G = params.kappa, params.g, params.G_em
    lp = lambda_plus(params, w)
    lm = lambda_minus(params, w)
    xm = chi_m(params, w)
    root_kappa_gamma_q = math.sqrt(kappa * params.Gamma)

    c_force = -g * xm * lm * math.sqrt(params.gamma_m * kappa)
    c_pa = lm * kappa - 1

    if CoefficientForm(form) is CoefficientForm.DERIVED:
        sign = readback_sign(convention)
        q = chi_d_product(params, w)
        c_xa = kappa * lp * lm * (g**2 * xm + sign * G**2 * q)
        c_xd = sign * G * root_kappa_gamma_q * lm * zeta(params, w)
        c_pd = -sign * G * root_kappa_gamma_q * lm * q
    else:
        xd = chi_d(params, w)
        xp = chi_d_prime(params, w, convention)
        c_xa = lp * lm * kappa * (g**2 * xm + G**2 * xp)
        c_xd = root_kappa_gamma_q * lm * xd * (-params.Omega * xp + g * G * xm)
        c_pd = (
            math.sqrt(kappa)
            * (-params.Omega * xd)
            * (g * G * xm * lm)
            * (math.sqrt(params.Gamma) * zeta(params, w))
        )

    return NoiseCoefficients(
        omega=w,
        c_xa_in=np.asarray(c_xa),
        c_pa_in=np.asarray(c_pa),
        c_xd_in=np.asarray(c_xd),
        c_pd_in=np.asarray(c_pd),
        c_force=np.asarray(c_force),
    )


def force_estimator_normalization(params: PhysicalParams, omega: ArrayLike):
    """−g χ_m λ₋ √(γ_m κ); dividing P_a^out by it gives the force estimator"""
    if params.g == 0:
        raise NormalizationError("The force estimator is undefined for g = 0")
    w = np.asarray(omega, dtype=float)
    return (
        -params.g * chi_m(params, w) * lambda_minus(params, w) * math.sqrt(params.gamma_m * params.kappa)
    )


def s_add_from_coefficients(
    params: PhysicalParams,
    omega: ArrayLike,
    include_thermal: bool = False,
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT,
    form: CoefficientForm = CoefficientForm.DERIVED,
) -> NoiseBudget:
    """Added-noise budget from |F_add coefficient|² times each input level"""
    normalization = force_estimator_normalization(params, omega)
    coefficients = out_phase_coefficients(params, omega, convention, form)

    def level(c) -> np.ndarray:
        return VACUUM_LEVEL * np.abs(c / normalization) ** 2

    thermal = params.n_bar * np.abs(coefficients.c_force / normalization) ** 2
    return make_budget(
        coefficients.omega,
        thermal if include_thermal else 0.0,
        level(coefficients.c_pa_in),
        level(coefficients.c_xa_in),
        level(coefficients.c_xd_in),
        level(coefficients.c_pd_in),
    )


def _qubit_residual(params: PhysicalParams, omega: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(omega, dtype=float)
    amplitude = VACUUM_LEVEL * (w**2 + params.Gamma**2 / 4) / params.Omega**2
    phase = np.full_like(w, VACUUM_LEVEL * params.Omega**2 / params.Omega**2)
    return amplitude, phase


def s_cqnc_floor(params: PhysicalParams, omega: ArrayLike):
    """(ω² + Ω² + Γ²/4) / (2Ω²), the floor left once back-action is cancelled"""
    amplitude, phase = _qubit_residual(params, omega)
    floor = amplitude + phase
    return floor[()] if floor.ndim == 0 else floor


def _coupling(params: PhysicalParams, g: Optional[ArrayLike]) -> np.ndarray:
    coupling = np.asarray(params.g if g is None else g, dtype=float)
    if np.any(coupling <= 0):
        raise ParameterError("The shot-noise term is undefined for g <= 0")
    return coupling


def s_add_closed_form(
    params: PhysicalParams,
    omega: ArrayLike,
    include_thermal: bool = False,
    g: Optional[ArrayLike] = None,
) -> NoiseBudget:
    """
    Added noise of the matched hybrid scheme, assuming the back-action is
    cancelled exactly. `g` overrides the coupling and broadcasts against omega.
    """
    w = np.asarray(omega, dtype=float)
    coupling = _coupling(params, g)
    lm = lambda_minus(params, w)
    readout = np.abs((lm * params.kappa - 1) / lm) ** 2
    shot = (
        VACUUM_LEVEL
        * readout
        / (coupling**2 * np.abs(chi_m(params, w)) ** 2 * params.gamma_m * params.kappa)
    )
    amplitude, phase = _qubit_residual(params, w)
    return make_budget(
        w,
        params.n_bar if include_thermal else 0.0,
        shot,
        0.0,
        amplitude,
        phase,
    )


def s_standard_om(
    params: PhysicalParams,
    omega: ArrayLike,
    include_thermal: bool = False,
    g: Optional[ArrayLike] = None,
) -> NoiseBudget:
    """Bare optomechanical force noise in the ω ≪ κ form with back-action 4g²/(κγ_m)"""
    w = np.asarray(omega, dtype=float)
    coupling = _coupling(params, g)
    susceptibility = np.abs(chi_m(params, w)) ** 2
    shot = params.kappa / (8 * params.gamma_m * coupling**2 * susceptibility)
    backaction = 4 * coupling**2 / (params.kappa * params.gamma_m)
    return make_budget(
        w,
        params.n_bar if include_thermal else 0.0,
        shot,
        backaction,
        0.0,
        0.0,
    )


def s_standard_om_exact(
    params: PhysicalParams, omega: ArrayLike, include_thermal: bool = False
) -> NoiseBudget:
    """Full bare optomechanical budget (no qubit) at every ω, with the OPA"""
    bare = params if params.G_em == 0 else params.replace(G_em=0.0)
    return s_add_from_coefficients(bare, omega, include_thermal)


def s_sql(params: PhysicalParams, omega: ArrayLike):
    """1/(γ_m |χ_m|)"""
    return 1 / (params.gamma_m * np.abs(chi_m(params, omega)))


def g_sql(params: PhysicalParams, omega: ArrayLike):
    """√κ / (2√|χ_m|)"""
    return math.sqrt(params.kappa) / (2 * np.sqrt(np.abs(chi_m(params, omega))))


def standard_om_optimum(params: PhysicalParams, omega: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """
    Analytic minimizer of s_standard_om over g: the a/g² + b g² balance gives
    g² = κ/(4√2 |χ_m|) and a minimum of √2/(γ_m |χ_m|)
    """
    susceptibility = np.abs(chi_m(params, omega))
    coupling = np.sqrt(params.kappa / (4 * math.sqrt(2) * susceptibility))
    return coupling, math.sqrt(2) / (params.gamma_m * susceptibility)


def cqnc_floor_budget(params: PhysicalParams, omega: ArrayLike) -> NoiseBudget:
    """The floor as a budget: only the two qubit components are non-zero"""
    amplitude, phase = _qubit_residual(params, omega)
    return make_budget(np.asarray(omega, dtype=float), 0.0, 0.0, 0.0, amplitude, phase)
