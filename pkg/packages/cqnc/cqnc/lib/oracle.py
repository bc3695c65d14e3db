# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

"""
Brute-force reference for the closed forms: the six linearized Langevin
equations over the state (x_a, p_a, x, p, x_d, p_d) are assembled into a
drift matrix and solved at every frequency, without using any closed-form
susceptibility.
"""

from enum import Enum, IntEnum
import logging
import math

from com.otel import otel_trace
import msgspec
import numpy as np
from numpy.typing import ArrayLike

from cqnc.lib.errors import NormalizationError
from cqnc.lib.params import PhysicalParams
from cqnc.lib.response import ChiPrimeConvention
from cqnc.lib.spectra import VACUUM_LEVEL, NoiseBudget, make_budget, readback_sign

LOGGER = logging.getLogger(__name__)

STATE = ("x_a", "p_a", "x", "p", "x_d", "p_d")


class Channel(IntEnum):
    X_A_IN = 0
    P_A_IN = 1
    F_TH = 2
    F_EXT = 3
    X_D_IN = 4
    P_D_IN = 5


class ModelMode(str, Enum):
    # the equations of motion term by term, qubit coupled to the mechanics
    LITERAL = "literal"
    # Γ/2 damping on both qubit quadratures, qubit driven by the cavity
    # amplitude and read back into the cavity phase
    CONSISTENT = "consistent"


class LinearModel(msgspec.Struct, frozen=True, eq=False):
    A: np.ndarray
    B: np.ndarray
    S_in: np.ndarray
    C_out: np.ndarray
    D_out: np.ndarray
    mode: ModelMode
    convention: ChiPrimeConvention
    eigenvalues: np.ndarray

    @property
    def is_stable(self) -> bool:
        return bool(np.all(self.eigenvalues.real < 0))


class TransferRow(msgspec.Struct, frozen=True, eq=False):
    """Complex gain from every input channel to P_a^out, one row per frequency"""

    omega: np.ndarray
    gains: np.ndarray
    pole: np.ndarray

    def gain(self, channel: Channel) -> np.ndarray:
        return self.gains[:, channel]

    @property
    def size(self) -> int:
        return int(self.omega.size)


def _drift_matrix(
    params: PhysicalParams, mode: ModelMode, convention: ChiPrimeConvention
) -> np.ndarray:
    x_a, p_a, x, p, x_d, p_d = range(6)
    A = np.zeros((6, 6))
    kappa, g, G = params.kappa, params.g, params.G_em

    A[x_a, x_a] = -kappa / 2 + 2 * params.G_opa
    A[p_a, p_a] = -(kappa / 2 + 2 * params.G_opa)
    A[p_a, x] = -g

    A[x, p] = params.Omega
    A[p, x] = -params.Omega
    A[p, x_a] = -g
    A[p, p] = -params.gamma_m

    if mode is ModelMode.LITERAL:
        A[p, x_d] = -G
        detuning = params.Delta_q + 2 * params.bare_qubit_coupling * params.x_bar
        A[x_d, p_d] = detuning
        A[x_d, x_d] = -params.Gamma / 2
        A[p_d, x_d] = -detuning + 2 * params.Omega_R * params.d_bar
        A[p_d, x] = -2 * G
        A[p_d, p_d] = -params.Gamma / math.sqrt(2)
    else:
        A[p_a, x_d] = readback_sign(convention) * G
        A[x_d, p_d] = params.Delta_q
        A[x_d, x_d] = -params.Gamma / 2
        A[p_d, x_d] = -params.Delta_q
        A[p_d, x_a] = -G
        A[p_d, p_d] = -params.Gamma / 2
    return A


def _input_matrix(params: PhysicalParams) -> np.ndarray:
    B = np.zeros((6, 6))
    root_kappa = math.sqrt(params.kappa)
    root_gamma_m = math.sqrt(params.gamma_m)
    root_gamma_q = math.sqrt(params.Gamma)
    B[0, Channel.X_A_IN] = root_kappa
    B[1, Channel.P_A_IN] = root_kappa
    # thermal and external forces share the mechanical port
    B[3, Channel.F_TH] = root_gamma_m
    B[3, Channel.F_EXT] = root_gamma_m
    B[4, Channel.X_D_IN] = root_gamma_q
    B[5, Channel.P_D_IN] = root_gamma_q
    return B


@otel_trace()
def assemble_model(
    params: PhysicalParams,
    mode: ModelMode = ModelMode.CONSISTENT,
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT,
) -> LinearModel:
    mode = ModelMode(mode)
    convention = ChiPrimeConvention(convention)
    A = _drift_matrix(params, mode, convention)
    B = _input_matrix(params)

    S_in = np.full(6, VACUUM_LEVEL)
    S_in[Channel.F_TH] = params.n_bar
    S_in[Channel.F_EXT] = 0.0

    C_out = np.zeros(6)
    C_out[1] = math.sqrt(params.kappa)
    D_out = np.zeros(6)
    D_out[Channel.P_A_IN] = -1.0

    eigenvalues = np.linalg.eigvals(A)
    model = LinearModel(
        A=A,
        B=B,
        S_in=S_in,
        C_out=C_out,
        D_out=D_out,
        mode=mode,
        convention=convention,
        eigenvalues=eigenvalues,
    )
    if not model.is_stable:
        LOGGER.warning(
            f"Drift matrix in {mode.value} mode has eigenvalues with non-negative real part "
            f"(max {eigenvalues.real.max():.6g}); the frequency response is still evaluated"
        )
    return model


def _solve(model: LinearModel, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    identity = np.eye(6)
    system = 1j * w[:, None, None] * identity - model.A
    rhs = np.broadcast_to(model.B.astype(complex), system.shape)
    pole = np.zeros(w.shape, dtype=bool)
    try:
        states = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        # a singular frequency poisons the batched solve; redo it point by point
        states = np.empty(system.shape, dtype=complex)
        for i in range(w.size):
            try:
                states[i] = np.linalg.solve(system[i], model.B)
            except np.linalg.LinAlgError:
                states[i] = np.nan
                pole[i] = True
    return states, pole


@otel_trace()
def transfer_row(model: LinearModel, omega: ArrayLike) -> TransferRow:
    """C_out (iωI − A)⁻¹ B + D_out, one LU solve with partial pivoting per frequency"""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    states, pole = _solve(model, w)
    gains = np.einsum("s,fsc->fc", model.C_out, states) + model.D_out
    pole = pole | ~np.all(np.isfinite(gains), axis=1)
    gains[pole] = complex(np.nan, np.nan)
    if pole.any():
        LOGGER.warning(f"{int(pole.sum())} frequencies hit a pole of the linear model")
    return TransferRow(omega=w, gains=gains, pole=pole)


@otel_trace()
def oracle_force_psd(
    model: LinearModel, omega: ArrayLike, include_thermal: bool = True
) -> NoiseBudget:
    """
    Normalize every gain by the external-force gain and weight by the input
    levels; each channel lands in its own budget component
    """
    row = transfer_row(model, omega)
    force = row.gain(Channel.F_EXT)
    if np.any(force[~row.pole] == 0):
        raise NormalizationError(
            "The external force does not reach the cavity output; no force estimator exists"
        )

    def psd(channel: Channel) -> np.ndarray:
        return model.S_in[channel] * np.abs(row.gain(channel) / force) ** 2

    return make_budget(
        row.omega,
        psd(Channel.F_TH) if include_thermal else 0.0,
        psd(Channel.P_A_IN),
        psd(Channel.X_A_IN),
        psd(Channel.X_D_IN),
        psd(Channel.P_D_IN),
    )
