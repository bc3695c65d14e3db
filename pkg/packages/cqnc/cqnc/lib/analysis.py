# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

from enum import Enum
import logging
import math
from typing import Iterable, Optional, Sequence

from com.otel import otel_trace
import msgspec
import numpy as np
from numpy.polynomial import polynomial as P

from cqnc.lib.constants import MATCHING_SEPARATION
from cqnc.lib.errors import ParameterError
from cqnc.lib.optimize import golden_section_minimize
from cqnc.lib.oracle import ModelMode, assemble_model, oracle_force_psd
from cqnc.lib.params import PhysicalParams, apply_cqnc_matching, g_from_power
from cqnc.lib.response import (
    ChiPrimeConvention,
    FrequencyGrid,
    chi_d_prime,
    chi_m,
    opa_is_stable,
)
from cqnc.lib.spectra import (
    NoiseBudget,
    cqnc_floor_budget,
    g_sql,
    s_add_closed_form,
    s_cqnc_floor,
    s_sql,
    s_standard_om,
    s_standard_om_exact,
)

LOGGER = logging.getLogger(__name__)

ROOT_AGREEMENT_RTOL = 1e-8
# eigenvalues of the scaled companion matrix closer than this to the real axis
# are treated as real and polished
REAL_ROOT_ATOL = 1e-7
FLOOR_REACH = 0.01


class CqncReport(msgspec.Struct, frozen=True, eq=False):
    delta_matched: bool
    gamma_matched: bool
    coupling_matched: bool
    omega_over_gamma: float
    well_separated: bool
    convention: ChiPrimeConvention
    omega: np.ndarray
    residual_abs: np.ndarray
    residual_rel: np.ndarray
    max_relative_residual: float

    @property
    def matched(self) -> bool:
        return self.delta_matched and self.gamma_matched and self.coupling_matched


@otel_trace()
def cqnc_residual(
    params: PhysicalParams,
    grid: FrequencyGrid,
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT,
) -> CqncReport:
    """|g²χ_m + G′²χ′_d|, absolute and relative to g²|χ_m|"""
    if params.g == 0:
        raise ParameterError("The cancellation residual is relative to g^2 and needs g > 0")
    w = grid.omega
    mechanical = params.g**2 * chi_m(params, w)
    residual = np.abs(mechanical + params.G_em**2 * chi_d_prime(params, w, convention))
    relative = residual / np.abs(mechanical)
    ratio = params.Omega / params.Gamma
    return CqncReport(
        delta_matched=params.Delta_q == params.Omega,
        gamma_matched=params.Gamma == params.gamma_m,
        coupling_matched=params.G_em == params.g,
        omega_over_gamma=ratio,
        well_separated=ratio >= MATCHING_SEPARATION,
        convention=ChiPrimeConvention(convention),
        omega=w,
        residual_abs=residual,
        residual_rel=relative,
        max_relative_residual=float(np.nanmax(relative)),
    )


class RootVariant(str, Enum):
    # radicand (4Ω²g² − 4Ωγ_m² + γ_m⁴)/2 as printed
    PRINTED = "printed"
    # printed radicand with 4Ω²γ_m² in place of 4Ωγ_m²
    PRINTED_DIMENSIONAL = "printed_dimensional"
    # quadratic formula in ω², radicand g²Ω² − Ω²γ_m² + γ_m⁴/4
    EXACT = "exact"
    COMPANION = "companion"


class RootSet(msgspec.Struct, frozen=True, eq=False):
    variant: RootVariant
    values: np.ndarray
    is_real: np.ndarray
    residuals: np.ndarray

    @property
    def omega_12(self) -> np.ndarray:
        return self.values[:2]

    @property
    def omega_34(self) -> np.ndarray:
        return self.values[2:]

    @property
    def real_roots(self) -> np.ndarray:
        return np.sort(self.values[self.is_real].real)

    @property
    def max_residual(self) -> float:
        real = self.residuals[self.is_real]
        return float(real.max()) if real.size else 0.0


class ConstraintRoots(msgspec.Struct, frozen=True, eq=False):
    Omega: float
    gamma_m: float
    g: float
    sets: dict[RootVariant, RootSet]
    disagreement: dict[RootVariant, float]

    @property
    def flagged(self) -> list[RootVariant]:
        return [
            variant
            for variant, deviation in self.disagreement.items()
            if not deviation <= ROOT_AGREEMENT_RTOL
        ]

    @property
    def companion(self) -> RootSet:
        return self.sets[RootVariant.COMPANION]


def constraint_residual(Omega: float, gamma_m: float, g: float, omega) -> np.ndarray:
    """|g²Ω² / ((Ω² − ω²)² + ω²γ_m²) − 1|"""
    w = np.asarray(omega, dtype=float)
    W2 = Omega * Omega
    w2 = w * w
    denominator = (W2 - w2) ** 2 + w2 * (gamma_m * gamma_m)
    return np.abs((g * g) * W2 / denominator - 1)


def _root_set(
    variant: RootVariant, values: np.ndarray, Omega: float, gamma_m: float, g: float
) -> RootSet:
    is_real = values.imag == 0
    residuals = np.full(values.shape, np.nan)
    residuals[is_real] = constraint_residual(Omega, gamma_m, g, values[is_real].real)
    return RootSet(variant=variant, values=values, is_real=is_real, residuals=residuals)


def _closed_form_roots(Omega: float, gamma_m: float, g: float, variant: RootVariant):
    W2, c2, g2 = Omega * Omega, gamma_m * gamma_m, g * g
    if variant is RootVariant.PRINTED:
        radicand = (4 * W2 * g2 - 4 * Omega * c2 + c2 * c2) / 2
    elif variant is RootVariant.PRINTED_DIMENSIONAL:
        radicand = (4 * W2 * g2 - 4 * W2 * c2 + c2 * c2) / 2
    else:
        radicand = g2 * W2 - W2 * c2 + c2 * c2 / 4

    center = W2 - c2 / 2
    values = []
    for sign in (-1, 1):
        if radicand < 0:
            u = complex(center, sign * math.sqrt(-radicand))
        else:
            u = complex(center + sign * math.sqrt(radicand), 0.0)
        if u.imag == 0 and u.real >= 0:
            root = complex(math.sqrt(u.real), 0.0)
        else:
            root = complex(np.sqrt(u))
        values.extend([-root, root])
    return np.array(values, dtype=complex)


def _polish(x: float, gamma: float, coupling: float) -> float:
    """Newton steps on (1 − x²)² + x²γ̃² − g̃², which keeps the small terms intact"""

    def f(t: float) -> float:
        return (1 - t * t) ** 2 + t * t * gamma**2 - coupling**2

    for _ in range(4):
        slope = -4 * x * (1 - x * x) + 2 * x * gamma**2
        if slope == 0:
            break
        candidate = x - f(x) / slope
        if not abs(f(candidate)) < abs(f(x)):
            break
        x = candidate
    return x


def _companion_roots(Omega: float, gamma_m: float, g: float) -> np.ndarray:
    gamma, coupling = gamma_m / Omega, g / Omega
    # x⁴ + (γ̃² − 2)x² + (1 − g̃²) with x = ω/Ω, lowest degree first
    coefficients = [1 - coupling**2, 0.0, gamma**2 - 2, 0.0, 1.0]
    scaled = np.linalg.eigvals(P.polycompanion(coefficients))
    roots = []
    for value in scaled:
        if abs(value.imag) <= REAL_ROOT_ATOL * max(1.0, abs(value.real)):
            roots.append(complex(_polish(float(value.real), gamma, coupling), 0.0))
        else:
            roots.append(complex(value))
    # ±ω₁₂ then ±ω₃₄, matching the closed-form ordering
    roots.sort(key=lambda z: (float(f"{abs(z):.9g}"), z.real, z.imag))
    return Omega * np.array(roots, dtype=complex)


def _deviation(candidate: RootSet, reference: RootSet) -> float:
    a, b = candidate.real_roots, reference.real_roots
    if a.size != b.size:
        return math.inf
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b) / np.abs(b)))


@otel_trace()
def constraint_roots(params: PhysicalParams, g: Optional[float] = None) -> ConstraintRoots:
    """
    Frequencies where g²|χ_m|² = 1, i.e. the real solutions of
    (Ω² − ω²)² + ω²γ_m² = g²Ω², from three closed-form radicals and from the
    companion matrix of the quartic
    """
    coupling = params.g if g is None else g
    if coupling <= 0:
        raise ParameterError(f"Constraint roots need g > 0, got {coupling}")
    Omega, gamma_m = params.Omega, params.gamma_m

    sets = {
        variant: _root_set(
            variant, _closed_form_roots(Omega, gamma_m, coupling, variant), Omega, gamma_m, coupling
        )
        for variant in (RootVariant.PRINTED, RootVariant.PRINTED_DIMENSIONAL, RootVariant.EXACT)
    }
    companion = _root_set(
        RootVariant.COMPANION, _companion_roots(Omega, gamma_m, coupling), Omega, gamma_m, coupling
    )
    sets[RootVariant.COMPANION] = companion
    disagreement = {
        variant: _deviation(root_set, companion)
        for variant, root_set in sets.items()
        if variant is not RootVariant.COMPANION
    }
    result = ConstraintRoots(
        Omega=Omega, gamma_m=gamma_m, g=coupling, sets=sets, disagreement=disagreement
    )
    for variant in result.flagged:
        LOGGER.warning(
            f"Closed-form roots '{variant.value}' disagree with the companion matrix "
            f"(max relative deviation {disagreement[variant]:.3g})"
        )
    return result


class SqlMinimum(msgspec.Struct, frozen=True):
    omega: float
    g_min: float
    s_min: float
    # the displayed closed forms, reported next to the numeric optimum
    s_sql_claim: float
    g_sql_claim: float
    # optimum of the full bare optomechanical budget
    exact_g_min: float
    exact_s_min: float

    @property
    def claim_ratio(self) -> float:
        return self.s_sql_claim / self.s_min


@otel_trace()
def minimize_sql(
    params: PhysicalParams,
    omega: float,
    bracket: tuple[float, float] = (1e-3, 1e3),
    tol: float = 1e-10,
) -> SqlMinimum:
    """
    Golden-section search over log g of the thermal-free standard spectrum.
    `tol` is the final bracket width in log g; the located g_min is good to
    about sqrt(eps) relative, while s_min is accurate to rounding.
    """
    reference = float(g_sql(params, omega))
    lo, hi = (math.log(reference * factor) for factor in bracket)

    def standard(t: float) -> float:
        return float(s_standard_om(params, omega, g=math.exp(t)).total)

    best = golden_section_minimize(standard, lo, hi, tol)

    bare = params.replace(G_em=0.0, G_opa=0.0)

    def exact(t: float) -> float:
        return float(s_standard_om_exact(bare.with_coupling(math.exp(t)), omega).total)

    best_exact = golden_section_minimize(exact, lo, hi, tol)
    return SqlMinimum(
        omega=float(omega),
        g_min=math.exp(best.x),
        s_min=best.value,
        s_sql_claim=float(s_sql(params, omega)),
        g_sql_claim=reference,
        exact_g_min=math.exp(best_exact.x),
        exact_s_min=best_exact.value,
    )


class SeriesKind(str, Enum):
    STANDARD = "standard"
    STANDARD_EXACT = "standard_exact"
    HYBRID = "hybrid"
    FLOOR = "floor"
    ORACLE = "oracle"


class SeriesSpec(msgspec.Struct, frozen=True):
    label: str
    kind: SeriesKind
    params: PhysicalParams
    mode: ModelMode = ModelMode.CONSISTENT
    convention: ChiPrimeConvention = ChiPrimeConvention.PRODUCT


class SweepResult(msgspec.Struct, frozen=True, eq=False):
    axis_name: str
    axis: np.ndarray
    series: dict[str, NoiseBudget]
    extra: dict[str, np.ndarray] = msgspec.field(default_factory=dict)
    metadata: dict[str, str] = msgspec.field(default_factory=dict)
    summary: dict[str, str] = msgspec.field(default_factory=dict)
    warnings: list[str] = msgspec.field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.axis.size)

    @property
    def has_poles(self) -> bool:
        return any(bool(budget.pole.any()) for budget in self.series.values())


def opa_label(gain: float) -> str:
    return f"{gain:g}kappa"


def fig2_series(
    params: PhysicalParams, gains: Sequence[float] = (0.0, 0.1, 0.3)
) -> list[SeriesSpec]:
    """Standard optomechanics, the matched hybrid with each OPA gain (in units of κ), and the floor"""
    specs = [SeriesSpec(label="s_standard", kind=SeriesKind.STANDARD, params=params)]
    for gain in gains:
        hybrid = apply_cqnc_matching(params.replace(G_opa=gain * params.kappa))
        specs.append(
            SeriesSpec(
                label=f"s_hybrid_opa[G={opa_label(gain)}]", kind=SeriesKind.HYBRID, params=hybrid
            )
        )
    specs.append(SeriesSpec(label="s_cqnc_floor", kind=SeriesKind.FLOOR, params=params))
    return specs


def evaluate_series(
    spec: SeriesSpec, omega: np.ndarray, include_thermal: bool = False
) -> NoiseBudget:
    match spec.kind:
        case SeriesKind.STANDARD:
            return s_standard_om(spec.params, omega, include_thermal)
        case SeriesKind.STANDARD_EXACT:
            return s_standard_om_exact(spec.params, omega, include_thermal)
        case SeriesKind.HYBRID:
            return s_add_closed_form(spec.params, omega, include_thermal)
        case SeriesKind.FLOOR:
            return cqnc_floor_budget(spec.params, omega)
        case SeriesKind.ORACLE:
            model = assemble_model(spec.params, spec.mode, spec.convention)
            return oracle_force_psd(model, omega, include_thermal)
    raise ValueError(f"Unknown series kind {spec.kind}")


def _pole_warnings(series: dict[str, NoiseBudget]) -> list[str]:
    warnings = []
    for label, budget in series.items():
        count = int(budget.pole.sum())
        if count:
            message = f"{label}: {count} points at a pole were written as 'pole'"
            LOGGER.warning(message)
            warnings.append(message)
    return warnings


@otel_trace()
def sweep_frequency(
    specs: Iterable[SeriesSpec], grid: FrequencyGrid, include_thermal: bool = False
) -> SweepResult:
    """One labeled budget per series, evaluated over the whole grid, in input order"""
    omega = grid.omega
    series: dict[str, NoiseBudget] = {}
    warnings: list[str] = []
    for spec in specs:
        if spec.label in series:
            raise ValueError(f"Duplicate series label {spec.label}")
        if not opa_is_stable(spec.params):
            warnings.append(f"{spec.label}: OPA gain anti-damps the amplitude quadrature")
        series[spec.label] = evaluate_series(spec, omega, include_thermal)
    warnings.extend(_pole_warnings(series))
    return SweepResult(axis_name="omega", axis=omega, series=series, warnings=warnings)


def interior_minima(values: np.ndarray) -> list[int]:
    """Indices where the discrete derivative changes sign from falling to rising"""
    slope = np.sign(np.diff(values))
    return [i + 1 for i in range(slope.size - 1) if slope[i] < 0 and slope[i + 1] > 0]


def floor_reach_index(values: np.ndarray, floor: float, fraction: float = FLOOR_REACH) -> Optional[int]:
    """First index within `fraction` of the floor"""
    within = np.nonzero(values <= floor * (1 + fraction))[0]
    return int(within[0]) if within.size else None


@otel_trace()
def sweep_power(
    params: PhysicalParams,
    omega: float,
    powers: Sequence[float] | np.ndarray,
    gains: Sequence[float] = (0.1, 0.3),
    include_thermal: bool = False,
) -> SweepResult:
    """
    Standard and matched-hybrid spectra at a fixed frequency as the laser
    power, and with it g, is swept
    """
    powers = np.asarray(powers, dtype=float)
    if powers.size and np.any(powers <= 0):
        raise ParameterError("Power sweeps need strictly positive powers")
    couplings = np.array([g_from_power(params, float(p)) for p in powers])

    series: dict[str, NoiseBudget] = {}
    summary: dict[str, str] = {}
    warnings: list[str] = []
    if powers.size:
        series["s_standard"] = s_standard_om(params, omega, include_thermal, g=couplings)
        minima = interior_minima(series["s_standard"].total)
        summary["standard_interior_minima"] = str(len(minima))
        if minima:
            summary["standard_minimum_power"] = repr(float(powers[minima[0]]))

        floor = float(s_cqnc_floor(params, omega))
        summary["floor"] = repr(floor)
        for gain in gains:
            label = f"s_hybrid[{opa_label(gain)}]"
            hybrid = apply_cqnc_matching(params.replace(G_opa=gain * params.kappa))
            if not opa_is_stable(hybrid):
                warnings.append(f"{label}: OPA gain anti-damps the amplitude quadrature")
            series[label] = s_add_closed_form(hybrid, omega, include_thermal, g=couplings)
            reach = floor_reach_index(series[label].total, floor)
            summary[f"{label}.floor_reach_power"] = (
                "none" if reach is None else repr(float(powers[reach]))
            )
        warnings.extend(_pole_warnings(series))

    return SweepResult(
        axis_name="P_L_watts",
        axis=powers,
        series=series,
        extra={"g": couplings},
        summary=summary,
        warnings=warnings,
    )
