# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import logging

import numpy as np
from pydantic import ValidationError
import pytest

from cqnc.conftest import CHI_M_200KHZ
from cqnc.lib.constants import TWO_PI
from cqnc.lib.params import PhysicalParams
from cqnc.lib.response import (
    ChiPrimeConvention,
    FrequencyGrid,
    chi_a,
    chi_d,
    chi_d_closed_form,
    chi_d_prime,
    chi_d_product,
    chi_m,
    is_pole,
    lambda_minus,
    lambda_plus,
    mechanical_peak,
    opa_is_stable,
    zeta,
)

RESPONSES = [chi_a, chi_m, chi_d, zeta, chi_d_product, chi_d_closed_form, lambda_plus, lambda_minus]


def test_cavity_response(fig2_params: PhysicalParams):
    kappa = fig2_params.kappa
    assert chi_a(fig2_params, 0.0) == pytest.approx(2 / kappa, rel=1e-15)
    assert chi_a(fig2_params, kappa / 2) == pytest.approx((1 - 1j) / kappa, rel=1e-15)


def test_mechanical_response(fig2_params: PhysicalParams):
    assert chi_m(fig2_params, 0.0) == pytest.approx(1 / fig2_params.Omega, rel=1e-15)
    at_resonance = chi_m(fig2_params, fig2_params.Omega)
    assert abs(at_resonance) * fig2_params.gamma_m == pytest.approx(1.0, rel=1e-12)

    value = chi_m(fig2_params, TWO_PI * 2e5)
    assert value.real == pytest.approx(CHI_M_200KHZ.real, rel=1e-12)
    assert value.imag == pytest.approx(CHI_M_200KHZ.imag, rel=1e-9)


def test_qubit_response(matched_params: PhysicalParams):
    Gamma = matched_params.Gamma
    assert chi_d(matched_params, 0.0) == pytest.approx(2 / Gamma, rel=1e-15)
    assert chi_d(matched_params, Gamma / 2) == pytest.approx((1 - 1j) / Gamma, rel=1e-15)

    undetuned = matched_params.replace(Delta_q=0.0)
    omega = np.linspace(0, 2 * matched_params.Omega, 11)
    assert np.allclose(zeta(undetuned, omega), chi_d(undetuned, omega), rtol=1e-15, atol=0)

    expected = 1 / (Gamma / 2 + 2 * matched_params.Delta_q**2 / Gamma)
    assert zeta(matched_params, 0.0) == pytest.approx(expected, rel=1e-12)


def test_chi_prime_conventions_differ_by_sign(matched_params: PhysicalParams):
    omega = np.geomspace(0.1, 2.0, 101) * matched_params.Omega
    product = chi_d_product(matched_params, omega)
    closed = chi_d_closed_form(matched_params, omega)
    assert np.allclose(product, -closed, rtol=1e-12, atol=0)

    assert np.array_equal(
        chi_d_prime(matched_params, omega, ChiPrimeConvention.PRODUCT), product
    )
    assert np.array_equal(chi_d_prime(matched_params, omega, "closed-form"), closed)


def test_closed_form_static_limit(matched_params: PhysicalParams):
    narrow = matched_params.replace(Gamma=1e-9)
    assert chi_d_closed_form(narrow, 0.0) == pytest.approx(1 / narrow.Omega, rel=1e-15)


def test_opa_responses(fig2_params: PhysicalParams, caplog):
    omega = np.geomspace(0.1, 2.0, 11) * fig2_params.Omega
    assert np.array_equal(lambda_plus(fig2_params, omega), chi_a(fig2_params, omega))
    assert np.array_equal(lambda_minus(fig2_params, omega), chi_a(fig2_params, omega))

    kappa = fig2_params.kappa
    eighth = fig2_params.replace(G_opa=kappa / 8)
    assert lambda_plus(eighth, 0.0) == pytest.approx(4 / kappa, rel=1e-15)
    assert lambda_minus(eighth, 0.0) == pytest.approx(4 / (3 * kappa), rel=1e-15)
    assert opa_is_stable(eighth)

    unstable = fig2_params.replace(G_opa=0.3 * kappa)
    with caplog.at_level(logging.WARNING, logger="cqnc.lib.response"):
        value = lambda_plus(unstable, omega)
    assert not opa_is_stable(unstable)
    assert "anti-damps" in caplog.text
    assert np.all(np.isfinite(value))


def test_pole_is_nan(fig2_params: PhysicalParams):
    threshold = fig2_params.replace(G_opa=fig2_params.kappa / 4)
    value = lambda_plus(threshold, 0.0)
    assert is_pole(value)
    assert np.isnan(value.real) and np.isnan(value.imag)

    values = lambda_plus(threshold, np.array([0.0, 1.0]))
    assert list(is_pole(values)) == [True, False]


@pytest.mark.parametrize("response", RESPONSES)
def test_reality(matched_params: PhysicalParams, response):
    rng = np.random.default_rng(11)
    omega = rng.uniform(0.0, 3.0, 1000) * matched_params.Omega
    positive = response(matched_params, omega)
    negative = response(matched_params, -omega)
    assert np.allclose(negative, np.conj(positive), rtol=1e-14, atol=0)


def test_mechanical_peak(fig2_params: PhysicalParams):
    gamma_m = fig2_params.gamma_m
    omega = np.linspace(fig2_params.Omega - 5 * gamma_m, fig2_params.Omega + 5 * gamma_m, 10001)
    step = omega[1] - omega[0]
    brightest = omega[np.argmax(np.abs(chi_m(fig2_params, omega)))]
    assert abs(brightest - mechanical_peak(fig2_params)) <= step


class TestFrequencyGrid:
    def test_spaced(self, fig2_params: PhysicalParams):
        grid = FrequencyGrid.spaced(fig2_params, 0.1, 2.0, 2000)
        assert grid.size == len(grid) == 2000
        assert grid.omega[0] == pytest.approx(0.1 * fig2_params.Omega, rel=1e-15)
        assert grid.omega[-1] == pytest.approx(2.0 * fig2_params.Omega, rel=1e-15)
        ratios = grid.omega[1:] / grid.omega[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-12)

        linear = FrequencyGrid.spaced(fig2_params, 0.0, 1.0, 5, "linear")
        assert linear.omega[0] == 0.0
        assert np.allclose(np.diff(linear.omega), fig2_params.Omega / 4)

    @pytest.mark.parametrize(
        "points", [(), (1.0, 1.0), (2.0, 1.0), (1.0, float("inf")), (float("nan"),)]
    )
    def test_invalid_points(self, points):
        with pytest.raises(ValidationError):
            FrequencyGrid(points=points)

    def test_invalid_spacing(self, fig2_params: PhysicalParams):
        with pytest.raises(ValueError):
            FrequencyGrid.spaced(fig2_params, 0.0, 1.0, 10, "log")

        with pytest.raises(ValueError):
            FrequencyGrid.spaced(fig2_params, 1.0, 1.0, 10)

        with pytest.raises(ValueError):
            FrequencyGrid.spaced(fig2_params, 0.1, 1.0, 1)
