# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import math

from cqnc.lib.optimize import golden_section_minimize
import pytest


def test_parabola():
    # a smooth minimum is only resolved to about sqrt(eps), whatever the bracket width
    result = golden_section_minimize(lambda x: (x - 1.25) ** 2 + 3, -10, 10, tol=1e-9)
    assert result.x == pytest.approx(1.25, abs=1e-7)
    assert result.value == pytest.approx(3)


def test_kink_is_located_to_bracket_width():
    result = golden_section_minimize(lambda x: abs(x - 1.25), -10, 10, tol=1e-9)
    assert result.x == pytest.approx(1.25, abs=2e-9)


def test_reversed_bracket():
    result = golden_section_minimize(lambda x: math.cosh(x - 2), 5, -5, tol=1e-9)
    assert result.x == pytest.approx(2, abs=1e-7)


def test_balance_of_inverse_and_linear_terms():
    """a/u + b u has its minimum 2√(ab) at u = √(a/b)"""
    a, b = 3.0, 12.0
    result = golden_section_minimize(
        lambda t: a * math.exp(-t) + b * math.exp(t), -20, 20, tol=1e-12
    )
    assert math.exp(result.x) == pytest.approx(0.5, rel=1e-6)
    assert result.value == pytest.approx(12.0, rel=1e-12)


def test_degenerate_bracket():
    result = golden_section_minimize(lambda x: x**2, 1.0, 1.0)
    assert result.x == 1.0
    assert result.evaluations == 1
