# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

from cqnc.lib.checks import all_passed, run_checks
from cqnc.lib.oracle import ModelMode
from cqnc.lib.params import PhysicalParams
from cqnc.lib.response import FrequencyGrid


def test_matched_configuration_passes(matched_params: PhysicalParams, coarse_grid: FrequencyGrid):
    results = run_checks(matched_params, coarse_grid)
    failed = [r.name for r in results if not r.passed]
    assert failed == []
    assert all_passed(results)

    names = {r.name for r in results}
    assert {
        "oracle_equivalence",
        "backaction_suppression",
        "cancellation_residual_off_resonance",
        "cancellation_residual_grid",
        "standard_numeric_minimum",
        "bare_oracle_equivalence",
        "floor_at_resonance",
        "companion_root_residual",
    } <= names

    informational = {r.name for r in results if r.informational}
    assert "sql_claim_over_numeric_minimum" in informational
    assert all(r.tolerance is None for r in results if r.informational)


def test_unmatched_configuration_fails(fig2_params: PhysicalParams, coarse_grid: FrequencyGrid):
    results = run_checks(fig2_params, coarse_grid)
    assert not all_passed(results)
    failed = {r.name for r in results if not r.passed}
    assert "matching_conditions" in failed
    assert "cancellation_residual_off_resonance" in failed
    assert "oracle_equivalence" not in failed


def test_literal_wiring_loses_cancellation(
    matched_params: PhysicalParams, coarse_grid: FrequencyGrid
):
    results = {r.name: r for r in run_checks(matched_params, coarse_grid, mode=ModelMode.LITERAL)}
    assert not results["backaction_suppression"].passed
    assert results["oracle_equivalence"].note.startswith("literal ")
    assert results["matching_conditions"].passed
