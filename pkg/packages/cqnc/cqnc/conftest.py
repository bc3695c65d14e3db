# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import pytest

from cqnc.lib.params import PhysicalParams, apply_cqnc_matching, make_fig2_params
from cqnc.lib.response import FrequencyGrid

# evaluated independently in extended precision
FIG2_G = 3.3335161560768068e8
CHI_M_200KHZ = complex(9.5492964480038485e-07, -1.1459155737604617e-10)
STANDARD_OPTIMUM_POWER = 1.884086655900012e-10


@pytest.fixture
def fig2_params() -> PhysicalParams:
    return make_fig2_params()


@pytest.fixture
def matched_params(fig2_params: PhysicalParams) -> PhysicalParams:
    return apply_cqnc_matching(fig2_params)


@pytest.fixture
def coarse_grid(fig2_params: PhysicalParams) -> FrequencyGrid:
    return FrequencyGrid.spaced(fig2_params, 0.1, 2.0, 200, "log")


@pytest.fixture
def fig2_grid(fig2_params: PhysicalParams) -> FrequencyGrid:
    return FrequencyGrid.spaced(fig2_params, 0.1, 2.0, 2000, "log")
