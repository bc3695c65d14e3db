# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

# CODATA 2018 exact/defined values
HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J / K

TWO_PI = 6.283185307179586

# relative tolerance used when two user supplied derived values must agree
CONSISTENCY_RTOL = 1e-12

# Ω/Γ below this is not "well separated" for the CQNC matching conditions
MATCHING_SEPARATION = 100.0
