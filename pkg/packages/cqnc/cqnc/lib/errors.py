# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT


class CqncError(Exception):
    """Base class for every error raised by the toolkit"""


class ParameterError(CqncError, ValueError):
    """A parameter is outside the domain of the requested operation"""


class NormalizationError(ParameterError):
    """The force estimator normalization is zero so no force can be inferred"""


class ConfigError(CqncError):
    """A run configuration could not be read or is invalid"""
