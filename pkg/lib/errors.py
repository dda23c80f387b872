# SPDX-License-Identifier: MIT-0


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(ToolkitError, ValueError):
    """Shapes or subsystem dimensions do not fit together."""


class ParameterError(ToolkitError, ValueError):
    """A parameter lies outside the domain of an operation."""


class NotCompletelyPositiveError(ParameterError):
    """An operation that needs a CP map received one with a negative Choi eigenvalue."""


class ConfigurationError(ToolkitError):
    """Invalid profile or environment configuration."""


class NumericalError(ToolkitError, ArithmeticError):
    """An internal consistency check between two numerical routes failed."""
