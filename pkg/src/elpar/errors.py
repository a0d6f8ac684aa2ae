"""Exception types shared across the engine.

Everything raised on purpose derives from EngineError so callers (CLI,
service) can map failures to exit codes / HTTP statuses in one place.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all deliberate failures."""


class DomainError(EngineError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class OraclePrecisionError(EngineError):
    """A reference computation could not reach its guaranteed precision."""


class DataError(EngineError):
    """A data file is malformed. Carries file/row context in the message."""


class MappingError(EngineError):
    """A position token has no line mapping."""


class MissingPlayerError(EngineError):
    """A lineup references a player with no rating snapshot."""


class InsufficientDataError(EngineError):
    """Not enough observations to support the requested statistic."""


class CollinearityError(EngineError):
    """The design matrix is numerically rank deficient."""


class DegenerateDataError(EngineError):
    """The likelihood has no interior maximum (e.g. all outcomes identical)."""


class IllConditionedFitError(EngineError):
    """The observed information matrix cannot be inverted."""


class NotConvergedError(EngineError):
    """A downstream operation requires a converged model."""


class ReplacementLevelPlayerError(EngineError, ValueError):
    """Cost per point is undefined at or below replacement level."""


class DegenerateRedistributionError(EngineError):
    """No player in the squad has positive value to anchor shares on."""


class DegenerateRegressionError(EngineError):
    """Budget regression input has zero variance."""


class InfeasibleBudgetError(EngineError):
    """No allocation under the budget fills every requested slot."""
