"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """A configuration document failed to parse or violated an invariant.

    ``field`` is the dotted path of the offending key when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.message = message
        self.field = field


class ModelError(ValueError):
    """An operation was called outside the domain its model is valid for."""


class InfeasibleError(Exception):
    """No configuration satisfies the area/power/channel budgets.

    ``constraint`` names the budget that ruled the design out, when a single
    one can be identified.
    """

    def __init__(self, message: str, constraint: str | None = None):
        super().__init__(message)
        self.constraint = constraint
