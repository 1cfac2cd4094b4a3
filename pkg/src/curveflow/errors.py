"""Error types shared across the package.

Every failure that callers may want to dispatch on carries a short
machine-readable token.  The CLI prints the token as the last line on
stderr; library users can read ``exc.token`` directly.
"""

from __future__ import annotations


class CurveFlowError(Exception):
    """Runtime failure of a flow, a profile integration, or a diagnostic."""

    def __init__(self, token: str, message: str = ""):
        self.token = token
        super().__init__(message or token)


class ConfigError(CurveFlowError):
    """Invalid configuration or input (CLI exit code 2)."""
