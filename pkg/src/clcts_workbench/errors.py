"""Shared exception types.

Validation problems (bad input files, schema violations, degenerate data)
raise ValidationError and map to CLI exit code 1.  Network problems raise
TransportError and map to exit code 2.  Everything else is a bug.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Input data violates a documented contract (file, line, or value named)."""


class TransportError(RuntimeError):
    """A chat-model transport failed after exhausting its retry budget."""
