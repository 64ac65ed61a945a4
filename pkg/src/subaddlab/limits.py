"""Resource ceilings, overridable through environment variables.

Exact rational arithmetic is used whenever the largest index involved stays
at or below ``exact_limit``; beyond that the log-domain / float backends take
over.  ``max_j`` caps the length of any weight row the package will build.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ResourceLimitError

_ENV_MAX_J = "SUBADDLAB_MAX_J"
_ENV_EXACT = "SUBADDLAB_EXACT_LIMIT"


@dataclass(frozen=True)
class Limits:
    max_j: int = 2_000_000
    exact_limit: int = 2_000


def _read_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def current_limits() -> Limits:
    """Ceilings in effect for this process (environment wins over defaults)."""
    return Limits(
        max_j=_read_int(_ENV_MAX_J, Limits.max_j),
        exact_limit=_read_int(_ENV_EXACT, Limits.exact_limit),
    )


def check_row_length(requested: int) -> None:
    lim = current_limits()
    if requested > lim.max_j:
        raise ResourceLimitError(
            f"row length {requested} exceeds the ceiling {lim.max_j} "
            f"(raise {_ENV_MAX_J} to allow it)"
        )
