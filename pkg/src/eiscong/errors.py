"""Exception hierarchy and resource budgets shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


class EiscongError(Exception):
    """Base class for library errors."""


class InputError(EiscongError, ValueError):
    """Malformed or inconsistent input data."""


class PreconditionError(InputError):
    """An operation's documented precondition does not hold."""


class UnsupportedCase(InputError):
    """A case the library refuses to guess at (ramified k(sigma), for instance)."""


class ConsistencyError(EiscongError):
    """An internal exactness assertion failed; signals a bug, not bad data."""


class DepthInsufficient(EiscongError):
    """A series quotient did not stabilize within the requested depth."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ResourceError(EiscongError):
    """A brute-force enumeration would exceed the configured budget."""

    def __init__(self, message: str, estimate: int):
        super().__init__(f"{message} (estimated size {estimate})")
        self.estimate = estimate


ENV_VAR = "EISCONG_BUDGET"


@dataclass(frozen=True)
class Budget:
    """Caps on brute-force work.

    ``max_cosets`` bounds coset enumerations, ``max_degree`` the X-degree of
    shell sums, ``max_height`` q-expansion height bounds.  The size caps
    ``max_n``/``max_depth``/``max_p`` mirror the desk-scale feasibility box.
    """

    max_cosets: int = 2_000_000
    max_degree: int = 8
    max_height: int = 12
    max_n: int = 2
    max_depth: int = 3
    max_p: int = 5
    max_cells: int = 400_000

    def with_overrides(self, text: str | None) -> "Budget":
        if not text:
            return self
        changes = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, val = part.partition("=")
            key = key.strip().replace("-", "_")
            if not key.startswith("max_"):
                key = "max_" + key
            if key not in self.__dataclass_fields__:
                raise InputError(f"unknown budget key {key!r}")
            n = int(val)
            if n <= 0:
                raise InputError("budgets must be positive")
            changes[key] = n
        return replace(self, **changes)


def default_budget() -> Budget:
    """Budget from defaults plus the ``EISCONG_BUDGET`` environment variable.

    The variable holds comma separated ``key=value`` pairs, for example
    ``EISCONG_BUDGET="cosets=100000,degree=4"``.
    """
    return Budget().with_overrides(os.environ.get(ENV_VAR))
