from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

SCHEMA = "tarskikit/1"

DEFAULT_MAX_WORDS = 5_000_000
MAX_WORDS_ENV = "TARSKIKIT_MAX_WORDS"


def resource_cap() -> int:
    """Largest word/point enumeration allowed; overridable through the environment."""
    raw = os.environ.get(MAX_WORDS_ENV)
    if raw is None:
        return DEFAULT_MAX_WORDS
    try:
        cap = int(raw)
    except ValueError:
        raise ResourceLimitError(f"{MAX_WORDS_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ResourceLimitError(f"{MAX_WORDS_ENV} must be positive")
    return cap


class TarskiError(Exception):
    pass


class ResourceLimitError(TarskiError):
    pass


class PreconditionError(TarskiError, ValueError):
    """An operation was called outside its contract; ``witness`` names the offender."""

    def __init__(self, message: str, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


class VerificationError(TarskiError):
    def __init__(self, report: VerificationReport) -> None:
        super().__init__(f"{report.name}: {report.reason} (witness {report.witness!r})")
        self.report = report


@dataclass
class VerificationReport:
    name: str
    passed: bool
    depth: int | None = None
    counts: dict[str, Any] = field(default_factory=dict)
    reason: str | None = None
    witness: Any = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "pass": self.passed, "depth": self.depth}
        if self.counts:
            out["counts"] = self.counts
        if self.reason is not None:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def raise_if_failed(self) -> VerificationReport:
        if not self.passed:
            raise VerificationError(self)
        return self
