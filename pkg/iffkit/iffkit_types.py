from __future__ import annotations

from dataclasses import dataclass, field
import sys

if sys.version_info >= (3, 11):
    from enum import StrEnum
    from typing import Self
else:  # pragma: no cover
    from enum import Enum

    from typing_extensions import Self

    class StrEnum(str, Enum):
        """Python 3.10 stand-in for enum.StrEnum."""

        __str__ = str.__str__
        __format__ = str.__format__


class IffError(Exception):
    """Root of every error iffkit raises on bad input."""


@dataclass(eq=True, frozen=True)
class SourceSpan:
    file: str
    line: int       # 1-based
    column: int     # 1-based
    length: int

    def __post_init__(self: Self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}")

    def __str__(self: Self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(eq=True, frozen=True)
class Violation:
    law: str
    detail: str

    def __str__(self: Self) -> str:
        return f"{self.law}: {self.detail}"


@dataclass
class LawReport:
    """Violations found by an exhaustive (or sampled) law check; empty means lawful."""
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    def add(self: Self, law: str, detail: str) -> None:
        self.violations.append(Violation(law, detail))

    @property
    def lawful(self: Self) -> bool:
        return not self.violations

    def laws_violated(self: Self) -> set[str]:
        return {v.law for v in self.violations}

    def __bool__(self: Self) -> bool:
        return self.lawful
