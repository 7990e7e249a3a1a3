"""Exception hierarchy and the verdict type returned by law checkers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class CatTablesError(Exception):
    """Base class for every error raised by this package."""


class BoundaryMismatch(CatTablesError):
    pass


class NotNatural(CatTablesError):
    pass


class NotInfomorphism(CatTablesError):
    pass


class IllTyped(CatTablesError):
    pass


class UnknownSort(CatTablesError):
    pass


class IllegalTuple(CatTablesError):
    pass


class TooLarge(CatTablesError):
    def __init__(self, size: int, cap: int, what: str = "tuple set"):
        super().__init__(f"{what} has {size} elements, cap is {cap}")
        self.size = size
        self.cap = cap


class DomainMismatch(CatTablesError):
    pass


class SortClash(CatTablesError):
    pass


class AmbiguousEncoding(CatTablesError):
    pass


class ResolutionError(CatTablesError):
    """A referenced object or file could not be found or parsed."""


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def accept(cls, detail: str = "") -> "Verdict":
        return cls(True, None, detail)

    @classmethod
    def reject(cls, witness: Any, detail: str) -> "Verdict":
        return cls(False, witness, detail)
