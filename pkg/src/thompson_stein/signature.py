"""Parameter lists (n_1, ..., n_k) for the groups F(n_1, ..., n_k)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class SignatureError(ValueError):
    pass


class DivisibilityError(SignatureError):
    """Raised by operations that need (n_1 - 1) | (n_j - 1) for every j."""


@dataclass(frozen=True)
class GroupSignature:
    arities: tuple[int, ...]

    def __init__(self, arities: Iterable[int]):
        values = tuple(int(a) for a in arities)
        if not values:
            raise SignatureError("a signature needs at least one arity")
        if any(a < 2 for a in values):
            raise SignatureError(f"arities must be >= 2, got {values}")
        if len(set(values)) != len(values):
            raise SignatureError(f"duplicate arities in {values}")
        object.__setattr__(self, "arities", tuple(sorted(values)))

    @classmethod
    def parse(cls, text: str) -> "GroupSignature":
        try:
            return cls(int(part) for part in text.split(",") if part.strip())
        except ValueError as exc:
            if isinstance(exc, SignatureError):
                raise
            raise SignatureError(f"cannot parse signature {text!r}") from exc

    @property
    def k(self) -> int:
        return len(self.arities)

    @property
    def n1(self) -> int:
        return self.arities[0]

    @property
    def nk(self) -> int:
        return self.arities[-1]

    @property
    def divisible(self) -> bool:
        base = self.n1 - 1
        return all((n - 1) % base == 0 for n in self.arities)

    def arity(self, j: int) -> int:
        """Arity n_j for a 1-based family index j."""
        if not 1 <= j <= self.k:
            raise SignatureError(f"family index {j} outside 1..{self.k}")
        return self.arities[j - 1]

    def family(self, arity: int) -> int:
        """1-based family index of an arity."""
        try:
            return self.arities.index(arity) + 1
        except ValueError:
            raise SignatureError(f"arity {arity} not in {self}") from None

    def spine_units(self, j: int) -> int:
        """(n_j - 1) / (n_1 - 1): how many n_1-carets one n_j-caret replaces."""
        n = self.arity(j)
        if (n - 1) % (self.n1 - 1):
            raise DivisibilityError(
                f"(n_1 - 1) does not divide (n_{j} - 1) in {self}; "
                "presentations and normal forms need n_1 - 1 | n_j - 1"
            )
        return (n - 1) // (self.n1 - 1)

    def require_divisible(self) -> None:
        if not self.divisible:
            raise DivisibilityError(
                f"F{self} violates n_1 - 1 | n_j - 1; normal forms and "
                "presentations are only defined under that restriction"
            )

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.arities) + ")"
