from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Params:
    """The pair (k, l) selecting a member of the family.

    The substitution length ``L = k + l`` is derived, never stored.
    """

    k: int
    l: int

    def __post_init__(self):
        for name in ("k", "l"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an int, got {type(value).__name__}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @property
    def L(self) -> int:
        return self.k + self.l

    def swapped(self) -> Params:
        return Params(self.l, self.k)

    def __str__(self):
        return f"({self.k},{self.l})"


def as_params(p) -> Params:
    """Accept a Params or a (k, l) pair."""
    if isinstance(p, Params):
        return p
    k, l = p
    return Params(int(k), int(l))
