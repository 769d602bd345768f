"""Classical pigment-mixing analogue: each gate averages the amounts on its support.

Amounts are exact rationals so conservation and the small-imbalance identities
hold as equalities, not approximations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arch import Architecture, ArchitectureError


@dataclass(frozen=True)
class PigmentState:
    amounts: tuple[Fraction, ...]

    def __post_init__(self):
        amounts = tuple(Fraction(a) for a in self.amounts)
        if any(a < 0 for a in amounts):
            raise ValueError("pigment amounts must be non-negative")
        object.__setattr__(self, "amounts", amounts)

    @property
    def total(self) -> Fraction:
        return sum(self.amounts, Fraction(0))

    def as_floats(self) -> list[float]:
        return [float(a) for a in self.amounts]


def mix(state: PigmentState, support: Iterable[int]) -> PigmentState:
    """Replace every amount on the support by the support average."""
    support = sorted(set(int(s) for s in support))
    if not support:
        raise ArchitectureError("empty support")
    n = len(state.amounts)
    if support[0] < 0 or support[-1] >= n:
        raise ArchitectureError(f"support {support} outside [0, {n})")
    mean = sum((state.amounts[s] for s in support), Fraction(0)) / len(support)
    amounts = list(state.amounts)
    for s in support:
        amounts[s] = mean
    return PigmentState(tuple(amounts))


def run(arch: Architecture, initial: Sequence[Fraction | int],
        periods: int | None = None) -> PigmentState:
    """Apply every gate of the architecture in order, over ``periods`` periods."""
    if len(initial) != arch.n:
        raise ArchitectureError(
            f"initial state length {len(initial)} != site count {arch.n}"
        )
    state = PigmentState(tuple(Fraction(a) for a in initial))
    for gate in arch.expanded_gates(periods):
        state = mix(state, gate.support)
    return state


def trajectory(arch: Architecture, initial: Sequence[Fraction | int],
               periods: int | None = None) -> list[PigmentState]:
    """States after each gate application, starting with the initial state."""
    if len(initial) != arch.n:
        raise ArchitectureError(
            f"initial state length {len(initial)} != site count {arch.n}"
        )
    states = [PigmentState(tuple(Fraction(a) for a in initial))]
    for gate in arch.expanded_gates(periods):
        states.append(mix(states[-1], gate.support))
    return states
