from __future__ import annotations

from dataclasses import dataclass, field

from group_sl.models import GroupElement
from module_mtr.models import MVector, StVector


@dataclass(frozen=True)
class Step:
    """One group-algebra multiplier Σ c_g · g, applied to the running vector."""

    name : str
    terms : tuple[tuple[GroupElement, int], ...]

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[GroupElement, int]]:
        return sorted(self.terms, key=lambda gc: (gc[0].level, gc[0].codes))


@dataclass
class Certificate:
    n : int
    p : int
    d : int
    a : int
    ell : int
    w0_word : tuple[int, ...]
    vector : StVector
    steps : list[Step] = field(default_factory=list)
    claimed_scalar : int = 1
    max_level : int = 1
    matrix_level : int = 1
    level_chain : tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return self.p ** self.d

    def size(self) -> int:
        return sum(len(step) for step in self.steps)

    def levels_used(self) -> list[int]:
        """Every field level whose codes appear in the certificate text."""
        levels = {1, *self.level_chain, self.max_level, self.matrix_level}
        levels |= {c.canonical()[0] for key in self.vector.terms for c in key}
        levels |= {g.level for step in self.steps for g, _ in step.terms}
        return sorted(levels)


@dataclass
class LadderState:
    """Σ_{x ∈ X_{i,q^b}} xη held exactly (scalar 1) at root index i and level b."""

    i : int
    b : int
    vector : MVector


@dataclass
class LiftResult:
    vector : MVector
    scalar : int
    steps : list[Step]


@dataclass
class StageResult:
    state : LadderState | None
    scalar : int
    steps : list[Step]
