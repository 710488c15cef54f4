from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Generic, Hashable, Iterable, TypeVar

from fields.models import FieldElement
from fields.services import FieldTower
from group_sl.models import WeylElement
from services.common import ExitCode, SteinbergError


@dataclass(frozen=True)
class CosetLabel:
    """Canonical name of a coset gB: its cell w and the l(w) left-factor coordinates.

    Coordinates are codes at `level`, the least level holding all of them,
    taken along the positive roots sent negative by w^{-1} in the fixed
    root order.
    """

    cell : WeylElement
    level : int
    codes : tuple[int, ...]

    @classmethod
    def build(cls, cell: WeylElement, level: int, codes, tower: FieldTower) -> CosetLabel:
        canon = [tower.canonical(level, c) for c in codes]
        target = 1
        for k, _ in canon:
            target = lcm(target, k)
        return cls(cell, target, tuple(tower.embed_code(c, k, target) for k, c in canon))

    def sort_key(self) -> tuple:
        return (self.cell.length, self.cell.perm, self.level, self.codes)

    def __str__(self) -> str:
        perm = ".".join(str(j) for j in self.cell.perm)
        return f"{perm}/{self.level}/{','.join(str(c) for c in self.codes)}"


K = TypeVar("K", bound=Hashable)


class SparseVector(Generic[K]):
    """Finite sums Σ c_key · key over GF(ell), zero coefficients never stored."""

    __slots__ = ("ell", "terms")

    def __init__(self, ell: int, terms: dict[K, int] | Iterable[tuple[K, int]] = ()):
        self.ell = ell
        self.terms: dict[K, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for key, c in items:
            c = (self.terms.get(key, 0) + c) % ell
            if c:
                self.terms[key] = c
            else:
                self.terms.pop(key, None)

    def _like(self, terms) -> SparseVector[K]:
        return type(self)(self.ell, terms)

    def _check(self, other: SparseVector[K]):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ell != self.ell:
            raise SteinbergError(ExitCode.invalid_config, f"Coefficient fields GF({self.ell}) and GF({other.ell}) differ.")

    def __add__(self, other):
        self._check(other)
        return self._like(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        self._check(other)
        return self._like(list(self.terms.items()) + [(k, -c) for k, c in other.terms.items()])

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def scale(self, c: int):
        return self._like({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.ell == other.ell and self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, key: K) -> int:
        return self.terms.get(key, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def sort_key(self, key: K):
        raise NotImplementedError

    def items(self) -> list[tuple[K, int]]:
        return sorted(self.terms.items(), key=lambda kv: self.sort_key(kv[0]))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*[{k}]" for k, c in self.items())
        return f"{type(self).__name__}(GF({self.ell}): {body or '0'})"


class MVector(SparseVector[CosetLabel]):
    """An element of M(tr) in the coset basis."""

    __slots__ = ()

    def sort_key(self, key: CosetLabel):
        return key.sort_key()


Coords = tuple[FieldElement, ...]


class StVector(SparseVector[Coords]):
    """Σ c_z · zη keyed by the root coordinates (c_r, ..., c_1) of z."""

    __slots__ = ()

    def sort_key(self, key: Coords):
        return tuple(c.sort_key() for c in key)
