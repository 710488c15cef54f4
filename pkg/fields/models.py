from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from services.common import ExitCode, SteinbergError, is_prime

if TYPE_CHECKING:
    from .services import FieldTower


@dataclass(eq=False)
class FieldLevel:
    """Lookup tables for one finite field F_{p^degree} of the tower.

    Elements are integer codes: the base-p digits of a code are the
    coordinates in the polynomial basis 1, x, ..., x^(degree-1), so code 0 is
    zero and code 1 is one. Products go through discrete logs and sums
    through Zech logarithms, so every operation is a couple of list lookups.
    """

    p : int
    degree : int
    level : int
    polynomial : tuple[int, ...]
    exp : list[int]
    log : list[int]
    zech : list[int]

    @property
    def size(self) -> int:
        return self.p ** self.degree

    @property
    def order(self) -> int:
        return self.size - 1

    @property
    def minus_one_log(self) -> int:
        return self.order // 2 if self.p != 2 else 0

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la = self.log[a]
        z = self.zech[(self.log[b] - la) % self.order]
        if z < 0:
            return 0
        return self.exp[(la + z) % self.order]

    def neg(self, a: int) -> int:
        if a == 0 or self.p == 2:
            return a
        return self.exp[(self.log[a] + self.minus_one_log) % self.order]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % self.order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise SteinbergError(ExitCode.invalid_config, "Division by zero in the field tower.")
        return self.exp[(-self.log[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise SteinbergError(ExitCode.invalid_config, "Zero has no negative powers.")
            return 1 if e == 0 else 0
        return self.exp[(self.log[a] * e) % self.order]

    def from_int(self, k: int) -> int:
        return k % self.p

    def coords(self, code: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.degree):
            code, r = divmod(code, self.p)
            digits.append(r)
        return tuple(digits)


@dataclass(frozen=True, eq=False)
class FieldElement:
    level : int
    code : int
    tower : FieldTower = field(repr=False)

    @property
    def coords(self) -> tuple[int, ...]:
        return self.tower.level(self.level).coords(self.code)

    def is_zero(self) -> bool:
        return self.code == 0

    def canonical(self) -> tuple[int, int]:
        return self.tower.canonical(self.level, self.code)

    def _common(self, other: FieldElement) -> tuple[int, int, int]:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine a field element with {type(other).__name__}")
        a = self.tower.join_levels(self.level, other.level)
        return (
            a,
            self.tower.embed_code(self.code, self.level, a),
            self.tower.embed_code(other.code, other.level, a),
        )

    def __add__(self, other: FieldElement) -> FieldElement:
        a, x, y = self._common(other)
        return FieldElement(a, self.tower.level(a).add(x, y), self.tower)

    def __sub__(self, other: FieldElement) -> FieldElement:
        a, x, y = self._common(other)
        return FieldElement(a, self.tower.level(a).sub(x, y), self.tower)

    def __mul__(self, other: FieldElement) -> FieldElement:
        a, x, y = self._common(other)
        return FieldElement(a, self.tower.level(a).mul(x, y), self.tower)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        a, x, y = self._common(other)
        return FieldElement(a, self.tower.level(a).div(x, y), self.tower)

    def __neg__(self) -> FieldElement:
        return FieldElement(self.level, self.tower.level(self.level).neg(self.code), self.tower)

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.level, self.tower.level(self.level).pow(self.code, e), self.tower)

    def inverse(self) -> FieldElement:
        return FieldElement(self.level, self.tower.level(self.level).inv(self.code), self.tower)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.tower is other.tower and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def sort_key(self) -> tuple[int, int]:
        return self.canonical()

    def __str__(self) -> str:
        a, code = self.canonical()
        return f"{a}:{code}"


@dataclass(frozen=True)
class CoeffField:
    """The coefficient field k = GF(ell); scalars are plain ints in 0..ell-1."""

    ell : int

    def __post_init__(self):
        if not is_prime(self.ell):
            raise SteinbergError(ExitCode.invalid_config, f"ell = {self.ell} is not prime.")

    def reduce(self, x: int) -> int:
        return x % self.ell

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.ell

    def sub(self, x: int, y: int) -> int:
        return (x - y) % self.ell

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.ell

    def neg(self, x: int) -> int:
        return (-x) % self.ell

    def inv(self, x: int) -> int:
        if x % self.ell == 0:
            raise SteinbergError(ExitCode.assertion_failure, f"Cannot invert 0 in GF({self.ell}).")
        return pow(x, -1, self.ell)

    def pow(self, x: int, e: int) -> int:
        return pow(x % self.ell, e, self.ell)

    def sign(self, k: int) -> int:
        return (-1) ** (k % 2) % self.ell
