from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

from fields.models import FieldElement
from fields.services import FieldTower
from services.common import ExitCode, SteinbergError

# roots are ordered index pairs (k, m), k != m, standing for e_k - e_m (0-based)
Root = tuple[int, int]


@dataclass(frozen=True)
class WeylElement:
    """A permutation w of range(n) in one-line notation, perm[j] = w(j).

    `word` is a reduced expression s_{i_1} ... s_{i_k} (1-based simple
    indices) whose product is w; two elements are equal when their
    permutations are.
    """

    perm : tuple[int, ...]
    word : tuple[int, ...] = field(compare=False)

    def __post_init__(self):
        if word_to_perm(self.word, len(self.perm)) != self.perm:
            raise SteinbergError(ExitCode.invalid_config, f"Word {self.word} does not spell {self.perm}.")
        if len(self.word) != inversions(self.perm):
            raise SteinbergError(ExitCode.invalid_config, f"Word {self.word} is not reduced.")

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def n(self) -> int:
        return len(self.perm)

    def inverse_perm(self) -> tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, wj in enumerate(self.perm):
            inv[wj] = j
        return tuple(inv)

    def apply(self, root: Root) -> Root:
        return (self.perm[root[0]], self.perm[root[1]])

    def is_identity(self) -> bool:
        return all(j == wj for j, wj in enumerate(self.perm))

    def __str__(self) -> str:
        return "e" if not self.word else "".join(f"s{i}" for i in self.word)


def word_to_perm(word: tuple[int, ...], n: int) -> tuple[int, ...]:
    perm = list(range(n))
    for i in word:
        if not 1 <= i < n:
            raise SteinbergError(ExitCode.invalid_config, f"s_{i} is not a simple reflection of SL_{n}.")
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


def inversions(perm: tuple[int, ...]) -> int:
    return sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])


def reduced_word(perm: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical reduced word: peel the leftmost right descent until e."""
    cur = list(perm)
    word: list[int] = []
    while True:
        for j in range(len(cur) - 1):
            if cur[j] > cur[j + 1]:
                cur[j], cur[j + 1] = cur[j + 1], cur[j]
                word.insert(0, j + 1)
                break
        else:
            return tuple(word)


def root_to_str(root: Root) -> str:
    return f"e{root[0] + 1}-e{root[1] + 1}"


@dataclass(frozen=True)
class RootDatum:
    """Type A_{n-1} data for SL_n together with the fixed word for w0.

    w0_word lists the simple indices of s_{α_r} ... s_{α_1} from left to
    right, so alphas (α_1, ..., α_r) is its reverse. betas[j-1] is
    β_j = s_{α_1} ... s_{α_{j-1}}(α_j).
    """

    n : int
    positive_roots : tuple[Root, ...]
    w0_word : tuple[int, ...]
    alphas : tuple[int, ...]
    betas : tuple[Root, ...]

    @property
    def r(self) -> int:
        return len(self.positive_roots)

    @classmethod
    def for_sl(cls, n: int) -> RootDatum:
        if n < 2:
            raise SteinbergError(ExitCode.invalid_config, f"SL_{n} needs n >= 2.")
        positive = tuple((k, m) for k in range(n) for m in range(k + 1, n))
        word = tuple(i for top in range(1, n) for i in range(top, 0, -1))
        alphas = tuple(reversed(word))
        betas = []
        for j, a in enumerate(alphas):
            prefix = word_to_perm(alphas[:j], n)
            betas.append((prefix[a - 1], prefix[a]))
        datum = cls(n=n, positive_roots=positive, w0_word=word, alphas=alphas, betas=tuple(betas))
        if sorted(datum.betas) != sorted(positive):
            raise SteinbergError(ExitCode.assertion_failure, "β sequence does not exhaust the positive roots.")
        return datum

    def w0(self) -> WeylElement:
        return WeylElement(perm=word_to_perm(self.w0_word, self.n), word=self.w0_word)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An n×n matrix of determinant 1 at its minimal tower level.

    Entries are field codes at `level`, row-major. Elements built through
    `GroupElement.build` are always normalized to the minimal level, so
    equality and hashing compare (n, level, codes) directly.
    """

    n : int
    level : int
    codes : tuple[int, ...]
    tower : FieldTower = field(repr=False)

    @classmethod
    def build(cls, n: int, level: int, codes, tower: FieldTower) -> GroupElement:
        target = 1
        canon = [tower.canonical(level, c) for c in codes]
        for k, _ in canon:
            target = lcm(target, k)
        if target == level:
            return cls(n, level, tuple(codes), tower)
        return cls(n, target, tuple(tower.embed_code(c, k, target) for k, c in canon), tower)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.n == other.n and self.level == other.level and self.codes == other.codes

    def __hash__(self) -> int:
        return hash((self.n, self.level, self.codes))

    def codes_at(self, b: int) -> tuple[int, ...]:
        if b == self.level:
            return self.codes
        return tuple(self.tower.embed_code(c, self.level, b) for c in self.codes)

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.level, self.codes[i * self.n + j], self.tower)

    def rows(self) -> list[list[FieldElement]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        n = self.n
        b = lcm(self.level, other.level)
        F = self.tower.level(b)
        x, y = self.codes_at(b), other.codes_at(b)
        out = []
        for i in range(n):
            row = x[i * n:(i + 1) * n]
            for j in range(n):
                acc = 0
                for k in range(n):
                    if row[k] and y[k * n + j]:
                        acc = F.add(acc, F.mul(row[k], y[k * n + j]))
                out.append(acc)
        return GroupElement.build(n, b, out, self.tower)

    def inverse(self) -> GroupElement:
        n = self.n
        F = self.tower.level(self.level)
        m = [list(self.codes[i * n:(i + 1) * n]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                raise SteinbergError(ExitCode.invalid_config, "Matrix is singular.")
            m[col], m[piv] = m[piv], m[col]
            inv = F.inv(m[col][col])
            m[col] = [F.mul(inv, v) for v in m[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    c = m[r][col]
                    m[r] = [F.sub(v, F.mul(c, w)) for v, w in zip(m[r], m[col])]
        return GroupElement.build(n, self.level, [v for row in m for v in row[n:]], self.tower)

    def det(self) -> FieldElement:
        n = self.n
        F = self.tower.level(self.level)
        m = [list(self.codes[i * n:(i + 1) * n]) for i in range(n)]
        det = 1
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                return FieldElement(self.level, 0, self.tower)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = F.neg(det)
            det = F.mul(det, m[col][col])
            inv = F.inv(m[col][col])
            for r in range(col + 1, n):
                if m[r][col]:
                    c = F.mul(m[r][col], inv)
                    m[r] = [F.sub(v, F.mul(c, w)) for v, w in zip(m[r], m[col])]
        return FieldElement(self.level, det, self.tower)

    def is_identity(self) -> bool:
        n = self.n
        return all(c == (1 if i // n == i % n else 0) for i, c in enumerate(self.codes))

    def is_upper_triangular(self) -> bool:
        n = self.n
        return all(self.codes[i * n + j] == 0 for i in range(n) for j in range(i))

    def is_unipotent_upper(self) -> bool:
        n = self.n
        return self.is_upper_triangular() and all(self.codes[i * n + i] == 1 for i in range(n))

    def is_diagonal(self) -> bool:
        n = self.n
        return all(self.codes[i * n + j] == 0 for i in range(n) for j in range(n) if i != j)

    def diagonal(self) -> list[FieldElement]:
        return [self.entry(i, i) for i in range(self.n)]

    def __str__(self) -> str:
        n = self.n
        body = ";".join(",".join(str(c) for c in self.codes[i * n:(i + 1) * n]) for i in range(n))
        return f"L{self.level}[{body}]"
