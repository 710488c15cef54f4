from __future__ import annotations

import itertools
import logging
import random
from functools import lru_cache

from fields.models import FieldElement
from fields.services import FieldTower, get_tower
from services.common import ExitCode, SteinbergError

from .models import GroupElement, Root, RootDatum, WeylElement, reduced_word, word_to_perm
from .schemas import BruhatFailureSchema, BruhatReport, describe_element

logger = logging.getLogger(__name__)


class SLGroup:
    """SL_n over the tower: root subgroups, Weyl representatives, Bruhat data.

    Matrices are GroupElements normalized to their minimal level; all
    enumerations are deterministic and cached per (index, level).
    """

    def __init__(self, n: int, tower: FieldTower):
        self.n = n
        self.tower = tower
        self.datum = RootDatum.for_sl(n)
        self._identity = GroupElement(n, 1, tuple(1 if i // n == i % n else 0 for i in range(n * n)), tower)
        self._simple = {i: self._simple_rep(i) for i in range(1, n)}
        self._weyl_reps: dict[tuple[int, ...], GroupElement] = {}
        self._u_coords: dict[GroupElement, tuple[FieldElement, ...]] = {}
        # m_j = n_{α_1} ... n_{α_{j-1}}, used to peel root coordinates
        self._peel = []
        m = self._identity
        for a in self.datum.alphas:
            self._peel.append((m, m.inverse(), (a - 1, a)))
            m = m * self._simple[a]
        self.enumerate_X = lru_cache(maxsize=None)(self._enumerate_X)

    def __repr__(self):
        return f"SLGroup(n={self.n}, q={self.tower.q})"

    @property
    def r(self) -> int:
        return self.datum.r

    # basic matrices

    def identity(self) -> GroupElement:
        return self._identity

    def from_codes(self, level: int, codes) -> GroupElement:
        return GroupElement.build(self.n, level, codes, self.tower)

    def from_rows(self, rows: list[list[FieldElement]]) -> GroupElement:
        n = self.n
        if len(rows) != n or any(len(row) != n for row in rows):
            raise SteinbergError(ExitCode.invalid_config, f"Expected a {n}x{n} matrix.")
        level = 1
        for row in rows:
            for x in row:
                level = self.tower.join_levels(level, x.level)
        codes = [self.tower.embed_code(x.code, x.level, level) for row in rows for x in row]
        g = self.from_codes(level, codes)
        if g.det() != self.tower.one():
            raise SteinbergError(ExitCode.invalid_config, "Matrix does not have determinant 1.")
        return g

    def diagonal(self, entries: list[FieldElement]) -> GroupElement:
        n = self.n
        if len(entries) != n:
            raise SteinbergError(ExitCode.invalid_config, f"Expected {n} diagonal entries.")
        zero = self.tower.zero()
        return self.from_rows([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    def _check_root(self, root: Root):
        k, m = root
        if k == m or not (0 <= k < self.n and 0 <= m < self.n):
            raise SteinbergError(ExitCode.invalid_config, f"({k}, {m}) is not a root of SL_{self.n}.")

    def eps(self, root: Root, c: FieldElement) -> GroupElement:
        self._check_root(root)
        n = self.n
        codes = [1 if i // n == i % n else 0 for i in range(n * n)]
        codes[root[0] * n + root[1]] = c.code
        return self.from_codes(c.level, codes)

    # Weyl group

    def _simple_rep(self, i: int) -> GroupElement:
        n = self.n
        codes = [1 if a // n == a % n else 0 for a in range(n * n)]
        lv = self.tower.level(1)
        k = i - 1
        codes[k * n + k] = 0
        codes[(k + 1) * n + k + 1] = 0
        codes[k * n + k + 1] = 1
        codes[(k + 1) * n + k] = lv.neg(1)
        return GroupElement(n, 1, tuple(codes), self.tower)

    def weyl_element(self, perm: tuple[int, ...]) -> WeylElement:
        return WeylElement(perm=tuple(perm), word=reduced_word(tuple(perm)))

    def weyl_from_word(self, word: tuple[int, ...]) -> WeylElement:
        return WeylElement(perm=word_to_perm(tuple(word), self.n), word=tuple(word))

    def w0(self) -> WeylElement:
        return self.datum.w0()

    def weyl_elements(self) -> list[WeylElement]:
        elements = [self.weyl_element(p) for p in itertools.permutations(range(self.n))]
        return sorted(elements, key=lambda w: (w.length, w.perm))

    def weyl_rep(self, w: WeylElement | tuple[int, ...]) -> GroupElement:
        word = w.word if isinstance(w, WeylElement) else tuple(w)
        found = self._weyl_reps.get(word)
        if found is None:
            found = self._identity
            for i in word:
                if i not in self._simple:
                    raise SteinbergError(ExitCode.invalid_config, f"s_{i} is not a simple reflection of SL_{self.n}.")
                found = found * self._simple[i]
            self._weyl_reps[word] = found
        return found

    def longest_rep(self) -> GroupElement:
        return self.weyl_rep(self.datum.w0_word)

    # torus

    def root_value(self, root: Root, t: GroupElement) -> FieldElement:
        self._check_root(root)
        if not t.is_diagonal():
            raise SteinbergError(ExitCode.invalid_config, "Root values are defined for diagonal elements only.")
        return t.entry(root[0], root[0]) / t.entry(root[1], root[1])

    def torus_for_root_value(self, root: Root, c: FieldElement) -> GroupElement:
        self._check_root(root)
        if c.is_zero():
            raise SteinbergError(ExitCode.invalid_config, "A root value must be nonzero.")
        k, m = root
        one = self.tower.one()
        entries = [one] * self.n
        if self.n == 2:
            d = self.tower.sqrt(c)
            entries[k], entries[m] = d, d.inverse()
        else:
            j = min(set(range(self.n)) - {k, m})
            entries[k], entries[j] = c, c.inverse()
        return self.diagonal(entries)

    def torus_elements(self, a: int) -> list[GroupElement]:
        units = [x for x in self.tower.enumerate_level(a) if not x.is_zero()]
        out = []
        for head in itertools.product(units, repeat=self.n - 1):
            last = self.tower.one(a)
            for x in head:
                last = last * x
            out.append(self.diagonal(list(head) + [last.inverse()]))
        return out

    # Bruhat decomposition

    def column_reduce(self, g: GroupElement) -> tuple[tuple[int, ...], list[list[int]]]:
        """Reduce the columns of g from the right by an upper triangular matrix.

        Column j is cleared at the pivot rows of earlier columns and scaled so
        its lowest remaining nonzero entry is 1. Returns the pivot permutation
        (perm[j] is the pivot row of column j) and the reduced columns as codes
        at g's level; the reduced matrix is u'·P_w.
        """
        n = self.n
        F = self.tower.level(g.level)
        codes = g.codes
        perm = []
        cols: list[list[int]] = []
        used = [False] * n
        for j in range(n):
            col = [codes[i * n + j] for i in range(n)]
            for prev, pr in zip(cols, perm):
                c = col[pr]
                if c:
                    col = [F.sub(x, F.mul(c, y)) if y else x for x, y in zip(col, prev)]
            pivot = next((i for i in range(n - 1, -1, -1) if not used[i] and col[i]), None)
            if pivot is None:
                raise SteinbergError(ExitCode.invalid_config, "Matrix is singular.")
            inv = F.inv(col[pivot])
            cols.append([F.mul(inv, x) for x in col])
            used[pivot] = True
            perm.append(pivot)
        return tuple(perm), cols

    def left_roots(self, w: WeylElement) -> list[Root]:
        """Positive roots β with w^{-1}(β) negative, in the fixed order."""
        inv = w.inverse_perm()
        return [(k, m) for k, m in self.datum.positive_roots if inv[k] > inv[m]]

    def left_factor(self, w: WeylElement, level: int, codes) -> GroupElement:
        n = self.n
        out = [1 if i // n == i % n else 0 for i in range(n * n)]
        for (k, m), c in zip(self.left_roots(w), codes):
            out[k * n + m] = c
        return self.from_codes(level, out)

    def bruhat_decompose(self, g: GroupElement) -> tuple[GroupElement, WeylElement, GroupElement, GroupElement]:
        if g.det() != self.tower.one():
            raise SteinbergError(ExitCode.invalid_config, "Bruhat decomposition needs determinant 1.")
        perm, cols = self.column_reduce(g)
        w = self.weyl_element(perm)
        inv = w.inverse_perm()
        left = self.left_factor(w, g.level, [cols[inv[m]][k] for k, m in self.left_roots(w)])
        b = self.weyl_rep(w).inverse() * left.inverse() * g
        if not b.is_upper_triangular():
            raise SteinbergError(ExitCode.assertion_failure, f"Bruhat remainder for {g} is not in B.")
        t = self.diagonal(b.diagonal())
        u = t.inverse() * b
        return left, w, t, u

    # unipotent radical

    def u_element(self, coords) -> GroupElement:
        """ε(β_r, c_r) ⋯ ε(β_i, c_i) for coords = (c_r, ..., c_i)."""
        r = self.r
        if not 1 <= len(coords) <= r:
            raise SteinbergError(ExitCode.invalid_config, f"Expected between 1 and {r} root coordinates.")
        out = self._identity
        for offset, c in enumerate(coords):
            if not c.is_zero():
                out = out * self.eps(self.datum.betas[r - 1 - offset], c)
        return out

    def u_coordinates(self, z: GroupElement) -> tuple[FieldElement, ...]:
        found = self._u_coords.get(z)
        if found is not None:
            return found
        if not z.is_unipotent_upper():
            raise SteinbergError(ExitCode.invalid_config, f"{z} is not in U.")
        coords = []
        cur = z
        for (m, m_inv, (k, k1)), beta in zip(self._peel, self.datum.betas):
            y = m_inv * cur * m
            c = y.entry(k, k1)
            factor_ = m * self.eps((k, k1), c) * m_inv
            coords.append(factor_.entry(*beta))
            cur = cur * factor_.inverse()
        if not cur.is_identity():
            raise SteinbergError(ExitCode.assertion_failure, f"Root coordinates of {z} do not peel to e.")
        found = tuple(self.tower.normalize(c) for c in reversed(coords))
        self._u_coords[z] = found
        return found

    def _check_index(self, i: int):
        if not 1 <= i <= self.r:
            raise SteinbergError(ExitCode.invalid_config, f"Root index {i} is outside 1..{self.r}.")

    def x_coords(self, i: int, b: int) -> list[tuple[FieldElement, ...]]:
        self._check_index(i)
        elements = self.tower.enumerate_level(b)
        return [tuple(c) for c in itertools.product(elements, repeat=self.r - i + 1)]

    def _enumerate_X(self, i: int, b: int) -> tuple[GroupElement, ...]:
        out = tuple(self.u_element(c) for c in self.x_coords(i, b))
        logger.debug("enumerated X_%d at level %d: %d elements", i, b, len(out))
        return out

    def enumerate_U(self, a: int) -> tuple[GroupElement, ...]:
        return self.enumerate_X(1, a)

    def root_subgroup(self, i: int, b: int) -> list[GroupElement]:
        self._check_index(i)
        return [self.eps(self.datum.betas[i - 1], c) for c in self.tower.enumerate_level(b)]

    # whole group

    def group_order(self, a: int) -> int:
        Q = self.tower.q ** a
        order = Q ** self.r
        for m in range(2, self.n + 1):
            order *= Q ** m - 1
        return order

    def enumerate_group(self, a: int):
        """Yield (g, (u', w, t, u)) for every g in SL_n(F_{q^a}), cell by cell."""
        elements = self.tower.enumerate_level(a)
        tori = self.torus_elements(a)
        U = self.enumerate_U(a)
        for w in self.weyl_elements():
            nw = self.weyl_rep(w)
            for coords in itertools.product(elements, repeat=w.length):
                left = self.left_factor(w, a, [c.code for c in coords])
                head = left * nw
                for t in tori:
                    ht = head * t
                    for u in U:
                        yield ht * u, (left, w, t, u)

    def random_element(self, a: int, rng: random.Random) -> tuple[GroupElement, tuple]:
        size = self.tower.size(a)
        w = rng.choice(self.weyl_elements())
        left = self.left_factor(w, a, [rng.randrange(size) for _ in range(w.length)])
        head = [self.tower.element(a, rng.randrange(1, size)) for _ in range(self.n - 1)]
        last = self.tower.one(a)
        for x in head:
            last = last * x
        t = self.diagonal(head + [last.inverse()])
        u = self.u_element(tuple(self.tower.element(a, rng.randrange(size)) for _ in range(self.r)))
        return left * self.weyl_rep(w) * t * u, (left, w, t, u)

    def generators(self, a: int) -> list[GroupElement]:
        basis = [self.tower.element(a, self.tower.p ** i) for i in range(self.tower.d * a)]
        out = []
        for k, m in self.datum.positive_roots:
            for root in ((k, m), (m, k)):
                out.extend(self.eps(root, x) for x in basis)
        return out


@lru_cache(maxsize=16)
def make_group(n: int, p: int, d: int = 1) -> SLGroup:
    return SLGroup(n, get_tower(p, d))


def check_bruhat(group: SLGroup, a: int, limit: int, sample: int | None = None, seed: int = 0) -> BruhatReport:
    """Decompose every element of SL_n(F_{q^a}) (or a seeded sample) and recompose it.

    Elements come from their cell parameters, so a decomposition that does
    not return those same parameters breaks uniqueness.
    """
    order = group.group_order(a)
    expected_cosets = sum(group.tower.size(a) ** w.length for w in group.weyl_elements())
    failures: list[BruhatFailureSchema] = []

    def check(g, parts, x, y):
        left, w, t, u = group.bruhat_decompose(g)
        if left * group.weyl_rep(w) * t * u != g:
            reason = "recomposition differs"
        elif (left, w, t, u) != parts:
            reason = "decomposition is not the generating one"
        elif group.column_reduce(x * g * y)[0] != w.perm:
            reason = "cell changes under U-translation"
        else:
            return w.perm, left
        if len(failures) < 20:
            failures.append(BruhatFailureSchema(element=describe_element(g), reason=reason))
        return None

    if order > limit and not sample:
        raise SteinbergError(
            ExitCode.invalid_config,
            f"|SL_{group.n}(F_{group.tower.size(a)})| = {order} exceeds {limit}; rerun with --sample N.",
        )
    U = group.enumerate_U(a)
    if order <= limit:
        mode = "exhaustive"
        elements: set[GroupElement] = set()
        cosets = set()
        count = 0
        for count, (g, parts) in enumerate(group.enumerate_group(a), start=1):
            elements.add(g)
            key = check(g, parts, U[count % len(U)], U[(7 * count) % len(U)])
            if key is not None:
                cosets.add(key)
        distinct, distinct_cosets = len(elements), len(cosets)
        passed = not failures and count == order and distinct == order and distinct_cosets == expected_cosets
    else:
        mode = "sampled"
        rng = random.Random(seed)
        count = sample
        for k in range(sample):
            g, parts = group.random_element(a, rng)
            check(g, parts, U[k % len(U)], U[(7 * k) % len(U)])
        distinct = distinct_cosets = None
        passed = not failures
    logger.info("bruhat check n=%d q^a=%d: %s, %d elements, %d failures",
                group.n, group.tower.size(a), mode, count, len(failures))
    return BruhatReport(
        n=group.n, q=group.tower.q, a=a, mode=mode, elements=count, expected_order=order,
        distinct_elements=distinct, distinct_cosets=distinct_cosets, expected_cosets=expected_cosets,
        passed=passed, failures=failures,
    )
