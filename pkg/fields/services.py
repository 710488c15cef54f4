from __future__ import annotations

import logging
import threading
from functools import lru_cache

from services.common import ExitCode, SteinbergError, factor, is_prime, lcm

from .models import FieldElement, FieldLevel

logger = logging.getLogger(__name__)


# polynomials over GF(p) are coefficient lists, lowest degree first

def _poly_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for i in range(m + 1):
                prod[k - m + i] = (prod[k - m + i] - c * f[i]) % p
    prod = prod[:m] + [0] * (m - len(prod))
    return prod


def _poly_powmod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    result = [1] + [0] * (m - 1)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_eval(g: tuple[int, ...], h: list[int], f: list[int], p: int) -> list[int]:
    """Evaluate g at the residue class h modulo f (Horner)."""
    m = len(f) - 1
    acc = [0] * m
    for c in reversed(g):
        acc = _poly_mulmod(acc, h, f, p)
        acc[0] = (acc[0] + c) % p
    return acc


def _code(vec: list[int], p: int) -> int:
    out = 0
    for c in reversed(vec):
        out = out * p + c
    return out


def _add_codes(a: int, b: int, p: int, m: int) -> int:
    if p == 2:
        return a ^ b
    out, scale = 0, 1
    for _ in range(m):
        a, x = divmod(a, p)
        b, y = divmod(b, p)
        out += ((x + y) % p) * scale
        scale *= p
    return out


def _divisors(m: int) -> list[int]:
    return [k for k in range(1, m + 1) if m % k == 0]


class FieldTower:
    """The compatible tower F_q ⊂ F_{q^2} ⊂ ... with q = p^d.

    Levels are built on demand. Each absolute degree m over GF(p) gets the
    lexicographically least primitive polynomial whose root, raised to
    (p^m - 1)/(p^k - 1), is the chosen root for every proper divisor k. With
    that choice every embedding is multiplication of discrete logs by a
    fixed factor, and embeddings compose.
    """

    def __init__(self, p: int, d: int):
        if not is_prime(p):
            raise SteinbergError(ExitCode.invalid_config, f"p = {p} is not prime.")
        if d < 1:
            raise SteinbergError(ExitCode.invalid_config, f"Base degree d = {d} must be positive.")
        self.p = p
        self.d = d
        self.q = p ** d
        self._fields: dict[int, FieldLevel] = {}
        self._embeddings: dict[tuple[int, int], list[int]] = {}
        self._canonical: dict[int, list[tuple[int, int]]] = {}
        self._lock = threading.RLock()

    def __repr__(self):
        return f"FieldTower(p={self.p}, d={self.d})"

    # construction

    def _field(self, degree: int) -> FieldLevel:
        found = self._fields.get(degree)
        if found is not None:
            return found
        with self._lock:
            if degree not in self._fields:
                self._fields[degree] = self._build(degree)
            return self._fields[degree]

    def _build(self, m: int) -> FieldLevel:
        p = self.p
        subfields = [self._field(k) for k in _divisors(m) if k < m]
        order = p ** m - 1
        primes = list(factor(order)) if order > 1 else []
        x = [0, 1] if m > 1 else None

        for tail in range(1, p ** m):
            f = [(tail // p ** i) % p for i in range(m)] + [1]
            if f[0] == 0:
                continue
            gen = x if m > 1 else [(-f[0]) % p]
            one = [1] + [0] * (m - 1)
            if _poly_powmod(gen, order, f, p) != one:
                continue
            if any(_poly_powmod(gen, order // r, f, p) == one for r in primes):
                continue
            compatible = True
            for sub in subfields:
                h = _poly_powmod(gen, order // sub.order, f, p)
                if any(_poly_eval(sub.polynomial, h, f, p)):
                    compatible = False
                    break
            if compatible:
                break
        else:
            raise SteinbergError(ExitCode.assertion_failure, f"No compatible primitive polynomial of degree {m}.")

        exp = []
        cur = [1] + [0] * (m - 1)
        for _ in range(order):
            exp.append(_code(cur, p))
            cur = _poly_mulmod(cur, gen, f, p)
        log = [-1] * (order + 1)
        for i, c in enumerate(exp):
            log[c] = i
        zech = []
        for k in range(order):
            s = _add_codes(1, exp[k], p, m)
            zech.append(log[s] if s else -1)

        level = m // self.d if m % self.d == 0 else 0
        logger.debug("built F_%d^%d with polynomial %s", p, m, f)
        return FieldLevel(p=p, degree=m, level=level, polynomial=tuple(f), exp=exp, log=log, zech=zech)

    # levels

    def level(self, a: int) -> FieldLevel:
        if not isinstance(a, int) or a < 1:
            raise SteinbergError(ExitCode.invalid_config, f"Field level {a} must be a positive integer.")
        return self._field(self.d * a)

    def size(self, a: int) -> int:
        return self.q ** a

    def polynomial(self, a: int) -> tuple[int, ...]:
        return self.level(a).polynomial

    def join_levels(self, a: int, b: int) -> int:
        return lcm(a, b)

    # elements

    def element(self, a: int, code: int) -> FieldElement:
        lv = self.level(a)
        if not 0 <= code < lv.size:
            raise SteinbergError(ExitCode.invalid_config, f"Code {code} is not an element of level {a}.")
        return FieldElement(a, code, self)

    def zero(self, a: int = 1) -> FieldElement:
        return FieldElement(a, 0, self)

    def one(self, a: int = 1) -> FieldElement:
        return FieldElement(a, 1, self)

    def from_int(self, k: int, a: int = 1) -> FieldElement:
        return FieldElement(a, k % self.p, self)

    def generator(self, a: int) -> FieldElement:
        return FieldElement(a, self.level(a).exp[1 % self.level(a).order], self)

    # embeddings

    def embed_code(self, code: int, a: int, b: int) -> int:
        if a == b:
            return code
        table = self._embeddings.get((a, b))
        if table is None:
            if b % a:
                raise SteinbergError(ExitCode.invalid_config, f"Level {a} does not divide level {b}.")
            src, dst = self.level(a), self.level(b)
            factor_ = dst.order // src.order
            table = [0] + [dst.exp[(src.log[c] * factor_) % dst.order] for c in range(1, src.size)]
            self._embeddings[(a, b)] = table
        return table[code]

    def embed(self, x: FieldElement, b: int) -> FieldElement:
        if b % x.level:
            raise SteinbergError(ExitCode.invalid_config, f"Level {x.level} does not divide level {b}.")
        return FieldElement(b, self.embed_code(x.code, x.level, b), self)

    def canonical(self, a: int, code: int) -> tuple[int, int]:
        """(minimal level, code at that level) of the element `code` of level a."""
        table = self._canonical.get(a)
        if table is None:
            lv = self.level(a)
            subs = [(k, self.level(k)) for k in _divisors(a)]
            table = [(1, 0)]
            for c in range(1, lv.size):
                L = lv.log[c]
                for k, sub in subs:
                    step = lv.order // sub.order
                    if L % step == 0:
                        table.append((k, sub.exp[L // step]))
                        break
            self._canonical[a] = table
        return table[code]

    def min_level(self, a: int, code: int) -> int:
        return self.canonical(a, code)[0]

    def normalize(self, x: FieldElement) -> FieldElement:
        a, code = self.canonical(x.level, x.code)
        return FieldElement(a, code, self)

    # enumeration

    def enumerate_level(self, a: int) -> list[FieldElement]:
        return [FieldElement(a, c, self) for c in range(self.level(a).size)]

    def mult_coset_reps(self, a: int) -> list[FieldElement]:
        """γ^0, ..., γ^{q^a} for the fixed generator γ of F_{q^{2a}}.

        These represent the q^a + 1 cosets of F*_{q^a} in F*_{q^{2a}}: the
        subgroup is generated by γ^{q^a + 1}.
        """
        big = self.level(2 * a)
        return [FieldElement(2 * a, big.exp[j], self) for j in range(self.q ** a + 1)]

    def sqrt(self, x: FieldElement) -> FieldElement:
        if x.is_zero():
            return x
        lv = self.level(x.level)
        L = lv.log[x.code]
        if self.p == 2:
            return FieldElement(x.level, lv.exp[(L * pow(2, -1, lv.order)) % lv.order], self) if lv.order > 1 else x
        if L % 2 == 0:
            return FieldElement(x.level, lv.exp[L // 2], self)
        b = 2 * x.level
        big = self.level(b)
        L2 = L * (big.order // lv.order)
        return FieldElement(b, big.exp[L2 // 2], self)


def make_tower(p: int, d: int = 1) -> FieldTower:
    tower = FieldTower(p, d)
    tower.level(1)
    return tower


@lru_cache(maxsize=None)
def get_tower(p: int, d: int = 1) -> FieldTower:
    """Shared tower per (p, d), so level tables are built once per process."""
    return make_tower(p, d)
