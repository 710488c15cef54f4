from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from fields.models import CoeffField
from group_sl.models import GroupElement, WeylElement
from group_sl.services import SLGroup, make_group
from services.common import ExitCode, SteinbergError

from .models import Coords, CosetLabel, MVector, StVector

logger = logging.getLogger(__name__)

Multiplier = Sequence[tuple[GroupElement, int]]


class EchelonBasis:
    """Row echelon basis over GF(ell) grown one vector at a time.

    Pivot rows are kept normalized (pivot entry 1) and fully reduced against
    each other, so membership is a single reduction pass.
    """

    def __init__(self, ell: int, width: int):
        self.ell = ell
        self.width = width
        self.pivots: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        row = np.asarray(vec, dtype=np.int64) % self.ell
        for col in sorted(self.pivots):
            c = row[col]
            if c:
                row = (row - c * self.pivots[col]) % self.ell
        return row

    def add(self, vec: np.ndarray) -> np.ndarray | None:
        """Insert vec; returns its reduced form if it was new, else None."""
        row = self.reduce(vec)
        nonzero = np.flatnonzero(row)
        if nonzero.size == 0:
            return None
        col = int(nonzero[0])
        row = (row * pow(int(row[col]), -1, self.ell)) % self.ell
        for other, piv in self.pivots.items():
            c = piv[col]
            if c:
                self.pivots[other] = (piv - c * row) % self.ell
        self.pivots[col] = row
        return row

    def rows(self) -> list[np.ndarray]:
        return [self.pivots[c] for c in sorted(self.pivots)]


def rank_mod(rows: Iterable[np.ndarray], ell: int, width: int) -> int:
    basis = EchelonBasis(ell, width)
    for row in rows:
        basis.add(row)
    return len(basis)


class SteinbergModule:
    """M(tr) = kG ⊗_{kB} k_tr over GF(ell) for SL_n over the tower.

    Labels are canonical through column reduction, so the action is a
    lookup once a (g, label) pair has been seen. The action caches are
    dropped whole once they hold cache_limit entries.
    """

    cache_limit = 2 ** 20

    def __init__(self, group: SLGroup, ell: int):
        self.group = group
        self.tower = group.tower
        self.coeffs = CoeffField(ell)
        self.ell = ell
        self._weyl: dict[tuple[int, ...], WeylElement] = {}
        self._left_pos: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        self._reps: dict[CosetLabel, GroupElement] = {}
        self._act: dict[tuple[GroupElement, CosetLabel], CosetLabel] = {}
        self._eta: MVector | None = None
        self._z_eta: dict[GroupElement, MVector] = {}
        self._x_sums: dict[tuple[int, int], MVector] = {}

    def __repr__(self):
        return f"SteinbergModule(n={self.group.n}, q={self.tower.q}, ell={self.ell})"

    @property
    def sign_r(self) -> int:
        return self.coeffs.sign(self.group.r)

    # labels

    def coset_label(self, g: GroupElement) -> CosetLabel:
        perm, cols = self.group.column_reduce(g)
        w = self._weyl.get(perm)
        if w is None:
            w = self._weyl[perm] = self.group.weyl_element(perm)
            inv = w.inverse_perm()
            self._left_pos[perm] = [(k, inv[m]) for k, m in self.group.left_roots(w)]
        codes = [cols[j][k] for k, j in self._left_pos[perm]]
        return CosetLabel.build(w, g.level, codes, self.tower)

    def coset_rep(self, label: CosetLabel) -> GroupElement:
        rep = self._reps.get(label)
        if rep is None:
            left = self.group.left_factor(label.cell, label.level, label.codes)
            rep = self._reps[label] = left * self.group.weyl_rep(label.cell)
        return rep

    def enumerate_cosets(self, a: int) -> list[CosetLabel]:
        size = self.tower.size(a)
        labels = []
        for w in self.group.weyl_elements():
            for codes in itertools.product(range(size), repeat=w.length):
                labels.append(CosetLabel.build(w, a, codes, self.tower))
        return labels

    # action

    def act_label(self, g: GroupElement, label: CosetLabel) -> CosetLabel:
        key = (g, label)
        found = self._act.get(key)
        if found is None:
            if len(self._act) >= self.cache_limit:
                self.clear_caches()
            found = self._act[key] = self.coset_label(g * self.coset_rep(label))
        return found

    def clear_caches(self):
        if self._act:
            logger.debug("%r: dropping %d cached actions", self, len(self._act))
        self._act.clear()
        self._z_eta.clear()
        self._x_sums.clear()

    def act(self, g: GroupElement, v: MVector) -> MVector:
        return MVector(self.ell, [(self.act_label(g, label), c) for label, c in v.terms.items()])

    def group_sum_apply(self, S: Iterable[GroupElement], v: MVector) -> MVector:
        return self.apply_multiplier([(x, 1) for x in S], v)

    def apply_multiplier(self, multiplier: Multiplier, v: MVector) -> MVector:
        """Σ c_g · g·v over the (g, c_g) pairs of a group-algebra element."""
        terms: dict[CosetLabel, int] = {}
        for g, s in multiplier:
            s %= self.ell
            if not s:
                continue
            for label, c in v.terms.items():
                image = self.act_label(g, label)
                terms[image] = (terms.get(image, 0) + s * c) % self.ell
        return MVector(self.ell, terms)

    def basis_vector(self, label: CosetLabel, c: int = 1) -> MVector:
        return MVector(self.ell, {label: c})

    def zero(self) -> MVector:
        return MVector(self.ell)

    # eta and the Steinberg basis

    def eta(self) -> MVector:
        if self._eta is None:
            terms = []
            for w in self.group.weyl_elements():
                terms.append((self.coset_label(self.group.weyl_rep(w)), self.coeffs.sign(w.length)))
            self._eta = MVector(self.ell, terms)
        return self._eta

    def translate_eta(self, z: GroupElement) -> MVector:
        found = self._z_eta.get(z)
        if found is None:
            if len(self._z_eta) >= self.cache_limit:
                self._z_eta.clear()
            found = self._z_eta[z] = self.act(z, self.eta())
        return found

    def x_sum_eta(self, i: int, b: int) -> MVector:
        """Σ_{x ∈ X_{i,q^b}} xη."""
        key = (i, b)
        found = self._x_sums.get(key)
        if found is None:
            found = self._x_sums[key] = self.group_sum_apply(self.group.enumerate_X(i, b), self.eta())
        return found

    def from_steinberg_coords(self, s: StVector) -> MVector:
        terms: dict[CosetLabel, int] = {}
        for coords, c in s.terms.items():
            for label, e in self.translate_eta(self.group.u_element(coords)).terms.items():
                terms[label] = (terms.get(label, 0) + c * e) % self.ell
        return MVector(self.ell, terms)

    def to_steinberg_coords(self, v: MVector) -> StVector:
        """Read zη coefficients off the big cell, then re-synthesize to check."""
        w0 = self.group.w0()
        terms = []
        for label, c in v.terms.items():
            if label.cell == w0:
                z = self.group.left_factor(w0, label.level, label.codes)
                terms.append((self.group.u_coordinates(z), self.coeffs.mul(self.sign_r, c)))
        s = StVector(self.ell, terms)
        if self.from_steinberg_coords(s) != v:
            raise SteinbergError(ExitCode.invalid_config, "Vector is not in the Steinberg submodule.")
        return s

    def st_vector(self, items: Iterable[tuple[Coords, int]]) -> StVector:
        return StVector(self.ell, [(tuple(self.tower.normalize(c) for c in coords), s) for coords, s in items])

    def coeff_sum(self, s: StVector) -> int:
        return sum(s.terms.values()) % self.ell

    def e_coefficient(self, s: StVector) -> int:
        zero = self.tower.zero()
        return s[tuple(zero for _ in range(self.group.r))]

    def steinberg_rank(self, a: int) -> int:
        labels = self.enumerate_cosets(a)
        index = {label: i for i, label in enumerate(labels)}
        rows = (self.dense(self.translate_eta(z), index) for z in self.group.enumerate_U(a))
        rank = rank_mod(rows, self.ell, len(labels))
        logger.info("rank of {zη} at level %d over GF(%d): %d", a, self.ell, rank)
        return rank

    # dense views for linear algebra

    def dense(self, v: MVector, index: dict[CosetLabel, int]) -> np.ndarray:
        row = np.zeros(len(index), dtype=np.int64)
        for label, c in v.terms.items():
            if label not in index:
                raise SteinbergError(ExitCode.invalid_config, f"Coset {label} lies above the chosen level.")
            row[index[label]] = c
        return row

    def sparse(self, row: np.ndarray, labels: Sequence[CosetLabel]) -> MVector:
        return MVector(self.ell, [(labels[int(i)], int(row[i])) for i in np.flatnonzero(row)])


@lru_cache(maxsize=16)
def make_module(n: int, p: int, d: int, ell: int) -> SteinbergModule:
    return SteinbergModule(make_group(n, p, d), ell)
