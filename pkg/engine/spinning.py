from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass

import numpy as np

from group_sl.models import GroupElement
from module_mtr.models import CosetLabel, MVector, StVector
from module_mtr.schemas import stvector_to_text
from module_mtr.services import EchelonBasis, SteinbergModule, make_module
from quasifinite.services import divides_for_all_a
from services.common import ExitCode, Settings, SteinbergError, characteristic_check, prime_power

from .schemas import EvidenceRow, SpinReport
from .services import st_coords

logger = logging.getLogger(__name__)


@dataclass
class SpinContext:
    """Dense coordinates on G_{q^a}/B_{q^a} and the generators as permutations."""

    a : int
    labels : list[CosetLabel]
    index : dict[CosetLabel, int]
    perms : list[np.ndarray]


@dataclass
class SpinResult:
    dim : int
    basis : list[MVector]


def spin_context(module: SteinbergModule, a: int, generators: list[GroupElement] | None = None) -> SpinContext:
    labels = module.enumerate_cosets(a)
    index = {label: i for i, label in enumerate(labels)}
    gens = module.group.generators(a) if generators is None else generators
    perms = []
    for g in gens:
        images = [index.get(module.act_label(g, label)) for label in labels]
        if None in images:
            raise SteinbergError(ExitCode.invalid_config, f"Generator {g} leaves level {a}.")
        perms.append(np.array(images, dtype=np.int64))
    return SpinContext(a=a, labels=labels, index=index, perms=perms)


def _spin_dense(ctx: SpinContext, ell: int, start: np.ndarray, stop_at: int | None = None) -> EchelonBasis:
    basis = EchelonBasis(ell, len(ctx.labels))
    if basis.add(start) is None:
        return basis
    queue = [np.asarray(start, dtype=np.int64) % ell]
    while queue:
        x = queue.pop()
        for perm in ctx.perms:
            y = np.zeros_like(x)
            y[perm] = x
            if basis.add(y) is not None:
                queue.append(y)
                if stop_at is not None and len(basis) >= stop_at:
                    return basis
    return basis


def spin(module: SteinbergModule, v: MVector, generators: list[GroupElement] | None = None, a: int = 1) -> SpinResult:
    """Submodule generated by v under the generators, as an echelon basis."""
    ctx = spin_context(module, a, generators)
    basis = _spin_dense(ctx, module.ell, module.dense(v, ctx.index))
    return SpinResult(dim=len(basis), basis=[module.sparse(row, ctx.labels) for row in basis.rows()])


def _projective_vectors(ell: int, dim: int):
    for lead in range(dim):
        for rest in itertools.product(range(ell), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + rest


def finite_steinberg_report(module: SteinbergModule, a: int, settings: Settings, seed: int | None = None) -> SpinReport:
    characteristic_check(module.tower.p, module.ell)
    ell = module.ell
    group = module.group
    ctx = spin_context(module, a)
    coords = st_coords(module, a)
    rows = np.array([module.dense(module.translate_eta(group.u_element(c)), ctx.index) for c in coords], dtype=np.int64)
    dim = len(coords)

    rank_basis = EchelonBasis(ell, len(ctx.labels))
    for row in rows:
        rank_basis.add(row)
    if len(rank_basis) != dim:
        raise SteinbergError(ExitCode.assertion_failure, f"{{zη}} has rank {len(rank_basis)}, expected {dim}.")

    if ell ** dim <= settings.exhaustive_limit:
        mode = "certified"
        candidates = _projective_vectors(ell, dim)
        covered = ell ** dim - 1
    else:
        mode = "probable"
        rng = random.Random(settings.seed if seed is None else seed)
        randoms = []
        while len(randoms) < settings.random_spins:
            c = tuple(rng.randrange(ell) for _ in range(dim))
            if any(c):
                randoms.append(c)
        basis_vectors = [tuple(1 if j == k else 0 for j in range(dim)) for k in range(dim)]
        candidates = basis_vectors + randoms
        covered = len(candidates)

    spun = 0
    proper: set[int] = set()
    witness = None
    for c in candidates:
        spun += 1
        start = (np.array(c, dtype=np.int64) @ rows) % ell
        found = len(_spin_dense(ctx, ell, start, stop_at=dim))
        if found < dim:
            proper.add(found)
            if witness is None:
                witness = stvector_to_text(StVector(ell, zip(coords, c))).strip()
    logger.info("spun %d vectors of St_%d over GF(%d): mode %s, proper dims %s", spun, a, ell, mode, sorted(proper))
    return SpinReport(
        n=group.n, q=module.tower.q, a=a, ell=ell, dim=dim, mode=mode, vectors_spun=spun,
        vectors_covered=covered, irreducible=not proper, proper_dims=sorted(proper), witness=witness,
    )


def quasifinite_evidence(n: int, q: int, ell: int, levels: list[int], settings: Settings) -> EvidenceRow:
    """Pair the divisibility verdict for (n, q, ell) with spinning at small levels."""
    scan = divides_for_all_a(ell, n, q, settings.a_max)
    p, d = prime_power(q)
    module = make_module(n, p, d, ell)
    reducible_at = []
    probable = False
    for a in levels:
        report = finite_steinberg_report(module, a, settings)
        probable = probable or report.mode == "probable"
        if not report.irreducible:
            reducible_at.append(a)
    return EvidenceRow(
        n=n, q=q, ell=ell, divides_for_all_a=scan.all_divisible, period_covered=scan.period_covered,
        levels=list(levels), reducible_at=reducible_at, probable=probable,
    )
