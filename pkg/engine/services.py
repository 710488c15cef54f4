from __future__ import annotations

import itertools
import logging
import random
from functools import reduce
from math import lcm

from fields.models import FieldElement
from group_sl.models import GroupElement
from module_mtr.models import MVector, StVector
from module_mtr.services import SteinbergModule
from services.common import ExitCode, SteinbergError, characteristic_check

from .models import Certificate, LadderState, LiftResult, StageResult, Step
from .schemas import BasisReport, CaseFailure, CoefficientSumReport, CoreIdentityReport, EtaAlternationReport

logger = logging.getLogger(__name__)


def _require_cross_characteristic(module: SteinbergModule):
    characteristic_check(module.tower.p, module.ell)


def closed_form(module: SteinbergModule, i: int, b: int) -> MVector:
    return module.x_sum_eta(i, b)


def vector_level(v: StVector) -> int:
    return reduce(lcm, (c.level for key in v.terms for c in key), 1)


def multiplier_level(module: SteinbergModule, g: GroupElement) -> int:
    """Level at which g acts on M(tr); diagonal elements act through root values."""
    if not g.is_diagonal():
        return g.level
    tower = module.tower
    level = 1
    for k, m in module.group.datum.positive_roots:
        level = lcm(level, tower.normalize(module.group.root_value((k, m), g)).level)
    return level


def _q_power(module: SteinbergModule, e: int) -> int:
    return module.coeffs.pow(module.tower.q, e)


def _apply_steps(module: SteinbergModule, steps: list[Step], v: MVector) -> MVector:
    for step in steps:
        v = module.apply_multiplier(step.terms, v)
    return v


# coefficient sums and the averaging lift

def check_coefficient_sums(module: SteinbergModule, a: int) -> CoefficientSumReport:
    _require_cross_characteristic(module)
    group = module.group
    n_rep = group.longest_rep()
    failures = []
    U = group.enumerate_U(a)
    for u in U:
        s = module.to_steinberg_coords(module.act(n_rep * u, module.eta()))
        expected = module.sign_r if u.is_identity() else 0
        got = module.coeff_sum(s)
        if got != expected:
            failures.append(CaseFailure(case=str(u), detail=f"coefficient sum {got}, expected {expected}"))
        elif a % vector_level(s):
            failures.append(CaseFailure(case=str(u), detail=f"support leaves level {a}"))
    logger.info("coefficient sums n=%d q=%d a=%d ell=%d: %d cases, %d failures",
                group.n, module.tower.q, a, module.ell, len(U), len(failures))
    return CoefficientSumReport(
        n=group.n, q=module.tower.q, a=a, ell=module.ell, cases=len(U),
        identity_value=module.sign_r, passed=not failures, failures=failures,
    )


def check_lift_scalar(module: SteinbergModule, v: StVector) -> bool:
    """coeff_sum(n·v) = (−1)^r times the e-coefficient of v."""
    nv = module.act(module.group.longest_rep(), module.from_steinberg_coords(v))
    return module.coeff_sum(module.to_steinberg_coords(nv)) == module.coeffs.mul(module.sign_r, module.e_coefficient(v))


def lift_to_U_sum(module: SteinbergModule, v: StVector, a: int | None = None) -> LiftResult:
    _require_cross_characteristic(module)
    if v.is_zero():
        raise SteinbergError(ExitCode.invalid_config, "Cannot lift the zero vector.")
    level = vector_level(v)
    a = level if a is None else lcm(a, level)
    group = module.group
    coeffs = module.coeffs

    steps = []
    y_coords, a_e = v.items()[0]
    y = group.u_element(y_coords)
    if not y.is_identity():
        steps.append(Step("translate", ((y.inverse(), 1),)))
    A = coeffs.mul(module.sign_r, a_e)
    steps.append(Step("longest", ((group.longest_rep(), 1),)))
    A_inv = coeffs.inv(A)
    steps.append(Step("average", tuple((x, A_inv) for x in group.enumerate_U(a))))

    out = _apply_steps(module, steps, module.from_steinberg_coords(v))
    if out != closed_form(module, 1, a):
        raise SteinbergError(ExitCode.assertion_failure, f"Averaging lift at level {a} missed Σ_U xη.")
    logger.info("lifted vector with %d terms to level %d, A = %d", len(v), a, A)
    return LiftResult(vector=out, scalar=A, steps=steps)


# the torus ladder

def _tori(module: SteinbergModule, i: int, b: int) -> list[GroupElement]:
    beta = module.group.datum.betas[i - 1]
    return [module.group.torus_for_root_value(beta, c) for c in module.tower.mult_coset_reps(b)]


def check_state(module: SteinbergModule, state: LadderState):
    if state.vector != closed_form(module, state.i, state.b):
        raise SteinbergError(
            ExitCode.assertion_failure,
            f"Ladder state at i={state.i}, b={state.b} differs from its closed form.",
        )


def double_field_sum(module: SteinbergModule, state: LadderState) -> StageResult:
    _require_cross_characteristic(module)
    r = module.group.r
    i, b = state.i, state.b
    scalar = _q_power(module, b * (r - i + 1))
    inv = module.coeffs.inv(scalar)
    step = Step("double", tuple((x, inv) for x in module.group.enumerate_X(i, 2 * b)))
    out = module.apply_multiplier(step.terms, state.vector)
    new = LadderState(i=i, b=2 * b, vector=out)
    check_state(module, new)
    logger.info("doubled field at i=%d: level %d -> %d, scalar %d", i, b, 2 * b, scalar)
    return StageResult(state=new, scalar=scalar, steps=[step])


def ladder_step(module: SteinbergModule, state: LadderState) -> StageResult:
    """Move Σ_{X_{i,q^b}} xη to Σ_{X_{i+1,q^{2b}}} xη.

    With ξ = Σ_j t_j·V and D = Σ_{y ∈ X_{i,q^{2b}}} y·V, applying
    Z = Σ_{X_{i+1,q^{2b}}} gives Zξ = q^{(r-i)b}(q^b Zη + Σ_{X_{i,q^{2b}}} xη)
    and ZD = q^{b(r-i+1)} q^{2b(r-i)} Σ_{X_{i,q^{2b}}} xη, so Zη is a
    combination of the two with scalars that are powers of q.
    """
    _require_cross_characteristic(module)
    group = module.group
    coeffs = module.coeffs
    r = group.r
    i, b = state.i, state.b
    if not 1 <= i < r:
        raise SteinbergError(ExitCode.invalid_config, f"Ladder step needs 1 <= i < {r}, got {i}.")

    qb = _q_power(module, b)
    t_scalar = coeffs.inv(coeffs.mul(_q_power(module, (r - i) * b), qb))
    y_scalar = coeffs.neg(coeffs.inv(coeffs.mul(
        coeffs.mul(_q_power(module, b * (r - i + 1)), _q_power(module, 2 * b * (r - i))), qb,
    )))
    tori = _tori(module, i, b)
    combine = Step(
        "torus",
        tuple((t, t_scalar) for t in tori) + tuple((y, y_scalar) for y in group.enumerate_X(i, 2 * b)),
    )
    absorb = Step("absorb", tuple((z, 1) for z in group.enumerate_X(i + 1, 2 * b)))
    out = _apply_steps(module, [combine, absorb], state.vector)
    new = LadderState(i=i + 1, b=2 * b, vector=out)
    check_state(module, new)
    logger.info("ladder step i=%d -> %d at level %d: %d tori, %d terms", i, i + 1, 2 * b, len(tori), len(combine))
    return StageResult(state=new, scalar=qb, steps=[combine, absorb])


def extract_eta(module: SteinbergModule, state: LadderState) -> StageResult:
    _require_cross_characteristic(module)
    group = module.group
    coeffs = module.coeffs
    i, b = state.i, state.b
    if i != group.r:
        raise SteinbergError(ExitCode.invalid_config, f"Extraction needs i = r = {group.r}, got {i}.")
    qb = _q_power(module, b)
    t_scalar = coeffs.inv(qb)
    y_scalar = coeffs.neg(coeffs.inv(coeffs.mul(qb, qb)))
    step = Step(
        "extract",
        tuple((t, t_scalar) for t in _tori(module, i, b))
        + tuple((y, y_scalar) for y in group.enumerate_X(i, 2 * b)),
    )
    out = module.apply_multiplier(step.terms, state.vector)
    if out != module.eta():
        raise SteinbergError(ExitCode.assertion_failure, f"Extraction at level {b} did not recover η.")
    logger.info("extracted η from level %d, divided by q^b = %d", b, qb)
    return StageResult(state=None, scalar=qb, steps=[step])


# certificates

def _eta_multiple(module: SteinbergModule, v: StVector) -> int | None:
    zero = tuple(module.tower.zero() for _ in range(module.group.r))
    if len(v) == 1 and zero in v.terms:
        return v.terms[zero]
    return None


def _levels(module: SteinbergModule, steps: list[Step]) -> tuple[int, int]:
    max_level = matrix_level = 1
    for step in steps:
        for g, _ in step.terms:
            max_level = max(max_level, multiplier_level(module, g))
            matrix_level = max(matrix_level, g.level)
    return max_level, matrix_level


def reach_eta(module: SteinbergModule, v: StVector, a: int = 1) -> Certificate:
    _require_cross_characteristic(module)
    if v.is_zero():
        raise SteinbergError(ExitCode.invalid_config, "The zero vector generates nothing.")
    group = module.group
    a = lcm(a, vector_level(v))
    cert = Certificate(
        n=group.n, p=module.tower.p, d=module.tower.d, a=a, ell=module.ell,
        w0_word=group.datum.w0_word, vector=v,
    )

    multiple = _eta_multiple(module, v)
    if multiple is not None:
        cert.claimed_scalar = multiple
        cert.level_chain = (a,)
        return cert

    lift = lift_to_U_sum(module, v, a)
    steps = list(lift.steps)
    state = LadderState(i=1, b=a, vector=lift.vector)
    chain = [a]
    while state.i < group.r:
        stage = ladder_step(module, state)
        steps += stage.steps
        state = stage.state
        chain.append(state.b)
    final = extract_eta(module, state)
    steps += final.steps
    chain.append(2 * state.b)

    cert.steps = steps
    cert.level_chain = tuple(chain)
    cert.max_level, cert.matrix_level = _levels(module, steps)
    if cert.max_level > a * 2 ** group.r:
        raise SteinbergError(ExitCode.assertion_failure, f"Certificate level {cert.max_level} exceeds a·2^r.")
    return cert


def verify_certificate(module: SteinbergModule, cert: Certificate, v: StVector | None = None) -> bool:
    """Replay the steps on v and compare with claimed_scalar · η."""
    group = module.group
    if (cert.n, cert.p, cert.d, cert.ell) != (group.n, module.tower.p, module.tower.d, module.ell):
        return False
    if tuple(cert.w0_word) != group.datum.w0_word:
        logger.warning("certificate w0 word %s does not match %s", cert.w0_word, group.datum.w0_word)
        return False
    if cert.claimed_scalar % module.ell == 0:
        return False
    v = cert.vector if v is None else v
    try:
        out = _apply_steps(module, cert.steps, module.from_steinberg_coords(v))
    except SteinbergError:
        return False
    return out == module.eta().scale(cert.claimed_scalar)


# standalone identities

def check_core_identity(module: SteinbergModule, i: int, b: int) -> CoreIdentityReport:
    """Σ_j t_j Σ_{x ∈ U_{β_i,q^b}} xη = q^b·η + Σ_{x ∈ U_{β_i,q^{2b}}} xη, both sides direct."""
    _require_cross_characteristic(module)
    group = module.group
    eta = module.eta()
    inner = module.group_sum_apply(group.root_subgroup(i, b), eta)
    tori = _tori(module, i, b)
    lhs = module.group_sum_apply(tori, inner)
    rhs = eta.scale(_q_power(module, b)) + module.group_sum_apply(group.root_subgroup(i, 2 * b), eta)
    return CoreIdentityReport(
        n=group.n, q=module.tower.q, ell=module.ell, i=i, b=b, tori=len(tori),
        lhs_support=len(lhs), rhs_support=len(rhs), passed=lhs == rhs,
    )


def check_eta_alternation(module: SteinbergModule, a: int = 1) -> EtaAlternationReport:
    group = module.group
    eta = module.eta()
    failures = []
    simple = range(1, group.n)
    for i in simple:
        if module.act(group.weyl_rep((i,)), eta) != -eta:
            failures.append(CaseFailure(case=f"n_{i}", detail="n_i η != -η"))
    tori = group.torus_elements(a)
    for t in tori:
        if module.act(t, eta) != eta:
            failures.append(CaseFailure(case=str(t), detail="t η != η"))
    return EtaAlternationReport(
        n=group.n, q=module.tower.q, a=a, ell=module.ell, simple_checked=len(simple),
        tori_checked=len(tori), passed=not failures, failures=failures,
    )


# vectors of St_a

def st_coords(module: SteinbergModule, a: int) -> list[tuple[FieldElement, ...]]:
    return [tuple(module.tower.normalize(c) for c in coords) for coords in module.group.x_coords(1, a)]


def all_st_vectors(module: SteinbergModule, a: int):
    """Every nonzero vector of St_a, in lexicographic coefficient order."""
    coords = st_coords(module, a)
    for values in itertools.product(range(module.ell), repeat=len(coords)):
        if any(values):
            yield StVector(module.ell, zip(coords, values))


def random_st_vectors(module: SteinbergModule, a: int, count: int, seed: int) -> list[StVector]:
    rng = random.Random(seed)
    coords = st_coords(module, a)
    out = []
    while len(out) < count:
        v = StVector(module.ell, [(c, rng.randrange(module.ell)) for c in coords])
        if v:
            out.append(v)
    return out


def check_basis(module: SteinbergModule, a: int, roundtrips: int, seed: int) -> BasisReport:
    """Rank of {zη : z ∈ U_{q^a}} and Steinberg-coordinate roundtrips on seeded vectors."""
    group = module.group
    expected = module.tower.size(a) ** group.r
    rank = module.steinberg_rank(a)
    ok = rank == expected
    for s in random_st_vectors(module, a, roundtrips, seed):
        if module.to_steinberg_coords(module.from_steinberg_coords(s)) != s:
            ok = False
            break
    return BasisReport(
        n=group.n, q=module.tower.q, a=a, ell=module.ell, cosets=len(module.enumerate_cosets(a)),
        rank=rank, expected_rank=expected, roundtrips=roundtrips, passed=ok,
    )
