import itertools

import pytest
from hypothesis import given, strategies as st

from fields.models import CoeffField
from fields.schemas import describe_tower
from fields.services import get_tower, make_tower
from services.common import ExitCode, SteinbergError


@pytest.mark.parametrize("p, d, a, size", [(3, 1, 1, 3), (2, 1, 3, 8), (2, 1, 2, 4), (3, 1, 2, 9), (3, 2, 1, 9)])
def test_level_sizes(p, d, a, size):
    tower = make_tower(p, d)
    elements = tower.enumerate_level(a)
    assert len(elements) == size
    assert elements[0].is_zero()
    assert len(set(elements)) == size


def test_level_two_is_closed(tower3):
    elements = tower3.enumerate_level(2)
    codes = {x.code for x in elements}
    for x, y in itertools.product(elements, repeat=2):
        assert (x + y).level == 2 and (x + y).code in codes
        assert (x * y).level == 2 and (x * y).code in codes


def test_non_prime_characteristic_is_rejected():
    with pytest.raises(SteinbergError) as err:
        make_tower(4)
    assert err.value.status_code == ExitCode.invalid_config


def test_embedding_fixes_zero_and_one(tower3):
    assert tower3.embed(tower3.zero(), 2).code == 0
    assert tower3.embed(tower3.one(), 2).code == 1
    assert tower3.embed(tower3.one(), 1).code == 1


def test_embedding_is_multiplicative_on_prime_field(tower3):
    for x, y in itertools.product(tower3.enumerate_level(1), repeat=2):
        assert tower3.embed(x * y, 2).code == (tower3.embed(x, 2) * tower3.embed(y, 2)).code


@given(st.integers(0, 8), st.integers(0, 8))
def test_embedding_into_level_four_is_a_homomorphism(x, y):
    tower = get_tower(3)
    X, Y = tower.element(2, x), tower.element(2, y)
    assert tower.embed(X + Y, 4).code == (tower.embed(X, 4) + tower.embed(Y, 4)).code
    assert tower.embed(X * Y, 4).code == (tower.embed(X, 4) * tower.embed(Y, 4)).code


@pytest.mark.parametrize("p", [2, 3])
def test_embeddings_compose(p):
    tower = get_tower(p)
    for code in range(tower.size(1)):
        assert tower.embed_code(tower.embed_code(code, 1, 2), 2, 4) == tower.embed_code(code, 1, 4)
    for code in range(tower.size(2)):
        via = tower.embed_code(tower.embed_code(code, 2, 4), 4, 8)
        assert via == tower.embed_code(code, 2, 8)


def test_embedding_needs_a_multiple_level(tower3):
    with pytest.raises(SteinbergError):
        tower3.embed(tower3.element(2, 4), 3)


def test_embedded_level_is_a_subset(tower2):
    big = {x.code for x in tower2.enumerate_level(4)}
    small = {tower2.embed(x, 4).code for x in tower2.enumerate_level(2)}
    assert len(small) == 4 and small <= big


def test_equality_ignores_level(tower3):
    two = tower3.from_int(2)
    assert tower3.embed(two, 2) == two
    assert tower3.normalize(tower3.embed(two, 4)).level == 1


@pytest.mark.parametrize("p, a", [(3, 1), (2, 1), (2, 2), (3, 2)])
def test_mult_coset_reps_partition(p, a):
    tower = get_tower(p)
    reps = tower.mult_coset_reps(a)
    assert len(reps) == tower.size(a) + 1
    for x, y in itertools.combinations(reps, 2):
        assert a % tower.normalize(x / y).level != 0
    units = [u for u in tower.enumerate_level(a) if not u.is_zero()]
    covered = {c * u for c in reps for u in units}
    assert len(covered) == tower.size(2 * a) - 1


def test_mult_coset_ratios_leave_the_subfield(tower3):
    reps = tower3.mult_coset_reps(1)
    for x, y in itertools.combinations(reps, 2):
        assert tower3.normalize(x / y).level == 2


@pytest.mark.parametrize("p", [2, 3])
def test_sqrt(p):
    tower = get_tower(p)
    for x in tower.enumerate_level(2):
        assert tower.sqrt(x) * tower.sqrt(x) == x


def test_coefficient_field():
    k = CoeffField(5)
    assert k.inv(2) == 3
    assert k.sign(3) == 4
    assert k.sign(2) == 1
    with pytest.raises(SteinbergError):
        CoeffField(6)
    with pytest.raises(SteinbergError):
        k.inv(0)


def test_describe_tower_reports_polynomials(tower2):
    report = describe_tower(tower2, [2, 1, 2])
    assert [lv.level for lv in report.levels] == [1, 2]
    assert report.levels[1].size == 4
    assert len(report.levels[1].polynomial) == 3
