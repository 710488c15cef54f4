import itertools
import random

import pytest
from hypothesis import given, strategies as st

from group_sl.models import RootDatum, WeylElement, inversions, reduced_word, word_to_perm
from group_sl.schemas import describe_datum
from group_sl.services import check_bruhat, make_group
from services.common import ExitCode, SteinbergError


def test_root_datum_sl3():
    datum = RootDatum.for_sl(3)
    assert datum.r == 3
    assert datum.w0_word == (1, 2, 1)
    assert datum.betas == ((0, 1), (0, 2), (1, 2))
    assert datum.w0().length == 3
    assert describe_datum(datum).betas == ["e1-e2", "e1-e3", "e2-e3"]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_betas_exhaust_positive_roots(n):
    datum = RootDatum.for_sl(n)
    assert sorted(datum.betas) == sorted(datum.positive_roots)
    assert len(datum.w0_word) == n * (n - 1) // 2


def test_sl1_is_rejected():
    with pytest.raises(SteinbergError):
        RootDatum.for_sl(1)


def test_reduced_words_spell_their_permutation():
    for perm in itertools.permutations(range(4)):
        word = reduced_word(perm)
        assert word_to_perm(word, 4) == perm
        assert len(word) == inversions(perm)


def test_non_reduced_word_is_rejected():
    with pytest.raises(SteinbergError):
        WeylElement(perm=(0, 1, 2), word=(1, 1))


def test_weyl_elements_by_length(sl3_f2):
    elements = sl3_f2.weyl_elements()
    assert len(elements) == 6
    assert [w.length for w in elements] == [0, 1, 1, 2, 2, 3]
    assert elements[-1] == sl3_f2.w0()


def test_eps_zero_is_identity(sl3_f2, tower2):
    for root in [(0, 1), (2, 0), (1, 2)]:
        assert sl3_f2.eps(root, tower2.zero()).is_identity()


def test_eps_rejects_diagonal_root(sl3_f2, tower2):
    with pytest.raises(SteinbergError):
        sl3_f2.eps((1, 1), tower2.one())


@given(st.integers(0, 3), st.integers(0, 3))
def test_eps_is_a_homomorphism_over_f4(x, y):
    group = make_group(2, 2)
    tower = group.tower
    c, d = tower.element(2, x), tower.element(2, y)
    for root in [(0, 1), (1, 0)]:
        assert group.eps(root, c) * group.eps(root, d) == group.eps(root, c + d)


def test_torus_conjugation_law():
    group = make_group(3, 3)
    tower = group.tower
    roots = [(k, m) for k in range(3) for m in range(3) if k != m]
    for t in group.torus_elements(1):
        t_inv = t.inverse()
        for root in roots:
            for c in tower.enumerate_level(1):
                assert t * group.eps(root, c) * t_inv == group.eps(root, group.root_value(root, t) * c)


def test_simple_representatives(sl3_f2):
    for i in (1, 2):
        s = sl3_f2.weyl_rep((i,))
        assert s.det() == sl3_f2.tower.one()
        assert not s.is_diagonal()
    assert sl3_f2.longest_rep() == sl3_f2.weyl_rep(sl3_f2.w0())


def test_torus_for_root_value(sl2_f3):
    tower = sl2_f3.tower
    for c in tower.mult_coset_reps(1):
        t = sl2_f3.torus_for_root_value((0, 1), c)
        assert sl2_f3.root_value((0, 1), t) == c
        assert t.det() == tower.one()


def test_from_rows_checks_determinant(sl2_f3, tower3):
    two, one, zero = tower3.from_int(2), tower3.one(), tower3.zero()
    with pytest.raises(SteinbergError):
        sl2_f3.from_rows([[two, zero], [zero, one]])
    g = sl2_f3.from_rows([[two, zero], [zero, two]])
    assert g.inverse() == g


@pytest.mark.parametrize("n, p, order", [(2, 3, 24), (3, 2, 168), (2, 2, 6)])
def test_group_order(n, p, order):
    assert make_group(n, p).group_order(1) == order


def test_generators_generate(sl2_f3):
    gens = sl2_f3.generators(1)
    seen = {sl2_f3.identity()}
    frontier = [sl2_f3.identity()]
    while frontier:
        g = frontier.pop()
        for x in gens:
            h = x * g
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    assert len(seen) == 24


@pytest.mark.parametrize("n, p, elements, cosets", [(2, 3, 24, 4), (3, 2, 168, 21), (2, 2, 6, 3)])
def test_bruhat_exhaustive(n, p, elements, cosets):
    report = check_bruhat(make_group(n, p), 1, 10 ** 5)
    assert report.passed, report.failures
    assert report.mode == "exhaustive"
    assert report.elements == report.distinct_elements == elements
    assert report.distinct_cosets == report.expected_cosets == cosets


def test_bruhat_over_limit_needs_a_sample():
    group = make_group(3, 3)
    with pytest.raises(SteinbergError) as err:
        check_bruhat(group, 1, 100)
    assert err.value.status_code == ExitCode.invalid_config
    report = check_bruhat(group, 1, 100, sample=25, seed=3)
    assert report.mode == "sampled" and report.passed


def test_bruhat_of_identity(sl3_f2):
    left, w, t, u = sl3_f2.bruhat_decompose(sl3_f2.identity())
    assert w.is_identity()
    assert left.is_identity() and t.is_identity() and u.is_identity()


def test_bruhat_random_elements_at_level_two(sl3_f2):
    rng = random.Random(11)
    for _ in range(30):
        g, parts = sl3_f2.random_element(2, rng)
        assert sl3_f2.bruhat_decompose(g) == parts


def test_u_coordinates_roundtrip(sl3_f2):
    for coords in sl3_f2.x_coords(1, 1):
        assert sl3_f2.u_coordinates(sl3_f2.u_element(coords)) == coords


def test_u_coordinates_outside_u(sl2_f3):
    with pytest.raises(SteinbergError):
        sl2_f3.u_coordinates(sl2_f3.weyl_rep((1,)))


@pytest.mark.parametrize("i, b, size", [(1, 1, 8), (2, 1, 4), (3, 1, 2), (3, 2, 4)])
def test_x_subgroups(sl3_f2, i, b, size):
    X = sl3_f2.enumerate_X(i, b)
    assert len(set(X)) == size
    members = set(X)
    for x, y in itertools.product(X, repeat=2):
        assert x * y in members


def test_root_index_range(sl3_f2):
    with pytest.raises(SteinbergError):
        sl3_f2.root_subgroup(4, 1)
    with pytest.raises(SteinbergError):
        sl3_f2.x_coords(0, 1)


def test_weyl_conjugation_moves_root_subgroups():
    group = make_group(3, 2, 2)
    roots = [(k, m) for k in range(3) for m in range(3) if k != m]
    for w in group.weyl_elements():
        n_w = group.weyl_rep(w)
        n_inv = n_w.inverse()
        for root in roots:
            image = w.apply(root)
            for c in group.tower.enumerate_level(1):
                assert n_w * group.eps(root, c) * n_inv in (group.eps(image, c), group.eps(image, -c))


def test_weyl_conjugation_signs_over_f3():
    group = make_group(3, 3)
    for w in group.weyl_elements():
        n_w = group.weyl_rep(w)
        for root in [(0, 1), (1, 2), (2, 0)]:
            c = group.tower.from_int(1)
            h = n_w * group.eps(root, c) * n_w.inverse()
            assert h in (group.eps(w.apply(root), c), group.eps(w.apply(root), -c))


@pytest.mark.parametrize("n, p", [(2, 3), (3, 2)])
def test_u_embeds_in_its_double_level(n, p):
    group = make_group(n, p)
    assert set(group.enumerate_U(1)) <= set(group.enumerate_U(2))


@pytest.mark.parametrize("i", [1, 2, 3])
def test_x_embeds_in_its_double_level(sl3_f2, i):
    small, large = set(sl3_f2.enumerate_X(i, 1)), set(sl3_f2.enumerate_X(i, 2))
    assert small < large
