from math import gcd

import pytest
from hypothesis import given, strategies as st

from quasifinite.schemas import SCAN_COLUMNS, scan_csv_rows
from quasifinite.services import (
    coprime_divisibility_check, divides_for_all_a, ell_candidates, multiplicative_order, q_integer, steinberg_product,
)
from services.common import ExitCode, SteinbergError


@pytest.mark.parametrize("m, q, a, value", [(1, 7, 3, 1), (2, 3, 1, 4), (3, 2, 1, 7), (2, 2, 2, 5)])
def test_q_integer(m, q, a, value):
    assert q_integer(m, q, a) == value


def test_q_integer_needs_positive_m():
    with pytest.raises(SteinbergError):
        q_integer(0, 3, 1)


@given(st.integers(1, 12), st.sampled_from([2, 3, 4, 5, 7, 8, 9, 25]), st.integers(1, 40))
def test_q_integer_telescopes(m, q, a):
    assert (q ** a - 1) * q_integer(m, q, a) == q ** (m * a) - 1


@pytest.mark.parametrize("n, q, a, value", [(2, 3, 1, 4), (3, 2, 1, 21), (3, 2, 2, 105)])
def test_steinberg_product(n, q, a, value):
    assert steinberg_product(n, q, a) == value


def test_steinberg_product_is_exact_for_large_exponents():
    assert steinberg_product(5, 9, 8) % 9 ** 8 == 1


def test_steinberg_product_rejects_bad_parameters():
    with pytest.raises(SteinbergError) as err:
        steinberg_product(1, 3, 1)
    assert err.value.status_code == ExitCode.invalid_config
    with pytest.raises(SteinbergError):
        steinberg_product(2, 6, 1)


@pytest.mark.parametrize("q, ell, order", [(3, 2, 1), (2, 3, 2), (3, 5, 4), (2, 7, 3)])
def test_multiplicative_order(q, ell, order):
    assert multiplicative_order(q, ell) == order


@pytest.mark.parametrize("ell, n, q", [(2, 2, 3), (3, 3, 2), (2, 4, 3)])
def test_divisible_for_every_a(ell, n, q):
    report = divides_for_all_a(ell, n, q, 64)
    assert report.all_divisible
    assert report.period_covered
    assert report.first_failure is None
    assert len(report.rows) == 64


def test_first_failure():
    report = divides_for_all_a(5, 2, 3, 64)
    assert not report.all_divisible
    assert report.first_failure == 1
    assert report.rows[0].product_mod_ell == 4
    assert report.period == 4


def test_short_scan_does_not_cover_the_period():
    report = divides_for_all_a(7, 3, 2, 2)
    assert report.period == 3
    assert not report.period_covered


def test_divisibility_is_periodic_in_a():
    for ell, n, q in [(5, 4, 3), (7, 3, 2), (3, 5, 7)]:
        report = divides_for_all_a(ell, n, q, 40)
        rows = report.rows
        for a in range(40 - report.period):
            assert rows[a].residues == rows[a + report.period].residues


def test_scan_rejects_equal_characteristic():
    with pytest.raises(SteinbergError) as err:
        divides_for_all_a(3, 2, 9, 8)
    assert err.value.status_code == ExitCode.characteristic_clash


def test_scan_csv_rows():
    rows = scan_csv_rows(divides_for_all_a(3, 3, 2, 4))
    assert len(rows) == 4
    assert len(rows[0]) == len(SCAN_COLUMNS)
    assert rows[0][:4] == [3, 2, 3, 1]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 9])
def test_coprime_divisibility(n):
    for q in (2, 3, 5):
        if gcd(n, q) != 1:
            continue
        report = coprime_divisibility_check(n, q, 32)
        assert report.passed
        assert len(report.rows) == 32
        assert all(row.witness for row in report.rows)


def test_coprime_hypotheses():
    with pytest.raises(SteinbergError) as err:
        coprime_divisibility_check(4, 2, 8)
    assert err.value.status_code == ExitCode.invalid_config
    with pytest.raises(SteinbergError):
        coprime_divisibility_check(6, 5, 8)


def test_ell_candidates():
    assert ell_candidates(2, 3) == [2]
    assert ell_candidates(3, 2) == [3, 7]
