import logging
from math import gcd

from pydantic import ValidationError

from services.common import ExitCode, SteinbergError, characteristic_check, factor, is_prime, is_prime_power, prime_power

from .schemas import QIntParams, CoprimeReport, CoprimeRow, ScanReport, ScanRow

logger = logging.getLogger(__name__)


def _params(**values) -> QIntParams:
    try:
        return QIntParams(**values)
    except ValidationError as e:
        raise SteinbergError(ExitCode.invalid_config, e.errors()[0]["msg"]) from e


def q_integer(m: int, q: int, a: int) -> int:
    """A_m = 1 + q^a + ... + q^{(m-1)a}, exact."""
    if m < 1:
        raise SteinbergError(ExitCode.invalid_config, f"A_m needs m >= 1, got {m}.")
    step = q ** a
    total, term = 0, 1
    for _ in range(m):
        total += term
        term *= step
    return total


def steinberg_product(n: int, q: int, a: int) -> int:
    params = _params(n=n, q=q, a=a)
    out = 1
    for m in range(2, params.n + 1):
        out *= q_integer(m, q, a)
    return out


def multiplicative_order(q: int, ell: int) -> int:
    if q % ell == 0:
        raise SteinbergError(ExitCode.invalid_config, f"{q} is not a unit mod {ell}.")
    order = ell - 1
    for prime in factor(order) if order > 1 else {}:
        while order % prime == 0 and pow(q, order // prime, ell) == 1:
            order //= prime
    return order


def divides_for_all_a(ell: int, n: int, q: int, a_max: int) -> ScanReport:
    """Scan a = 1..a_max for ell | ∏_{m=2}^{n} A_m(q, a).

    Divisibility depends on a only through q^a mod ell, so a scan reaching
    the multiplicative order of q mod ell covers every a.
    """
    _params(n=n, q=q, ell=ell)
    if a_max < 1:
        raise SteinbergError(ExitCode.invalid_config, "a_max must be positive.")
    characteristic_check(prime_power(q)[0], ell)
    period = multiplicative_order(q, ell)
    rows = []
    first_failure = None
    for a in range(1, a_max + 1):
        residues = [q_integer(m, q, a) % ell for m in range(2, n + 1)]
        product = steinberg_product(n, q, a) % ell
        divisible = product == 0
        if not divisible and first_failure is None:
            first_failure = a
        rows.append(ScanRow(n=n, q=q, ell=ell, a=a, residues=residues, product_mod_ell=product, divisible=divisible))
    logger.info("scanned ell=%d n=%d q=%d up to a=%d, period %d", ell, n, q, a_max, period)
    return ScanReport(
        n=n, q=q, ell=ell, a_max=a_max, period=period, period_covered=a_max >= period,
        all_divisible=first_failure is None, first_failure=first_failure, rows=rows,
    )


def _witness(n: int, q: int, a: int) -> str | None:
    """Name the factor A_k of the product that n divides, following pigeonhole on A_1..A_n mod n."""
    seen: dict[int, int] = {}
    for m in range(1, n + 1):
        res = q_integer(m, q, a) % n
        if res == 0 and m >= 2:
            return f"A_{m} = 0 mod {n}"
        if res in seen:
            l = seen[res]
            if q_integer(m - l, q, a) % n == 0:
                return f"A_{m} = A_{l} mod {n}, so {n} | A_{m - l}"
            return None
        seen[res] = m
    return None


def coprime_divisibility_check(n: int, q: int, a_max: int) -> CoprimeReport:
    _params(n=n, q=q)
    if gcd(n, q) != 1:
        raise SteinbergError(ExitCode.invalid_config, f"Hypothesis violated: gcd(n, q) = {gcd(n, q)} != 1.")
    if not is_prime_power(n):
        raise SteinbergError(ExitCode.invalid_config, f"Hypothesis violated: n = {n} is not a prime power.")
    rows = []
    for a in range(1, a_max + 1):
        divisible = steinberg_product(n, q, a) % n == 0
        witness = _witness(n, q, a)
        if not divisible or witness is None:
            raise SteinbergError(
                ExitCode.assertion_failure,
                f"n = {n} does not divide the product for q = {q}, a = {a}.",
            )
        rows.append(CoprimeRow(a=a, divisible=divisible, witness=witness))
    return CoprimeReport(n=n, q=q, a_max=a_max, passed=True, rows=rows)


def ell_candidates(n: int, q: int, limit: int = 50) -> list[int]:
    """Primes ell < limit, ell ∤ q, dividing the product at a = 1."""
    product = steinberg_product(n, q, 1)
    return [ell for ell in range(2, limit) if is_prime(ell) and q % ell and product % ell == 0]
