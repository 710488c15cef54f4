from pydantic import BaseModel, field_validator

from services.common import is_prime, is_prime_power


class QIntParams(BaseModel):

    n : int
    q : int
    a : int = 1
    ell : int | None = None

    @field_validator("n")
    @classmethod
    def check_n(cls, n):
        if n < 2:
            raise ValueError("n must be at least 2")
        return n

    @field_validator("q")
    @classmethod
    def check_q(cls, q):
        if not is_prime_power(q):
            raise ValueError(f"q = {q} is not a prime power")
        return q

    @field_validator("a")
    @classmethod
    def check_a(cls, a):
        if a < 1:
            raise ValueError("a must be positive")
        return a

    @field_validator("ell")
    @classmethod
    def check_ell(cls, ell):
        if ell is not None and not is_prime(ell):
            raise ValueError(f"ell = {ell} is not prime")
        return ell


class ScanRow(BaseModel):

    n : int
    q : int
    ell : int
    a : int
    residues : list[int]
    product_mod_ell : int
    divisible : bool


class ScanReport(BaseModel):

    n : int
    q : int
    ell : int
    a_max : int
    period : int
    period_covered : bool
    all_divisible : bool
    first_failure : int | None
    rows : list[ScanRow]


class CoprimeRow(BaseModel):

    a : int
    divisible : bool
    witness : str


class CoprimeReport(BaseModel):

    n : int
    q : int
    a_max : int
    passed : bool
    rows : list[CoprimeRow]


SCAN_COLUMNS = ["n", "q", "ell", "a", "residues", "product_mod_ell", "divisible"]


def scan_csv_rows(report: ScanReport) -> list[list]:
    return [
        [row.n, row.q, row.ell, row.a, " ".join(str(x) for x in row.residues), row.product_mod_ell, row.divisible]
        for row in report.rows
    ]
