import itertools
from enum import Enum

from pydantic import BaseModel, field_validator

from services.common import VERSION, is_prime, is_prime_power


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"
    human = "human"


def parse_q(value) -> int:
    """Accept 9, "9" or "3^2"."""
    if isinstance(value, int):
        return value
    text = str(value).strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


class RunConfig(BaseModel):

    command : str
    n : list[int] = [2]
    q : list[int] = [3]
    a : list[int] = [1]
    ell : list[int] = []
    a_max : int = 64
    seed : int = 20240601
    format : OutputFormat = OutputFormat.json
    out : str | None = None
    all_vectors : bool = False
    random : int | None = None
    sample : int | None = None
    roundtrips : int = 100
    i : list[int] = []
    levels : list[int] = [1]
    certs : str | None = None
    paths : list[str] = []
    with_spin : bool = False
    evidence : bool = False
    timing : bool = False

    @field_validator("q", mode="before")
    @classmethod
    def check_q(cls, values):
        out = [parse_q(v) for v in values]
        for q in out:
            if not is_prime_power(q):
                raise ValueError(f"q = {q} is not a prime power")
        return out

    @field_validator("n")
    @classmethod
    def check_n(cls, values):
        if any(n < 2 for n in values):
            raise ValueError("n must be at least 2")
        return values

    @field_validator("a", "levels")
    @classmethod
    def check_levels(cls, values):
        if any(a < 1 for a in values):
            raise ValueError("levels must be positive")
        return values

    @field_validator("ell")
    @classmethod
    def check_ell(cls, values):
        for ell in values:
            if not is_prime(ell):
                raise ValueError(f"ell = {ell} is not prime")
        return values

    @field_validator("seed")
    @classmethod
    def check_seed(cls, seed):
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return seed

    def grid(self, with_a: bool = True, with_ell: bool = True) -> list[tuple[int, ...]]:
        """Cases of the repeatable flags, sorted by case key."""
        axes = [sorted(set(self.n)), sorted(set(self.q))]
        if with_a:
            axes.append(sorted(set(self.a)))
        if with_ell:
            axes.append(sorted(set(self.ell)))
        return list(itertools.product(*axes))

    def parameters(self) -> dict:
        return self.model_dump(mode="json", exclude={"command", "format", "out", "timing"})


class RunReport(BaseModel):

    command : str
    version : str = VERSION
    parameters : dict
    seed : int
    wall_time : float | None = None
    passed : bool
    certificates : list[str] = []
    results : list[dict]
