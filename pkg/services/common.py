import logging
import os
from enum import Enum
from functools import lru_cache
from math import gcd

from dotenv import load_dotenv
from pydantic import BaseModel, field_validator

VERSION = "0.3.0"

load_dotenv()

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ExitCode(int, Enum):
    passed = 0
    assertion_failure = 1
    invalid_config = 2
    characteristic_clash = 3


class SteinbergError(Exception):
    def __init__(self, status_code: ExitCode, detail: str):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail

    def __str__(self):
        return f"[{self.status_code.name}] {self.detail}"


class Settings(BaseModel):

    seed : int = 20240601
    log_level : str = "WARNING"
    exhaustive_limit : int = 2 ** 20
    random_spins : int = 64
    bruhat_limit : int = 10 ** 5
    a_max : int = 64
    record_timing : bool = False
    output_dir : str | None = None

    @field_validator("log_level")
    @classmethod
    def known_level(cls, value: str) -> str:
        if value.upper() not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {', '.join(LOG_LEVELS)}")
        return value.upper()


@lru_cache
def get_settings() -> Settings:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(f"STEINBERG_{name.upper()}")
        if raw is not None and raw != "":
            values[name] = raw
    return Settings(**values)


def configure_logging(level: str | int = "WARNING"):
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor(n: int) -> dict[int, int]:
    """Prime factorization by trial division; n is always desk sized here."""
    if n < 1:
        raise SteinbergError(ExitCode.invalid_config, f"Cannot factor {n}.")
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split a prime power q into (p, d) with q = p^d."""
    parts = factor(q) if q > 1 else {}
    if len(parts) != 1:
        raise SteinbergError(ExitCode.invalid_config, f"q = {q} is not a prime power.")
    (p, d), = parts.items()
    return p, d


def is_prime_power(n: int) -> bool:
    return n > 1 and len(factor(n)) == 1


def characteristic_check(p: int, ell: int):
    if not is_prime(ell):
        raise SteinbergError(ExitCode.invalid_config, f"ell = {ell} is not prime.")
    if ell == p:
        raise SteinbergError(
            ExitCode.characteristic_clash,
            f"ell = {ell} equals p = {p}; the construction assumes char k != char F_q.",
        )


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b
