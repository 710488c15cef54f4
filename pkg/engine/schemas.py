from __future__ import annotations

from pydantic import BaseModel

from group_sl.models import GroupElement
from module_mtr.schemas import stvector_from_text, stvector_to_text
from module_mtr.services import SteinbergModule
from services.common import ExitCode, SteinbergError

from .models import Certificate, Step

CERTIFICATE_MAGIC = "steinberg-certificate v1"


class CaseFailure(BaseModel):

    case : str
    detail : str


class CoefficientSumReport(BaseModel):

    n : int
    q : int
    a : int
    ell : int
    cases : int
    identity_value : int
    passed : bool
    failures : list[CaseFailure] = []


class CoreIdentityReport(BaseModel):

    n : int
    q : int
    ell : int
    i : int
    b : int
    tori : int
    lhs_support : int
    rhs_support : int
    passed : bool


class EtaAlternationReport(BaseModel):

    n : int
    q : int
    a : int
    ell : int
    simple_checked : int
    tori_checked : int
    passed : bool
    failures : list[CaseFailure] = []


class BasisReport(BaseModel):

    n : int
    q : int
    a : int
    ell : int
    cosets : int
    rank : int
    expected_rank : int
    roundtrips : int
    passed : bool


class CertificateSummary(BaseModel):

    vector : str
    steps : int
    multiplier_terms : int
    claimed_scalar : int
    max_level : int
    matrix_level : int
    level_bound : int
    verified : bool
    path : str | None = None


class ReachEtaReport(BaseModel):

    n : int
    q : int
    a : int
    ell : int
    mode : str
    certificates : list[CertificateSummary]
    max_level_seen : int
    passed : bool


class SpinReport(BaseModel):

    n : int
    q : int
    a : int
    ell : int
    dim : int
    mode : str
    vectors_spun : int
    vectors_covered : int
    irreducible : bool
    proper_dims : list[int]
    witness : str | None = None


class EvidenceRow(BaseModel):

    n : int
    q : int
    ell : int
    divides_for_all_a : bool
    period_covered : bool
    levels : list[int]
    reducible_at : list[int]
    probable : bool


# certificate files

def element_to_text(g: GroupElement) -> str:
    return str(g)


def element_from_text(token: str, module: SteinbergModule) -> GroupElement:
    try:
        head, body = token.rstrip("]").split("[")
        level = int(head.lstrip("L"))
        codes = [int(c) for row in body.split(";") for c in row.split(",")]
    except ValueError as e:
        raise SteinbergError(ExitCode.invalid_config, f"Malformed matrix {token!r}.") from e
    if len(codes) != module.group.n ** 2:
        raise SteinbergError(ExitCode.invalid_config, f"Matrix {token!r} has the wrong size.")
    for c in codes:
        module.tower.element(level, c)
    return module.group.from_codes(level, codes)


def certificate_to_text(cert: Certificate, module: SteinbergModule) -> str:
    lines = [
        CERTIFICATE_MAGIC,
        f"n {cert.n}",
        f"q {cert.p}^{cert.d}",
        f"a {cert.a}",
        f"ell {cert.ell}",
        f"w0 {' '.join(str(i) for i in cert.w0_word)}",
    ]
    for level in cert.levels_used():
        lines.append(f"polynomial {level} {' '.join(str(c) for c in module.tower.polynomial(level))}")
    lines += [
        f"levels {' '.join(str(b) for b in cert.level_chain)}",
        f"claimed {cert.claimed_scalar}",
        f"max_level {cert.max_level}",
        f"matrix_level {cert.matrix_level}",
        "vector",
    ]
    lines += ["  " + line for line in stvector_to_text(cert.vector).splitlines()]
    for step in cert.steps:
        lines.append(f"step {step.name} {len(step)}")
        lines += [f"  {element_to_text(g)} {c}" for g, c in step.sorted_terms()]
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_certificate_header(text: str) -> dict[str, int]:
    lines = text.splitlines()
    if not lines or lines[0] != CERTIFICATE_MAGIC:
        raise SteinbergError(ExitCode.invalid_config, "Not a certificate file.")
    header = {}
    for line in lines[1:6]:
        key, _, value = line.partition(" ")
        header[key] = value
    try:
        p, d = (int(x) for x in header["q"].split("^"))
        return {"n": int(header["n"]), "p": p, "d": d, "a": int(header["a"]), "ell": int(header["ell"])}
    except (KeyError, ValueError) as e:
        raise SteinbergError(ExitCode.invalid_config, "Certificate header is incomplete.") from e


def certificate_from_text(text: str, module: SteinbergModule) -> Certificate:
    header = parse_certificate_header(text)
    cert = Certificate(
        n=header["n"], p=header["p"], d=header["d"], a=header["a"], ell=header["ell"],
        w0_word=(), vector=None,
    )
    lines = text.splitlines()[5:]
    pos = 0
    vector_lines: list[str] = []
    current: tuple[str, list] | None = None
    steps: list[Step] = []

    def close():
        if current is not None:
            steps.append(Step(current[0], tuple(current[1])))

    section = None
    while pos < len(lines):
        line = lines[pos]
        pos += 1
        if line.startswith("  "):
            if section == "vector":
                vector_lines.append(line.strip())
            elif section == "step" and current is not None:
                token, c = line.split()
                current[1].append((element_from_text(token, module), int(c)))
            continue
        key, _, value = line.partition(" ")
        if key == "w0":
            cert.w0_word = tuple(int(i) for i in value.split())
            if cert.w0_word != module.group.datum.w0_word:
                raise SteinbergError(
                    ExitCode.invalid_config,
                    f"Certificate coordinates use w0 word {value}, this engine uses "
                    f"{' '.join(str(i) for i in module.group.datum.w0_word)}.",
                )
        elif key == "polynomial":
            level, *coeffs = (int(x) for x in value.split())
            if tuple(coeffs) != module.tower.polynomial(level):
                raise SteinbergError(ExitCode.invalid_config, f"Certificate uses a different polynomial at level {level}.")
        elif key == "levels":
            cert.level_chain = tuple(int(b) for b in value.split())
        elif key == "claimed":
            cert.claimed_scalar = int(value)
        elif key == "max_level":
            cert.max_level = int(value)
        elif key == "matrix_level":
            cert.matrix_level = int(value)
        elif key == "vector":
            section = "vector"
        elif key == "step":
            close()
            section = "step"
            current = (value.split()[0], [])
        elif key == "end":
            close()
            current = None
            break
        else:
            raise SteinbergError(ExitCode.invalid_config, f"Unexpected certificate line {line!r}.")
    else:
        raise SteinbergError(ExitCode.invalid_config, "Certificate is truncated.")
    cert.steps = steps
    cert.vector = stvector_from_text("\n".join(vector_lines), module)
    return cert

