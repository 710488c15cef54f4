from pydantic import BaseModel

from services.common import ExitCode, SteinbergError

from .models import CosetLabel, MVector, StVector
from .services import SteinbergModule


class VectorSchema(BaseModel):

    ell : int
    terms : list[tuple[str, int]]


def describe_vector(v: MVector | StVector) -> VectorSchema:
    if isinstance(v, StVector):
        return VectorSchema(ell=v.ell, terms=[(coords_to_text(k), c) for k, c in v.items()])
    return VectorSchema(ell=v.ell, terms=[(str(k), c) for k, c in v.items()])


def coords_to_text(coords) -> str:
    return ",".join(str(c) for c in coords) or "-"


def mvector_to_text(v: MVector) -> str:
    lines = [f"mvector ell={v.ell}"]
    lines += [f"{label} {c}" for label, c in v.items()]
    return "\n".join(lines) + "\n"


def stvector_to_text(s: StVector) -> str:
    lines = [f"stvector ell={s.ell}"]
    lines += [f"{coords_to_text(coords)} {c}" for coords, c in s.items()]
    return "\n".join(lines) + "\n"


def _body(text: str, kind: str, module: SteinbergModule) -> list[list[str]]:
    lines = [line.split() for line in text.strip().splitlines() if line.strip()]
    if not lines or lines[0] != [kind, f"ell={module.ell}"]:
        raise SteinbergError(ExitCode.invalid_config, f"Expected a {kind} over GF({module.ell}).")
    return lines[1:]


def parse_label(token: str, module: SteinbergModule) -> CosetLabel:
    try:
        perm, level, codes = token.split("/")
        w = module.group.weyl_element(tuple(int(j) for j in perm.split(".")))
        label = CosetLabel.build(w, int(level), [int(c) for c in codes.split(",") if c], module.tower)
    except ValueError as e:
        raise SteinbergError(ExitCode.invalid_config, f"Malformed coset label {token!r}.") from e
    if len(label.codes) != w.length:
        raise SteinbergError(ExitCode.invalid_config, f"Coset label {token!r} needs {w.length} coordinates.")
    return label


def parse_coords(token: str, module: SteinbergModule) -> tuple:
    if token == "-":
        return ()
    out = []
    for part in token.split(","):
        level, code = part.split(":")
        out.append(module.tower.normalize(module.tower.element(int(level), int(code))))
    return tuple(out)


def mvector_from_text(text: str, module: SteinbergModule) -> MVector:
    return MVector(module.ell, [(parse_label(label, module), int(c)) for label, c in _body(text, "mvector", module)])


def stvector_from_text(text: str, module: SteinbergModule) -> StVector:
    return StVector(module.ell, [(parse_coords(k, module), int(c)) for k, c in _body(text, "stvector", module)])
