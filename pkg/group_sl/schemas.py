from pydantic import BaseModel

from .models import GroupElement, RootDatum, root_to_str


class RootDatumSchema(BaseModel):

    n : int
    r : int
    w0_word : list[int]
    betas : list[str]


class GroupElementSchema(BaseModel):

    level : int
    rows : list[list[int]]


class BruhatFailureSchema(BaseModel):

    element : GroupElementSchema
    reason : str


def describe_datum(datum: RootDatum) -> RootDatumSchema:
    return RootDatumSchema(
        n=datum.n,
        r=datum.r,
        w0_word=list(datum.w0_word),
        betas=[root_to_str(beta) for beta in datum.betas],
    )


def describe_element(g: GroupElement) -> GroupElementSchema:
    n = g.n
    return GroupElementSchema(level=g.level, rows=[list(g.codes[i * n:(i + 1) * n]) for i in range(n)])


class BruhatReport(BaseModel):

    n : int
    q : int
    a : int
    mode : str
    elements : int
    expected_order : int
    distinct_elements : int | None
    distinct_cosets : int | None
    expected_cosets : int
    passed : bool
    failures : list[BruhatFailureSchema] = []
