from pydantic import BaseModel

from .services import FieldTower


class LevelSchema(BaseModel):

    level : int
    size : int
    polynomial : list[int]


class TowerSchema(BaseModel):

    p : int
    d : int
    levels : list[LevelSchema]


def describe_tower(tower: FieldTower, levels: list[int]) -> TowerSchema:
    return TowerSchema(
        p=tower.p,
        d=tower.d,
        levels=[
            LevelSchema(level=a, size=tower.size(a), polynomial=list(tower.polynomial(a)))
            for a in sorted(set(levels))
        ],
    )
