from dataclasses import dataclass, field


@dataclass
class Outcome:
    """What a command handler hands back for the report envelope."""

    passed : bool
    results : list[dict]
    certificates : list[str] = field(default_factory=list)
    csv_table : tuple[list[str], list[list]] | None = None
