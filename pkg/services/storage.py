import csv
import io
import json
import logging
import os
import sys

from pydantic import BaseModel

from .common import ExitCode, SteinbergError

logger = logging.getLogger(__name__)


def _plain(report):
    if isinstance(report, BaseModel):
        return report.model_dump(mode="json")
    return report


def render_json(report) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def render_human(report, indent: int = 0) -> str:
    data = _plain(report)
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(render_human(value, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_human(item, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{data}")
    return "\n".join(lines) + "\n"


def render_csv(columns: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return out.getvalue()


def write_text(text: str, path: str | None) -> str | None:
    if path is None:
        sys.stdout.write(text)
        return None
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    logger.info("wrote %s (%d bytes)", path, len(text))
    return path


def write_report(report, path: str | None, fmt: str = "json", csv_table: tuple[list[str], list[list]] | None = None):
    if fmt == "json":
        text = render_json(report)
    elif fmt == "human":
        text = render_human(report)
    elif fmt == "csv":
        if csv_table is None:
            raise SteinbergError(ExitCode.invalid_config, "This command has no CSV form; use json or human.")
        text = render_csv(*csv_table)
    else:
        raise SteinbergError(ExitCode.invalid_config, f"Unknown output format {fmt!r}.")
    return write_text(text, path)


def write_certificate(text: str, directory: str, name: str) -> str:
    return write_text(text, os.path.join(directory, f"{name}.cert"))


def read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise SteinbergError(ExitCode.invalid_config, f"Cannot read {path}: {e.strerror}.") from e
