"""Delimited text output shared by the library and the CLI."""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def format_number(v) -> str:
    """12 significant digits; lowercase scientific notation below 1e-4."""
    if isinstance(v, (bool, str)) or v is None:
        return "" if v is None else str(v)
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == 0:
        return "0"
    return format(v, ".12g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence], footer: Iterable[str] = ()) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    lines.extend(f"# {f}" for f in footer)
    return "\n".join(lines) + "\n"


def key_value_text(items: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{k}: {format_number(v)}\n" for k, v in items)
