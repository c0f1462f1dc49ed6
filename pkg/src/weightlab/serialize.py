"""Deterministic JSON/CSV emission.

JSON is rendered with sorted keys and two-space indentation; floats keep
Python's shortest round-trip representation.  CSV files open with the
versioned header comment ``# weightlab-csv v1`` so downstream parsers can
pin the schema.
"""

from __future__ import annotations

import json
import math
import sys
from typing import IO, Iterable, Optional, Sequence

CSV_HEADER = "# weightlab-csv v1"


def dump_json(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _format_field(value: object) -> str:
    if isinstance(value, float):
        value = float(value)  # numpy scalars are float subclasses with a noisy repr
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def dump_csv(columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = [CSV_HEADER, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_field(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(
    text: str, path: Optional[str], default_stream: Optional[IO[str]] = None
) -> None:
    """Write to ``path``, or to the default stream (sys.stdout) when no path
    is given.  The stream is resolved at call time so redirection works."""
    if path is None:
        stream = sys.stdout if default_stream is None else default_stream
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
