import csv
import io
import json
import math
import os
from typing import Any, Dict, List, Optional, Sequence

from logzero import logger

from etspectra.exceptions import UsageError

FORMATS = ("csv", "json")


def validate_out_path(path: str, fmt: str) -> str:
    if fmt not in FORMATS:
        raise UsageError(
            "Output format must be one of {}, got '{}'".format(FORMATS, fmt)
        )

    # A directory is never a valid target, the caller must name the file.
    if os.path.isdir(path):
        raise UsageError(
            "Output path is a directory, please provide a file name ({})".format(path)
        )

    root, ext = os.path.splitext(path)
    if not ext.lower() == ".{}".format(fmt):
        path = "{}.{}".format(path, fmt)
        logger.warning(
            "[CLI] File extension .{} not provided in path. Appended it ({})".format(
                fmt, path
            )
        )

    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError("Output directory does not exist ({})".format(parent))

    return path


def format_value(value: Any) -> str:
    """12 significant digits for reals, blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return "{:.12g}".format(value)
    return str(value)


def json_value(value: Any) -> Any:
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return float("{:.12g}".format(value))
    if isinstance(value, dict):
        return {k: json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_value(v) for v in value]
    return value


def render_csv(header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(
    header: Sequence[str], rows: List[Sequence[Any]], metadata: Dict[str, Any]
) -> str:
    payload = {
        "metadata": json_value(metadata),
        "columns": list(header),
        "rows": [dict(zip(header, json_value(list(row)))) for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        print(text, end="")
        return
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info("[CLI] Wrote {}".format(path))
