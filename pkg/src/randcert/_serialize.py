"""Output emission: 17-significant-digit floats, JSON/CSV rendering, atomic writes.

Floats are printed with %.17g so every 64-bit value round-trips exactly;
grids use CSV, single results use JSON.  Files are written to a temp path in
the destination directory and renamed into place.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile


def fmt_float(x: float) -> str:
    """Shortest-of-17-significant-digits decimal that round-trips the double."""
    if math.isnan(x):
        raise ValueError("refusing to serialize NaN")
    return f"{x:.17g}"


def _json_chunks(obj, indent: int, level: int):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{\n"
        for i, (k, v) in enumerate(obj.items()):
            yield f'{pad_in}"{k}": '
            yield from _json_chunks(v, indent, level + 1)
            yield ",\n" if i < len(obj) - 1 else "\n"
        yield pad + "}"
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            yield "[]"
            return
        yield "[\n"
        for i, v in enumerate(seq):
            yield pad_in
            yield from _json_chunks(v, indent, level + 1)
            yield ",\n" if i < len(seq) - 1 else "\n"
        yield pad + "]"
    elif isinstance(obj, bool):
        yield "true" if obj else "false"
    elif isinstance(obj, int):
        yield str(obj)
    elif isinstance(obj, float):
        yield fmt_float(obj)
    elif obj is None:
        yield "null"
    elif isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        yield f'"{escaped}"'
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    return "".join(_json_chunks(obj, indent, 0)) + "\n"


def to_csv(header: list[str], rows) -> str:
    """Render rows of str/float/int/bool/None cells; None becomes empty."""
    out = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if v is None:
                cells.append("")
            elif isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, float):
                cells.append(fmt_float(v))
            else:
                cells.append(str(v))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def emit(text: str, path: str | None) -> None:
    """Write to stdout, or atomically (temp file + rename) to `path`."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".randcert-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
