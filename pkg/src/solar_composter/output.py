"""File writers.  Writes are atomic (temp file in the target directory, then rename)."""

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .system_sim import TRACE_COLUMNS

CURVE_COLUMNS = ("voltage_V", "current_A", "power_W")


def atomic_write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the mode a plain open() would.
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _fmt(value):
    # repr() is the shortest round-trip form and never locale dependent.
    return repr(float(value))


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def curve_csv(curve):
    return _csv(CURVE_COLUMNS, ((p.voltage, p.current, p.power) for p in curve.points))


def trace_csv(trace):
    return _csv(TRACE_COLUMNS, trace.records())


def dump_json(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
