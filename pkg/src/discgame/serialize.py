"""Float-exact JSON and CSV helpers.

All floats are written with 17 significant digits so that every emitted file
round-trips through the matching reader bit-exactly.
"""

import json

import numpy as np


def fmt(x) -> str:
    """Format one float with 17 significant digits."""
    return format(float(x), ".17g")


def _encode(obj) -> str:
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        return "[" + ", ".join(_encode(v) for v in seq) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def dumps(obj) -> str:
    """Serialize ``obj`` to JSON, floats at 17 significant digits."""
    return _encode(obj)


def dump(obj, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header, rows) -> None:
    """Write rows of floats under a comma-separated header line."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path):
    """Read a numeric CSV written by :func:`write_csv`; returns (header, array)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data
