"""CSV writers and readers for curves, diagrams, landscapes and tables.

Floats are written with 17 significant digits so they round-trip exactly.
"""

import csv
from pathlib import Path

import numpy as np


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """Return ``(header, rows)`` with every cell parsed as float."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(c) for c in row] for row in r]
    return header, rows


def curve_header(dim: int):
    return ["t"] + ["x", "y", "z"][:dim] if dim <= 3 else ["t"] + [f"x{i}" for i in range(dim)]


def write_curve(path, params, points):
    points = np.asarray(points)
    return write_csv(path, curve_header(points.shape[1]),
                     (([t] + list(p)) for t, p in zip(params, points)))


def write_diagram(path, diagram):
    rows = []
    for dim in diagram.dims:
        for b, d in diagram[dim]:
            rows.append((dim, b, d))
    return write_csv(path, ["dim", "birth", "death"], rows)


def write_landscape(path, landscape):
    rows = []
    for k in range(1, landscape.k_max + 1):
        for t, lam in zip(landscape.grid, landscape.levels[k - 1]):
            rows.append((k, t, lam))
    return write_csv(path, ["k", "t", "lambda"], rows)


def write_density(path, x, f):
    return write_csv(path, ["x", "f"], zip(x, f))
