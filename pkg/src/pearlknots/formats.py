"""Deterministic geometry file emitters and their round-trip readers.

All floats print with 17 significant digits (value-preserving for float64)
and files use plain "\n" line endings, so identical inputs yield identical
bytes.
"""

from __future__ import annotations

import numpy as np

FLOAT_FMT = "%.17g"


def fmt_float(x) -> str:
    return FLOAT_FMT % float(x)


def write_ply(path, points) -> None:
    """ASCII PLY point cloud with double-precision x, y, z properties."""
    pts = np.asarray(points, dtype=float)
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(pts)}",
        "property double x",
        "property double y",
        "property double z",
        "end_header",
    ]
    for p in pts:
        lines.append(" ".join(fmt_float(v) for v in p))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_ply(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "ply":
            raise ValueError(f"{path}: not a PLY file")
        count = None
        props = []
        while True:
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated PLY header")
            tok = line.split()
            if tok[:2] == ["element", "vertex"]:
                count = int(tok[2])
            elif tok and tok[0] == "property":
                props.append(tok[-1])
            elif tok == ["end_header"]:
                break
        if count is None:
            raise ValueError(f"{path}: missing vertex element")
        ix, iy, iz = props.index("x"), props.index("y"), props.index("z")
        pts = np.empty((count, 3))
        for i in range(count):
            vals = fh.readline().split()
            pts[i] = float(vals[ix]), float(vals[iy]), float(vals[iz])
    return pts


def write_xyz(path, points) -> None:
    """Bare x y z lines."""
    pts = np.asarray(points, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pts:
            fh.write(" ".join(fmt_float(v) for v in p) + "\n")


def read_xyz(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [[float(v) for v in line.split()] for line in fh if line.strip()]
    return np.asarray(rows, dtype=float)


def write_obj_polyline(path, vertices, closed: bool = True) -> None:
    """OBJ polyline: v records plus one l record, repeating the first index
    to close the loop."""
    pts = np.asarray(vertices, dtype=float)
    lines = ["v " + " ".join(fmt_float(v) for v in p) for p in pts]
    idx = list(range(1, len(pts) + 1))
    if closed:
        idx.append(1)
    lines.append("l " + " ".join(str(i) for i in idx))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj_polyline(path):
    """Returns (vertices, closed)."""
    verts = []
    poly = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tok = line.split()
            if not tok:
                continue
            if tok[0] == "v":
                verts.append([float(v) for v in tok[1:4]])
            elif tok[0] == "l":
                poly = [int(i) for i in tok[1:]]
    if poly is None:
        raise ValueError(f"{path}: no polyline record")
    closed = poly[0] == poly[-1] and len(poly) > 1
    order = poly[:-1] if closed else poly
    pts = np.asarray([verts[i - 1] for i in order], dtype=float)
    return pts, closed
