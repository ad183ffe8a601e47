"""CSV ingestion and deterministic serialization for the CLI.

Two sample layouts are accepted, distinguished by the required header
row: a single ``theta`` column of radians (points on S^1), or columns
``x1..xd`` of coordinates renormalized on load (acceptance tolerance
1e-6).  Rod files carry ``x,y,theta`` with theta reduced mod pi.
Comment lines start with ``#``; values are written with 12 significant
digits.

Sample files are written in canonical form: the stored digits are a
fixed point of parse -> renormalize -> format, so re-serializing a
parsed sample reproduces the file byte for byte.
"""

import csv

import numpy as np

from .core import SampleSet, as_unit_rows
from .exceptions import DataFormatError
from .order import Rod


def _fmt(v):
    return f"{v:.12g}"


def _read_rows(path):
    """Yield (line_number, fields) for data rows; header handled by caller."""
    with open(path, "r", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            yield lineno, next(csv.reader([text]))


def _parse_header(fields, path):
    names = [f.strip().lower() for f in fields]
    if names == ["theta"]:
        return "theta"
    if names == [f"x{i}" for i in range(1, len(names) + 1)] and len(names) >= 2:
        return "vectors"
    raise DataFormatError(
        f"{path}: expected header 'theta' or 'x1..xd', got {fields!r}"
    )


def read_sample_csv(path):
    """Load a sample CSV into a SampleSet.

    Raises DataFormatError naming every malformed line.
    """
    rows = _read_rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise DataFormatError(f"{path}: file holds no header row") from None
    kind = _parse_header(header, path)
    width = 1 if kind == "theta" else len(header)

    values = []
    bad_lines = []
    for lineno, fields in rows:
        if len(fields) != width:
            bad_lines.append(lineno)
            continue
        try:
            values.append([float(f) for f in fields])
        except ValueError:
            bad_lines.append(lineno)
    if bad_lines:
        raise DataFormatError(
            f"{path}: malformed rows at lines {', '.join(map(str, bad_lines))}"
        )
    if not values:
        raise DataFormatError(f"{path}: file holds no data rows")
    arr = np.asarray(values)
    if kind == "theta":
        return SampleSet.from_angles(arr[:, 0])
    try:
        return SampleSet(arr)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def read_rods_csv(path):
    """Load a rod CSV (header x,y,theta) into a list of Rod."""
    rows = _read_rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise DataFormatError(f"{path}: file holds no header row") from None
    names = [f.strip().lower() for f in header]
    for required in ("x", "y", "theta"):
        if required not in names:
            raise DataFormatError(f"{path}: missing required column '{required}'")
    ix, iy, it = names.index("x"), names.index("y"), names.index("theta")

    rods = []
    bad_lines = []
    for lineno, fields in rows:
        if len(fields) != len(names):
            bad_lines.append(lineno)
            continue
        try:
            rods.append(Rod(float(fields[ix]), float(fields[iy]), float(fields[it])))
        except ValueError:
            bad_lines.append(lineno)
    if bad_lines:
        raise DataFormatError(
            f"{path}: malformed rows at lines {', '.join(map(str, bad_lines))}"
        )
    if not rods:
        raise DataFormatError(f"{path}: file holds no data rows")
    return rods


def _canonical_sample_lines(points):
    """12-digit rows that are a fixed point of parse+renormalize+format."""
    rows = [[_fmt(v) for v in row] for row in np.asarray(points, dtype=np.float64)]
    for _ in range(10):
        parsed = as_unit_rows([[float(s) for s in row] for row in rows])
        redone = [[_fmt(v) for v in row] for row in parsed]
        if redone == rows:
            return rows
        rows = redone
    return rows


def write_sample_csv(path, points):
    """Write sample vectors with the canonical 12-digit formatting."""
    pts = as_unit_rows(points, what="sample points")
    rows = _canonical_sample_lines(pts)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"x{i}" for i in range(1, pts.shape[1] + 1)) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_rods_csv(path, rods):
    """Write rods as x,y,theta rows (12 significant digits)."""
    with open(path, "w", newline="") as fh:
        fh.write("x,y,theta\n")
        for rod in rods:
            fh.write(f"{_fmt(rod.x)},{_fmt(rod.y)},{_fmt(rod.theta)}\n")


def write_field_csv(path, field):
    """Write a local order field as cx,cy,lambda,director_angle,count.

    Absent cells leave the lambda and director columns empty.
    """
    with open(path, "w", newline="") as fh:
        fh.write("cx,cy,lambda,director_angle,count\n")
        for cx, cy, lam, ang, count in field.cells():
            lam_s = "" if lam is None else _fmt(lam)
            ang_s = "" if ang is None else _fmt(ang)
            fh.write(f"{_fmt(cx)},{_fmt(cy)},{lam_s},{ang_s},{count}\n")
