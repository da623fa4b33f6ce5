"""Plain-text I/O for labeled point clouds and registration reports.

Two ASCII cloud formats are supported:

* ``XYZ_ASCII``: one point per line, ``x y z [intensity] [label]``,
  whitespace-separated, ``#`` comment lines skipped.
* ``PLY_ASCII``: standard ASCII PLY with vertex properties x, y, z and
  optionally intensity and label.

Labels on disk follow the two-class separation convention: 0 = wood,
1 = leaf; an absent column (or -1) means unlabeled. Binary PLY is rejected.
"""

from __future__ import annotations

import csv
import enum
import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import PointCloud, RigidTransform
from .errors import CloudParseError, EmptyCloudError

# full-precision floats so a write/read cycle loses nothing measurable
_FLOAT_FMT = "%.17g"


class CloudFileFormat(enum.Enum):
    XYZ_ASCII = "xyz"
    PLY_ASCII = "ply"


def infer_format(path: str | Path) -> CloudFileFormat:
    """Format from the file extension (.xyz or .ply)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".xyz":
        return CloudFileFormat.XYZ_ASCII
    if suffix == ".ply":
        return CloudFileFormat.PLY_ASCII
    raise ValueError(f"cannot infer cloud format from extension {suffix!r} (expected .xyz or .ply)")


def read_cloud(path: str | Path, fmt: Optional[CloudFileFormat] = None) -> PointCloud:
    path = Path(path)
    fmt = fmt or infer_format(path)
    if fmt is CloudFileFormat.XYZ_ASCII:
        return _read_xyz(path)
    return _read_ply(path)


def write_cloud(cloud: PointCloud, path: str | Path, fmt: Optional[CloudFileFormat] = None) -> None:
    path = Path(path)
    fmt = fmt or infer_format(path)
    if fmt is CloudFileFormat.XYZ_ASCII:
        _write_xyz(cloud, path)
    else:
        _write_ply(cloud, path)


# ---------------------------------------------------------------------------
# XYZ


def _parse_float(token: str, path: Path, line_no: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise CloudParseError(path, line_no, f"bad {what} value {token!r}") from None
    if not np.isfinite(value):
        raise CloudParseError(path, line_no, f"non-finite {what} value {token!r}")
    return value


def _read_xyz(path: Path) -> PointCloud:
    positions: list[list[float]] = []
    intensities: list[float] = []
    labels: list[int] = []
    width = 0
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) not in (3, 4, 5):
                raise CloudParseError(path, line_no, f"expected 3-5 fields, got {len(tokens)}")
            if width == 0:
                width = len(tokens)
            elif len(tokens) != width:
                raise CloudParseError(
                    path, line_no, f"inconsistent field count: {len(tokens)} (file uses {width})"
                )
            x = _parse_float(tokens[0], path, line_no, "x")
            y = _parse_float(tokens[1], path, line_no, "y")
            z = _parse_float(tokens[2], path, line_no, "z")
            positions.append([x, y, z])
            if width >= 4:
                intensities.append(_parse_float(tokens[3], path, line_no, "intensity"))
            if width == 5:
                lab = int(_parse_float(tokens[4], path, line_no, "label"))
                if lab not in (0, 1, -1):
                    raise CloudParseError(path, line_no, f"label must be 0, 1 or -1, got {lab}")
                labels.append(lab)
    if not positions:
        raise EmptyCloudError(f"no points in {path}")
    return PointCloud(
        np.array(positions),
        np.array(intensities) if intensities else None,
        np.array(labels) if labels else None,
    )


def _write_xyz(cloud: PointCloud, path: Path) -> None:
    cols = ["x", "y", "z"]
    if cloud.intensity is not None:
        cols.append("intensity")
    if cloud.labels is not None:
        if cloud.intensity is None:
            # label column is positional slot 5; pad slot 4 with zeros
            cols.append("intensity")
        cols.append("label")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# columns: " + " ".join(cols) + "\n")
        for i in range(len(cloud)):
            fields = [_FLOAT_FMT % v for v in cloud.positions[i]]
            if "intensity" in cols:
                inten = 0.0 if cloud.intensity is None else cloud.intensity[i]
                fields.append(_FLOAT_FMT % inten)
            if cloud.labels is not None:
                fields.append(str(int(cloud.labels[i])))
            fh.write(" ".join(fields) + "\n")


# ---------------------------------------------------------------------------
# PLY


def _read_ply(path: Path) -> PointCloud:
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise CloudParseError(path, 1, "not a PLY file (missing 'ply' magic)")

    # header: element/property declarations up to end_header
    elements: list[tuple[str, int, list[str]]] = []  # (name, count, property names)
    line_no = 1
    data_start = None
    for line_no, raw in enumerate(lines[1:], start=2):
        tokens = raw.strip().split()
        if not tokens or tokens[0] == "comment":
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise CloudParseError(path, line_no, "only ASCII PLY is supported")
        elif tokens[0] == "element":
            if len(tokens) != 3:
                raise CloudParseError(path, line_no, "malformed element declaration")
            try:
                count = int(tokens[2])
            except ValueError:
                raise CloudParseError(path, line_no, f"bad element count {tokens[2]!r}") from None
            elements.append((tokens[1], count, []))
        elif tokens[0] == "property":
            if not elements:
                raise CloudParseError(path, line_no, "property before any element")
            if tokens[1] == "list":
                elements[-1][2].append(f"list:{tokens[-1]}")
            else:
                elements[-1][2].append(tokens[-1])
        elif tokens[0] == "end_header":
            data_start = line_no
            break
        else:
            raise CloudParseError(path, line_no, f"unexpected header keyword {tokens[0]!r}")
    if data_start is None:
        raise CloudParseError(path, line_no, "missing end_header")

    vertex_rows: list[list[str]] = []
    vertex_props: list[str] = []
    cursor = data_start  # index into `lines` of the last consumed line
    for name, count, props in elements:
        rows = lines[cursor : cursor + count]
        if len(rows) < count:
            raise CloudParseError(path, len(lines), f"element {name!r} truncated")
        cursor += count
        if name == "vertex":
            vertex_props = props
            vertex_rows = [r.split() for r in rows]

    if not vertex_rows:
        raise EmptyCloudError(f"no vertex data in {path}")
    for axis in ("x", "y", "z"):
        if axis not in vertex_props:
            raise CloudParseError(path, 1, f"vertex element lacks property {axis!r}")

    col = {p: i for i, p in enumerate(vertex_props)}
    n = len(vertex_rows)
    positions = np.empty((n, 3))
    intensity = np.empty(n) if "intensity" in col else None
    labels = np.empty(n, dtype=np.int8) if "label" in col else None
    for i, tokens in enumerate(vertex_rows):
        row_no = data_start + 1 + i
        if len(tokens) != len(vertex_props):
            raise CloudParseError(path, row_no, f"expected {len(vertex_props)} fields")
        for j, axis in enumerate(("x", "y", "z")):
            positions[i, j] = _parse_float(tokens[col[axis]], path, row_no, axis)
        if intensity is not None:
            intensity[i] = _parse_float(tokens[col["intensity"]], path, row_no, "intensity")
        if labels is not None:
            lab = int(_parse_float(tokens[col["label"]], path, row_no, "label"))
            if lab not in (0, 1, -1):
                raise CloudParseError(path, row_no, f"label must be 0, 1 or -1, got {lab}")
            labels[i] = lab
    return PointCloud(positions, intensity, labels)


def _write_ply(cloud: PointCloud, path: Path) -> None:
    header = ["ply", "format ascii 1.0", f"element vertex {len(cloud)}"]
    header += [f"property double {axis}" for axis in ("x", "y", "z")]
    if cloud.intensity is not None:
        header.append("property double intensity")
    if cloud.labels is not None:
        header.append("property int label")
    header.append("end_header")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(header) + "\n")
        for i in range(len(cloud)):
            fields = [_FLOAT_FMT % v for v in cloud.positions[i]]
            if cloud.intensity is not None:
                fields.append(_FLOAT_FMT % cloud.intensity[i])
            if cloud.labels is not None:
                fields.append(str(int(cloud.labels[i])))
            fh.write(" ".join(fields) + "\n")


# ---------------------------------------------------------------------------
# Reports


def transform_to_dict(t: RigidTransform) -> dict[str, list[float]]:
    """Row-major rotation plus translation, as plain lists."""
    return {
        "rotation": [float(v) for v in t.rotation.reshape(9)],
        "translation": [float(v) for v in t.translation],
    }


def transform_from_dict(d: Mapping[str, Sequence[float]]) -> RigidTransform:
    return RigidTransform(np.array(d["rotation"], dtype=float).reshape(3, 3), np.array(d["translation"], dtype=float))


def _json_default(obj: Any) -> Any:
    if isinstance(obj, RigidTransform):
        return transform_to_dict(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_report(report: Any, path: str | Path) -> None:
    """Serialize a registration report (or any mapping) as indented JSON.

    Rigid transforms serialize as row-major rotation plus translation lists,
    so an identity rotation reads back as 1,0,0,0,1,0,0,0,1.
    """
    data = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    path = Path(path)
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(data, fh, indent=2, default=_json_default)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


REPORT_CSV_COLUMNS = [
    "pair_id",
    "coarse_rmse",
    "coarse_hausdorff",
    "fine_rmse",
    "fine_hausdorff",
    "coarse_seconds",
    "fine_seconds",
    "total_seconds",
]


def write_reports_csv(reports: Iterable[Any], path: str | Path) -> None:
    """One delimited row per registered pair (metric and timing columns)."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_CSV_COLUMNS)
        writer.writeheader()
        for i, report in enumerate(reports):
            data = report.to_dict() if hasattr(report, "to_dict") else dict(report)
            row = {"pair_id": data.get("pair_id", i)}
            for key in REPORT_CSV_COLUMNS[1:]:
                row[key] = f"{float(data[key]):.6f}"
            writer.writerow(row)
