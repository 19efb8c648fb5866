"""JSON and CSV exchange formats shared by all modules.

The matrix wire format is
``{"rows": n, "cols": m, "scalar": "complex", "data": [[re, im], ...]}``
with ``data`` flat in row-major order.  Subspaces travel as the matrix JSON of
their basis; charts as a pair of such objects plus a flavor tag; fiber objects
as a chart-point reference plus their matrix or term list.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .atlas import ChartId, ChartPoint, Subspace
from .bundles import Covector, TangentVector, TensorCovector
from .operators import Operator


def operator_to_json(op: Operator) -> dict:
    mat = op.matrix if isinstance(op, Operator) else Operator(op).matrix
    data = [[float(z.real), float(z.imag)] for z in mat.reshape(-1)]
    return {"rows": mat.shape[0], "cols": mat.shape[1], "scalar": "complex", "data": data}


def operator_from_json(obj: dict) -> Operator:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    if obj.get("scalar") != "complex":
        raise ValueError(f"unsupported scalar field {obj.get('scalar')!r}")
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    return Operator(flat.reshape(rows, cols))


def operator_from_csv(source) -> Operator:
    """Real-only CSV import: one matrix row per line."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read() if hasattr(source, "read") else str(source)
    rows = []
    for record in csv.reader(io.StringIO(text)):
        if not record:
            continue
        rows.append([float(cell) for cell in record])
    if not rows:
        raise ValueError("empty CSV input")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("CSV rows have inconsistent lengths")
    return Operator(np.array(rows, dtype=float))


def _vector_to_json(vec: np.ndarray) -> dict:
    return operator_to_json(Operator(np.asarray(vec, dtype=complex).reshape(-1, 1)))


def _vector_from_json(obj: dict) -> np.ndarray:
    op = operator_from_json(obj)
    if op.cols != 1:
        raise ValueError(f"expected a column vector, got shape {op.shape}")
    return op.matrix.reshape(-1)


def subspace_to_json(s: Subspace) -> dict:
    return operator_to_json(s.basis)


def subspace_from_json(obj: dict) -> Subspace:
    return Subspace(operator_from_json(obj))


def chart_to_json(chart: ChartId) -> dict:
    return {"flavor": chart.flavor,
            "f": subspace_to_json(chart.f),
            "g": subspace_to_json(chart.g)}


def chart_from_json(obj: dict) -> ChartId:
    return ChartId(subspace_from_json(obj["f"]), subspace_from_json(obj["g"]),
                   flavor=obj["flavor"])


def chart_point_to_json(pt: ChartPoint) -> dict:
    return {"chart": chart_to_json(pt.chart), "coord": operator_to_json(pt.coord)}


def chart_point_from_json(obj: dict) -> ChartPoint:
    return ChartPoint(chart_from_json(obj["chart"]), operator_from_json(obj["coord"]))


def tangent_to_json(v: TangentVector) -> dict:
    return {"at": chart_point_to_json(v.at), "direction": operator_to_json(v.direction)}


def tangent_from_json(obj: dict) -> TangentVector:
    return TangentVector(chart_point_from_json(obj["at"]),
                         operator_from_json(obj["direction"]))


def covector_to_json(c: Covector) -> dict:
    return {"at": chart_point_to_json(c.at), "form": operator_to_json(c.form),
            "class_tag": c.class_tag, "metadata": c.metadata}


def covector_from_json(obj: dict) -> Covector:
    return Covector(chart_point_from_json(obj["at"]), operator_from_json(obj["form"]),
                    class_tag=obj.get("class_tag", "unrestricted"),
                    metadata=obj.get("metadata"))


def tensor_covector_to_json(tc: TensorCovector) -> dict:
    return {"at": chart_point_to_json(tc.at),
            "terms": [{"x": _vector_to_json(x), "y": _vector_to_json(y)}
                      for x, y in tc.terms]}


def tensor_covector_from_json(obj: dict) -> TensorCovector:
    terms = tuple((_vector_from_json(t["x"]), _vector_from_json(t["y"]))
                  for t in obj["terms"])
    return TensorCovector(chart_point_from_json(obj["at"]), terms)


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""
    return _render(obj)


def _render(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if value != value or value in (float("inf"), float("-inf")):
            return "null"
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        body = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    raise TypeError(f"cannot render {type(obj).__name__} canonically")
