"""JSON and CSV interchange formats.

Complex numbers travel as ``[re, im]`` pairs in JSON and as ``re+imj``
cells in CSV.  A Tensor4 file is a JSON header naming its index sets and a
CSV payload with one cell per line in canonical order: i slowest, then k,
then l, then j fastest.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .algebras import AlgMatrix
from .errors import InvalidArgumentError
from .frames import Frame, HSFrame
from .lattice import IndexSet
from .tensor4 import Tensor4

TENSOR_ORDER = "i,k,l,j"


def format_complex(z: complex) -> str:
    z = complex(z)
    im = repr(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{z.real!r}{im}j"


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise InvalidArgumentError(f"cannot parse complex cell {text!r}") from None


def complex_to_json(a) -> list:
    """Nested lists with each complex entry as ``[re, im]``."""
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim == 0 or a.shape[-1] != 2:
        raise InvalidArgumentError("complex arrays must be nested [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def matrix_to_csv(M) -> str:
    m = M.entries if isinstance(M, AlgMatrix) else np.asarray(M)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in m:
        writer.writerow([format_complex(z) for z in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        return np.zeros((0, 0), dtype=np.complex128)
    if len({len(r) for r in rows}) != 1:
        raise InvalidArgumentError("ragged CSV matrix")
    return np.array([[parse_complex(c) for c in r] for r in rows], dtype=np.complex128)


def matrix_to_json(M: AlgMatrix) -> dict:
    return {
        "rows": M.row_index.to_json(),
        "cols": M.col_index.to_json(),
        "entries": complex_to_json(M.entries),
    }


def matrix_from_json(data: dict) -> AlgMatrix:
    try:
        rows = IndexSet.from_json(data["rows"])
        cols = IndexSet.from_json(data["cols"])
        entries = complex_from_json(data["entries"]) if data["entries"] else np.zeros((len(rows), len(cols)))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed matrix JSON: {exc}") from None
    return AlgMatrix(rows, cols, entries)


def frame_to_json(F: Frame) -> dict:
    return {
        "space_dim": F.space_dim,
        "index": F.index.to_json(),
        "vectors": complex_to_json(F.vectors),
    }


def frame_from_json(data: dict) -> Frame:
    try:
        return Frame(
            int(data["space_dim"]),
            IndexSet.from_json(data["index"]),
            complex_from_json(data["vectors"]),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed Frame JSON: {exc}") from None


def hsframe_to_json(F: HSFrame) -> dict:
    out = {
        "dims": list(F.dims),
        "index": F.index.to_json(),
        "operators": complex_to_json(F.operators),
    }
    if F.has_product_structure:
        out["outer"] = F.outer.to_json()
        out["inner"] = F.inner.to_json()
    return out


def hsframe_from_json(data: dict) -> HSFrame:
    try:
        outer = IndexSet.from_json(data["outer"]) if "outer" in data else None
        inner = IndexSet.from_json(data["inner"]) if "inner" in data else None
        return HSFrame(
            tuple(data["dims"]),
            IndexSet.from_json(data["index"]),
            complex_from_json(data["operators"]),
            outer,
            inner,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed HSFrame JSON: {exc}") from None


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from None


def read_frame(path) -> Frame:
    return frame_from_json(read_json(path))


def write_frame(F: Frame, path) -> None:
    Path(path).write_text(json.dumps(frame_to_json(F)) + "\n")


def write_tensor(T: Tensor4, path) -> Path:
    """Write ``path`` (JSON header) and ``path`` with suffix ``.csv`` (payload).

    Returns the payload path.
    """
    path = Path(path)
    payload = path.with_suffix(".csv")
    header = {
        "outer": T.outer.to_json(),
        "inner": T.inner.to_json(),
        "order": TENSOR_ORDER,
        "count": int(T.entries.size),
        "payload": payload.name,
    }
    path.write_text(json.dumps(header, indent=2) + "\n")
    payload.write_text("".join(format_complex(z) + "\n" for z in T.entries.ravel()))
    return payload


def read_tensor(path) -> Tensor4:
    path = Path(path)
    header = read_json(path)
    try:
        outer = IndexSet.from_json(header["outer"])
        inner = IndexSet.from_json(header["inner"])
        payload = path.parent / header["payload"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed tensor header: {exc}") from None
    if header.get("order", TENSOR_ORDER) != TENSOR_ORDER:
        raise InvalidArgumentError(f"unsupported entry order {header['order']!r}")
    cells = [line for line in payload.read_text().splitlines() if line.strip()]
    n1, n2 = len(outer), len(inner)
    if len(cells) != n1 * n1 * n2 * n2:
        raise InvalidArgumentError(
            f"payload has {len(cells)} entries, expected {n1 * n1 * n2 * n2}"
        )
    vals = np.array([parse_complex(c) for c in cells], dtype=np.complex128)
    return Tensor4(outer, inner, vals.reshape(n1, n2, n2, n1))


def json_float(x: float):
    """JSON-safe float: infinities and NaN become strings."""
    if math.isfinite(x):
        return x
    return str(x)
