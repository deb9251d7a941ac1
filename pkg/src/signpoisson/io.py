"""CSV and PGM writers.

CSV: comma separated, ``.`` decimal point, floats with 17 significant
digits.  PGM: plain (P2) 16-bit image, first row = largest y, cells outside
the domain written as 0 and interior values mapped affinely onto
``1..65535``; the original range is kept in a ``# min=<v> max=<v>`` comment.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fdpoisson import RelaxedSet, ScalarField
from .geometry import GridDomain

MAXVAL = 65535


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    return path


def field_rows(field: ScalarField):
    for (x, y), v in zip(field.dom.centers, field.values):
        yield (x, y, v)


def write_field_csv(path, field: ScalarField) -> Path:
    return write_csv(path, ("x", "y", "value"), field_rows(field))


def pgm_text(dom: GridDomain, values: np.ndarray, vmin: float | None = None,
             vmax: float | None = None) -> str:
    values = np.asarray(values, dtype=float)
    lo = float(values.min()) if vmin is None else vmin
    hi = float(values.max()) if vmax is None else vmax
    span = hi - lo
    scaled = np.ones_like(values) if span <= 0 else 1 + np.rint((values - lo) / span * (MAXVAL - 1))
    img = np.zeros(dom.shape, dtype=np.int64)
    img[dom.cells[:, 0], dom.cells[:, 1]] = np.clip(scaled, 1, MAXVAL).astype(np.int64)
    img = img[::-1]
    ny, nx = dom.shape
    lines = ["P2", f"# min={fmt(lo)} max={fmt(hi)}", f"{nx} {ny}", str(MAXVAL)]
    lines += [" ".join(map(str, row)) for row in img]
    return "\n".join(lines) + "\n"


def write_pgm(path, obj: ScalarField | RelaxedSet) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(obj, RelaxedSet):
        text = pgm_text(obj.dom, obj.density, 0.0, 1.0)
    else:
        text = pgm_text(obj.dom, obj.values)
    path.write_text(text)
    return path


def read_pgm(path) -> tuple[np.ndarray, float, float]:
    """Parse a file written by :func:`write_pgm`; returns ``(image, min, max)``."""
    lines = Path(path).read_text().splitlines()
    if lines[0] != "P2":
        raise ValueError("not a plain PGM file")
    meta = dict(tok.split("=") for tok in lines[1].lstrip("# ").split())
    nx, ny = map(int, lines[2].split())
    data = np.array([list(map(int, ln.split())) for ln in lines[4 : 4 + ny]])
    if data.shape != (ny, nx):
        raise ValueError("image size mismatch")
    return data, float(meta["min"]), float(meta["max"])
