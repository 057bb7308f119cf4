"""CSV serialization of sampled curves.

One row per grid node with the columns of ``CSV_HEADER``; every value is
written with 17 significant digits, enough to read binary64 back exactly.
Bishop samples reuse the layout: N₁, N₂ go in the N, B columns and k₁, k₂ in
``kappa``, ``tau``.
"""

import csv
import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from ..core.exceptions import SpecError
from ..models.apparatus import ApparatusKind, CurveSamples

logger = logging.getLogger(__name__)

CSV_HEADER = ["s", "x", "y", "z", "Tx", "Ty", "Tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "kappa", "tau"]

PathLike = Union[str, Path]


def _format(v: float) -> str:
    return f"{v:.17g}"


def sample_rows(samples: CurveSamples) -> np.ndarray:
    """Node table in column order, shape ``(n, 15)``."""
    return np.column_stack(
        [
            samples.s,
            samples.positions,
            samples.frames.reshape(-1, 9),
            samples.kappa,
            samples.tau,
        ]
    )


def write_csv(samples: CurveSamples, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in sample_rows(samples):
        writer.writerow([_format(v) for v in row])


def export_csv(samples: CurveSamples, path: PathLike) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_csv(samples, f)
    except OSError as e:
        raise OSError(e.errno, f"cannot write curve samples: {e.strerror}", str(path)) from e
    logger.info(f"Wrote {len(samples)} nodes to {path}")
    return path


def read_csv(stream, source: str = "<stream>", kind: ApparatusKind = "frenet") -> CurveSamples:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise SpecError(f"expected header {','.join(CSV_HEADER)}, got {header}", f"{source}:header")

    rows: List[List[float]] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise SpecError(f"expected {len(CSV_HEADER)} values, got {len(row)}", f"{source}:{line_no}")
        try:
            rows.append([float(v) for v in row])
        except ValueError as e:
            raise SpecError(str(e), f"{source}:{line_no}")
    if len(rows) < 2:
        raise SpecError("need at least 2 data rows", source)

    table = np.array(rows)
    try:
        return CurveSamples(
            s=table[:, 0],
            positions=table[:, 1:4],
            frames=table[:, 4:13].reshape(-1, 3, 3),
            kappa=table[:, 13],
            tau=table[:, 14],
            kind=kind,
        )
    except ValueError as e:
        raise SpecError(str(e), source)


def import_csv(path: PathLike, kind: ApparatusKind = "frenet") -> CurveSamples:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            samples = read_csv(f, str(path), kind)
    except OSError as e:
        raise OSError(e.errno, f"cannot read curve samples: {e.strerror}", str(path)) from e
    logger.info(f"Read {len(samples)} nodes from {path}")
    return samples
