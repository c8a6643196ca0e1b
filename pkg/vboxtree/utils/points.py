from pathlib import Path
from typing import List, Union

import numpy as np

from vboxtree.utils.errors import DimensionMismatchError, PointsFileError


def parse_points(text: str) -> np.ndarray:
    """One point per line, whitespace-separated decimals; `#` starts a comment."""
    rows: List[List[float]] = []
    arity = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise PointsFileError(f"malformed coordinates: {raw.strip()!r}", lineno)
        if not all(np.isfinite(row)):
            raise PointsFileError("non-finite coordinate", lineno)
        if arity is None:
            arity = len(row)
        elif len(row) != arity:
            raise PointsFileError(f"expected {arity} coordinates, got {len(row)}", lineno)
        rows.append(row)
    if not rows:
        raise PointsFileError("no points")
    return np.array(rows, dtype=float)


def read_points(path: Union[str, Path]) -> np.ndarray:
    return parse_points(Path(path).read_text(encoding="utf-8"))


def parse_point_string(text: str, dim: int) -> np.ndarray:
    try:
        coords = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ValueError(f"malformed point {text!r}")
    if len(coords) != dim:
        raise DimensionMismatchError(f"expected {dim} coordinates, got {len(coords)}")
    return np.array(coords, dtype=float)
