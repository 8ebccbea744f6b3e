# This code is part of fakp and is licensed under the MIT license.
"""ASCII XYZ point files: one point per line, ``d`` coordinates followed by
optional feature values, whitespace separated."""
from __future__ import annotations

import os
import pathlib
from typing import Union

import numpy as np

from fakp.exceptions import EmptyCloudError, XYZParseError
from fakp.geometry import PointCloud

PathLike = Union[str, os.PathLike]


def load_xyz(path: PathLike, d: int = 3) -> PointCloud:
    """Read a cloud; rows without feature columns give ``[n x 0]`` features.

    Raises
    ------
    XYZParseError
      with the offending line number for non-numeric values, too few
      columns or rows of inconsistent width.
    """
    rows = []
    width = None
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            fields = line.split()
            if not fields:
                continue
            try:
                values = [float(v) for v in fields]
            except ValueError:
                raise XYZParseError(f"non-numeric value in '{line.strip()}'",
                                    lineno) from None
            if len(values) < d:
                errmsg = f"expected at least {d} coordinates, got {len(values)}"
                raise XYZParseError(errmsg, lineno)
            if width is None:
                width = len(values)
            elif len(values) != width:
                errmsg = f"expected {width} columns, got {len(values)}"
                raise XYZParseError(errmsg, lineno)
            rows.append(values)
    if not rows:
        raise EmptyCloudError(f"{path} contains no points")
    table = np.array(rows, dtype=np.float64)
    return PointCloud.from_arrays(table[:, :d], table[:, d:])


def save_xyz(path: PathLike, cloud: PointCloud) -> None:
    """Write a cloud with 17 significant digits per value."""
    table = np.hstack([cloud.coords.data, cloud.features.data])
    pathlib.Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for row in table:
            f.write(" ".join(f"{v:.17g}" for v in row) + "\n")
