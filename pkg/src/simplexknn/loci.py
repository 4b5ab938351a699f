"""Ternary geometry: plane embedding of 3-part compositions and distance fields.

The fields are the raw material for equidistance-loci plots: a triangular
lattice over the simplex with the distance from every lattice point to a
reference composition. Contour extraction is left to downstream plotting;
this module only emits the scalar field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import DimensionMismatch
from .metrics import MetricSpec, distance
from .simplex import power_transform

__all__ = [
    "TernaryPoint",
    "ternary_embed",
    "transform_dataset",
    "DistanceField",
    "distance_field",
    "DEFAULT_RESOLUTION",
]

_HEIGHT = math.sqrt(3.0) / 2.0

# about 20k lattice points: fields for a whole panel of alphas stay quick
DEFAULT_RESOLUTION = 200


@dataclass(frozen=True)
class TernaryPoint:
    """A 3-part composition and its position in the plot triangle.

    The embedding is the affine barycentric map with vertices (0, 0), (1, 0)
    and (0.5, sqrt(3)/2) for the first, second and third part respectively.
    """

    parts: tuple[float, float, float]
    x: float
    y: float


def ternary_embed(c) -> TernaryPoint:
    """Map a 3-part composition onto plot coordinates."""
    c = np.asarray(c, dtype=float)
    if c.shape != (3,):
        raise DimensionMismatch(f"ternary embedding needs 3 parts, got {c.shape}")
    return TernaryPoint(
        parts=(float(c[0]), float(c[1]), float(c[2])),
        x=float(c[1] + 0.5 * c[2]),
        y=float(_HEIGHT * c[2]),
    )


def transform_dataset(data: LabeledDataset, alpha: float) -> list[TernaryPoint]:
    """Power-transform every row of a 3-part dataset and embed it."""
    if data.n_parts != 3:
        raise DimensionMismatch(
            f"ternary transform needs 3-part data, got D={data.n_parts}"
        )
    transformed = power_transform(data.rows, alpha)
    return [ternary_embed(row) for row in transformed]


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distances from lattice points of the ternary simplex to a reference.

    The lattice is {(i/n, j/n, (n-i-j)/n) : i + j <= n} in row-major (i, j)
    order, intersected with the metric's domain: boundary points are skipped
    (never imputed) for metrics that require strictly positive parts.
    """

    n: int
    spec: MetricSpec
    reference: tuple[float, float, float]
    points: tuple[TernaryPoint, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def distance_field(spec: MetricSpec, reference, n: int) -> DistanceField:
    """Evaluate distance(spec, lattice point, reference) over the lattice."""
    if n < 2:
        raise ValueError("grid resolution n must be at least 2")
    ref = np.asarray(reference, dtype=float)
    if ref.shape != (3,):
        raise DimensionMismatch(f"reference needs 3 parts, got shape {ref.shape}")
    distance(spec, ref, ref)  # probes the reference against the metric's domain

    ii, jj = [], []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            ii.append(i)
            jj.append(j)
    ii = np.asarray(ii)
    jj = np.asarray(jj)
    parts = np.stack([ii, jj, n - ii - jj], axis=1) / n

    needs_positive = spec.family == "aitchison" or (
        spec.family in ("esov", "tc") and spec.alpha < 0
    )
    if needs_positive:
        keep = (parts > 0).all(axis=1)
        parts = parts[keep]

    values = distance(spec, parts, ref)
    points = tuple(ternary_embed(row) for row in parts)
    return DistanceField(
        n=n,
        spec=spec,
        reference=(float(ref[0]), float(ref[1]), float(ref[2])),
        points=points,
        values=values,
    )
