"""Distance functions between compositions.

Five families:

  esov       square root of the Jensen-Shannon divergence (a true metric);
             the power-transformed variant is esov_alpha_distance
  tc         taxicab / L1 / Manhattan; power-transformed variant
             taxicab_alpha_distance
  aitchison  Euclidean distance between centred log-ratio images; undefined
             when any part is zero
  hellinger  (1/sqrt 2) * L2 distance between square-rooted parts
  angular    arccos of the raw dot product

All logarithms are natural. Zero parts contribute exactly 0 to the esov sum
(0 log 0 = 0, handled by branching rather than by adding an epsilon). Every
function broadcasts: scalars out for 1-D inputs, arrays out for stacked rows.
Summations run through numpy's pairwise reduction, which keeps the mixed-
magnitude terms of the power-transformed variants well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroInAitchison
from .simplex import power_transform

__all__ = [
    "FAMILIES",
    "POWER_FAMILIES",
    "MetricSpec",
    "esov_distance",
    "esov_alpha_distance",
    "taxicab_distance",
    "taxicab_alpha_distance",
    "aitchison_distance",
    "hellinger_distance",
    "angular_distance",
    "distance",
]

FAMILIES = ("esov", "tc", "aitchison", "hellinger", "angular")
POWER_FAMILIES = ("esov", "tc")


@dataclass(frozen=True)
class MetricSpec:
    """A metric family plus its power parameter.

    alpha is meaningful only for the esov and tc families and is fixed at 1
    for the others.
    """

    family: str
    alpha: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}, expected one of {FAMILIES}"
            )
        object.__setattr__(self, "alpha", float(self.alpha))
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.family not in POWER_FAMILIES and self.alpha != 1.0:
            raise ValueError(f"alpha is fixed at 1 for the {self.family} family")


def _paired(x, w) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape[-1] != w.shape[-1]:
        raise DimensionMismatch(
            f"compositions have {x.shape[-1]} and {w.shape[-1]} parts"
        )
    return x, w


def esov_distance(x, w):
    """Square root of the Jensen-Shannon divergence, natural log.

    Terms with a zero part contribute 0 via 0 log 0 = 0; parts that are zero
    in both arguments contribute 0 as well, so zeros need no replacement.
    """
    x, w = _paired(x, w)
    s = x + w
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(x > 0, x * np.log(2.0 * x / s), 0.0)
        tw = np.where(w > 0, w * np.log(2.0 * w / s), 0.0)
    js = (tx + tw).sum(axis=-1)
    # roundoff can leave a tiny negative divergence for near-identical inputs
    return np.sqrt(np.maximum(js, 0.0))


def esov_alpha_distance(x, w, alpha: float):
    """esov distance between the power-transformed arguments."""
    return esov_distance(power_transform(x, alpha), power_transform(w, alpha))


def taxicab_distance(x, w):
    """Sum of absolute part differences; ranges over [0, 2] on the simplex."""
    x, w = _paired(x, w)
    return np.abs(x - w).sum(axis=-1)


def taxicab_alpha_distance(x, w, alpha: float):
    """Taxicab distance between the power-transformed arguments."""
    return taxicab_distance(power_transform(x, alpha), power_transform(w, alpha))


def aitchison_distance(x, w):
    """Euclidean distance between centred log-ratio images.

    clr(x)_i = log(x_i / g(x)) with g the geometric mean over all parts;
    requires strictly positive parts in both arguments.
    """
    x, w = _paired(x, w)
    if np.any(x <= 0) or np.any(w <= 0):
        raise ZeroInAitchison(
            "the log-ratio distance is degenerate with zero (or negative) parts"
        )
    lx = np.log(x)
    lw = np.log(w)
    cx = lx - lx.mean(axis=-1, keepdims=True)
    cw = lw - lw.mean(axis=-1, keepdims=True)
    return np.sqrt(((cx - cw) ** 2).sum(axis=-1))


def hellinger_distance(x, w):
    """(1/sqrt 2) * L2 distance between square-rooted parts; in [0, 1]."""
    x, w = _paired(x, w)
    return np.sqrt(0.5 * ((np.sqrt(x) - np.sqrt(w)) ** 2).sum(axis=-1))


def angular_distance(x, w):
    """arccos of the plain dot product, treating compositions as directions.

    Note: as defined, d(x, x) > 0 anywhere except at the vertices, because
    the dot product of a composition with itself is below 1 inside the
    simplex. The identity axiom intentionally does not hold here; the square
    root of the parts is NOT taken. The dot product is clamped to [-1, 1]
    before arccos to absorb roundoff.
    """
    x, w = _paired(x, w)
    dot = np.clip((x * w).sum(axis=-1), -1.0, 1.0)
    return np.arccos(dot)


def distance(spec: MetricSpec, x, w):
    """Dispatch to the family selected by spec; esov/tc honour spec.alpha."""
    if spec.family == "esov":
        if spec.alpha == 1.0:
            return esov_distance(x, w)
        return esov_alpha_distance(x, w, spec.alpha)
    if spec.family == "tc":
        if spec.alpha == 1.0:
            return taxicab_distance(x, w)
        return taxicab_alpha_distance(x, w, spec.alpha)
    if spec.family == "aitchison":
        return aitchison_distance(x, w)
    if spec.family == "hellinger":
        return hellinger_distance(x, w)
    if spec.family == "angular":
        return angular_distance(x, w)
    raise ValueError(f"unknown family {spec.family!r}")
