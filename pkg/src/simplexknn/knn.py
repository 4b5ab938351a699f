"""Deterministic k-nearest-neighbour classification over simplex metrics.

Neighbour selection and voting are fully specified so results are
reproducible across runs, platforms and thread schedules:

  * neighbours are ordered by (distance, training-row index) via a stable
    sort, so ties on the k-th distance go to the lower row index;
  * the majority class wins; vote ties go to the class whose in-neighbourhood
    members have the smaller distance sum, residual ties to the lower class
    index;
  * votes are unweighted, and the membership score of class c is simply
    (neighbours labeled c) / k, so scores sum to 1 and their argmax under the
    same tie rules reproduces classify().
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    InsufficientTraining,
    NegativeComponent,
    ZeroInAitchison,
    ZeroUnderNegativePower,
)
from .metrics import (
    MetricSpec,
    angular_distance,
    aitchison_distance,
    esov_distance,
    hellinger_distance,
    taxicab_distance,
)
from .simplex import power_transform

__all__ = [
    "NeighborConfig",
    "pairwise_distances",
    "classify",
    "membership_scores",
]

_PLAIN = {
    "esov": esov_distance,
    "tc": taxicab_distance,
    "aitchison": aitchison_distance,
    "hellinger": hellinger_distance,
    "angular": angular_distance,
}


@dataclass(frozen=True)
class NeighborConfig:
    """Number of neighbours and the metric they are measured with."""

    k: int
    spec: MetricSpec

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))


def _check_rows(rows: np.ndarray, spec: MetricSpec, role: str) -> None:
    """Domain validation with the offending row named in the message."""
    if not np.all(np.isfinite(rows)):
        bad = int(np.argwhere(~np.isfinite(rows).all(axis=1))[0, 0])
        raise DegenerateInput(f"{role} row {bad} contains non-finite parts")
    if np.any(rows < 0):
        bad = int(np.argwhere((rows < 0).any(axis=1))[0, 0])
        raise NegativeComponent(f"{role} row {bad} contains negative parts")
    needs_positive = spec.family == "aitchison" or (
        spec.family in ("esov", "tc") and spec.alpha < 0
    )
    if needs_positive and np.any(rows == 0):
        where = np.argwhere((rows == 0).any(axis=1))
        bad = int(where[0, 0])
        col = int(np.argwhere(rows[bad] == 0)[0, 0])
        msg = f"{role} row {bad}, part {col} is zero"
        if spec.family == "aitchison":
            raise ZeroInAitchison(msg)
        raise ZeroUnderNegativePower(msg + f" under alpha={spec.alpha:g}")


def _prepare(rows: np.ndarray, spec: MetricSpec) -> np.ndarray:
    if spec.family in ("esov", "tc") and spec.alpha != 1.0:
        return power_transform(rows, spec.alpha)
    return rows


def pairwise_distances(
    train: LabeledDataset, queries, spec: MetricSpec
) -> np.ndarray:
    """Matrix of distance(spec, queries[i], train.rows[j]).

    queries is a single composition or a stack of them. Power-family rows
    are transformed once up front, which is equivalent to (and much faster
    than) transforming inside every scalar distance call.
    """
    q = np.asarray(queries, dtype=float)
    single = q.ndim == 1
    if single:
        q = q[None, :]
    if q.ndim != 2:
        raise DimensionMismatch(f"queries must be 1-D or 2-D, got shape {q.shape}")
    if q.shape[1] != train.n_parts:
        raise DimensionMismatch(
            f"queries have {q.shape[1]} parts, training rows have {train.n_parts}"
        )
    _check_rows(q, spec, "query")
    _check_rows(train.rows, spec, "training")
    qt = _prepare(q, spec)
    tt = _prepare(train.rows, spec)
    out = _PLAIN[spec.family](qt[:, None, :], tt[None, :, :])
    return out[0] if single else out


def _rank_neighbors(dist: np.ndarray) -> np.ndarray:
    """Column order per row by (distance, row index); stable sort does both."""
    return np.argsort(dist, axis=1, kind="stable")


def _vote(
    dist: np.ndarray,
    order: np.ndarray,
    labels: np.ndarray,
    k: int,
    n_classes: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Vote among the first k ranked columns of each row.

    Returns (winners (m,), neighbour counts per class (m, C)). Implements the
    tie rules documented in the module docstring.
    """
    m, n = dist.shape
    if k > n:
        raise InsufficientTraining(f"k={k} exceeds {n} training rows")
    sel = order[:, :k]
    nbr_labels = labels[sel]
    nbr_dists = np.take_along_axis(dist, sel, axis=1)
    rows = np.repeat(np.arange(m), k)
    counts = np.zeros((m, n_classes), dtype=np.intp)
    np.add.at(counts, (rows, nbr_labels.ravel()), 1)
    dist_sums = np.zeros((m, n_classes))
    np.add.at(dist_sums, (rows, nbr_labels.ravel()), nbr_dists.ravel())
    top = counts.max(axis=1, keepdims=True)
    tiebreak = np.where(counts == top, dist_sums, np.inf)
    winners = tiebreak.argmin(axis=1)  # argmin keeps the lower class index on ties
    return winners, counts


def _scores_from_distances(
    dist: np.ndarray, labels: np.ndarray, k: int, n_classes: int
) -> tuple[np.ndarray, np.ndarray]:
    return _vote(dist, _rank_neighbors(dist), labels, k, n_classes)


def classify(train: LabeledDataset, query, config: NeighborConfig) -> int:
    """Class index of the majority vote among the k nearest training rows."""
    dist = pairwise_distances(train, np.asarray(query, float)[None, :], config.spec)
    winners, _ = _scores_from_distances(
        dist, train.labels, config.k, train.n_classes
    )
    return int(winners[0])


def membership_scores(train: LabeledDataset, query, config: NeighborConfig) -> np.ndarray:
    """Per-class neighbour fractions for one query; sums to 1.

    argmax under the classify() tie rules equals classify()'s output.
    """
    dist = pairwise_distances(train, np.asarray(query, float)[None, :], config.spec)
    _, counts = _scores_from_distances(
        dist, train.labels, config.k, train.n_classes
    )
    return counts[0] / config.k
