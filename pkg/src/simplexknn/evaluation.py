"""Tuning and evaluation harness.

Implements the repeated stratified-holdout procedure: split the data into a
training and a test part with every class represented, classify the test rows
for each (alpha, k) combination, repeat B times and average the per-replication
percentages. The same B splits are reused across all grid cells (paired
comparison), so cell differences are not inflated by split noise.

Randomness comes from numpy's PCG64 generator seeded with
SeedSequence((seed, replication_index)), which is documented, 64-bit and
platform independent; replications can therefore be evaluated concurrently
and still aggregate to bit-identical results.

Also here: confusion statistics, leave-one-out membership scores and
one-vs-rest ROC curves with trapezoidal AUC.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset
from .errors import (
    InfeasibleStratification,
    InsufficientTraining,
    SimplexKnnError,
    UndefinedRoc,
)
from .knn import NeighborConfig, _rank_neighbors, _vote, pairwise_distances
from .metrics import MetricSpec

__all__ = [
    "SplitPlan",
    "allocate_test_counts",
    "stratified_holdout",
    "confusion_matrix",
    "sensitivity_specificity",
    "GridCell",
    "GridResult",
    "grid_search",
    "loocv_scores",
    "RocCurve",
    "roc_curve",
    "auc",
]

GRID_FAMILIES = ("esov", "tc", "aitchison")


@dataclass(frozen=True)
class SplitPlan:
    """Per-class test allocation for one replication of one seed."""

    test_count_per_class: tuple[int, ...]
    seed: int
    replication_index: int


def allocate_test_counts(class_counts, test_total: int) -> np.ndarray:
    """Largest-remainder allocation of test rows over classes.

    Every class contributes at least 1 test row and keeps at least 1 training
    row, so the split is feasible only when C <= test_total <= N - C.
    Remainder ties go to the lower class index.
    """
    counts = np.asarray(class_counts, dtype=np.intp)
    n_classes = counts.size
    total = int(counts.sum())
    if np.any(counts < 2):
        raise InfeasibleStratification(
            "every class needs at least two rows (one per side of the split)"
        )
    if test_total < n_classes:
        raise InfeasibleStratification(
            f"test_total={test_total} cannot cover {n_classes} classes"
        )
    if test_total > total - n_classes:
        raise InfeasibleStratification(
            f"test_total={test_total} leaves no training row for some class "
            f"(dataset has {total} rows over {n_classes} classes)"
        )
    quota = test_total * counts / total
    alloc = np.floor(quota).astype(np.intp)
    remainder = quota - alloc
    order = np.lexsort((np.arange(n_classes), -remainder))
    leftover = test_total - int(alloc.sum())
    alloc[order[:leftover]] += 1
    # clamp to 1 <= alloc_c <= counts_c - 1 (a class must appear on both
    # sides) and rebalance the difference along the remainder order
    cap = counts - 1
    clamped = np.clip(alloc, 1, cap)
    delta = int((alloc - clamped).sum())
    alloc = clamped
    if delta > 0:
        for idx in order:
            add = min(int(cap[idx] - alloc[idx]), delta)
            alloc[idx] += add
            delta -= add
            if delta == 0:
                break
    elif delta < 0:
        for idx in order[::-1]:
            take = min(int(alloc[idx] - 1), -delta)
            alloc[idx] -= take
            delta += take
            if delta == 0:
                break
    assert int(alloc.sum()) == test_total
    return alloc


def _split_indices(
    data: LabeledDataset, alloc: np.ndarray, seed: int, replication_index: int
) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(
        np.random.SeedSequence([int(seed) % 2**64, int(replication_index) % 2**64])
    )
    picks = []
    for c in range(data.n_classes):
        members = np.flatnonzero(data.labels == c)
        picks.append(rng.permutation(members)[: alloc[c]])
    test_idx = np.sort(np.concatenate(picks))
    mask = np.ones(len(data), dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


def stratified_holdout(
    data: LabeledDataset, test_total: int, seed: int, replication_index: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """One deterministic stratified train/test split.

    Test rows are drawn uniformly without replacement within each class,
    proportionally to class sizes (largest remainder, at least one per
    class). The stream is fully determined by (seed, replication_index).
    """
    alloc = allocate_test_counts(data.class_counts(), test_total)
    train_idx, test_idx = _split_indices(data, alloc, seed, replication_index)
    return data.subset(train_idx), data.subset(test_idx)


def split_plan(
    data: LabeledDataset, test_total: int, seed: int, replication_index: int
) -> SplitPlan:
    """The per-class allocation that stratified_holdout will use."""
    alloc = allocate_test_counts(data.class_counts(), test_total)
    return SplitPlan(tuple(int(a) for a in alloc), seed, replication_index)


def confusion_matrix(truth, predicted, n_classes: int | None = None) -> np.ndarray:
    """Counts[t][p] of true class t predicted as p."""
    truth = np.asarray(truth, dtype=np.intp)
    predicted = np.asarray(predicted, dtype=np.intp)
    if truth.shape != predicted.shape:
        raise ValueError("truth and predicted must have equal length")
    if n_classes is None:
        n_classes = int(max(truth.max(), predicted.max())) + 1
    cm = np.zeros((n_classes, n_classes), dtype=np.intp)
    np.add.at(cm, (truth, predicted), 1)
    return cm


def sensitivity_specificity(cm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-vs-rest TP/(TP+FN) and TN/(TN+FP) per class.

    A class with no true instance has undefined sensitivity, reported as NaN
    (absent), never as 0. Same for specificity when a class covers the whole
    sample.
    """
    cm = np.asarray(cm)
    total = cm.sum()
    tp = np.diag(cm).astype(float)
    per_true = cm.sum(axis=1).astype(float)
    per_pred = cm.sum(axis=0).astype(float)
    fp = per_pred - tp
    tn = total - per_true - fp
    with np.errstate(invalid="ignore", divide="ignore"):
        sens = np.where(per_true > 0, tp / per_true, np.nan)
        spec = np.where(total - per_true > 0, tn / (tn + fp), np.nan)
    return sens, spec


@dataclass(frozen=True)
class GridCell:
    """Aggregated statistics of one (alpha, k) combination over B replications."""

    alpha: float | None
    k: int
    mean_accuracy: float | None
    sd_accuracy: float | None
    sensitivity_mean: tuple[float | None, ...] | None
    sensitivity_sd: tuple[float | None, ...] | None
    specificity_mean: tuple[float | None, ...] | None
    specificity_sd: tuple[float | None, ...] | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "k": self.k,
            "mean_accuracy": self.mean_accuracy,
            "sd_accuracy": self.sd_accuracy,
            "sensitivity_mean": _opt_list(self.sensitivity_mean),
            "sensitivity_sd": _opt_list(self.sensitivity_sd),
            "specificity_mean": _opt_list(self.specificity_mean),
            "specificity_sd": _opt_list(self.specificity_sd),
            "error": self.error,
        }


def _opt_list(values):
    return None if values is None else list(values)


@dataclass(frozen=True)
class GridResult:
    """All cells of one tuning run plus the provenance needed to repeat it."""

    family: str
    alphas: tuple[float, ...] | None
    ks: tuple[int, ...]
    B: int
    test_total: int
    seed: int
    classes: tuple[str, ...]
    split_digest: str
    cells: tuple[GridCell, ...]
    shared_splits: bool = field(default=True)

    def cell(self, alpha: float | None, k: int) -> GridCell:
        for c in self.cells:
            if c.k == k and (
                (c.alpha is None and alpha is None) or c.alpha == alpha
            ):
                return c
        raise KeyError(f"no cell for alpha={alpha!r}, k={k}")

    def best(self) -> GridCell:
        """The cell with the highest mean accuracy (first on ties)."""
        scored = [c for c in self.cells if c.error is None]
        if not scored:
            raise SimplexKnnError("every grid cell failed")
        return max(scored, key=lambda c: c.mean_accuracy)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "alphas": None if self.alphas is None else list(self.alphas),
            "ks": list(self.ks),
            "B": self.B,
            "test_total": self.test_total,
            "seed": self.seed,
            "classes": list(self.classes),
            "shared_splits": self.shared_splits,
            "split_digest": self.split_digest,
            "cells": [c.to_dict() for c in self.cells],
        }


def _replicate(data, alphas, ks, family, alloc, seed, b):
    """Evaluate every grid cell on replication b's split.

    Returns (accuracy (A, K) %, sensitivity (A, K, C), specificity (A, K, C),
    errors {alpha_index: message}, test index array). Pure: safe to run
    replications concurrently.
    """
    train_idx, test_idx = _split_indices(data, alloc, seed, b)
    train = data.subset(train_idx)
    test_rows = data.rows[test_idx]
    test_labels = data.labels[test_idx]
    n_classes = data.n_classes
    n_a, n_k = len(alphas), len(ks)
    acc = np.full((n_a, n_k), np.nan)
    sens = np.full((n_a, n_k, n_classes), np.nan)
    spec = np.full((n_a, n_k, n_classes), np.nan)
    errors: dict[int, str] = {}
    for a, alpha in enumerate(alphas):
        mspec = MetricSpec(family) if alpha is None else MetricSpec(family, alpha)
        try:
            dist = pairwise_distances(train, test_rows, mspec)
        except SimplexKnnError as exc:
            errors[a] = f"{type(exc).__name__}: {exc}"
            continue
        order = _rank_neighbors(dist)
        for ki, k in enumerate(ks):
            winners, _ = _vote(dist, order, train.labels, k, n_classes)
            acc[a, ki] = 100.0 * np.mean(winners == test_labels)
            cm = confusion_matrix(test_labels, winners, n_classes)
            sens[a, ki], spec[a, ki] = sensitivity_specificity(cm)
    return acc, sens, spec, errors, test_idx


def _mean_sd(values: np.ndarray) -> tuple[float | None, float | None]:
    """NaN-aware mean and sample standard deviation over replications."""
    good = values[~np.isnan(values)]
    if good.size == 0:
        return None, None
    mean = float(good.mean())
    sd = float(good.std(ddof=1)) if good.size > 1 else 0.0
    return mean, sd


def grid_search(
    data: LabeledDataset,
    alphas,
    ks,
    family: str,
    B: int,
    test_total: int,
    seed: int,
    workers: int = 1,
) -> GridResult:
    """Repeated stratified-holdout accuracy over an (alpha, k) grid.

    For each of the B replications one split is drawn and reused for every
    grid cell. Reported accuracy is the mean of the per-replication correct-
    classification percentages; the sd column is their sample standard
    deviation. Per-class sensitivity/specificity are averaged the same way,
    skipping replications where a class had no test row (cannot happen under
    stratification, but the aggregation tolerates it).

    A metric error (for instance the log-ratio family meeting a zero part)
    fails every cell of the offending alpha with a diagnostic; other cells
    are unaffected. For the aitchison family the alpha grid is ignored and
    cells carry alpha=None.
    """
    if family not in GRID_FAMILIES:
        raise ValueError(f"family must be one of {GRID_FAMILIES}, got {family!r}")
    if B < 1:
        raise ValueError("B must be at least 1")
    ks = tuple(dict.fromkeys(int(k) for k in ks))
    if not ks or min(ks) < 1:
        raise ValueError("ks must be positive integers")
    if family == "aitchison":
        alphas_eff: tuple = (None,)
        alphas_out = None
    else:
        alphas_eff = tuple(dict.fromkeys(float(a) for a in alphas))
        if not alphas_eff:
            raise ValueError("alphas must be non-empty")
        if not all(np.isfinite(alphas_eff)):
            raise ValueError("alphas must be finite")
        alphas_out = alphas_eff
    alloc = allocate_test_counts(data.class_counts(), test_total)
    train_size = len(data) - test_total
    if max(ks) > train_size:
        raise InsufficientTraining(
            f"k={max(ks)} exceeds the training size {train_size}"
        )

    def job(b):
        return _replicate(data, alphas_eff, ks, family, alloc, seed, b)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, range(B)))
    else:
        outcomes = [job(b) for b in range(B)]

    n_classes = data.n_classes
    acc_all = np.stack([o[0] for o in outcomes])
    sens_all = np.stack([o[1] for o in outcomes])
    spec_all = np.stack([o[2] for o in outcomes])
    alpha_errors: dict[int, str] = {}
    for b, o in enumerate(outcomes):
        for a, msg in o[3].items():
            if a not in alpha_errors:
                alpha_errors[a] = f"replication {b}: {msg}"
    digest = hashlib.sha256()
    for b, o in enumerate(outcomes):
        digest.update(np.int64(b).tobytes())
        digest.update(np.ascontiguousarray(o[4], dtype="<i8").tobytes())

    cells = []
    for a, alpha in enumerate(alphas_eff):
        for ki, k in enumerate(ks):
            if a in alpha_errors:
                cells.append(
                    GridCell(alpha, k, None, None, None, None, None, None,
                             error=alpha_errors[a])
                )
                continue
            mean_acc, sd_acc = _mean_sd(acc_all[:, a, ki])
            sens_stats = [_mean_sd(sens_all[:, a, ki, c]) for c in range(n_classes)]
            spec_stats = [_mean_sd(spec_all[:, a, ki, c]) for c in range(n_classes)]
            cells.append(
                GridCell(
                    alpha,
                    k,
                    mean_acc,
                    sd_acc,
                    tuple(s[0] for s in sens_stats),
                    tuple(s[1] for s in sens_stats),
                    tuple(s[0] for s in spec_stats),
                    tuple(s[1] for s in spec_stats),
                )
            )
    return GridResult(
        family=family,
        alphas=alphas_out,
        ks=ks,
        B=B,
        test_total=test_total,
        seed=seed,
        classes=data.classes,
        split_digest=digest.hexdigest()[:16],
        cells=tuple(cells),
    )


def loocv_scores(data: LabeledDataset, config: NeighborConfig) -> np.ndarray:
    """Leave-one-out membership scores, one row of per-class fractions per row.

    Row i is scored against the dataset minus row i. Implemented with a single
    distance matrix whose diagonal is masked, which preserves the (distance,
    row index) ordering of an explicit per-row holdout. Deterministic.
    """
    if config.k > len(data) - 1:
        raise InsufficientTraining(
            f"k={config.k} exceeds {len(data) - 1} leave-one-out training rows"
        )
    dist = pairwise_distances(data, data.rows, config.spec)
    np.fill_diagonal(dist, np.inf)
    order = _rank_neighbors(dist)
    _, counts = _vote(dist, order, data.labels, config.k, data.n_classes)
    return counts / config.k


@dataclass(frozen=True)
class RocCurve:
    """One-vs-rest ROC polyline for one class.

    Points run from (0, 0) to (1, 1) with both coordinates non-decreasing;
    thresholds[i] is the score cut-off that produced point i (descending,
    starting from a sentinel above every achievable score).
    """

    class_index: int
    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    thresholds: tuple[float, ...]


def roc_curve(scores, truth, class_index: int, k: int | None = None) -> RocCurve:
    """Sweep score thresholds for one class, predicting positive at score >= t.

    With k given, thresholds are the k+1 achievable membership levels
    0, 1/k, ..., 1 plus a sentinel above 1; otherwise the observed score
    values are used (same polyline). The sentinel yields (0, 0) and the zero
    threshold yields (1, 1), so the curve always spans both corners.
    """
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth, dtype=np.intp)
    col = scores[:, class_index]
    positive = truth == class_index
    n_pos = int(positive.sum())
    n_neg = int(col.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRoc(
            f"class {class_index} has {n_pos} positive and {n_neg} negative rows"
        )
    if k is not None:
        levels = np.arange(k, -1, -1) / k
    else:
        levels = np.unique(col)[::-1]
        if levels[-1] != 0.0:
            levels = np.append(levels, 0.0)
    thresholds = np.concatenate(([2.0], levels))
    fpr = np.empty(thresholds.size)
    tpr = np.empty(thresholds.size)
    for i, t in enumerate(thresholds):
        predicted = col >= t
        tpr[i] = int((predicted & positive).sum()) / n_pos
        fpr[i] = int((predicted & ~positive).sum()) / n_neg
    order = np.lexsort((tpr, fpr))  # already sorted by construction; contract
    return RocCurve(
        class_index=int(class_index),
        fpr=tuple(float(v) for v in fpr[order]),
        tpr=tuple(float(v) for v in tpr[order]),
        thresholds=tuple(float(v) for v in thresholds[order]),
    )


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the ROC polyline; in [0, 1]."""
    return float(np.trapezoid(np.asarray(curve.tpr), np.asarray(curve.fpr)))
