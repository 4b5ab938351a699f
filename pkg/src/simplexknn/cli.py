"""Batch command line front door.

Five subcommands:

  dist       pairwise distance matrix of a dataset under one metric
  transform  power-transform a dataset (adds plot coordinates for 3 parts)
  tune       repeated stratified-holdout accuracy over an (alpha, k) grid
  roc        leave-one-out membership scores -> one-vs-rest ROC per class
  loci       distance field over the ternary lattice from a reference point

Grids use the inclusive start:end:step syntax (step defaults to 1), or a
comma list. Note that values starting with a minus sign must be attached
with '=', e.g. --alphas=-1:1:0.1. Every JSON report (or .meta.json sidecar
of a CSV) echoes the tool version, the full configuration and the seed, so
any output can be regenerated bit-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import DEFAULT_DROP_COLUMNS, LabeledDataset, ingest_csv
from .errors import SimplexKnnError
from .evaluation import GRID_FAMILIES, auc, grid_search, loocv_scores, roc_curve
from .knn import NeighborConfig, pairwise_distances
from .loci import DEFAULT_RESOLUTION, distance_field, ternary_embed
from .metrics import FAMILIES, MetricSpec
from .simplex import barycentre, power_transform

__all__ = ["main", "build_parser", "parse_grid"]

_GRID_EPS = 1e-12


def _snap(value: float) -> float:
    # cosmetic: -1 + 17*0.1 prints as 0.7, not 0.7000000000000002
    return round(value, 10)


def parse_grid(text: str, integer: bool = False) -> list:
    """Parse 'start:end:step' (inclusive ends) and comma lists of values."""
    values: list[float] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty entry in grid {text!r}")
        if ":" in chunk:
            fields = chunk.split(":")
            if len(fields) == 2:
                fields.append("1")
            if len(fields) != 3:
                raise ValueError(f"bad grid syntax {chunk!r}, want start:end:step")
            start, end, step = (float(f) for f in fields)
            if step <= 0:
                raise ValueError(f"grid step must be positive in {chunk!r}")
            if end < start - _GRID_EPS:
                raise ValueError(f"grid end below start in {chunk!r}")
            i = 0
            while True:
                v = start + i * step
                if v > end + _GRID_EPS:
                    break
                values.append(_snap(v))
                i += 1
        else:
            values.append(_snap(float(chunk)))
    if integer:
        out = []
        for v in values:
            if abs(v - round(v)) > 1e-9:
                raise ValueError(f"grid value {v} is not an integer")
            out.append(int(round(v)))
    else:
        out = values
    deduped = list(dict.fromkeys(out))
    if not deduped:
        raise ValueError(f"grid {text!r} is empty")
    return deduped


def _csv_header(path) -> list[str]:
    with Path(path).open(newline="") as fh:
        try:
            return [h.strip() for h in next(csv.reader(fh))]
        except StopIteration:
            return []


def _load_dataset(args) -> tuple[LabeledDataset, dict]:
    requested = () if args.keep_all else DEFAULT_DROP_COLUMNS
    requested = tuple(dict.fromkeys(requested + tuple(args.drop or ())))
    data = ingest_csv(args.input, args.label_column, drop_columns=requested)
    header = _csv_header(args.input)
    dropped = [c for c in requested if c in header and c != args.label_column]
    meta = {
        "input": str(args.input),
        "label_column": args.label_column,
        "columns_used": list(data.feature_names),
        "columns_dropped": dropped,
        "n_rows": len(data),
        "classes": list(data.classes),
    }
    return data, meta


def _envelope(command: str, config: dict) -> dict:
    return {
        "tool": "simplexknn",
        "version": __version__,
        "command": command,
        "config": config,
    }


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _write_csv(path, header: list[str], rows) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_meta(path, payload: dict) -> None:
    _write_json(f"{path}.meta.json", payload)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _cmd_dist(args) -> int:
    data, meta = _load_dataset(args)
    spec = MetricSpec(args.family, args.alpha)
    matrix = pairwise_distances(data, data.rows, spec)
    config = dict(meta, family=args.family, alpha=spec.alpha, format=args.format)
    report = _envelope("dist", config)
    if args.format == "json":
        report["matrix"] = [[float(v) for v in row] for row in matrix]
        _write_json(args.output, report)
    else:
        header = ["row"] + [f"r{j}" for j in range(matrix.shape[1])]
        rows = [[i] + [repr(float(v)) for v in row] for i, row in enumerate(matrix)]
        _write_csv(args.output, header, rows)
        _write_meta(args.output, report)
    return 0


def _cmd_transform(args) -> int:
    data, meta = _load_dataset(args)
    transformed = power_transform(data.rows, args.alpha)
    ternary = data.n_parts == 3
    config = dict(meta, alpha=args.alpha, format=args.format)
    report = _envelope("transform", config)
    names = list(data.feature_names)
    if args.format == "json":
        rows = []
        for row, lab in zip(transformed, data.labels):
            entry = {"parts": [float(v) for v in row], "label": data.classes[lab]}
            if ternary:
                point = ternary_embed(row)
                entry["x"] = point.x
                entry["y"] = point.y
            rows.append(entry)
        report["rows"] = rows
        _write_json(args.output, report)
    else:
        header = names + [args.label_column] + (["x", "y"] if ternary else [])
        rows = []
        for row, lab in zip(transformed, data.labels):
            record = [repr(float(v)) for v in row] + [data.classes[lab]]
            if ternary:
                point = ternary_embed(row)
                record += [repr(point.x), repr(point.y)]
            rows.append(record)
        _write_csv(args.output, header, rows)
        _write_meta(args.output, report)
    return 0


def _grid_cells_csv(result) -> tuple[list[str], list[list[str]]]:
    header = ["alpha", "k", "mean_accuracy", "sd_accuracy"]
    for cls in result.classes:
        header += [
            f"sensitivity_mean_{cls}",
            f"sensitivity_sd_{cls}",
            f"specificity_mean_{cls}",
            f"specificity_sd_{cls}",
        ]
    header.append("error")
    rows = []
    for cell in result.cells:
        row = [_fmt(cell.alpha), _fmt(cell.k), _fmt(cell.mean_accuracy),
               _fmt(cell.sd_accuracy)]
        for c in range(len(result.classes)):
            for stats in (cell.sensitivity_mean, cell.sensitivity_sd,
                          cell.specificity_mean, cell.specificity_sd):
                row.append(_fmt(stats[c]) if stats is not None else "")
        row.append(cell.error or "")
        rows.append(row)
    return header, rows


def _cmd_tune(args) -> int:
    data, meta = _load_dataset(args)
    alphas = parse_grid(args.alphas)
    ks = parse_grid(args.k, integer=True)
    result = grid_search(
        data,
        alphas,
        ks,
        args.family,
        B=args.B,
        test_total=args.test_n,
        seed=args.seed,
        workers=args.workers,
    )
    config = dict(
        meta,
        family=args.family,
        alphas=alphas,
        ks=ks,
        B=args.B,
        test_total=args.test_n,
        seed=args.seed,
        workers=args.workers,
        format=args.format,
    )
    report = _envelope("tune", config)
    report["result"] = result.to_dict()
    best = result.best()
    report["best"] = {"alpha": best.alpha, "k": best.k,
                      "mean_accuracy": best.mean_accuracy}
    if args.format == "json":
        _write_json(args.output, report)
    else:
        header, rows = _grid_cells_csv(result)
        _write_csv(args.output, header, rows)
        del report["result"]["cells"]
        _write_meta(args.output, report)
    return 0


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in name).strip("-") or "class"


def _cmd_roc(args) -> int:
    data, meta = _load_dataset(args)
    spec = MetricSpec(args.family, args.alpha)
    config = NeighborConfig(args.k, spec)
    scores = loocv_scores(data, config)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aucs = {}
    files = {}
    for c, cls in enumerate(data.classes):
        curve = roc_curve(scores, data.labels, c, k=args.k)
        name = f"roc_{c:02d}_{_slug(cls)}.csv"
        _write_csv(
            out_dir / name,
            ["threshold", "fpr", "tpr"],
            [
                [repr(t), repr(f), repr(p)]
                for t, f, p in zip(curve.thresholds, curve.fpr, curve.tpr)
            ],
        )
        aucs[cls] = auc(curve)
        files[cls] = name
    report = _envelope(
        "roc", dict(meta, family=args.family, alpha=spec.alpha, k=args.k)
    )
    report["auc"] = aucs
    report["files"] = files
    _write_json(out_dir / "roc_summary.json", report)
    return 0


def _cmd_loci(args) -> int:
    reference = (
        barycentre(3)
        if args.reference is None
        else np.asarray([float(t) for t in args.reference.split(",")], dtype=float)
    )
    if reference.shape != (3,):
        raise ValueError("reference must have exactly 3 comma-separated parts")
    spec = MetricSpec(args.family, args.alpha)
    field = distance_field(spec, reference, args.n)
    config = {
        "family": args.family,
        "alpha": spec.alpha,
        "n": args.n,
        "reference": [float(v) for v in field.reference],
        "format": args.format,
    }
    report = _envelope("loci", config)
    report["n_points"] = len(field.points)
    if args.format == "json":
        report["points"] = [
            {"c1": p.parts[0], "c2": p.parts[1], "c3": p.parts[2],
             "x": p.x, "y": p.y, "value": float(v)}
            for p, v in zip(field.points, field.values)
        ]
        _write_json(args.output, report)
    else:
        rows = [
            [repr(p.parts[0]), repr(p.parts[1]), repr(p.parts[2]),
             repr(p.x), repr(p.y), repr(float(v))]
            for p, v in zip(field.points, field.values)
        ]
        _write_csv(args.output, ["c1", "c2", "c3", "x", "y", "value"], rows)
        _write_meta(args.output, report)
    return 0


def _add_dataset_flags(sub) -> None:
    sub.add_argument("--input", required=True, help="CSV file with a header row")
    sub.add_argument(
        "--label-column", required=True, help="name of the class column"
    )
    sub.add_argument(
        "--drop",
        action="append",
        metavar="COLUMN",
        help="ignore this column (repeatable); 'RI' is dropped by default",
    )
    sub.add_argument(
        "--keep-all",
        action="store_true",
        help="disable the default drop of the 'RI' column",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexknn",
        description="k-NN classification of compositional data on the simplex",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_dist = subs.add_parser("dist", help="pairwise distance matrix of a dataset")
    _add_dataset_flags(p_dist)
    p_dist.add_argument("--family", choices=FAMILIES, default="esov")
    p_dist.add_argument("--alpha", type=float, default=1.0)
    p_dist.add_argument("--output", required=True)
    p_dist.add_argument("--format", choices=("json", "csv"), default="csv")
    p_dist.set_defaults(func=_cmd_dist)

    p_tr = subs.add_parser("transform", help="power-transform a dataset")
    _add_dataset_flags(p_tr)
    p_tr.add_argument("--alpha", type=float, required=True)
    p_tr.add_argument("--output", required=True)
    p_tr.add_argument("--format", choices=("json", "csv"), default="csv")
    p_tr.set_defaults(func=_cmd_transform)

    p_tune = subs.add_parser(
        "tune", help="grid search over (alpha, k) with repeated stratified holdout"
    )
    _add_dataset_flags(p_tune)
    p_tune.add_argument("--family", choices=GRID_FAMILIES, required=True)
    p_tune.add_argument(
        "--alphas",
        default="-1:1:0.1",
        help="alpha grid, e.g. --alphas=-1:1:0.1 (ignored for aitchison)",
    )
    p_tune.add_argument("--k", default="1:15", help="k grid, e.g. 1:15 or 2,3")
    p_tune.add_argument("--B", type=int, default=200, help="number of replications")
    p_tune.add_argument(
        "--test-n", type=int, required=True, help="test rows per replication"
    )
    p_tune.add_argument(
        "--seed", type=int, required=True, help="RNG seed (recorded in the report)"
    )
    p_tune.add_argument("--workers", type=int, default=1)
    p_tune.add_argument("--output", required=True)
    p_tune.add_argument("--format", choices=("json", "csv"), default="json")
    p_tune.set_defaults(func=_cmd_tune)

    p_roc = subs.add_parser(
        "roc", help="leave-one-out ROC curves, one CSV per class"
    )
    _add_dataset_flags(p_roc)
    p_roc.add_argument("--family", choices=FAMILIES, required=True)
    p_roc.add_argument("--alpha", type=float, default=1.0)
    p_roc.add_argument("--k", type=int, required=True)
    p_roc.add_argument("--output-dir", required=True)
    p_roc.set_defaults(func=_cmd_roc)

    p_loci = subs.add_parser(
        "loci", help="distance field over the ternary lattice"
    )
    p_loci.add_argument("--family", choices=FAMILIES, required=True)
    p_loci.add_argument("--alpha", type=float, default=1.0)
    p_loci.add_argument("--n", type=int, default=DEFAULT_RESOLUTION)
    p_loci.add_argument(
        "--reference",
        help="comma-separated 3-part reference, default the barycentre",
    )
    p_loci.add_argument("--output", required=True)
    p_loci.add_argument("--format", choices=("json", "csv"), default="csv")
    p_loci.set_defaults(func=_cmd_loci)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SimplexKnnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
