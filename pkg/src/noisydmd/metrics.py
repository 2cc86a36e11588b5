"""Evaluation metrics and the record type behind every output CSV."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ShapeError

CSV_HEADER = [
    "dataset",
    "method",
    "snr_db",
    "seed",
    "rank_used",
    "rmse",
    "cc_paper",
    "cc_pearson",
    "filtered_rank",
    "error_series_path",
]


@dataclass
class MetricsRecord:
    """One experiment cell: identifiers plus every reported score."""

    dataset: str
    method: str
    snr_db: float
    seed: int
    rank_used: int
    rmse: float
    cc_paper: float
    cc_pearson: float
    filtered_rank: int
    error_series_path: str


def _check_shapes(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ShapeError(f"shape mismatch {pred.shape} vs {truth.shape}")
    return pred, truth


def rmse(pred, truth) -> float:
    """Entrywise root-mean-square of |pred - truth| over all Q*P samples."""
    pred, truth = _check_shapes(pred, truth)
    return float(np.linalg.norm(pred - truth) / math.sqrt(pred.size))


def cc_paper(pred, truth) -> float:
    """sqrt(1 - MAD(pred)/MAD(truth)) with MAD the mean absolute deviation.

    Evaluated literally: a perfect prediction scores 0 and a constant
    prediction scores 1.  When the prediction deviates more than the truth the
    radicand is negative and NaN is returned as the flagged value.
    """
    pred, truth = _check_shapes(pred, truth)
    n_s = pred.size
    mad_pred = float(np.abs(pred - pred.mean()).sum()) / n_s
    mad_truth = float(np.abs(truth - truth.mean()).sum()) / n_s
    if mad_truth == 0:
        raise DegenerateError("ground truth has zero mean absolute deviation")
    radicand = 1.0 - mad_pred / mad_truth
    if radicand < 0:
        return math.nan
    return math.sqrt(radicand)


def _as_real_samples(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return np.abs(x).ravel() if np.iscomplexobj(x) else x.ravel().astype(float)


def cc_pearson(pred, truth) -> float:
    """Standard sample correlation; complex input correlates the moduli."""
    pred, truth = _check_shapes(pred, truth)
    a = _as_real_samples(pred)
    b = _as_real_samples(truth)
    if a.std() == 0 or b.std() == 0:
        raise DegenerateError("correlation undefined for constant input")
    return float(np.corrcoef(a, b)[0, 1])


def numerical_rank(x, tol: float = 1e-6) -> int:
    """Count of singular values above ``tol`` times the largest."""
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    x = np.asarray(x)
    if not np.any(x):
        return 0
    s = np.linalg.svd(x, compute_uv=False)
    return int(np.count_nonzero(s > tol * s[0]))


def format_cell(v) -> str:
    """Deterministic CSV cell text: shortest round-trip form for floats."""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


def write_records_csv(records, path) -> None:
    """Write MetricsRecord rows under the canonical header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([format_cell(getattr(rec, name)) for name in CSV_HEADER])
