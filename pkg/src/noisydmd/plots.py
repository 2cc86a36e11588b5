"""Static SVG figure emission for datasets and experiment CSVs.

Output is deterministic: a fixed hash salt, no embedded date, and text kept as
text so the files are stable, self-contained XML.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from . import snapshots
from .errors import SchemaError

_SVG_RC = {"svg.hashsalt": "noisydmd", "svg.fonttype": "none"}

PLOT_KINDS = ("surface", "sweep", "error_t", "rank_bar")


def _save(fig: Figure, out) -> None:
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(out, format="svg", metadata={"Date": None})


def _read_csv(path, required: set[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or [])
        missing = required - cols
        if missing:
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


def plot_surface(data_path, out, snapshot_index: int | None = None) -> None:
    """Heatmap of a snapshot file.

    1-D grids render the full space-time field; 2-D grids render one snapshot
    (by default the tenth, or the last one if fewer exist).  Complex data is
    shown as magnitude.
    """
    x = snapshots.load(data_path)
    field = np.abs(x.values) if x.is_complex else x.values
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    if x.grid.kind == "line1d":
        (lo, hi), = x.grid.extents
        img = ax.imshow(
            field,
            aspect="auto",
            origin="lower",
            extent=[x.t0, x.t0 + x.dt * (x.p - 1), lo, hi],
        )
        ax.set_xlabel("t")
        ax.set_ylabel("space")
    else:
        idx = snapshot_index if snapshot_index is not None else min(9, x.p - 1)
        if not 0 <= idx < x.p:
            raise SchemaError(f"snapshot index {idx} outside [0, {x.p - 1}]")
        nx, ny = x.grid.points
        (x_lo, x_hi), (y_lo, y_hi) = x.grid.extents
        frame = field[:, idx].reshape((nx, ny), order="F")
        img = ax.imshow(
            frame.T, aspect="auto", origin="lower", extent=[x_lo, x_hi, y_lo, y_hi]
        )
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"snapshot {idx}")
    fig.colorbar(img, ax=ax)
    _save(fig, out)


def plot_sweep(summary_csv, out, value: str = "mean_rmse") -> None:
    """Per-method curves of a summary column against SNR."""
    rows = _read_csv(summary_csv, {"method", "snr_db", value})
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        pts = sorted(
            (float(r["snr_db"]), float(r[value])) for r in rows if r["method"] == method
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel(value)
    ax.legend()
    _save(fig, out)


def plot_error_t(eps_csvs, out) -> None:
    """Relative reconstruction error against time, one polyline per CSV."""
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    for path in eps_csvs:
        rows = _read_csv(path, {"t", "epsilon"})
        t = [float(r["t"]) for r in rows]
        eps = [float(r["epsilon"]) for r in rows]
        ax.plot(t, eps, label=Path(path).stem)
    ax.set_xlabel("t")
    ax.set_ylabel("relative error")
    ax.legend()
    _save(fig, out)


def plot_rank_bar(records_csv, out) -> None:
    """Bar chart of the mean filtered-data rank per method."""
    rows = _read_csv(records_csv, {"method", "filtered_rank"})
    ranks: dict[str, list[float]] = {}
    for r in rows:
        if r["filtered_rank"]:
            ranks.setdefault(r["method"], []).append(float(r["filtered_rank"]))
    if not ranks:
        raise SchemaError(f"{records_csv}: no usable filtered_rank rows")
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    methods = sorted(ranks)
    ax.bar(methods, [float(np.mean(ranks[m])) for m in methods])
    ax.set_ylabel("rank of filtered data")
    _save(fig, out)
