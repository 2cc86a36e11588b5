"""Experiment driver: corrupt, filter, fit, evaluate, and aggregate over sweeps.

Every run writes a manifest of the resolved configuration so no result depends
on unrecorded defaults.  Cells of a sweep are independent; rows are always
written in canonical (method, snr, seed) order no matter how they executed.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, dmd, metrics, pde, rpca, snapshots, tlsdmd
from .errors import ConfigError, NoisyDmdError

METHODS = ("none", "adm", "ialm", "tls")
DATASETS = ("nlse", "fne", "swe")

RECORDS_HEADER = metrics.CSV_HEADER + ["error"]

_DATASET_CONFIGS = {"nlse": pde.NlseConfig, "fne": pde.FneConfig, "swe": pde.SweConfig}
_DATASET_SOLVERS = {"nlse": pde.solve_nlse, "fne": pde.solve_fne, "swe": pde.solve_swe}


@dataclass
class ExperimentConfig:
    """Resolved description of one pipeline or sweep run."""

    dataset: str = "nlse"
    dataset_config: dict = field(default_factory=dict)
    data_path: str | None = None
    snr_db: list[float] = field(default_factory=lambda: [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0])
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    rank: int | str = "auto"
    rank_tol: float = 1e-6
    filter_splits: bool = False
    adm: dict = field(default_factory=dict)
    ialm: dict = field(default_factory=dict)
    output_dir: str = "out"
    threads: int = 1

    def validate(self):
        if self.dataset not in DATASETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}")
        if not self.methods:
            raise ConfigError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")
        if not self.snr_db:
            raise ConfigError("at least one SNR value is required")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("SNR sweep values must be strictly increasing")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise ConfigError("seeds must be nonempty and distinct")
        if self.rank != "auto" and (not isinstance(self.rank, int) or self.rank < 1):
            raise ConfigError("rank must be 'auto' or a positive integer")
        if not 0 < self.rank_tol < 1:
            raise ConfigError("rank_tol must lie in (0, 1)")
        if self.threads < 1:
            raise ConfigError("threads must be positive")

    def adm_params(self) -> rpca.AdmParams:
        return rpca.AdmParams(**self.adm)

    def ialm_params(self) -> rpca.IalmParams:
        return rpca.IalmParams(**self.ialm)


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from a JSON-style document; unknown keys are rejected."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    cfg = ExperimentConfig(**doc)
    if isinstance(cfg.snr_db, (int, float)):
        cfg.snr_db = [float(cfg.snr_db)]
    cfg.snr_db = [float(v) for v in cfg.snr_db]
    cfg.seeds = [int(v) for v in cfg.seeds]
    return cfg


def build_dataset_config(dataset: str, overrides: dict):
    cls = _DATASET_CONFIGS[dataset]
    known = {f.name for f in dataclasses.fields(cls)}
    extra = set(overrides) - known
    if extra:
        raise ConfigError(f"unknown {dataset} config keys: {sorted(extra)}")
    return cls(**overrides)


def load_or_generate(cfg: ExperimentConfig) -> snapshots.SnapshotMatrix:
    """Return the clean ground-truth dataset for a run."""
    if cfg.data_path is not None:
        return snapshots.load(cfg.data_path)
    solver_cfg = build_dataset_config(cfg.dataset, cfg.dataset_config)
    return _DATASET_SOLVERS[cfg.dataset](solver_cfg)


def snr_label(snr_db: float) -> str:
    return "inf" if math.isinf(snr_db) else f"{snr_db:g}"


def _resolve_plain_rank(x1: np.ndarray, rank) -> int:
    if rank == "auto":
        return dmd.select_rank(np.linalg.svd(x1, compute_uv=False))
    return int(rank)


@dataclass
class CellResult:
    method: str
    snr_db: float
    seed: int
    record: metrics.MetricsRecord | None
    eps_times: np.ndarray | None
    eps_values: np.ndarray | None
    error: str | None


def run_cell(clean: snapshots.SnapshotMatrix, dataset: str, method: str, snr_db: float,
             seed: int, cfg: ExperimentConfig) -> CellResult:
    """Corrupt, filter, fit, reconstruct, and score one (method, snr, seed) cell."""
    try:
        corrupted = snapshots.add_noise(clean, snapshots.NoiseSpec(snr_db, seed))
        dt = clean.dt
        if method == "tls":
            pair = snapshots.split(corrupted)
            r = tlsdmd.select_rank(pair) if cfg.rank == "auto" else int(cfg.rank)
            x1_proj, _, _ = tlsdmd.tls_project(pair, r)
            filtered_rank = metrics.numerical_rank(x1_proj, cfg.rank_tol)
            model = tlsdmd.tls_dmd(pair, r, dt)
        else:
            if method == "none":
                x1, x2 = corrupted.values[:, :-1], corrupted.values[:, 1:]
                filtered_rank = metrics.numerical_rank(corrupted.values, cfg.rank_tol)
            elif cfg.filter_splits:
                pair = snapshots.split(corrupted)
                solver = rpca.rpca_adm if method == "adm" else rpca.rpca_ialm
                params = cfg.adm_params() if method == "adm" else cfg.ialm_params()
                x1 = solver(pair.x1, params).l
                x2 = solver(pair.x2, params).l
                filtered_rank = metrics.numerical_rank(x1, cfg.rank_tol)
            else:
                solver = rpca.rpca_adm if method == "adm" else rpca.rpca_ialm
                params = cfg.adm_params() if method == "adm" else cfg.ialm_params()
                result = solver(corrupted.values, params)
                report = rpca.filter_report(corrupted.values, result, cfg.rank_tol)
                filtered_rank = report.rank
                x1, x2 = report.filtered[:, :-1], report.filtered[:, 1:]
            r = _resolve_plain_rank(x1, cfg.rank)
            model = dmd.fit(snapshots.SplitPair(x1, x2), r, dt)
        rel_times = dt * np.arange(clean.p)
        recon = dmd.reconstruct(model, rel_times)
        eps = dmd.relative_error_series(recon, clean.values)
        record = metrics.MetricsRecord(
            dataset=dataset,
            method=method,
            snr_db=snr_db,
            seed=seed,
            rank_used=model.rank,
            rmse=metrics.rmse(recon, clean.values),
            cc_paper=metrics.cc_paper(recon, clean.values),
            cc_pearson=metrics.cc_pearson(recon, clean.values),
            filtered_rank=filtered_rank,
            error_series_path=f"eps_{dataset}_{method}_snr{snr_label(snr_db)}_seed{seed}.csv",
        )
        return CellResult(method, snr_db, seed, record, clean.times, eps, None)
    except (NoisyDmdError, ValueError, np.linalg.LinAlgError) as exc:
        return CellResult(method, snr_db, seed, None, None, None, f"{type(exc).__name__}: {exc}")


def _write_eps_csv(path, times, eps):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "epsilon"])
        for t, e in zip(times, eps):
            writer.writerow([repr(float(t)), repr(float(e))])


def _records_rows(dataset: str, cells: list[CellResult]) -> list[list[str]]:
    rows = []
    for cell in sorted(cells, key=lambda c: (c.method, c.snr_db, c.seed)):
        if cell.record is not None:
            rows.append(
                [metrics.format_cell(getattr(cell.record, n)) for n in metrics.CSV_HEADER] + [""]
            )
        else:
            rows.append(
                [dataset, cell.method, metrics.format_cell(float(cell.snr_db)), str(cell.seed)]
                + [""] * 6
                + [cell.error]
            )
    return rows


def write_manifest(cfg: ExperimentConfig, path) -> None:
    solver_cfg = None
    if cfg.data_path is None:
        solver_cfg = {
            k: v
            for k, v in dataclasses.asdict(build_dataset_config(cfg.dataset, cfg.dataset_config)).items()
            if isinstance(v, (int, float, str, bool, type(None)))
        }
    doc = {
        "version": __version__,
        "config": {
            "dataset": cfg.dataset,
            "dataset_config": solver_cfg,
            "data_path": cfg.data_path,
            "snr_db": [snr_label(v) for v in cfg.snr_db],
            "seeds": cfg.seeds,
            "methods": cfg.methods,
            "rank": cfg.rank,
            "rank_tol": cfg.rank_tol,
            "filter_splits": cfg.filter_splits,
            "adm": dataclasses.asdict(cfg.adm_params()),
            "ialm": dataclasses.asdict(cfg.ialm_params()),
            "threads": cfg.threads,
        },
        "conventions": {
            "snr": "decibels; 10*log10(||X||_F^2 / ||C||_F^2) with measured signal power",
            "noise": "full matrix corrupted once, then split",
            "rank_rule": f"smallest r with cumulative squared singular-value energy >= {dmd.RANK_ENERGY}",
            "ground_truth": "clean pre-noise dataset",
            "row_order": "sorted by (method, snr_db, seed)",
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_pipeline(cfg: ExperimentConfig, log=None) -> Path:
    """Run all cells, write per-cell error series and the records CSV.

    Returns the records CSV path.
    """
    cfg.validate()
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clean = load_or_generate(cfg)
    dataset = cfg.dataset if cfg.data_path is None else Path(cfg.data_path).stem
    cells = [
        (method, snr, seed)
        for method in cfg.methods
        for snr in cfg.snr_db
        for seed in cfg.seeds
    ]

    def do(args):
        method, snr, seed = args
        res = run_cell(clean, dataset, method, snr, seed, cfg)
        if log:
            status = "ok" if res.error is None else f"failed ({res.error})"
            log(f"[{dataset}] method={method} snr={snr_label(snr)} seed={seed}: {status}")
        return res

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(do, cells))
    else:
        results = [do(c) for c in cells]

    for res in results:
        if res.record is not None:
            _write_eps_csv(out_dir / res.record.error_series_path, res.eps_times, res.eps_values)
    records_path = out_dir / "records.csv"
    with open(records_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORDS_HEADER)
        writer.writerows(_records_rows(dataset, results))
    write_manifest(cfg, out_dir / "manifest.json")
    return records_path


def summarize(records_path, summary_path) -> None:
    """Aggregate a records CSV into per-(method, snr) seed means."""
    with open(records_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    groups: dict[tuple[str, float], list[dict]] = {}
    for row in rows:
        if row["error"]:
            continue
        key = (row["method"], float(row["snr_db"]))
        groups.setdefault(key, []).append(row)
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "snr_db", "mean_rmse", "mean_cc_paper", "mean_cc_pearson", "n_seeds"])
        for method, snr in sorted(groups):
            cells = groups[(method, snr)]
            writer.writerow(
                [
                    method,
                    metrics.format_cell(snr),
                    metrics.format_cell(float(np.mean([float(c["rmse"]) for c in cells]))),
                    metrics.format_cell(float(np.mean([float(c["cc_paper"]) for c in cells]))),
                    metrics.format_cell(float(np.mean([float(c["cc_pearson"]) for c in cells]))),
                    str(len(cells)),
                ]
            )


def run_sweep(cfg: ExperimentConfig, log=None) -> Path:
    """Pipeline over the SNR list plus a summary CSV of per-method means."""
    records_path = run_pipeline(cfg, log=log)
    summary_path = Path(cfg.output_dir) / "summary.csv"
    summarize(records_path, summary_path)
    return summary_path
