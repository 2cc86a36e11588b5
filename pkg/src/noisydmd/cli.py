"""Command-line driver.

Subcommands: generate, corrupt, filter, fit, evaluate, pipeline, sweep, plot.
Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O.

A JSON document passed via ``--config`` may set any of these keys (flags
override the file): dataset, dataset_config, data_path, snr_db, seeds,
methods, rank, rank_tol, filter_splits, adm, ialm, output_dir, threads.
``dataset_config`` keys mirror the solver config fields (e.g. n_w, n_t,
t_max, amplitude for nlse; n_x, d_coeff, a_param, b_param, c_param for fne;
nx, ny, g, depth, drop_amplitude for swe).  The environment variable
``NOISYDMD_SEED`` sets the default seed.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import dmd, experiment, metrics, pde, plots, rpca, snapshots, tlsdmd
from .errors import (
    BlowupError,
    CflError,
    ConfigError,
    DegenerateError,
    FormatError,
    NoisyDmdError,
    NumericalError,
    RankError,
    SchemaError,
    ShapeError,
    ZeroNormError,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_NUMERICAL_ERRORS = (
    BlowupError,
    CflError,
    RankError,
    NumericalError,
    ShapeError,
    ZeroNormError,
    DegenerateError,
    ValueError,
    np.linalg.LinAlgError,
)
_IO_ERRORS = (FormatError, SchemaError, OSError)


def _fail(exc, code):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def guarded(fn):
    """Map library failures onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except ConfigError as exc:
            _fail(exc, EXIT_CONFIG)
        except _NUMERICAL_ERRORS as exc:
            _fail(exc, EXIT_NUMERICAL)
        except _IO_ERRORS as exc:
            _fail(exc, EXIT_IO)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _default_seed() -> int:
    return int(os.environ.get("NOISYDMD_SEED", "0"))


def _echo(ctx, message):
    if not ctx.obj["quiet"]:
        click.echo(message)


def _out_path(ctx, value, fallback):
    base = Path(ctx.obj["out_dir"])
    base.mkdir(parents=True, exist_ok=True)
    return Path(value) if value else base / fallback


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config document (keys mirror the experiment config).")
@click.option("--out-dir", default=".", show_default=True, help="Directory for outputs.")
@click.option("--threads", default=1, show_default=True, help="Parallel sweep cells.")
@click.option("--quiet", is_flag=True, help="Suppress progress output.")
@click.pass_context
def main(ctx, config_path, out_dir, threads, quiet):
    """Noise-robust DMD experiments: datasets, filtering, fitting, evaluation."""
    ctx.ensure_object(dict)
    doc = {}
    if config_path:
        try:
            with open(config_path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            _fail(exc, EXIT_IO)
        except json.JSONDecodeError as exc:
            _fail(ConfigError(f"bad config JSON: {exc}"), EXIT_CONFIG)
    ctx.obj.update(config_doc=doc, out_dir=out_dir, threads=threads, quiet=quiet)


_GENERATE_FLAGS = {
    # flag/dest -> (dataset, config field)
    "n_w": ("nlse", "n_w"),
    "amplitude": ("nlse", "amplitude"),
    "w_min": ("nlse", "w_min"),
    "w_max": ("nlse", "w_max"),
    "max_dt": ("nlse", "max_dt"),
    "n_x": ("fne", "n_x"),
    "x_min": ("fne", "x_min"),
    "x_max": ("fne", "x_max"),
    "d_coeff": ("fne", "d_coeff"),
    "a_param": ("fne", "a_param"),
    "b_param": ("fne", "b_param"),
    "c_param": ("fne", "c_param"),
    "v_only": ("fne", "v_only"),
    "nx": ("swe", "nx"),
    "ny": ("swe", "ny"),
    "lx": ("swe", "lx"),
    "ly": ("swe", "ly"),
    "g": ("swe", "g"),
    "depth": ("swe", "depth"),
    "drop_amplitude": ("swe", "drop_amplitude"),
    "drop_width": ("swe", "drop_width"),
}


def _dataset_overrides(dataset, kwargs):
    overrides = {}
    for flag, value in kwargs.items():
        if value is None or value is False:
            continue
        if flag in ("n_t", "t_max"):
            overrides[flag] = value
            continue
        owner, field = _GENERATE_FLAGS[flag]
        if owner != dataset:
            raise ConfigError(f"--{flag.replace('_', '-')} does not apply to {dataset}")
        overrides[field] = value
    return overrides


@main.command()
@click.argument("dataset", type=click.Choice(experiment.DATASETS))
@click.option("--out", default=None, help="Output .dmds path.")
@click.option("--n-t", type=int, default=None, help="Snapshot count.")
@click.option("--t-max", type=float, default=None, help="Final time.")
@click.option("--n-w", type=int, default=None)
@click.option("--amplitude", type=float, default=None)
@click.option("--w-min", type=float, default=None)
@click.option("--w-max", type=float, default=None)
@click.option("--max-dt", type=float, default=None)
@click.option("--n-x", "n_x", type=int, default=None)
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--d-coeff", type=float, default=None)
@click.option("--a-param", type=float, default=None)
@click.option("--b-param", type=float, default=None)
@click.option("--c-param", type=float, default=None)
@click.option("--v-only", is_flag=True, default=False)
@click.option("--nx", type=int, default=None)
@click.option("--ny", type=int, default=None)
@click.option("--lx", type=float, default=None)
@click.option("--ly", type=float, default=None)
@click.option("--g", type=float, default=None)
@click.option("--depth", type=float, default=None)
@click.option("--drop-amplitude", type=float, default=None)
@click.option("--drop-width", type=float, default=None)
@click.pass_context
@guarded
def generate(ctx, dataset, out, **kwargs):
    """Generate a ground-truth dataset and write it as a DMDS file."""
    overrides = dict(ctx.obj["config_doc"].get("dataset_config", {}))
    overrides.update(_dataset_overrides(dataset, kwargs))
    cfg = experiment.build_dataset_config(dataset, overrides)
    solver = {"nlse": pde.solve_nlse, "fne": pde.solve_fne, "swe": pde.solve_swe}[dataset]
    x = solver(cfg)
    path = _out_path(ctx, out, f"{dataset}.dmds")
    snapshots.save(x, path)
    click.echo(f"Q={x.q} P={x.p} dt={x.dt!r}")
    _echo(ctx, f"wrote {path}")


@main.command()
@click.argument("data_path", type=click.Path())
@click.option("--snr-db", type=float, default=None, help="Target SNR in dB.")
@click.option("--clean", is_flag=True, help="No noise; copies the data through.")
@click.option("--seed", type=int, default=None, help="RNG seed (default: NOISYDMD_SEED or 0).")
@click.option("--out", default=None, help="Output .dmds path.")
@click.pass_context
@guarded
def corrupt(ctx, data_path, snr_db, clean, seed, out):
    """Add white Gaussian noise at a target SNR."""
    if clean:
        snr = math.inf
    elif snr_db is None:
        raise ConfigError("either --snr-db or --clean is required")
    else:
        snr = snr_db
    seed = _default_seed() if seed is None else seed
    x = snapshots.load(data_path)
    noisy = snapshots.add_noise(x, snapshots.NoiseSpec(snr, seed))
    path = _out_path(ctx, out, Path(data_path).stem + "_noisy.dmds")
    snapshots.save(noisy, path)
    _echo(ctx, f"wrote {path} (snr={experiment.snr_label(snr)} dB, seed={seed})")


@main.command("filter")
@click.argument("data_path", type=click.Path())
@click.option("--method", type=click.Choice(["adm", "ialm", "tls"]), required=True)
@click.option("--out", default=None, help="Output .dmds path.")
@click.option("--rank", default="auto", show_default=True,
              help="Projection rank for tls: 'auto' or an integer.")
@click.option("--rank-tol", type=float, default=1e-6, show_default=True)
@click.option("--tol", type=float, default=None, help="Solver convergence tolerance.")
@click.option("--max-iter", type=int, default=None)
@click.option("--mu", type=float, default=None, help="Fixed penalty (adm).")
@click.option("--mu0", type=float, default=None, help="Initial penalty (ialm).")
@click.option("--rho", type=float, default=None, help="Penalty growth factor (ialm).")
@click.option("--lambda-coef", type=float, default=None)
@click.option("--trace", "trace_path", default=None, help="Per-iteration diagnostics CSV.")
@click.pass_context
@guarded
def filter_cmd(ctx, data_path, method, out, rank, rank_tol, tol, max_iter, mu, mu0, rho,
               lambda_coef, trace_path):
    """Denoise a dataset; writes the filtered matrix and prints its rank."""
    x = snapshots.load(data_path)
    if method == "tls":
        pair = snapshots.split(x)
        r = tlsdmd.select_rank(pair) if rank == "auto" else int(rank)
        x1_proj, x2_proj, _ = tlsdmd.tls_project(pair, r)
        filtered = np.column_stack([x1_proj, x2_proj[:, -1]])
        result_rank = metrics.numerical_rank(x1_proj, rank_tol)
    else:
        if method == "adm":
            params = rpca.AdmParams()
            overrides = {"tol": tol, "max_iter": max_iter, "mu": mu, "lambda_coef": lambda_coef}
            solver = rpca.rpca_adm
        else:
            params = rpca.IalmParams()
            overrides = {"tol": tol, "max_iter": max_iter, "mu0": mu0, "rho": rho,
                         "lambda_coef": lambda_coef}
            solver = rpca.rpca_ialm
        for key, value in overrides.items():
            if value is not None:
                setattr(params, key, value)
        result = solver(x.values, params, trace_path=trace_path)
        report = rpca.filter_report(x.values, result, rank_tol)
        filtered = report.filtered
        result_rank = report.rank
        if not result.converged:
            _echo(ctx, f"warning: not converged after {result.iterations} iterations "
                       f"(residual {result.residual:.3e})")
    path = _out_path(ctx, out, Path(data_path).stem + f"_{method}.dmds")
    snapshots.save(snapshots.SnapshotMatrix(filtered, x.dt, x.t0, x.grid), path)
    click.echo(f"method={method} rank={result_rank}")
    _echo(ctx, f"wrote {path}")


def _parse_rank(rank):
    if rank == "auto":
        return "auto"
    try:
        value = int(rank)
    except ValueError:
        raise ConfigError(f"rank must be 'auto' or an integer, got {rank!r}") from None
    if value < 1:
        raise ConfigError("rank must be positive")
    return value


@main.command()
@click.argument("data_path", type=click.Path())
@click.option("--rank", default="auto", show_default=True, help="'auto' or an integer.")
@click.option("--tls", "use_tls", is_flag=True, help="Project both subsets before the fit.")
@click.option("--out", default=None, help="Output model JSON path.")
@click.pass_context
@guarded
def fit(ctx, data_path, rank, use_tls, out):
    """Fit a DMD model to a dataset and write it as JSON."""
    x = snapshots.load(data_path)
    pair = snapshots.split(x)
    rank = _parse_rank(rank)
    if use_tls:
        r = tlsdmd.select_rank(pair) if rank == "auto" else rank
        model = tlsdmd.tls_dmd(pair, r, x.dt)
    else:
        r = experiment._resolve_plain_rank(pair.x1, rank)
        model = dmd.fit(pair, r, x.dt)
    path = _out_path(ctx, out, Path(data_path).stem + "_model.json")
    with open(path, "w") as fh:
        fh.write(dmd.model_to_json(model))
        fh.write("\n")
    click.echo(f"rank={model.rank}")
    _echo(ctx, f"wrote {path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--truth", "truth_path", required=True, type=click.Path(),
              help="Clean dataset the reconstruction is scored against.")
@click.option("--out", default=None, help="Records CSV path.")
@click.option("--error-csv", default=None, help="Relative-error-over-time CSV path.")
@click.option("--dataset", default=None, help="Label for the record row.")
@click.option("--method", default="none", show_default=True)
@click.option("--snr-db", type=float, default=math.inf)
@click.option("--seed", type=int, default=None)
@click.option("--filtered-rank", type=int, default=None,
              help="Rank label for the record (defaults to the model rank).")
@click.pass_context
@guarded
def evaluate(ctx, model_path, truth_path, out, error_csv, dataset, method, snr_db, seed,
             filtered_rank):
    """Score a fitted model against a clean dataset."""
    with open(model_path) as fh:
        model = dmd.model_from_json(fh.read())
    truth = snapshots.load(truth_path)
    rel_times = truth.dt * np.arange(truth.p)
    recon = dmd.reconstruct(model, rel_times)
    eps = dmd.relative_error_series(recon, truth.values)
    eps_path = _out_path(ctx, error_csv, Path(truth_path).stem + "_eps.csv")
    experiment._write_eps_csv(eps_path, truth.times, eps)
    record = metrics.MetricsRecord(
        dataset=dataset or Path(truth_path).stem,
        method=method,
        snr_db=snr_db,
        seed=_default_seed() if seed is None else seed,
        rank_used=model.rank,
        rmse=metrics.rmse(recon, truth.values),
        cc_paper=metrics.cc_paper(recon, truth.values),
        cc_pearson=metrics.cc_pearson(recon, truth.values),
        filtered_rank=model.rank if filtered_rank is None else filtered_rank,
        error_series_path=str(eps_path.name),
    )
    records_path = _out_path(ctx, out, Path(truth_path).stem + "_records.csv")
    metrics.write_records_csv([record], records_path)
    click.echo(f"rmse={record.rmse!r} cc_paper={record.cc_paper!r} "
               f"cc_pearson={record.cc_pearson!r}")
    _echo(ctx, f"wrote {records_path}")


def _experiment_config(ctx, dataset, data_path, snr_db, clean, seeds, methods, rank,
                       rank_tol, filter_splits):
    doc = dict(ctx.obj["config_doc"])
    doc.setdefault("output_dir", ctx.obj["out_dir"])
    doc["threads"] = ctx.obj["threads"]
    if dataset is not None:
        doc["dataset"] = dataset
    if data_path is not None:
        doc["data_path"] = data_path
    if clean:
        doc["snr_db"] = [math.inf]
    elif snr_db:
        doc["snr_db"] = sorted(float(v) for v in snr_db)
    if seeds is not None:
        doc["seeds"] = [int(s) for s in seeds.split(",") if s != ""]
    elif "seeds" not in doc:
        base = _default_seed()
        doc["seeds"] = list(range(base, base + 10))
    if methods is not None:
        doc["methods"] = [m for m in methods.split(",") if m != ""]
    if rank is not None:
        doc["rank"] = _parse_rank(rank)
    if rank_tol is not None:
        doc["rank_tol"] = rank_tol
    if filter_splits:
        doc["filter_splits"] = True
    cfg = experiment.config_from_dict(doc)
    cfg.validate()
    return cfg


_pipeline_options = [
    click.option("--data", "data_path", type=click.Path(), default=None,
                 help="Use a pre-generated DMDS file instead of solving."),
    click.option("--snr-db", type=float, multiple=True, help="May repeat; sorted ascending."),
    click.option("--clean", is_flag=True, help="Single noiseless run."),
    click.option("--seeds", default=None, help="Comma-separated seed list."),
    click.option("--methods", default=None, help="Comma-separated subset of none,adm,ialm,tls."),
    click.option("--rank", default=None, help="'auto' or an integer."),
    click.option("--rank-tol", type=float, default=None),
    click.option("--filter-splits", is_flag=True,
                 help="Filter the two shifted subsets separately (not the default)."),
]


def _with_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@main.command()
@click.argument("dataset", type=click.Choice(experiment.DATASETS), required=False)
@_with_options(_pipeline_options)
@click.pass_context
@guarded
def pipeline(ctx, dataset, data_path, snr_db, clean, seeds, methods, rank, rank_tol,
             filter_splits):
    """Corrupt, filter, fit, and score every (method, snr, seed) cell."""
    cfg = _experiment_config(ctx, dataset, data_path, snr_db, clean, seeds, methods, rank,
                             rank_tol, filter_splits)
    records = experiment.run_pipeline(cfg, log=None if ctx.obj["quiet"] else click.echo)
    click.echo(str(records))


@main.command()
@click.argument("dataset", type=click.Choice(experiment.DATASETS), required=False)
@_with_options(_pipeline_options)
@click.pass_context
@guarded
def sweep(ctx, dataset, data_path, snr_db, clean, seeds, methods, rank, rank_tol,
          filter_splits):
    """Pipeline over an SNR sweep plus a per-method summary CSV."""
    cfg = _experiment_config(ctx, dataset, data_path, snr_db, clean, seeds, methods, rank,
                             rank_tol, filter_splits)
    summary = experiment.run_sweep(cfg, log=None if ctx.obj["quiet"] else click.echo)
    click.echo(str(summary))


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path())
@click.option("--kind", type=click.Choice(plots.PLOT_KINDS), required=True)
@click.option("--out", default=None, help="Output SVG path.")
@click.option("--value", default="mean_rmse", show_default=True,
              help="Summary column for --kind sweep.")
@click.option("--snapshot-index", type=int, default=None,
              help="Frame to render for 2-D surface plots.")
@click.pass_context
@guarded
def plot(ctx, inputs, kind, out, value, snapshot_index):
    """Render a dataset or experiment CSV as a static SVG figure."""
    path = _out_path(ctx, out, f"{kind}.svg")
    if kind == "surface":
        if len(inputs) != 1:
            raise ConfigError("surface plots take exactly one dataset file")
        plots.plot_surface(inputs[0], path, snapshot_index=snapshot_index)
    elif kind == "sweep":
        if len(inputs) != 1:
            raise ConfigError("sweep plots take exactly one summary CSV")
        plots.plot_sweep(inputs[0], path, value=value)
    elif kind == "error_t":
        plots.plot_error_t(list(inputs), path)
    else:
        if len(inputs) != 1:
            raise ConfigError("rank bar plots take exactly one records CSV")
        plots.plot_rank_bar(inputs[0], path)
    _echo(ctx, f"wrote {path}")


if __name__ == "__main__":
    main()
