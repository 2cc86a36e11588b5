"""Snapshot data model: spatio-temporal matrices, shift splitting, noise injection, and file I/O.

A snapshot matrix holds Q spatial values per column and P columns sampled at a
uniform time step.  The binary format ("DMDS v1") round-trips matrices exactly.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError

MAGIC = b"DMDS"
VERSION = 1

_GRID_KIND_CODES = {"line1d": 0, "plane2d": 1}
_GRID_KIND_NAMES = {v: k for k, v in _GRID_KIND_CODES.items()}


@dataclass(frozen=True)
class GridMeta:
    """Spatial layout of the rows of a snapshot matrix.

    ``points`` multiplies out to the row count Q.  For ``plane2d`` fields the
    2-D array is flattened with the first axis varying fastest, so column k of
    the matrix is ``field.flatten(order="F")``.
    """

    kind: str
    extents: tuple[tuple[float, float], ...]
    points: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _GRID_KIND_CODES:
            raise ShapeError(f"unknown grid kind {self.kind!r}")
        n_axes = 1 if self.kind == "line1d" else 2
        if len(self.extents) != n_axes or len(self.points) != n_axes:
            raise ShapeError(f"{self.kind} grid needs {n_axes} axis block(s)")
        if any(p < 1 for p in self.points):
            raise ShapeError("grid point counts must be positive")

    @property
    def size(self) -> int:
        return int(np.prod(self.points))


def line1d(x_min: float, x_max: float, n: int) -> GridMeta:
    return GridMeta("line1d", ((float(x_min), float(x_max)),), (int(n),))


def plane2d(x_ext, y_ext, nx: int, ny: int) -> GridMeta:
    return GridMeta(
        "plane2d",
        ((float(x_ext[0]), float(x_ext[1])), (float(y_ext[0]), float(y_ext[1]))),
        (int(nx), int(ny)),
    )


@dataclass(frozen=True)
class SnapshotMatrix:
    """Q x P matrix of spatial snapshots with uniform time step ``dt``."""

    values: np.ndarray
    dt: float
    t0: float
    grid: GridMeta

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))
        if self.values.ndim != 2:
            raise ShapeError("snapshot values must be a 2-D matrix")
        q, p = self.values.shape
        if q < 2 or p < 3:
            raise ShapeError(f"need Q >= 2 and P >= 3, got {q} x {p}")
        if self.grid.size != q:
            raise ShapeError(f"grid describes {self.grid.size} points but matrix has {q} rows")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive and finite")
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        if not np.all(np.isfinite(self.values.view(float) if np.iscomplexobj(self.values) else self.values)):
            raise ValueError("snapshot entries must be finite")

    @property
    def q(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.p)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.values))


@dataclass(frozen=True)
class SplitPair:
    """Shifted column pair: ``x2`` column k equals the parent's column k+1."""

    x1: np.ndarray
    x2: np.ndarray


@dataclass(frozen=True)
class NoiseSpec:
    """Target SNR in dB plus the RNG seed.  ``snr_db = inf`` means no noise."""

    snr_db: float
    seed: int

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be finite (or +inf for clean data)")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


def split(x: SnapshotMatrix) -> SplitPair:
    """Split into the two column-shifted subsets used by an operator fit."""
    if x.p < 3:
        raise ShapeError("splitting needs at least 3 snapshots")
    return SplitPair(x1=x.values[:, :-1], x2=x.values[:, 1:])


def add_noise(x: SnapshotMatrix, spec: NoiseSpec) -> SnapshotMatrix:
    """Add white Gaussian noise scaled to the target SNR.

    The noise power is set against the measured Frobenius norm of ``x`` so
    that ``10*log10(||x||_F^2 / E||C||_F^2) == spec.snr_db``.  Complex data
    gets independent real/imaginary noise with half the variance in each part.
    Deterministic for a fixed ``(x, spec)``.
    """
    if spec.snr_db == math.inf:
        return x
    power = float(np.linalg.norm(x.values) ** 2)
    sigma2 = power * 10.0 ** (-spec.snr_db / 10.0) / x.values.size
    rng = np.random.default_rng(spec.seed)
    if x.is_complex:
        scale = math.sqrt(sigma2 / 2.0)
        noise = scale * (
            rng.standard_normal(x.values.shape) + 1j * rng.standard_normal(x.values.shape)
        )
    else:
        noise = math.sqrt(sigma2) * rng.standard_normal(x.values.shape)
    return SnapshotMatrix(x.values + noise, x.dt, x.t0, x.grid)


def empirical_snr_db(clean: np.ndarray, noisy: np.ndarray) -> float:
    """Measured SNR of a corrupted matrix against its clean original."""
    return 10.0 * math.log10(
        float(np.linalg.norm(clean) ** 2) / float(np.linalg.norm(noisy - clean) ** 2)
    )


def save(x: SnapshotMatrix, path) -> None:
    """Write a matrix in the DMDS v1 binary format (little-endian)."""
    kind_code = _GRID_KIND_CODES[x.grid.kind]
    header = struct.pack(
        "<4sIBBHQQdd", MAGIC, VERSION, int(x.is_complex), kind_code, 0, x.q, x.p, x.dt, x.t0
    )
    blocks = b"".join(
        struct.pack("<Qdd", n, lo, hi) for n, (lo, hi) in zip(x.grid.points, x.grid.extents)
    )
    dtype = "<c16" if x.is_complex else "<f8"
    payload = np.ascontiguousarray(x.values.astype(dtype, copy=False).flatten(order="F")).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + blocks + payload)


def load(path) -> SnapshotMatrix:
    """Read a DMDS v1 file; raises :class:`FormatError` on malformed input."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head_size = struct.calcsize("<4sIBBHQQdd")
    if len(raw) < head_size:
        raise FormatError("file shorter than header")
    magic, version, cflag, kind_code, _, q, p, dt, t0 = struct.unpack(
        "<4sIBBHQQdd", raw[:head_size]
    )
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if cflag not in (0, 1) or kind_code not in _GRID_KIND_NAMES:
        raise FormatError("corrupt header flags")
    kind = _GRID_KIND_NAMES[kind_code]
    n_axes = 1 if kind == "line1d" else 2
    offset = head_size
    block_size = struct.calcsize("<Qdd")
    points, extents = [], []
    for _ in range(n_axes):
        if len(raw) < offset + block_size:
            raise FormatError("truncated grid block")
        n, lo, hi = struct.unpack("<Qdd", raw[offset : offset + block_size])
        points.append(int(n))
        extents.append((lo, hi))
        offset += block_size
    if int(np.prod(points)) != q:
        raise FormatError("grid point counts do not match row count")
    item = 16 if cflag else 8
    expected = q * p * item
    if len(raw) - offset != expected:
        raise FormatError(f"payload holds {len(raw) - offset} bytes, header implies {expected}")
    dtype = "<c16" if cflag else "<f8"
    values = np.frombuffer(raw[offset:], dtype=dtype).reshape((q, p), order="F").copy()
    grid = GridMeta(kind, tuple(extents), tuple(points))
    return SnapshotMatrix(values, dt, t0, grid)


def _format_entry(v) -> str:
    if np.iscomplexobj(np.asarray(v)):
        re, im = float(np.real(v)), float(np.imag(v))
        sign = "+" if im >= 0 else "-"
        return f"{re!r}{sign}{abs(im)!r}i"
    return repr(float(v))


def export_csv(x: SnapshotMatrix, path) -> None:
    """Write one CSV row per snapshot: the time, then the Q grid values."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"point_{i}" for i in range(x.q)])
        for k, t in enumerate(x.times):
            writer.writerow([repr(float(t))] + [_format_entry(v) for v in x.values[:, k]])
