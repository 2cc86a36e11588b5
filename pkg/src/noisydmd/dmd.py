"""Exact dynamic mode decomposition on shift-split snapshot pairs."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, RankError, ShapeError, SingularError, ZeroNormError
from .snapshots import SplitPair

# Retained singular values below this fraction of the largest cannot be
# inverted safely in the projected-operator formula.
SINGULAR_FLOOR = 1e-12

# Default cumulative squared-singular-value energy for automatic rank choice.
RANK_ENERGY = 0.999


@dataclass(frozen=True)
class SvdTriple:
    """Truncated SVD ``x ~ u @ diag(s) @ v.conj().T`` with descending ``s``."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class DmdModel:
    """Modes, spectrum, and amplitudes of a fitted linear evolution model.

    ``omega`` holds the continuous-time exponents ``log(lambda)/dt`` on the
    principal branch, so reconstruction uses ``phi @ exp(omega*t) * b`` with
    time measured from the first snapshot.
    """

    phi: np.ndarray
    lambdas: np.ndarray
    omega: np.ndarray
    b: np.ndarray
    rank: int
    dt: float
    w_eigvecs: np.ndarray | None = None


def truncated_svd(x: np.ndarray, r: int) -> SvdTriple:
    """Dominant-``r`` singular triple of ``x``."""
    x = np.asarray(x)
    if not 1 <= r <= min(x.shape):
        raise RankError(f"rank {r} outside [1, {min(x.shape)}]")
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return SvdTriple(u[:, :r], s[:r], vh[:r].conj().T)


def select_rank(singular_values: np.ndarray, energy: float = RANK_ENERGY) -> int:
    """Smallest rank whose cumulative squared singular values reach ``energy``."""
    sq = np.asarray(singular_values, dtype=float) ** 2
    total = sq.sum()
    if total <= 0:
        return 1
    return int(np.searchsorted(np.cumsum(sq), energy * total) + 1)


def _fit_matrices(x1: np.ndarray, x2: np.ndarray, r: int, dt: float) -> DmdModel:
    if x1.shape != x2.shape:
        raise ShapeError("split subsets must have identical shape")
    if dt <= 0:
        raise ValueError("dt must be positive")
    svd = truncated_svd(x1, r)
    if svd.s[0] <= 0 or svd.s[-1] < SINGULAR_FLOOR * svd.s[0]:
        raise SingularError(
            f"retained singular value {svd.s[-1]:.3e} below {SINGULAR_FLOOR:g} of {svd.s[0]:.3e}"
        )
    x2_v_sinv = (x2 @ svd.v) / svd.s[None, :]
    atilde = svd.u.conj().T @ x2_v_sinv
    try:
        lambdas, w = np.linalg.eig(atilde)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    phi = x2_v_sinv @ w
    omega = np.log(lambdas.astype(complex)) / dt
    b = np.linalg.lstsq(phi, x1[:, 0].astype(complex), rcond=None)[0]
    return DmdModel(phi=phi, lambdas=lambdas, omega=omega, b=b, rank=r, dt=dt, w_eigvecs=w)


def fit(pair: SplitPair, r: int, dt: float) -> DmdModel:
    """Fit an exact-DMD model of rank ``r`` to a shifted snapshot pair."""
    return _fit_matrices(np.asarray(pair.x1), np.asarray(pair.x2), r, dt)


def reconstruct(model: DmdModel, times) -> np.ndarray:
    """Evaluate the model at the given times (measured from the first snapshot).

    Column j is ``phi @ (exp(omega * t_j) * b)``.
    """
    t = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("reconstruction times must be finite")
    dynamics = np.exp(np.outer(model.omega, t)) * model.b[:, None]
    return model.phi @ dynamics


def relative_error_series(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Per-column relative 2-norm error of a prediction against ground truth."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ShapeError(f"shape mismatch {pred.shape} vs {truth.shape}")
    norms = np.linalg.norm(truth, axis=0)
    if np.any(norms == 0):
        raise ZeroNormError("a ground-truth column has zero norm")
    return np.linalg.norm(pred - truth, axis=0) / norms


def _complex_list(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=complex)]


def model_to_json(model: DmdModel) -> str:
    """Serialize a model; complex numbers become [re, im] pairs."""
    doc = {
        "phi": [_complex_list(model.phi[:, j]) for j in range(model.phi.shape[1])],
        "lambda": _complex_list(model.lambdas),
        "omega": _complex_list(model.omega),
        "b": _complex_list(model.b),
        "rank": int(model.rank),
        "dt": float(model.dt),
    }
    return json.dumps(doc, sort_keys=True)


def _from_pairs(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])


def model_from_json(text: str) -> DmdModel:
    doc = json.loads(text)
    phi = np.column_stack([_from_pairs(col) for col in doc["phi"]])
    return DmdModel(
        phi=phi,
        lambdas=_from_pairs(doc["lambda"]),
        omega=_from_pairs(doc["omega"]),
        b=_from_pairs(doc["b"]),
        rank=int(doc["rank"]),
        dt=float(doc["dt"]),
        w_eigvecs=None,
    )
