"""Total-least-squares DMD: project both snapshot subsets before the operator fit.

The projection keeps the dominant right-singular subspace of the stacked data,
which counters the eigenvalue bias plain DMD picks up from sensor noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dmd
from .errors import NumericalError, RankError

RANK_ENERGY = dmd.RANK_ENERGY


@dataclass(frozen=True)
class TlsProjection:
    """Truncated eigenvector basis of the summed Gram matrix, plus diagnostics."""

    vn: np.ndarray
    r: int
    eigenvalues: np.ndarray


def _gram(pair) -> np.ndarray:
    x1 = np.asarray(pair.x1)
    x2 = np.asarray(pair.x2)
    return x1.conj().T @ x1 + x2.conj().T @ x2


def gram_eigenvalues(pair) -> np.ndarray:
    """Descending eigenvalues of x1*x1 + x2*x2 (squared stacked singular values)."""
    try:
        evals = np.linalg.eigvalsh(_gram(pair))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return evals[::-1]


def select_rank(pair, energy: float = RANK_ENERGY) -> int:
    """Automatic projection rank: same cumulative-energy rule as the plain fit."""
    evals = np.maximum(gram_eigenvalues(pair), 0.0)
    total = evals.sum()
    if total <= 0:
        return 1
    return int(np.searchsorted(np.cumsum(evals), energy * total) + 1)


def tls_project(pair, r: int):
    """Project both subsets onto the top-``r`` right-singular subspace.

    Returns ``(x1_proj, x2_proj, TlsProjection)``.
    """
    x1 = np.asarray(pair.x1)
    x2 = np.asarray(pair.x2)
    m = x1.shape[1]
    if not 1 <= r <= m:
        raise RankError(f"rank {r} outside [1, {m}]")
    z = _gram(pair)
    try:
        evals, evecs = np.linalg.eigh(z)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals)[::-1]
    vn = evecs[:, order[:r]]
    projector = vn @ vn.conj().T
    proj = TlsProjection(vn=vn, r=r, eigenvalues=evals[order[:r]])
    return x1 @ projector, x2 @ projector, proj


def tls_dmd(pair, r: int, dt: float) -> dmd.DmdModel:
    """Fit DMD on the projected pair; modes and amplitudes as in the plain fit."""
    x1_proj, x2_proj, _ = tls_project(pair, r)
    return dmd._fit_matrices(x1_proj, x2_proj, r, dt)


def _stacked_singular_values(pair) -> np.ndarray:
    # Cross-check route: singular values of [x1; x2] stacked vertically.
    stacked = np.vstack([np.asarray(pair.x1), np.asarray(pair.x2)])
    return np.linalg.svd(stacked, compute_uv=False)
