"""Noise-robust dynamic mode decomposition toolkit.

Generates spatio-temporal datasets from three PDEs, corrupts them with white
Gaussian noise at a target SNR, denoises with robust-PCA or a total-least-
squares projection, fits DMD models, and scores the reconstructions.
"""

__version__ = "0.1.0"

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
    SingularError,
    ZeroNormError,
)
from .snapshots import GridMeta, NoiseSpec, SnapshotMatrix, SplitPair, add_noise, load, save, split
from .pde import FneConfig, NlseConfig, SweConfig, solve_fne, solve_nlse, solve_swe
from .dmd import DmdModel, SvdTriple, fit, reconstruct, relative_error_series, truncated_svd
from .rpca import AdmParams, FilterReport, IalmParams, RpcaResult, filter_report, rpca_adm, rpca_ialm, shrink, svt
from .tlsdmd import TlsProjection, tls_dmd, tls_project
from .metrics import MetricsRecord, cc_paper, cc_pearson, numerical_rank, rmse

__all__ = [
    "__version__",
    "NoisyDmdError", "ShapeError", "FormatError", "ConfigError", "BlowupError",
    "CflError", "RankError", "NumericalError", "SingularError", "ZeroNormError",
    "DegenerateError", "SchemaError",
    "GridMeta", "SnapshotMatrix", "SplitPair", "NoiseSpec", "split", "add_noise",
    "save", "load",
    "NlseConfig", "FneConfig", "SweConfig", "solve_nlse", "solve_fne", "solve_swe",
    "SvdTriple", "DmdModel", "truncated_svd", "fit", "reconstruct", "relative_error_series",
    "AdmParams", "IalmParams", "RpcaResult", "FilterReport", "shrink", "svt",
    "rpca_adm", "rpca_ialm", "filter_report",
    "TlsProjection", "tls_project", "tls_dmd",
    "MetricsRecord", "rmse", "cc_paper", "cc_pearson", "numerical_rank",
]
