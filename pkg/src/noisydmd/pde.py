"""Ground-truth dataset generators: three PDE solvers producing snapshot matrices.

* 1-D cubic Schrodinger equation, split-step spectral integration (complex field)
* 1-D two-field excitable reaction-diffusion system, central differences + RK4
* 2-D shallow water equations, two-step Lax-Wendroff with reflective walls
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowupError, CflError, ConfigError
from .snapshots import GridMeta, SnapshotMatrix, line1d, plane2d

BLOWUP_LIMIT = 1.0e6
MAX_SUBSTEPS = 100_000


def _guard(name: str, *fields: np.ndarray) -> None:
    for f in fields:
        flat = f.view(float) if np.iscomplexobj(f) else f
        if not np.all(np.isfinite(flat)) or np.max(np.abs(f)) > BLOWUP_LIMIT:
            raise BlowupError(f"{name}: field magnitude exceeded {BLOWUP_LIMIT:g}")


# ---------------------------------------------------------------------------
# Nonlinear Schrodinger equation:  dp/dt = (i/2) p_ww + i |p|^2 p


@dataclass
class NlseConfig:
    w_min: float = -15.0
    w_max: float = 15.0
    n_w: int = 512
    t_max: float = 8 * math.pi
    n_t: int = 200
    profile: str = "soliton_sech"
    amplitude: float = 2.0
    custom_profile: np.ndarray | None = None
    max_dt: float = 5e-4
    substeps: int | None = None  # per-snapshot override, mainly for step-size studies

    def validate(self):
        if self.w_min >= self.w_max:
            raise ConfigError("w_min must be below w_max")
        if self.n_w < 2 or self.n_w & (self.n_w - 1):
            raise ConfigError("n_w must be a power of two")
        if self.n_t < 3:
            raise ConfigError("need at least 3 snapshots")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.profile not in ("soliton_sech", "custom"):
            raise ConfigError(f"unknown profile {self.profile!r}")
        if self.profile == "custom":
            if self.custom_profile is None or len(self.custom_profile) != self.n_w:
                raise ConfigError("custom profile must supply n_w samples")
        if self.max_dt <= 0 or (self.substeps is not None and self.substeps < 1):
            raise ConfigError("invalid time-step controls")


def solve_nlse(cfg: NlseConfig) -> SnapshotMatrix:
    """Integrate the cubic Schrodinger equation on a periodic grid.

    Strang splitting: a linear half step applied in frequency space, a
    nonlinear phase rotation in physical space, then the second linear half
    step.  Both sub-flows are norm-preserving, so the discrete L2 norm is
    conserved to round-off.
    """
    cfg.validate()
    dw = (cfg.w_max - cfg.w_min) / cfg.n_w
    w = cfg.w_min + dw * np.arange(cfg.n_w)
    k = 2 * np.pi * np.fft.fftfreq(cfg.n_w, d=dw)
    if cfg.profile == "soliton_sech":
        p = (cfg.amplitude / np.cosh(w)).astype(complex)
    else:
        p = np.asarray(cfg.custom_profile, dtype=complex).copy()
    dt = cfg.t_max / (cfg.n_t - 1)
    n_sub = cfg.substeps if cfg.substeps is not None else max(1, math.ceil(dt / cfg.max_dt))
    tau = dt / n_sub
    half_phase = np.exp(-0.25j * k**2 * tau)
    out = np.empty((cfg.n_w, cfg.n_t), dtype=complex)
    out[:, 0] = p
    _guard("nlse", p)
    for j in range(1, cfg.n_t):
        for _ in range(n_sub):
            p = np.fft.ifft(half_phase * np.fft.fft(p))
            p = p * np.exp(1j * tau * np.abs(p) ** 2)
            p = np.fft.ifft(half_phase * np.fft.fft(p))
        _guard("nlse", p)
        out[:, j] = p
    return SnapshotMatrix(out, dt, 0.0, line1d(cfg.w_min, cfg.w_max, cfg.n_w))


# ---------------------------------------------------------------------------
# Excitable two-field reaction-diffusion system:
#   V_t = D V_xx + V(a - V)(V - 1) - W
#   W_t = b V - c W
# with zero-flux boundaries at both endpoints.


@dataclass
class FneConfig:
    x_min: float = -10.0
    x_max: float = 10.0
    n_x: int = 512
    t_max: float = 400.0
    n_t: int = 300
    d_coeff: float = 0.01
    a_param: float = 0.1
    b_param: float = 0.01
    c_param: float = 0.02
    v_only: bool = False
    v0: np.ndarray | None = None
    w0: np.ndarray | None = None
    substeps: int | None = None

    def validate(self):
        if self.x_min >= self.x_max:
            raise ConfigError("x_min must be below x_max")
        if self.n_x < 3:
            raise ConfigError("need at least 3 grid points")
        if self.n_t < 3:
            raise ConfigError("need at least 3 snapshots")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.d_coeff < 0:
            raise ConfigError("diffusion coefficient must be nonnegative")
        for arr in (self.v0, self.w0):
            if arr is not None and len(arr) != self.n_x:
                raise ConfigError("initial field must supply n_x samples")
        if self.substeps is not None and self.substeps < 1:
            raise ConfigError("substeps must be positive")


def solve_fne(cfg: FneConfig) -> SnapshotMatrix:
    """Integrate the excitable system; snapshots stack V over W unless v_only.

    Space: second-order central differences with ghost-point zero-flux closure.
    Time: classical RK4 with sub-steps chosen against the explicit diffusion
    stability bound.
    """
    cfg.validate()
    dx = (cfg.x_max - cfg.x_min) / (cfg.n_x - 1)
    x = cfg.x_min + dx * np.arange(cfg.n_x)
    v = np.exp(-(x**2)) if cfg.v0 is None else np.asarray(cfg.v0, dtype=float).copy()
    w = 0.2 * np.exp(-((x + 2.0) ** 2)) if cfg.w0 is None else np.asarray(cfg.w0, dtype=float).copy()
    d, a, b, c = cfg.d_coeff, cfg.a_param, cfg.b_param, cfg.c_param
    inv_dx2 = 1.0 / dx**2

    def lap(u):
        out = np.empty_like(u)
        out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
        out[0] = 2.0 * (u[1] - u[0])
        out[-1] = 2.0 * (u[-2] - u[-1])
        return out * inv_dx2

    def rhs(v, w):
        dv = d * lap(v) + v * (a - v) * (v - 1.0) - w
        dw = b * v - c * w
        return dv, dw

    dt = cfg.t_max / (cfg.n_t - 1)
    if cfg.substeps is not None:
        n_sub = cfg.substeps
    elif d > 0:
        # RK4 keeps the real axis stable out to about -2.79; diffusion
        # eigenvalues reach -4*d/dx^2.
        stable = 0.7 * 2.79 * dx**2 / (4.0 * d)
        n_sub = max(1, math.ceil(dt / stable))
    else:
        n_sub = 1
    tau = dt / n_sub

    def stack(v, w):
        return v.copy() if cfg.v_only else np.concatenate([v, w])

    q = cfg.n_x if cfg.v_only else 2 * cfg.n_x
    out = np.empty((q, cfg.n_t), dtype=float)
    out[:, 0] = stack(v, w)
    _guard("fne", v, w)
    for j in range(1, cfg.n_t):
        for _ in range(n_sub):
            k1v, k1w = rhs(v, w)
            k2v, k2w = rhs(v + 0.5 * tau * k1v, w + 0.5 * tau * k1w)
            k3v, k3w = rhs(v + 0.5 * tau * k2v, w + 0.5 * tau * k2w)
            k4v, k4w = rhs(v + tau * k3v, w + tau * k3w)
            v = v + (tau / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            w = w + (tau / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        _guard("fne", v, w)
        out[:, j] = stack(v, w)
    # The grid block describes the row space of the matrix; stacked output
    # doubles the point count on the same extent.
    grid = line1d(cfg.x_min, cfg.x_max, q)
    return SnapshotMatrix(out, dt, 0.0, grid)


# ---------------------------------------------------------------------------
# Shallow water equations in conservation form for (k, k*u, k*v); the constant
# density cancels from the scheme.


@dataclass
class SweConfig:
    nx: int = 64
    ny: int = 64
    lx: float = 10.0
    ly: float = 10.0
    g: float = 9.81
    rho: float = 1.0
    t_max: float = 2.0
    n_t: int = 150
    depth: float = 1.0
    drop_amplitude: float = 0.3
    drop_width: float = 1.25
    drop_center: tuple[float, float] | None = None
    cfl: float = 0.45
    substeps: int | None = None

    def validate(self):
        if self.nx < 8 or self.ny < 8:
            raise ConfigError("grid must be at least 8 x 8")
        if self.lx <= 0 or self.ly <= 0:
            raise ConfigError("physical extents must be positive")
        if self.g <= 0:
            raise ConfigError("g must be positive")
        if self.rho <= 0:
            raise ConfigError("rho must be positive")
        if self.n_t < 3:
            raise ConfigError("need at least 3 snapshots")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.depth <= 0:
            raise ConfigError("background depth must be positive")
        if self.drop_amplitude <= -self.depth:
            raise ConfigError("drop would empty the water column")
        if self.drop_width <= 0:
            raise ConfigError("drop width must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.substeps is not None and self.substeps < 1:
            raise ConfigError("substeps must be positive")


def _ghost(h, u, v):
    """Pad with reflective-wall ghost cells.

    Height mirrors evenly; the normal momentum flips sign at its wall so the
    wall-interface mass flux vanishes identically.
    """
    hg = np.pad(h, 1, mode="edge")
    ug = np.pad(u, 1, mode="edge")
    vg = np.pad(v, 1, mode="edge")
    ug[0, :] = -ug[1, :]
    ug[-1, :] = -ug[-2, :]
    vg[:, 0] = -vg[:, 1]
    vg[:, -1] = -vg[:, -2]
    return hg, ug, vg


def _swe_step(h, u, v, g, dt, dx, dy):
    """One two-step Lax-Wendroff update of (h, u, v) = (k, k*u, k*v)."""
    hg, ug, vg = _ghost(h, u, v)

    # Half step on x-interfaces (interior columns only).
    hi, ui, vi = hg[:, 1:-1], ug[:, 1:-1], vg[:, 1:-1]
    fx_h = ui
    fx_u = ui**2 / hi + 0.5 * g * hi**2
    fx_v = ui * vi / hi
    cx = dt / (2.0 * dx)
    hx = 0.5 * (hi[1:] + hi[:-1]) - cx * (fx_h[1:] - fx_h[:-1])
    ux = 0.5 * (ui[1:] + ui[:-1]) - cx * (fx_u[1:] - fx_u[:-1])
    vx = 0.5 * (vi[1:] + vi[:-1]) - cx * (fx_v[1:] - fx_v[:-1])

    # Half step on y-interfaces (interior rows only).
    hj, uj, vj = hg[1:-1, :], ug[1:-1, :], vg[1:-1, :]
    fy_h = vj
    fy_u = uj * vj / hj
    fy_v = vj**2 / hj + 0.5 * g * hj**2
    cy = dt / (2.0 * dy)
    hy = 0.5 * (hj[:, 1:] + hj[:, :-1]) - cy * (fy_h[:, 1:] - fy_h[:, :-1])
    uy = 0.5 * (uj[:, 1:] + uj[:, :-1]) - cy * (fy_u[:, 1:] - fy_u[:, :-1])
    vy = 0.5 * (vj[:, 1:] + vj[:, :-1]) - cy * (fy_v[:, 1:] - fy_v[:, :-1])

    # Full step from half-state fluxes.
    gx_h = ux
    gx_u = ux**2 / hx + 0.5 * g * hx**2
    gx_v = ux * vx / hx
    gy_h = vy
    gy_u = uy * vy / hy
    gy_v = vy**2 / hy + 0.5 * g * hy**2
    ax = dt / dx
    ay = dt / dy
    h_new = h - ax * (gx_h[1:] - gx_h[:-1]) - ay * (gy_h[:, 1:] - gy_h[:, :-1])
    u_new = u - ax * (gx_u[1:] - gx_u[:-1]) - ay * (gy_u[:, 1:] - gy_u[:, :-1])
    v_new = v - ax * (gx_v[1:] - gx_v[:-1]) - ay * (gy_v[:, 1:] - gy_v[:, :-1])
    return h_new, u_new, v_new


def solve_swe(cfg: SweConfig) -> SnapshotMatrix:
    """Integrate the shallow water equations; snapshots hold the height field.

    Conservative two-step Lax-Wendroff on cell centers with reflective walls;
    the time step is sub-divided to honor the CFL bound, recomputed each
    snapshot interval from the current wave speeds.
    """
    cfg.validate()
    dx = cfg.lx / cfg.nx
    dy = cfg.ly / cfg.ny
    xc = (np.arange(cfg.nx) + 0.5) * dx
    yc = (np.arange(cfg.ny) + 0.5) * dy
    cx_ctr, cy_ctr = cfg.drop_center if cfg.drop_center is not None else (cfg.lx / 2, cfg.ly / 2)
    xg, yg = np.meshgrid(xc, yc, indexing="ij")
    h = cfg.depth + cfg.drop_amplitude * np.exp(
        -((xg - cx_ctr) ** 2 + (yg - cy_ctr) ** 2) / (2.0 * cfg.drop_width**2)
    )
    u = np.zeros_like(h)
    v = np.zeros_like(h)
    dt = cfg.t_max / (cfg.n_t - 1)
    out = np.empty((cfg.nx * cfg.ny, cfg.n_t), dtype=float)
    out[:, 0] = h.flatten(order="F")
    _guard("swe", h, u, v)
    for j in range(1, cfg.n_t):
        if np.min(h) <= 0:
            raise BlowupError("swe: water depth became nonpositive")
        if cfg.substeps is not None:
            n_sub = cfg.substeps
        else:
            wave = np.sqrt(cfg.g * h)
            speed = max(
                float(np.max(np.abs(u / h) + wave)), float(np.max(np.abs(v / h) + wave))
            )
            stable = cfg.cfl * min(dx, dy) / max(speed, 1e-12)
            n_sub = max(1, math.ceil(dt / stable))
            if n_sub > MAX_SUBSTEPS:
                raise CflError(f"swe: {n_sub} sub-steps needed, limit is {MAX_SUBSTEPS}")
        tau = dt / n_sub
        for _ in range(n_sub):
            h, u, v = _swe_step(h, u, v, cfg.g, tau, dx, dy)
        _guard("swe", h, u, v)
        out[:, j] = h.flatten(order="F")
    grid = plane2d((0.0, cfg.lx), (0.0, cfg.ly), cfg.nx, cfg.ny)
    return SnapshotMatrix(out, dt, 0.0, grid)
