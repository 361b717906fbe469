"""Time integration: exact linear propagator, IFRK4 nonlinear stepping,
the linearized flow on a stored background, and the equation's symmetries.

The linear phase is purely imaginary, so the integrating factor is unitary
and the linear part of every step is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from .errors import DomainError, InvalidInputError, StepFailureError
from .grids import (
    Grid2D,
    Multiplier,
    RealField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    load_snapshot,
    omega_values,
    project_field,
    project_zero_xmodes,
    save_snapshot,
)

BLOWUP_FACTOR = 1e6


@dataclass
class SolverConfig:
    """Stepping parameters for a single evolution run."""

    dt: float
    t0: float
    t_end: float
    dealias: bool = True
    snapshot_stride: int = 1
    linearized_background: "Trajectory | None" = None

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        if not self.t0 < self.t_end:
            raise InvalidInputError("need t0 < t_end")
        if self.dt > self.t_end - self.t0:
            raise InvalidInputError("dt exceeds the time interval")
        if self.snapshot_stride < 1:
            raise InvalidInputError("snapshot_stride must be >= 1")


@dataclass
class Trajectory:
    """Ordered snapshots of one evolution run."""

    snapshots: list[RealField]
    config: SolverConfig | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        times = self.times
        if np.any(np.diff(times) <= 0):
            raise InvalidInputError("snapshot times must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time_tag for s in self.snapshots])

    def field_at(self, t: float, tol: float = 1e-9) -> RealField:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.snapshots[i].time_tag - t) > tol:
            raise DomainError(f"no snapshot at t={t}")
        return self.snapshots[i]

    def nearest_time(self, t: float) -> float:
        return float(self.times[int(np.argmin(np.abs(self.times - t)))])

    def save(self, directory: Path | str) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for i, s in enumerate(self.snapshots):
            save_snapshot(s, directory / f"snap_{i:05d}")
        manifest = {
            "time_tags": [s.time_tag for s in self.snapshots],
            "provenance": self.provenance,
        }
        if self.config is not None:
            manifest["config"] = {
                "dt": self.config.dt, "t0": self.config.t0,
                "t_end": self.config.t_end, "dealias": self.config.dealias,
                "snapshot_stride": self.config.snapshot_stride,
            }
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=1))

    @classmethod
    def load(cls, directory: Path | str) -> "Trajectory":
        directory = Path(directory)
        manifest = json.loads((directory / "manifest.json").read_text())
        snaps = [load_snapshot(directory / f"snap_{i:05d}")
                 for i in range(len(manifest["time_tags"]))]
        return cls(snaps, provenance=manifest.get("provenance", {}))


# ---------------------------------------------------------------------------
# linear propagator

def linear_propagate(F: SpectralField, dt: float) -> SpectralField:
    """Exact linear flow: multiply by exp(i*omega*dt); unitary on L^2."""
    if not F.is_projected:
        raise InvalidInputError("field must be zero-x-mode projected")
    phase = np.exp(1j * omega_values(F.grid) * dt)
    return SpectralField(F.grid, F.coeffs * phase, F.time_tag + dt)


# ---------------------------------------------------------------------------
# nonlinear stepping

class _Workspace:
    """Precomputed lattice data for repeated stepping on one grid."""

    def __init__(self, grid: Grid2D, dealias: bool):
        self.grid = grid
        self.omega = omega_values(grid)
        ixi = 1j * grid.XI
        ixi[grid.nx // 2, :] = 0.0
        self.ixi = ixi
        self.mask = grid.dealias_mask if dealias else None
        self.phase = grid._phase

    def nonlinear(self, coeffs: np.ndarray) -> np.ndarray:
        """Spectral image of -d/dx (u^2/2), optionally dealiased."""
        g = self.grid
        u = sfft.ifft2(coeffs / self.phase).real * (g.nx * g.ny)
        sq = sfft.fft2(0.5 * u * u) / (g.nx * g.ny) * self.phase
        if self.mask is not None:
            sq = sq * self.mask
        out = -self.ixi * sq
        out[0, :] = 0.0
        return out


def _ifrk4_step(coeffs: np.ndarray, dt: float, ws: _Workspace,
                nl=None, e1: np.ndarray | None = None,
                e2: np.ndarray | None = None) -> np.ndarray:
    """One integrating-factor RK4 step of du/dt = i*omega*u + N(u)."""
    if nl is None:
        nl = lambda c, s: ws.nonlinear(c)  # noqa: E731 - autonomous case
    if e1 is None:
        e1 = np.exp(1j * ws.omega * (dt / 2))
    if e2 is None:
        e2 = e1 * e1
    n1 = nl(coeffs, 0.0)
    n2 = nl(e1 * (coeffs + (dt / 2) * n1), dt / 2)
    n3 = nl(e1 * coeffs + (dt / 2) * n2, dt / 2)
    n4 = nl(e2 * coeffs + dt * e1 * n3, dt)
    return e2 * coeffs + (dt / 6) * (e2 * n1 + 2 * e1 * (n2 + n3) + n4)


def nonlinear_term(u: RealField, dealias: bool = True) -> RealField:
    """-d/dx(u^2/2) with 2/3-rule dealiasing; exact zero x-mean output."""
    F = forward_transform(u)
    if not F.is_projected:
        raise InvalidInputError("field must be zero-x-mode projected")
    ws = _Workspace(u.grid, dealias)
    return inverse_transform(SpectralField(u.grid, ws.nonlinear(F.coeffs), u.time_tag))


def step_nonlinear(F: SpectralField, dt: float, dealias: bool = True) -> SpectralField:
    """One IFRK4 step of the full equation; formal order 4."""
    if not F.is_projected:
        raise InvalidInputError("field must be zero-x-mode projected")
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    ws = _Workspace(F.grid, dealias)
    out = _ifrk4_step(F.coeffs, dt, ws)
    before = np.sum(np.abs(F.coeffs) ** 2)
    after = np.sum(np.abs(out) ** 2)
    if before > 0 and after > BLOWUP_FACTOR**2 * before:
        raise StepFailureError(f"blow-up detected at t={F.time_tag}")
    return SpectralField(F.grid, out, F.time_tag + dt)


class BackgroundInterpolator:
    """Cubic-in-time interpolation of a stored trajectory's samples.

    Snapshot spacing must keep interpolation error below scheme error;
    guidance: stride*dt <= 0.1.
    """

    def __init__(self, traj: Trajectory):
        self.times = traj.times
        self.snaps = traj.snapshots
        if len(self.snaps) < 2:
            raise InvalidInputError("background needs at least 2 snapshots")

    def covers(self, t0: float, t1: float, tol: float = 1e-9) -> bool:
        return self.times[0] - tol <= t0 and t1 <= self.times[-1] + tol

    def samples_at(self, t: float) -> np.ndarray:
        ts = self.times
        if t < ts[0] - 1e-9 or t > ts[-1] + 1e-9:
            raise DomainError(f"background does not cover t={t}")
        i = int(np.searchsorted(ts, t))
        lo = max(0, min(i - 2, len(ts) - 4)) if len(ts) >= 4 else 0
        idx = range(lo, min(lo + 4, len(ts)))
        out = np.zeros(self.snaps[0].samples.shape)
        for j in idx:
            lj = 1.0
            for m in idx:
                if m != j:
                    lj *= (t - ts[m]) / (ts[j] - ts[m])
            out += lj * self.snaps[j].samples
        return out


def step_linearized(w: SpectralField, background: Trajectory | BackgroundInterpolator,
                    dt: float, dealias: bool = True) -> SpectralField:
    """One IFRK4 step of the flow linearized around a background solution."""
    if not w.is_projected:
        raise InvalidInputError("field must be zero-x-mode projected")
    bg = background if isinstance(background, BackgroundInterpolator) \
        else BackgroundInterpolator(background)
    t = w.time_tag
    if not bg.covers(min(t, t + dt), max(t, t + dt)):
        raise DomainError("background trajectory does not cover the step")
    ws = _Workspace(w.grid, dealias)
    g = w.grid

    def nl(coeffs, s):
        u = bg.samples_at(t + s)
        wp = sfft.ifft2(coeffs / ws.phase) * (g.nx * g.ny)
        prod = sfft.fft2(u * wp) / (g.nx * g.ny) * ws.phase
        if ws.mask is not None:
            prod = prod * ws.mask
        out = -ws.ixi * prod
        out[0, :] = 0.0
        return out

    out = _ifrk4_step(w.coeffs, dt, ws, nl=nl)
    return SpectralField(g, out, t + dt)


def evolve(u0: RealField, cfg: SolverConfig,
           snapshot_times: list[float] | None = None,
           linear: bool = False) -> Trajectory:
    """Integrate from t0 to t_end, storing snapshots.

    Snapshots are stored every `snapshot_stride` steps by default, or at the
    steps nearest each requested time when `snapshot_times` is given.  With
    `linear=True` the exact propagator jumps between snapshot times.
    """
    u0 = project_field(u0)
    F = SpectralField(u0.grid, forward_transform(u0).coeffs, cfg.t0)

    if linear:
        times = sorted(set([cfg.t0] + list(snapshot_times or []) + [cfg.t_end]))
        snaps = []
        for t in times:
            if t < cfg.t0 - 1e-12 or t > cfg.t_end + 1e-12:
                continue
            snaps.append(inverse_transform(linear_propagate(F, t - cfg.t0)))
        return Trajectory(snaps, cfg, {"mode": "linear"})

    nsteps = int(round((cfg.t_end - cfg.t0) / cfg.dt))
    if snapshot_times is not None:
        snap_steps = sorted(set(
            int(round((t - cfg.t0) / cfg.dt)) for t in snapshot_times
            if cfg.t0 - 1e-9 <= t <= cfg.t_end + 1e-9))
    else:
        snap_steps = list(range(0, nsteps + 1, cfg.snapshot_stride))
        if snap_steps[-1] != nsteps:
            snap_steps.append(nsteps)
    snap_set = set(snap_steps)

    ws = _Workspace(u0.grid, cfg.dealias)
    e1 = np.exp(1j * ws.omega * (cfg.dt / 2))
    e2 = e1 * e1
    coeffs = F.coeffs
    snaps = []
    for i in range(nsteps + 1):
        t = cfg.t0 + i * cfg.dt
        if i in snap_set:
            snaps.append(inverse_transform(SpectralField(u0.grid, coeffs, t)))
        if i < nsteps:
            new = _ifrk4_step(coeffs, cfg.dt, ws, e1=e1, e2=e2)
            if np.sum(np.abs(new) ** 2) > BLOWUP_FACTOR**2 * max(np.sum(np.abs(coeffs) ** 2), 1e-300):
                raise StepFailureError(f"blow-up detected at t={t}")
            coeffs = new
    return Trajectory(snaps, cfg, {"mode": "nonlinear"})


def evolve_linearized(w0: RealField, background: Trajectory, cfg: SolverConfig,
                      snapshot_times: list[float] | None = None) -> Trajectory:
    """Integrate the linearized equation along a stored background."""
    w0 = project_field(w0)
    bg = BackgroundInterpolator(background)
    nsteps = int(round((cfg.t_end - cfg.t0) / cfg.dt))
    if snapshot_times is not None:
        snap_set = set(int(round((t - cfg.t0) / cfg.dt)) for t in snapshot_times)
    else:
        snap_set = set(range(0, nsteps + 1, cfg.snapshot_stride)) | {nsteps}
    W = SpectralField(w0.grid, forward_transform(w0).coeffs, cfg.t0)
    snaps = []
    for i in range(nsteps + 1):
        if i in snap_set:
            snaps.append(inverse_transform(W))
        if i < nsteps:
            W = step_linearized(W, bg, cfg.dt, cfg.dealias)
    return Trajectory(snaps, cfg, {"mode": "linearized"})


# ---------------------------------------------------------------------------
# symmetries

def apply_symmetry(u: RealField, kind: str, param: float = 0.0) -> RealField:
    """Apply a symmetry of the equation to a snapshot.

    kind = "scaling":  lambda^2 u(lambda^3 t, lambda x, lambda^2 y); the box
      metadata is rescaled rather than resampling.
    kind = "galilean": u(t, x - c y + c^2 t, y - 2 c t) via the exact Fourier
      shear; requires c*Ly to be an integer multiple of Lx.
    kind = "reversal": reflection of x about the box center.
    """
    g = u.grid
    if kind == "scaling":
        lam = param
        if not lam > 0:
            raise DomainError("scaling parameter must be positive")
        grid2 = Grid2D(g.nx, g.ny, g.Lx / lam, g.Ly / lam**2, g.x0 / lam, g.y0 / lam**2)
        return RealField(grid2, lam**2 * u.samples, u.time_tag / lam**3)
    if kind == "reversal":
        idx = (-np.arange(g.nx)) % g.nx
        return RealField(g, u.samples[idx, :], u.time_tag)
    if kind == "galilean":
        c = param
        ratio = c * g.Ly / g.Lx
        if abs(ratio - round(ratio)) > 1e-9:
            raise DomainError(
                "inadmissible Galilean parameter: c*Ly must be an integer "
                f"multiple of Lx (got c*Ly/Lx = {ratio})")
        return inverse_transform(galilean_fourier_map(forward_transform(u), c))
    raise DomainError(f"unknown symmetry kind {kind!r}")


def galilean_fourier_map(F: SpectralField, c: float) -> SpectralField:
    """Fourier-side Galilean map u_c(t,xi,eta) = u(t,xi,eta+c*xi) * phases."""
    g = F.grid
    ratio = c * g.Ly / g.Lx
    if abs(ratio - round(ratio)) > 1e-9:
        raise DomainError("inadmissible Galilean parameter")
    m = int(round(ratio))
    jj = np.rint(sfft.fftfreq(g.nx) * g.nx).astype(int)
    cols = (np.arange(g.ny)[None, :] + (m * jj)[:, None]) % g.ny
    sheared = F.coeffs[np.arange(g.nx)[:, None], cols]
    t = F.time_tag
    phase = np.exp(-1j * c * c * t * g.XI) * np.exp(-2j * c * t * g.ETA)
    out = sheared * phase
    # the boost phase and the shear are sign-ambiguous at the Nyquist
    # frequencies; zero them (same convention as the odd-symbol multipliers)
    out[g.nx // 2, :] = 0.0
    out[:, g.ny // 2] = 0.0
    return SpectralField(g, out, t)
