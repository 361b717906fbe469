"""Moving-band projection, the quadratic long-time correction, its flow
residuals, and extraction of the asymptotic linear profile."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .evolution import Trajectory, linear_propagate
from .grids import (
    ComplexField,
    RealField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    inverse_transform_complex,
    l2_norm,
    multiplier_dx,
    spectral_l2_norm,
)
from .vfields import derivative

DEFAULT_ALPHA = 1.0 / 6.0
_CONTENT_TOL = 1e-12


@dataclass(frozen=True)
class BandProjection:
    """Sharp x-frequency band [t^{-alpha/2}, t^{alpha/2}] at time t."""

    t: float
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.t < 1:
            raise DomainError("band projection defined for t >= 1")
        if not self.alpha > 0:
            raise InvalidInputError("alpha must be positive")

    @property
    def lower(self) -> float:
        return self.t ** (-self.alpha / 2)

    @property
    def upper(self) -> float:
        return self.t ** (self.alpha / 2)


@dataclass(frozen=True)
class ScatterReport:
    """Sizes of the correction and the two flow residuals at one time."""

    t: float
    umod_l2: float
    scat_helper_residual: float
    modscat_residual: float
    back_propagated_data_drift: float

    def __post_init__(self):
        vals = (self.umod_l2, self.scat_helper_residual,
                self.modscat_residual, self.back_propagated_data_drift)
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise InvalidInputError("report entries must be finite and nonnegative")


def band_project(u: RealField, bp: BandProjection) -> tuple[RealField, ComplexField]:
    """Sharp band-pass of x-frequencies |xi| in [lower, upper]; returns the
    real band field and its positive-frequency half."""
    F = forward_transform(u)
    if not F.is_projected:
        raise InvalidInputError("field must be zero-x-mode projected")
    g = u.grid
    abs_xi = np.abs(g.xi)
    in_band = (abs_xi >= bp.lower) & (abs_xi <= bp.upper)
    in_band[0] = False
    if not np.any(in_band):
        raise DomainError(
            f"band [{bp.lower:.3g}, {bp.upper:.3g}] contains no grid x-frequencies")
    cw = np.where(in_band[:, None], F.coeffs, 0.0)
    w = inverse_transform(SpectralField(g, cw, u.time_tag))
    cp = np.where((g.xi > 0)[:, None], cw, 0.0)
    cp[g.nx // 2, :] = cw[g.nx // 2, :] / 2
    w_plus = inverse_transform_complex(SpectralField(g, cp, u.time_tag))
    return w, w_plus


def _min_positive_content(F: SpectralField) -> float:
    """Smallest |xi| carrying non-negligible coefficient mass."""
    g = F.grid
    amp = np.abs(F.coeffs).max(axis=1)
    scale = amp.max()
    if scale == 0:
        return np.inf
    live = amp > _CONTENT_TOL * scale
    live[0] = False
    if not np.any(live):
        return np.inf
    return float(np.abs(g.xi[live]).min())


def compute_umod(w_plus: ComplexField, lower: float | None = None) -> RealField:
    """The quadratic correction (8/3) dx^{-3} Re(w+ w+_x).

    The triple inverse derivative is well defined because the quadratic
    product lives at x-frequencies >= 2 * lower; input whose product has
    content below that is rejected.
    """
    g = w_plus.grid
    if lower is None:
        Fw = forward_transform(
            RealField(g, 2 * w_plus.samples.real, w_plus.time_tag))
        lower = _min_positive_content(Fw)
    wx = derivative(w_plus, dx_order=1)
    q = RealField(g, (w_plus.samples * wx.samples).real, w_plus.time_tag)
    Fq = forward_transform(q)
    if np.abs(Fq.coeffs).max() > 0:
        low_content = _min_positive_content(Fq)
        if low_content < 2 * lower * (1 - 1e-9):
            raise InvalidInputError(
                f"quadratic product has content at |xi|={low_content:.3g} "
                f"below 2*lower={2*lower:.3g}")
    out = apply_multiplier(Fq, multiplier_dx(g, -3))
    return inverse_transform(SpectralField(g, (8.0 / 3.0) * out.coeffs, q.time_tag))


def _quadratic_product(u: RealField, bp: BandProjection) -> tuple[RealField, ComplexField]:
    _, w_plus = band_project(u, bp)
    wx = derivative(w_plus, dx_order=1)
    q = RealField(u.grid, 2 * (w_plus.samples * wx.samples).real, u.time_tag)
    return q, w_plus


def _back_propagated(u: RealField) -> SpectralField:
    return linear_propagate(forward_transform(u), -u.time_tag)


def scattering_residuals(traj: Trajectory, t: float,
                         alpha: float = DEFAULT_ALPHA) -> ScatterReport:
    """Measure how well the band-quadratic term shadows the full nonlinearity
    and how well the correction absorbs it under the flow at time t.

    The time derivative of the correction is taken by centered differences
    of the fully composed quantity at the bracketing snapshots, so the
    moving band edges are accounted for automatically.
    """
    times = traj.times
    idx = int(np.argmin(np.abs(times - t)))
    if abs(times[idx] - t) > 1e-9:
        raise DomainError(f"no snapshot at t={t}")
    if idx == 0 or idx == len(times) - 1:
        raise InvalidInputError("need snapshots bracketing t on both sides")
    u = traj.snapshots[idx]
    g = u.grid

    bp = BandProjection(t, alpha)
    q, w_plus = _quadratic_product(u, bp)
    umod = compute_umod(w_plus, bp.lower)

    ux = derivative(u, dx_order=1)
    full_nl = RealField(g, u.samples * ux.samples, t)
    helper = l2_norm(RealField(g, full_nl.samples - q.samples, t))

    def umod_at(j: int) -> RealField:
        uj = traj.snapshots[j]
        bpj = BandProjection(uj.time_tag, alpha)
        _, wp = band_project(uj, bpj)
        return compute_umod(wp, bpj.lower)

    um_prev, um_next = umod_at(idx - 1), umod_at(idx + 1)
    h = times[idx + 1] - times[idx - 1]
    dt_umod = (um_next.samples - um_prev.samples) / h
    flow = (dt_umod
            + derivative(umod, dx_order=3).samples
            - derivative(umod, dx_order=-1, dy_order=2).samples)
    modscat = l2_norm(RealField(g, q.samples - flow, t))

    b_prev = _back_propagated(traj.snapshots[idx - 1])
    b_here = _back_propagated(u)
    drift = spectral_l2_norm(
        SpectralField(g, b_here.coeffs - b_prev.coeffs, 0.0))

    return ScatterReport(
        t=t, umod_l2=l2_norm(umod), scat_helper_residual=helper,
        modscat_residual=modscat, back_propagated_data_drift=drift)


def extract_scatter_data(traj: Trajectory, min_fraction: float = 0.25
                         ) -> tuple[RealField, list]:
    """Pull each late snapshot back to time zero through the exact linear
    flow; successive L^2 distances form a Cauchy-sequence diagnostic and the
    last pullback is the asymptotic data surrogate."""
    times = traj.times
    late = [s for s in traj.snapshots if s.time_tag >= times[-1] * min_fraction]
    if len(late) < 2:
        raise InvalidInputError("too few late snapshots for a drift series")
    backs = [_back_propagated(s) for s in late]
    drift_series = []
    for i in range(1, len(backs)):
        a, b = backs[i - 1], backs[i]
        d = spectral_l2_norm(SpectralField(a.grid, b.coeffs - a.coeffs, 0.0))
        drift_series.append((float(late[i].time_tag), d))
    u0 = inverse_transform(backs[-1])
    return u0, drift_series
