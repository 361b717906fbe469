"""Moving wave packets along rays, the packet pairing gamma(t, v), and the
approximate-solution residual diagnostics."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import DomainError, GridMismatchError, InvalidInputError
from .geometry import RayVelocity, phase_phi, phase_phi_grid
from .grids import ComplexField, Grid2D, RealField, sup_norm
from .bumps import bump_d1, bump_d2, bump_mass, bump_normalized
from .vfields import derivative, z_coordinate

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class PacketParams:
    """A packet instant: ray velocity, time, and the envelope descriptor.

    The envelope is a tensor product of normalized compactly supported
    bumps, so its integral is 1 by construction.
    """

    vel: RayVelocity
    t: float
    chi_profile: str = "tensor-bump"

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError("packet requires t > 0")
        if not self.vel.is_admissible:
            raise DomainError(f"ray parameter v={self.vel.v} not positive")
        if self.vel.v < self.t ** (-2.0 / 3.0):
            raise DomainError(
                f"v={self.vel.v} below validity threshold t^(-2/3)={self.t**(-2/3):.3g}")
        if self.chi_profile != "tensor-bump":
            raise InvalidInputError(f"unknown envelope profile {self.chi_profile!r}")

    @property
    def lambda1(self) -> float:
        return self.t**-0.5 * self.vel.v**-0.25

    @property
    def lambda2(self) -> float:
        return self.t**-0.5 * self.vel.v**0.25

    @property
    def chi_norm(self) -> float:
        """Normalization constant of the tensor envelope."""
        return bump_mass() ** -2


def _packet_coords(p: PacketParams, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Envelope coordinates (alpha, beta) on the centered grid."""
    t, v, v2 = p.t, p.vel.v, p.vel.v2
    z = z_coordinate(grid, t)
    alpha = p.lambda1 * (z - v * t)
    beta = p.lambda2 * (grid.YA - v2 * t)
    return alpha, beta


def _check_support(grid: Grid2D, chi: np.ndarray) -> None:
    outside = (np.abs(grid.XC) > grid.Lx / 4) | (np.abs(grid.YC) > grid.Ly / 4)
    if np.any(chi[outside] != 0):
        raise DomainError("packet support leaves the central half-box")


def packet_leading(p: PacketParams, grid: Grid2D) -> ComplexField:
    """The leading-order form chi * e^{i phi} of the packet."""
    alpha, beta = _packet_coords(p, grid)
    chi = bump_normalized(alpha) * bump_normalized(beta)
    _check_support(grid, chi)
    return ComplexField(grid, chi * np.exp(1j * phase_phi_grid(grid, p.t)), p.t)


def build_packet(p: PacketParams, grid: Grid2D) -> ComplexField:
    """Assemble the packet -i sqrt(3) v^{-1/2} dx(chi e^{i phi}); the x
    derivative acts spectrally on the assembled product."""
    lead = packet_leading(p, grid)
    dx = derivative(lead, dx_order=1)
    return ComplexField(grid, -1j * SQRT3 * p.vel.v**-0.5 * dx.samples, p.t)


def gamma(u: RealField, p: PacketParams, psi: ComplexField | None = None) -> complex:
    """The packet pairing integral of u_x against the conjugate packet."""
    if psi is None:
        psi = build_packet(p, u.grid)
    if psi.grid != u.grid:
        raise GridMismatchError("field and packet live on different grids")
    ux = derivative(u, dx_order=1)
    g = u.grid
    return complex(g.hx * g.hy * np.sum(ux.samples * np.conj(psi.samples)))


@dataclass(frozen=True)
class PacketResidual:
    """Result of applying the linear flow operator to a packet."""

    full: ComplexField      # (d_t + dx^3 - dx^{-1} dy^2) Psi
    leading: ComplexField   # explicit O(1/t) divergence + curvature bracket
    remainder: ComplexField
    remainder_sup: float
    leading_sup: float


def _leading_bracket(p: PacketParams, grid: Grid2D) -> ComplexField:
    """Closed-form leading terms of the flow operator applied to the packet.

    Conjugating the flow operator by e^{i phi} and using the exact eikonal
    cancellation, the O(1/t) part collapses in envelope coordinates to
    t^{-1} [chi + (alpha chi_a + beta chi_b)/2 + i sqrt(3)(chi_aa + chi_bb)].
    """
    alpha, beta = _packet_coords(p, grid)
    ba, bb = bump_normalized(alpha), bump_normalized(beta)
    chi = ba * bb
    chi_a = bump_d1(alpha) * bb
    chi_b = ba * bump_d1(beta)
    chi_aa = bump_d2(alpha) * bb
    chi_bb = ba * bump_d2(beta)
    bracket = (chi + 0.5 * (alpha * chi_a + beta * chi_b)
               + 1j * SQRT3 * (chi_aa + chi_bb))
    phase = np.exp(1j * phase_phi_grid(grid, p.t))
    return ComplexField(grid, bracket * phase / p.t, p.t)


def packet_residual(p: PacketParams, grid: Grid2D,
                    dt_step: float | None = None) -> PacketResidual:
    """Apply the linear flow operator to the packet and split off the
    explicit leading terms; the time derivative uses centered differences."""
    t = p.t
    if dt_step is None:
        dt_step = min(0.01, t / 100)
    if dt_step > t / 20:
        raise InvalidInputError(
            f"finite-difference step {dt_step} too large relative to t={t}")
    psi = build_packet(p, grid)
    psi_m = build_packet(PacketParams(p.vel, t - dt_step, p.chi_profile), grid)
    psi_p = build_packet(PacketParams(p.vel, t + dt_step, p.chi_profile), grid)
    dt_psi = (psi_p.samples - psi_m.samples) / (2 * dt_step)
    spatial = (derivative(psi, dx_order=3).samples
               - derivative(psi, dx_order=-1, dy_order=2).samples)
    full = ComplexField(grid, dt_psi + spatial, t)
    leading = _leading_bracket(p, grid)
    rem = ComplexField(grid, full.samples - leading.samples, t)
    return PacketResidual(
        full=full, leading=leading, remainder=rem,
        remainder_sup=sup_norm(rem), leading_sup=sup_norm(leading))


def reconstruction_error(u: RealField, p: PacketParams) -> float:
    """|u_x at the ray point - the packet reconstruction| at time t.

    The reconstruction is 2 t^{-1} Re(e^{i phi} gamma) at the ray point;
    u_x is evaluated there by bicubic interpolation.
    """
    g = u.grid
    t = p.t
    x_ray = p.vel.v1 * t
    y_ray = p.vel.v2 * t
    if abs(x_ray - g.x0) > g.Lx / 4 or abs(y_ray - g.y0) > g.Ly / 4:
        raise DomainError("ray point outside the trusted central half-box")
    ux = derivative(u, dx_order=1)
    spline = RectBivariateSpline(g.x, g.y, ux.samples, kx=3, ky=3)
    ux_ray = float(spline(x_ray, y_ray)[0, 0])
    gam = gamma(u, p)
    phi = phase_phi(t, x_ray, y_ray)
    recon = 2.0 / t * (cmath.exp(1j * phi) * gam).real
    return abs(ux_ray - recon)


@dataclass(frozen=True)
class GammaSeries:
    """gamma sampled along increasing times at a fixed ray velocity."""

    vel: RayVelocity
    samples: list  # of (t, complex)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        times = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidInputError("sample times must be strictly increasing")
        for t in times:
            if self.vel.v < t ** (-2.0 / 3.0):
                raise DomainError(f"sample at t={t} outside the validity domain")

    @property
    def times(self) -> list:
        return [t for t, _ in self.samples]

    @property
    def values(self) -> list:
        return [g for _, g in self.samples]


def gamma_dot_series(series: GammaSeries) -> list:
    """|d gamma / dt| at interior sample times via centered differences on
    a possibly nonuniform time grid."""
    ts = np.asarray(series.times, dtype=float)
    gs = np.asarray(series.values, dtype=complex)
    if len(ts) < 3:
        raise InvalidInputError("need at least 3 samples to differentiate")
    out = []
    for i in range(1, len(ts) - 1):
        h1 = ts[i] - ts[i - 1]
        h2 = ts[i + 1] - ts[i]
        # three-point derivative, exact on quadratics for nonuniform steps
        d = (-h2 / (h1 * (h1 + h2)) * gs[i - 1]
             + (h2 - h1) / (h1 * h2) * gs[i]
             + h1 / (h2 * (h1 + h2)) * gs[i + 1])
        out.append((float(ts[i]), abs(d)))
    return out
