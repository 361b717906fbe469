"""The first-order operators commuting with the linear flow (Lx, Ly, Lz,
Lz+-, S0), the time-dependent solution norm built from them, and the
inequality checkers used as numerical diagnostics.

Coordinate factors use absolute coordinates, which jump at the box seam;
this is only meaningful for fields localized away from it.  Every
coordinate multiplication checks the support-leakage fraction and flags
the result untrusted when mass outside the central half-box exceeds
LEAKAGE_TOL.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .grids import (
    ComplexField,
    RealField,
    apply_multiplier,
    forward_transform,
    forward_transform_complex,
    inverse_transform,
    inverse_transform_complex,
    l2_norm,
    multiplier_dx,
    multiplier_dy,
    sup_norm,
)

LEAKAGE_TOL = 1e-6
NEGATIVE_Z_MASS_TOL = 1e-6

VECTOR_FIELD_TAGS = ("Lx", "Ly", "Lz", "LzPlus", "LzMinus", "S0", "LyDx")


class UntrustedFieldWarning(UserWarning):
    """Coordinate weight applied to a field with too much mass near the
    box edge; the result cannot be trusted."""


@dataclass(frozen=True)
class VectorFieldId:
    """Which operator, instantiated at which time."""

    tag: str
    time: float = 0.0

    def __post_init__(self):
        if self.tag not in VECTOR_FIELD_TAGS:
            raise DomainError(f"unknown vector field tag {self.tag!r}")
        if self.tag in ("Lz", "LzPlus", "LzMinus") and not self.time > 0:
            raise DomainError(f"{self.tag} requires time > 0")


@dataclass(frozen=True)
class XNormReport:
    """The four component norms of the solution space, unsquared."""

    l2: float
    uxxx: float
    ly2dxu: float
    s0u: float

    @property
    def total(self) -> float:
        return math.sqrt(self.l2**2 + self.uxxx**2 + self.ly2dxu**2 + self.s0u**2)


def _is_complex(field) -> bool:
    return isinstance(field, ComplexField)


def _fft(field):
    return forward_transform_complex(field) if _is_complex(field) else forward_transform(field)


def _make(field, samples):
    cls = ComplexField if (_is_complex(field) or np.iscomplexobj(samples)) else RealField
    if cls is RealField:
        samples = samples.real
    return cls(field.grid, samples, field.time_tag)


def derivative(field, dx_order: int = 0, dy_order: int = 0):
    """Spectral derivative (negative dx_order = inverse x-derivative)."""
    F = _fft(field)
    if dx_order:
        F = apply_multiplier(F, multiplier_dx(field.grid, dx_order))
    if dy_order:
        F = apply_multiplier(F, multiplier_dy(field.grid, dy_order))
    if _is_complex(field):
        return inverse_transform_complex(F)
    return inverse_transform(F)


def leakage_fraction(field) -> float:
    """Fraction of L^2 mass outside the central half-box."""
    g = field.grid
    inside = (np.abs(g.XC) <= g.Lx / 4) & (np.abs(g.YC) <= g.Ly / 4)
    total = np.sum(np.abs(field.samples) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(field.samples[~inside]) ** 2) / total)


def _coord_multiply(field, weight: np.ndarray):
    leak = leakage_fraction(field)
    if leak >= LEAKAGE_TOL:
        warnings.warn(
            f"support leakage {leak:.3e} >= {LEAKAGE_TOL}: coordinate weight untrusted",
            UntrustedFieldWarning, stacklevel=3)
    return _make(field, weight * field.samples)


def z_coordinate(grid, t: float) -> np.ndarray:
    """z = -x + y^2/(4t) in absolute coordinates."""
    if not t > 0:
        raise DomainError("z coordinate requires t > 0")
    return -grid.XA + grid.YA**2 / (4 * t)


def apply_vector_field(vfid: VectorFieldId, u):
    """Apply one of the operators to a Real/ComplexField snapshot.

    Derivative factors act spectrally, coordinate factors in physical space.
    LzPlus/LzMinus return a ComplexField and require the field's mass on
    {z < 0} to be negligible (the factorization only exists for z >= 0).
    """
    t = vfid.time
    g = u.grid
    tag = vfid.tag
    if tag == "Lx":
        out = _coord_multiply(u, g.XA).samples
        out = out - 3 * t * derivative(u, dx_order=2).samples
        out = out - t * derivative(u, dx_order=-2, dy_order=2).samples
        return _make(u, out)
    if tag == "Ly":
        out = _coord_multiply(u, g.YA).samples
        out = out + 2 * t * derivative(u, dx_order=-1, dy_order=1).samples
        return _make(u, out)
    if tag == "LyDx":
        return apply_vector_field(VectorFieldId("Ly", t), derivative(u, dx_order=1))
    if tag == "S0":
        lx = apply_vector_field(VectorFieldId("Lx", t), derivative(u, dx_order=1))
        ly = apply_vector_field(VectorFieldId("Ly", t), derivative(u, dy_order=1))
        return _make(u, lx.samples + ly.samples)
    if tag == "Lz":
        z = z_coordinate(g, t)
        out = _coord_multiply(u, z).samples + 3 * t * derivative(u, dx_order=2).samples
        return _make(u, out)
    if tag in ("LzPlus", "LzMinus"):
        z = z_coordinate(g, t)
        total = np.sum(np.abs(u.samples) ** 2)
        neg = np.sum(np.abs(u.samples[z < 0]) ** 2)
        if total > 0 and neg / total > NEGATIVE_Z_MASS_TOL:
            raise InvalidInputError(
                f"mass fraction {neg/total:.3e} on {{z<0}}: {tag} undefined there")
        sqz = np.sqrt(np.maximum(z, 0.0))
        sign = 1.0 if tag == "LzPlus" else -1.0
        out = (_coord_multiply(u, sqz).samples
               + sign * 1j * math.sqrt(3 * t) * derivative(u, dx_order=1).samples)
        return ComplexField(g, out, u.time_tag)
    raise DomainError(f"unknown tag {tag!r}")


def x_norm(u, t: float) -> XNormReport:
    """Component norms ||u||, ||u_xxx||, ||Ly^2 dx u||, ||S0 u|| at time t."""
    dxu = derivative(u, dx_order=1)
    ly = VectorFieldId("Ly", t)
    ly2dxu = apply_vector_field(ly, apply_vector_field(ly, dxu))
    s0u = apply_vector_field(VectorFieldId("S0", t), u)
    return XNormReport(
        l2=l2_norm(u),
        uxxx=l2_norm(derivative(u, dx_order=3)),
        ly2dxu=l2_norm(ly2dxu),
        s0u=l2_norm(s0u),
    )


def _l4_norm(field) -> float:
    g = field.grid
    return float((g.hx * g.hy * np.sum(np.abs(field.samples) ** 4)) ** 0.25)


def check_anisotropic_sobolev(f) -> float:
    """sup|f| / (||f||^{1/4} ||f_x||^{1/2} ||f_yy||^{1/4}); scale invariant."""
    denom = (l2_norm(f) ** 0.25
             * l2_norm(derivative(f, dx_order=1)) ** 0.5
             * l2_norm(derivative(f, dy_order=2)) ** 0.25)
    if denom == 0:
        raise InvalidInputError("ratio undefined for the zero field")
    return sup_norm(f) / denom


def check_interpolation_LySobolev(u, t: float) -> float:
    """||dx Ly u||_{L^4}^2 / (||u_x||_inf ||dx Ly^2 u||_{L^2})."""
    if t == 0:
        raise DomainError("interpolation check requires t != 0")
    ly = VectorFieldId("Ly", t)
    dxu = derivative(u, dx_order=1)
    lhs = _l4_norm(apply_vector_field(ly, dxu)) ** 2
    rhs = sup_norm(dxu) * l2_norm(apply_vector_field(ly, apply_vector_field(ly, dxu)))
    if rhs == 0:
        raise InvalidInputError("ratio undefined: vanishing right-hand side")
    return lhs / rhs
