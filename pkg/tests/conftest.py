"""Shared fixtures: small grids and random band-limited real fields."""

import numpy as np
import pytest

from kpwave.grids import (
    Grid2D,
    RealField,
    SpectralField,
    inverse_transform,
    project_field,
)


def random_spectral(grid: Grid2D, rng: np.random.Generator,
                    decay: float = 2.0) -> SpectralField:
    """Random Hermitian, dealias-band-limited, zero-x-mode coefficients."""
    shape = (grid.nx, grid.ny)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    kx = np.abs(grid.XI) / np.max(np.abs(grid.xi))
    ky = np.abs(grid.ETA) / np.max(np.abs(grid.eta))
    c *= np.exp(-decay * (kx + ky) * 8.0) * grid.dealias_mask
    c = 0.5 * (c + np.conj(np.roll(c[::-1, ::-1], (1, 1), axis=(0, 1))))
    c[0, :] = 0.0
    return SpectralField(grid, c, 0.0)


def random_field(grid: Grid2D, rng: np.random.Generator,
                 decay: float = 2.0) -> RealField:
    return inverse_transform(random_spectral(grid, rng, decay))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def grid():
    return Grid2D(64, 32, 20.0, 10.0, 0.0, 0.0)


@pytest.fixture
def ufield(grid, rng):
    return random_field(grid, rng)


def gaussian_field(grid: Grid2D, amp=1.0, sx=1.0, sy=1.0,
                   kx=0.0, ky=0.0, deriv=True) -> RealField:
    """ε∂x(exp(-x²/σx²-y²/σy²)·cos(kx·x+ky·y)) sampled on the grid, with
    the zero-x-mode projected; deriv=False drops the ∂x (then projection
    removes whatever x-mean remains)."""
    X, Y = grid.XA, grid.YA
    env = np.exp(-(X - grid.x0) ** 2 / sx**2 - (Y - grid.y0) ** 2 / sy**2)
    osc = np.cos(kx * (X - grid.x0) + ky * (Y - grid.y0))
    if deriv:
        samples = amp * ((-2 * (X - grid.x0) / sx**2) * env * osc
                         - env * np.sin(kx * (X - grid.x0) + ky * (Y - grid.y0)) * kx)
    else:
        samples = amp * env * osc
    return project_field(RealField(grid, samples, 0.0))
