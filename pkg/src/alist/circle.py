"""Function spaces on the unit circle.

Uniform grids theta_j = -pi + 2*pi*j/N, Fourier analysis/synthesis with the
coefficient convention

    fhat(l) = (1/2pi) * integral f(theta) exp(-i*l*theta) dtheta,

mode truncation to the alias-free band l in [-N/2, N/2), Cauchy projectors,
contour integrals and weighted Sobolev norms.

Orientation convention: every contour integral in this package runs CLOCKWISE
around the unit circle.  The boundary values of the Cauchy transform from the
exterior (|z| > 1) and interior (|z| < 1) are then the mode projections

    cauchy_plus  = keep strictly negative modes,
    cauchy_minus = minus the nonnegative-mode part,

which satisfy cauchy_plus - cauchy_minus = identity exactly on the truncated
band.  All operators in this module act mode-exactly on that band.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CircleGrid",
    "CircleFunction",
    "FourierSeries",
    "make_grid",
    "analyze",
    "synthesize",
    "cauchy_plus",
    "cauchy_minus",
    "contour_integral",
    "hk_norm",
    "l2_norm",
]


@dataclass(frozen=True, eq=False)
class CircleGrid:
    """Uniform sampling of the unit circle.

    Nodes are z_j = exp(i*theta_j) with theta_j = -pi + 2*pi*j/N, so the
    angle set is symmetric under conjugation and theta is strictly
    increasing.
    """

    n: int
    theta: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        self.theta.setflags(write=False)
        self.z.setflags(write=False)


def make_grid(n: int) -> CircleGrid:
    """Build an N-point uniform circle grid.

    N must be even and at least 4 (powers of two recommended for FFT
    efficiency).
    """
    if n < 4 or n % 2 != 0:
        raise ValueError(f"grid size must be an even integer >= 4, got {n}")
    theta = -np.pi + 2.0 * np.pi * np.arange(n) / n
    return CircleGrid(n=n, theta=theta, z=np.exp(1j * theta))


@dataclass(eq=False)
class CircleFunction:
    """Samples of a function on a :class:`CircleGrid`.

    ``samples`` has shape (N,) for scalar functions, or (N, 2), (N, 2, 2)
    for vector/matrix valued functions; all operations act along axis 0.
    Samples are frozen at construction so cached Fourier coefficients stay
    consistent.
    """

    grid: CircleGrid
    samples: np.ndarray
    _series: "FourierSeries | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape[0] != self.grid.n:
            raise ValueError(
                f"sample count {self.samples.shape[0]} does not match grid size {self.grid.n}"
            )
        self.samples.setflags(write=False)


@dataclass(eq=False)
class FourierSeries:
    """Truncated Fourier coefficients on the mode band [-N/2, N/2)."""

    modes: np.ndarray
    coef: np.ndarray

    def coefficient(self, l: int) -> complex:
        """Coefficient at mode ``l``; zero outside the truncated band."""
        n = self.modes.size
        idx = l + n // 2
        if idx < 0 or idx >= n:
            return 0.0 + 0.0j
        return self.coef[idx]


def _modes(n: int) -> np.ndarray:
    return np.arange(-(n // 2), n // 2)


def _alternating_phase(n: int, ndim: int) -> np.ndarray:
    # exp(i*l*pi) factor translating numpy's 0-based FFT to the theta_0 = -pi grid
    phase = (-1.0) ** _modes(n)
    return phase.reshape((n,) + (1,) * (ndim - 1))


def _coef_from_samples(samples: np.ndarray) -> np.ndarray:
    n = samples.shape[0]
    c = np.fft.fftshift(np.fft.fft(samples, axis=0), axes=0) / n
    return c * _alternating_phase(n, samples.ndim)


def _samples_from_coef(coef: np.ndarray) -> np.ndarray:
    n = coef.shape[0]
    c = coef * _alternating_phase(n, coef.ndim)
    return np.fft.ifft(np.fft.ifftshift(c, axes=0), axis=0) * n


def analyze(f: CircleFunction) -> FourierSeries:
    """Fourier coefficients of ``f`` on the truncated band.

    The forward convention is the 1/N-normalized sum matching
    fhat(l) = (1/2pi) * int f(theta) exp(-i*l*theta) dtheta on bandlimited
    data.  The result is cached on ``f``.
    """
    if f._series is None:
        f._series = FourierSeries(modes=_modes(f.grid.n), coef=_coef_from_samples(f.samples))
    return f._series


def synthesize(series: FourierSeries, grid: CircleGrid) -> CircleFunction:
    """Evaluate a truncated Fourier series on the grid nodes."""
    if series.modes.size != grid.n:
        raise ValueError("series band does not match grid size")
    return CircleFunction(grid, _samples_from_coef(series.coef))


def _project(samples: np.ndarray, keep_negative: bool) -> np.ndarray:
    coef = _coef_from_samples(samples)
    n = samples.shape[0]
    mask = _modes(n) < 0 if keep_negative else _modes(n) >= 0
    coef = coef * mask.reshape((n,) + (1,) * (samples.ndim - 1))
    return _samples_from_coef(coef)


def cauchy_plus(f: CircleFunction) -> CircleFunction:
    """Boundary value from |z| > 1 of the clockwise Cauchy transform.

    Keeps the strictly negative Fourier modes of ``f``.
    """
    return CircleFunction(f.grid, _project(f.samples, keep_negative=True))


def cauchy_minus(f: CircleFunction) -> CircleFunction:
    """Boundary value from |z| < 1 of the clockwise Cauchy transform.

    Returns minus the nonnegative-mode part of ``f``, so that
    ``cauchy_plus(f) - cauchy_minus(f)`` reproduces ``f``.
    """
    return CircleFunction(f.grid, -_project(f.samples, keep_negative=False))


def contour_integral(f: CircleFunction):
    """(1/2pi*i) times the clockwise contour integral of f(z) dz.

    By the exact mode rule the clockwise integral of z**l is -delta(l, -1),
    so the result is minus the mode -1 coefficient of ``f``.  Scalar samples
    give a complex scalar; vector/matrix samples integrate entrywise.
    """
    coef = analyze(f).coef
    value = -coef[f.grid.n // 2 - 1]
    if np.ndim(value) == 0:
        return complex(value)
    return value


def hk_norm(f: CircleFunction, k: int) -> float:
    """Sobolev norm ( sum_l (1+l^2)^k |fhat(l)|^2 )^(1/2) on the band.

    For vector/matrix samples the entrywise squares are summed (Frobenius
    convention).
    """
    if k < 0:
        raise ValueError("order k must be nonnegative")
    series = analyze(f)
    weights = (1.0 + series.modes.astype(float) ** 2) ** k
    sq = np.abs(series.coef) ** 2
    sq = sq.reshape(sq.shape[0], -1).sum(axis=1)
    return float(np.sqrt(np.sum(weights * sq)))


def l2_norm(f: CircleFunction) -> float:
    """L2 norm with the normalized measure dtheta/2pi.

    Matches the coefficient l2 norm through Parseval; entrywise (Frobenius)
    for matrix samples.
    """
    sq = np.abs(f.samples) ** 2
    return float(np.sqrt(sq.reshape(sq.shape[0], -1).sum(axis=1).mean()))
