"""Direct scattering on the unit circle for the lattice spectral problem.

The one-step transfer matrix at spectral parameter z and site value q is

    T(z, q) = [[z, q], [conj(q), 1/z]],       det T = 1 - |q|^2.

For a window-supported potential the scattering matrix is read off from one
exact matrix product across the window,

    S(z) = z^{-(R+1) s3} * T_R ... T_L * z^{L s3},     s3 = diag(1, -1),

because the two normalized eigenfunctions coincide with z^{n s3} outside the
support.  Entries: a = S11, b = S21, reflection coefficient r = b / a, and
|a|^2 - |b|^2 equals the conserved product at every node of the circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import CircleFunction, CircleGrid, analyze
from .lattice import Potential, c_total

__all__ = [
    "TransferMatrix",
    "ScatteringData",
    "JostSolution",
    "transfer_matrix",
    "scattering_matrix_at",
    "compute_scattering",
    "jost_modified",
    "winding_number",
    "unwrapped_log",
    "validate_scattering",
]

_Z_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """One-step transfer matrix; ``entries`` is the 2x2 complex array."""

    entries: np.ndarray

    @property
    def det(self) -> complex:
        e = self.entries
        return complex(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])


@dataclass(eq=False)
class ScatteringData:
    """Samples of a, b, r on a circle grid plus the conserved product."""

    grid: CircleGrid
    a: CircleFunction
    b: CircleFunction
    r: CircleFunction
    c_inf: float


def _check_unit_modulus(z: complex) -> None:
    if abs(abs(z) - 1.0) > _Z_TOL:
        raise ValueError(f"spectral parameter must lie on the unit circle, got |z|={abs(z)}")


def transfer_matrix(z: complex, q_n: complex) -> TransferMatrix:
    """Transfer matrix [[z, q], [conj(q), 1/z]] at one site."""
    _check_unit_modulus(z)
    if abs(q_n) >= 1.0:
        raise ValueError(f"site value |q|={abs(q_n)} is not < 1")
    entries = np.array([[z, q_n], [np.conj(q_n), 1.0 / z]], dtype=complex)
    return TransferMatrix(entries)


def _product_over_support(z: np.ndarray, q: Potential) -> np.ndarray:
    """T_R ... T_L evaluated at each node; z has shape (N,)."""
    n = z.shape[0]
    prod = np.zeros((n, 2, 2), dtype=complex)
    prod[:, 0, 0] = 1.0
    prod[:, 1, 1] = 1.0
    step = np.empty((n, 2, 2), dtype=complex)
    for value in q.values:
        step[:, 0, 0] = z
        step[:, 0, 1] = value
        step[:, 1, 0] = np.conj(value)
        step[:, 1, 1] = 1.0 / z
        prod = np.einsum("nij,njk->nik", step, prod)
    return prod


def _scattering_at_nodes(q: Potential, z: np.ndarray) -> np.ndarray:
    prod = _product_over_support(z, q)
    if len(q.values) == 0:
        return prod
    zl = z ** q.n_min
    zr = z ** (q.n_max + 1)
    s = np.empty_like(prod)
    s[:, 0, 0] = prod[:, 0, 0] * zl / zr
    s[:, 0, 1] = prod[:, 0, 1] / (zl * zr)
    s[:, 1, 0] = prod[:, 1, 0] * zl * zr
    s[:, 1, 1] = prod[:, 1, 1] * zr / zl
    return s


def scattering_matrix_at(q: Potential, z: complex) -> np.ndarray:
    """S(z) as a 2x2 array at a single unit-modulus point."""
    _check_unit_modulus(z)
    return _scattering_at_nodes(q, np.array([z], dtype=complex))[0]


def compute_scattering(q: Potential, grid: CircleGrid) -> ScatteringData:
    """Evaluate a = S11, b = S21 and r = b/a at every grid node.

    Fails if |a| underflows 1e-14 at any node, which cannot happen for an
    admissible potential and signals corrupted input.
    """
    s = _scattering_at_nodes(q, grid.z)
    a = s[:, 0, 0]
    b = s[:, 1, 0]
    if np.min(np.abs(a)) < 1e-14:
        raise ValueError("|a| vanished on the circle; input potential is inadmissible")
    return ScatteringData(
        grid=grid,
        a=CircleFunction(grid, a),
        b=CircleFunction(grid, b),
        r=CircleFunction(grid, b / a),
        c_inf=c_total(q),
    )


@dataclass(frozen=True, eq=False)
class JostSolution:
    """Modified eigenfunction values Y(z, n) for n = n_first .. n_first+m-1.

    ``values[i]`` is the 2x2 matrix at lattice site ``n_first + i``.  The
    ``minus`` solution is normalized to the identity far to the left, the
    ``plus`` solution far to the right.
    """

    side: str
    n_first: int
    values: np.ndarray

    def at(self, n: int) -> np.ndarray:
        return self.values[n - self.n_first]


def jost_modified(q: Potential, z: complex, side: str) -> JostSolution:
    """Modified eigenfunction over the support window (padded by one site).

    Computed by exact forward recursion from the left normalization point
    (``side='minus'``) or backward recursion from the right one
    (``side='plus'``), then stripped of the free evolution z^{n s3}.
    """
    _check_unit_modulus(z)
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    n_lo = q.n_min
    n_hi = q.n_max + 1  # one past the support: both normalizations visible
    count = n_hi - n_lo + 1
    xs = np.empty((count, 2, 2), dtype=complex)
    if side == "minus":
        xs[0] = np.diag([z**n_lo, z**-n_lo])
        for i, value in enumerate(q.values):
            xs[i + 1] = transfer_matrix(z, value).entries @ xs[i]
    else:
        xs[-1] = np.diag([z**n_hi, z**-n_hi])
        for i in range(count - 2, -1, -1):
            value = q.values[i]
            det = 1.0 - abs(value) ** 2
            inv = np.array(
                [[1.0 / z, -value], [-np.conj(value), z]], dtype=complex
            ) / det
            xs[i] = inv @ xs[i + 1]
    ys = np.empty_like(xs)
    for i in range(count):
        n = n_lo + i
        ys[i] = np.diag([z**-n, z**n]) @ xs[i]
    return JostSolution(side=side, n_first=n_lo, values=ys)


def winding_number(f: CircleFunction, tol: float = 1e-6) -> int:
    """Winding of the closed curve f(theta) around 0, by phase increments.

    The accumulated increment over the closed loop must be an integer
    multiple of 2*pi within ``tol``; anything else raises.
    """
    samples = f.samples
    if np.min(np.abs(samples)) == 0.0:
        raise ValueError("curve passes through 0; winding undefined")
    ratios = np.roll(samples, -1) / samples
    total = float(np.sum(np.angle(ratios))) / (2.0 * np.pi)
    nearest = round(total)
    if abs(total - nearest) > tol:
        raise ValueError(f"phase increments sum to non-integer winding {total}")
    return int(nearest)


def unwrapped_log(f: CircleFunction) -> CircleFunction:
    """log f with the phase unwrapped along the grid (needs winding 0)."""
    if winding_number(f) != 0:
        raise ValueError("nonzero winding; no single-valued logarithm on the circle")
    phase = np.unwrap(np.angle(f.samples))
    return CircleFunction(f.grid, np.log(np.abs(f.samples)) + 1j * phase)


def validate_scattering(data: ScatteringData, tol: float = 1e-12) -> None:
    """Check |a|^2 - |b|^2 = c_inf at every node and sup|r| < 1."""
    det = np.abs(data.a.samples) ** 2 - np.abs(data.b.samples) ** 2
    err = float(np.max(np.abs(det - data.c_inf)))
    if err > tol:
        raise ValueError(f"determinant identity violated by {err}")
    sup_r = float(np.max(np.abs(data.r.samples))) if data.grid.n else 0.0
    if sup_r >= 1.0:
        raise ValueError(f"reflection coefficient reaches modulus {sup_r} >= 1")


def log_a_series(data: ScatteringData):
    """Fourier series of the unwrapped log of a (diagnostic for analyticity).

    For admissible potentials the coefficients live on strictly negative
    modes and the mode-0 coefficient vanishes, reflecting holomorphy of a
    outside the circle with value 1 at infinity.
    """
    return analyze(unwrapped_log(data.a))
