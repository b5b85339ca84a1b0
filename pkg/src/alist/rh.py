"""Inverse transform: jump factorization on the circle and potential recovery.

Given a reflection coefficient r with sup|r| < 1, the matrix boundary-value
problem with jump

    V(z) = [[1 - |r|^2, -conj(r)], [r, 1]]

is solved through the singular integral equation mu = I + C_w mu, where the
jump is split into one strictly-lower and one strictly-upper factor w_+/w_-
carrying the oscillation z^{-2n} / z^{2n}, and

    C_w f = cauchy_plus(f w_-) + cauchy_minus(f w_+).

The operator contracts with rate sup|r| in L2, so the Neumann series for mu
converges geometrically and each application costs a few FFTs.  The site
value is then read off as the clockwise contour integral of
z^{-2} (mu w)_{12} at site parameter n+1.

Scalar factorization: with rho = log(1 - |r|^2), the conjugating function
delta is fixed by the assignment

    delta_plus  = exp( nonnegative-mode part of rho ),
    delta_minus = exp( -(negative-mode part of rho) ),

the unique choice that simultaneously satisfies the multiplicative jump
delta_plus = delta_minus (1 - |r|^2), the interior value delta(0) = c_inf,
the modulus identity |delta_plus delta_minus| = c_inf, and preservation of
sup|r| under the conjugated reflection

    r_tilde = r * delta_plus * delta_minus / c_inf.

The conjugating factor delta_plus*delta_minus/c_inf is unimodular on the
circle and shifts the Fourier support of the reflection upward (it equals
a/conj(a) in terms of the transmission-related function a); that shift is
what makes the conjugated jump data decay as n -> -infinity.  Sites n <= -2
are reconstructed in this conjugated ("tilde") branch; sites n >= -1 use the
standard branch.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circle import (
    CircleFunction,
    CircleGrid,
    _modes,
    _project,
    _samples_from_coef,
    analyze,
    contour_integral,
)
from .lattice import Potential

__all__ = [
    "ReflectionData",
    "JumpFactors",
    "BealsCoifmanSolution",
    "SiteRecord",
    "ReconstructionResult",
    "ConvergenceError",
    "ReconstructionError",
    "prepare_reflection",
    "validate_reflection",
    "trace_a",
    "build_jump_factors",
    "jump_matrix",
    "apply_bc_operator",
    "solve_beals_coifman",
    "born_site",
    "reconstruct_site",
    "reconstruct_window",
]


class ConvergenceError(RuntimeError):
    """Neumann iteration failed to reach tolerance within max_iter."""


class ReconstructionError(RuntimeError):
    """One or more lattice sites failed to converge.

    Carries the partial :class:`ReconstructionResult` in ``result`` and the
    failed site indices in ``failed_sites``.
    """

    def __init__(self, failed_sites, result):
        self.failed_sites = list(failed_sites)
        self.result = result
        super().__init__(f"reconstruction failed at sites {self.failed_sites}")


@dataclass(eq=False)
class ReflectionData:
    """Reflection coefficient with its scalar factorization data."""

    grid: CircleGrid
    r: CircleFunction
    c_inf: float
    rho: CircleFunction
    delta_plus: CircleFunction
    delta_minus: CircleFunction
    r_tilde: CircleFunction


@dataclass(eq=False)
class JumpFactors:
    """Triangular jump factors at one site parameter.

    standard branch: w_minus upper with entry -conj(r) z^{2n}, w_plus lower
    with entry r z^{-2n}; tilde branch swaps triangularity and uses the
    conjugated reflection.
    """

    n: int
    branch: str
    w_plus: CircleFunction
    w_minus: CircleFunction


@dataclass(eq=False)
class BealsCoifmanSolution:
    mu: CircleFunction
    iterations: int
    residual: float


@dataclass(frozen=True)
class SiteRecord:
    n: int
    value: complex
    iterations: int
    residual: float
    converged: bool


@dataclass(eq=False)
class ReconstructionResult:
    potential: Potential
    sites: list


def prepare_reflection(r: CircleFunction) -> ReflectionData:
    """Factorize 1 - |r|^2 across the circle and conjugate the reflection.

    Computes rho = log(1 - |r|^2), the conserved constant
    c_inf = exp(mean of rho), the scalar factors delta_+/- (see module
    docstring for the side assignment) and the conjugated reflection
    r_tilde = r * delta_plus * delta_minus / c_inf.
    """
    sup_r = float(np.max(np.abs(r.samples))) if r.samples.size else 0.0
    if sup_r >= 1.0 - 1e-10:
        raise ValueError(f"sup|r| = {sup_r} too close to 1; factorization would fail")
    grid = r.grid
    rho_samples = np.log1p(-np.abs(r.samples) ** 2)
    rho = CircleFunction(grid, rho_samples)
    coef = analyze(rho).coef
    modes = _modes(grid.n)
    c_inf = float(np.exp(np.real(coef[grid.n // 2])))
    nonneg = coef * (modes >= 0)
    neg = coef * (modes < 0)
    delta_plus = np.exp(_samples_from_coef(nonneg))
    delta_minus = np.exp(-_samples_from_coef(neg))
    r_tilde = r.samples * delta_plus * delta_minus / c_inf
    return ReflectionData(
        grid=grid,
        r=r,
        c_inf=c_inf,
        rho=rho,
        delta_plus=CircleFunction(grid, delta_plus),
        delta_minus=CircleFunction(grid, delta_minus),
        r_tilde=CircleFunction(grid, r_tilde),
    )


def validate_reflection(data: ReflectionData, tol: float = 1e-12) -> None:
    """Node-wise checks of the factorization identities."""
    dp, dm = data.delta_plus.samples, data.delta_minus.samples
    jump = dp - dm * (1.0 - np.abs(data.r.samples) ** 2)
    err = float(np.max(np.abs(jump)))
    if err > tol:
        raise ValueError(f"delta jump violated by {err}")
    mod = np.abs(dp * dm) - data.c_inf
    err = float(np.max(np.abs(mod)))
    if err > tol:
        raise ValueError(f"|delta_plus delta_minus| = c identity violated by {err}")
    sup_r = float(np.max(np.abs(data.r.samples)))
    sup_rt = float(np.max(np.abs(data.r_tilde.samples)))
    if abs(sup_rt - sup_r) > tol * max(sup_r, 1.0):
        raise ValueError(f"sup|r_tilde| = {sup_rt} deviates from sup|r| = {sup_r}")


def trace_a(data: ReflectionData, z) -> np.ndarray | complex:
    """Transmission-related function a at |z| >= 1 from |r| alone.

    a(z) = exp( - sum_{l<0} rho_hat(l) z^l ), the exponentiated clockwise
    Cauchy transform of rho evaluated from outside the circle; boundary
    values match the directly computed a.
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(z_arr) < 1.0 - 1e-12):
        raise ValueError("trace formula evaluates outside the unit circle only")
    coef = analyze(data.rho).coef
    half = data.grid.n // 2
    # sum_{m>=1} rho_hat(-m) u^m with u = 1/z, Horner from the deepest mode
    u = 1.0 / z_arr
    acc = np.zeros_like(u)
    for m in range(half, 0, -1):
        acc = (acc + coef[half - m]) * u
    out = np.exp(-acc)
    return complex(out) if np.ndim(z) == 0 else out


def build_jump_factors(data: ReflectionData, n: int, branch: str | None = None) -> JumpFactors:
    """Triangular factors at site parameter ``n``.

    Default branch rule: standard for n >= -1, tilde for n <= -2.
    """
    if branch is None:
        branch = "standard" if n >= -1 else "tilde"
    if branch not in ("standard", "tilde"):
        raise ValueError(f"unknown branch {branch!r}")
    grid = data.grid
    z2n = grid.z ** (2 * n)
    w_plus = np.zeros((grid.n, 2, 2), dtype=complex)
    w_minus = np.zeros((grid.n, 2, 2), dtype=complex)
    if branch == "standard":
        w_plus[:, 1, 0] = data.r.samples / z2n
        w_minus[:, 0, 1] = -np.conj(data.r.samples) * z2n
    else:
        w_plus[:, 0, 1] = -np.conj(data.r_tilde.samples) * z2n
        w_minus[:, 1, 0] = data.r_tilde.samples / z2n
    return JumpFactors(
        n=n,
        branch=branch,
        w_plus=CircleFunction(grid, w_plus),
        w_minus=CircleFunction(grid, w_minus),
    )


def jump_matrix(factors: JumpFactors) -> np.ndarray:
    """(I - w_-)^{-1} (I + w_+) per node; equals the conjugated jump."""
    eye = np.eye(2, dtype=complex)
    lower = np.linalg.inv(eye - factors.w_minus.samples)
    return np.einsum("nij,njk->nik", lower, eye + factors.w_plus.samples)


def _apply_bc(f: np.ndarray, w_plus: np.ndarray, w_minus: np.ndarray) -> np.ndarray:
    fw_minus = np.einsum("nij,njk->nik", f, w_minus)
    fw_plus = np.einsum("nij,njk->nik", f, w_plus)
    return _project(fw_minus, keep_negative=True) - _project(fw_plus, keep_negative=False)


def apply_bc_operator(f: CircleFunction, factors: JumpFactors) -> CircleFunction:
    """cauchy_plus(f w_-) + cauchy_minus(f w_+), column-wise via projections."""
    return CircleFunction(
        f.grid, _apply_bc(f.samples, factors.w_plus.samples, factors.w_minus.samples)
    )


def _matrix_l2(samples: np.ndarray) -> float:
    sq = np.abs(samples) ** 2
    return float(np.sqrt(sq.reshape(sq.shape[0], -1).sum(axis=1).mean()))


def solve_beals_coifman(
    factors: JumpFactors, tol: float = 1e-12, max_iter: int = 200
) -> BealsCoifmanSolution:
    """Neumann series mu = sum_m (C_w)^m I, stopped on the update norm.

    Convergence is geometric with rate sup|r|; non-convergence within
    ``max_iter`` raises :class:`ConvergenceError` (reflection modulus too
    close to 1, or aliased jump data).
    """
    grid = factors.w_plus.grid
    wp, wm = factors.w_plus.samples, factors.w_minus.samples
    term = np.tile(np.eye(2, dtype=complex), (grid.n, 1, 1))
    mu = term.copy()
    iterations = None
    for it in range(1, max_iter + 1):
        term = _apply_bc(term, wp, wm)
        mu += term
        if _matrix_l2(term) <= tol:
            iterations = it
            break
    if iterations is None:
        raise ConvergenceError(
            f"no convergence to {tol} within {max_iter} iterations at site parameter {factors.n}"
        )
    eye = np.tile(np.eye(2, dtype=complex), (grid.n, 1, 1))
    residual = _matrix_l2(mu - eye - _apply_bc(mu, wp, wm))
    return BealsCoifmanSolution(
        mu=CircleFunction(grid, mu), iterations=iterations, residual=residual
    )


def _branch_for_site(n: int) -> str:
    return "standard" if n >= -1 else "tilde"


def _site_integral(data: ReflectionData, n: int, mu: np.ndarray, factors: JumpFactors) -> complex:
    w = factors.w_plus.samples + factors.w_minus.samples
    g = np.einsum("nij,njk->nik", mu, w)[:, 0, 1]
    integrand = CircleFunction(data.grid, g / data.grid.z**2)
    return contour_integral(integrand)


def born_site(data: ReflectionData, n: int) -> complex:
    """First-order (single-scattering) approximation of the site value.

    Diagnostic only: the contour integral with mu replaced by the identity.
    """
    factors = build_jump_factors(data, n + 1, _branch_for_site(n))
    eye = np.tile(np.eye(2, dtype=complex), (data.grid.n, 1, 1))
    return _site_integral(data, n, eye, factors)


def reconstruct_site(
    data: ReflectionData, n: int, tol: float = 1e-12, max_iter: int = 200
) -> complex:
    """Recover the potential entry at site ``n`` from the reflection data."""
    record = _reconstruct_site_record(data, n, tol, max_iter)
    if not record.converged:
        raise ConvergenceError(f"site {n}: no convergence within {max_iter} iterations")
    return record.value


def _reconstruct_site_record(
    data: ReflectionData, n: int, tol: float, max_iter: int
) -> SiteRecord:
    factors = build_jump_factors(data, n + 1, _branch_for_site(n))
    try:
        solution = solve_beals_coifman(factors, tol=tol, max_iter=max_iter)
        converged = True
        iterations, residual = solution.iterations, solution.residual
        mu = solution.mu.samples
    except ConvergenceError:
        converged = False
        iterations, residual = max_iter, float("nan")
        mu = np.tile(np.eye(2, dtype=complex), (data.grid.n, 1, 1))
    value = _site_integral(data, n, mu, factors)
    return SiteRecord(
        n=n, value=value, iterations=iterations, residual=residual, converged=converged
    )


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("ALIST_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


def reconstruct_window(
    data: ReflectionData,
    n_lo: int,
    n_hi: int,
    tol: float = 1e-12,
    max_iter: int = 200,
    threads: int | None = None,
) -> ReconstructionResult:
    """Recover the potential on sites n_lo..n_hi inclusive.

    Site solves are independent and mapped over a thread pool sized by
    ``threads`` (or the ALIST_THREADS environment variable, defaulting to the
    core count).  If any site fails to converge, a
    :class:`ReconstructionError` carrying the partial result is raised.
    """
    if n_lo > n_hi:
        raise ValueError("window is empty")
    sites = range(n_lo, n_hi + 1)
    workers = _resolve_threads(threads)

    def solve(n):
        return _reconstruct_site_record(data, n, tol, max_iter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(solve, sites))
    else:
        records = [solve(n) for n in sites]

    values = np.array([rec.value for rec in records], dtype=complex)
    result = ReconstructionResult(potential=Potential(n_lo, values), sites=records)
    failed = [rec.n for rec in records if not rec.converged]
    if failed:
        raise ReconstructionError(failed, result)
    return result
