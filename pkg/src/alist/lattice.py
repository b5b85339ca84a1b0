"""Lattice potentials and the direct integrator for the Ablowitz-Ladik flow.

A potential is a finitely supported complex sequence q_n stored on an index
window; sites outside the window are implicitly zero.  Admissible potentials
satisfy sup_n |q_n| < 1.  The flow integrated here is

    dq_n/dt = -i * [ q_{n+1} - 2 q_n + q_{n-1} - |q_n|^2 (q_{n+1} + q_{n-1}) ],

whose conserved product prod_n (1 - |q_n|^2) is exposed as ``c_total``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Potential",
    "l2k_norm",
    "sup_norm",
    "c_partial",
    "c_total",
    "al_rhs",
    "rk4_evolve",
    "values_on_window",
    "edge_amplitude",
]


@dataclass(frozen=True, eq=False)
class Potential:
    """Finitely supported lattice sequence with sup-norm < 1.

    ``values[i]`` is the entry at site ``n_min + i``; the sequence is zero
    outside the stored window.
    """

    n_min: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        object.__setattr__(self, "values", values)
        values.setflags(write=False)
        sup = sup_norm(self)
        if sup >= 1.0:
            raise ValueError(f"potential sup-norm {sup} is not < 1")

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.values) - 1

    @property
    def sites(self) -> np.ndarray:
        return self.n_min + np.arange(len(self.values))

    def at(self, n: int) -> complex:
        if self.n_min <= n <= self.n_max:
            return complex(self.values[n - self.n_min])
        return 0.0 + 0.0j


def sup_norm(q: Potential) -> float:
    """max_n |q_n| (0 for an empty window)."""
    if len(q.values) == 0:
        return 0.0
    return float(np.max(np.abs(q.values)))


def l2k_norm(q: Potential, k: int) -> float:
    """Weighted norm ( sum_n (1+n^2)^k |q_n|^2 )^(1/2)."""
    if k < 0:
        raise ValueError("order k must be nonnegative")
    if len(q.values) == 0:
        return 0.0
    weights = (1.0 + q.sites.astype(float) ** 2) ** k
    return float(np.sqrt(np.sum(weights * np.abs(q.values) ** 2)))


def c_partial(q: Potential, n: int) -> float:
    """Product of (1 - |q_k|^2) over stored sites k >= n."""
    mask = q.sites >= n
    return float(np.prod(1.0 - np.abs(q.values[mask]) ** 2))


def c_total(q: Potential) -> float:
    """Full conserved product over all sites, in (0, 1]."""
    return float(np.prod(1.0 - np.abs(q.values) ** 2)) if len(q.values) else 1.0


def _rhs_values(values: np.ndarray, boundary: str) -> np.ndarray:
    if boundary == "periodic":
        qp = np.roll(values, -1)
        qm = np.roll(values, 1)
    elif boundary == "zero_padded":
        qp = np.zeros_like(values)
        qp[:-1] = values[1:]
        qm = np.zeros_like(values)
        qm[1:] = values[:-1]
    else:
        raise ValueError(f"unknown boundary {boundary!r}")
    return -1j * (qp - 2.0 * values + qm - np.abs(values) ** 2 * (qp + qm))


def al_rhs(q: Potential) -> tuple[int, np.ndarray]:
    """Time derivative of the flow at ``q``.

    Returns ``(n_min - 1, values)`` covering the support window padded by one
    site on each end, since the stencil spreads one site per evaluation.
    """
    padded = np.concatenate(([0.0], q.values, [0.0])).astype(complex)
    return q.n_min - 1, _rhs_values(padded, "zero_padded")


def rk4_evolve(
    q0: Potential,
    t: float,
    dt: float,
    buffer: int | None = None,
    boundary: str = "zero_padded",
) -> Potential:
    """Integrate the lattice flow to time ``t`` with classical RK4.

    ``buffer`` extends the stored window on both sides to absorb dispersive
    spreading (zero-padded boundary only); the default margin is 64 sites per
    unit time.  The returned potential lives on the extended window so edge
    amplitudes stay inspectable.  Raises ``RuntimeError`` if the state leaves
    the admissible class sup|q| < 1 during integration.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if boundary not in ("zero_padded", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")

    if boundary == "periodic":
        n_min = q0.n_min
        state = q0.values.copy()
    else:
        if buffer is None:
            buffer = 64 * max(1, math.ceil(t))
        if buffer < 0:
            raise ValueError("buffer must be nonnegative")
        n_min = q0.n_min - buffer
        state = np.concatenate(
            [np.zeros(buffer, dtype=complex), q0.values, np.zeros(buffer, dtype=complex)]
        )
    if len(state) == 0 or t == 0.0:
        return Potential(n_min, state)

    remaining = t
    while remaining > 1e-15 * max(1.0, t):
        h = min(dt, remaining)
        k1 = _rhs_values(state, boundary)
        k2 = _rhs_values(state + 0.5 * h * k1, boundary)
        k3 = _rhs_values(state + 0.5 * h * k2, boundary)
        k4 = _rhs_values(state + h * k3, boundary)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.max(np.abs(state)) >= 1.0:
            raise RuntimeError(
                "integration left the admissible class: sup|q| reached 1"
            )
        remaining -= h
    return Potential(n_min, state)


def values_on_window(q: Potential, n_lo: int, n_hi: int) -> np.ndarray:
    """Entries on sites n_lo..n_hi inclusive, zero-filled outside the store."""
    if n_lo > n_hi:
        raise ValueError("empty window")
    out = np.zeros(n_hi - n_lo + 1, dtype=complex)
    lo = max(n_lo, q.n_min)
    hi = min(n_hi, q.n_max) if len(q.values) else n_lo - 1
    if hi >= lo:
        out[lo - n_lo : hi - n_lo + 1] = q.values[lo - q.n_min : hi - q.n_min + 1]
    return out


def edge_amplitude(q: Potential) -> float:
    """max(|q| at the two outermost stored sites); diagnoses window breach."""
    if len(q.values) == 0:
        return 0.0
    return float(max(abs(q.values[0]), abs(q.values[-1])))
