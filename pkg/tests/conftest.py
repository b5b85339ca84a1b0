import numpy as np

from alist.lattice import Potential


def random_potential(rng, sites=16, amp=0.3, n_min=-8):
    """Window-supported draw with a decaying magnitude envelope.

    The envelope keeps sup|r| of the scattering data well below 1 (transfer
    products compound exponentially in sum |q_n|), so Neumann solves stay
    within default iteration budgets and the reflection coefficient is
    resolved on desk-scale grids.
    """
    offsets = np.arange(sites) - (sites - 1) / 2.0
    env = amp / (1.0 + offsets**2) ** 0.5
    mag = env * np.sqrt(rng.uniform(0, 1, sites))
    phase = rng.uniform(0, 2 * np.pi, sites)
    return Potential(n_min, mag * np.exp(1j * phase))
