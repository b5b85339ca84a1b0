"""Direct and inverse scattering transforms for the defocusing
Ablowitz-Ladik lattice, with a spectral initial-value solver cross-checked
against direct integration."""

from .circle import (
    CircleFunction,
    CircleGrid,
    FourierSeries,
    analyze,
    cauchy_minus,
    cauchy_plus,
    contour_integral,
    hk_norm,
    l2_norm,
    make_grid,
    synthesize,
)
from .evolution import EvolutionReport, evolve_reflection, ist_evolve, oracle_compare
from .lattice import (
    Potential,
    al_rhs,
    c_partial,
    c_total,
    l2k_norm,
    rk4_evolve,
    sup_norm,
)
from .rh import (
    BealsCoifmanSolution,
    ConvergenceError,
    JumpFactors,
    ReconstructionError,
    ReflectionData,
    apply_bc_operator,
    build_jump_factors,
    prepare_reflection,
    reconstruct_site,
    reconstruct_window,
    solve_beals_coifman,
    trace_a,
)
from .scattering import (
    ScatteringData,
    TransferMatrix,
    compute_scattering,
    jost_modified,
    scattering_matrix_at,
    transfer_matrix,
    winding_number,
)

__version__ = "0.1.0"
