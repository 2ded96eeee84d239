"""Exact engine for the spin-s central spin model.

Sector-resolved spectra, Bethe-ansatz root sets (direct Newton and the
q-polynomial method), and closed-form coherent-state dynamics with derived
observables, all cross-checked against a brute-force dense oracle.
"""

from .core import (
    HalfInt,
    InhomModelParams,
    ModelParams,
    SectorKey,
    bath_spin_multiplicity,
    bath_spin_values,
    halfint,
    sector_dimension,
    sector_keys,
)
from .linalg import Polynomial, SymTridiag, eig_sym_tridiag, newton_solve, poly_roots
from .sector_spectrum import SectorBlock, build_sector, full_spectrum
from .bethe import (
    BetheState,
    QPolyState,
    count_solutions,
    energy_hom,
    energy_inhom,
    magnetization,
    residual_hom,
    residual_inhom,
    solve_hom,
    solve_hom_qpoly,
    solve_inhom_newton,
)
from .mode_decomposition import ModeDecomposition, decompose, decompose_all
from .dynamics import (
    CoherentPrep,
    EvolvedState,
    ReducedDensity,
    TimeSeries,
    coherent_factor,
    entropy,
    evolve,
    loschmidt,
    make_cache,
    prepare,
    purity,
    reduced_density,
    run_timeseries,
    spin_polarization,
)
from .oracle import DenseModel, build_dense, exact_evolve, exact_spectrum, partial_trace_bath

__version__ = "0.1.0"
