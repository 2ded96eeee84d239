"""Exact spectrum from block diagonalization over conserved (j, m) sectors.

The homogeneous Hamiltonian H = B S0^z + 2A S0.J commutes with J^2, S0^2 and
the total S^z, so it splits into blocks labelled by the bath spin j and the
total magnetization m.  Within a block, states |s, m_s> x |j, m - m_s| ordered
by descending m_s couple only to their nearest neighbours, giving a real
symmetric tridiagonal matrix of dimension d(m, s, j) <= min(2s, 2j) + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    HalfInt,
    SectorKey,
    bath_spin_multiplicity,
    halfint,
    halfint_range,
    sector_dimension,
    sector_keys,
)
from .linalg import SymTridiag, eig_sym_tridiag


def diag_term(m_s, m_j, p):
    """Diagonal matrix element B*m_s + 2A*m_s*m_j (Zeeman plus Ising part)."""
    if abs(m_s.twice) > p.s.twice:
        raise ValueError(f"|m_s|={m_s} exceeds s={p.s}")
    ms, mj = float(m_s), float(m_j)
    return p.B * ms + 2.0 * p.A * ms * mj


def offdiag_term(m_s, m_j, s, j, A):
    """Flip-flop amplitude A*sqrt((s-m_s+1)(s+m_s)(j+m_j+1)(j-m_j)).

    Couples (m_s, m_j) to (m_s - 1, m_j + 1); all four factors are exact
    nonnegative integers for in-range transitions.
    """
    f1 = (s.twice - m_s.twice) // 2 + 1
    f2 = (s.twice + m_s.twice) // 2
    f3 = (j.twice + m_j.twice) // 2 + 1
    f4 = (j.twice - m_j.twice) // 2
    prod = f1 * f2 * f3 * f4
    if min(f1, f2, f3, f4) < 0:
        raise ValueError(f"out-of-range transition (m_s={m_s}, m_j={m_j}) for s={s}, j={j}")
    return A * math.sqrt(prod)


@dataclass(frozen=True)
class SectorBlock:
    """One (j, m) block: basis, tridiagonal matrix and its eigendecomposition.

    Basis pairs (m_s, m_j) are ordered by descending m_s; `weights` columns
    are the orthonormal eigenvector coefficients in that basis order.
    """

    key: SectorKey
    basis: tuple
    matrix: np.ndarray
    energies: np.ndarray
    weights: np.ndarray


def build_sector(p, key):
    """Build and diagonalize the (j, m) block of the homogeneous model."""
    sector_dimension(p.s, key)  # validates m range and parity
    hi = min(p.s, key.m + key.j)
    lo = max(-p.s, key.m - key.j)
    basis = tuple((ms, key.m - ms) for ms in reversed(halfint_range(lo, hi)))
    diag = [diag_term(ms, mj, p) for ms, mj in basis]
    off = [
        offdiag_term(basis[i][0], basis[i][1], p.s, key.j, p.A)
        for i in range(len(basis) - 1)
    ]
    tri = SymTridiag(diag, off)
    energies, weights = eig_sym_tridiag(tri)
    return SectorBlock(key=key, basis=basis, matrix=tri.dense(), energies=energies, weights=weights)


@dataclass(frozen=True)
class SpectrumLevel:
    """One energy level with its sector labels and bath multiplicity."""

    j: HalfInt
    m: HalfInt
    energy: float
    multiplicity: int


def full_spectrum(p):
    """Every level of the (2s+1)*2^N - dimensional model, sector by sector.

    Levels are ordered by (j descending, m descending, energy ascending);
    each carries the multiplicity of its bath-spin value, so the weighted
    count equals (2s+1)*2^N.
    """
    levels = []
    for key in sector_keys(p.s, p.N):
        mult = bath_spin_multiplicity(p.N, key.j)
        block = build_sector(p, key)
        for energy in block.energies:
            levels.append(SpectrumLevel(key.j, key.m, float(energy), mult))
    return levels


def expanded_levels(levels):
    """Sorted array of energies with each level repeated `multiplicity` times."""
    out = []
    for lv in levels:
        out.extend([lv.energy] * lv.multiplicity)
    return np.sort(np.array(out))
