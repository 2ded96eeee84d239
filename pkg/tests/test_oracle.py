import math

import numpy as np
import pytest

import golden
from centralspin.core import InhomModelParams, ModelParams, halfint
from centralspin.oracle import (
    DimensionGuard,
    build_dense,
    coherent_bath_state,
    commutant_defects,
    dicke_state,
    exact_evolve,
    exact_spectrum,
    initial_product_state,
    partial_trace_bath,
    total_sz_values,
)


def test_two_spin_hand_matrix():
    # s = 1/2, N = 1: basis |b c> with index 2b + c, c=0 up, bit set = down
    A, B = 0.7, 0.3
    dm = build_dense(ModelParams(s="1/2", N=1, A=A, B=B))
    H = np.zeros((4, 4))
    # diagonal: B m_s + 2A m_s m_1
    for b in (0, 1):
        for c in (0, 1):
            ms = 0.5 - c
            m1 = 0.5 - b
            H[2 * b + c, 2 * b + c] = B * ms + 2 * A * ms * m1
    # flip-flop between |up,down> (b=0,c=1) and |down,up> (b=1,c=0)
    H[1, 2] = H[2, 1] = A
    assert np.abs(dm.H - H).max() < 1e-14
    # sector route predicts -A/2 +- sqrt(B^2/4 + A^2) in the m=0 block
    evals = exact_spectrum(dm)
    mid = [-A / 2 - math.sqrt(B**2 / 4 + A**2), -A / 2 + math.sqrt(B**2 / 4 + A**2)]
    expect = sorted([B / 2 + A / 2, -B / 2 + A / 2] + mid)
    assert np.allclose(evals, expect, atol=1e-12)


def test_a_zero_is_diagonal():
    dm = build_dense(ModelParams(s="3/2", N=2, A=0.0, B=1.1))
    assert np.abs(dm.H - np.diag(np.diag(dm.H))).max() == 0.0
    svals = np.array([1.5, 0.5, -0.5, -1.5])
    assert np.allclose(np.unique(np.diag(dm.H)), np.sort(np.unique(1.1 * svals)), atol=1e-14)


def test_table1_eigenvalues():
    dm = build_dense(golden.PARAMS)
    expect = np.sort([e for _, _, e in golden.LEVELS])
    assert np.allclose(exact_spectrum(dm), expect, atol=1e-5)


def test_inhomogeneous_couplings_enter():
    p = InhomModelParams(s="1/2", N=2, B=0.5, eps0=0.0, eps=(1.0, 3.0))
    dm = build_dense(p)
    # [H, total S^z] still vanishes for the inhomogeneous model
    d = total_sz_values(p.s, p.N)
    assert np.abs(dm.H * (d[None, :] - d[:, None])).max() < 1e-12


def test_commutants():
    defects = commutant_defects(build_dense(ModelParams(s="1", N=4, A=0.8, B=-0.4)))
    assert defects["total_sz"] < 1e-12
    assert defects["bath_j2"] < 1e-12
    assert defects["central_s2"] == 0.0


def test_exact_evolve_basics():
    dm = build_dense(ModelParams(s="1", N=3, A=1.0, B=1.0))
    rng = np.random.default_rng(0)
    psi = rng.standard_normal(dm.dim) + 1j * rng.standard_normal(dm.dim)
    psi /= np.linalg.norm(psi)
    assert np.abs(exact_evolve(dm, psi, 0.0) - psi).max() < 1e-12
    w, v = dm.eig()
    evolved = exact_evolve(dm, v[:, 3].astype(complex), 0.9)
    assert np.abs(evolved - np.exp(-1j * w[3] * 0.9) * v[:, 3]).max() < 1e-12
    assert abs(np.linalg.norm(exact_evolve(dm, psi, 2.7)) - 1.0) < 1e-11


def test_partial_trace_product_state():
    s, N = halfint(1), 3
    psi = initial_product_state(s, N, 0.4 * np.pi)
    rho = partial_trace_bath(psi, s, N).rho
    expect = np.zeros((3, 3))
    expect[0, 0] = 1.0
    assert np.abs(rho - expect).max() < 1e-12
    # any pure product state gives a rank-1 reduced matrix
    central = np.array([0.6, 0.8j, 0.0], dtype=complex)
    psi2 = np.kron(coherent_bath_state(N, 0.3), central)
    rho2 = partial_trace_bath(psi2, s, N).rho
    evals = np.linalg.eigvalsh(rho2)
    assert np.abs(np.sort(evals) - np.array([0.0, 0.0, 1.0])).max() < 1e-12


def test_dicke_and_coherent_consistency():
    N, theta = 5, 1.1
    bath = coherent_bath_state(N, theta)
    rebuilt = sum(
        math.sqrt(math.comb(N, n))
        * math.cos(theta / 2) ** (N - n)
        * math.sin(theta / 2) ** n
        * dicke_state(N, n)
        for n in range(N + 1)
    )
    assert np.abs(bath - rebuilt).max() < 1e-12
    assert abs(np.linalg.norm(bath) - 1.0) < 1e-12


def test_dimension_guard():
    with pytest.raises(DimensionGuard):
        build_dense(ModelParams(s="1/2", N=16, A=1.0, B=1.0))
