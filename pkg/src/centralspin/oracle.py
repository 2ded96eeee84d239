"""Brute-force ground truth on the full (2s+1) * 2^N product space.

Basis conventions (fixed so serialized vectors are reproducible):
  * global index I = b * (2s+1) + c, central index c fastest-varying;
  * central index c = 0..2s labels m_s = s - c (descending);
  * bath bitstrings b are little-endian, bit k belongs to bath spin k+1,
    a set bit means that spin is down (m = -1/2), so b = 0 is all-up.

Everything here is dense and deliberately unoptimized beyond LAPACK; it
exists to verify the sector, Bethe and dynamics modules, not for production
runs.  Dimensions are capped at 65536.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sparse

from .core import InhomModelParams, ModelParams
from .dynamics import ReducedDensity

DIM_CAP = 65536


class DimensionGuard(Exception):
    """Requested Hilbert space exceeds the oracle's hard cap."""


def _central_ops(s2):
    """S^z, S^-, S^+ for the central spin in the m_s = s - c basis."""
    d0 = s2 + 1
    s = s2 / 2.0
    sz = np.diag([s - c for c in range(d0)])
    sm = np.zeros((d0, d0))
    for c in range(d0 - 1):
        m = s - c
        sm[c + 1, c] = math.sqrt((s + m) * (s - m + 1))
    return sz, sm, sm.T


def _site_op(N, k, op):
    """Lift a single-spin operator onto bath bit k (0-based, little-endian)."""
    left = sparse.identity(2 ** (N - 1 - k), format="csr")
    right = sparse.identity(2**k, format="csr")
    return sparse.kron(sparse.kron(left, sparse.csr_matrix(op)), right, format="csr")


_SZ2 = np.diag([0.5, -0.5])
_SM2 = np.array([[0.0, 0.0], [1.0, 0.0]])
_SP2 = _SM2.T


@dataclass
class DenseModel:
    """Dense Hamiltonian plus a lazily cached eigendecomposition."""

    s: object
    N: int
    dim: int
    H: np.ndarray
    _evals: np.ndarray = field(default=None, repr=False, compare=False)
    _evecs: np.ndarray = field(default=None, repr=False, compare=False)

    def eig(self):
        if self._evecs is None:
            self._evals, self._evecs = scipy.linalg.eigh(self.H, driver="evd")
        return self._evals, self._evecs


def build_dense(p):
    """Assemble H = B S0^z + sum_j 2 A_j S0.s_j on the full product space."""
    s2 = p.s.twice
    dim = (s2 + 1) * 2**p.N
    if dim > DIM_CAP:
        raise DimensionGuard(f"dimension {dim} exceeds cap {DIM_CAP}")
    if isinstance(p, ModelParams):
        couplings = [p.A] * p.N
    elif isinstance(p, InhomModelParams):
        couplings = list(p.couplings)
    else:
        raise TypeError(f"unsupported parameter type {type(p).__name__}")
    s0z, s0m, s0p = (sparse.csr_matrix(m) for m in _central_ops(s2))
    eye_bath = sparse.identity(2**p.N, format="csr")
    H = p.B * sparse.kron(eye_bath, s0z, format="csr")
    for site in range(1, p.N + 1):
        a = couplings[site - 1]
        if a == 0.0:
            continue
        bz = _site_op(p.N, site - 1, _SZ2)
        bm = _site_op(p.N, site - 1, _SM2)
        bp = _site_op(p.N, site - 1, _SP2)
        H = H + 2.0 * a * (
            sparse.kron(bz, s0z, format="csr")
            + 0.5 * sparse.kron(bm, s0p, format="csr")
            + 0.5 * sparse.kron(bp, s0m, format="csr")
        )
    return DenseModel(s=p.s, N=p.N, dim=dim, H=H.toarray())


def exact_spectrum(dm):
    """All eigenvalues, ascending."""
    if dm._evecs is not None:
        return dm._evals.copy()
    if dm._evals is None:
        dm._evals = np.linalg.eigvalsh(dm.H)
    return dm._evals.copy()


def exact_evolve(dm, psi0, t):
    """exp(-i H t) psi0 through the cached eigendecomposition."""
    w, v = dm.eig()
    return v @ (np.exp(-1j * w * t) * (v.T @ psi0))


def evolve_batch(dm, psi0, ts):
    """Columns exp(-i H t_k) psi0 for a whole grid at once."""
    w, v = dm.eig()
    coef = v.T @ psi0
    return v @ (np.exp(-1j * np.outer(w, np.asarray(ts))) * coef[:, None])


def partial_trace_bath(psi, s, N):
    """Reduced central-spin density matrix of a pure state on the full space."""
    d0 = s.twice + 1
    mat = np.asarray(psi).reshape(2**N, d0)
    return ReducedDensity(rho=mat.T @ mat.conj())


# ---------------------------------------------------------------------------
# reference states


def dicke_state(N, n):
    """Symmetric bath state with n spins down, unit norm, bitstring basis."""
    if not 0 <= n <= N:
        raise ValueError(f"n={n} outside 0..{N}")
    counts = np.bitwise_count(np.arange(2**N, dtype=np.uint64))
    vec = np.where(counts == n, 1.0, 0.0)
    return vec / math.sqrt(math.comb(N, n))


def coherent_bath_state(N, theta):
    """Product of identically tilted spins: cos(theta/2)|up> + sin(theta/2)|down>."""
    counts = np.bitwise_count(np.arange(2**N, dtype=np.uint64)).astype(float)
    return np.cos(theta / 2.0) ** (N - counts) * np.sin(theta / 2.0) ** counts


def initial_product_state(s, N, theta):
    """|s, s> x |theta> in the oracle basis."""
    d0 = s.twice + 1
    central = np.zeros(d0)
    central[0] = 1.0
    return np.kron(coherent_bath_state(N, theta), central)


def dense_from_evolved(state, s, N):
    """Embed an EvolvedState (amplitudes on |s,s-j> x |n-j>) in the full space."""
    d0 = s.twice + 1
    out = np.zeros(d0 * 2**N, dtype=complex)
    for (j, b), amp in state.psi.items():
        if amp == 0.0:
            continue
        central = np.zeros(d0)
        central[j] = 1.0
        out += amp * np.kron(dicke_state(N, b), central)
    return out


# ---------------------------------------------------------------------------
# symmetry checks


def total_sz_values(s, N):
    """Diagonal of the conserved total S^z in the oracle basis."""
    s2 = s.twice
    d0 = s2 + 1
    counts = np.bitwise_count(np.arange(2**N, dtype=np.uint64)).astype(float)
    bath = N / 2.0 - counts
    central = np.array([(s2 - 2 * c) / 2.0 for c in range(d0)])
    return (bath[:, None] + central[None, :]).reshape(-1)


def bath_j2_operator(N):
    """Total bath spin squared J^2 = Jz^2 + (J+J- + J-J+)/2, sparse."""
    jz = sum(_site_op(N, k, _SZ2) for k in range(N))
    jp = sum(_site_op(N, k, _SP2) for k in range(N))
    jm = sum(_site_op(N, k, _SM2) for k in range(N))
    return (jz @ jz + 0.5 * (jp @ jm + jm @ jp)).tocsr()


def commutant_defects(dm):
    """Max |[H, X]| for the conserved X: total S^z, bath J^2, central S0^2."""
    d = total_sz_values(dm.s, dm.N)
    sz_defect = float(np.abs(dm.H * (d[None, :] - d[:, None])).max())
    j2 = sparse.kron(bath_j2_operator(dm.N), sparse.identity(dm.s.twice + 1), format="csr")
    hx = (j2.T @ dm.H.T).T
    xh = j2 @ dm.H
    j2_defect = float(np.abs(hx - xh).max())
    c = float(dm.s) * (float(dm.s) + 1.0)
    s2_defect = float(np.abs(dm.H * c - c * dm.H).max())
    return {"total_sz": sz_defect, "bath_j2": j2_defect, "central_s2": s2_defect}


# ---------------------------------------------------------------------------
# observable time series (verification twin of dynamics.run_timeseries)


def observables_timeseries(dm, theta, t_grid, observables):
    """Observables from brute-force propagation of the coherent initial state."""
    ts = np.asarray(t_grid, dtype=float)
    psi0 = initial_product_state(dm.s, dm.N, theta)
    psi_t = evolve_batch(dm, psi0, ts)
    d0 = dm.s.twice + 1
    psi3 = psi_t.reshape(2**dm.N, d0, len(ts))
    values = {}
    if "norm" in observables:
        values["norm"] = np.sum(np.abs(psi_t) ** 2, axis=0)
    if "loschmidt" in observables:
        values["loschmidt"] = np.abs(psi0 @ psi_t) ** 2
    need_rho = {"entropy", "purity", "sz", "sminus2"} & set(observables)
    if need_rho:
        rho = np.einsum("bct,bdt->tcd", psi3, psi3.conj())
        lam = np.linalg.eigvalsh(rho)
        if "entropy" in observables:
            lam_c = np.clip(lam, 0.0, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = np.where(lam_c > 0.0, lam_c * np.log(lam_c), 0.0)
            values["entropy"] = -np.sum(terms, axis=1)
        if "purity" in observables:
            values["purity"] = np.sum(lam * lam, axis=1)
        if "sz" in observables:
            svals = np.array([(dm.s.twice - 2 * c) / 2.0 for c in range(d0)])
            values["sz"] = np.real(np.einsum("tcc,c->t", rho, svals))
        if "sminus2" in observables:
            sm = np.zeros(len(ts), dtype=complex)
            for j in range(d0 - 1):
                sm += math.sqrt((j + 1) * (d0 - 1 - j)) * rho[:, j, j + 1]
            values["sminus2"] = np.abs(sm) ** 2
    return {k: np.asarray(v, dtype=float) for k, v in values.items()}
