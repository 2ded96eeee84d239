"""Per-sector mode data for exact propagation of |s,s> x |n>.

Repeated application of the Hamiltonian to the product state |s,s> x |n>
stays inside a block of dimension min(2s, n) + 1 spanned by |s,s-j> x |n-j>.
The k-th power coefficients h_j^(k) therefore admit a finite decomposition

    h_j^(k) = sum_l c[j][l] * omega_l**k

with real frequencies omega_l and real residue weights c[j][l].  Two routes
compute them:

* recipe:   expand the generating functions sum_k h_j^(k) z^k as rational
            functions of z. Denominator coefficients come from a tridiagonal
            determinant expansion, numerators from first-row minors, the
            frequencies from the reversed denominator polynomial, and the
            weights from partial-fraction residues.
* spectral: diagonalize the block tridiagonal matrix directly; then
            omega_l are its eigenvalues and c[j][l] = v_l[0] v_l[j] from the
            orthonormal eigenvectors.

The spectral route is the production default (it has no frequency-gap
denominators); the recipe route is kept as an exactly equivalent cross-check
and falls back to spectral when frequencies collide.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .core import HalfInt
from .linalg import Polynomial, SymTridiag, eig_sym_tridiag, poly_roots

DEGENERATE_GAP = 1e-8
IMAG_FREQ_TOL = 1e-8


class ComplexFrequency(Exception):
    """A frequency root came out complex; the underlying block is symmetric,
    so this signals corrupted coefficients rather than physics."""


class DegenerateFrequencies(Exception):
    """Frequency gap too small for partial fractions; use the spectral route."""


@dataclass(frozen=True)
class SectorCoeffs:
    """Tridiagonal coefficients of the block reached from |s,s> x |n>."""

    n: int
    dim: int
    alpha: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class GenFuncPolys:
    """Generating-function data: shared denominator d, per-row numerators."""

    d: np.ndarray       # length dim+1, d[0] = 1
    numers: np.ndarray  # dim x dim, numers[j][0] = delta_{j,0}


@dataclass(frozen=True)
class ModeDecomposition:
    """Frequencies and residue weights for one sector index n."""

    n: int
    omega: np.ndarray
    c: np.ndarray
    method: str
    fallback: bool = False

    @property
    def dim(self):
        return len(self.omega)


def build_sector_coeffs(p, n):
    """Block coefficients for sector n: alpha_j on the diagonal, beta_j off.

    alpha_j = B(s-j) + 2A(s-j)(N/2+j-n) and
    beta_j  = A sqrt((j+1)(2s-j)(n-j)(N+j+1-n)); truncating the dimension to
    min(2s, n)+1 keeps every beta strictly positive inside the block.
    """
    if not 0 <= n <= p.N:
        raise ValueError(f"sector index n={n} outside 0..{p.N}")
    s2 = p.s.twice
    dim = min(s2, n) + 1
    alpha = np.empty(dim)
    for jdx in range(dim):
        # same float expression as sector_spectrum.diag_term, so the
        # cross-module block identity holds exactly
        ms = float(HalfInt(s2 - 2 * jdx))
        mj = float(HalfInt(p.N + 2 * jdx - 2 * n))
        alpha[jdx] = p.B * ms + 2.0 * p.A * ms * mj
    beta = np.empty(max(dim - 1, 0))
    for jdx in range(dim - 1):
        prod = (jdx + 1) * (s2 - jdx) * (n - jdx) * (p.N + jdx + 1 - n)
        beta[jdx] = p.A * math.sqrt(prod)
    return SectorCoeffs(n=n, dim=dim, alpha=alpha, beta=beta)


def _det_poly(alpha, beta):
    """Tridiagonal determinant det(T - w I) as ascending coefficients in w."""
    prev2 = np.array([1.0])
    prev1 = np.array([alpha[0], -1.0])
    for k in range(1, len(alpha)):
        prev1, prev2 = (
            npoly.polysub(npoly.polymul(np.array([alpha[k], -1.0]), prev1), beta[k - 1] ** 2 * prev2),
            prev1,
        )
    return prev1


def det_expansion(coeffs):
    """Denominator coefficients d_0..d_dim of the generating functions.

    Defined by det(M(z)) = (-1)^dim sum_l d_l z^(l-dim) for the tridiagonal
    M(z) with alpha_j - 1/z on the diagonal; d_0 = 1 always.
    """
    p = _det_poly(coeffs.alpha, coeffs.beta)
    return ((-1.0) ** coeffs.dim) * p[::-1]


def minor_expansion(coeffs, j):
    """Numerator coefficients n_0..n_{dim-1} for row j.

    The (1, 1+j) minor of M(z) factors as prod(beta_0..beta_{j-1}) times the
    trailing tridiagonal determinant below row j; n_0 = delta_{j,0}.
    """
    dim = coeffs.dim
    if not 0 <= j <= dim - 1:
        raise ValueError(f"row index {j} outside 0..{dim - 1}")
    pref = float(np.prod(coeffs.beta[:j])) if j > 0 else 1.0
    tail_alpha = coeffs.alpha[j + 1:]
    tail = _det_poly(tail_alpha, coeffs.beta[j + 1:]) if len(tail_alpha) else np.array([1.0])
    m = np.zeros(dim)
    m[: len(tail)] = pref * tail
    return ((-1.0) ** (dim - 1 + j)) * m[::-1]


def gen_func_polys(coeffs):
    numers = np.vstack([minor_expansion(coeffs, j) for j in range(coeffs.dim)])
    return GenFuncPolys(d=det_expansion(coeffs), numers=numers)


def frequencies(d, tol_imag=IMAG_FREQ_TOL):
    """Real roots (ascending) of the frequency polynomial sum_i d_i z^(dim-i)."""
    asc = np.asarray(d, dtype=float)[::-1]
    if len(asc) == 1:
        return np.array([], dtype=float)
    roots = poly_roots(Polynomial(asc))
    scale = max(np.abs(roots).max(), 1.0)
    if np.abs(roots.imag).max() > tol_imag * scale:
        raise ComplexFrequency(f"max |Im omega| = {np.abs(roots.imag).max():.3e}")
    return np.sort(roots.real)


def residues(numers, d, omega):
    """Residue weights c[j][l] from numerators and frequencies.

    c[j][l] = sum_i numers[j][i] omega_l^(dim-1-i) / prod_{i != l}(omega_l - omega_i);
    requires pairwise-distinct frequencies (gap > 1e-8 * scale).
    """
    numers = np.asarray(numers, dtype=float)
    omega = np.asarray(omega, dtype=float)
    dim = len(omega)
    if numers.shape != (dim, dim) or len(d) != dim + 1:
        raise ValueError("inconsistent shapes for numers, d, omega")
    if dim > 1:
        gaps = np.abs(omega[:, None] - omega[None, :]) + np.diag(np.full(dim, np.inf))
        scale = max(np.abs(omega).max(), 1.0)
        if gaps.min() <= DEGENERATE_GAP * scale:
            raise DegenerateFrequencies(f"min frequency gap {gaps.min():.3e}")
    c = np.empty((dim, dim))
    for l in range(dim):
        denom = np.prod(omega[l] - np.delete(omega, l)) if dim > 1 else 1.0
        powers = omega[l] ** np.arange(dim - 1, -1, -1)
        c[:, l] = numers @ powers / denom
    return c


def _decompose_spectral(coeffs):
    tri = SymTridiag(coeffs.alpha, coeffs.beta)
    vals, vecs = eig_sym_tridiag(tri)
    return vals, vecs[0, :][None, :] * vecs


def decompose(p, n, method="spectral"):
    """ModeDecomposition for sector n via the chosen route.

    The recipe route falls back to the spectral one on degenerate frequencies
    and records that in the `fallback` field.
    """
    coeffs = build_sector_coeffs(p, n)
    if method == "spectral":
        omega, c = _decompose_spectral(coeffs)
        return ModeDecomposition(n=n, omega=omega, c=c, method="spectral")
    if method != "recipe":
        raise ValueError(f"unknown method {method!r}")
    if coeffs.dim == 1:
        return ModeDecomposition(n=n, omega=coeffs.alpha.copy(), c=np.array([[1.0]]), method="recipe")
    gf = gen_func_polys(coeffs)
    omega = frequencies(gf.d)
    try:
        c = residues(gf.numers, gf.d, omega)
    except DegenerateFrequencies:
        omega, c = _decompose_spectral(coeffs)
        return ModeDecomposition(n=n, omega=omega, c=c, method="spectral", fallback=True)
    return ModeDecomposition(n=n, omega=omega, c=c, method="recipe")


def decompose_all(p, method="spectral"):
    """Decompositions for every sector n = 0..N, cached once per run."""
    return [decompose(p, n, method=method) for n in range(p.N + 1)]


def hamiltonian_power_coeffs(p, n, kmax):
    """Coefficients h_j^(k) of H^k |s,s> x |n> by direct recurrence.

    Row k of the result holds h^(k); h^(0) = delta_{j,0} and
    h^(k+1)_j = alpha_j h_j + beta_j h_{j+1} + beta_{j-1} h_{j-1}.
    Used as the independent check of the mode decompositions.
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    coeffs = build_sector_coeffs(p, n)
    out = np.zeros((kmax + 1, coeffs.dim))
    out[0, 0] = 1.0
    for k in range(kmax):
        h = out[k]
        nxt = coeffs.alpha * h
        if coeffs.dim > 1:
            nxt[:-1] += coeffs.beta * h[1:]
            nxt[1:] += coeffs.beta * h[:-1]
        out[k + 1] = nxt
    if not np.all(np.isfinite(out)):
        warnings.warn("power coefficients overflowed double precision", RuntimeWarning)
    return out


def power_coeffs_from_modes(dec, kmax):
    """h_j^(k) reconstructed as sum_l c[j][l] omega_l^k for k = 0..kmax."""
    ks = np.arange(kmax + 1)
    powers = dec.omega[None, :] ** ks[:, None]
    return powers @ dec.c.T
