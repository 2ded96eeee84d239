"""Shared numerical kernels: symmetric tridiagonal eigensolves, polynomial
root extraction through a balanced companion matrix, and a damped Newton
iterator used by the Bethe solvers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

TOL_EIG = 1e-12
TOL_ROOT = 1e-10
TOL_NEWTON = 1e-10


class NonConvergence(Exception):
    """Newton iteration stalled; carries the best iterate seen and its norm."""

    def __init__(self, best, norm, iterations):
        super().__init__(f"no convergence after {iterations} iterations (residual {norm:.3e})")
        self.best = best
        self.norm = norm
        self.iterations = iterations


class SingularJacobian(Exception):
    """Jacobian solve failed; the caller should try a different start point."""


class IllConditionedPolynomial(RuntimeWarning):
    """Root polish could not reach the requested backward error."""


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=float))
        if self.diag.ndim != 1 or self.offdiag.ndim != 1:
            raise ValueError("diag and offdiag must be one-dimensional")
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag length must be len(diag) - 1")

    @property
    def n(self):
        return len(self.diag)

    def dense(self):
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in ascending degree order."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ValueError("coeffs must be a nonempty 1-d sequence")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def derivative(self):
        return Polynomial(np.polynomial.polynomial.polyder(self.coeffs))


def eig_sym_tridiag(t, tol=TOL_EIG):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a SymTridiag.

    Eigenvector signs are fixed by making the largest-magnitude component
    positive, so output is deterministic across LAPACK builds.
    """
    if not (np.all(np.isfinite(t.diag)) and np.all(np.isfinite(t.offdiag))):
        raise ValueError("non-finite entries in tridiagonal matrix")
    if t.n == 1:
        return t.diag.copy(), np.array([[1.0]])
    values, vectors = scipy.linalg.eigh_tridiagonal(t.diag, t.offdiag)
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(t.n)])
    signs[signs == 0] = 1.0
    return values, vectors * signs[None, :]


def _strip_poly(coeffs):
    """Drop leading zeros (high degree) and count exact zero roots (low degree)."""
    c = np.asarray(coeffs)
    top = len(c) - 1
    while top > 0 and c[top] == 0.0:
        top -= 1
    c = c[: top + 1]
    k0 = 0
    while k0 < len(c) - 1 and c[k0] == 0.0:
        k0 += 1
    return c[k0:], k0


def poly_roots(p, tol=TOL_ROOT):
    """All complex roots (with multiplicity) of a Polynomial.

    Route: rescale by the geometric-mean root radius so coefficients that
    span many orders of magnitude stay representable, take eigenvalues of
    the (LAPACK-balanced) companion matrix, then apply one Newton step per
    root.  Roots are returned sorted by (real, imag).  A backward error
    above `tol` on any root triggers an IllConditionedPolynomial warning.
    """
    coeffs = p.coeffs if isinstance(p, Polynomial) else np.asarray(p, dtype=float)
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("non-finite polynomial coefficients")
    work, nzero = _strip_poly(coeffs)
    if len(work) - 1 + nzero < 1 or (len(work) == 1 and nzero == 0):
        raise ValueError("degree must be >= 1 with nonzero leading coefficient")
    roots = [0.0 + 0.0j] * nzero
    if len(work) > 1:
        monic = work / work[-1]
        deg = len(monic) - 1
        sigma = abs(monic[0]) ** (1.0 / deg)
        if not np.isfinite(sigma) or sigma == 0.0:
            sigma = 1.0
        scaled = monic * sigma ** (np.arange(deg + 1.0) - deg)
        raw = np.roots(scaled[::-1])
        dscaled = np.polynomial.polynomial.polyder(scaled)
        val = np.polynomial.polynomial.polyval(raw, scaled)
        der = np.polynomial.polynomial.polyval(raw, dscaled)
        step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1.0, der), 0.0)
        raw = raw - step
        roots.extend(raw * sigma)
    roots = np.array(sorted(roots, key=lambda z: (z.real, z.imag)), dtype=complex)

    # backward error |p(r)| / sum_k |c_k||r|^k, scale-invariant
    pv = np.abs(np.polynomial.polynomial.polyval(roots, coeffs))
    denom = np.polynomial.polynomial.polyval(np.abs(roots), np.abs(coeffs))
    bad = pv > tol * np.maximum(denom, np.finfo(float).tiny)
    if np.any(bad):
        warnings.warn(
            f"{int(np.sum(bad))} root(s) exceed backward-error tolerance {tol:g}",
            IllConditionedPolynomial,
        )
    return roots


def newton_solve(residual, jacobian, x0, tol=TOL_NEWTON, max_iter=200, max_halvings=40):
    """Damped Newton iteration for a square nonlinear system.

    Each step is halved (at most `max_halvings` times) until the residual
    2-norm decreases; convergence is declared when the residual inf-norm
    drops to `tol`.  Works on real or complex vectors; the residual and
    jacobian callables must be mutually consistent.

    Raises NonConvergence (carrying the best iterate) when stalled or out of
    iterations, SingularJacobian when the linear solve fails.
    """
    x = np.atleast_1d(np.asarray(x0)).astype(complex if np.iscomplexobj(x0) else float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite start point")

    def norms(vec):
        a = np.abs(vec)
        return a.max(), float(np.sum(a * a))

    r = np.atleast_1d(residual(x))
    rinf, r2 = norms(r)
    best, best_inf = x.copy(), rinf
    for it in range(max_iter):
        if rinf <= tol:
            return x
        jac = np.atleast_2d(jacobian(x))
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("non-finite Newton step")
        lam = 1.0
        for _ in range(max_halvings + 1):
            x_new = x - lam * step
            r_new = np.atleast_1d(residual(x_new))
            new_inf, new_2 = norms(r_new)
            if np.isfinite(new_2) and new_2 < r2:
                break
            lam *= 0.5
        else:
            raise NonConvergence(best, best_inf, it)
        x, r, rinf, r2 = x_new, r_new, new_inf, new_2
        if rinf < best_inf:
            best, best_inf = x.copy(), rinf
    if best_inf <= tol:
        return best
    raise NonConvergence(best, best_inf, max_iter)
