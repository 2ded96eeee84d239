"""Bethe-ansatz root solving for the central spin model.

Each eigenstate in the magnetization sector m = N/2 + s - M corresponds to a
set of M complex rapidities {v_a} solving coupled rational equations; the
energy then follows from a closed formula in the roots.  Two solution routes
are implemented for the homogeneous model:

* q-polynomial: write q(u) = prod_a (u - v_a).  The equations collapse to a
  polynomial identity P(u) = (a + b u) q(u) with b = -2 s B M fixed by the
  large-u behaviour.  Matching coefficients is linear in q at fixed a, so the
  admissible (a, q) pairs are exactly the eigenpairs of a tridiagonal
  operator on coefficient vectors; these seed a damped-Newton polish of the
  roots.  Random-start Newton on the coefficient system is also run.
* direct Newton on the root equations, from heuristic start points.

The inhomogeneous model is solved by direct Newton only, with one root
seeded per gap between consecutive site parameters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import HalfInt, InhomModelParams, ModelParams, halfint
from .linalg import (
    NonConvergence,
    Polynomial,
    SingularJacobian,
    newton_solve,
    poly_roots,
)

TOL_BETHE = 1e-9
TOL_QPOLY = 1e-8
POLE_TOL = 1e-12
SINGULAR_TOL = 1e-10
DEDUP_TOL = 1e-6
IMAG_ENERGY_TOL = 1e-8


class PoleCollision(Exception):
    """A root sits on (or within 1e-12 of) a pole of the equations."""


class NonRealEnergy(Exception):
    """Energy formula returned a residual imaginary part above threshold."""


class NoSolutionFound(Exception):
    """No start point converged to an acceptable root set."""


class InconsistentDegree(Exception):
    """A candidate q lost its leading coefficient (degree collapse)."""


class SingularCandidate(Exception):
    """Roots hit the singular values 0 or -1/(2sA); quarantined, not accepted."""


class DegenerateEpsilons(UserWarning):
    """Site parameters are not pairwise distinct; completeness claims lapse."""


class SingularRootWarning(UserWarning):
    """A root is within 1e-10 of a singular point of the equations."""


@dataclass(frozen=True)
class BetheState:
    """An accepted root set with its residual norm and derived energy."""

    roots: tuple
    M: int
    params: object
    residual_inf: float
    energy: float


@dataclass(frozen=True)
class QPolyState:
    """Monic q(u) of degree M together with the linear cofactor a + b u."""

    q: Polynomial
    a: float
    b: float


@dataclass
class HomSolveResult:
    """States found for one (params, M) pair plus bookkeeping counters."""

    states: list
    qpoly: list
    expected: int
    singular: int = 0
    rejected: int = 0


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(42 if rng is None else rng)


def magnetization(s, N, M):
    """Total S^z eigenvalue N/2 + s - M of the M-root sector."""
    s = halfint(s)
    if not 0 <= M <= N + s.twice:
        raise ValueError(f"M={M} outside 0..{N + s.twice}")
    return HalfInt(N + s.twice - 2 * M)


def count_solutions(s, N, M):
    """Expected number of root sets with M roots (exact integer arithmetic).

    Alternating binomial sum over k = 0..floor(s); summing over all M gives
    (2s+1) 2^N, one solution per level of the inhomogeneous model.
    """
    s = halfint(s)
    s2 = s.twice
    if not 0 <= M <= N + s2:
        raise ValueError(f"M={M} outside 0..{N + s2}")
    total = 0
    for k in range(s2 // 2 + 1):
        r = M - k
        n_top = N + s2 - 2 * k
        if r < 0 or r > n_top:
            continue
        total += (-1) ** k * math.comb(s2 - k, k) * math.comb(n_top, r)
    return total


# ---------------------------------------------------------------------------
# residuals and energies


def _pair_inverse(v):
    """1/(v_a - v_b) matrix with zero diagonal (complex-safe, no inf tricks)."""
    diff = v[:, None] - v[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return inv


# wandering Newton iterates may graze poles; the damped line search rejects
# the resulting non-finite residuals, so the numpy warnings are pure noise
def _residual_hom_raw(v, p):
    s = float(p.s)
    with np.errstate(all="ignore"):
        out = -2.0 * s * p.B - 2.0 * s / v + 2.0 * np.sum(_pair_inverse(v), axis=1)
        if p.A != 0.0:
            out = out - p.N / (v + 1.0 / (2.0 * s * p.A))
    return out


def _jacobian_hom_raw(v, p):
    s = float(p.s)
    with np.errstate(all="ignore"):
        inv2 = _pair_inverse(v) ** 2
        jac = 2.0 * inv2
        diag = 2.0 * s / v**2 - 2.0 * np.sum(inv2, axis=1)
        if p.A != 0.0:
            diag = diag + p.N / (v + 1.0 / (2.0 * s * p.A)) ** 2
        np.fill_diagonal(jac, diag)
    return jac


def _residual_inhom_raw(v, p):
    s = float(p.s)
    eps = np.asarray(p.eps)
    with np.errstate(all="ignore"):
        site = np.sum(1.0 / (v[:, None] - eps[None, :]), axis=1)
        out = (
            -2.0 * s * p.B
            - 2.0 * s / (v - p.eps0)
            - site
            + 2.0 * np.sum(_pair_inverse(v), axis=1)
        )
    return out


def _jacobian_inhom_raw(v, p):
    s = float(p.s)
    eps = np.asarray(p.eps)
    with np.errstate(all="ignore"):
        inv2 = _pair_inverse(v) ** 2
        jac = 2.0 * inv2
        diag = (
            2.0 * s / (v - p.eps0) ** 2
            + np.sum(1.0 / (v[:, None] - eps[None, :]) ** 2, axis=1)
            - 2.0 * np.sum(inv2, axis=1)
        )
        np.fill_diagonal(jac, diag)
    return jac


def _hom_poles(p):
    poles = [0.0]
    if p.A != 0.0:
        poles.append(-1.0 / (2.0 * float(p.s) * p.A))
    return np.array(poles)


def _check_roots(v, poles, what="root"):
    v = np.asarray(v, dtype=complex)
    if len(v) == 0:
        return v
    if len(poles):
        dist = np.abs(v[:, None] - poles[None, :])
        if dist.min() < POLE_TOL:
            raise PoleCollision(f"{what} within {POLE_TOL:g} of a pole")
    if len(v) > 1:
        gaps = np.abs(v[:, None] - v[None, :]) + np.eye(len(v))
        if gaps.min() <= POLE_TOL:
            raise ValueError("coincident roots")
    return v


def residual_hom(v, p):
    """Residual of the homogeneous root equations; zero at a Bethe state."""
    v = _check_roots(v, _hom_poles(p))
    if len(v) and np.abs(v).min() < SINGULAR_TOL:
        warnings.warn("root within 1e-10 of v=0 (singular candidate)", SingularRootWarning)
    return _residual_hom_raw(v, p) if len(v) else np.array([], dtype=complex)


def residual_inhom(v, p):
    """Residual of the inhomogeneous root equations."""
    v = _check_roots(v, np.array([p.eps0, *p.eps]))
    return _residual_inhom_raw(v, p) if len(v) else np.array([], dtype=complex)


def _real_energy(value, what):
    if abs(value.imag) > IMAG_ENERGY_TOL * max(1.0, abs(value.real)):
        raise NonRealEnergy(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def energy_hom(v, p):
    """E = s(B + N A) + sum_a 1/v_a for a homogeneous root set."""
    s = float(p.s)
    tail = np.sum(1.0 / np.asarray(v, dtype=complex)) if len(v) else 0.0
    return _real_energy(s * (p.B + p.N * p.A) + tail, "homogeneous energy")


def energy_inhom(v, p):
    """E = s B + (1/2) sum_j 1/(eps0 - eps_j) + sum_a 1/(v_a - eps0)."""
    s = float(p.s)
    base = s * p.B + 0.5 * sum(1.0 / (p.eps0 - e) for e in p.eps)
    tail = np.sum(1.0 / (np.asarray(v, dtype=complex) - p.eps0)) if len(v) else 0.0
    return _real_energy(base + tail, "inhomogeneous energy")


# ---------------------------------------------------------------------------
# q-polynomial route (homogeneous model)


def qpoly_operator(p, M):
    """Coefficient-space operator K with K q = a q at admissible (a, q).

    Acting on monomials, u(u+c)q'' - 2sB u(u+c)q' - 2s(u+c)q' - N u q' + 2sBM u q
    is tridiagonal in degree: K[k+1,k] = 2sB(M-k), K[k,k] = k(k-1) - k(2sBc+2s+N),
    K[k-1,k] = c k (k-1-2s), with c = 1/(2sA).
    """
    if p.A == 0.0:
        raise ValueError("q-polynomial route requires A != 0")
    s = float(p.s)
    c = 1.0 / (2.0 * s * p.A)
    K = np.zeros((M + 1, M + 1))
    for k in range(M + 1):
        K[k, k] = k * (k - 1) - k * (2.0 * s * p.B * c + 2.0 * s + p.N)
        if k + 1 <= M:
            K[k + 1, k] = 2.0 * s * p.B * (M - k)
        if k >= 1:
            K[k - 1, k] = c * k * (k - 1 - 2.0 * s)
    return K


def build_cofactor_poly(qcoeffs, p):
    """P(u) = u(u+c)q'' - 2sB u(u+c)q' - 2s(u+c)q' - N u q' (ascending coeffs)."""
    s = float(p.s)
    c = 1.0 / (2.0 * s * p.A)
    q1 = np.polynomial.polynomial.polyder(qcoeffs)
    q2 = np.polynomial.polynomial.polyder(q1)
    u_uc = np.array([0.0, c, 1.0])
    terms = [
        np.polynomial.polynomial.polymul(u_uc, q2),
        -2.0 * s * p.B * np.polynomial.polynomial.polymul(u_uc, q1),
        -2.0 * s * np.polynomial.polynomial.polymul(np.array([c, 1.0]), q1),
        -p.N * np.polynomial.polynomial.polymul(np.array([0.0, 1.0]), q1),
    ]
    out = np.zeros(len(qcoeffs) + 1)
    for t in terms:
        out[: len(t)] += t
    return out


def qpoly_defect(qp, p):
    """Scale-normalized max coefficient of P(u) - (a + b u) q(u)."""
    q = qp.q.coeffs
    P = build_cofactor_poly(q, p)
    rhs = np.polynomial.polynomial.polymul(np.array([qp.a, qp.b]), q)
    diff = P.copy()
    diff[: len(rhs)] -= rhs
    scale = max(1.0, np.abs(P).max(), np.abs(rhs).max())
    return float(np.abs(diff).max() / scale)


def _coeff_system(p, M):
    K = qpoly_operator(p, M)

    def residual(x):
        q = np.append(x[:M], 1.0)
        return K @ q - x[M] * q

    def jacobian(x):
        q = np.append(x[:M], 1.0)
        jac = np.empty((M + 1, M + 1))
        jac[:, :M] = K[:, :M]
        jac[np.arange(M), np.arange(M)] -= x[M]
        jac[:, M] = -q
        return jac

    return residual, jacobian


def _eigen_candidates(p, M):
    """All (a, monic q) pairs with nonzero leading coefficient.

    K is block lower-triangular because the superdiagonal vanishes at degree
    2s+1; candidates with q of full degree come from the upper block, the
    lower block only produces q divisible by u^(2s+1) (singular sets).
    """
    K = qpoly_operator(p, M)
    d1 = min(M, p.s.twice) + 1
    vals, vecs = np.linalg.eig(K[:d1, :d1])
    cands = []
    for i in np.argsort(vals.real):
        a = vals[i]
        if abs(a.imag) > 1e-10 * (1.0 + abs(a)):
            continue
        a = float(a.real)
        x1 = np.real(vecs[:, i])
        if np.abs(x1).max() == 0.0:
            continue
        if M + 1 > d1:
            sub = K[d1:, d1:]
            n2 = M + 1 - d1
            rhs = np.zeros(n2)
            rhs[0] = -K[d1, d1 - 1] * x1[-1]
            ab = np.zeros((3, n2))
            if n2 > 1:
                ab[0, 1:] = np.diag(sub, 1)
                ab[2, :-1] = np.diag(sub, -1)
            ab[1, :] = np.diag(sub) - a
            try:
                x2 = scipy.linalg.solve_banded((1, 1), ab, rhs)
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                continue
            q = np.concatenate([x1, x2])
        else:
            q = x1
        if not np.all(np.isfinite(q)) or q[M] == 0.0:
            continue
        cands.append((a, q / q[M]))
    return cands


def _random_candidates(p, M, starts, rng, tol):
    residual, jacobian = _coeff_system(p, M)
    cands = []
    for _ in range(starts):
        x0 = rng.uniform(-2.0, 2.0, M + 1)
        try:
            x = newton_solve(residual, jacobian, x0, tol=tol)
        except (NonConvergence, SingularJacobian):
            continue
        cands.append((float(x[M]), np.append(x[:M], 1.0)))
    return cands


def _dedup_candidates(cands):
    kept = []
    for a, q in cands:
        vec = np.append(q, a)
        dup = False
        for a2, q2 in kept:
            vec2 = np.append(q2, a2)
            scale = max(1.0, np.abs(vec).max(), np.abs(vec2).max())
            if np.abs(vec - vec2).max() <= DEDUP_TOL * scale:
                dup = True
                break
        if not dup:
            kept.append((a, q))
    return kept


def _roots_close(u, v, tol):
    if len(u) != len(v):
        return False
    if len(u) == 0:
        return True
    pool = list(v)
    for z in u:
        dist = [abs(z - w) for w in pool]
        k = int(np.argmin(dist))
        if dist[k] > tol:
            return False
        pool.pop(k)
    return True


def _polish_roots(v0, p, rng, tol, residual_raw, jacobian_raw, retries=8):
    """Damped-Newton polish on the root equations, with jittered retries."""
    best, best_norm = None, np.inf

    def attempt(seed):
        nonlocal best, best_norm
        try:
            v = newton_solve(residual_raw, jacobian_raw, seed, tol=tol)
            norm = np.abs(residual_raw(v)).max()
        except (NonConvergence, SingularJacobian) as exc:
            if isinstance(exc, NonConvergence) and exc.norm < best_norm:
                best, best_norm = exc.best, exc.norm
            return False
        if norm < best_norm:
            best, best_norm = v, norm
        return norm <= tol

    if attempt(v0):
        return best, best_norm
    scale = max(1.0, np.abs(v0).max())
    for _ in range(retries):
        jit = rng.standard_normal(len(v0)) + 1j * rng.standard_normal(len(v0))
        if attempt(v0 + 0.02 * scale * jit):
            return best, best_norm
    if best is None or best_norm > tol:
        raise NonConvergence(best if best is not None else v0, best_norm, retries)
    return best, best_norm


def _qpoly_touches_pole(qcoeffs, poles):
    """Whether q vanishes at a pole, by backward error of the evaluation.

    A root sitting exactly on a pole can carry multiplicity, in which case
    the extracted roots scatter by the multiplicity-th root of the rounding
    error; evaluating q at the pole detects the case robustly.
    """
    q = np.asarray(qcoeffs, dtype=float)
    if q[0] == 0.0:
        return True  # u = 0 divides q exactly
    for z0 in poles:
        val = abs(np.polynomial.polynomial.polyval(z0, q))
        scale = np.polynomial.polynomial.polyval(abs(z0), np.abs(q))
        if val <= 1e-8 * scale:
            return True
    return False


def qpoly_to_bethe(qp, p, rng=None, tol=TOL_BETHE):
    """Extract, polish and validate the root set of a QPolyState.

    Raises SingularCandidate for root sets touching 0 or -1/(2sA),
    NonConvergence when the polish cannot reach `tol`, NonRealEnergy when the
    energy fails the realness check.
    """
    rng = _as_rng(rng)
    M = qp.q.degree
    if M == 0:
        return BetheState(roots=(), M=0, params=p, residual_inf=0.0, energy=energy_hom([], p))
    if qp.q.coeffs[-1] == 0.0:
        raise InconsistentDegree("leading coefficient of q vanished")
    poles = _hom_poles(p)
    if _qpoly_touches_pole(qp.q.coeffs, poles):
        raise SingularCandidate("q vanishes at a singular point")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # Bethe polish supersedes polynomial accuracy
        raw = poly_roots(qp.q)
    if np.abs(raw).min() < SINGULAR_TOL or (
        p.A != 0.0 and np.abs(raw - poles[1]).min() < SINGULAR_TOL
    ):
        raise SingularCandidate("root set touches a singular point")
    v, norm = _polish_roots(
        raw.astype(complex),
        p,
        rng,
        tol,
        lambda x: _residual_hom_raw(x, p),
        lambda x: _jacobian_hom_raw(x, p),
    )
    _check_roots(v, poles)
    if np.abs(v).min() < SINGULAR_TOL:
        raise SingularCandidate("polished roots touch a singular point")
    energy = energy_hom(v, p)
    roots = tuple(sorted(map(complex, v), key=lambda z: (z.real, z.imag)))
    return BetheState(roots=roots, M=M, params=p, residual_inf=float(norm), energy=energy)


def _solve_hom_impl(p, M, starts, rng, tol):
    s2 = p.s.twice
    if not 0 <= M <= p.N + s2:
        raise ValueError(f"M={M} outside 0..{p.N + s2}")
    rng = _as_rng(rng)
    b = -2.0 * float(p.s) * p.B * M
    if M == 0:
        qp = QPolyState(q=Polynomial([1.0]), a=0.0, b=0.0)
        return HomSolveResult(
            states=[qpoly_to_bethe(qp, p, rng, tol)],
            qpoly=[qp],
            expected=count_solutions(p.s, p.N, 0),
        )
    cands = _eigen_candidates(p, M)
    if starts > 0:
        cands.extend(_random_candidates(p, M, starts, rng, tol))
    result = HomSolveResult(states=[], qpoly=[], expected=count_solutions(p.s, p.N, M))
    for a, q in _dedup_candidates(cands):
        qp = QPolyState(q=Polynomial(q), a=a, b=b)
        if qpoly_defect(qp, p) > TOL_QPOLY:
            result.rejected += 1
            continue
        try:
            state = qpoly_to_bethe(qp, p, rng, tol)
        except SingularCandidate:
            result.singular += 1
            continue
        except (NonConvergence, NonRealEnergy, PoleCollision, InconsistentDegree, ValueError):
            result.rejected += 1
            continue
        if any(_roots_close(state.roots, sdone.roots, DEDUP_TOL) for sdone in result.states):
            result.rejected += 1
            continue
        result.states.append(state)
        result.qpoly.append(qp)
    return result


def solve_hom(p, M, starts=200, rng=None, tol=TOL_BETHE):
    """All homogeneous Bethe states found for root count M, with statistics."""
    result = _solve_hom_impl(p, M, starts, rng, tol)
    if not result.states:
        raise NoSolutionFound(f"no Bethe state found for M={M}")
    return result


def solve_hom_qpoly(p, M, starts=200, rng=None, tol=TOL_BETHE):
    """Validated QPolyStates for the homogeneous model (see solve_hom)."""
    return solve_hom(p, M, starts=starts, rng=rng, tol=tol).qpoly


def solve_hom_newton(p, M, starts=200, rng=None, tol=TOL_BETHE):
    """Direct damped Newton on the homogeneous root equations.

    Start points are drawn from a complex box scaled to the pole geometry.
    Independent of the q-polynomial route; used to cross-check it.
    """
    if not 0 <= M <= p.N + p.s.twice:
        raise ValueError(f"M={M} outside range")
    rng = _as_rng(rng)
    if M == 0:
        return [BetheState(roots=(), M=0, params=p, residual_inf=0.0, energy=energy_hom([], p))]
    scale = max(1.0, *np.abs(_hom_poles(p)))
    states = []
    for _ in range(starts):
        seed = scale * (
            rng.uniform(-4.0, 4.0, M) + 1j * rng.uniform(-2.0, 2.0, M)
        )
        try:
            v = newton_solve(
                lambda x: _residual_hom_raw(x, p),
                lambda x: _jacobian_hom_raw(x, p),
                seed,
                tol=tol,
            )
        except (NonConvergence, SingularJacobian):
            continue
        try:
            _check_roots(v, _hom_poles(p))
            if np.abs(v).min() < SINGULAR_TOL:
                continue
            energy = energy_hom(v, p)
        except (PoleCollision, NonRealEnergy, ValueError):
            continue
        roots = tuple(sorted(map(complex, v), key=lambda z: (z.real, z.imag)))
        if any(_roots_close(roots, s.roots, DEDUP_TOL) for s in states):
            continue
        states.append(
            BetheState(
                roots=roots,
                M=M,
                params=p,
                residual_inf=float(np.abs(_residual_hom_raw(np.array(roots), p)).max()),
                energy=energy,
            )
        )
    if not states:
        raise NoSolutionFound(f"no direct-Newton state found for M={M}")
    return states


def solve_inhom_newton(p, M, starts=200, rng=None, tol=TOL_BETHE):
    """Bethe states of the inhomogeneous model by direct damped Newton.

    One root is seeded per gap between consecutive site parameters (plus two
    outer slots), with complex jitter so conjugate pairs can form.
    """
    s2 = p.s.twice
    if not 0 <= M <= p.N + s2:
        raise ValueError(f"M={M} outside 0..{p.N + s2}")
    rng = _as_rng(rng)
    if not p.epsilons_distinct:
        warnings.warn("site parameters are degenerate", DegenerateEpsilons)
    if M == 0:
        return [BetheState(roots=(), M=0, params=p, residual_inf=0.0, energy=energy_inhom([], p))]
    poles = np.sort(np.unique(np.array([p.eps0, *p.eps])))
    span = max(poles[-1] - poles[0], 1.0)
    centers = []
    widths = []
    for lo, hi in zip(poles[:-1], poles[1:]):
        centers.append(0.5 * (lo + hi))
        widths.append(hi - lo if hi > lo else span / max(p.N, 1))
    centers = [poles[0] - 0.5 * span, *centers, poles[-1] + 0.5 * span]
    widths = [span, *widths, span]
    centers = np.array(centers)
    widths = np.array(widths)
    states = []
    for _ in range(starts):
        replace = M > len(centers)
        slots = rng.choice(len(centers), size=M, replace=replace)
        seed = (
            centers[slots]
            + 0.4 * widths[slots] * rng.uniform(-1.0, 1.0, M)
            + 0.3j * widths[slots] * rng.uniform(-1.0, 1.0, M)
        )
        try:
            v = newton_solve(
                lambda x: _residual_inhom_raw(x, p),
                lambda x: _jacobian_inhom_raw(x, p),
                seed,
                tol=tol,
            )
        except (NonConvergence, SingularJacobian):
            continue
        try:
            _check_roots(v, np.array([p.eps0, *p.eps]))
            energy = energy_inhom(v, p)
        except (PoleCollision, NonRealEnergy, ValueError):
            continue
        roots = tuple(sorted(map(complex, v), key=lambda z: (z.real, z.imag)))
        if any(_roots_close(roots, s.roots, DEDUP_TOL) for s in states):
            continue
        states.append(
            BetheState(
                roots=roots,
                M=M,
                params=p,
                residual_inf=float(np.abs(_residual_inhom_raw(np.array(roots), p)).max()),
                energy=energy,
            )
        )
    if not states:
        raise NoSolutionFound(f"no inhomogeneous state found for M={M}")
    return states
