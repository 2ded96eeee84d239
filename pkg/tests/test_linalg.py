import numpy as np
import pytest

from centralspin.linalg import (
    IllConditionedPolynomial,
    NonConvergence,
    Polynomial,
    SingularJacobian,
    SymTridiag,
    eig_sym_tridiag,
    newton_solve,
    poly_roots,
)


def test_eig_trivial_cases():
    vals, vecs = eig_sym_tridiag(SymTridiag([3.5], []))
    assert vals[0] == 3.5 and vecs[0, 0] == 1.0
    vals, vecs = eig_sym_tridiag(SymTridiag([0.0, 0.0], [1.0]))
    assert np.allclose(vals, [-1.0, 1.0])
    assert np.allclose(vecs.T @ vecs, np.eye(2), atol=1e-14)


def test_eig_matches_dense():
    t = SymTridiag([2.0, 1.0, 0.0], [1.0, 1.0])
    vals, vecs = eig_sym_tridiag(t)
    ref = np.linalg.eigvalsh(t.dense())
    assert np.allclose(vals, ref, atol=1e-12)
    assert np.allclose(t.dense() @ vecs, vecs * vals[None, :], atol=1e-12)


def test_eig_reconstruction_random():
    rng = np.random.default_rng(7)
    for _ in range(5):
        t = SymTridiag(rng.standard_normal(50), rng.standard_normal(49))
        vals, vecs = eig_sym_tridiag(t)
        dense = t.dense()
        err = np.abs(dense - (vecs * vals[None, :]) @ vecs.T).max()
        assert err <= 10 * 1e-12 * np.abs(dense).max()
        assert np.abs(vecs.T @ vecs - np.eye(50)).max() < 1e-12
        assert np.all(np.diff(vals) >= 0)


def test_eig_sign_convention_deterministic():
    t = SymTridiag([0.3, -0.2, 0.9, 0.0], [0.5, -0.1, 0.7])
    _, v1 = eig_sym_tridiag(t)
    _, v2 = eig_sym_tridiag(t)
    assert np.array_equal(v1, v2)
    lead = np.argmax(np.abs(v1), axis=0)
    assert np.all(v1[lead, np.arange(4)] > 0)


def test_eig_rejects_nonfinite():
    with pytest.raises(ValueError):
        eig_sym_tridiag(SymTridiag([np.nan, 0.0], [1.0]))


def test_poly_roots_simple():
    assert np.allclose(poly_roots(Polynomial([-1.0, 0.0, 1.0])), [-1.0, 1.0])
    roots = poly_roots(Polynomial([1.0, 0.0, 1.0]))
    assert np.allclose(roots, [-1.0j, 1.0j])


def test_poly_roots_table1_cubic_roundtrip():
    target = np.array([-0.351465 + 0.262932j, -0.351465 - 0.262932j, -2.71954])
    coeffs = np.real(np.polynomial.polynomial.polyfromroots(target))
    roots = poly_roots(Polynomial(coeffs))
    assert np.allclose(sorted(roots, key=lambda z: (z.real, z.imag)),
                       sorted(target, key=lambda z: (z.real, z.imag)), atol=1e-8)


def test_poly_roots_reconstruction_random():
    rng = np.random.default_rng(3)
    for deg in range(2, 13):
        roots = rng.uniform(-3, 3, deg) + 1j * rng.uniform(-3, 3, deg)
        # enforce separation, then make conjugate-closed so coeffs are real
        roots = roots[np.argsort(roots.real)]
        roots += np.arange(deg) * 0.5
        roots = np.concatenate([roots, roots.conj()])
        coeffs = np.real(np.polynomial.polynomial.polyfromroots(roots))
        found = poly_roots(Polynomial(coeffs))
        rebuilt = np.real(np.polynomial.polynomial.polyfromroots(found))
        scale = np.abs(coeffs).max()
        assert np.abs(rebuilt - coeffs).max() < 1e-8 * scale


def test_poly_roots_conjugate_pairing():
    rng = np.random.default_rng(11)
    for _ in range(10):
        coeffs = rng.standard_normal(9)
        coeffs[-1] = coeffs[-1] or 1.0
        roots = poly_roots(Polynomial(coeffs))
        complex_roots = roots[np.abs(roots.imag) > 1e-9]
        paired = sorted(complex_roots, key=lambda z: (z.real, abs(z.imag), z.imag))
        for a, b in zip(paired[::2], paired[1::2]):
            assert abs(a - np.conj(b)) < 1e-9 * max(1.0, abs(a))


def test_poly_roots_zero_roots_and_degree_errors():
    roots = poly_roots(Polynomial([0.0, 0.0, -1.0, 1.0]))  # u^2 (u - 1)
    assert np.allclose(sorted(roots, key=lambda z: z.real), [0, 0, 1], atol=1e-9)
    with pytest.raises(ValueError):
        poly_roots(Polynomial([1.0]))
    with pytest.raises(ValueError):
        poly_roots(Polynomial([1.0, np.inf]))


def test_poly_roots_warns_when_polish_misses_tolerance():
    # irrational roots leave a nonzero backward error, so tol=0 must warn
    with pytest.warns(IllConditionedPolynomial):
        poly_roots(Polynomial([-2.0, 0.0, 1.0]), tol=0.0)


def test_newton_scalar_cases():
    x = newton_solve(lambda x: x**2 - 4.0, lambda x: np.array([[2.0 * x[0]]]), np.array([3.0]))
    assert abs(x[0] - 2.0) < 1e-10
    x = newton_solve(lambda x: x, lambda x: np.eye(1), np.array([5.0]))
    assert abs(x[0]) < 1e-10


def test_newton_bethe_single_root():
    # homogeneous one-root equation at s=1, N=2, A=B=0.5
    def residual(v):
        return -1.0 - 2.0 / v - 2.0 / (v + 1.0)

    def jacobian(v):
        return np.array([[2.0 / v[0] ** 2 + 2.0 / (v[0] + 1.0) ** 2]])

    x = newton_solve(residual, jacobian, np.array([-0.5 + 0.0j]))
    assert abs(x[0] - (-0.438447)) < 1e-5


def test_newton_nonconvergence_carries_best():
    # cube-root residual: full Newton steps overshoot, damping only halves x,
    # so five iterations cannot reach tolerance from x0 = 1
    with pytest.raises(NonConvergence) as err:
        newton_solve(
            lambda x: np.cbrt(x),
            lambda x: np.array([[1.0 / (3.0 * np.cbrt(x[0]) ** 2)]]),
            np.array([1.0]),
            max_iter=5,
        )
    assert err.value.best is not None
    assert np.isfinite(err.value.norm)
    assert err.value.norm < 1.0


def test_newton_singular_jacobian():
    with pytest.raises(SingularJacobian):
        newton_solve(lambda x: x - 1.0, lambda x: np.zeros((1, 1)), np.array([0.0]))
