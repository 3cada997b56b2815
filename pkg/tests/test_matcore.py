import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import simpson

from specflow.errors import InvalidOrder, NonUnitary
from specflow.matcore import (
    abs_power,
    check_unitary,
    eig_unitary,
    gamma_constant,
    herm_power,
    principal_log_unitary,
    schatten_norm,
)

from conftest import haar_unitary


def test_check_unitary_rejects_nonunitary():
    with pytest.raises(NonUnitary):
        check_unitary(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(NonUnitary):
        check_unitary(np.ones((2, 3)))


def test_eig_unitary_identity():
    angles, vecs = eig_unitary(np.eye(3))
    assert np.allclose(angles, 0.0)
    assert np.allclose(vecs @ vecs.conj().T, np.eye(3))


def test_eig_unitary_branch_at_minus_one():
    # -1 must be reported at +pi, never -pi
    angles, _ = eig_unitary(np.diag([-1.0, 1.0]))
    assert angles[0] == 0.0
    assert angles[1] == np.pi

    angles, _ = eig_unitary(np.diag([1j, -1j]))
    assert np.allclose(sorted(angles), [-np.pi / 2, np.pi / 2])


def test_eig_unitary_reconstruction(rng):
    U = haar_unitary(6, rng)
    angles, vecs = eig_unitary(U)
    R = (vecs * np.exp(1j * angles)) @ vecs.conj().T
    assert np.linalg.norm(R - U, ord=2) < 1e-12
    assert np.all(np.diff(angles) >= 0)


def test_schatten_norm_anchors():
    assert schatten_norm(np.zeros((3, 3)), 1) == 0.0
    assert abs(schatten_norm(np.diag([3.0, 4.0]), 2) - 5.0) < 1e-14
    P = np.zeros((4, 4))
    P[0, 0] = 1.0
    assert abs(schatten_norm(P, 1) - 1.0) < 1e-14
    assert abs(schatten_norm(np.diag([3.0, 4.0]), np.inf) - 4.0) < 1e-14
    with pytest.raises(InvalidOrder):
        schatten_norm(np.eye(2), 0.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10 ** 6))
def test_schatten_norm_monotone_in_p(dim, seed):
    # (sum s^p)^{1/p} is nonincreasing in p for a fixed singular spectrum
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    ps = [1.0, 1.5, 2.0, 3.0, 7.0, np.inf]
    norms = [schatten_norm(A, p) for p in ps]
    for a, b in zip(norms, norms[1:]):
        assert b <= a + 1e-10


def test_abs_power_anchors():
    assert np.allclose(abs_power(np.zeros((3, 3)), 1.3), 0.0)
    # eigenvalue e^{2 pi i t} of a diagonal unitary: |U - Id|^2 = 4 sin^2(pi t)
    t = 0.3
    U = np.diag([np.exp(2j * np.pi * t), 1.0])
    got = abs_power(U - np.eye(2), 1.0)
    want = np.diag([4.0 * np.sin(np.pi * t) ** 2, 0.0])
    assert np.linalg.norm(got - want) < 1e-12


def test_abs_power_semigroup(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    prod = abs_power(A, 0.4) @ abs_power(A, 0.85)
    assert np.linalg.norm(prod - abs_power(A, 1.25)) < 1e-10


def test_abs_power_integral_representation(rng):
    # independent route: T^x = (sin(pi x)/pi) Int_0^inf l^{-x} (1+lT)^{-1} T dl
    # for 0 < x < 1, evaluated by log-spaced quadrature with wide cutoffs
    # (the low-l tail only decays like l^{1-x}, hence the extreme lower limit)
    x = 0.75
    w = rng.uniform(1e-3, 10.0, size=6)
    V = haar_unitary(6, rng)
    T = (V * w) @ V.conj().T
    A = herm_power(T, 0.5)  # Hermitian PSD with A*A = T

    lam = np.geomspace(1e-36, 1e12, 2001)
    eye = np.eye(6)
    samples = np.stack([
        (lam_i ** -x) * np.linalg.solve(eye + lam_i * T, T) * lam_i
        for lam_i in lam
    ])
    integral = simpson(samples, x=np.log(lam), axis=0)
    oracle = np.sin(np.pi * x) / np.pi * integral
    assert np.linalg.norm(abs_power(A, x) - oracle, ord=2) < 1e-6


def test_principal_log_anchors():
    assert np.allclose(principal_log_unitary(np.eye(4)), 0.0)
    Y = principal_log_unitary(np.diag([-1.0, 1.0]))
    assert np.linalg.norm(Y - np.diag([1j * np.pi, 0.0])) < 1e-12
    # the antidiagonal reflection exponentiates the half-sum projection
    S0 = np.array([[0.0, -1.0], [-1.0, 0.0]])
    Q = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]])
    assert np.linalg.norm(principal_log_unitary(S0) - 1j * np.pi * Q) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10 ** 6))
def test_principal_log_exponentiates_back(dim, seed):
    from scipy.linalg import expm
    rng = np.random.default_rng(seed)
    U = haar_unitary(dim, rng)
    Y = principal_log_unitary(U)
    assert np.linalg.norm(Y + Y.conj().T, ord=2) < 1e-10  # skew-Hermitian
    assert np.linalg.norm(expm(Y) - U, ord=2) < 1e-9
    angles = np.imag(np.linalg.eigvals(Y))
    assert np.all(angles > -np.pi - 1e-12) and np.all(angles <= np.pi + 1e-12)


def test_gamma_constant_anchors():
    assert abs(gamma_constant(0.0) - 1.0 / np.pi) < 1e-14
    assert abs(gamma_constant(1.0) - 2.0 / np.pi) < 1e-14
    assert abs(gamma_constant(1.5) - 0.75) < 1e-14
    with pytest.raises(InvalidOrder):
        gamma_constant(-0.5)


def test_herm_power_clips_rounding_negatives():
    H = np.diag([1.0, -1e-15])
    R = herm_power(H, 0.5)
    assert np.isfinite(R).all()
    assert abs(R[0, 0] - 1.0) < 1e-12
