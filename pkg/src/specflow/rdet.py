"""Fredholm determinants, higher-order regularized determinants, and their
log-derivatives along unitary paths.

For a unitary U = Id + A the plain determinant Det(Id + A) is the product of
the eigenvalues of U.  The order-p determinant multiplies in the exponential
counterterm exp(sum_{l=1}^{p-1} ((-1)^l / l) (U - Id)^l), which cancels the
first p-1 terms of the log expansion and keeps the product convergent for
p-summable perturbations; at finite dimension the counterterm is what makes
the p-determinant's winding match the order-(p-1) regularized winding
integrals.  All logs use the principal branch (imaginary part in (-pi, pi]).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrder, OutsideInterval
from .matcore import check_unitary, eig_unitary


@dataclass
class DetValue:
    value: complex
    log_value: complex  # principal branch: Im in (-pi, pi]
    conditioning: float  # smallest |eigenvalue| of the determinant argument

    def __complex__(self):
        return complex(self.value)


def _pack(factors):
    """DetValue from the multiset of eigenvalues whose product is the det."""
    factors = np.asarray(factors, dtype=complex)
    value = complex(np.prod(factors)) if len(factors) else 1.0 + 0j
    mag = abs(value)
    log_value = complex(np.log(mag), np.angle(value)) if mag > 0 else complex(
        -np.inf, 0.0)
    cond = float(np.min(np.abs(factors))) if len(factors) else 1.0
    return DetValue(value=complex(value), log_value=log_value, conditioning=cond)


def fredholm_det(A):
    """Det(Id + A) as the product of (1 + eigenvalues of A)."""
    A = np.asarray(A, dtype=complex)
    lam = np.linalg.eigvals(A)
    return _pack(1.0 + lam)


def det_p_perturbation(A, p):
    """Det_p(Id + A) for an arbitrary (not necessarily normal) matrix A.

    Det_p(Id + A) = prod_i (1 + lam_i) exp(sum_{l=1}^{p-1} (-1)^l lam_i^l / l)
    over the eigenvalues lam_i of A; p = 1 recovers the plain Fredholm
    determinant.  This is the form used for discretized integral operators,
    where A is a quadrature matrix rather than a unitary defect.
    """
    if p != int(p) or p < 1:
        raise InvalidOrder(f"p must be a positive integer, got {p}")
    p = int(p)
    A = np.asarray(A, dtype=complex)
    lam = np.linalg.eigvals(A)
    w = np.zeros_like(lam)
    for ell in range(1, p):
        w = w + (-1) ** ell / ell * lam ** ell
    return _pack((1.0 + lam) * np.exp(w))


def counterterm_exponent(U, p):
    """sum_{l=1}^{p-1} ((-1)^l / l) Tr((U - Id)^l)."""
    U = np.asarray(U, dtype=complex)
    if p != int(p) or p < 1:
        raise InvalidOrder(f"p must be a positive integer, got {p}")
    p = int(p)
    eye = np.eye(U.shape[0])
    B = U - eye
    total = 0.0 + 0j
    M = np.eye(U.shape[0], dtype=complex)
    for ell in range(1, p):
        M = M @ B
        total += (-1) ** ell / ell * np.trace(M)
    return total


def det_p(U, p):
    """The order-p regularized determinant of a unitary U.

    Det_p(U) = Det(U exp(sum_{l=1}^{p-1} ((-1)^l / l)(U - Id)^l)).  Since the
    counterterm is a function of U itself, both factors diagonalize together
    and the determinant is a product over eigenangles.
    """
    U = check_unitary(U)
    if p != int(p) or p < 1:
        raise InvalidOrder(f"p must be a positive integer, got {p}")
    p = int(p)
    angles, _ = eig_unitary(U)
    z = np.exp(1j * angles)
    w = np.zeros_like(z)
    for ell in range(1, p):
        w = w + (-1) ** ell / ell * (z - 1.0) ** ell
    return _pack(z * np.exp(w))


def logderiv_det_p(path, t, p):
    """d/dt Log Det_p(U_t) evaluated through the trace identity.

    Equals Tr(U* U' (Id - U)^{p-1}); for p = 1 this is the classical winding
    integrand Tr(U* U').
    """
    if p != int(p) or p < 1:
        raise InvalidOrder(f"p must be a positive integer, got {p}")
    a, b = path.interval
    if not (a <= t <= b):
        raise OutsideInterval(f"parameter {t} outside {path.interval}")
    p = int(p)
    U = path(t)
    Ud = path.derivative(t)
    eye = np.eye(U.shape[0])
    return complex(np.trace(U.conj().T @ Ud
                            @ np.linalg.matrix_power(eye - U, p - 1)))


def logdet_p_vs_logdet(path, t, p):
    """Both sides of the relation between the Det_p and Det log-derivatives.

    Returns (lhs, rhs) with
      lhs = d/dt Log Det_p(U_t)  (trace identity),
      rhs = d/dt Log Det(U_t) + d/dt [counterterm exponent]
          = Tr(U* U') + sum_{l=1}^{p-1} (-1)^l Tr(U' (U - Id)^{l-1}).
    The caller asserts lhs == rhs.
    """
    lhs = logderiv_det_p(path, t, p)
    p = int(p)
    U = path(t)
    Ud = path.derivative(t)
    eye = np.eye(U.shape[0])
    rhs = complex(np.trace(U.conj().T @ Ud))
    B = U - eye
    M = np.eye(U.shape[0], dtype=complex)
    for ell in range(1, p):
        rhs += (-1) ** ell * complex(np.trace(Ud @ M))
        M = M @ B
    return lhs, rhs


def unwind_log(values):
    """Continuity-unwound logarithms of a sequence of nonzero complex values.

    The first entry uses the principal branch; each subsequent imaginary part
    is shifted by the multiple of 2 pi that makes the sequence continuous.
    Accepts complex values or DetValue instances.
    """
    out = []
    prev = None
    for v in values:
        z = complex(v)
        lg = complex(np.log(abs(z)), np.angle(z))
        if prev is not None:
            k = np.round((prev.imag - lg.imag) / (2.0 * np.pi))
            lg = complex(lg.real, lg.imag + 2.0 * np.pi * k)
        out.append(lg)
        prev = lg
    return out
