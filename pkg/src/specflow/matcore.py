"""Dense matrix kernels shared by the spectral-flow engines.

Conventions fixed here once and for all:

* Eigenvalue branch.  Angles of unitary eigenvalues live in (-pi, pi], so the
  crossing point -1 is always represented by the angle +pi.  This is the
  matrix version of the principal logarithm Log(r e^{it}) = ln r + it with
  -pi < t <= pi.  Eigenvalues that sit on the cut within `snap_tol` are
  snapped to +pi rather than being allowed to flip to -pi through rounding.
* Unitarity is checked in operator norm with tolerance 1e-10 by default.
"""

import numpy as np
from scipy.linalg import schur
from scipy.special import gammaln

from .errors import InvalidOrder, NonUnitary

UNITARY_TOL = 1e-10


def check_unitary(U, tol=UNITARY_TOL):
    """Return U as a complex ndarray, raising NonUnitary if U*U != Id.

    The defect is measured in operator norm; `tol` defaults to 1e-10.
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NonUnitary(f"expected a square matrix, got shape {U.shape}")
    defect = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), ord=2)
    if defect > tol:
        raise NonUnitary(f"unitarity defect {defect:.3e} exceeds tol {tol:.1e}")
    return U


def eig_unitary(U, tol=UNITARY_TOL, snap_tol=1e-12):
    """Eigen-decompose a unitary matrix into angles and orthonormal vectors.

    Returns (angles, vectors) with angles in (-pi, pi] sorted increasingly and
    vectors[:, j] the eigenvector for angles[j].  Angles within snap_tol of
    the cut are snapped to +pi (the branch convention for the crossing point).

    Uses the Schur decomposition, which is exactly unitary for normal
    matrices, so the returned vectors are orthonormal even at degeneracies.
    """
    U = check_unitary(U, tol=tol)
    # np.linalg.eig does not guarantee orthonormal vectors at degeneracies;
    # use Schur instead (unitary U is normal, so T is diagonal).
    T, Z = schur(U, output="complex")
    vals = np.diag(T)
    angles = np.angle(vals)
    angles[np.abs(angles + np.pi) <= snap_tol] = np.pi
    order = np.argsort(angles, kind="stable")
    return angles[order], Z[:, order]


def principal_log_unitary(U, tol=UNITARY_TOL, snap_tol=1e-12):
    """Skew-Hermitian principal logarithm Y of a unitary U, with e^Y = U.

    Eigenvalue e^{i theta} maps to i*theta with theta in (-pi, pi]; the
    eigenvalue -1 maps to +i*pi (cut-locus convention).
    """
    angles, vecs = eig_unitary(U, tol=tol, snap_tol=snap_tol)
    Y = (vecs * (1j * angles)) @ vecs.conj().T
    return Y


def schatten_norm(A, p):
    """Schatten p-norm of a matrix: the l^p norm of its singular values.

    p may be any real >= 1 or np.inf (operator norm).
    """
    if p != np.inf and p < 1:
        raise InvalidOrder(f"Schatten order must be >= 1 or inf, got {p}")
    s = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    if p == np.inf:
        return float(s[0]) if len(s) else 0.0
    return float(np.sum(s**p) ** (1.0 / p))


def abs_power(A, x):
    """|A|^{2x} = (A*A)^x as a Hermitian PSD matrix, via singular values.

    x may be fractional; x = 1/2 gives |A| itself.  Computed from the SVD
    A = U s V*: |A|^2 = V s^2 V*, so |A|^{2x} = V s^{2x} V*.
    """
    A = np.asarray(A, dtype=complex)
    if x < 0:
        raise InvalidOrder(f"negative power {x} not supported (singular A)")
    _, s, Vh = np.linalg.svd(A)
    return (Vh.conj().T * s ** (2.0 * x)) @ Vh


def gamma_constant(x):
    """The normalization constant Gamma(x+1) / (sqrt(pi) * Gamma(x+1/2)).

    Exact values used as anchors: x=0 -> 1/pi, x=1 -> 2/pi, x=3/2 -> 3/4.
    Evaluated through log-gamma to stay finite for large x.
    """
    if x < 0:
        raise InvalidOrder(f"constant defined for x >= 0, got {x}")
    return float(np.exp(gammaln(x + 1.0) - gammaln(x + 0.5)) / np.sqrt(np.pi))


def herm_power(H, x, floor=0.0):
    """Real power of a Hermitian PSD matrix via eigen-decomposition.

    Small negative eigenvalues from rounding are clipped at `floor`.
    """
    H = np.asarray(H, dtype=complex)
    w, V = np.linalg.eigh(H)
    w = np.clip(w, floor, None)
    return (V * w**x) @ V.conj().T
