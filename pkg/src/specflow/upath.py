"""Parameterized families of unitary matrices.

A path is a *sampler* (a function of the parameter), not a stored array, so
adaptive quadrature and partition refinement can request arbitrary
resolution.  Paths carry their interval, an optional analytic derivative,
a Schatten-order tag used to validate regularization orders, a closed flag,
and the interior parameters where the path is only C^0 (concatenation
joints); integrators split panels there.
"""

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimensionTooSmall,
    EndpointMismatch,
    NoLimitAtInfinity,
    NotClosed,
    OutsideInterval,
)
from .matcore import check_unitary, principal_log_unitary, schatten_norm

ENDPOINT_TOL = 1e-8


class UnitaryPath:
    """A family t -> U_t of unitary matrices over an interval.

    Parameters
    ----------
    sampler : callable t -> (dim, dim) complex ndarray
    interval : (a, b) with a < b; b may be np.inf (compactify before
        handing to the spectral-flow engines), or (-inf, inf).
    derivative : optional callable t -> ndarray, the analytic U'_t.
        When absent, `.derivative` falls back to central differences.
    schatten_order : the p for which U_t - Id is treated as p-Schatten;
        engines validate their regularization order against it.
    closed : asserts U_a = U_b (loops).  Verified lazily by `check_closed`.
    breakpoints : interior parameters where smoothness may fail.
    check : validate unitarity of every sample (disable only in hot loops
        where the sampler is trusted by construction).
    """

    def __init__(self, sampler, interval=(0.0, 1.0), derivative=None,
                 schatten_order=1.0, closed=False, breakpoints=(),
                 dim=None, check=True, name=None):
        self._sampler = sampler
        self.interval = (float(interval[0]), float(interval[1]))
        if not self.interval[0] < self.interval[1]:
            raise OutsideInterval(f"empty interval {interval}")
        self._derivative = derivative
        self.schatten_order = float(schatten_order)
        self.closed = bool(closed)
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        for b in self.breakpoints:
            if not (self.interval[0] < b < self.interval[1]):
                raise OutsideInterval(f"breakpoint {b} outside {interval}")
        self._check = bool(check)
        self.name = name
        if dim is None:
            probe = np.asarray(sampler(self._probe_point()), dtype=complex)
            dim = probe.shape[0]
        self.dim = int(dim)

    def _probe_point(self):
        a, b = self.interval
        if np.isfinite(a):
            return a
        if np.isfinite(b):
            return b
        return 0.0

    @property
    def finite(self):
        return np.isfinite(self.interval[0]) and np.isfinite(self.interval[1])

    def _contains(self, t):
        a, b = self.interval
        return a - 1e-12 <= t <= b + 1e-12 or (a == -np.inf and t <= b) \
            or (b == np.inf and t >= a)

    def __call__(self, t):
        if not self._contains(t):
            raise OutsideInterval(f"parameter {t} outside {self.interval}")
        U = np.asarray(self._sampler(t), dtype=complex)
        if self._check:
            U = check_unitary(U)
        return U

    def derivative(self, t, h=None):
        """U'_t: analytic when available, else 4th-order central difference.

        Near the interval ends the stencil degrades to a 2nd-order one-sided
        difference; quadrature rules only sample interior nodes, so this
        path is rarely taken.
        """
        if not self._contains(t):
            raise OutsideInterval(f"parameter {t} outside {self.interval}")
        if self._derivative is not None:
            return np.asarray(self._derivative(t), dtype=complex)
        a, b = self.interval
        if h is None:
            scale = (b - a) if self.finite else 1.0
            h = 1e-5 * scale
        if t - 2 * h >= a and t + 2 * h <= b:
            return (-self(t + 2 * h) + 8 * self(t + h)
                    - 8 * self(t - h) + self(t - 2 * h)) / (12 * h)
        if t + h > b:
            return (self(t) - self(t - h)) / h
        if t - h < a:
            return (self(t + h) - self(t)) / h
        return (self(t + h) - self(t - h)) / (2 * h)

    def check_closed(self, tol=ENDPOINT_TOL):
        """Raise NotClosed unless U_a = U_b within tol (operator norm)."""
        if not self.finite:
            raise NotClosed("unbounded interval; compactify first")
        a, b = self.interval
        gap = np.linalg.norm(self(a) - self(b), ord=2)
        if gap > tol:
            raise NotClosed(f"endpoint gap {gap:.3e} exceeds tol {tol:.1e}")

    def reversed(self):
        """The same trace traversed backwards (finite intervals only)."""
        a, b = self.interval
        deriv = None
        if self._derivative is not None:
            deriv = lambda t: -np.asarray(self._derivative(a + b - t), dtype=complex)
        return UnitaryPath(
            lambda t: self._sampler(a + b - t), interval=(a, b),
            derivative=deriv, schatten_order=self.schatten_order,
            closed=self.closed,
            breakpoints=tuple(a + b - c for c in self.breakpoints),
            dim=self.dim, check=self._check,
        )


def constant_path(U, interval=(0.0, 1.0)):
    U = check_unitary(U)
    dim = U.shape[0]
    return UnitaryPath(lambda t: U, interval=interval,
                       derivative=lambda t: np.zeros((dim, dim), dtype=complex),
                       schatten_order=1.0, closed=True, dim=dim)


def model_loop(k, dim):
    """The normalizing loop Id - P + P e^{2 pi i t} with P of rank k.

    P projects onto the first k coordinates; the loop winds each of the k
    active eigenvalues once around the circle, so its spectral flow is k.
    """
    if k < 1:
        raise DimensionTooSmall(f"rank k must be >= 1, got {k}")
    if dim < k:
        raise DimensionTooSmall(f"dim {dim} < rank {k}")
    diag_mask = np.arange(dim) < k

    def sampler(t):
        d = np.where(diag_mask, np.exp(2j * np.pi * t), 1.0)
        return np.diag(d)

    def deriv(t):
        d = np.where(diag_mask, 2j * np.pi * np.exp(2j * np.pi * t), 0.0)
        return np.diag(d)

    return UnitaryPath(sampler, interval=(0.0, 1.0), derivative=deriv,
                       schatten_order=1.0, closed=True, dim=dim, check=False,
                       name=f"model_loop(k={k}, dim={dim})")


def geodesic_between(U0, U1):
    """The geodesic U0 e^{tY}, Y = Log(U0* U1), from U0 to U1 on [0, 1].

    Uses the principal logarithm, so an eigenvalue -1 of U0* U1 travels
    counterclockwise (through angle +pi).
    """
    U0 = check_unitary(U0)
    U1 = check_unitary(U1)
    if U0.shape != U1.shape:
        raise EndpointMismatch(f"shapes {U0.shape} vs {U1.shape}")
    Y = principal_log_unitary(U0.conj().T @ U1)
    return generator_path(Y, base=U0)


def generator_path(Y, base=None, interval=(0.0, 1.0)):
    """The path base * e^{tY} for a fixed skew-Hermitian generator Y."""
    Y = np.asarray(Y, dtype=complex)
    dim = Y.shape[0]
    if base is None:
        base = np.eye(dim)

    def sampler(t):
        return base @ expm(t * Y)

    def deriv(t):
        return base @ Y @ expm(t * Y)

    return UnitaryPath(sampler, interval=interval, derivative=deriv,
                       schatten_order=1.0, closed=False, dim=dim, check=False)


def cap_into(U):
    """Geodesic cap Id -> U along e^{tY}, Y the principal log of U."""
    return generator_path(principal_log_unitary(U))


def cap_outof(U):
    """Geodesic cap U -> Id along e^{(1-t)Y}, Y the principal log of U."""
    Y = principal_log_unitary(U)

    def sampler(t):
        return expm((1.0 - t) * Y)

    def deriv(t):
        return -Y @ expm((1.0 - t) * Y)

    return UnitaryPath(sampler, interval=(0.0, 1.0), derivative=deriv,
                       schatten_order=1.0, closed=False, dim=U.shape[0],
                       check=False)


def concatenate(a, b, tol=ENDPOINT_TOL):
    """Traverse a then b at double speed on [0, 1].

    Requires a's end value to match b's start value; the joint at t = 1/2
    becomes a breakpoint (the result is C^0 there, generally not C^1).
    """
    if not (a.finite and b.finite):
        raise EndpointMismatch("concatenate requires finite intervals")
    if a.dim != b.dim:
        raise EndpointMismatch(f"dims {a.dim} vs {b.dim}")
    gap = np.linalg.norm(a(a.interval[1]) - b(b.interval[0]), ord=2)
    if gap > tol:
        raise EndpointMismatch(f"joint gap {gap:.3e} exceeds tol {tol:.1e}")
    a0, a1 = a.interval
    b0, b1 = b.interval
    la, lb = a1 - a0, b1 - b0

    def sampler(t):
        if t < 0.5:
            return a(a0 + 2.0 * t * la)
        return b(b0 + (2.0 * t - 1.0) * lb)

    def deriv(t):
        if t < 0.5:
            return 2.0 * la * a.derivative(a0 + 2.0 * t * la)
        return 2.0 * lb * b.derivative(b0 + (2.0 * t - 1.0) * lb)

    joints = [0.5]
    joints += [(c - a0) / la / 2.0 for c in a.breakpoints]
    joints += [0.5 + (c - b0) / lb / 2.0 for c in b.breakpoints]
    closed = np.linalg.norm(a(a0) - b(b1), ord=2) <= tol

    return UnitaryPath(sampler, interval=(0.0, 1.0), derivative=deriv,
                       schatten_order=max(a.schatten_order, b.schatten_order),
                       closed=closed, breakpoints=joints, dim=a.dim,
                       check=False)


def concatenate_many(paths, tol=ENDPOINT_TOL):
    out = paths[0]
    for nxt in paths[1:]:
        out = concatenate(out, nxt, tol=tol)
    return out


def _tail_check(path, probes, tol):
    """Verify ||U_s - Id||_p decreases monotonically along the probes."""
    p = path.schatten_order
    eye = np.eye(path.dim)
    dists = [schatten_norm(path(s) - eye, max(p, 1.0)) for s in probes]
    drops = all(d2 <= d1 + 1e-12 for d1, d2 in zip(dists, dists[1:]))
    if not (drops and dists[-1] < tol):
        raise NoLimitAtInfinity(
            f"tail distances {dists} at probes {probes} do not settle to Id")


def compactify(path, alpha=1.0, tail_tol=0.5, probes=(1e2, 1e3, 1e4)):
    """Reparameterize a path on [0, inf) (or R) to [0, 1].

    For [0, inf) the substitution is t = 1 - (1 + s)^(-alpha/2); for R it is
    the logistic t = 1/(1 + e^{-s}).  The integrands of the winding integrals
    transform with the Jacobian, so all spectral-flow values are unchanged.
    The path must approach Id at infinity; probe samples must show monotone
    Schatten-norm decrease, else NoLimitAtInfinity.
    """
    if path.finite:
        return path
    a, b = path.interval
    dim = path.dim
    eye = np.eye(dim)

    if a == 0.0 and b == np.inf:
        _tail_check(path, probes, tail_tol)
        expo = -2.0 / alpha

        def g(t):
            return (1.0 - t) ** expo - 1.0

        def gprime(t):
            return -expo * (1.0 - t) ** (expo - 1.0)

        def sampler(t):
            if t >= 1.0:
                return eye
            return path(g(t))

        def deriv(t):
            if t >= 1.0:
                return np.zeros((dim, dim), dtype=complex)
            return gprime(t) * path.derivative(g(t))

        bps = tuple(1.0 - (1.0 + c) ** (-alpha / 2.0) for c in path.breakpoints)
    elif a == -np.inf and b == np.inf:
        _tail_check(path, probes, tail_tol)
        _tail_check(path, tuple(-s for s in probes), tail_tol)

        def g(t):
            return np.log(t / (1.0 - t))

        def gprime(t):
            return 1.0 / (t * (1.0 - t))

        def sampler(t):
            if t <= 0.0 or t >= 1.0:
                return eye
            return path(g(t))

        def deriv(t):
            if t <= 0.0 or t >= 1.0:
                return np.zeros((dim, dim), dtype=complex)
            return gprime(t) * path.derivative(g(t))

        bps = tuple(1.0 / (1.0 + np.exp(-c)) for c in path.breakpoints)
    else:
        raise OutsideInterval(f"cannot compactify interval {path.interval}")

    start_gap = np.linalg.norm(sampler(0.0) - eye, ord=2)
    return UnitaryPath(sampler, interval=(0.0, 1.0), derivative=deriv,
                       schatten_order=path.schatten_order,
                       closed=start_gap <= ENDPOINT_TOL,
                       breakpoints=bps, dim=dim, check=False,
                       name=f"compactified({path.name})")
