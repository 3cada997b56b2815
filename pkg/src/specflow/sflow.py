"""Spectral flow of unitary paths through the point -1, by four routes.

The four engines are deliberately independent:

* `sf_phillips` tracks eigenvalues and counts signed crossings of -1 using
  arc counts k(t, eps) at partition breakpoints; exact integer output with a
  checkable `PartitionCertificate`.
* `sf_alpha` integrates the winding one-form with integrand
  Tr(U* U' (U - Id)^n), admissible for n >= p - 1.
* `sf_beta` integrates the absolute-value form with integrand
  Tr(U* U' |U - Id|^{2r}), admissible for r >= (p - 1)/2.
* `sf_det` integrates the log-derivative of the regularized determinant,
  with integrand Tr(U* U' (Id - U)^{p-1}).

For open paths, geodesic endpoint caps e^{tY} (principal log generators)
close the path, and the Theta/Xi endpoint integrals express the capped flow
as integral-over-the-path plus endpoint corrections.
"""

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.linalg import expm

from .errors import (
    CapMismatch,
    InvalidOrder,
    NonConvergent,
    PartitionFailure,
    RouteDisagreement,
)
from .matcore import abs_power, eig_unitary, gamma_constant, principal_log_unitary
from .upath import UnitaryPath, cap_into, cap_outof, concatenate_many

DEFAULT_EPSABS = 1e-9
DEFAULT_LIMIT = 10000


@dataclass
class PartitionCertificate:
    """Evidence that the Phillips arc counts were well defined.

    For each subinterval [t_{j-1}, t_j] the rays at angles pi +/- eps_j were
    observed eigenvalue-free at every certification sample, with at least
    `margins[j]` angular clearance, and the sampled eigenvalue motion was too
    small to cross a ray between samples.
    """

    breakpoints: list
    epsilons: list
    margins: list


@dataclass
class SpectralFlowReport:
    value: int
    raw: complex
    residual: float
    method: str
    parameters: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    certificate: PartitionCertificate = None

    def __repr__(self):
        return (f"SpectralFlowReport(value={self.value}, raw={self.raw:.6g}, "
                f"residual={self.residual:.2e}, method={self.method!r})")


def _finish(raw, method, parameters, warns):
    raw = complex(raw)
    value = int(np.round(raw.real))
    residual = abs(raw - value)
    if residual >= 0.4:
        raise NonConvergent(
            f"{method}: raw value {raw:.6g} is {residual:.3f} away from any "
            f"integer (params {parameters})")
    if residual >= 0.1:
        warns.append(f"residual {residual:.3f} in the warn band [0.1, 0.4)")
    if abs(raw.imag) > 1e-6 * (1.0 + abs(raw)):
        warns.append(f"imaginary part {raw.imag:.3e} above tolerance")
    return SpectralFlowReport(value=value, raw=raw, residual=residual,
                              method=method, parameters=parameters,
                              warnings=warns)


def _integrate_path(f, path, epsabs=DEFAULT_EPSABS, limit=DEFAULT_LIMIT):
    """Adaptive Gauss-Kronrod over the path interval, split at breakpoints."""
    a, b = path.interval
    pts = list(path.breakpoints) or None
    warns = []
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always", IntegrationWarning)
        val, err = quad(f, a, b, complex_func=True, epsabs=epsabs,
                        limit=limit, points=pts)
    for w in caught:
        if issubclass(w.category, IntegrationWarning):
            warns.append(f"quadrature: {w.message}")
    return val, float(np.real(err)), warns


def _validate_order(path, kind, order):
    p = path.schatten_order
    if kind == "n":
        if order < p - 1 - 1e-12 or order != int(order) or order < 0:
            raise InvalidOrder(
                f"n must be an integer >= p-1 = {p - 1}, got {order}")
    elif kind == "r":
        if order < (p - 1) / 2.0 - 1e-12 or order < 0:
            raise InvalidOrder(f"r must be >= (p-1)/2 = {(p - 1) / 2}, got {order}")
    elif kind == "p":
        if order != int(order) or order < 1:
            raise InvalidOrder(f"p must be a positive integer, got {order}")


# ---------------------------------------------------------------------------
# integral engines


def sf_alpha(path, n, epsabs=DEFAULT_EPSABS, limit=DEFAULT_LIMIT, closed_tol=1e-8):
    """Winding via (-1)^n (1/2 pi i) Integral Tr(U* U' (U - Id)^n) dt."""
    path.check_closed(tol=closed_tol)
    _validate_order(path, "n", n)
    n = int(n)
    eye = np.eye(path.dim)

    def integrand(t):
        U = path(t)
        Ud = path.derivative(t)
        return np.trace(U.conj().T @ Ud @ np.linalg.matrix_power(U - eye, n))

    val, err, warns = _integrate_path(integrand, path, epsabs, limit)
    raw = (-1) ** n * val / (2j * np.pi)
    return _finish(raw, "alpha", {"n": n, "quad_error": err}, warns)


def sf_beta(path, r, epsabs=DEFAULT_EPSABS, limit=DEFAULT_LIMIT, closed_tol=1e-8):
    """Winding via -i C_r (1/2)^{2r+1} Integral Tr(U* U' |U - Id|^{2r}) dt."""
    path.check_closed(tol=closed_tol)
    _validate_order(path, "r", r)
    r = float(r)
    eye = np.eye(path.dim)
    const = -1j * gamma_constant(r) * 0.5 ** (2 * r + 1)

    def integrand(t):
        U = path(t)
        Ud = path.derivative(t)
        return np.trace(U.conj().T @ Ud @ abs_power(U - eye, r))

    val, err, warns = _integrate_path(integrand, path, epsabs, limit)
    raw = const * val
    return _finish(raw, "beta", {"r": r, "quad_error": err}, warns)


def sf_det(path, p, epsabs=DEFAULT_EPSABS, limit=DEFAULT_LIMIT, closed_tol=1e-8):
    """Winding of the regularized determinant Det_p along the loop.

    The integrand is the log-derivative d/dt Log Det_p(U_t), which for the
    order-p counterterm reduces to the trace form Tr(U* U' (Id - U)^{p-1});
    the winding is its integral divided by 2 pi i.
    """
    path.check_closed(tol=closed_tol)
    _validate_order(path, "p", p)
    p = int(p)
    eye = np.eye(path.dim)

    def integrand(t):
        U = path(t)
        Ud = path.derivative(t)
        return np.trace(U.conj().T @ Ud @ np.linalg.matrix_power(eye - U, p - 1))

    val, err, warns = _integrate_path(integrand, path, epsabs, limit)
    raw = val / (2j * np.pi)
    return _finish(raw, "det", {"p": p, "quad_error": err}, warns)


# ---------------------------------------------------------------------------
# endpoint corrections for open paths


def theta_endpoint(U, n, epsabs=DEFAULT_EPSABS):
    """Theta(U) = (-1)^n (1/2 pi i) Integral_0^1 Tr(Y (e^{tY} - Id)^n) dt,

    where Y is the principal logarithm of U.  This is the alpha-integral of
    the geodesic cap from Id to U; Theta(Id) = 0.
    """
    n = int(n)
    angles, _ = eig_unitary(U)
    iang = 1j * angles

    def integrand(t):
        return np.sum(iang * (np.exp(t * iang) - 1.0) ** n)

    val, _ = quad(integrand, 0.0, 1.0, complex_func=True, epsabs=epsabs,
                  limit=DEFAULT_LIMIT)
    return (-1) ** n * val / (2j * np.pi)


def xi_endpoint(U, r, epsabs=DEFAULT_EPSABS):
    """Xi(U) = Integral_0^1 Tr(Y |e^{tY} - Id|^{2r}) dt, un-normalized.

    The caller applies the beta normalization -i C_r (1/2)^{2r+1}; this keeps
    the two endpoint integrals structurally parallel.
    """
    r = float(r)
    angles, _ = eig_unitary(U)
    iang = 1j * angles

    def integrand(t):
        return np.sum(iang * (4.0 * np.sin(t * angles / 2.0) ** 2) ** r)

    val, _ = quad(integrand, 0.0, 1.0, complex_func=True, epsabs=epsabs,
                  limit=DEFAULT_LIMIT)
    return val


def sf_open_path(path, n=None, r=None, epsabs=DEFAULT_EPSABS,
                 limit=DEFAULT_LIMIT, cap_tol=1e-8, phillips_kwargs=None):
    """Spectral flow of an open path closed by geodesic endpoint caps.

    The caps are e^{tY} from Id to U_start and e^{(1-t)Z} from U_end to Id,
    with Y, Z the principal logarithms (an endpoint eigenvalue -1 is
    represented as e^{i pi}).  Two routes are computed and required to agree:

    * crossing counting (`sf_phillips`) on the concatenated closed path;
    * the winding integral over the open path plus endpoint corrections,
      Theta(U_start) - Theta(U_end) for the alpha form (n given), or the
      normalized Xi difference for the beta form (r given).

    The report carries the Phillips integer as `value` and the corrected
    integral as `raw`.
    """
    if (n is None) == (r is None):
        raise InvalidOrder("pass exactly one of n (alpha form) or r (beta form)")
    a, b = path.interval
    U0, U1 = path(a), path(b)
    Y = principal_log_unitary(U0)
    Z = principal_log_unitary(U1)
    for G, U, which in ((Y, U0, "start"), (Z, U1, "end")):
        gap = np.linalg.norm(expm(G) - U, ord=2)
        if gap > cap_tol:
            raise CapMismatch(f"{which} cap misses endpoint by {gap:.3e}")

    closed = concatenate_many([cap_into(U0), path, cap_outof(U1)])
    phillips = sf_phillips(closed, **(phillips_kwargs or {}))

    if n is not None:
        _validate_order(path, "n", n)
        nn = int(n)
        eye = np.eye(path.dim)

        def integrand(t):
            U = path(t)
            Ud = path.derivative(t)
            return np.trace(U.conj().T @ Ud
                            @ np.linalg.matrix_power(U - eye, nn))

        val, err, warns = _integrate_path(integrand, path, epsabs, limit)
        body = (-1) ** nn * val / (2j * np.pi)
        correction = theta_endpoint(U0, nn, epsabs) - theta_endpoint(U1, nn, epsabs)
        params = {"n": nn, "quad_error": err}
    else:
        _validate_order(path, "r", r)
        rr = float(r)
        eye = np.eye(path.dim)
        const = -1j * gamma_constant(rr) * 0.5 ** (2 * rr + 1)

        def integrand(t):
            U = path(t)
            Ud = path.derivative(t)
            return np.trace(U.conj().T @ Ud @ abs_power(U - eye, rr))

        val, err, warns = _integrate_path(integrand, path, epsabs, limit)
        body = const * val
        correction = const * (xi_endpoint(U0, rr, epsabs)
                              - xi_endpoint(U1, rr, epsabs))
        params = {"r": rr, "quad_error": err}

    raw = body + correction
    residual = abs(raw - phillips.value)
    if int(np.round(raw.real)) != phillips.value:
        raise RouteDisagreement(
            f"crossing count {phillips.value} vs corrected integral {raw:.6g}")
    if residual >= 0.1:
        warns.append(f"open-path residual {residual:.3f}")
    params["body"] = body
    params["endpoint_correction"] = correction
    return SpectralFlowReport(value=phillips.value, raw=raw, residual=residual,
                              method="open_path", parameters=params,
                              warnings=warns, certificate=phillips.certificate)


# ---------------------------------------------------------------------------
# Phillips crossing counting


def _wrap(x):
    """Wrap to (-pi, pi]."""
    y = np.mod(x + np.pi, 2.0 * np.pi) - np.pi
    if np.isscalar(y):
        return np.pi if y == -np.pi else y
    y[y == -np.pi] = np.pi
    return y


def _around_minus_one(angles):
    """Signed angular offset from the point -1: u = wrap(theta - pi).

    u = 0 is the crossing point; u in (0, eps) is the interior of the
    counting arc [pi, pi + eps)."""
    return _wrap(np.asarray(angles) - np.pi)


def _match_motion(a0, v0, a1, v1):
    """Greedy pairing of eigenangle sets at neighboring parameters.

    Pairs by circular distance, nudged by eigenvector overlap so that
    near-degenerate angles follow their own eigenvectors.  Returns the
    signed motions u1[perm] - u0 wrapped to (-pi, pi].
    """
    m = len(a0)
    d = np.abs(_wrap(a1[None, :] - a0[:, None]))
    overlap = np.abs(v0.conj().T @ v1) ** 2
    key = d - 1e-6 * overlap
    perm = np.full(m, -1)
    used = np.zeros(m, dtype=bool)
    for _ in range(m):
        i, j = np.unravel_index(np.argmin(key), key.shape)
        perm[i] = j
        used[j] = True
        key[i, :] = np.inf
        key[:, j] = np.inf
    return _wrap(a1[perm] - a0), perm


class _EigCache:
    def __init__(self, path):
        self.path = path
        self.data = {}

    def __call__(self, t):
        if t not in self.data:
            self.data[t] = eig_unitary(self.path(t))
        return self.data[t]


def sf_phillips(path, initial_samples=33, motion_bound=np.pi / 6,
                max_samples=20000, certify_depth=28, margin_min=1e-9):
    """Spectral flow by eigenvalue-crossing counting.

    The interval is refined until the matched eigenangle motion between
    neighboring samples is below `motion_bound`.  On each subinterval an arc
    half-width eps_j is chosen in the largest sampled gap of eigenvalue
    distances from -1, and certified: every sample keeps both rays
    pi +/- eps_j clear, and per-step motion is too small for any eigenvalue
    to reach a ray between samples (else the step is bisected).  The flow is
    the telescoped sum of arc-count differences k(t_j, eps_j) - k(t_{j-1},
    eps_j); `raw` equals the integer exactly, so residual is 0.
    """
    if not path.finite:
        raise PartitionFailure("compactify the path to a finite interval first")
    a, b = path.interval
    eig = _EigCache(path)

    grid = set(np.linspace(a, b, max(int(initial_samples), 3)))
    grid.update(path.breakpoints)
    grid = sorted(grid)

    # refine until matched motion per step is small
    work = list(zip(grid[:-1], grid[1:]))
    accepted = []
    while work:
        t0, t1 = work.pop()
        a0, v0 = eig(t0)
        a1, v1 = eig(t1)
        motion, _ = _match_motion(a0, v0, a1, v1)
        if np.max(np.abs(motion)) > motion_bound and len(eig.data) < max_samples:
            tm = 0.5 * (t0 + t1)
            if tm <= t0 or tm >= t1:
                raise PartitionFailure(
                    f"cannot refine below floating-point resolution at {t0}")
            work.append((t0, tm))
            work.append((tm, t1))
        else:
            if np.max(np.abs(motion)) > motion_bound:
                raise PartitionFailure(
                    f"sample budget {max_samples} exhausted with eigenvalue "
                    f"motion {np.max(np.abs(motion)):.3f} > {motion_bound:.3f}; "
                    "increase resolution")
            accepted.append((t0, t1))
    accepted.sort()
    breakpoints = [accepted[0][0]] + [seg[1] for seg in accepted]

    def count(t, eps):
        angles, _ = eig(t)
        u = _around_minus_one(angles)
        return int(np.sum((u >= 0.0) & (u < eps)))

    def certify(t0, t1, eps, depth):
        """Check no eigenvalue can touch a ray on [t0, t1]; return margin."""
        a0, v0 = eig(t0)
        a1, v1 = eig(t1)
        u0 = _around_minus_one(a0)
        motion, perm = _match_motion(a0, v0, a1, v1)
        u1 = _around_minus_one(a1)[perm]
        margin = min(np.min(np.abs(np.abs(u0) - eps)),
                     np.min(np.abs(np.abs(u1) - eps)))
        ok = True
        for uu0, uu1, mv in zip(u0, u1, motion):
            for ray in (eps, -eps):
                # circular clearances: a step displacement |mv| can only
                # cross the ray if it exceeds the clearance sum
                c0 = np.abs(_wrap(uu0 - ray))
                c1 = np.abs(_wrap(uu1 - ray))
                if np.abs(mv) >= c0 + c1 - 1e-12:
                    ok = False
        if ok:
            return margin
        if depth <= 0 or len(eig.data) >= max_samples:
            raise PartitionFailure(
                f"cannot certify rays pi +/- {eps:.4f} free on "
                f"[{t0:.6g}, {t1:.6g}]; increase resolution")
        tm = 0.5 * (t0 + t1)
        if tm <= t0 or tm >= t1:
            raise PartitionFailure("refinement hit floating-point resolution")
        return min(certify(t0, tm, eps, depth - 1),
                   certify(tm, t1, eps, depth - 1))

    total = 0
    epsilons = []
    margins = []
    for t0, t1 in accepted:
        # distances from -1 seen anywhere on the subinterval samples
        seen = [t for t in (t0, t1)]
        dists = np.concatenate([np.abs(_around_minus_one(eig(t)[0])) for t in seen])
        dists = np.unique(np.concatenate([[0.0], np.sort(dists), [np.pi]]))
        gaps = np.diff(dists)
        gi = int(np.argmax(gaps))
        eps = 0.5 * (dists[gi] + dists[gi + 1])
        if gaps[gi] / 2.0 < margin_min or not (0.0 < eps < np.pi):
            raise PartitionFailure(
                f"no eigenvalue-free arc around -1 on [{t0:.6g}, {t1:.6g}]")
        margin = certify(t0, t1, eps, certify_depth)
        if margin < margin_min:
            raise PartitionFailure(
                f"arc margin {margin:.2e} below {margin_min:.0e} on "
                f"[{t0:.6g}, {t1:.6g}]")
        total += count(t1, eps) - count(t0, eps)
        epsilons.append(eps)
        margins.append(float(margin))

    cert = PartitionCertificate(breakpoints=breakpoints, epsilons=epsilons,
                                margins=margins)
    return SpectralFlowReport(value=int(total), raw=complex(total),
                              residual=0.0, method="phillips",
                              parameters={"samples": len(eig.data)},
                              warnings=[], certificate=cert)
