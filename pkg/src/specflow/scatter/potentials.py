"""Compactly supported potentials for the scattering solvers.

1D potentials are stored as piecewise-constant segments, for which the
transfer matrices are exact; callables are discretized into fine segments.
Radial potentials keep their callable plus support radius; moments over
R^d are taken with the surface measure of the (d-1)-sphere.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from ..errors import SpecflowError, UnsupportedDimension

SPHERE_VOLUMES = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi,
                  4: 2.0 * np.pi ** 2}  # Vol(S^{d-1}) keyed by d


@dataclass(frozen=True)
class Potential1D:
    """Real potential on the line, zero outside [x_left, x_right].

    segments : tuple of (x0, x1, v) with x0 < x1, contiguous and sorted.
    regularity : "piecewise" for native step potentials, "sampled" when the
        segments discretize a smooth callable.
    """

    segments: tuple
    regularity: str = "piecewise"

    def __post_init__(self):
        if not self.segments:
            raise SpecflowError("potential needs at least one segment")
        xs = [s[0] for s in self.segments] + [self.segments[-1][1]]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise SpecflowError("segments must be sorted with positive length")
        for (x0, x1, v), (y0, y1, w) in zip(self.segments, self.segments[1:]):
            if abs(x1 - y0) > 1e-12:
                raise SpecflowError("segments must be contiguous")

    @classmethod
    def square_well(cls, depth, halfwidth=1.0):
        """Attractive well of the given depth on [-halfwidth, halfwidth]."""
        return cls(segments=((-halfwidth, halfwidth, -float(depth)),))

    @classmethod
    def from_callable(cls, f, support, n_segments=2000):
        """Discretize a callable into midpoint-sampled constant segments."""
        a, b = support
        edges = np.linspace(a, b, n_segments + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        vals = np.asarray([float(f(x)) for x in mids])
        segs = tuple((float(x0), float(x1), float(v))
                     for x0, x1, v in zip(edges[:-1], edges[1:], vals))
        return cls(segments=segs, regularity="sampled")

    @property
    def support(self):
        return (self.segments[0][0], self.segments[-1][1])

    @property
    def halfwidth(self):
        a, b = self.support
        return max(abs(a), abs(b))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for x0, x1, v in self.segments:
            out = np.where((x >= x0) & (x < x1), v, out)
        return out if out.ndim else float(out)

    def integral(self):
        """Integral of V over the line."""
        return float(sum(v * (x1 - x0) for x0, x1, v in self.segments))

    def integral_sq(self):
        return float(sum(v * v * (x1 - x0) for x0, x1, v in self.segments))


@dataclass(frozen=True)
class RadialPotential:
    """Real radial potential, zero outside r > radius.  Dimension 3 is the
    computable case; 2 and 4 are accepted for moment bookkeeping only."""

    v_of_r: object
    radius: float
    dim: int = 3
    regularity: str = "piecewise"
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise UnsupportedDimension(f"radial dimension {self.dim}")
        if self.radius <= 0:
            raise SpecflowError(f"support radius must be positive, got "
                                f"{self.radius}")

    @classmethod
    def square_well(cls, depth, radius=1.0, dim=3):
        d = float(depth)
        R = float(radius)
        return cls(v_of_r=lambda r: -d if r < R else 0.0, radius=R, dim=dim,
                   label=f"square_well(depth={d}, radius={R})")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return float(self.v_of_r(float(r))) if r < self.radius else 0.0
        out = np.array([self.v_of_r(float(x)) if x < self.radius else 0.0
                        for x in r])
        return out

    def integral(self):
        """Integral of V over R^d (surface measure times radial moment)."""
        val, _ = quad(lambda r: self.v_of_r(r) * r ** (self.dim - 1),
                      0.0, self.radius, limit=400)
        return float(SPHERE_VOLUMES[self.dim] * val)

    def integral_sq(self):
        val, _ = quad(lambda r: self.v_of_r(r) ** 2 * r ** (self.dim - 1),
                      0.0, self.radius, limit=400)
        return float(SPHERE_VOLUMES[self.dim] * val)
