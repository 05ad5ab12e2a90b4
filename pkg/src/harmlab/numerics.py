"""Shared numerics: adaptive quadrature, finite differences, half-disk norms,
and straight-line fits for rate extraction.

The adaptive integrator uses an embedded Fejer-2 pair (7 nodes nested inside
15) with globally greedy bisection, so integrable endpoint singularities are
resolved without ever sampling the endpoints. Integrands must accept numpy
arrays of abscissae.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateDesign,
    MaxSubdivisionsExceeded,
    NonFiniteSample,
    StencilLeavesDomain,
    ValidationError,
)
from .halfplane import HalfPlanePoint

__all__ = [
    "QuadratureRule",
    "GridSpec",
    "RateFit",
    "gauss_legendre_rule",
    "integrate_adaptive",
    "fd_laplacian",
    "fd_derivative",
    "norm_lp_halfdisk",
    "fit_linear",
    "fit_loglog",
    "bisect_root",
    "golden_max",
]


# --- 1D rules -----------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Fixed nodes/weights for a 1D integral, with the declared total measure.

    `measure` is what the weights must sum to (the domain length for plain
    rules, 1.0 for probability-normalized rules obtained through a transform).
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]
    measure: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise ValidationError("nodes and weights must be matching nonempty 1D arrays")
        if np.any(weights <= 0.0):
            raise ValidationError("quadrature weights must be positive")
        if abs(weights.sum() - self.measure) > 1e-12 * max(1.0, abs(self.measure)):
            raise ValidationError(
                f"weights sum to {weights.sum()!r}, expected measure {self.measure!r}"
            )

    def apply(self, f) -> float:
        return float(np.dot(self.weights, np.asarray(f(self.nodes), dtype=float)))


def gauss_legendre_rule(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [a, b]."""
    if n < 1:
        raise ValidationError(f"need n >= 1 nodes, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return QuadratureRule(mid + half * x, half * w, (a, b), b - a)


def _fejer2(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fejer-2 nodes/weights on [-1, 1]: n-1 interior Chebyshev points."""
    j = np.arange(1, n)
    theta = j * np.pi / n
    nodes = np.cos(theta)
    ell = 2 * np.arange(1, n // 2 + 1)[:, None] - 1  # odd integers
    weights = (4.0 / n) * np.sin(theta) * np.sum(np.sin(ell * theta) / ell, axis=0)
    return nodes, weights


_F2_FINE_NODES, _F2_FINE_W = _fejer2(16)  # 15 nodes
_F2_COARSE_W = _fejer2(8)[1]  # 7 nodes = fine nodes[1::2]


def _pair_estimates(f, a: float, b: float) -> tuple[float, float, np.ndarray]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _F2_FINE_NODES
    y = np.asarray(f(x), dtype=float)
    fine = half * float(np.dot(_F2_FINE_W, y))
    coarse = half * float(np.dot(_F2_COARSE_W, y[1::2]))
    return fine, coarse, y


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_intervals: int = 4000,
) -> float:
    """Adaptive integral of f over (a, b) with absolute error <= tol*(1+|result|).

    Greedy global strategy: keep a heap of subintervals ranked by the embedded
    pair's error estimate and bisect the worst one. Endpoint singularities are
    admissible because the rule never samples a or b.
    """
    if not (tol > 0.0):
        raise ValidationError(f"tol must be > 0, got {tol}")
    if not (b > a):
        if b == a:
            return 0.0
        raise ValidationError(f"need a < b, got ({a}, {b})")

    fine, coarse, y = _pair_estimates(f, a, b)
    if not np.all(np.isfinite(y)):
        raise NonFiniteSample(f"integrand non-finite inside ({a}, {b})")
    err = abs(fine - coarse)
    heap = [(-err, 0, a, b, fine)]
    total = fine
    total_err = err
    counter = 1
    while total_err > tol * (1.0 + abs(total)):
        if counter >= max_intervals:
            raise MaxSubdivisionsExceeded(
                f"subdivision budget {max_intervals} exhausted; "
                f"estimate {total!r} with error bound {total_err!r}",
                estimate=total,
                err_bound=total_err,
            )
        neg_err, _, lo, hi, est = heapq.heappop(heap)
        if neg_err >= 0.0:
            # every remaining interval is at floating-point resolution; the
            # accumulated budget cannot improve further
            heapq.heappush(heap, (neg_err, counter, lo, hi, est))
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at floating-point resolution; accept as-is
            heapq.heappush(heap, (0.0, counter, lo, hi, est))
            counter += 1
            total_err += neg_err  # remove this interval's error from the budget
            continue
        f1, c1, y1 = _pair_estimates(f, lo, mid)
        f2, c2, y2 = _pair_estimates(f, mid, hi)
        if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
            raise NonFiniteSample(f"integrand non-finite inside ({lo}, {hi})")
        e1 = abs(f1 - c1)
        e2 = abs(f2 - c2)
        total += (f1 + f2) - est
        total_err += (e1 + e2) + neg_err
        heapq.heappush(heap, (-e1, counter, lo, mid, f1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, f2))
        counter += 2
    return total


# --- finite differences ---------------------------------------------------------

_CENTRAL_STENCILS = {
    1: ([-1, 1], [-0.5, 0.5]),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
    5: ([-3, -2, -1, 1, 2, 3], [-0.5, 2.0, -2.5, 2.5, -2.0, 0.5]),
}


def _central(f, x: float, order: int, h: float) -> float:
    offs, coefs = _CENTRAL_STENCILS[order]
    return sum(c * f(x + o * h) for o, c in zip(offs, coefs)) / h**order


def fd_derivative(f, x: float, order: int, h: float) -> float:
    """Central-difference derivative with one Richardson step: O(h^4) for smooth f."""
    if order not in _CENTRAL_STENCILS:
        raise ValidationError(f"order must be in 1..5, got {order}")
    if not (h > 0.0):
        raise ValidationError(f"h must be > 0, got {h}")
    d_h = _central(f, x, order, h)
    d_h2 = _central(f, x, order, 0.5 * h)
    return (4.0 * d_h2 - d_h) / 3.0


def fd_laplacian(f, p: HalfPlanePoint, h: float) -> float:
    """Five-point Laplacian of a field f(x, y) at p; error O(h^2) for C^4 fields."""
    if not (h > 0.0):
        raise ValidationError(f"h must be > 0, got {h}")
    if p.y <= 2.0 * h:
        raise StencilLeavesDomain(
            f"point at y = {p.y} is within 2h = {2 * h} of the boundary"
        )
    x, y = p.x, p.y
    return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)


# --- half-disk grid and L^p norms -----------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Polar tensor grid on the half-disk of radius R with origin-graded radii.

    Radial nodes are r_j = R*(j/nr)^grading for j = 1..nr (strictly increasing,
    first node > 0); angular nodes are phi midpoints in (0, pi).
    """

    R: float
    nr: int = 256
    nphi: int = 256
    grading: float = 2.0

    def __post_init__(self):
        if not (self.R > 0.0):
            raise ValidationError(f"R must be > 0, got {self.R}")
        if self.nr < 8 or self.nphi < 8:
            raise ValidationError(f"need nr, nphi >= 8, got ({self.nr}, {self.nphi})")
        if self.grading < 1.0:
            raise ValidationError(f"grading must be >= 1, got {self.grading}")

    def radial_nodes(self) -> np.ndarray:
        s = np.arange(1, self.nr + 1) / self.nr
        return self.R * s**self.grading

    def radial_weights(self) -> np.ndarray:
        """Weights for integral_0^R phi(r) dr, valid for phi with phi(0) = 0.

        Composite rule in the flattening variable s = (r/R)^(1/grading), using
        the node set of radial_nodes plus the s = 0 endpoint whose term
        vanishes for such phi: Simpson weights when nr is even (exact for the
        graded measure with integer grading <= 3), trapezoid otherwise.
        """
        s = np.arange(1, self.nr + 1) / self.nr
        if self.nr % 2 == 0:
            c = np.empty(self.nr)
            c[0::2] = 4.0 / 3.0  # odd s-indices 1, 3, ...
            c[1::2] = 2.0 / 3.0  # even interior s-indices
            c[-1] = 1.0 / 3.0
        else:
            c = np.ones(self.nr)
            c[-1] = 0.5
        return (self.R * self.grading / self.nr) * c * s ** (self.grading - 1.0)

    def angular_nodes(self) -> np.ndarray:
        return (np.arange(self.nphi) + 0.5) * np.pi / self.nphi

    @property
    def angular_weight(self) -> float:
        return math.pi / self.nphi

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of shape (nr, nphi); every node has y > 0."""
        r = self.radial_nodes()[:, None]
        phi = self.angular_nodes()[None, :]
        return r * np.cos(phi), r * np.sin(phi)

    def refined(self) -> "GridSpec":
        return GridSpec(self.R, 2 * self.nr, 2 * self.nphi, self.grading)


def golden_max(f, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Golden-section maximizer of f on [lo, hi]; returns (argmax, max)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def norm_lp_halfdisk(f, grid: GridSpec, p: float) -> float:
    """L^p norm of a field over the half-disk B_R^+, polar tensor quadrature.

    f must accept numpy arrays (X, Y) elementwise. For p = inf the grid max is
    sharpened by a golden-section search in r along the maximizing ray.
    """
    if not (p >= 1.0):
        raise ValidationError(f"p must be in [1, inf], got {p}")
    X, Y = grid.mesh()
    V = np.asarray(f(X, Y), dtype=float)
    if V.shape != X.shape:
        raise ValidationError("field must evaluate elementwise on the grid")
    if not np.all(np.isfinite(V)):
        raise NonFiniteSample("field evaluated to a non-finite value on the grid")
    absV = np.abs(V)
    if math.isinf(p):
        jmax, lmax = np.unravel_index(np.argmax(absV), absV.shape)
        r_nodes = grid.radial_nodes()
        phi = grid.angular_nodes()[lmax]
        cphi, sphi = math.cos(phi), math.sin(phi)

        def along_ray(r):
            val = f(np.asarray([r * cphi]), np.asarray([r * sphi]))
            return abs(float(np.asarray(val).ravel()[0]))

        lo = r_nodes[jmax - 1] if jmax > 0 else 0.25 * r_nodes[0]
        hi = r_nodes[jmax + 1] if jmax + 1 < grid.nr else grid.R
        _, refined = golden_max(along_ray, lo, hi)
        return max(float(absV[jmax, lmax]), refined, along_ray(grid.R))
    r = grid.radial_nodes()
    wr = grid.radial_weights()
    integral = float(np.sum(absV**p * r[:, None] * wr[:, None]) * grid.angular_weight)
    return integral ** (1.0 / p)


# --- straight-line fits ----------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through scatter data: slope, intercept, r^2."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int


def fit_linear(xs, ys) -> RateFit:
    """Least-squares line y ~ slope*x + intercept."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("xs and ys must be 1D arrays of equal length")
    if x.size < 3:
        raise ValidationError(f"need at least 3 points, got {x.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateDesign("all abscissae identical; cannot fit a line")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ym) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-28 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return RateFit(slope, intercept, r2, int(x.size))


def fit_loglog(xs, ys) -> RateFit:
    """Least-squares line through (log x, log y); slope is the power-law exponent."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValidationError("fit_loglog needs strictly positive data")
    return fit_linear(np.log(x), np.log(y))


def bisect_root(f, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 200):
    """Root of f on [lo, hi] by bisection; None if f does not change sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        return None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < tol * max(1.0, abs(mid)):
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
