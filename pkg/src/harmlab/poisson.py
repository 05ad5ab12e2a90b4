"""Harmonic extension of sublinear boundary data via the half-plane Poisson kernel.

The extension of g is u(x, y) = (1/pi) * integral g(x + t*y) / (1 + t^2) dt,
the unique harmonic function with boundary values g that grows sublinearly.
The integral is split into |t| <= 1 plus two tails mapped by z = 1/|t|, so an
adaptive rule only ever sees a finite interval with at worst an integrable
algebraic singularity at z = 0 (growth exponent alpha < 1). Activation kinks
are split off exactly to keep full convergence order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GrowthViolation, MaxSubdivisionsExceeded, QuadratureFailure, ValidationError
from .halfplane import HalfPlanePoint
from .numerics import GridSpec, integrate_adaptive

__all__ = ["BoundaryFunction", "solve_at", "solve_grid"]


@dataclass(frozen=True)
class BoundaryFunction:
    """Admissible boundary data g with a growth certificate |g(t)| <= C(1+|t|)^alpha.

    Use the constructors: relu_power, heaviside, tanh, polynomial, custom.
    `kinks` lists boundary abscissae where g is not smooth.
    """

    tag: str
    fn: Callable[[np.ndarray], np.ndarray]
    growth_alpha: float
    growth_const: float
    kinks: tuple[float, ...] = field(default_factory=tuple)

    def __call__(self, s):
        return self.fn(np.asarray(s, dtype=float))

    @classmethod
    def relu_power(cls, alpha: float, w: float = 1.0, b: float = 0.0) -> "BoundaryFunction":
        """g(s) = max(w*s + b, 0)^alpha with alpha in [0, 1)."""
        if not (0.0 <= alpha < 1.0):
            raise ValidationError(f"relu_power requires alpha in [0, 1), got {alpha}")
        if w == 0.0:
            raise ValidationError("relu_power requires w != 0")

        if alpha == 0.0:
            def fn(s):
                return (w * s + b > 0.0).astype(float)
        else:
            def fn(s):
                z = w * s + b
                out = np.zeros_like(z)
                m = z > 0.0
                out[m] = z[m] ** alpha
                return out

        c = (abs(w) + abs(b)) ** alpha if alpha > 0.0 else 1.0
        return cls("relu_power", fn, alpha, c, kinks=(-b / w,))

    @classmethod
    def heaviside(cls) -> "BoundaryFunction":
        return cls("heaviside", lambda s: (s > 0.0).astype(float), 0.0, 1.0, kinks=(0.0,))

    @classmethod
    def tanh(cls, w: float = 1.0, b: float = 0.0) -> "BoundaryFunction":
        """g(s) = tanh(w*s + b); bounded, so growth_alpha = 0."""
        return cls("tanh", lambda s: np.tanh(w * s + b), 0.0, 1.0)

    @classmethod
    def polynomial(cls, coeffs) -> "BoundaryFunction":
        """g(s) = sum_i coeffs[i] * s^i; growth_alpha is the effective degree."""
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ValidationError("polynomial needs at least one coefficient")
        deg = max((i for i, c in enumerate(coeffs) if c != 0.0), default=0)
        poly = np.polynomial.Polynomial(coeffs)
        return cls("polynomial", lambda s: poly(s), float(deg), float(sum(abs(c) for c in coeffs)))

    @classmethod
    def custom(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        growth_alpha: float,
        growth_const: float,
        kinks: tuple[float, ...] = (),
    ) -> "BoundaryFunction":
        return cls("custom", fn, float(growth_alpha), float(growth_const), tuple(kinks))


def _segments(interior: list[float], lo: float, hi: float) -> list[tuple[float, float]]:
    edges = [lo, *sorted(t for t in interior if lo < t < hi), hi]
    return list(zip(edges[:-1], edges[1:]))


def solve_at(g: BoundaryFunction, p: HalfPlanePoint, tol: float = 1e-9) -> float:
    """Poisson-kernel value of the harmonic extension of g at p.

    Raises GrowthViolation when the declared growth exponent is >= 1 (the
    representation integral diverges) and QuadratureFailure when the adaptive
    rule cannot reach the tolerance.
    """
    if g.growth_alpha >= 1.0:
        raise GrowthViolation(
            f"boundary growth exponent {g.growth_alpha} >= 1: kernel integral diverges"
        )
    if not (tol > 0.0):
        raise ValidationError(f"tol must be > 0, got {tol}")
    x, y = p.x, p.y
    t_kinks = [(s - x) / y for s in g.kinks]

    def middle(t):
        return g(x + t * y) / (1.0 + t * t)

    def tail_pos(z):
        # t = 1/z maps t >= 1 onto (0, 1]
        return g(x + y / z) / (1.0 + z * z)

    def tail_neg(z):
        return g(x - y / z) / (1.0 + z * z)

    pos_kz = [1.0 / t for t in t_kinks if t > 1.0]
    neg_kz = [-1.0 / t for t in t_kinks if t < -1.0]
    pieces: list[tuple[Callable, float, float]] = []
    pieces += [(middle, lo, hi) for lo, hi in _segments(t_kinks, -1.0, 1.0)]
    pieces += [(tail_pos, lo, hi) for lo, hi in _segments(pos_kz, 0.0, 1.0)]
    pieces += [(tail_neg, lo, hi) for lo, hi in _segments(neg_kz, 0.0, 1.0)]

    piece_tol = tol / len(pieces)
    total = 0.0
    try:
        for fn, lo, hi in pieces:
            total += integrate_adaptive(fn, lo, hi, tol=piece_tol, max_intervals=20000)
    except MaxSubdivisionsExceeded as exc:
        raise QuadratureFailure(f"kernel quadrature failed at ({x}, {y}): {exc}") from exc
    return total / math.pi


def solve_grid(g: BoundaryFunction, grid: GridSpec, tol: float = 1e-9) -> np.ndarray:
    """Elementwise solve_at over the grid nodes; shape (nr, nphi), deterministic."""
    X, Y = grid.mesh()
    out = np.empty_like(X)
    for idx in np.ndindex(X.shape):
        out[idx] = solve_at(g, HalfPlanePoint(float(X[idx]), float(Y[idx])), tol)
    return out
