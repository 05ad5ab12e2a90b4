"""One-dimensional representation criterion and constructive ensembles.

A function f with integrable weighted (k+1)-th derivative,

    integral |f^(k+1)(x)| (1 + |x|^k) dx < infinity,

is representable by sigma_k neurons; the integral upper-bounds the
representation cost up to fixed equivalence constants. The constructive route
is the Riemann-Liouville identity

    f(x) = sum_{i<=k} f^(i)(0)/i! x^i
           + (1/k!) int_0^inf  f^(k+1)(t) sigma_k(x - t) dt
           + ((-1)^(k+1)/k!) int_-inf^0 f^(k+1)(t) sigma_k(t - x) dt,

discretized by a midpoint rule on an equal-mass mesh of |f^(k+1)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ensembles import NeuronEnsemble
from .errors import (
    DivergenceDetected,
    MaxSubdivisionsExceeded,
    NonFiniteSample,
    ValidationError,
)
from .numerics import RateFit, fit_linear, integrate_adaptive

__all__ = [
    "DifferentiableFunction1D",
    "barron_norm_upper",
    "ensemble_from_derivative",
    "xklogx_derivative",
    "log_divergence_diagnostic",
]


@dataclass(frozen=True)
class DifferentiableFunction1D:
    """A function with an analytically supplied (k+1)-th derivative.

    Both callables must accept numpy arrays. `singular_points` declares where
    the derivative blows up (endpoints included in the split logic).
    """

    f: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    k: int
    support: tuple[float, float]
    singular_points: tuple[float, ...] = ()

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        a, b = self.support
        if not (b > a):
            raise ValidationError(f"support must be a nonempty interval, got {self.support}")


def _pieces(df: DifferentiableFunction1D) -> list[tuple[float, float]]:
    a, b = df.support
    cuts = sorted({a, b, *(s for s in df.singular_points if a < s < b), *( [0.0] if a < 0.0 < b else [] )})
    return list(zip(cuts[:-1], cuts[1:]))


def barron_norm_upper(df: DifferentiableFunction1D, tol: float = 1e-9) -> float:
    """integral over the support of |f^(k+1)(x)| (1 + |x|^k) dx.

    Raises DivergenceDetected when adaptive refinement near a singular point
    exhausts its budget with growing partial sums (non-integrable derivative).
    """
    k = df.k

    def weighted(x):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return np.abs(df.deriv(x)) * (1.0 + np.abs(x) ** k)

    total = 0.0
    sing = set(df.singular_points)
    for lo, hi in _pieces(df):
        try:
            total += integrate_adaptive(weighted, lo, hi, tol=tol, max_intervals=6000)
        except MaxSubdivisionsExceeded as exc:
            raise DivergenceDetected(
                f"criterion integral does not converge on ({lo}, {hi}); "
                f"partial sums reached {exc.estimate!r} with error bound {exc.err_bound!r}"
            ) from exc
        except NonFiniteSample:
            if lo in sing or hi in sing:
                raise DivergenceDetected(
                    f"criterion integrand blows up at a declared singular endpoint of ({lo}, {hi})"
                ) from None
            raise
    return total


def _equal_mass_atoms(deriv, lo: float, hi: float, n_cells: int, fine_per_cell: int = 32):
    """Midpoint atoms (node, signed cell integral) on an equal-|mass| partition."""
    n_fine = max(1024, fine_per_cell * n_cells)
    edges = np.linspace(lo, hi, n_fine + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    dens = np.abs(np.asarray(deriv(mids), dtype=float)) * (hi - lo) / n_fine
    cum = np.concatenate([[0.0], np.cumsum(dens)])
    total = cum[-1]
    if total <= 0.0:
        return np.empty(0), np.empty(0)
    targets = np.linspace(0.0, total, n_cells + 1)
    cell_edges = np.interp(targets, cum, edges)
    cell_edges[0], cell_edges[-1] = lo, hi
    cell_edges = np.unique(cell_edges)
    nodes = 0.5 * (cell_edges[:-1] + cell_edges[1:])
    widths = np.diff(cell_edges)
    coefs = np.asarray(deriv(nodes), dtype=float) * widths
    return nodes, coefs


def _monomial_shift_solve(taylor_coefs: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Express sum_i c_i x^i as sum_s lambda_s (x - h_s)^k with k+1 shifts."""
    shifts = np.arange(k + 1, dtype=float) - 0.5 * k
    M = np.empty((k + 1, k + 1))
    for i in range(k + 1):
        for s, h in enumerate(shifts):
            M[i, s] = math.comb(k, i) * (-h) ** (k - i)
    lam = np.linalg.solve(M, taylor_coefs)
    return shifts, lam


def ensemble_from_derivative(
    df: DifferentiableFunction1D, quad_nodes: int, taylor_at_zero
) -> NeuronEnsemble:
    """Discretized Riemann-Liouville representation of f as a sigma_k ensemble.

    `taylor_at_zero` holds the k+1 coefficients f^(i)(0)/i!. The uniform
    discretization error decays like 1/quad_nodes on the support; the reported
    barron_cost tracks the criterion integral plus the polynomial part.
    """
    k = df.k
    taylor = np.asarray(taylor_at_zero, dtype=float)
    if taylor.shape != (k + 1,):
        raise ValidationError(f"need k+1 = {k + 1} taylor coefficients, got {taylor.shape}")
    if quad_nodes < 1:
        raise ValidationError(f"quad_nodes must be >= 1, got {quad_nodes}")
    barron_norm_upper(df)  # raises DivergenceDetected on non-integrable input

    lo, hi = df.support
    coefs: list[float] = []
    ws: list[float] = []
    bs: list[float] = []

    fact = math.factorial(k)
    right = (max(lo, 0.0), hi)
    left = (lo, min(hi, 0.0))
    has_right = right[1] > right[0]
    has_left = left[1] > left[0]
    n_right = quad_nodes if not has_left else max(1, quad_nodes // 2)
    n_left = quad_nodes - n_right if has_right else quad_nodes

    if has_right:
        nodes, cell = _equal_mass_atoms(df.deriv, right[0], right[1], n_right)
        for t, c in zip(nodes, cell):
            if c != 0.0:
                coefs.append(c / fact)
                ws.append(1.0)
                bs.append(-t)
    if has_left and n_left > 0:
        nodes, cell = _equal_mass_atoms(df.deriv, left[0], left[1], n_left)
        sign = (-1.0) ** (k + 1)
        for t, c in zip(nodes, cell):
            if c != 0.0:
                coefs.append(sign * c / fact)
                ws.append(-1.0)
                bs.append(t)

    if np.any(taylor != 0.0):
        shifts, lam = _monomial_shift_solve(taylor, k)
        scale = max(1.0, float(np.max(np.abs(lam))))
        for h, l in zip(shifts, lam):
            if abs(l) > 1e-14 * scale:
                coefs.append(l)
                ws.append(1.0)
                bs.append(-h)
                coefs.append((-1.0) ** k * l)
                ws.append(-1.0)
                bs.append(h)

    return NeuronEnsemble.from_signed_atoms(
        np.asarray(coefs), np.asarray(ws), np.asarray(bs), float(k)
    )


def xklogx_derivative(k: int):
    """The (k+1)-th derivative of x^k log x as a termwise Leibniz sum (vectorized).

    The l-th term pairs d^l x^k with d^(k+1-l) log x; the sum collapses to a
    constant multiple of 1/x, which is what the divergence diagnostic probes.
    """
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    terms = []
    for l in range(k + 1):
        c = (
            math.comb(k + 1, l)
            * (math.factorial(k) // math.factorial(k - l))
            * (-1.0) ** (k - l)
            * math.factorial(k - l)
        )
        terms.append((c, k - l, -(k + 1 - l)))  # c * x^(k-l) * x^(-(k+1-l))

    def deriv(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, p1, p2 in terms:
            out += c * x**p1 * x**p2
        return out

    return deriv


def log_divergence_diagnostic(k: int, deltas) -> RateFit:
    """Fit I(delta) = int_delta^1 |d^(k+1)(x^k log x)| (1 + x^k) dx against |log delta|.

    The slope estimates the divergence constant (k! for this family) and
    r^2 >= 0.999 certifies logarithmic blow-up of the criterion integral.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.ndim != 1 or deltas.size < 3:
        raise ValidationError("need at least 3 delta values")
    if np.any(deltas <= 0.0) or np.any(deltas >= 1.0):
        raise ValidationError("deltas must lie in (0, 1)")
    if np.any(np.diff(deltas) >= 0.0):
        raise ValidationError("deltas must be strictly decreasing")
    if deltas[-1] < 1e-8:
        raise ValidationError("deltas below 1e-8 are not resolved")
    dk1 = xklogx_derivative(k)

    def weighted(x):
        return np.abs(dk1(x)) * (1.0 + x**k)

    values = [integrate_adaptive(weighted, float(d), 1.0, tol=1e-11) for d in deltas]
    return fit_linear(np.abs(np.log(deltas)), values)
