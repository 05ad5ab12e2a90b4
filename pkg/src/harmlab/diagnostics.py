"""Derivative closed form for the arctan component and slice diagnostics.

Write f_k(x) = arctan(x/y) * Re((x+iy)^k) with y fixed. Its (k+1)-th
x-derivative collapses to

    (k!/(2r)) * Im( e^{i phi} (1 - e^{-2i phi})^{k+1} ),

with (r, phi) the polar form of (x, y). The complex angle factor has modulus
(2 sin phi)^{k+1}, so the envelope decays like phi^{k+1} as phi -> 0 (the
imaginary part alone gains one extra order for odd k by parity).

The slice diagnostics probe the log component of the integer-power solution:
restricted to a ray y = x tan(theta) it is exactly
c * x^k log x + d * x^k with c = sec^k(theta) sin(k theta) / pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAngle, ValidationError
from .halfplane import HalfPlanePoint
from .numerics import integrate_adaptive

__all__ = [
    "dk1_angle_factor",
    "closed_form_dk1",
    "arctan_component",
    "SliceLogFit",
    "slice_log_fit",
    "SliceCriterionReport",
    "ur_slice_barron_check",
]


def dk1_angle_factor(phi, k: int):
    """Complex angle factor e^{i phi} (1 - e^{-2i phi})^{k+1}, vectorized."""
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    phi = np.asarray(phi, dtype=float)
    return np.exp(1j * phi) * (1.0 - np.exp(-2j * phi)) ** (k + 1)


def closed_form_dk1(p: HalfPlanePoint, k: int) -> float:
    """(k+1)-th x-derivative of arctan(x/y) Re((x+iy)^k) at p, closed form."""
    r = p.r
    return math.factorial(k) / (2.0 * r) * float(dk1_angle_factor(p.phi, k).imag)


def arctan_component(x, y, k: int):
    """f_k(x) = arctan(x/y) Re((x+iy)^k), vectorized; the finite-difference target."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.arctan2(x, y) * ((x + 1j * y) ** k).real


def _dk1_field(xi, k: int):
    """closed_form_dk1 along the line y = 1, vectorized over xi."""
    xi = np.asarray(xi, dtype=float)
    r = np.hypot(xi, 1.0)
    phi = np.arctan2(1.0, xi)
    return math.factorial(k) / (2.0 * r) * dk1_angle_factor(phi, k).imag


@dataclass(frozen=True)
class SliceLogFit:
    """Least-squares coefficients of c x^k log x + d x^k along a ray."""

    c_fit: float
    d_fit: float
    residual: float


def slice_log_fit(k: int, theta: float, n_points: int = 60) -> SliceLogFit:
    """Fit the log component along the ray y = x tan(theta).

    The decomposition is an identity, so the residual sits at machine scale
    and c_fit recovers sec^k(theta) sin(k theta) / pi. Angles with
    k*theta in pi*Z are rejected (the log coefficient vanishes there).
    Angles beyond pi/2 address the reflected ray (x < 0).
    """
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    if n_points < 20:
        raise ValidationError(f"need n_points >= 20, got {n_points}")
    if not (0.0 < theta < math.pi):
        raise ValidationError(f"theta must lie in (0, pi), got {theta}")
    if abs(math.cos(theta)) < 1e-12:
        raise ValidationError("theta = pi/2 has no x-parametrized ray")
    if abs(math.sin(k * theta)) <= 1e-6:
        raise DegenerateAngle(
            f"k*theta = {k * theta} is within 1e-6 of pi*Z; log coefficient vanishes"
        )
    t = np.logspace(-3, 0, n_points)
    sign = 1.0 if math.cos(theta) > 0.0 else -1.0
    x = sign * t
    y = x * math.tan(theta)  # positive on both branches
    ui = (0.5 * np.log(x * x + y * y) / math.pi) * ((x + 1j * y) ** k).imag
    # normal equations; the two-function model is exact, conditioning is benign
    basis = np.column_stack([t**k * np.log(t), t**k])
    coef = np.linalg.solve(basis.T @ basis, basis.T @ ui)
    residual = float(np.max(np.abs(basis @ coef - ui)))
    return SliceLogFit(float(coef[0]), float(coef[1]), residual)


@dataclass(frozen=True)
class SliceCriterionReport:
    """Weighted criterion integral of the arctan-component slice at y = 1.

    `value` integrates |d^(k+1) ((1/2 + arctan/pi) Re((xi+i)^k))| (1+|xi|^k)
    over the whole line (tangent substitution); `cutoff_values` are the same
    integral truncated to [-T, T] for each T in `cutoffs`. Finiteness
    certifies the representation criterion for this component.
    """

    k: int
    value: float
    cutoffs: tuple[float, ...]
    cutoff_values: tuple[float, ...]


def ur_slice_barron_check(
    k: int, cutoffs: tuple[float, ...] = (1e2, 1e3, 1e4), tol: float = 1e-10
) -> SliceCriterionReport:
    """Evaluate the slice criterion integral; the polynomial part contributes zero.

    The integrand decays like |xi|^(k-1) * |xi|^(-(k+1)) ~ xi^(-2) after the
    weight, so the full-line value is finite and cutoff truncations approach
    it at rate 1/T.
    """
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")

    def weighted(xi):
        xi = np.asarray(xi, dtype=float)
        return np.abs(_dk1_field(xi, k)) / math.pi * (1.0 + np.abs(xi) ** k)

    def substituted(eta):
        eta = np.asarray(eta, dtype=float)
        xi = np.tan(eta)
        return weighted(xi) * (1.0 + xi * xi)

    half = math.pi / 2.0
    value = integrate_adaptive(substituted, -half, 0.0, tol=tol) + integrate_adaptive(
        substituted, 0.0, half, tol=tol
    )
    cuts = []
    for T in cutoffs:
        cuts.append(
            integrate_adaptive(weighted, -float(T), 0.0, tol=tol)
            + integrate_adaptive(weighted, 0.0, float(T), tol=tol)
        )
    return SliceCriterionReport(k, value, tuple(float(T) for T in cutoffs), tuple(cuts))
