"""Closed-form harmonic extensions of ReLU^alpha boundary data on the half-plane.

Integer powers k get

    u_k(x, y) = (arctan(x/y)/pi + 1/2) * Re((x+iy)^k) - (log r / pi) * Im((x+iy)^k),

non-integer powers get

    u_alpha(x, y) = Re((x+iy)^alpha) - cot(pi*alpha) * Im((x+iy)^alpha),

both with the principal branch continued from the positive real axis. The
regularized family u_{eps,k} replaces log(r^2) by log(r^2 + eps^2) in the
integer formula and extends to the closed half-plane.

Scalar evaluators take a `HalfPlanePoint`; the `*_field` functions are
vectorized over numpy arrays and back the norm/rate experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearIntegerAlpha, NonpositiveEpsilon, ValidationError
from .halfplane import HalfPlanePoint, power_re_im

__all__ = [
    "SolutionKind",
    "eval_u_integer",
    "eval_u_fractional",
    "eval_u_half",
    "eval_u_three_half",
    "eval_heaviside",
    "eval_components",
    "eval_u_reg",
    "u_integer_field",
    "u_fractional_field",
    "heaviside_field",
    "reg_diff_value",
    "reg_diff_gradient",
    "reg_diff_hessian",
]

_NEAR_INT_CUTOFF = 1e-9


def _check_fractional(alpha: float) -> None:
    if alpha <= 0.0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    if abs(alpha - round(alpha)) <= _NEAR_INT_CUTOFF:
        raise NearIntegerAlpha(
            f"alpha = {alpha} is within 1e-9 of an integer; cot(pi*alpha) is not usable"
        )


def _check_k(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")


@dataclass(frozen=True)
class SolutionKind:
    """Tagged description of one member of the closed-form family.

    tag is one of 'integer', 'fractional', 'heaviside', 'regularized'.
    """

    tag: str
    k: int = 0
    alpha: float = 0.0
    epsilon: float = 0.0

    @classmethod
    def integer_power(cls, k: int) -> "SolutionKind":
        _check_k(k)
        return cls("integer", k=k)

    @classmethod
    def fractional_power(cls, alpha: float) -> "SolutionKind":
        _check_fractional(alpha)
        return cls("fractional", alpha=alpha)

    @classmethod
    def heaviside(cls) -> "SolutionKind":
        return cls("heaviside")

    @classmethod
    def regularized(cls, k: int, epsilon: float) -> "SolutionKind":
        _check_k(k)
        if not (epsilon > 0.0):
            raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")
        return cls("regularized", k=k, epsilon=epsilon)

    def evaluate(self, p: HalfPlanePoint) -> float:
        if self.tag == "integer":
            return eval_u_integer(p, self.k)
        if self.tag == "fractional":
            return eval_u_fractional(p, self.alpha)
        if self.tag == "heaviside":
            return eval_heaviside(p)
        if self.tag == "regularized":
            return eval_u_reg(p.x, p.y, self.epsilon, self.k)
        raise ValidationError(f"unknown solution tag {self.tag!r}")


def _prefactor(x: float, y: float) -> float:
    """arctan(x/y)/pi + 1/2, extended to y = 0 by the Heaviside convention."""
    if y > 0.0:
        return math.atan2(x, y) / math.pi + 0.5
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return 0.0
    return 0.5


def eval_u_integer(p: HalfPlanePoint, k: int) -> float:
    """Harmonic extension of ReLU^k boundary data, integer k >= 1."""
    _check_k(k)
    re, im = power_re_im(p.x, p.y, k)
    logr = 0.5 * math.log(p.x * p.x + p.y * p.y)
    return _prefactor(p.x, p.y) * re - (logr / math.pi) * im


def eval_components(p: HalfPlanePoint, k: int) -> tuple[float, float]:
    """The two pieces (arctan part, log part) whose difference is eval_u_integer."""
    _check_k(k)
    re, im = power_re_im(p.x, p.y, k)
    logr = 0.5 * math.log(p.x * p.x + p.y * p.y)
    return _prefactor(p.x, p.y) * re, (logr / math.pi) * im


def eval_u_fractional(p: HalfPlanePoint, alpha: float) -> float:
    """Harmonic extension of ReLU^alpha boundary data, alpha > 0 non-integer.

    This is the unique alpha-homogeneous harmonic function with boundary
    values ReLU^alpha(x); the coefficient -cot(pi*alpha) on the imaginary
    part is forced by the vanishing on the negative axis.
    """
    _check_fractional(alpha)
    re, im = power_re_im(p.x, p.y, alpha)
    cot = math.cos(math.pi * alpha) / math.sin(math.pi * alpha)
    return re - cot * im


def eval_u_half(p: HalfPlanePoint) -> float:
    """Closed algebraic form sqrt((r + x)/2) of the alpha = 1/2 extension."""
    return math.sqrt(0.5 * (math.hypot(p.x, p.y) + p.x))


def eval_u_three_half(p: HalfPlanePoint) -> float:
    """Closed algebraic form of the alpha = 3/2 extension (triple-angle identity)."""
    r = math.hypot(p.x, p.y)
    c = 0.5 * (r + p.x)
    s = 0.5 * (r - p.x)
    return c * math.sqrt(c) - 3.0 * math.sqrt(c) * s


def eval_heaviside(p: HalfPlanePoint) -> float:
    """Harmonic extension of the Heaviside step: 1/2 + arctan(x/y)/pi, in (0, 1)."""
    return _prefactor(p.x, p.y)


def eval_u_reg(x: float, y: float, epsilon: float, k: int) -> float:
    """Regularized integer-power solution, finite on the closed half-plane.

    Same arctan prefactor as eval_u_integer (Heaviside convention at y = 0),
    with log(x^2 + y^2 + eps^2)/(2*pi) in place of log(r)/pi. Not harmonic for
    eps > 0; converges pointwise to eval_u_integer as eps -> 0 when y > 0.
    """
    _check_k(k)
    if not (epsilon > 0.0):
        raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")
    if y < 0.0:
        raise ValidationError(f"eval_u_reg needs y >= 0, got y = {y}")
    re, im = power_re_im(x, y, k)
    logreg = math.log(x * x + y * y + epsilon * epsilon)
    return _prefactor(x, y) * re - (logreg / (2.0 * math.pi)) * im


# --- vectorized fields --------------------------------------------------------


def u_integer_field(X, Y, k: int):
    """Vectorized eval_u_integer on arrays with Y > 0 elementwise."""
    _check_k(k)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = X + 1j * Y
    W = Z**k
    pref = np.arctan2(X, Y) / np.pi + 0.5
    logr = 0.5 * np.log(X * X + Y * Y)
    return pref * W.real - (logr / np.pi) * W.imag


def u_fractional_field(X, Y, alpha: float):
    """Vectorized eval_u_fractional on arrays with Y > 0 elementwise."""
    _check_fractional(alpha)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = X + 1j * Y
    W = Z**alpha  # numpy principal branch; arg in (0, pi) on the half-plane
    cot = math.cos(math.pi * alpha) / math.sin(math.pi * alpha)
    return W.real - cot * W.imag


def heaviside_field(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return np.arctan2(X, Y) / np.pi + 0.5


# --- regularization error v = u_{eps,k} - u_k and its derivatives -------------
#
# With A = r^2 + eps^2, B = r^2, Q = Im(z^k):
#   v = -(1/2pi) * D * Q,                    D = log(A) - log(B) = log1p(eps^2/B)
#   D_x = 2x G,  D_y = 2y G,                 G = 1/A - 1/B = -eps^2/(A B)
#   D_xx = 2G - 4x^2 H, D_xy = -4xy H,       H = 1/A^2 - 1/B^2 = -eps^2 (A+B)/(A B)^2
#   D_yy = 2G - 4y^2 H
# and Q-derivatives follow from d/dx z^k = k z^(k-1), d/dy z^k = i k z^(k-1).
# The G, H forms are cancellation-free, which matters for eps^2 << r^2.


def _check_reg_args(epsilon: float, k: int) -> None:
    _check_k(k)
    if not (epsilon > 0.0):
        raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")


def reg_diff_value(X, Y, epsilon: float, k: int):
    """v = u_{eps,k} - u_k = -(1/2pi) log(1 + eps^2/r^2) Im(z^k), vectorized."""
    _check_reg_args(epsilon, k)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    B = X * X + Y * Y
    Q = ((X + 1j * Y) ** k).imag
    D = np.log1p(epsilon * epsilon / B)
    return -(0.5 / np.pi) * D * Q


def reg_diff_gradient(X, Y, epsilon: float, k: int):
    """(v_x, v_y) of the regularization error, closed form, vectorized."""
    _check_reg_args(epsilon, k)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    e2 = epsilon * epsilon
    B = X * X + Y * Y
    A = B + e2
    Z = X + 1j * Y
    Zk1 = Z ** (k - 1)
    Q = (Zk1 * Z).imag
    Qx = k * Zk1.imag
    Qy = k * Zk1.real
    D = np.log1p(e2 / B)
    G = -e2 / (A * B)
    c = -(0.5 / np.pi)
    return c * (2.0 * X * G * Q + D * Qx), c * (2.0 * Y * G * Q + D * Qy)


def reg_diff_hessian(X, Y, epsilon: float, k: int):
    """(v_xx, v_xy, v_yy) of the regularization error, closed form, vectorized."""
    _check_reg_args(epsilon, k)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    e2 = epsilon * epsilon
    B = X * X + Y * Y
    A = B + e2
    Z = X + 1j * Y
    if k >= 2:
        Zk2 = Z ** (k - 2)
        Zk1 = Zk2 * Z
    else:
        Zk1 = Z ** (k - 1)
        Zk2 = np.zeros_like(Zk1)
    Q = (Zk1 * Z).imag
    Qx = k * Zk1.imag
    Qy = k * Zk1.real
    kk1 = k * (k - 1)
    Qxx = kk1 * Zk2.imag
    Qxy = kk1 * Zk2.real
    Qyy = -Qxx
    D = np.log1p(e2 / B)
    AB = A * B
    G = -e2 / AB
    H = -e2 * (A + B) / (AB * AB)
    c = -(0.5 / np.pi)
    vxx = c * ((2.0 * G - 4.0 * X * X * H) * Q + 4.0 * X * G * Qx + D * Qxx)
    vxy = c * (-4.0 * X * Y * H * Q + 2.0 * X * G * Qy + 2.0 * Y * G * Qx + D * Qxy)
    vyy = c * ((2.0 * G - 4.0 * Y * Y * H) * Q + 4.0 * Y * G * Qy + D * Qyy)
    return vxx, vxy, vyy
