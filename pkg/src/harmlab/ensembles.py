"""Finite neuron ensembles: empirical measures over parameter triples (a, w, b).

An ensemble represents f(x) = sum_i p_i * a_i * sigma_alpha(w_i . x + b_i)
with probability weights p_i. Probability weights (rather than the uniform
1/n convention) let deterministic quadrature lifts and random subsamples share
one type; `sample_subnetwork` converts back to the 1/n convention.

sigma_alpha(z) = max(z, 0)^alpha; alpha = 0 is the right-continuous indicator
1_{z > 0} (so the value at z = 0 is 0).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaTooLarge,
    DimensionMismatch,
    ValidationError,
    ZeroDirection,
)
from .numerics import QuadratureRule

__all__ = [
    "Neuron",
    "NeuronEnsemble",
    "activation",
    "ensemble_eval",
    "ensemble_eval_many",
    "ensemble_derivatives",
    "barron_cost",
    "cauchy_tangent_rule",
    "cauchy_midpoint_rule",
    "lift_ensemble",
    "slice_ensemble",
    "homogeneous_extend",
    "sample_subnetwork",
    "save_ensemble",
    "load_ensemble",
]

_EVAL_CHUNK = 2_000_000  # max atoms*points per evaluation block


@dataclass(frozen=True)
class Neuron:
    """One parameter triple: outer weight a, inner weight vector w, bias b."""

    a: float
    w: tuple[float, ...]
    b: float


def activation(z, alpha: float):
    """sigma_alpha(z) = max(z,0)^alpha elementwise; indicator 1_{z>0} for alpha = 0."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    m = z > 0.0
    if alpha == 0.0:
        out[m] = 1.0
    else:
        out[m] = z[m] ** alpha
    return out


class NeuronEnsemble:
    """Immutable weighted collection of neurons with a shared activation power."""

    __slots__ = ("probs", "a", "w", "b", "alpha", "dim")

    def __init__(self, probs, a, w, b, alpha: float):
        probs = np.ascontiguousarray(probs, dtype=float)
        a = np.ascontiguousarray(a, dtype=float)
        w = np.ascontiguousarray(w, dtype=float)
        b = np.ascontiguousarray(b, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        if w.ndim != 2 or w.shape[1] not in (1, 2):
            raise ValidationError(f"w must have shape (n,) or (n, d) with d in {{1,2}}, got {w.shape}")
        n = w.shape[0]
        if not (probs.shape == a.shape == b.shape == (n,)):
            raise ValidationError("probs, a, b must be 1D arrays matching the number of neurons")
        if n == 0:
            raise ValidationError("ensemble must contain at least one neuron")
        if not (alpha >= 0.0 and math.isfinite(alpha)):
            raise ValidationError(f"alpha must be finite and >= 0, got {alpha}")
        for name, arr in (("probs", probs), ("a", a), ("w", w), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contains non-finite entries")
        if np.any(probs < 0.0):
            raise ValidationError("probability weights must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValidationError(f"probability weights sum to {probs.sum()!r}, not 1")
        for arr in (probs, a, w, b):
            arr.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "dim", int(w.shape[1]))

    def __setattr__(self, *_):
        raise AttributeError("NeuronEnsemble is immutable")

    def __len__(self) -> int:
        return self.w.shape[0]

    def neurons(self) -> list[Neuron]:
        """Item view; convenience for small ensembles."""
        return [
            Neuron(float(ai), tuple(map(float, wi)), float(bi))
            for ai, wi, bi in zip(self.a, self.w, self.b)
        ]

    @classmethod
    def from_signed_atoms(cls, coefs, ws, bs, alpha: float) -> "NeuronEnsemble":
        """Build an ensemble representing sum_i coef_i * sigma_alpha(w_i x + b_i).

        Probability weights are |coef_i| normalized; outer weights carry the
        sign and the total mass. Zero coefficients are dropped.
        """
        coefs = np.asarray(coefs, dtype=float)
        ws = np.asarray(ws, dtype=float)
        bs = np.asarray(bs, dtype=float)
        keep = coefs != 0.0
        if not np.any(keep):
            # represent the zero function with one null neuron
            w0 = ws[:1] if ws.size else np.array([1.0])
            return cls(np.array([1.0]), np.array([0.0]), w0[:1], np.array([0.0]), alpha)
        coefs, bs = coefs[keep], bs[keep]
        ws = ws[keep]
        total = np.abs(coefs).sum()
        probs = np.abs(coefs) / total
        a = np.sign(coefs) * total
        return cls(probs, a, ws, bs, alpha)


def _check_dim(e: NeuronEnsemble, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (e.dim,):
        raise DimensionMismatch(f"point of shape {x.shape} fed to a dim-{e.dim} ensemble")
    return x


def ensemble_eval(e: NeuronEnsemble, x) -> float:
    """f(x) = sum_i p_i a_i sigma_alpha(w_i . x + b_i) at a single point."""
    x = _check_dim(e, x)
    z = e.w @ x + e.b
    return float(np.dot(e.probs * e.a, activation(z, e.alpha)))


def ensemble_eval_many(e: NeuronEnsemble, xs) -> np.ndarray:
    """Vectorized evaluation at points of shape (m,) for d=1 or (m, 2) for d=2."""
    xs = np.asarray(xs, dtype=float)
    if e.dim == 1:
        pts = xs.reshape(-1, 1)
    else:
        if xs.ndim != 2 or xs.shape[1] != 2:
            raise DimensionMismatch(f"points of shape {xs.shape} fed to a dim-2 ensemble")
        pts = xs
    m = pts.shape[0]
    out = np.zeros(m)
    pa = e.probs * e.a
    step = max(1, _EVAL_CHUNK // max(1, m))
    for lo in range(0, len(e), step):
        hi = min(lo + step, len(e))
        Z = pts @ e.w[lo:hi].T + e.b[lo:hi]
        out += activation(Z, e.alpha) @ pa[lo:hi]
    return out.reshape(xs.shape if e.dim == 1 else (m,))


def ensemble_derivatives(e: NeuronEnsemble, xs, order: int) -> list[np.ndarray]:
    """Partial-derivative components of order `order` at many points.

    Returns [f] for order 0; [f_x] (d=1) or [f_x, f_y] (d=2) for order 1;
    [f_xx] (d=1) or [f_xx, f_xy, f_yy] (d=2) for order 2. Each neuron
    differentiates analytically: D^m sigma_alpha = prod_{i<m}(alpha-i) *
    sigma_(alpha-m) * w^(tensor m).
    """
    if order not in (0, 1, 2):
        raise ValidationError(f"order must be 0, 1 or 2, got {order}")
    xs = np.asarray(xs, dtype=float)
    pts = xs.reshape(-1, 1) if e.dim == 1 else xs
    if e.dim == 2 and (pts.ndim != 2 or pts.shape[1] != 2):
        raise DimensionMismatch(f"points of shape {xs.shape} fed to a dim-2 ensemble")
    m = pts.shape[0]
    coef = 1.0
    for i in range(order):
        coef *= e.alpha - i
    ncomp = 1 if e.dim == 1 or order == 0 else (2 if order == 1 else 3)
    outs = [np.zeros(m) for _ in range(ncomp)]
    step = max(1, _EVAL_CHUNK // max(1, m))
    for lo in range(0, len(e), step):
        hi = min(lo + step, len(e))
        wj = e.w[lo:hi]
        Z = pts @ wj.T + e.b[lo:hi]
        S = activation(Z, e.alpha - order) * coef if order else activation(Z, e.alpha)
        pa = (e.probs * e.a)[lo:hi]
        if e.dim == 1:
            outs[0] += S @ (pa * wj[:, 0] ** order)
        elif order == 0:
            outs[0] += S @ pa
        elif order == 1:
            outs[0] += S @ (pa * wj[:, 0])
            outs[1] += S @ (pa * wj[:, 1])
        else:
            outs[0] += S @ (pa * wj[:, 0] * wj[:, 0])
            outs[1] += S @ (pa * wj[:, 0] * wj[:, 1])
            outs[2] += S @ (pa * wj[:, 1] * wj[:, 1])
    return outs


def barron_cost(e: NeuronEnsemble) -> float:
    """E[|a| (|w| + |b|)^alpha] for this representation (upper-bounds the Barron norm)."""
    wnorm = np.linalg.norm(e.w, axis=1)
    base = wnorm + np.abs(e.b)
    if e.alpha == 0.0:
        powered = np.ones_like(base)
    else:
        powered = base**e.alpha
    return float(np.dot(e.probs, np.abs(e.a) * powered))


# --- Cauchy-node rules for the harmonic lift -----------------------------------


def cauchy_tangent_rule(n: int = 201) -> QuadratureRule:
    """Gauss-Legendre nodes on (-pi/2, pi/2) pushed through tan.

    Integrates h against the Cauchy probability density 1/(pi (1+t^2)):
    sum_j q_j h(t_j) with q_j summing to 1. Node computation goes through a
    dense eigensolve, so n is capped; use cauchy_midpoint_rule or
    cauchy_graded_rule for dense lifts.
    """
    if n > 2000:
        raise ValidationError(
            f"n = {n} too large for Gauss-Legendre node computation; "
            "use cauchy_midpoint_rule or cauchy_graded_rule for dense lifts"
        )
    x, w = np.polynomial.legendre.leggauss(int(n))
    psi = 0.5 * np.pi * x
    q = 0.5 * w  # GL weights scaled to (-pi/2, pi/2), divided by pi
    q = q / q.sum()  # exact normalization against rounding
    return QuadratureRule(np.tan(psi), q, (-math.inf, math.inf), 1.0)


def cauchy_midpoint_rule(n: int) -> QuadratureRule:
    """Uniform midpoint rule in the angle variable, pushed through tan.

    All weights equal 1/n, so the rule integrates indicator data with error
    at most 1/(2n); use for step-activation lifts needing guaranteed bounds.
    """
    psi = (-0.5 + (np.arange(int(n)) + 0.5) / int(n)) * np.pi
    q = np.full(int(n), 1.0 / int(n))
    return QuadratureRule(np.tan(psi), q, (-math.inf, math.inf), 1.0)


def cauchy_graded_rule(n: int, grading: float = 4.0) -> QuadratureRule:
    """Midpoint rule on an angle mesh graded toward +-pi/2, pushed through tan.

    Boundary data growing like |t|^alpha turns into an endpoint singularity
    (pi/2 - psi)^(-alpha) in the angle variable; clustering cells there (cell
    edges pi/2 * (1 - (1-s)^grading)) restores fast convergence of the lift
    for 0 < alpha < 1.
    """
    half = (int(n) + 1) // 2
    s = np.arange(half + 1) / half
    u = (1.0 - s) ** grading  # decreasing 1 -> 0; cell width prop. to u_i - u_{i+1}
    du = u[:-1] - u[1:]
    umid = 0.5 * (u[:-1] + u[1:])
    psi_pos = 0.5 * np.pi * (1.0 - umid)
    psi = np.concatenate([-psi_pos[::-1], psi_pos])
    q = np.concatenate([du[::-1], du]) * 0.25
    q = q / q.sum()
    return QuadratureRule(np.tan(psi), q, (-math.inf, math.inf), 1.0)


def lift_ensemble(
    e: NeuronEnsemble,
    t_rule: QuadratureRule | None = None,
    n_samples: int | None = None,
    seed: int | None = None,
) -> NeuronEnsemble:
    """Harmonic-extension lift of a 1D ensemble to the half-plane.

    Push-forward along (a, w, b; t) -> (a, (w, t*w), b) with t Cauchy
    distributed: deterministic nodes from `t_rule` (default 201 tangent-mapped
    Gauss-Legendre nodes), or iid Cauchy draws when `n_samples` is given.
    Requires alpha < 1 so the lifted cost stays finite.
    """
    if e.dim != 1:
        raise DimensionMismatch("lift_ensemble needs a one-dimensional ensemble")
    if e.alpha >= 1.0:
        raise AlphaTooLarge(
            f"alpha = {e.alpha} >= 1: the Cauchy moment of (1+|t|)^alpha diverges"
        )
    w1 = e.w[:, 0]
    if n_samples is not None:
        if n_samples < 1:
            raise ValidationError(f"n_samples must be >= 1, got {n_samples}")
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(e), size=int(n_samples), p=e.probs)
        t = rng.standard_cauchy(int(n_samples))
        probs = np.full(int(n_samples), 1.0 / int(n_samples))
        w2d = np.column_stack([w1[idx], t * w1[idx]])
        return NeuronEnsemble(probs, e.a[idx], w2d, e.b[idx], e.alpha)
    rule = t_rule if t_rule is not None else cauchy_tangent_rule(201)
    t = rule.nodes
    q = rule.weights / rule.weights.sum()
    probs = np.repeat(e.probs, t.size) * np.tile(q, len(e))
    probs = probs / probs.sum()
    a = np.repeat(e.a, t.size)
    b = np.repeat(e.b, t.size)
    wrep = np.repeat(w1, t.size)
    w2d = np.column_stack([wrep, np.tile(t, len(e)) * wrep])
    return NeuronEnsemble(probs, a, w2d, b, e.alpha)


def slice_ensemble(e: NeuronEnsemble, x0, v) -> NeuronEnsemble:
    """Restriction to the line t -> x0 + t*v: neuron (a, w, b) -> (a, w.v, w.x0 + b)."""
    if e.dim != 2:
        raise DimensionMismatch("slice_ensemble needs a two-dimensional ensemble")
    x0 = np.asarray(x0, dtype=float)
    v = np.asarray(v, dtype=float)
    if x0.shape != (2,) or v.shape != (2,):
        raise ValidationError("x0 and v must be 2-vectors")
    if np.linalg.norm(v) == 0.0:
        raise ZeroDirection("slice direction must be nonzero")
    return NeuronEnsemble(e.probs, e.a, e.w @ v, e.w @ x0 + e.b, e.alpha)


def homogeneous_extend(e: NeuronEnsemble, alpha: float | None = None) -> NeuronEnsemble:
    """Degree-alpha homogeneous extension of a 1D ensemble to the half-plane.

    Neuron (a, w, b) -> (a, (w, b), 0), so the extension equals
    y^alpha * f(x/y) for y > 0 exactly.
    """
    if e.dim != 1:
        raise DimensionMismatch("homogeneous_extend needs a one-dimensional ensemble")
    if alpha is not None and alpha != e.alpha:
        raise ValidationError(
            f"extension power {alpha} must match the ensemble activation power {e.alpha}"
        )
    w2d = np.column_stack([e.w[:, 0], e.b])
    return NeuronEnsemble(e.probs, e.a, w2d, np.zeros(len(e)), e.alpha)


def sample_subnetwork(e: NeuronEnsemble, n: int, seed: int | None = None) -> NeuronEnsemble:
    """n iid draws from the ensemble's categorical distribution, 1/n convention.

    The returned network is unbiased for f; its barron_cost matches the target
    cost in expectation (the per-draw coefficient bound).
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(e), size=int(n), p=e.probs)
    probs = np.full(int(n), 1.0 / int(n))
    return NeuronEnsemble(probs, e.a[idx], e.w[idx], e.b[idx], e.alpha)


# --- flat text serialization -----------------------------------------------------

_HEADER_RE = re.compile(
    r"^#barron-ensemble v1 alpha=(?P<alpha>[^ ]+) dim=(?P<dim>[12])$"
)


def save_ensemble(e: NeuronEnsemble, path) -> None:
    """One neuron per line: `prob a w_1 [w_2] b`, doubles at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#barron-ensemble v1 alpha={e.alpha:.17g} dim={e.dim}\n")
        for p, a, wrow, b in zip(e.probs, e.a, e.w, e.b):
            cols = [p, a, *wrow, b]
            fh.write(" ".join(f"{c:.17g}" for c in cols) + "\n")


def load_ensemble(path) -> NeuronEnsemble:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        m = _HEADER_RE.match(header)
        if not m:
            raise ValidationError(f"bad ensemble header: {header!r}")
        alpha = float(m.group("alpha"))
        dim = int(m.group("dim"))
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 + dim:
                raise ValidationError(f"line {lineno}: expected {3 + dim} columns, got {len(parts)}")
            rows.append([float(t) for t in parts])
    if not rows:
        raise ValidationError("ensemble file has no neurons")
    arr = np.asarray(rows, dtype=float)
    return NeuronEnsemble(arr[:, 0], arr[:, 1], arr[:, 2 : 2 + dim], arr[:, 2 + dim], alpha)
