"""Admissible boundary densities 0 ≤ ρ ≤ 1 with ∫_Γ ρ ds = α|Γ|."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import BoundaryCurve

MASS_RTOL = 1e-8

# Maps integer orders p >= 0 to (∫ρ cos pθ dθ, ∫ρ sin pθ dθ) on the unit circle.
MomentFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


class DensityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Density:
    """Nodal density aligned with a :class:`BoundaryCurve`.

    ``fourier_moments`` is set by constructors that know ρ in closed form
    on the disk; the Galerkin solver uses it instead of the nodal samples.
    """

    curve: BoundaryCurve
    values: np.ndarray
    alpha: float
    fourier_moments: Optional[MomentFn] = field(default=None, repr=False)
    checked: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.curve.n_nodes,):
            raise DensityError(f"expected {self.curve.n_nodes} values, got {v.shape}")
        if not self.checked:
            return
        if not 0 < self.alpha <= 1:
            raise DensityError(f"alpha must lie in (0, 1], got {self.alpha}")
        if v.min() < 0 or v.max() > 1:
            raise DensityError("density values must lie in [0, 1]")
        target = self.alpha * self.curve.perimeter
        if abs(self.mass - target) > MASS_RTOL * target:
            raise DensityError(f"mass {self.mass:.12g} differs from alpha*|Γ| = {target:.12g}")

    @classmethod
    def raw(cls, curve: BoundaryCurve, values) -> "Density":
        """Unvalidated nonnegative weight; alpha is read off the mass.

        Meant for scaling experiments outside the admissible set.
        """
        v = np.asarray(values, dtype=float)
        mass = float(np.dot(v, curve.weights))
        return cls(curve, v, mass / curve.perimeter, checked=False)

    @property
    def mass(self) -> float:
        return float(np.dot(self.values, self.curve.weights))

    def rotated(self, shift: int) -> "Density":
        """Rotate by ``shift`` grid nodes (disk only keeps admissibility exact)."""
        return Density(self.curve, np.roll(self.values, shift), self.alpha, checked=self.checked)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha <= 1:
        raise DensityError(f"alpha must lie in (0, 1], got {alpha}")


def make_constant(curve: BoundaryCurve, alpha: float) -> Density:
    _check_alpha(alpha)

    def moments(p):
        p = np.asarray(p)
        return np.where(p == 0, 2 * np.pi * alpha, 0.0), np.zeros(p.shape)

    return Density(
        curve,
        np.full(curve.n_nodes, float(alpha)),
        float(alpha),
        fourier_moments=moments if curve.is_disk else None,
    )


def arc_endpoints(alpha: float, n_arcs: int) -> np.ndarray:
    """Endpoints [a_ℓ, b_ℓ] of the n evenly spaced arcs of total length 2πα.

    Arc ℓ = 1..n is [π(2ℓ-α)/n, π(2ℓ+α)/n], centred at 2πℓ/n.
    """
    ell = np.arange(1, n_arcs + 1)
    return np.column_stack(
        [np.pi * (2 * ell - alpha) / n_arcs, np.pi * (2 * ell + alpha) / n_arcs]
    )


def _cell_overlap(theta: np.ndarray, h: float, arcs: np.ndarray) -> np.ndarray:
    """Fraction of each cell [θ_i - h/2, θ_i + h/2] covered by the arcs (mod 2π)."""
    frac = np.zeros_like(theta)
    lo_cell, hi_cell = theta - h / 2, theta + h / 2
    for a, b in arcs:
        for shift in (-2 * np.pi, 0.0, 2 * np.pi):
            lo = np.maximum(lo_cell, a + shift)
            hi = np.minimum(hi_cell, b + shift)
            frac += np.clip(hi - lo, 0.0, None)
    frac = np.clip(frac / h, 0.0, 1.0)
    # (θ + h/2) - (θ - h/2) is not exactly h in floating point
    frac[frac > 1 - 1e-9] = 1.0
    frac[frac < 1e-9] = 0.0
    return frac


def _arc_moments(arcs: np.ndarray) -> MomentFn:
    a, b = arcs[:, 0], arcs[:, 1]

    def moments(p):
        p = np.asarray(p, dtype=float)
        C = np.empty(p.shape)
        S = np.empty(p.shape)
        zero = p == 0
        C[zero] = np.sum(b - a)
        S[zero] = 0.0
        q = p[~zero][:, None]
        C[~zero] = np.sum(np.sin(q * b) - np.sin(q * a), axis=1) / q[:, 0]
        S[~zero] = np.sum(np.cos(q * a) - np.cos(q * b), axis=1) / q[:, 0]
        return C, S

    return moments


def make_arc_indicator(curve: BoundaryCurve, alpha: float, n_arcs: int) -> Density:
    """Indicator of n evenly spaced equal arcs of total angular length 2πα.

    Nodes whose quadrature cell straddles an arc endpoint receive the
    covered fraction of the cell, so the discrete mass is exact.
    """
    if not curve.is_disk:
        raise DensityError("arc indicators are defined on the unit disk")
    _check_alpha(alpha)
    if int(n_arcs) != n_arcs or n_arcs < 1:
        raise DensityError(f"n_arcs must be a positive integer, got {n_arcs}")
    arcs = arc_endpoints(alpha, int(n_arcs))
    h = 2 * np.pi / curve.n_nodes
    values = _cell_overlap(curve.theta, h, arcs)
    return Density(curve, values, float(alpha), fourier_moments=_arc_moments(arcs))


def make_fourier_perturbed(
    curve: BoundaryCurve,
    alpha: float,
    eps: float,
    cos_coeffs: Sequence[float] = (),
    sin_coeffs: Sequence[float] = (),
) -> Density:
    """ρ = α + ε Σ_ℓ (a_ℓ cos ℓθ + b_ℓ sin ℓθ), coefficients indexed from ℓ = 1."""
    _check_alpha(alpha)
    theta = curve.theta
    delta = np.zeros(curve.n_nodes)
    for ell, a in enumerate(cos_coeffs, start=1):
        delta += a * np.cos(ell * theta)
    for ell, b in enumerate(sin_coeffs, start=1):
        delta += b * np.sin(ell * theta)
    if not curve.is_disk:
        # harmonics in θ are not mean-zero in arclength off the disk
        delta -= np.dot(delta, curve.weights) / curve.perimeter
    values = alpha + eps * delta
    tol = 1e-14
    if values.min() < -tol or values.max() > 1 + tol:
        raise DensityError(
            f"alpha + eps*delta leaves [0, 1] (range [{values.min():.4g}, {values.max():.4g}])"
        )
    values = np.clip(values, 0.0, 1.0)

    moments = None
    if curve.is_disk:
        ca = np.asarray(cos_coeffs, dtype=float)
        sb = np.asarray(sin_coeffs, dtype=float)

        def moments(p):
            p = np.asarray(p)
            C = np.where(p == 0, 2 * np.pi * alpha, 0.0)
            S = np.zeros(p.shape)
            for ell, a in enumerate(ca, start=1):
                C = C + np.where(p == ell, np.pi * eps * a, 0.0)
            for ell, b in enumerate(sb, start=1):
                S = S + np.where(p == ell, np.pi * eps * b, 0.0)
            return C, S

    return Density(curve, values, float(alpha), fourier_moments=moments)


def project_admissible(curve: BoundaryCurve, raw_values, alpha: float) -> Density:
    """Weighted Euclidean projection onto {0 ≤ v ≤ 1, Σ w_i v_i = α|Γ|}.

    The projection has the form clip(raw + μ, 0, 1); μ solves the monotone
    mass equation.
    """
    _check_alpha(alpha)
    r = np.asarray(raw_values, dtype=float)
    if r.shape != (curve.n_nodes,) or not np.all(np.isfinite(r)):
        raise DensityError("raw values must be finite and match the curve")
    w = curve.weights
    target = alpha * curve.perimeter

    def excess(mu):
        return float(np.dot(np.clip(r + mu, 0.0, 1.0), w)) - target

    if excess(0.0) == 0.0:
        mu = 0.0
    else:
        lo, hi = -r.max(), 1.0 - r.min()
        mu = brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
        # exact finish on the free set
        v = r + mu
        free = (v > 0) & (v < 1)
        if free.any():
            mu -= excess(mu) / w[free].sum()
    v = np.clip(r + mu, 0.0, 1.0)
    return Density(curve, v, float(alpha))


def density_from_csv(curve, path, alpha: Optional[float] = None) -> Density:
    """Read a ``theta,rho`` CSV aligned with ``curve``."""
    from .io import read_csv

    header, data = read_csv(path)
    if data.shape[0] != curve.n_nodes:
        raise ValueError(f"{path}: {data.shape[0]} rows but the curve has {curve.n_nodes} nodes")
    col = header.index("rho") if "rho" in header else data.shape[1] - 1
    values = data[:, col]
    if alpha is None:
        alpha = float(np.dot(values, curve.weights)) / curve.perimeter
    return Density(curve, values, alpha)
