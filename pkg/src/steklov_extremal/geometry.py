"""Smooth closed planar curves sampled at equispaced parameter nodes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MIN_NODES = 16
MIN_RADIUS = 0.05


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Quadrature data for a closed curve x(θ), θ_i = 2πi/n_nodes.

    Attributes
    ----------
    n_nodes : int
        Number of equispaced parameter nodes.
    theta : ndarray, shape (n,)
        Parameter values.
    points : ndarray, shape (n, 2)
        Node positions x(θ_i).
    tangents : ndarray, shape (n, 2)
        Parameter derivatives x'(θ_i) (not normalized).
    accels : ndarray, shape (n, 2)
        Second derivatives x''(θ_i).
    speeds : ndarray, shape (n,)
        |x'(θ_i)|.
    normals : ndarray, shape (n, 2)
        Outward unit normals (curve is counter-clockwise).
    curvature : ndarray, shape (n,)
        Signed curvature, +1 on the unit circle.
    weights : ndarray, shape (n,)
        Trapezoid arclength weights (2π/n)|x'(θ_i)|.
    perimeter : float
        Sum of the weights.
    """

    n_nodes: int
    theta: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    accels: np.ndarray
    speeds: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray
    perimeter: float
    kind: str = "fourier"
    cos_coeffs: tuple[float, ...] = field(default=())
    sin_coeffs: tuple[float, ...] = field(default=())

    @property
    def is_disk(self) -> bool:
        return self.kind == "disk"

    def descriptor(self) -> dict:
        """JSON-ready curve descriptor."""
        return {
            "kind": self.kind,
            "n_nodes": self.n_nodes,
            "cos": list(self.cos_coeffs),
            "sin": list(self.sin_coeffs),
        }

    def with_nodes(self, n_nodes: int) -> "BoundaryCurve":
        """Same curve resampled at a different node count."""
        if self.is_disk:
            return make_disk(n_nodes)
        return make_fourier_curve(self.cos_coeffs, self.sin_coeffs, n_nodes)


def _check_nodes(n_nodes: int, min_nodes: int) -> None:
    if int(n_nodes) != n_nodes or n_nodes % 2 or n_nodes < min_nodes:
        raise ValueError(f"n_nodes must be an even integer >= {min_nodes}, got {n_nodes}")


def _from_parametrization(x, dx, ddx, theta, kind, cos_coeffs=(), sin_coeffs=()):
    n = len(theta)
    speeds = np.hypot(dx[:, 0], dx[:, 1])
    if np.any(speeds <= 0):
        raise ValueError("parametrization has a vanishing speed")
    normals = np.column_stack([dx[:, 1], -dx[:, 0]]) / speeds[:, None]
    curvature = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / speeds**3
    weights = (2 * np.pi / n) * speeds
    return BoundaryCurve(
        n_nodes=n,
        theta=theta,
        points=x,
        tangents=dx,
        accels=ddx,
        speeds=speeds,
        normals=normals,
        curvature=curvature,
        weights=weights,
        perimeter=math.fsum(weights),
        kind=kind,
        cos_coeffs=tuple(float(c) for c in cos_coeffs),
        sin_coeffs=tuple(float(s) for s in sin_coeffs),
    )


def make_disk(n_nodes: int, *, min_nodes: int = MIN_NODES) -> BoundaryCurve:
    """Unit circle with ``n_nodes`` equispaced nodes.

    ``min_nodes`` exists so tests can build tiny grids; solver code should
    keep the default.
    """
    _check_nodes(n_nodes, min_nodes)
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    c, s = np.cos(theta), np.sin(theta)
    x = np.column_stack([c, s])
    dx = np.column_stack([-s, c])
    curve = _from_parametrization(x, dx, -x, theta, "disk")
    # exact values; avoid rounding noise from the generic formulas
    object.__setattr__(curve, "speeds", np.ones(n_nodes))
    object.__setattr__(curve, "normals", x.copy())
    object.__setattr__(curve, "curvature", np.ones(n_nodes))
    object.__setattr__(curve, "weights", np.full(n_nodes, 2 * np.pi / n_nodes))
    object.__setattr__(curve, "perimeter", 2 * np.pi)
    return curve


def radius_function(cos_coeffs: Sequence[float], sin_coeffs: Sequence[float], theta):
    """r, r', r'' of r(θ) = 1 + Σ a_m cos mθ + b_m sin mθ (m starting at 1)."""
    theta = np.asarray(theta, dtype=float)
    r = np.ones_like(theta)
    dr = np.zeros_like(theta)
    ddr = np.zeros_like(theta)
    for m, a in enumerate(cos_coeffs, start=1):
        r += a * np.cos(m * theta)
        dr -= m * a * np.sin(m * theta)
        ddr -= m * m * a * np.cos(m * theta)
    for m, b in enumerate(sin_coeffs, start=1):
        r += b * np.sin(m * theta)
        dr += m * b * np.cos(m * theta)
        ddr -= m * m * b * np.sin(m * theta)
    return r, dr, ddr


def make_fourier_curve(
    cos_coeffs: Sequence[float] = (),
    sin_coeffs: Sequence[float] = (),
    n_nodes: int = 256,
    *,
    min_nodes: int = MIN_NODES,
) -> BoundaryCurve:
    """Star-shaped curve with radius r(θ) = 1 + Σ_m (a_m cos mθ + b_m sin mθ).

    Coefficient lists start at m = 1. Empty lists give the unit disk.
    """
    _check_nodes(n_nodes, min_nodes)
    cos_coeffs = [float(a) for a in cos_coeffs]
    sin_coeffs = [float(b) for b in sin_coeffs]
    if not any(cos_coeffs) and not any(sin_coeffs):
        return make_disk(n_nodes, min_nodes=min_nodes)

    m_max = max(len(cos_coeffs), len(sin_coeffs), 1)
    probe = np.linspace(0, 2 * np.pi, 64 * m_max + 8 * n_nodes, endpoint=False)
    if radius_function(cos_coeffs, sin_coeffs, probe)[0].min() <= MIN_RADIUS:
        raise ValueError(f"radius must stay above {MIN_RADIUS}")

    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    r, dr, ddr = radius_function(cos_coeffs, sin_coeffs, theta)
    c, s = np.cos(theta), np.sin(theta)
    x = np.column_stack([r * c, r * s])
    dx = np.column_stack([dr * c - r * s, dr * s + r * c])
    ddx = np.column_stack(
        [ddr * c - 2 * dr * s - r * c, ddr * s + 2 * dr * c - r * s]
    )
    return _from_parametrization(x, dx, ddx, theta, "fourier", cos_coeffs, sin_coeffs)


def boundary_integral(curve: BoundaryCurve, node_samples) -> float:
    """Trapezoid approximation of ∫_Γ f ds from nodal samples."""
    f = np.asarray(node_samples, dtype=float)
    if f.shape != (curve.n_nodes,):
        raise ValueError(f"expected {curve.n_nodes} samples, got shape {f.shape}")
    return float(np.dot(f, curve.weights))


def curve_from_descriptor(desc: dict | str, n_nodes: int | None = None) -> BoundaryCurve:
    """Build a curve from ``{"kind": "disk"|"fourier", "n_nodes", "cos", "sin"}``.

    ``desc`` may be a dict or a JSON string. ``n_nodes`` overrides the
    descriptor's value.
    """
    if isinstance(desc, str):
        desc = json.loads(desc)
    kind = desc.get("kind", "disk")
    n = int(n_nodes if n_nodes is not None else desc.get("n_nodes", 256))
    if kind == "disk":
        return make_disk(n)
    if kind == "fourier":
        return make_fourier_curve(desc.get("cos", []), desc.get("sin", []), n)
    raise ValueError(f"unknown curve kind {kind!r}")
