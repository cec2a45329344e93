"""Closed-form results on the unit disk.

Constant densities, first-order shifts under Fourier perturbations, and the
2×2 matrix governing Steklov-Neumann eigenvalues when small Neumann arcs are
cut out of the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


def exact_constant_spectrum(alpha: float, k_max: int) -> np.ndarray:
    """λ_1..λ_kmax for ρ ≡ α on the unit disk: ⌈k/2⌉/α."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    k = np.arange(1, int(k_max) + 1)
    return np.ceil(k / 2) / alpha


def fourier_shift(j: int, alpha: float, a2j: float, b2j: float) -> tuple[float, float]:
    """First-order coefficients of |ε| for λ_{2j-1}, λ_{2j} under ρ = α + ε δρ.

    Only the harmonic 2j of δρ, with coefficients (a2j, b2j), moves the
    pair at first order.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    s = j / (2 * alpha**2) * math.hypot(a2j, b2j)
    return -s, s


@dataclass(frozen=True)
class PerturbationVerdict:
    """First-order status of ρ ≡ α for min or max λ_k.

    ``slopes`` are the |ε|-coefficients of (λ_{2j-1}, λ_{2j}) along the
    witness δρ = cos(2jθ); ``witness_harmonic`` is None when the constant
    density is critical.
    """

    k: int
    direction: str
    verdict: str
    slopes: tuple[float, float]
    witness_harmonic: Optional[int] = None

    def witness(self, theta):
        if self.witness_harmonic is None:
            return None
        return np.cos(self.witness_harmonic * np.asarray(theta))


def criticality_verdict(k: int, direction: str, *, alpha: float = 0.5) -> PerturbationVerdict:
    """Whether ρ ≡ α is first-order critical for min/max λ_k.

    λ_{2j-1} can only decrease and λ_{2j} only increase at first order, so
    odd k is critical for maximization and even k for minimization.
    """
    from .optimality import normalize_direction

    if k < 1:
        raise ValueError("k must be >= 1")
    direction = normalize_direction(direction)
    j = (k + 1) // 2
    slopes = fourier_shift(j, alpha, 1.0, 0.0)
    odd = k % 2 == 1
    critical = (odd and direction == "maximize") or (not odd and direction == "minimize")
    if critical:
        return PerturbationVerdict(k, direction, "critical", slopes)
    return PerturbationVerdict(k, direction, "not-local-extremum", slopes, 2 * j)


@dataclass(frozen=True)
class ArcSet:
    """Disjoint arcs S_j of the unit circle given by midpoints and lengths (radians)."""

    midpoints: tuple[float, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        mid = tuple(float(x) for x in self.midpoints)
        lens = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "midpoints", mid)
        object.__setattr__(self, "lengths", lens)
        if len(mid) != len(lens) or not mid:
            raise ValueError("need matching, nonempty midpoints and lengths")
        if min(lens) <= 0:
            raise ValueError("arc lengths must be positive")
        if sum(lens) >= 2 * np.pi:
            raise ValueError("total arc length must be below 2π")
        order = np.argsort(np.mod(mid, 2 * np.pi))
        m = np.mod(np.asarray(mid), 2 * np.pi)[order]
        half = np.asarray(lens)[order] / 2
        gaps = np.diff(np.append(m, m[0] + 2 * np.pi))
        if np.any(gaps < half + np.roll(half, -1)):
            raise ValueError("arcs overlap")

    @property
    def eps(self) -> float:
        """Total length divided by 2π."""
        return sum(self.lengths) / (2 * np.pi)

    @classmethod
    def evenly_spaced(cls, n_arcs: int, eps: float) -> "ArcSet":
        """n equal arcs of total length 2πε centred at 2πℓ/n, ℓ = 1..n."""
        ell = np.arange(1, n_arcs + 1)
        return cls(tuple(2 * np.pi * ell / n_arcs), (2 * np.pi * eps / n_arcs,) * n_arcs)


def neumann_arc_matrix(m: int, arcs: ArcSet) -> tuple[np.ndarray, tuple[float, float]]:
    """Matrix M for the harmonic pair m and its eigenvalues (ν_min, ν_max).

    M = m I + (1/2πε) Σ_j sin(m|S_j|) [[cos 2mθ_j, sin 2mθ_j], [sin 2mθ_j, -cos 2mθ_j]].
    """
    eps = arcs.eps
    if eps <= 0:
        raise ValueError("arcs must have positive total length")
    th = np.asarray(arcs.midpoints)
    s = np.sin(m * np.asarray(arcs.lengths))
    c2 = float(np.sum(s * np.cos(2 * m * th)))
    s2 = float(np.sum(s * np.sin(2 * m * th)))
    M = m * np.eye(2) + np.array([[c2, s2], [s2, -c2]]) / (2 * np.pi * eps)
    # eigenvalues m ± |(c2, s2)|/(2πε); avoids eigvalsh rounding on the trace
    r = math.hypot(c2, s2) / (2 * np.pi * eps)
    return M, (m - r, m + r)


def asymptotic_verdict(k: int, n_arcs: int) -> str:
    """Local status of ρ = 1 - 1_{I_ε^n} for σ_k as ε → 0.

    Returns "local-min", "local-max" or "inconclusive".
    """
    if k < 1 or n_arcs < 1:
        raise ValueError("k and n_arcs must be >= 1")
    if k == 1 and n_arcs == 1:
        # the arc sum does not cancel for a single arc
        return "inconclusive"
    if n_arcs == k + 1:
        return "local-min"
    if n_arcs == k:
        return "local-max"
    return "inconclusive"
