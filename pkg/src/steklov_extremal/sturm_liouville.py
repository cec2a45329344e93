"""A one-dimensional weighted Dirichlet problem with a two-valued density.

    -u'' = λ ρ u on (-1, 1),   u(±1) = 0,   ρ = ρ₋ on x < 0, ρ₊ on x ≥ 0,

with the family ρ₋ = 4 - 3t, ρ₊ = 1 + 3t. Matching the two sine branches at
x = 0 gives the characteristic equation

    √ρ₊ tan(√(λρ₋)) + √ρ₋ tan(√(λρ₊)) = 0,

whose roots are the eigenvalues. 1/λ₂(t) is not convex in t, which shows
that reciprocal eigenvalues need not be convex functions of the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

POLE_TOL = 1e-10
SCAN_PER_UNIT_S = 2000


@dataclass(frozen=True)
class PiecewiseDensity:
    """ρ = rho_minus on x < 0 and rho_plus on x ≥ 0."""

    rho_minus: float
    rho_plus: float

    def __post_init__(self):
        if not (self.rho_minus > 0 and self.rho_plus > 0):
            raise ValueError("density values must be positive")

    @classmethod
    def from_t(cls, t: float) -> "PiecewiseDensity":
        return cls(4.0 - 3.0 * t, 1.0 + 3.0 * t)

    @property
    def mass(self) -> float:
        return self.rho_minus + self.rho_plus

    def determinant(self, s):
        """Pole-free characteristic function of s = √λ.

        Equals cos(s√ρ₋) cos(s√ρ₊) times the tangent form, so it vanishes
        exactly at eigenvalues, including those where both cosines vanish.
        """
        s = np.asarray(s, dtype=float)
        a = s * math.sqrt(self.rho_minus)
        b = s * math.sqrt(self.rho_plus)
        return math.sqrt(self.rho_plus) * np.sin(a) * np.cos(b) + math.sqrt(self.rho_minus) * np.sin(b) * np.cos(a)


def _pole_distance(x: float) -> float:
    """Distance from x to the nearest point of π/2 + πZ."""
    y = (x - math.pi / 2) / math.pi
    return abs(y - round(y)) * math.pi


def f_eval(lam: float, t: float) -> float:
    """Tangent form √(1+3t) tan√(λ(4-3t)) + √(4-3t) tan√(λ(1+3t)).

    Raises
    ------
    ValueError
        If λ ≤ 0 or a tangent argument lies within 1e-10 of a pole.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    rm, rp = 4.0 - 3.0 * t, 1.0 + 3.0 * t
    a, b = math.sqrt(lam * rm), math.sqrt(lam * rp)
    if min(_pole_distance(a), _pole_distance(b)) <= POLE_TOL:
        raise ValueError(f"lambda={lam} is at a tangent pole for t={t}")
    return math.sqrt(rp) * math.tan(a) + math.sqrt(rm) * math.tan(b)


class BracketError(RuntimeError):
    pass


def eigenvalue(k: int, t: float) -> float:
    """k-th Dirichlet eigenvalue of the family at parameter t.

    Scans the pole-free determinant on a uniform grid in s = √λ and refines
    each sign change with Brent's method.
    """
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    rho = PiecewiseDensity.from_t(t)
    # λ_k ≤ (kπ/2)² / min ρ by comparison with the constant density min ρ
    s_max = k * math.pi / (2 * math.sqrt(min(rho.rho_minus, rho.rho_plus))) + 1.0
    n = int(math.ceil(s_max * SCAN_PER_UNIT_S))
    s = np.linspace(0.0, s_max, n + 1)[1:]
    det = rho.determinant(s)
    roots = []
    for i in range(det.size - 1):
        if det[i] == 0.0:
            roots.append(s[i])
        elif det[i] * det[i + 1] < 0:
            roots.append(brentq(rho.determinant, s[i], s[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200))
        if len(roots) == k:
            return float(roots[-1] ** 2)
    raise BracketError(f"found only {len(roots)} roots below s={s_max:.6g} (t={t}, grid {n})")


def closed_form_t0(k: int) -> float:
    """λ_k at t = 0 (ρ₋ = 4, ρ₊ = 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q, r = divmod(k, 3)
    at = math.atan(math.sqrt(2.0))
    if r == 1:
        return (q * math.pi + at) ** 2
    if r == 2:
        return (q * math.pi + math.pi - at) ** 2
    return (q * math.pi) ** 2


def derivative_t0(k: int) -> float:
    """dλ_k/dt at t = 0 from the implicit function theorem, -f_t / f_λ."""
    eta = closed_form_t0(k)
    s = math.sqrt(eta)
    f_t = -0.75 * (-3 * s + 5 * math.tan(s))
    f_lam = (1 / math.cos(2 * s) ** 2 + 1 / math.cos(s) ** 2) / s
    return -f_t / f_lam


@dataclass(frozen=True)
class NonconvexityCertificate:
    """Witness that g(t) = 1/λ₂(t) is not convex on [0, 1].

    A convex g with g(0) = g(1) satisfies g(0.1) ≤ g(0); ``margin`` is
    g(0.1) - g(0).
    """

    g0: float
    g01: float
    g1: float
    margin: float
    symmetry_errors: dict
    witness: tuple[float, float, float]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "witness_t": list(self.witness),
            "g": [self.g0, self.g01, self.g1],
            "margin": self.margin,
            "symmetry_errors": {str(k): v for k, v in self.symmetry_errors.items()},
            "passed": self.passed,
        }


def nonconvexity_certificate(min_margin: float = 1e-4, sym_tol: float = 1e-10) -> NonconvexityCertificate:
    sym = {t: abs(eigenvalue(2, t) - eigenvalue(2, 1 - t)) for t in (0.1, 0.3)}
    g0 = 1 / eigenvalue(2, 0.0)
    g01 = 1 / eigenvalue(2, 0.1)
    g1 = 1 / eigenvalue(2, 1.0)
    margin = g01 - g0
    passed = (
        all(v <= sym_tol for v in sym.values())
        and abs(g0 - g1) <= sym_tol
        and margin > min_margin
    )
    return NonconvexityCertificate(g0, g01, g1, margin, sym, (0.0, 0.1, 1.0), passed)


def lambda2_table(n_points: int = 101) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, λ₂(t), 1/λ₂(t)) on a uniform grid of [0, 1]."""
    t = np.linspace(0.0, 1.0, n_points)
    lam = np.array([eigenvalue(2, float(ti)) for ti in t])
    return t, lam, 1 / lam
