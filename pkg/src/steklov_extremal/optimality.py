"""First-order optimality certificates for extremal densities.

At a minimizer of λ_k, F = Σ_{cluster} u_i² separates the density's
regions: F ≤ c where ρ = 0, F = c where 0 < ρ < 1, F ≥ c where ρ = 1.
Maximizers satisfy the reversed inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_DIRECTIONS = {"min": "minimize", "minimize": "minimize", "max": "maximize", "maximize": "maximize"}


def normalize_direction(direction: str) -> str:
    try:
        return _DIRECTIONS[str(direction).lower()]
    except KeyError:
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}") from None


@dataclass(frozen=True, eq=False)
class OptimalityReport:
    """Outcome of :func:`check_optimality`.

    ``labels`` holds 0 for A_0 (ρ ≈ 0), 1 for A_1 (ρ ≈ 1) and 2 for the
    free set A. Violations are absolute and compared against ``tol``.
    """

    F: np.ndarray
    c: float
    labels: np.ndarray
    violations: dict
    tol: float
    passed: bool
    direction: str
    cluster: tuple[int, ...]

    @property
    def max_violation(self) -> float:
        return max(self.violations.values())

    def counts(self) -> dict:
        return {name: int(np.sum(self.labels == v)) for name, v in (("A0", 0), ("A1", 1), ("A", 2))}

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "cluster": [i + 1 for i in self.cluster],
            "c": self.c,
            "tol": self.tol,
            "violations": dict(self.violations),
            "counts": self.counts(),
            "passed": self.passed,
        }


def check_optimality(
    spec,
    rho=None,
    cluster_index: int = 0,
    direction: str = "minimize",
    band_tol: float = 1e-3,
    viol_tol: float = 1e-2,
) -> OptimalityReport:
    """Test the first-order conditions for the given eigenvalue cluster.

    Parameters
    ----------
    spec : SpectralResult
    rho : Density, optional
        Defaults to ``spec.density``.
    cluster_index : int
        Index into ``spec.clusters``.
    direction : {"min", "max", "minimize", "maximize"}
    band_tol : float
        Nodes with ρ within this distance of 0 or 1 count as saturated.
    viol_tol : float
        Allowed violation relative to max F.
    """
    direction = normalize_direction(direction)
    members = tuple(spec.clusters[cluster_index])
    if not members:
        raise ValueError("empty cluster")
    values = (rho if rho is not None else spec.density).values
    F = np.sum(spec.traces[:, list(members)] ** 2, axis=1)

    labels = np.full(F.size, 2, dtype=np.int8)
    labels[values <= band_tol] = 0
    labels[values >= 1 - band_tol] = 1
    F0, F1, Ff = F[labels == 0], F[labels == 1], F[labels == 2]
    tol = viol_tol * float(F.max())

    # the set that must lie below c under minimization, and the one above
    low, high = (F0, F1) if direction == "minimize" else (F1, F0)
    if Ff.size:
        c = float(Ff.mean())
    else:
        top = float(low.max()) if low.size else None
        bot = float(high.min()) if high.size else None
        if top is None:
            c = bot
        elif bot is None:
            c = top
        else:
            c = 0.5 * (top + bot)
    below = float(np.max(low - c, initial=0.0))
    above = float(np.max(c - high, initial=0.0))
    free = float(np.max(np.abs(Ff - c), initial=0.0))
    if direction == "minimize":
        violations = {"A0": below, "A": free, "A1": above}
    else:
        violations = {"A0": above, "A": free, "A1": below}
    passed = all(v <= tol for v in violations.values())
    return OptimalityReport(F, c, labels, violations, tol, passed, direction, members)
