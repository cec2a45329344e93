"""Eigenvalue derivatives with respect to the boundary density."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bem import LayerOperators, assemble
from .density import Density, DensityError
from .spectrum import SpectralResult, solve_weighted

GRAM_TOL = 1e-6


class PerturbationError(ValueError):
    pass


def eigen_gradient(spec: SpectralResult, k: int) -> np.ndarray:
    """Nodal gradient g = -λ_k u_k² of a simple eigenvalue.

    The derivative along δρ is ``boundary_integral(curve, g * δρ)``.
    """
    members = spec.clusters[spec.cluster_index(k)]
    if len(members) > 1:
        raise PerturbationError(
            f"λ_{k} belongs to a cluster of size {len(members)}; use gateaux_matrix"
        )
    return -spec.eigenvalues[k - 1] * spec.traces[:, k - 1] ** 2


def cluster_traces(spec: SpectralResult, members: Sequence[int]) -> np.ndarray:
    """Traces of ``members`` after checking their ρ-orthonormality."""
    members = list(members)
    G = spec.weighted_gram(members)
    dev = float(np.abs(G - np.eye(len(members))).max())
    if dev > GRAM_TOL:
        raise PerturbationError(f"cluster traces are not ρ-orthonormal (Gram deviation {dev:.3g})")
    return spec.traces[:, members]


def gateaux_matrix(spec: SpectralResult, cluster_index: int, delta_rho) -> np.ndarray:
    """M_ij = -√(λ_i λ_j) ∫ u_i u_j δρ ds over one cluster.

    The eigenvalues of M are the first-order slopes of the cluster.
    """
    delta = np.asarray(delta_rho, dtype=float)
    if delta.shape != (spec.curve.n_nodes,):
        raise PerturbationError(f"delta_rho must have shape ({spec.curve.n_nodes},)")
    members = list(spec.clusters[cluster_index])
    U = cluster_traces(spec, members)
    sl = np.sqrt(spec.eigenvalues[members])
    M = -np.outer(sl, sl) * (U.T @ ((spec.curve.weights * delta)[:, None] * U))
    return 0.5 * (M + M.T)


def analytic_slopes(spec: SpectralResult, k: int, delta_rho) -> np.ndarray:
    """Sorted first-order slopes of the cluster holding λ_k."""
    return np.linalg.eigvalsh(gateaux_matrix(spec, spec.cluster_index(k), delta_rho))


@dataclass(frozen=True)
class FDReport:
    """Central-difference validation of eigenvalue slopes.

    ``fd[e]`` holds the sorted difference quotients of the cluster at
    ``eps[e]``; ``errors[e]`` is their max deviation from ``analytic``
    relative to max |analytic| (absolute when the slopes vanish to
    rounding).
    """

    k: int
    cluster: tuple[int, ...]
    analytic: np.ndarray
    eps: tuple[float, ...]
    fd: np.ndarray
    errors: np.ndarray
    observed_order: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "cluster": [i + 1 for i in self.cluster],
            "analytic": self.analytic.tolist(),
            "eps": list(self.eps),
            "fd": self.fd.tolist(),
            "errors": self.errors.tolist(),
            "observed_order": self.observed_order,
        }


def _shifted(rho: Density, delta: np.ndarray, eps: float) -> Density:
    try:
        return Density(rho.curve, rho.values + eps * delta, rho.alpha)
    except DensityError as exc:
        raise PerturbationError(f"ρ ± {eps:g}·δρ is not admissible: {exc}") from None


def fd_check(
    curve,
    rho: Density,
    k: int,
    delta_rho,
    eps_list: Sequence[float],
    ops: Optional[LayerOperators] = None,
    rel_tol: float = 1e-6,
) -> FDReport:
    """Compare Gateaux slopes of the λ_k cluster with central differences.

    Inside a cluster the sorted eigenvalues are not differentiable, so each
    branch at ρ + εδρ is paired with the branch at ρ - εδρ whose trace
    overlaps it most.
    """
    if ops is None:
        ops = assemble(curve)
    delta = np.asarray(delta_rho, dtype=float)
    base = solve_weighted(ops, rho, k + 4, rel_tol)
    members = list(base.clusters[base.cluster_index(k)])
    analytic = np.linalg.eigvalsh(gateaux_matrix(base, base.cluster_index(k), delta))
    n_eig = max(members) + 1 + 2
    wr = curve.weights * rho.values

    fd_rows = []
    for eps in eps_list:
        plus = solve_weighted(ops, _shifted(rho, delta, eps), n_eig, rel_tol)
        minus = solve_weighted(ops, _shifted(rho, delta, -eps), n_eig, rel_tol)
        Up, Um = plus.traces[:, members], minus.traces[:, members]
        overlap = np.abs(Up.T @ (wr[:, None] * Um))
        row = []
        taken: set[int] = set()
        for i in np.argsort(-overlap.max(axis=1)):
            j = next(j for j in np.argsort(-overlap[i]) if j not in taken)
            taken.add(j)
            row.append(
                (plus.eigenvalues[members[i]] - minus.eigenvalues[members[j]]) / (2 * eps)
            )
        fd_rows.append(np.sort(row))
    fd = np.array(fd_rows)
    scale = float(np.abs(analytic).max())
    denom = scale if scale > 1e-10 * base.eigenvalues[k - 1] else 1.0
    errors = np.abs(fd - analytic[None, :]).max(axis=1) / denom
    order = float("nan")
    eps_arr = np.asarray(eps_list, dtype=float)
    good = errors > 0
    if good.sum() >= 2:
        e, x = np.log(errors[good]), np.log(eps_arr[good])
        order = float(np.polyfit(x, e, 1)[0])
    return FDReport(k, tuple(members), analytic, tuple(float(e) for e in eps_list), fd, errors, order)
