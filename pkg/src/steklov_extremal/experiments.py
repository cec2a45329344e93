"""Reproducible numerical experiments on the unit disk."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .bem import assemble
from .density import make_arc_indicator
from .geometry import make_disk
from .spectrum import SpectralResult, solve_weighted

NODES_PER_ARC = 32
MIN_SWEEP_NODES = 512
HPS_SLACK = 1e-6


def weyl_value(alpha: float, k: int) -> float:
    """⌈k/2⌉/α, the k-th eigenvalue of the constant density on the disk."""
    return math.ceil(k / 2) / alpha


@dataclass(frozen=True)
class SweepRow:
    n_arcs: int
    n_nodes: int
    eigenvalue: float
    limit: float


def homogenization_sweep(
    alpha: float, k: int, n_list: Sequence[int], n_nodes: Optional[int] = None
) -> list[SweepRow]:
    """λ_k of the n-arc indicator for each n, next to the limit ⌈k/2⌉/α.

    ``n_nodes`` defaults to max(512, 32 n) per sweep point; an explicit
    value must satisfy n_nodes ≥ 32 n for every n.
    """
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    rows = []
    cache = {}
    for n in n_list:
        nodes = n_nodes if n_nodes is not None else max(MIN_SWEEP_NODES, NODES_PER_ARC * n)
        nodes += nodes % 2
        if nodes < NODES_PER_ARC * n:
            raise ValueError(f"n_nodes={nodes} is below {NODES_PER_ARC}·n = {NODES_PER_ARC * n}")
        if nodes not in cache:
            cache[nodes] = assemble(make_disk(nodes))
        ops = cache[nodes]
        rho = make_arc_indicator(ops.curve, alpha, n)
        lam = solve_weighted(ops, rho, k).eigenvalues[k - 1]
        rows.append(SweepRow(n, nodes, float(lam), weyl_value(alpha, k)))
    return rows


@dataclass(frozen=True)
class WeylRow:
    k: int
    value: float
    weyl: float
    ratio: float


def weyl_compare(alpha: float, extremal_values: Mapping[int, float] | Sequence[float]) -> list[WeylRow]:
    """Ratios of extremal λ_k to ⌈k/2⌉/α.

    ``extremal_values`` maps k to a value, or lists values for k = 1, 2, ….
    """
    if not isinstance(extremal_values, Mapping):
        extremal_values = {k: v for k, v in enumerate(extremal_values, start=1)}
    rows = []
    for k in sorted(extremal_values):
        v = float(extremal_values[k])
        wv = weyl_value(alpha, k)
        rows.append(WeylRow(int(k), v, wv, v / wv))
    return rows


@dataclass(frozen=True)
class HPSReport:
    """λ_k against 2πk/(α|Γ|); margins are bound minus eigenvalue."""

    bounds: np.ndarray
    margins: np.ndarray
    passed: bool

    def to_dict(self) -> dict:
        return {
            "bounds": self.bounds.tolist(),
            "margins": self.margins.tolist(),
            "passed": self.passed,
        }


def hps_bound_check(
    spec: SpectralResult, alpha: Optional[float] = None, perimeter: Optional[float] = None
) -> HPSReport:
    """Check λ_k ≤ 2πk/(α|Γ|) + 1e-6 for every computed k.

    α|Γ| defaults to the discrete mass of the spectrum's density.
    """
    if alpha is None or perimeter is None:
        mass = spec.density.mass
    else:
        mass = alpha * perimeter
    k = np.arange(1, spec.k_max + 1)
    bounds = 2 * np.pi * k / mass
    margins = bounds - spec.eigenvalues
    return HPSReport(bounds, margins, bool(np.all(margins >= -HPS_SLACK)))
