"""Weighted Steklov eigenvalues of planar domains and their extremal densities.

The package discretizes the weighted Steklov problem

    Δu = 0 in Ω,    ∂_n u = λ ρ u on Γ = ∂Ω,

with a modified single layer potential and a Kress-type Nyström rule, and
optimizes λ_k over boundary densities 0 ≤ ρ ≤ 1 with prescribed mass.
"""

__version__ = "0.1.0"

from .geometry import BoundaryCurve, make_disk, make_fourier_curve, boundary_integral
from .density import (
    Density,
    make_constant,
    make_arc_indicator,
    make_fourier_perturbed,
    project_admissible,
)
from .bem import LayerOperators, assemble
from .spectrum import SpectralResult, solve_weighted, disk_galerkin, cluster

__all__ = [
    "__version__",
    "BoundaryCurve",
    "make_disk",
    "make_fourier_curve",
    "boundary_integral",
    "Density",
    "make_constant",
    "make_arc_indicator",
    "make_fourier_perturbed",
    "project_admissible",
    "LayerOperators",
    "assemble",
    "SpectralResult",
    "solve_weighted",
    "disk_galerkin",
    "cluster",
]
