"""Weighted Steklov spectra: Nyström pencil solver and disk Galerkin oracle.

Both solvers work in an orthonormal Steklov basis φ_0 (constant), φ_1, …
with DtN eigenvalues 0 = σ_0 < σ_1 ≤ …. The weighted problem
σ_i y_i = λ (B y)_i, B_ij = ∫ρ φ_i φ_j ds, forces (B y)_0 = 0; eliminating
y_0 leaves the Schur complement S and the symmetric reciprocal problem

    D^{-1/2} S D^{-1/2} c = μ c,   μ = 1/λ,   D = diag(σ_1, σ_2, …).

Parts of Γ where ρ vanishes only produce μ ≈ 0, which are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import io
from .bem import LayerOperators
from .density import Density

MU_FLOOR = 1e-10


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Nontrivial eigenvalues λ_1 ≤ … ≤ λ_K with ρ-normalized traces.

    Attributes
    ----------
    eigenvalues : ndarray, shape (K,)
    traces : ndarray, shape (n_nodes, K)
        Column k-1 holds u_k at the curve nodes, with Σ_i w_i ρ_i u_k,i² = 1.
    clusters : tuple of tuple of int
        Zero-based column indices grouped by numerical multiplicity.
    density : Density
    diagnostics : dict
        Solver-specific residual and consistency measures.
    """

    eigenvalues: np.ndarray
    traces: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    density: Density
    diagnostics: dict = field(default_factory=dict)

    @property
    def curve(self):
        return self.density.curve

    @property
    def k_max(self) -> int:
        return len(self.eigenvalues)

    def cluster_index(self, k: int) -> int:
        """Index into ``clusters`` of the group holding λ_k (k is 1-based)."""
        for ci, members in enumerate(self.clusters):
            if k - 1 in members:
                return ci
        raise IndexError(f"k={k} outside 1..{self.k_max}")

    def weighted_gram(self, cols=None) -> np.ndarray:
        """Discrete Gram matrix ∫ρ u_i u_j ds of the selected traces."""
        U = self.traces if cols is None else self.traces[:, list(cols)]
        wr = self.curve.weights * self.density.values
        return U.T @ (wr[:, None] * U)

    def manifest(self) -> dict:
        return {
            "curve": self.curve.descriptor(),
            "alpha": self.density.alpha,
            "mass": self.density.mass,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "clusters": [[i + 1 for i in c] for c in self.clusters],
            "diagnostics": {k: v for k, v in self.diagnostics.items()},
        }

    def write_traces_csv(self, path) -> None:
        header = ["theta"] + [f"u_{k}" for k in range(1, self.k_max + 1)]
        io.write_csv(path, header, [self.curve.theta] + list(self.traces.T))


def cluster(eigenvalues, rel_tol: float = 1e-6) -> tuple[tuple[int, ...], ...]:
    """Chain consecutive sorted values whose relative gap is below ``rel_tol``.

    Returns zero-based index groups.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        return ()
    groups = [[0]]
    for i in range(1, lam.size):
        scale = max(abs(lam[i]), abs(lam[i - 1]))
        if lam[i] - lam[i - 1] < rel_tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def _reciprocal_problem(sig: np.ndarray, Bfull: np.ndarray):
    """Schur-complement reduction; returns (μ desc, coefficient matrix Y desc)."""
    b00 = Bfull[0, 0]
    if not b00 > 0:
        raise SpectrumError("density has zero mass; pencil is singular")
    if np.any(sig[1:] <= 0):
        raise SpectrumError("Steklov basis has non-positive nonconstant eigenvalues")
    b0 = Bfull[0, 1:]
    S = Bfull[1:, 1:] - np.outer(b0, b0) / b00
    d = 1.0 / np.sqrt(sig[1:])
    Am = d[:, None] * S * d[None, :]
    Am = 0.5 * (Am + Am.T)
    mu, C = np.linalg.eigh(Am)
    mu, C = mu[::-1], C[:, ::-1]
    Y = d[:, None] * C
    y0 = -(b0 @ Y) / b00
    return mu, np.vstack([y0, Y])


def _finish(lam, U, density, rel_tol, diagnostics) -> SpectralResult:
    """Orthonormalize within clusters, fix signs and package."""
    wr = density.curve.weights * density.values
    groups = cluster(lam, rel_tol)
    U = U.copy()
    for g in groups:
        idx = list(g)
        G = U[:, idx].T @ (wr[:, None] * U[:, idx])
        ev, V = np.linalg.eigh(0.5 * (G + G.T))
        U[:, idx] = U[:, idx] @ (V @ np.diag(ev**-0.5) @ V.T)
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
    return SpectralResult(np.asarray(lam, dtype=float), U, groups, density, diagnostics)


def _check_k(k_max: int) -> None:
    if int(k_max) != k_max or k_max < 1:
        raise ValueError(f"k_max must be a positive integer, got {k_max}")


def solve_weighted(
    ops: LayerOperators, rho: Density, k_max: int, rel_tol: float = 1e-6
) -> SpectralResult:
    """Lowest ``k_max`` nontrivial weighted Steklov eigenpairs on ``ops.curve``.

    Parameters
    ----------
    ops : LayerOperators
    rho : Density
        Must live on a curve with the same node count and descriptor.
    k_max : int
    rel_tol : float
        Relative gap below which eigenvalues are grouped into a cluster.

    Raises
    ------
    SpectrumError
        If fewer than ``k_max`` finite eigenvalues are recoverable.
    """
    _check_k(k_max)
    curve = ops.curve
    if rho.curve is not curve and (
        rho.curve.n_nodes != curve.n_nodes or rho.curve.descriptor() != curve.descriptor()
    ):
        raise ValueError("density and operators live on different curves")
    sig, E = ops.steklov_basis
    v = rho.values
    Bfull = E.T @ (v[:, None] * E)
    mu, Y = _reciprocal_problem(sig, Bfull)
    n_finite = int(np.sum(mu > MU_FLOOR * mu[0]))
    if k_max > n_finite:
        raise SpectrumError(
            f"k_max={k_max} exceeds the {n_finite} recoverable eigenvalues at n_nodes={curve.n_nodes}"
        )
    mu, Y = mu[:k_max], Y[:, :k_max]
    lam = 1.0 / mu
    w = curve.weights
    U = (E @ Y) / np.sqrt(w)[:, None] / np.sqrt(mu)[None, :]

    NU = ops.dtn @ U
    rayleigh = np.einsum("ik,i,ik->k", U, w, NU)
    scale = np.abs(U).max(axis=0) * lam
    resid = np.abs(NU - lam[None, :] * v[:, None] * U).max(axis=0) / scale
    diagnostics = {
        "solver": "nystrom",
        "n_nodes": curve.n_nodes,
        "n_finite": n_finite,
        "rayleigh_rel_error": float(np.max(np.abs(rayleigh - lam) / lam)),
        "max_residual": float(resid.max()),
        "dtn_symmetry_defect": ops.symmetry_defect,
    }
    return _finish(lam, U, rho, rel_tol, diagnostics)


def _interpolant_moments(values: np.ndarray):
    """Moments ∫ρ cos pθ, ∫ρ sin pθ of the trigonometric interpolant of nodal ρ."""
    n = values.size
    c = np.fft.rfft(values) * (2 * np.pi / n)
    if n % 2 == 0:
        c[-1] *= 0.5
    n_avail = c.size

    def moments(p):
        p = np.asarray(p)
        C = np.zeros(p.shape)
        S = np.zeros(p.shape)
        ok = p < n_avail
        C[ok] = c[p[ok]].real
        S[ok] = -c[p[ok]].imag
        return C, S

    return moments


def galerkin_matrix(moments, n_modes: int):
    """Full mass matrix ∫ρ φ_i φ_j dθ on the unit circle.

    Basis order: 1/√(2π), then cos mθ/√π for m = 1..M, then sin mθ/√π.
    """
    m = np.arange(1, n_modes + 1)
    C, S = moments(np.arange(0, 2 * n_modes + 1))
    mi, mj = np.meshgrid(m, m, indexing="ij")
    dif, tot = mi - mj, mi + mj
    Cd, Ct = C[np.abs(dif)], C[tot]
    Sd, St = np.sign(dif) * S[np.abs(dif)], S[tot]
    Bcc = 0.5 * (Cd + Ct) / np.pi
    Bss = 0.5 * (Cd - Ct) / np.pi
    Bcs = 0.5 * (St - Sd) / np.pi
    b0 = np.concatenate([C[1 : n_modes + 1], S[1 : n_modes + 1]]) / (np.pi * np.sqrt(2))
    b00 = C[0] / (2 * np.pi)
    Bfull = np.empty((2 * n_modes + 1,) * 2)
    Bfull[0, 0] = b00
    Bfull[0, 1:] = Bfull[1:, 0] = b0
    Bfull[1:, 1:] = np.block([[Bcc, Bcs], [Bcs.T, Bss]])
    return Bfull


def disk_galerkin(
    rho: Density, n_modes: int, k_max: int, rel_tol: float = 1e-6
) -> SpectralResult:
    """Fourier-Galerkin eigenpairs on the unit disk.

    Uses the exact moments of ρ when the density carries them, otherwise
    those of the trigonometric interpolant of the nodal values.
    """
    _check_k(k_max)
    curve = rho.curve
    if not curve.is_disk:
        raise ValueError("disk_galerkin requires the unit disk")
    if k_max > 2 * n_modes:
        raise SpectrumError(f"k_max={k_max} exceeds the basis size {2 * n_modes}")
    moments = rho.fourier_moments or _interpolant_moments(rho.values)
    Bfull = galerkin_matrix(moments, n_modes)
    m = np.arange(1, n_modes + 1, dtype=float)
    sig = np.concatenate([[0.0], m, m])
    mu, Y = _reciprocal_problem(sig, Bfull)
    n_finite = int(np.sum(mu > MU_FLOOR * mu[0]))
    if k_max > n_finite:
        raise SpectrumError(f"k_max={k_max} exceeds the {n_finite} recoverable eigenvalues")
    mu, Y = mu[:k_max], Y[:, :k_max]
    lam = 1.0 / mu

    t = curve.theta
    Phi = np.column_stack(
        [np.full(t.size, 1 / np.sqrt(2 * np.pi))]
        + [np.cos(k * t) / np.sqrt(np.pi) for k in range(1, n_modes + 1)]
        + [np.sin(k * t) / np.sqrt(np.pi) for k in range(1, n_modes + 1)]
    )
    U = Phi @ Y
    wr = curve.weights * rho.values
    norms = np.sqrt(np.einsum("ik,i,ik->k", U, wr, U))
    U = U / norms[None, :]
    diagnostics = {
        "solver": "galerkin",
        "n_modes": int(n_modes),
        "n_finite": n_finite,
    }
    return _finish(lam, U, rho, rel_tol, diagnostics)

