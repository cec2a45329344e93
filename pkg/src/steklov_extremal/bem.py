"""Nyström discretization of the modified single layer representation.

With the fundamental solution Φ(x) = -(1/2π) log|x| and the mean
φ̄ = (1/|Γ|) ∫_Γ φ ds, the two boundary operators are

    A[φ] = (K' + ½I)(φ - φ̄),      B[φ] = S(φ - φ̄) + φ̄,

where S is the single layer and K' the adjoint double layer. A harmonic
function u with trace B[φ] has normal derivative A[φ], so A B⁻¹ is the
Dirichlet-to-Neumann map.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .geometry import BoundaryCurve, curve_from_descriptor

_MAGIC = b"SKLVOPS1"


def _log_weights(n: int) -> np.ndarray:
    """Kress weights R_j for ∫ log(4 sin²((t-τ)/2)) f(τ) dτ ≈ Σ R_{|i-j|} f_j."""
    tau = 2 * np.pi * np.arange(n) / n
    m = np.arange(1, n // 2)
    return (
        -(4 * np.pi / n) * (np.cos(np.outer(tau, m)) / m).sum(axis=1)
        - (4 * np.pi / n**2) * np.cos(n / 2 * tau)
    )


def single_layer(curve: BoundaryCurve) -> np.ndarray:
    """Matrix of S[φ](x_i) = ∫ Φ(x_i - y) φ(y) ds(y) with log splitting."""
    n = curve.n_nodes
    h = 2 * np.pi / n
    t, x, sp = curve.theta, curve.points, curve.speeds
    idx = np.arange(n)
    R = _log_weights(n)[(idx[:, None] - idx[None, :]) % n]

    diff = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    s2 = 4 * np.sin((t[:, None] - t[None, :]) / 2) ** 2
    np.fill_diagonal(r2, 1.0)
    np.fill_diagonal(s2, 1.0)
    # smooth remainder of -(1/4π) log|x - y|² after removing the log sin² part
    M2 = -np.log(r2 / s2) / (4 * np.pi)
    np.fill_diagonal(M2, -np.log(sp**2) / (4 * np.pi))
    return (-R / (4 * np.pi) + h * M2) * sp[None, :]


def adjoint_double_layer(curve: BoundaryCurve) -> np.ndarray:
    """Matrix of K'[φ](x_i) = ∫ ∂_n(x) Φ(x_i - y) φ(y) ds(y) (trapezoid rule)."""
    x, nrm = curve.points, curve.normals
    diff = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, 1.0)
    K = -np.einsum("ijk,ik->ij", diff, nrm) / r2 / (2 * np.pi)
    np.fill_diagonal(K, -curve.curvature / (4 * np.pi))
    return K * curve.weights[None, :]


@dataclass(eq=False)
class LayerOperators:
    """Discrete operators A (``op_a``) and B (``op_b``) on one curve.

    The Dirichlet-to-Neumann matrix and its symmetric eigenbasis are
    computed lazily and cached; treat instances as immutable.
    """

    op_a: np.ndarray
    op_b: np.ndarray
    curve: BoundaryCurve

    @property
    def n_nodes(self) -> int:
        return self.curve.n_nodes

    @cached_property
    def dtn(self) -> np.ndarray:
        """Discrete Dirichlet-to-Neumann map A B⁻¹ acting on nodal traces."""
        return np.linalg.solve(self.op_b.T, self.op_a.T).T

    @cached_property
    def symmetry_defect(self) -> float:
        """max |H - Hᵀ| for H = W^{1/2} N W^{-1/2}; small on smooth curves."""
        H = self._weighted_dtn()
        return float(np.abs(H - H.T).max())

    def _weighted_dtn(self) -> np.ndarray:
        sw = np.sqrt(self.curve.weights)
        return sw[:, None] * self.dtn / sw[None, :]

    @cached_property
    def steklov_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenpairs (σ, E) of the symmetrized weighted DtN map.

        Column 0 of E is the normalized constant mode √w/√|Γ| with σ_0 = 0
        exactly; the other columns span its orthogonal complement and σ is
        ascending.
        """
        w = self.curve.weights
        e0 = np.sqrt(w / w.sum())
        H = self._weighted_dtn()
        H = 0.5 * (H + H.T)
        P = np.eye(self.n_nodes) - np.outer(e0, e0)
        sig, E = np.linalg.eigh(P @ H @ P)
        # the deflated constant mode is the unique (near) zero eigenvalue
        j0 = int(np.argmin(np.abs(sig)))
        keep = np.delete(np.arange(self.n_nodes), j0)
        E = np.column_stack([e0, E[:, keep]])
        sig = np.concatenate([[0.0], sig[keep]])
        return sig, E

    def dump(self, path) -> None:
        """Write both matrices as row-major float64 after a small header."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(np.int64(self.n_nodes).tobytes())
            fh.write(np.ascontiguousarray(self.op_a, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.op_b, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path, curve: BoundaryCurve | dict | None = None) -> "LayerOperators":
        """Read a file written by :meth:`dump`; the curve defaults to the disk."""
        data = Path(path).read_bytes()
        if data[: len(_MAGIC)] != _MAGIC:
            raise ValueError(f"{path}: not a layer-operator dump")
        off = len(_MAGIC)
        n = int(np.frombuffer(data, dtype="<i8", count=1, offset=off)[0])
        off += 8
        if len(data) != off + 2 * n * n * 8:
            raise ValueError(f"{path}: truncated dump")
        a = np.frombuffer(data, dtype="<f8", count=n * n, offset=off).reshape(n, n).copy()
        b = np.frombuffer(data, dtype="<f8", count=n * n, offset=off + n * n * 8).reshape(n, n).copy()
        if curve is None:
            curve = {"kind": "disk"}
        if isinstance(curve, dict):
            curve = curve_from_descriptor(curve, n)
        if curve.n_nodes != n:
            raise ValueError(f"dump has {n} nodes but the curve has {curve.n_nodes}")
        return cls(a, b, curve)


def assemble(curve: BoundaryCurve) -> LayerOperators:
    """Assemble ``op_a`` and ``op_b`` for ``curve``."""
    n = curve.n_nodes
    w = curve.weights
    mean = np.outer(np.ones(n), w) / curve.perimeter
    P = np.eye(n) - mean
    op_a = (adjoint_double_layer(curve) + 0.5 * np.eye(n)) @ P
    op_b = single_layer(curve) @ P + mean
    return LayerOperators(op_a, op_b, curve)
