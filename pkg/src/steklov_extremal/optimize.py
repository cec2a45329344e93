"""Extremal densities: min or max λ_k over {0 ≤ ρ ≤ 1, ∫ρ ds = α|Γ|}.

Each iteration linearizes the eigenvalue cluster around λ_k through its
Gateaux matrix M(d) = diag(λ) - [√(λ_i λ_j) ∫ u_i u_j d ds], chooses a
mass-neutral direction d in a box trust region that optimizes the extreme
eigenvalue of M(d), and accepts the step when the true objective improves
by a fixed fraction of the predicted change.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from .bem import assemble
from .density import Density, project_admissible
from .geometry import BoundaryCurve
from .optimality import OptimalityReport, check_optimality, normalize_direction
from .spectrum import SpectralResult, disk_galerkin, solve_weighted


class OptimizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverSettings:
    """Tunable constants of the extremal solver.

    Attributes
    ----------
    backend : {"nystrom", "galerkin"}
        Eigenvalue solver; "galerkin" is restricted to the disk.
    n_modes : int
        Galerkin truncation when ``backend == "galerkin"``.
    cluster_tol : float
        Relative gap defining the eigenvalue window around λ_k.
    max_iters : int
    step_tol : float
        Stop once the trust radius falls below this.
    ftol, f_window : float, int
        Stop when the relative objective change over the last ``f_window``
        accepted steps is below ``ftol``.
    armijo : float
        Fraction of the predicted change the true change must achieve.
    radius0, radius_max : float
        Initial and maximal box trust radius.
    stationarity_tol : float
        Predicted improvements below this (relative to λ_k) count as zero.
    lp_rounds : int
        Cutting-plane rounds for clusters of size ≥ 2.
    n_seeds : int
        Number of starts in :func:`optimize_multistart`.
    init_amplitude : float
        Amplitude of the cos((k+1)θ) term in the default initial density.
    extra_eigs : int
        Eigenvalues computed beyond λ_k to detect clusters above it.
    """

    backend: str = "nystrom"
    n_modes: int = 200
    cluster_tol: float = 1e-3
    max_iters: int = 2000
    step_tol: float = 1e-8
    ftol: float = 1e-10
    f_window: int = 5
    armijo: float = 1e-4
    radius0: float = 0.5
    radius_max: float = 1.0
    stationarity_tol: float = 1e-12
    lp_rounds: int = 30
    n_seeds: int = 5
    init_amplitude: float = 1e-2
    extra_eigs: int = 4


@dataclass(eq=False)
class ExtremalProblem:
    """Find min or max of λ_k(ρ) over admissible densities on ``curve``."""

    curve: BoundaryCurve
    alpha: float
    k: int
    direction: str = "minimize"
    initial: Optional[Density] = None
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        self.direction = normalize_direction(self.direction)
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.settings.backend not in ("nystrom", "galerkin"):
            raise ValueError(f"unknown backend {self.settings.backend!r}")
        if self.settings.backend == "galerkin" and not self.curve.is_disk:
            raise ValueError("the galerkin backend requires the disk")
        if self.initial is not None:
            if self.initial.curve.n_nodes != self.curve.n_nodes:
                raise ValueError("initial density lives on a different grid")
            if abs(self.initial.alpha - self.alpha) > 1e-12:
                raise ValueError("initial density has a different alpha")

    @property
    def sign(self) -> int:
        """+1 when larger λ_k is better."""
        return 1 if self.direction == "maximize" else -1

    def default_initial(self, seed_index: int = 0, seed: int = 0) -> Density:
        """α + A cos((k+1)(θ - φ)) plus, for seed_index > 0, small random harmonics.

        Seed 0 uses φ = 0 and no extra harmonics.
        """
        theta = self.curve.theta
        amp = min(self.settings.init_amplitude, 0.25 * min(self.alpha, 1 - self.alpha))
        if amp <= 0:
            return Density(self.curve, np.full(self.curve.n_nodes, self.alpha), self.alpha)
        raw = self.alpha + amp * np.cos((self.k + 1) * theta)
        if seed_index > 0:
            rng = np.random.default_rng([seed, seed_index])
            phi = rng.uniform(0, 2 * np.pi)
            raw = self.alpha + amp * np.cos((self.k + 1) * (theta - phi))
            coef = rng.normal(size=(2, 2 * self.k + 2)) * amp / (2 * (2 * self.k + 2))
            for ell in range(1, 2 * self.k + 3):
                raw += coef[0, ell - 1] * np.cos(ell * theta) + coef[1, ell - 1] * np.sin(ell * theta)
        return project_admissible(self.curve, raw, self.alpha)


@dataclass(frozen=True, eq=False)
class DirectionStep:
    """Output of :func:`direction_step`.

    ``predicted`` is the first-order change of λ_k (negative is progress
    for minimization); ``window`` lists the zero-based eigenvalue indices
    included in the model.
    """

    d: np.ndarray
    predicted: float
    window: tuple[int, ...]
    model_eigenvalues: np.ndarray


@dataclass(eq=False)
class OptimizeTrace:
    """History and result of one optimization run."""

    objective: list
    radius: list
    density: Density
    spectrum: SpectralResult
    converged: bool
    reason: str
    n_iters: int
    certificate: Optional[OptimalityReport] = None
    seed_index: int = 0
    predicted: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return float(self.objective[-1])

    def manifest(self) -> dict:
        return {
            "seed_index": self.seed_index,
            "objective": self.value,
            "converged": self.converged,
            "reason": self.reason,
            "n_iters": self.n_iters,
            "n_accepted": len(self.objective) - 1,
            "eigenvalues": [float(v) for v in self.spectrum.eigenvalues],
            "history": [float(v) for v in self.objective],
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def _window(lam: np.ndarray, k: int, direction: str, tol: float) -> list[int]:
    lk = lam[k - 1]
    if direction == "minimize":
        return [j for j in range(k) if lk - lam[j] <= tol * lk]
    return [j for j in range(k - 1, len(lam)) if lam[j] - lk <= tol * lk]


def _greedy_linear(c: np.ndarray, w: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """argmin Σ w_i c_i d_i subject to Σ w_i d_i = 0 and lo ≤ d ≤ hi.

    Fractional knapsack: start from d = lo and raise nodes in order of
    increasing c until the mass budget is spent.
    """
    d = lo.copy()
    budget = -float(np.dot(w, lo))
    for i in np.argsort(c, kind="stable"):
        if budget <= 0:
            break
        room = w[i] * (hi[i] - lo[i])
        if room <= budget:
            d[i] = hi[i]
            budget -= room
        else:
            d[i] = lo[i] + budget / w[i]
            budget = 0.0
    return d


def _lp_direction(planes, w, lo, hi, maximize: bool) -> np.ndarray:
    """Minimize s over (d, s) with  base_a + Σ w_i q_a,i d_i ≤ s for every plane.

    For maximization the inequalities are reversed and s is maximized.
    """
    n = w.size
    c = np.zeros(n + 1)
    c[-1] = -1.0 if maximize else 1.0
    A_ub, b_ub = [], []
    for base, q in planes:
        if maximize:
            A_ub.append(np.append(-w * q, 1.0))
            b_ub.append(base)
        else:
            A_ub.append(np.append(w * q, -1.0))
            b_ub.append(-base)
    res = linprog(
        c,
        A_ub=np.array(A_ub),
        b_ub=np.array(b_ub),
        A_eq=np.append(w, 0.0)[None, :],
        b_eq=[0.0],
        bounds=list(zip(lo, hi)) + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise OptimizeError(f"direction LP failed: {res.message}")
    return res.x[:n]


def direction_step(
    problem: ExtremalProblem, rho: Density, spec: SpectralResult, radius: float = 1.0
) -> DirectionStep:
    """Best first-order direction in the box of half-width ``radius``.

    The model optimizes the largest (minimize) or smallest (maximize)
    eigenvalue of M(d) over the cluster window around λ_k, subject to
    0 ≤ ρ + d ≤ 1, |d_i| ≤ radius and ∫ d ds = 0.
    """
    k = problem.k
    direction = problem.direction
    lam = spec.eigenvalues
    if k > lam.size:
        raise OptimizeError("spectrum does not reach λ_k")
    idx = _window(lam, k, direction, problem.settings.cluster_tol)
    w = rho.curve.weights
    lo = np.maximum(-radius, -rho.values)
    hi = np.minimum(radius, 1.0 - rho.values)
    Uc = spec.traces[:, idx]
    lc = lam[idx]
    sl = np.sqrt(lc)
    maximize = direction == "maximize"

    def model(d):
        return np.diag(lc) - np.outer(sl, sl) * (Uc.T @ ((w * d)[:, None] * Uc))

    if len(idx) == 1:
        g = -lc[0] * Uc[:, 0] ** 2
        d = _greedy_linear(-g if maximize else g, w, lo, hi)
    else:
        m = len(idx)
        units = [np.eye(m)[i] for i in range(m)]
        planes = []

        def plane(a):
            v = Uc @ (a * sl)
            return float(a @ (lc * a)), -(v**2)

        planes = [plane(a) for a in units]
        for _ in range(problem.settings.lp_rounds):
            d = _lp_direction(planes, w, lo, hi, maximize)
            ev, V = np.linalg.eigh(model(d))
            a_new = V[:, 0] if maximize else V[:, -1]
            true_val = ev[0] if maximize else ev[-1]
            vals = [base + np.dot(w * q, d) for base, q in planes]
            model_val = min(vals) if maximize else max(vals)
            if abs(true_val - model_val) <= 1e-10 * abs(true_val):
                break
            planes.append(plane(a_new))
    ev = np.linalg.eigvalsh(model(d))
    pred = float((ev[0] if maximize else ev[-1]) - lam[k - 1])
    return DirectionStep(d, pred, tuple(idx), ev)


def _solver(problem: ExtremalProblem) -> Callable[[Density, int], SpectralResult]:
    s = problem.settings
    if s.backend == "galerkin":
        return lambda rho, K: disk_galerkin(rho, s.n_modes, K, s.cluster_tol)
    ops = assemble(problem.curve)
    return lambda rho, K: solve_weighted(ops, rho, K, s.cluster_tol)


def optimize(
    problem: ExtremalProblem,
    seed_index: int = 0,
    seed: int = 0,
    *,
    solver: Optional[Callable[[Density, int], SpectralResult]] = None,
    certify: bool = True,
    callback: Optional[Callable[[int, Density, SpectralResult], None]] = None,
) -> OptimizeTrace:
    """Run the trust-region sequential LP from one starting density.

    Parameters
    ----------
    problem : ExtremalProblem
    seed_index, seed : int
        Select the starting density when ``problem.initial`` is None.
    solver : callable, optional
        ``solver(rho, K)`` returning the lowest K eigenpairs; shared
        between starts by :func:`optimize_multistart`.
    certify : bool
        Attach an optimality report for the final density.
    callback : callable, optional
        Called as ``callback(iteration, rho, spec)`` after every accepted step.
    """
    s = problem.settings
    solve = solver or _solver(problem)
    k, sign = problem.k, problem.sign
    K = k + s.extra_eigs
    rho = problem.initial or problem.default_initial(seed_index, seed)
    try:
        spec = solve(rho, K)
    except Exception as exc:
        raise OptimizeError(f"initial solve failed: {exc}") from exc
    obj = [float(spec.eigenvalues[k - 1])]
    radii = [s.radius0]
    preds: list = []
    radius = s.radius0
    reason, converged = "max_iters", False
    it = 0
    for it in range(1, s.max_iters + 1):
        step = direction_step(problem, rho, spec, radius)
        preds.append(step.predicted)
        lk = obj[-1]
        if sign * step.predicted <= s.stationarity_tol * lk:
            reason, converged = "stationary", True
            break
        cand = project_admissible(rho.curve, rho.values + step.d, problem.alpha)
        try:
            cand_spec = solve(cand, K)
        except Exception as exc:
            raise OptimizeError(f"solve failed at iteration {it}: {exc}") from exc
        actual = float(cand_spec.eigenvalues[k - 1]) - lk
        if sign * actual >= s.armijo * sign * step.predicted and sign * actual > 0:
            rho, spec = cand, cand_spec
            obj.append(float(spec.eigenvalues[k - 1]))
            if callback is not None:
                callback(it, rho, spec)
            if sign * actual > 0.75 * sign * step.predicted:
                radius = min(s.radius_max, 2 * radius)
            radii.append(radius)
            if len(obj) > s.f_window:
                ref = obj[-1 - s.f_window]
                if abs(obj[-1] - ref) <= s.ftol * abs(ref):
                    reason, converged = "ftol", True
                    break
        else:
            radius *= 0.5
            radii.append(radius)
            if radius < s.step_tol:
                reason, converged = "step_tol", True
                break
    cert = None
    if certify:
        cert = check_optimality(spec, rho, spec.cluster_index(k), problem.direction)
    return OptimizeTrace(obj, radii, rho, spec, converged, reason, it, cert, seed_index, preds)


def optimize_multistart(
    problem: ExtremalProblem, n_seeds: Optional[int] = None, seed: int = 0
) -> tuple[OptimizeTrace, list[OptimizeTrace]]:
    """Best of several starts (rotated and perturbed initial densities).

    Returns the best trace and all traces in seed order. Ties keep the
    lower seed index.
    """
    n = problem.settings.n_seeds if n_seeds is None else int(n_seeds)
    if n < 1:
        raise ValueError("n_seeds must be >= 1")
    solver = _solver(problem)
    traces = []
    for i in range(n):
        sub = problem
        if i > 0 and problem.initial is not None:
            # explicit start: later seeds fall back to generated densities
            sub = ExtremalProblem(problem.curve, problem.alpha, problem.k, problem.direction, None, problem.settings)
        traces.append(optimize(sub, i, seed, solver=solver))
    best = traces[0]
    for tr in traces[1:]:
        if problem.sign * (tr.value - best.value) > 0:
            best = tr
    return best, traces


def settings_dict(settings: SolverSettings) -> dict:
    return asdict(settings)
