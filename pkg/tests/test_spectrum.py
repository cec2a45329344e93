import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov_extremal import io
from steklov_extremal.bem import assemble
from steklov_extremal.density import Density, make_arc_indicator, make_constant, make_fourier_perturbed
from steklov_extremal.geometry import make_disk, make_fourier_curve
from steklov_extremal.spectrum import SpectrumError, cluster, disk_galerkin, solve_weighted

REF_MIN_1 = 1.1517  # reference min λ_1 at α = 0.5


def test_constant_half(ops256):
    lam = solve_weighted(ops256, make_constant(ops256.curve, 0.5), 4).eigenvalues
    assert np.abs(lam - [2, 2, 4, 4]).max() <= 1e-8


def test_classical(ops256):
    lam = solve_weighted(ops256, make_constant(ops256.curve, 1.0), 6).eigenvalues
    assert np.abs(lam - [1, 1, 2, 2, 3, 3]).max() <= 1e-8


def test_two_arc_indicator_nystrom(ops512):
    lam = solve_weighted(ops512, make_arc_indicator(ops512.curve, 0.5, 2), 1).eigenvalues
    assert abs(lam[0] - REF_MIN_1) <= 2e-3


def test_two_arc_indicator_galerkin():
    rho = make_arc_indicator(make_disk(256), 0.5, 2)
    lam = disk_galerkin(rho, 400, 1).eigenvalues
    assert abs(lam[0] - REF_MIN_1) <= 2e-3


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
def test_galerkin_constant(alpha):
    lam = disk_galerkin(make_constant(make_disk(64), alpha), 10, 8).eigenvalues
    assert np.allclose(lam, np.repeat(np.arange(1, 5), 2) / alpha, rtol=1e-13)


def test_galerkin_matches_nystrom_smooth(ops256):
    rho = make_fourier_perturbed(ops256.curve, 0.5, 0.1, [0.0, 1.0])
    a = solve_weighted(ops256, rho, 8).eigenvalues
    b = disk_galerkin(rho, 100, 8).eigenvalues
    assert np.abs(a / b - 1).max() <= 1e-6


def test_galerkin_from_nodal_values(ops256):
    rho = make_fourier_perturbed(ops256.curve, 0.5, 0.1, [0.0, 1.0, 0.5])
    nodal = Density(rho.curve, rho.values, 0.5)
    assert nodal.fourier_moments is None
    a = disk_galerkin(rho, 60, 8).eigenvalues
    b = disk_galerkin(nodal, 60, 8).eigenvalues
    assert np.abs(a / b - 1).max() <= 1e-12


def test_cluster_examples():
    assert cluster([2, 2, 4, 4], 1e-6) == ((0, 1), (2, 3))
    assert cluster([1.0, 1.0000001, 1.5], 1e-5) == ((0, 1), (2,))
    assert cluster([1, 1.2, 1.4], 1e-6) == ((0,), (1,), (2,))
    assert cluster([], 1e-6) == ()


@pytest.mark.parametrize("solver", ["nystrom", "galerkin"])
def test_result_invariants(ops256, solver):
    rho = make_fourier_perturbed(ops256.curve, 0.5, 0.2, [0.3, 0.0, 1.0], [0.0, 0.4])
    spec = solve_weighted(ops256, rho, 10) if solver == "nystrom" else disk_galerkin(rho, 150, 10)
    lam = spec.eigenvalues
    assert np.all(lam > 0) and np.all(np.diff(lam) >= 0)
    G = spec.weighted_gram()
    assert np.abs(np.diag(G) - 1).max() <= 1e-8
    for c in spec.clusters:
        sub = G[np.ix_(c, c)]
        assert np.abs(sub - np.eye(len(c))).max() <= 1e-8


def test_rayleigh_and_residual_diagnostics(ops256):
    rho = make_arc_indicator(ops256.curve, 0.5, 2)
    spec = solve_weighted(ops256, rho, 6)
    assert spec.diagnostics["rayleigh_rel_error"] <= 1e-6
    assert spec.diagnostics["max_residual"] <= 1e-8


def test_orthogonal_within_exact_cluster(ops256):
    spec = solve_weighted(ops256, make_constant(ops256.curve, 0.5), 4)
    assert spec.clusters == ((0, 1), (2, 3))
    assert np.abs(spec.weighted_gram() - np.eye(4)).max() <= 1e-10


@pytest.mark.parametrize("c", [0.3, 2.5])
def test_scaling_law(ops256, c):
    base = make_fourier_perturbed(ops256.curve, 0.5, 0.1, [0.2, 1.0])
    scaled = Density.raw(base.curve, c * base.values)
    for solve in (lambda r: solve_weighted(ops256, r, 6), lambda r: disk_galerkin(r, 80, 6)):
        a, b = solve(base).eigenvalues, solve(scaled).eigenvalues
        assert np.abs(b * c / a - 1).max() <= 1e-10


@pytest.mark.parametrize("make", [
    lambda c: make_fourier_perturbed(c, 0.5, 0.1, [0.0, 1.0]),
    lambda c: make_arc_indicator(c, 0.5, 2),
    lambda c: make_arc_indicator(c, 0.3, 4),
])
def test_variational_upper_bound(ops256, make):
    # trial v = cos θ: harmonic extension r cos θ has Dirichlet energy π
    rho = make(ops256.curve)
    w = ops256.curve.weights
    v = np.cos(ops256.curve.theta)
    assert abs(np.dot(w * rho.values, v)) < 1e-12
    lam1 = solve_weighted(ops256, rho, 1).eigenvalues[0]
    assert lam1 <= np.pi / np.dot(w * rho.values, v**2) + 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_smooth_densities_cross_oracle(seed):
    c = make_disk(128)
    ops = _ops128()
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, 5)
    b = rng.uniform(-1, 1, 5)
    eps = 0.4 / (np.abs(a).sum() + np.abs(b).sum())
    rho = make_fourier_perturbed(c, 0.5, eps, a, b)
    x = solve_weighted(ops, Density(ops.curve, rho.values, 0.5), 6).eigenvalues
    y = disk_galerkin(rho, 60, 6).eigenvalues
    assert np.abs(x / y - 1).max() <= 1e-8


_cache = {}


def _ops128():
    if "ops" not in _cache:
        _cache["ops"] = assemble(make_disk(128))
    return _cache["ops"]


def test_too_many_eigenvalues():
    ops = assemble(make_disk(64))
    rho = make_arc_indicator(ops.curve, 0.5, 2)
    with pytest.raises(SpectrumError):
        solve_weighted(ops, rho, 60)
    with pytest.raises(SpectrumError):
        disk_galerkin(make_constant(ops.curve, 0.5), 4, 9)
    with pytest.raises(ValueError):
        solve_weighted(ops, rho, 0)


def test_zero_mass_is_singular():
    ops = assemble(make_disk(32))
    with pytest.raises(SpectrumError):
        solve_weighted(ops, Density.raw(ops.curve, np.zeros(32)), 1)


def test_galerkin_requires_disk():
    c = make_fourier_curve([0.0, 0.1], [], 64)
    with pytest.raises(ValueError):
        disk_galerkin(make_constant(c, 0.5), 10, 2)


def test_curve_mismatch_rejected(ops256):
    with pytest.raises(ValueError):
        solve_weighted(ops256, make_constant(make_disk(128), 0.5), 2)


def test_non_disk_spectrum_converged():
    vals = []
    for n in (256, 512):
        c = make_fourier_curve([0.0, 0.1, 0.05], [], n)
        vals.append(solve_weighted(assemble(c), make_constant(c, 0.5), 6).eigenvalues)
    assert np.abs(vals[0] - vals[1]).max() < 1e-10


def test_outputs(tmp_path, ops256):
    spec = solve_weighted(ops256, make_constant(ops256.curve, 0.5), 4)
    spec.write_traces_csv(tmp_path / "traces.csv")
    header, data = io.read_csv(tmp_path / "traces.csv")
    assert header == ["theta", "u_1", "u_2", "u_3", "u_4"]
    assert np.array_equal(data[:, 1:], spec.traces)
    m = json.loads(io.dumps(spec.manifest()))
    assert m["clusters"] == [[1, 2], [3, 4]]
    assert np.allclose(m["eigenvalues"], [2, 2, 4, 4])
