import math

import numpy as np
import pytest

from steklov_extremal.bem import assemble
from steklov_extremal.density import make_arc_indicator, make_constant
from steklov_extremal.experiments import hps_bound_check, homogenization_sweep, weyl_compare, weyl_value
from steklov_extremal.geometry import make_disk
from steklov_extremal.spectrum import solve_weighted


def test_weyl_value():
    assert [weyl_value(0.5, k) for k in range(1, 7)] == [2, 2, 4, 4, 6, 6]


def test_weyl_compare_examples():
    rows = weyl_compare(0.5, {1: 1.1517, 2: 2.9193})
    assert rows[0].weyl == 2 and rows[1].weyl == 2
    assert rows[0].ratio == pytest.approx(0.576, abs=5e-4)
    assert rows[1].ratio == pytest.approx(1.460, abs=5e-4)
    rows = weyl_compare(0.25, [4.0, 4.0, 8.0])
    assert [r.ratio for r in rows] == [1.0, 1.0, 1.0]
    assert [r.k for r in rows] == [1, 2, 3]


def test_sweep_full_circle_is_classical():
    rows = homogenization_sweep(1.0, 4, [1, 2, 4])
    for r in rows:
        assert r.eigenvalue == pytest.approx(2.0, rel=1e-8)
        assert r.limit == 2.0


def test_sweep_indicator_two_arcs():
    (row,) = homogenization_sweep(0.5, 1, [2], n_nodes=512)
    assert row.eigenvalue == pytest.approx(1.1517, abs=2e-3)
    assert row.limit == 2.0


def test_sweep_node_rule():
    rows = homogenization_sweep(0.5, 1, [2, 16])
    assert [r.n_nodes for r in rows] == [512, 512]
    assert homogenization_sweep(0.5, 1, [32])[0].n_nodes == 1024
    with pytest.raises(ValueError):
        homogenization_sweep(0.5, 1, [16], n_nodes=256)
    with pytest.raises(ValueError):
        homogenization_sweep(0.5, 1, [4, 2])
    with pytest.raises(ValueError):
        homogenization_sweep(0.5, 1, [2, 2])


def test_sweep_self_convergence():
    (row,) = homogenization_sweep(0.5, 1, [2])
    a = row.eigenvalue
    b = homogenization_sweep(0.5, 1, [2], n_nodes=2 * row.n_nodes)[0].eigenvalue
    assert abs(a - b) < 1e-4


def test_hps_constant_is_tight(ops256):
    spec = solve_weighted(ops256, make_constant(ops256.curve, 0.5), 4)
    rep = hps_bound_check(spec, 0.5, 2 * math.pi)
    assert rep.passed
    assert np.allclose(rep.bounds, [2, 4, 6, 8])
    # λ = [2, 2, 4, 4]: tight at k = 1, margins 2, 2, 4 after that
    assert abs(rep.margins[0]) < 1e-8
    assert np.allclose(rep.margins[1:], [2, 2, 4], atol=1e-8)


def test_hps_indicator_slack(ops256):
    spec = solve_weighted(ops256, make_arc_indicator(ops256.curve, 0.5, 2), 2)
    rep = hps_bound_check(spec)
    assert rep.passed
    assert rep.margins[0] == pytest.approx(0.848, abs=3e-3)
    d = rep.to_dict()
    assert set(d) == {"bounds", "margins", "passed"}


def test_hps_detects_violation(ops256):
    spec = solve_weighted(ops256, make_constant(ops256.curve, 0.5), 2)
    # a bound computed for a larger mass is violated
    assert not hps_bound_check(spec, 1.0, 2 * math.pi).passed
