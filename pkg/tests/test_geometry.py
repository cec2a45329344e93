import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov_extremal.geometry import (
    boundary_integral,
    curve_from_descriptor,
    make_disk,
    make_fourier_curve,
)


def test_tiny_disk_points():
    c = make_disk(4, min_nodes=4)
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(c.points, expected, atol=1e-15)


def test_disk_quadrature_data():
    c = make_disk(256)
    assert abs(c.perimeter - 2 * np.pi) <= 1e-14
    assert np.allclose(c.normals[0], [1.0, 0.0], atol=1e-15)
    assert np.all(c.speeds == 1.0)
    assert np.allclose(c.normals, c.points, atol=1e-15)
    assert np.allclose(c.weights, 2 * np.pi / 256)


@pytest.mark.parametrize("n", [3, 15, 14, 17])
def test_rejects_bad_node_counts(n):
    with pytest.raises(ValueError):
        make_disk(n)


def test_boundary_integral_examples():
    c = make_disk(256)
    assert abs(boundary_integral(c, np.ones(256)) - 2 * np.pi) <= 1e-14
    assert abs(boundary_integral(c, np.cos(c.theta) ** 2) - np.pi) <= 1e-12
    assert abs(boundary_integral(c, np.cos(c.theta))) <= 1e-13
    with pytest.raises(ValueError):
        boundary_integral(c, np.ones(255))


def test_disk_perimeter_stable_under_refinement():
    assert abs(make_disk(128).perimeter - make_disk(256).perimeter) < 1e-13


def test_empty_fourier_curve_is_disk():
    c = make_fourier_curve([], [], 64)
    d = make_disk(64)
    assert c.is_disk
    assert np.array_equal(c.points, d.points)
    assert np.array_equal(c.weights, d.weights)


def test_fourier_perimeter_against_fine_trapezoid():
    # independent arclength: trapezoid on a finely sampled polygon-free radius formula
    t = 2 * np.pi * np.arange(8192) / 8192
    r = 1 + 0.1 * np.cos(2 * t)
    dr = -0.2 * np.sin(2 * t)
    fine = np.sum(np.sqrt(r**2 + dr**2)) * 2 * np.pi / 8192
    c = make_fourier_curve([0.0, 0.1], [], 256)
    assert abs(c.perimeter - fine) <= 1e-8 * fine


def test_fourier_rejects_small_radius():
    with pytest.raises(ValueError):
        make_fourier_curve([-1.0], [], 64)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-0.15, 0.15), min_size=1, max_size=4),
    st.lists(st.floats(-0.15, 0.15), max_size=4),
)
def test_normals_unit_and_orthogonal(cos_c, sin_c):
    c = make_fourier_curve(cos_c, sin_c, 64)
    assert np.allclose(np.linalg.norm(c.normals, axis=1), 1.0, atol=1e-12)
    tdot = np.einsum("ij,ij->i", c.normals, c.tangents) / c.speeds
    assert np.abs(tdot).max() <= 1e-12
    assert np.all(c.speeds > 0)
    # outward: normal points away from the origin for star-shaped curves
    assert np.all(np.einsum("ij,ij->i", c.normals, c.points) > 0)


def test_descriptor_round_trip():
    c = make_fourier_curve([0.0, 0.1], [0.05], 128)
    again = curve_from_descriptor(json.dumps(c.descriptor()))
    assert np.array_equal(again.points, c.points)
    assert curve_from_descriptor({"kind": "disk", "n_nodes": 32}).is_disk
    with pytest.raises(ValueError):
        curve_from_descriptor({"kind": "spline"})
