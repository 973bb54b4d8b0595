import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radmean.errors import DegenerateInput
from radmean.geometry import (
    L,
    R,
    general_position_report,
    hausdorff_distance,
    perturb,
    polygon_from_json,
    polygon_normalize,
    radial_function,
    random_polygon,
    regular_polygon,
    rotate,
    xray_length,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_rotations():
    assert np.allclose(L((1, 0)), (0, 1))
    assert np.allclose(R((1, 0)), (0, -1))
    assert np.allclose(L(R((3, -2))), (3, -2))
    assert np.allclose(rotate((1, 0), "left"), (0, 1))
    with pytest.raises(ValueError):
        rotate((1, 0), "up")


@given(finite, finite)
def test_double_left_rotation_negates(a, b):
    v = np.array([a, b])
    assert np.array_equal(rotate(rotate(v, "left"), "left"), -v)


def test_normalize_orders_ccw():
    K = polygon_normalize([(1, 1), (0, 0), (1.2, 2), (0, 1)])
    assert np.allclose(K.vertices, [(0, 0), (1, 1), (1.2, 2), (0, 1)])


def test_normalize_keeps_collinear_on_request():
    pts = [(0, 0), (0, 1), (1, 1), (0.5, 0.5)]
    assert len(polygon_normalize(pts, keep_collinear=True).vertices) == 4
    assert len(polygon_normalize(pts).vertices) == 3


def test_normalize_rejects_collinear_input():
    with pytest.raises(DegenerateInput):
        polygon_normalize([(0, 0), (1, 1), (2, 2), (3, 3)])
    with pytest.raises(DegenerateInput):
        polygon_from_json({"vertices": [[0, 0], [1, 1], [2, 2], [3, 3]]})


def test_areas(t1, q1, square):
    assert t1.area == pytest.approx(0.5, abs=1e-15)
    assert q1.area == pytest.approx(1.0, abs=1e-15)
    assert square.area == pytest.approx(1.0, abs=1e-15)


def test_radial_function(t1):
    assert radial_function(t1, (0.25, 0.5), (1, 0)) == pytest.approx(0.25, abs=1e-15)
    assert radial_function(t1, (0, 0.5), (1, 0)) == pytest.approx(0.5, abs=1e-15)
    assert radial_function(t1, (0, 0.5), (-1, 0)) == 0.0


def test_xray_length(t1):
    v = np.array([-1.0, 1.0]) / np.sqrt(2)
    t = float(R(v) @ np.array([0.0, 1.0]))
    assert xray_length(t1, v, t) == pytest.approx(np.sqrt(0.5), rel=1e-12)
    assert xray_length(t1, (0, 1), float(R((0, 1)) @ np.array([0.5, 0]))) == pytest.approx(0.5, rel=1e-12)
    assert xray_length(t1, (0, 1), 10.0) == 0.0


@given(st.integers(0, 10**6), st.floats(0, 2 * np.pi), st.floats(-1, 1))
def test_xray_even_in_direction(seed, th, s):
    K = random_polygon(seed)
    v = np.array([np.cos(th), np.sin(th)])
    lo, hi = sorted(K.vertices @ R(v))[0], sorted(K.vertices @ R(v))[-1]
    t = 0.5 * (lo + hi) + 0.5 * s * (hi - lo)
    assert xray_length(K, -v, -t) == pytest.approx(xray_length(K, v, t), rel=1e-12, abs=1e-12 * K.diameter)


@given(st.integers(0, 10**6), st.floats(0, 2 * np.pi), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_radial_pair_sums_to_xray(seed, th, u, w):
    K = random_polygon(seed)
    V = K.vertices
    x = V[0] + u * (V[1] - V[0]) + w * (1 - u) * (V[2] - V[0])  # inside triangle V0 V1 V2
    v = np.array([np.cos(th), np.sin(th)])
    total = radial_function(K, x, v) + radial_function(K, x, -v)
    assert total == pytest.approx(xray_length(K, v, float(R(v) @ x)), abs=1e-9 * K.diameter)


def test_general_position(t1, q1, square):
    assert general_position_report(square).has_opposite_parallel_sides
    assert general_position_report(q1).is_general_position
    assert general_position_report(t1).is_general_position


def test_perturb_square(square):
    P = perturb(square, 1e-6, 42)
    assert general_position_report(P).is_general_position
    assert hausdorff_distance(P, square) <= 1e-6 * square.diameter


def test_perturb_zero_is_identity(q1):
    assert np.array_equal(perturb(q1, 0.0, 1).vertices, q1.vertices)


@pytest.mark.parametrize("delta", [1e-3, 1e-5, 1e-7])
def test_perturb_area_drift(delta):
    K = regular_polygon(8)
    P = perturb(K, delta, 3)
    assert abs(P.area - K.area) <= 10 * delta * K.perimeter * K.diameter


def test_random_polygon_is_seeded():
    assert np.array_equal(random_polygon(5).vertices, random_polygon(5).vertices)
    assert 5 <= len(random_polygon(5).vertices) <= 12
