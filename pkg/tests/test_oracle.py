import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radmean.errors import BadSampleCount, InvalidP, QuadratureNoConvergence
from radmean.evaluator import NormEvaluator
from radmean.geometry import polygon_from_vertices, random_polygon, regular_polygon
from radmean.oracle import (
    ChordProfile,
    check_p,
    disc_profile,
    norm_chord_quadrature,
    norm_mc_radial,
    norm_xray_exact,
    polygon_profile,
)

from conftest import DIAG

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def test_xray_exact_values(t1, square):
    assert norm_xray_exact(square, -0.5, (0, 1)) == pytest.approx(0.25, rel=1e-15)
    assert norm_xray_exact(square, 1.0, (0, 1)) == pytest.approx(0.5, rel=1e-15)
    assert norm_xray_exact(t1, -0.5, DIAG) == pytest.approx(np.sqrt(2) / 36, rel=1e-12)


def test_check_p():
    for bad in (-1.0, -1.5, 0.0, np.nan, np.inf):
        with pytest.raises(InvalidP):
            check_p(bad)
    with pytest.raises(InvalidP, match=r"p must lie in \(-1,0\)"):
        check_p(-1.5, extended=False)
    assert check_p(2.0) == 2.0


@given(st.integers(0, 10**6), angles, st.sampled_from([-0.9, -0.5, -0.1, 0.5, 1.0]))
def test_xray_even(seed, th, p):
    K = random_polygon(seed)
    x = np.array([np.cos(th), np.sin(th)])
    assert norm_xray_exact(K, p, -x) == pytest.approx(norm_xray_exact(K, p, x), rel=1e-12)


@given(st.integers(0, 10**6), angles, st.floats(0.1, 0.9))
def test_xray_collinear_invariance(seed, th, s):
    K = random_polygon(seed)
    V = K.vertices
    K2 = polygon_from_vertices(np.insert(V, 2, V[1] + s * (V[2] - V[1]), axis=0))
    x = np.array([np.cos(th), np.sin(th)])
    assert norm_xray_exact(K2, -0.5, x) == pytest.approx(norm_xray_exact(K, -0.5, x), rel=1e-12)


@given(st.integers(0, 10**6), angles, st.sampled_from([-0.9, -0.5, -0.1]))
def test_chord_quadrature_matches_exact(seed, th, p):
    K = random_polygon(seed)
    x = np.array([np.cos(th), np.sin(th)])
    assert norm_chord_quadrature(polygon_profile(K, x), K.area, p) == pytest.approx(
        norm_xray_exact(K, p, x), rel=1e-10
    )


@pytest.mark.parametrize("p", [-0.5, -0.1])
def test_radial_normalisation_agrees(q1, p):
    x = np.array([0.6, 0.8])
    a = NormEvaluator(q1, p, normalization="radial").norm(x)
    assert norm_xray_exact(q1, p, x, "radial") == pytest.approx(a, rel=1e-12)
    assert norm_chord_quadrature(polygon_profile(q1, x), q1.area, p, normalization="radial") == pytest.approx(
        a, rel=1e-10
    )


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_disc_quadrature_scaling(lam):
    a = norm_chord_quadrature(disc_profile(1.0), np.pi, -0.5, normalization="radial")
    b = norm_chord_quadrature(disc_profile(lam), np.pi * lam**2, -0.5, normalization="radial")
    # R_p(lam D) = lam R_p(D), so the norm scales by 1/lam
    assert b == pytest.approx(a / lam, rel=1e-10)


def test_disc_quadrature_against_regular_polygons():
    d = norm_chord_quadrature(disc_profile(1.0), np.pi, -0.5)
    K = regular_polygon(512)
    assert norm_xray_exact(K, -0.5, (1, 0)) == pytest.approx(d, rel=1e-3)


def test_chord_quadrature_empty_support():
    prof = ChordProfile(1.0, 1.0, lambda t: np.zeros_like(t))
    with pytest.raises(QuadratureNoConvergence):
        norm_chord_quadrature(prof, 1.0, -0.5)


def test_mc_rejects_zero_samples(t1):
    with pytest.raises(BadSampleCount):
        norm_mc_radial(t1, -0.5, DIAG, 0, 1)


def test_mc_is_seeded(q1):
    a = norm_mc_radial(q1, -0.5, DIAG, 50_000, 9)
    b = norm_mc_radial(q1, -0.5, DIAG, 50_000, 9)
    assert a == b


@pytest.mark.parametrize("p", [-0.5, 0.5])
def test_mc_within_error(q1, p):
    x = np.array([0.6, -0.8])
    est = norm_mc_radial(q1, p, x, 200_000, 5)
    exact = norm_xray_exact(q1, p, x)
    assert abs(est.estimate - exact) <= 3 * est.stderr + est.bias_bound
    assert est.bias_bound < est.stderr
    assert est.radial_mean_norm == pytest.approx(norm_xray_exact(q1, p, x, "radial") * est.estimate / exact)
