import numpy as np
import pytest

from radmean.errors import InvalidP, TooFewPoints
from radmean.evaluator import NormEvaluator
from radmean.geometry import random_polygon, regular_polygon
from radmean.verifier import (
    CertifyConfig,
    approximation_convergence,
    c1_boundary_check,
    certify,
    disc_convergence,
    fd_hessian,
    hessian_scan,
    plain_increment,
    turning_test,
)
from radmean.oracle import norm_xray_exact


def _angle(v):
    return float(np.mod(np.arctan2(v[1], v[0]), 2 * np.pi))


def test_turning_regular_polygon():
    V = regular_polygon(16).vertices
    t, _ = turning_test(V)
    assert t == pytest.approx(np.sin(2 * np.pi / 16), rel=1e-12)


def test_turning_detects_dent():
    V = regular_polygon(16).vertices.copy()
    V[5] *= 0.9
    t, j = turning_test(V)
    assert t < 0 and (j + 1) % 16 == 5


def test_turning_needs_three_points():
    with pytest.raises(TooFewPoints):
        turning_test([(0, 0), (1, 0)])


def test_fd_hessian_quadratic():
    x = np.array([[0.3, -1.2], [2.0, 0.5]])
    H = fd_hessian(plain_increment(lambda X: X[:, 0] ** 2 + 3 * X[:, 0] * X[:, 1] - X[:, 1] ** 2), x, 1e-3)
    assert np.allclose(H, [[2, 3], [3, -2]], atol=1e-8)


def test_hessian_harness_detects_concavity(q1):
    ev = NormEvaluator(q1, -0.5)
    rep = hessian_scan(ev, 4, 1e-4, func=lambda X: -(X[:, 0] ** 2 + X[:, 1] ** 2))
    assert rep.min_eig == pytest.approx(-2.0, abs=1e-6)


def test_hessian_t1_is_flat(t1):
    rep = hessian_scan(NormEvaluator(t1, -0.5), 4, 1e-5)
    assert abs(rep.min_eig) <= 1e-8


@pytest.mark.parametrize("p", [-0.9, -0.5, -0.1])
def test_hessian_q1(q1, p):
    rep = hessian_scan(NormEvaluator(q1, p), 6, 1e-5)
    assert rep.min_eig >= -1e-7 and rep.skipped_sectors == 0


def test_c1_q1(q1):
    rep = c1_boundary_check(NormEvaluator(q1, -0.5))
    by_angle = {round(c.angle, 9): c for c in rep.checks}
    for d in [(1.2, 2), (-1, 0)]:  # the diagonals
        c = by_angle[round(_angle(d), 9)]
        assert not c.side_parallel and c.gradient_mismatch <= 1e-5
    for d in [(0, 1), (1, 1)]:
        c = by_angle[round(_angle(d), 9)]
        assert c.side_parallel and c.tangential_jump >= 0
    assert rep.ok


def test_c1_t1_all_kinks_convex(t1):
    rep = c1_boundary_check(NormEvaluator(t1, -0.5))
    kinks = [c for c in rep.checks if c.side_parallel]
    assert len(kinks) == 6  # three side directions, both orientations
    assert all(c.tangential_jump >= 0 for c in kinks)


def test_certify_q1(q1):
    cert = certify(q1, -0.5)
    assert cert.verdict == "pass" and cert.perturbation_applied == 0.0
    assert cert.turning_min >= -1e-8
    assert cert.thresholds == {"eps_turn": 1e-8, "eps_hess": 1e-7, "eps_c1": 1e-5, "eps_oracle": 1e-9}


@pytest.mark.parametrize("p", [-0.9, -0.5, -0.1])
def test_certify_square_via_perturbation(square, p):
    cert = certify(square, p)
    assert cert.verdict == "pass" and cert.perturbation_applied == 1e-6


def test_certify_rejects_p(q1):
    with pytest.raises(InvalidP):
        certify(q1, -1.5)
    with pytest.raises(InvalidP):
        certify(q1, 0.5)


def test_certificate_is_deterministic(square):
    assert certify(square, -0.5).to_json() == certify(square, -0.5).to_json()


def test_failing_threshold_fails(q1):
    cert = certify(q1, -0.5, CertifyConfig(samples=64, eps_oracle=0.0, eps_hess=-1.0))
    assert cert.verdict == "fail"


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.5, 1.0])
def test_certify_extended_range(p):
    for seed in range(5):
        cert = certify(random_polygon(seed), p, CertifyConfig(extended_range=True))
        assert cert.verdict == "pass", cert.to_json()


def test_disc_convergence():
    table = disc_convergence(-0.5, [8, 16, 32, 64])
    assert table.strictly_decreasing
    assert table.rows[-1].direction_spread <= 0.01
    assert table.rows[-1].sup_rel_diff <= 0.01


def test_constant_sequence_converges_trivially(q1):
    table = approximation_convergence(
        lambda m: q1, lambda u: norm_xray_exact(q1, -0.5, u), -0.5, [8, 16, 32], 12
    )
    assert all(r.sup_abs_diff == 0.0 for r in table.rows)
