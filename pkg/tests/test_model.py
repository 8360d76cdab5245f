import math

import numpy as np
import pytest

from boomsim.errors import SingularMatrix
from boomsim.model import (
    JointState,
    RobotParams,
    dls_inverse,
    forward_kinematics,
    jacobian,
    resolved_rate,
)

WIDE = RobotParams(d2_min=1e-3, d2_max=10.0, theta1_min=-10.0, theta1_max=10.0,
                   theta1_dot_max=1e6, d2_dot_max=1e6, dls_lambda=0.0)


def test_fk_axis_aligned():
    tip = forward_kinematics(JointState(math.pi / 2, 1.0))
    assert abs(tip.x) < 1e-12 and abs(tip.y - 1.0) < 1e-12
    tip = forward_kinematics(JointState(0.0, 0.5))
    assert abs(tip.x - 0.5) < 1e-12 and abs(tip.y) < 1e-12


def test_fk_45deg():
    tip = forward_kinematics(JointState(math.pi / 4, 2.0))
    assert abs(tip.x - 1.414214) < 1e-6
    assert abs(tip.y - 1.414214) < 1e-6


def test_fk_radius_invariant():
    rng = np.random.default_rng(0)
    for _ in range(50):
        q = JointState(rng.uniform(0.1, 3.0), rng.uniform(0.1, 2.0))
        tip = forward_kinematics(q)
        assert abs(tip.x ** 2 + tip.y ** 2 - q.d2 ** 2) < 1e-12


def test_jacobian_axis_aligned():
    J = jacobian(JointState(math.pi / 2, 1.0))
    assert np.allclose(J, [[-1.0, 0.0], [0.0, 1.0]], atol=1e-12)
    J = jacobian(JointState(0.0, 2.0))
    assert np.allclose(J, [[0.0, 1.0], [2.0, 0.0]], atol=1e-12)


def test_jacobian_determinant():
    rng = np.random.default_rng(1)
    for _ in range(100):
        q = JointState(rng.uniform(0.3, 2.8), rng.uniform(0.3, 1.0))
        J = jacobian(q)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        assert abs(det + q.d2) < 1e-12


def test_jacobian_vs_finite_differences():
    rng = np.random.default_rng(2)
    h = 1e-6
    for _ in range(100):
        q = JointState(rng.uniform(0.3, 2.8), rng.uniform(0.3, 1.0))
        J = jacobian(q)
        for j, (dth, dd2) in enumerate(((h, 0.0), (0.0, h))):
            hi = forward_kinematics(JointState(q.theta1 + dth, q.d2 + dd2))
            lo = forward_kinematics(JointState(q.theta1 - dth, q.d2 - dd2))
            fd = np.array([hi.x - lo.x, hi.y - lo.y]) / (2 * h)
            rel = np.abs(fd - J[:, j]) / np.maximum(np.abs(J[:, j]), 1e-3)
            assert np.max(rel) < 1e-6


def test_dls_exact_inverse_cases():
    out = dls_inverse(np.array([[-1.0, 0.0], [0.0, 1.0]]), 0.0)
    assert np.allclose(out, [[-1.0, 0.0], [0.0, 1.0]], atol=1e-14)
    out = dls_inverse(np.array([[0.0, 1.0], [2.0, 0.0]]), 0.0)
    assert np.allclose(out, [[0.0, 0.5], [1.0, 0.0]], atol=1e-14)


def test_dls_singular_raises_without_damping():
    J = jacobian(JointState(1.0, 0.0))  # d2 = 0: rank deficient
    with pytest.raises(SingularMatrix):
        dls_inverse(J, 0.0)


def test_dls_damped_matches_hand_inverse_at_singularity():
    # oracle: J^T (J J^T + lam^2 I)^-1 with the 2x2 inversion done by hand
    theta = 0.7
    lam = 0.01
    J = jacobian(JointState(theta, 0.0))
    s, c = math.sin(theta), math.cos(theta)
    m = [[c * c + lam * lam, c * s], [c * s, s * s + lam * lam]]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    minv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
    expected = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            expected[i, j] = J[0, i] * minv[0][j] + J[1, i] * minv[1][j]
    out = dls_inverse(J, lam)
    assert np.allclose(out, expected, atol=1e-12)
    assert np.all(np.isfinite(out))
    assert np.max(np.abs(out)) <= 1.0 / (2.0 * lam) + 1e-9


def test_resolved_rate_diagonal_pose():
    qdot, sat = resolved_rate(JointState(math.pi / 2, 1.0), (0.0, 0.1), WIDE)
    assert abs(qdot.theta1_dot) < 1e-12 and abs(qdot.d2_dot - 0.1) < 1e-12
    assert not sat
    qdot, _ = resolved_rate(JointState(math.pi / 2, 1.0), (0.1, 0.0), WIDE)
    assert abs(qdot.theta1_dot + 0.1) < 1e-12 and abs(qdot.d2_dot) < 1e-12


def test_resolved_rate_multiply_back():
    q = JointState(math.pi / 4, 2.0)
    qdot, _ = resolved_rate(q, (0.05, 0.0), WIDE)
    v = jacobian(q) @ np.array([qdot.theta1_dot, qdot.d2_dot])
    assert np.allclose(v, [0.05, 0.0], atol=1e-9)


def test_resolved_rate_round_trip_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        q = JointState(rng.uniform(0.3, 2.8), rng.uniform(0.3, 1.0))
        v = rng.uniform(-0.2, 0.2, size=2)
        qdot, sat = resolved_rate(q, v, WIDE)
        assert not sat
        back = jacobian(q) @ np.array([qdot.theta1_dot, qdot.d2_dot])
        assert np.allclose(back, v, atol=1e-9)


def test_resolved_rate_saturation_flag():
    params = RobotParams(theta1_dot_max=0.01, d2_dot_max=0.01, dls_lambda=0.0)
    qdot, sat = resolved_rate(JointState(math.pi / 2, 1.0), (0.5, 0.5), params)
    assert sat
    assert abs(qdot.theta1_dot) <= 0.01 and abs(qdot.d2_dot) <= 0.01


def test_resolved_rate_propagates_singularity():
    with pytest.raises(SingularMatrix):
        resolved_rate(JointState(1.0, 0.0), (0.1, 0.0), WIDE)
