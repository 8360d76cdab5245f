"""Kinematics of the planar pitch+extension (RP) long-reach arm.

Joint space is q = [theta1, d2]: a pitch angle measured from the horizontal
+x axis (the direction toward the wall) and the boom extension. All
operations here are pure functions; state validity (joint limits) is owned
by the plant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

SINGULAR_DET_EPS = 1e-9


@dataclass(frozen=True)
class JointState:
    theta1: float  # pitch angle (rad), in (0, pi) for contact work
    d2: float      # boom extension (m), > 0


@dataclass(frozen=True)
class JointVelocity:
    theta1_dot: float  # rad/s
    d2_dot: float      # m/s


@dataclass(frozen=True)
class EndpointState:
    x: float  # horizontal, toward the wall (m)
    y: float  # vertical (m)


@dataclass(frozen=True)
class RobotParams:
    """Geometry limits, rate limits, and the damped-inverse damping factor.

    dls_lambda is dimensionally mixed (it damps an angle row and a length
    row together); it is a numerical regularizer, not a physical quantity.
    """

    k_theta: float = 60.0          # lumped pitch torsional stiffness (N*m/rad)
    d2_min: float = 0.2
    d2_max: float = 1.2
    theta1_min: float = 0.1
    theta1_max: float = math.pi - 0.1
    theta1_dot_max: float = 1.0
    d2_dot_max: float = 0.5
    dls_lambda: float = 0.01

    def __post_init__(self):
        if self.k_theta <= 0:
            raise ValueError("k_theta must be > 0")
        if self.d2_min <= 0 or self.d2_max < self.d2_min:
            raise ValueError("need 0 < d2_min <= d2_max")
        if self.dls_lambda < 0:
            raise ValueError("dls_lambda must be >= 0")


def forward_kinematics(q: JointState) -> EndpointState:
    """Tip position (d2 cos theta1, d2 sin theta1)."""
    return EndpointState(q.d2 * math.cos(q.theta1), q.d2 * math.sin(q.theta1))


def jacobian(q: JointState) -> np.ndarray:
    """2x2 task Jacobian of the tip position; det(J) = -d2."""
    s, c = math.sin(q.theta1), math.cos(q.theta1)
    return np.array([[-q.d2 * s, c],
                     [q.d2 * c, s]])


def dls_inverse(J: np.ndarray, lam: float) -> np.ndarray:
    """Damped least-squares inverse J^T (J J^T + lam^2 I)^-1.

    With lam = 0 this is the exact inverse and raises SingularMatrix when
    |det J| < 1e-9. With lam > 0 the output stays bounded (max singular
    value of the result <= 1/(2*lam)).
    """
    a, b = J[0, 0], J[0, 1]
    c, d = J[1, 0], J[1, 1]
    if lam == 0.0:
        det = a * d - b * c
        if abs(det) < SINGULAR_DET_EPS:
            raise SingularMatrix(f"|det J| = {abs(det):.3e} with zero damping")
        return np.array([[d, -b], [-c, a]]) / det
    # M = J J^T + lam^2 I, then invert the symmetric 2x2 in closed form
    m00 = a * a + b * b + lam * lam
    m01 = a * c + b * d
    m11 = c * c + d * d + lam * lam
    det_m = m00 * m11 - m01 * m01
    minv = np.array([[m11, -m01], [-m01, m00]]) / det_m
    return J.T @ minv


def resolved_rate(
    q: JointState, v_task, params: RobotParams
) -> tuple[JointVelocity, bool]:
    """Map a task-space velocity to joint rates, q_dot = J^+ v.

    Joint rates are clamped componentwise to the configured limits; the
    returned flag is True when any component saturated.
    """
    jinv = dls_inverse(jacobian(q), params.dls_lambda)
    vx, vy = float(v_task[0]), float(v_task[1])
    th_dot = jinv[0, 0] * vx + jinv[0, 1] * vy
    d2_dot = jinv[1, 0] * vx + jinv[1, 1] * vy
    th_clamped = min(max(th_dot, -params.theta1_dot_max), params.theta1_dot_max)
    d2_clamped = min(max(d2_dot, -params.d2_dot_max), params.d2_dot_max)
    saturated = (th_clamped != th_dot) or (d2_clamped != d2_dot)
    return JointVelocity(th_clamped, d2_clamped), saturated
