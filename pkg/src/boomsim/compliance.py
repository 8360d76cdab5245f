"""Task-space stiffness of the arm against a wall with outward normal -x.

The arm's only compliance is a torsional spring k_theta at the pitch joint.
A normal force F_x at the tip produces base torque tau1 = -F_x sin(theta1) d2,
and the tip moves dx = -d2 sin(theta1) dtheta1, so the reflected normal
stiffness is k_x = k_theta / (d2^2 sin^2 theta1). The contact itself has
normal stiffness k_ee; the two act in series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidStiffness, NearSingularStiffness
from .model import JointState


@dataclass(frozen=True)
class StiffnessModel:
    k_theta: float              # torsional stiffness (N*m/rad)
    k_ee: float = math.inf      # contact normal stiffness (N/m); inf = rigid contact
    sin_eps: float = 1e-3       # guard: below this sin(theta1) the moment arm vanishes

    def __post_init__(self):
        if self.k_theta <= 0:
            raise InvalidStiffness("k_theta must be > 0")
        if self.k_ee <= 0:
            raise InvalidStiffness("k_ee must be > 0 (use inf for rigid contact)")


def task_normal_stiffness(model: StiffnessModel, q: JointState) -> float:
    """Arm stiffness along the surface normal: k_theta / (d2^2 sin^2 theta1)."""
    s = math.sin(q.theta1)
    if s < model.sin_eps:
        raise NearSingularStiffness(
            f"sin(theta1) = {s:.2e} < {model.sin_eps:.0e}; "
            "normal direction has no moment arm"
        )
    return model.k_theta / (q.d2 * q.d2 * s * s)


def series_stiffness(k_x: float, k_ee: float) -> float:
    """Harmonic combination of two springs in series."""
    if k_x <= 0 or k_ee <= 0:
        raise InvalidStiffness(f"series_stiffness needs positive operands, got ({k_x}, {k_ee})")
    if math.isinf(k_x):
        return k_ee
    if math.isinf(k_ee):
        return k_x
    return 1.0 / (1.0 / k_x + 1.0 / k_ee)


def equivalent_stiffness(model: StiffnessModel, q: JointState) -> float:
    """Net task-space normal stiffness seen at the contact."""
    return series_stiffness(task_normal_stiffness(model, q), model.k_ee)
