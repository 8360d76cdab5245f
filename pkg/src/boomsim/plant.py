"""Quasi-static simulated world: penalty wall contact, stick-slip pad
friction, sensor noise, and the fixed-order multi-rate timeline.

There is no inertia: the contact force is an algebraic function of the
nominal (commanded) tip's penetration past the wall plane, using the series
stiffness of arm and contact. The wall is the plane x = wall_x with outward
normal -x, so the signed clearance is p = wall_x - x_tip and the force is
k_eq * p when p < 0 (negative: the sensor reads compression).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .compliance import StiffnessModel, equivalent_stiffness
from .errors import TimelineError
from .model import JointState, JointVelocity, RobotParams
from .trace import Trace, TraceSample

RESTICK_SPEED = 1e-4  # |y_dot| below this re-arms static friction (m/s)


@dataclass(frozen=True)
class WorldModel:
    wall_x: float                   # wall plane position (m)
    mu_s: float = 0.4               # static friction coefficient
    mu_k: float = 0.3               # kinetic friction coefficient
    k_wrist: float = 500.0          # lateral wrist spring for the stuck pad (N/m)
    stiction_coupling: float = 0.1  # fraction of tangential transient leaking into f_n
    stiction_tau: float = 0.2       # release decay time constant while slipping (s)
    noise_sigma: float = 0.02       # force sensor noise std dev (N)
    seed: int = 42

    def __post_init__(self):
        if not (self.mu_s >= self.mu_k >= 0):
            raise ValueError("need mu_s >= mu_k >= 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not (0.0 <= self.stiction_coupling <= 1.0):
            raise ValueError("stiction_coupling must be in [0, 1]")


@dataclass(frozen=True)
class PlantState:
    q_nominal: JointState
    t: float = 0.0
    in_contact: bool = False
    sticking: bool = False
    stick_anchor_y: float = 0.0
    f_t_transient: float = 0.0  # stick-phase tangential load, decaying after breakaway
    limit_hit: bool = False


@dataclass(frozen=True)
class SensorReading:
    f_n: float  # measured normal force (N), <= 0 in contact with noise off
    f_t: float  # measured tangential force (N)
    t: float


@dataclass(frozen=True)
class LoopTiming:
    dt_plant: float = 5e-4  # plant integration step (s)
    dt_force: float = 2e-3  # force/admittance loop period (s)
    dt_traj: float = 0.1    # trajectory loop period (s)

    def __post_init__(self):
        if not (0 < self.dt_plant <= self.dt_force <= self.dt_traj):
            raise ValueError("need 0 < dt_plant <= dt_force <= dt_traj")
        for name in ("dt_force", "dt_traj"):
            ratio = getattr(self, name) / self.dt_plant
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be an integer multiple of dt_plant")

    def force_divisor(self) -> int:
        return round(self.dt_force / self.dt_plant)

    def traj_divisor(self) -> int:
        return round(self.dt_traj / self.dt_plant)


def contact_force(q_nominal: JointState, world: WorldModel,
                  stiffness: StiffnessModel) -> float:
    """Ideal (noise-free) normal force at the nominal configuration."""
    x_tip = q_nominal.d2 * math.cos(q_nominal.theta1)
    p = world.wall_x - x_tip
    if p >= 0.0:
        return 0.0
    return equivalent_stiffness(stiffness, q_nominal) * p


def plant_step(
    state: PlantState,
    qdot_cmd: JointVelocity,
    world: WorldModel,
    stiffness: StiffnessModel,
    robot: RobotParams,
    dt: float,
    rng: np.random.Generator | None = None,
) -> tuple[PlantState, SensorReading]:
    """Advance one plant tick with the latched joint-velocity command.

    Integrates the commanded velocity (then clamps to joint limits, flagging
    limit_hit), evaluates the penalty contact force, updates the stick/slip
    state of the pad, and synthesizes the sensor reading:

        f_n_measured = f_n_ideal + stiction_coupling * f_t_transient + noise

    where f_t_transient is the tangential spring load built up while stuck,
    decaying exponentially once the pad slips.
    """
    q = state.q_nominal
    y_old = q.d2 * math.sin(q.theta1)

    th = q.theta1 + qdot_cmd.theta1_dot * dt
    d2 = q.d2 + qdot_cmd.d2_dot * dt
    th_c = min(max(th, robot.theta1_min), robot.theta1_max)
    d2_c = min(max(d2, robot.d2_min), robot.d2_max)
    limit_hit = (th_c != th) or (d2_c != d2)
    q_new = JointState(th_c, d2_c)

    x_tip = q_new.d2 * math.cos(q_new.theta1)
    y_tip = q_new.d2 * math.sin(q_new.theta1)
    p = world.wall_x - x_tip
    in_contact = p < 0.0
    f_ideal = equivalent_stiffness(stiffness, q_new) * p if in_contact else 0.0

    sticking = state.sticking
    anchor = state.stick_anchor_y
    transient = state.f_t_transient
    f_t = 0.0

    if not in_contact:
        sticking = False
        transient = 0.0
    else:
        if not state.in_contact:
            # touchdown: pad grabs the surface where it lands
            sticking = True
            anchor = y_tip
        y_dot = (y_tip - y_old) / dt
        if sticking:
            spring = world.k_wrist * (y_tip - anchor)
            if abs(spring) > world.mu_s * abs(f_ideal):
                # breakaway: carry the released load into the transient
                sticking = False
                transient = spring
                f_t = world.mu_k * abs(f_ideal) * _sign(y_dot)
            else:
                f_t = spring
                transient = spring
        else:
            if abs(y_dot) < RESTICK_SPEED:
                sticking = True
                anchor = y_tip
                f_t = 0.0
                transient = 0.0
            else:
                f_t = world.mu_k * abs(f_ideal) * _sign(y_dot)
                transient *= math.exp(-dt / world.stiction_tau)

    f_meas = f_ideal + world.stiction_coupling * transient
    if rng is not None and world.noise_sigma > 0.0:
        f_meas += rng.normal(0.0, world.noise_sigma)

    new_state = PlantState(
        q_nominal=q_new,
        t=state.t + dt,
        in_contact=in_contact,
        sticking=sticking,
        stick_anchor_y=anchor,
        f_t_transient=transient,
        limit_hit=limit_hit,
    )
    return new_state, SensorReading(f_meas, f_t, new_state.t)


def _sign(v: float) -> float:
    return 1.0 if v > 0 else (-1.0 if v < 0 else 0.0)


def initial_state(q0: JointState, world: WorldModel,
                  stiffness: StiffnessModel,
                  rng: np.random.Generator | None = None
                  ) -> tuple[PlantState, SensorReading]:
    """State and sensor reading at t = 0 (before any motion)."""
    x_tip = q0.d2 * math.cos(q0.theta1)
    y_tip = q0.d2 * math.sin(q0.theta1)
    p = world.wall_x - x_tip
    in_contact = p < 0.0
    f = equivalent_stiffness(stiffness, q0) * p if in_contact else 0.0
    if rng is not None and world.noise_sigma > 0.0:
        f += rng.normal(0.0, world.noise_sigma)
    state = PlantState(q_nominal=q0, in_contact=in_contact,
                       sticking=in_contact, stick_anchor_y=y_tip)
    return state, SensorReading(f, 0.0, 0.0)


class ZeroControllers:
    """No-op callback bundle: never moves, logs the approach phase."""

    def on_trajectory(self, est_xy, t):
        pass

    def on_force(self, reading, q):
        return JointVelocity(0.0, 0.0)

    def sample(self):
        return dict(phase="approach", v_n_cmd=0.0, v_t_cmd=0.0,
                    k_eq=0.0, k_f=0.0, b=0.0)


def run_timeline(
    duration: float,
    timing: LoopTiming,
    controllers,
    world: WorldModel,
    stiffness: StiffnessModel,
    robot: RobotParams,
    q0: JointState,
    stop=None,
) -> Trace:
    """Deterministic fixed-order multi-rate loop.

    At each plant tick, in order: (1) on a trajectory-loop boundary, invoke
    controllers.on_trajectory with the one-period-delayed tip position
    estimate; (2) on a force-loop boundary, invoke controllers.on_force with
    the latest sensor reading and latch the returned joint-velocity command,
    then log one trace row; (3) step the plant with the latched command.

    `controllers` must provide on_trajectory(est_xy, t), on_force(reading, q)
    -> JointVelocity, and sample() -> dict with the control-side trace
    columns. `stop(state, reading) -> bool` optionally ends the run early
    (divergence guard). Identical inputs and seed give a bit-identical trace.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    rng = np.random.default_rng(world.seed)
    n_force = timing.force_divisor()
    n_traj = timing.traj_divisor()
    n_steps = round(duration / timing.dt_plant)

    state, reading = initial_state(q0, world, stiffness, rng)
    ex0 = q0.d2 * math.cos(q0.theta1)
    ey0 = q0.d2 * math.sin(q0.theta1)
    est_prev = (ex0, ey0)
    qdot = JointVelocity(0.0, 0.0)
    trace = Trace()

    for k in range(n_steps):
        t_k = k * timing.dt_plant
        try:
            if k % n_traj == 0:
                controllers.on_trajectory(est_prev, t_k)
                q = state.q_nominal
                est_prev = (q.d2 * math.cos(q.theta1), q.d2 * math.sin(q.theta1))
            if k % n_force == 0:
                qdot = controllers.on_force(reading, state.q_nominal)
                trace.append(_make_sample(t_k, state, reading, controllers.sample()))
        except Exception as exc:
            raise TimelineError(f"controller failed at t={t_k:.4f}s: {exc}",
                                trace=trace) from exc
        state, reading = plant_step(state, qdot, world, stiffness, robot,
                                    timing.dt_plant, rng)
        if stop is not None and stop(state, reading):
            break
    return trace


def _make_sample(t, state: PlantState, reading: SensorReading, ctl: dict) -> TraceSample:
    q = state.q_nominal
    return TraceSample.quantized(
        t=t,
        phase=ctl["phase"],
        theta1=q.theta1,
        d2=q.d2,
        x=q.d2 * math.cos(q.theta1),
        y=q.d2 * math.sin(q.theta1),
        f_n=reading.f_n,
        f_t=reading.f_t,
        v_n_cmd=ctl["v_n_cmd"],
        v_t_cmd=ctl["v_t_cmd"],
        k_eq=ctl["k_eq"],
        k_f=ctl["k_f"],
        b=ctl["b"],
    )
