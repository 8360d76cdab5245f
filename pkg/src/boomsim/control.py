"""Contact-phase state machine and the gain-scheduled velocity admittance.

Sign conventions (used consistently everywhere):
  * the surface outward normal is n = (-1, 0), the tangent is t = (0, 1);
  * v_n is the commanded velocity along n, so v_n < 0 presses into the wall;
  * compression forces are negative, so the contact setpoint f_des < 0.

The admittance renders a virtual mass-damper on the normal axis,

    M v_n_dot + B v_n = K_f (f_des - f_n),

and the gains are rescheduled from the current task stiffness k_eq so the
force-error transient keeps a fixed natural frequency and damping:

    K_f = omega_n^2 M / k_eq,    B = 2 eta omega_n M.

The discrete update (forward Euler at the force-loop period) is

    v_n' = dt (K_f/M) (f_des - f_n) + (1 - dt B/M) v_n.

Tangential motion is independent: feedforward trajectory rate plus a
proportional correction on the (delayed, 10 Hz) position estimate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .compliance import StiffnessModel, equivalent_stiffness
from .errors import InvalidStiffness, UnstableTimestep
from .model import JointState, JointVelocity, RobotParams, resolved_rate
from .plant import SensorReading


class Phase(enum.Enum):
    APPROACH = "approach"
    STABILIZE = "stabilize"
    SWEEP = "sweep"


@dataclass(frozen=True)
class AdmittanceSpec:
    omega_n: float = 10.0  # target natural frequency (rad/s)
    eta: float = 1.0       # target damping ratio
    mass: float = 1.0      # virtual mass (kg)

    def __post_init__(self):
        if self.omega_n <= 0 or self.eta <= 0 or self.mass <= 0:
            raise ValueError("omega_n, eta, mass must all be > 0")


@dataclass(frozen=True)
class AdmittanceGains:
    k_f: float   # force gain
    b: float     # virtual damping (N*s/m)
    mass: float  # virtual mass (kg)


@dataclass(frozen=True)
class ControlSetpoint:
    f_des: float = -2.0         # desired normal force (N, negative = press)
    v_sweep: float = 0.05       # tangential feedforward speed (m/s)
    y_traj: tuple | None = None  # optional ((tau, dy), ...) piecewise-linear
    k_p: float = 2.0            # tangential position gain (1/s)

    def __post_init__(self):
        if self.f_des >= 0:
            raise ValueError("f_des must be < 0 for contact tasks")
        if self.k_p < 0:
            raise ValueError("k_p must be >= 0")


@dataclass(frozen=True)
class ContactProtocol:
    """Approach/stabilize handshake parameters."""

    v_approach: float = 0.02   # constant approach speed into the surface (m/s)
    f_thresh: float = 0.3      # contact detection threshold (N)
    n_consecutive: int = 5     # consecutive over-threshold samples to latch contact
    eps_f: float = 0.1         # force-error band for stabilize -> sweep (N)
    t_hold: float = 0.5        # time the error must stay in band (s)


@dataclass(frozen=True)
class ControllerState:
    phase: Phase = Phase.APPROACH
    v_n: float = 0.0
    v_t: float = 0.0
    contact_counter: int = 0
    hold_timer: float = 0.0
    contact_time: float | None = None
    sweep_time: float | None = None
    sweep_y0: float = 0.0
    y_est: float = 0.0           # latched tangential position estimate
    t_est: float = 0.0           # time of the latched estimate
    f_filt: float | None = None  # low-pass state (None = not initialized)
    held_gains: AdmittanceGains | None = None
    # last computed values, for the trace
    k_eq: float = 0.0
    k_f: float = 0.0
    b: float = 0.0


def schedule_gains(spec: AdmittanceSpec, k_eq: float) -> AdmittanceGains:
    """Gains that pin the closed-loop error dynamics at (omega_n, eta)."""
    if k_eq <= 0:
        raise InvalidStiffness(f"k_eq must be > 0, got {k_eq}")
    return AdmittanceGains(
        k_f=spec.omega_n ** 2 * spec.mass / k_eq,
        b=2.0 * spec.eta * spec.omega_n * spec.mass,
        mass=spec.mass,
    )


def admittance_step(gains: AdmittanceGains, v_n: float, f_n: float,
                    f_des: float, dt: float) -> float:
    """One Euler update of the velocity admittance law."""
    decay = dt * gains.b / gains.mass
    if decay >= 2.0:
        raise UnstableTimestep(
            f"dt*B/M = {decay:.3f} >= 2: velocity decay term leaves (-1, 1)")
    return dt * (gains.k_f / gains.mass) * (f_des - f_n) + (1.0 - decay) * v_n


def detect_contact(reading: SensorReading, state: ControllerState,
                   f_thresh: float, n_consecutive: int
                   ) -> tuple[ControllerState, bool]:
    """Debounced contact latch: n consecutive samples over the threshold."""
    if abs(reading.f_n) > f_thresh:
        counter = state.contact_counter + 1
    else:
        counter = 0
    return replace(state, contact_counter=counter), counter >= n_consecutive


def _reference(setpoint: ControlSetpoint, tau: float) -> tuple[float, float]:
    """Tangential reference displacement and rate at time tau past sweep entry."""
    tau = max(tau, 0.0)
    if setpoint.y_traj is None:
        return setpoint.v_sweep * tau, setpoint.v_sweep
    pts = setpoint.y_traj
    if tau <= pts[0][0]:
        return pts[0][1], 0.0
    for (t0, y0), (t1, y1) in zip(pts, pts[1:]):
        if tau <= t1:
            rate = (y1 - y0) / (t1 - t0)
            return y0 + rate * (tau - t0), rate
    return pts[-1][1], 0.0


def tangential_velocity(setpoint: ControlSetpoint, y_est: float, t: float,
                        t0: float = 0.0, y0: float = 0.0) -> float:
    """Feedforward reference rate plus proportional position correction.

    The reference is anchored at (t0, y0), the sweep entry point; y_est is
    the latched (delayed) tangential position estimate.
    """
    dy_ref, rate = _reference(setpoint, t - t0)
    return rate + setpoint.k_p * ((y0 + dy_ref) - y_est)


def phase_update(state: ControllerState, reading: SensorReading,
                 setpoint: ControlSetpoint, protocol: ContactProtocol,
                 dt: float) -> ControllerState:
    """Monotone Approach -> Stabilize -> Sweep progression."""
    if state.phase is Phase.APPROACH:
        state, detected = detect_contact(reading, state, protocol.f_thresh,
                                         protocol.n_consecutive)
        if detected:
            # admittance takes over seeded with the current approach velocity
            return replace(state, phase=Phase.STABILIZE,
                           v_n=-protocol.v_approach,
                           contact_time=reading.t, hold_timer=0.0)
        return state
    if state.phase is Phase.STABILIZE:
        err = setpoint.f_des - reading.f_n
        hold = state.hold_timer + dt if abs(err) < protocol.eps_f else 0.0
        if hold >= protocol.t_hold:
            return replace(state, phase=Phase.SWEEP, hold_timer=hold,
                           sweep_time=reading.t, sweep_y0=state.y_est)
        return replace(state, hold_timer=hold)
    return state


def latch_estimate(state: ControllerState, y_est: float, t: float) -> ControllerState:
    """Record the trajectory-rate position estimate for use at force rate."""
    return replace(state, y_est=y_est, t_est=t)


def controller_tick(
    state: ControllerState,
    reading: SensorReading,
    spec: AdmittanceSpec,
    setpoint: ControlSetpoint,
    stiffness: StiffnessModel,
    q: JointState,
    robot: RobotParams,
    protocol: ContactProtocol,
    dt: float,
    gain_hold: bool = False,
    lowpass_alpha: float | None = None,
) -> tuple[ControllerState, JointVelocity]:
    """One force-loop tick: filter, phase machine, velocity laws, joint map."""
    f_n = reading.f_n
    if lowpass_alpha is not None:
        prev = f_n if state.f_filt is None else state.f_filt
        f_n = prev + lowpass_alpha * (reading.f_n - prev)
        state = replace(state, f_filt=f_n)
        reading = SensorReading(f_n, reading.f_t, reading.t)

    state = phase_update(state, reading, setpoint, protocol, dt)

    # scheduled gains from the commanded configuration, every tick
    k_eq = equivalent_stiffness(stiffness, q)
    gains = schedule_gains(spec, k_eq)
    if gain_hold:
        if state.phase is not Phase.APPROACH and state.held_gains is None:
            state = replace(state, held_gains=gains)
        if state.held_gains is not None:
            gains = state.held_gains

    if state.phase is Phase.APPROACH:
        v_n, v_t = -protocol.v_approach, 0.0
    elif state.phase is Phase.STABILIZE:
        v_n = admittance_step(gains, state.v_n, f_n, setpoint.f_des, dt)
        v_t = 0.0
    else:
        v_n = admittance_step(gains, state.v_n, f_n, setpoint.f_des, dt)
        v_t = tangential_velocity(setpoint, state.y_est, state.t_est,
                                  t0=state.sweep_time, y0=state.sweep_y0)

    state = replace(state, v_n=v_n, v_t=v_t,
                    k_eq=k_eq, k_f=gains.k_f, b=gains.b)
    # task velocity: v_n along the outward normal (-x), v_t along +y
    qdot, _saturated = resolved_rate(q, (-v_n, v_t), robot)
    return state, qdot


class AdmittanceController:
    """Callback bundle binding the control stack to the plant timeline."""

    def __init__(self, spec: AdmittanceSpec, setpoint: ControlSetpoint,
                 stiffness: StiffnessModel, robot: RobotParams,
                 protocol: ContactProtocol | None = None,
                 dt_force: float = 2e-3,
                 gain_hold: bool = False,
                 lowpass_cutoff: float | None = None):
        self.spec = spec
        self.setpoint = setpoint
        self.stiffness = stiffness
        self.robot = robot
        self.protocol = protocol or ContactProtocol()
        self.dt_force = dt_force
        self.gain_hold = gain_hold
        if lowpass_cutoff is not None:
            tau = 1.0 / (2.0 * math.pi * lowpass_cutoff)
            self.lowpass_alpha = dt_force / (tau + dt_force)
        else:
            self.lowpass_alpha = None
        self.state = ControllerState()

    def on_trajectory(self, est_xy, t):
        self.state = latch_estimate(self.state, est_xy[1], t)

    def on_force(self, reading, q):
        self.state, qdot = controller_tick(
            self.state, reading, self.spec, self.setpoint, self.stiffness,
            q, self.robot, self.protocol, self.dt_force,
            gain_hold=self.gain_hold, lowpass_alpha=self.lowpass_alpha)
        return qdot

    def sample(self):
        s = self.state
        return dict(phase=s.phase.value, v_n_cmd=s.v_n, v_t_cmd=s.v_t,
                    k_eq=s.k_eq, k_f=s.k_f, b=s.b)
