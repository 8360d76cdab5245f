"""Scenario execution, run metrics, transient identification, and the
discrete stability scan."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares

from .config import ScenarioConfig
from .control import AdmittanceController, AdmittanceSpec, schedule_gains
from .errors import EmptyWindow, FitFailed, TimelineError
from .plant import run_timeline
from .trace import Trace, q9

DIVERGENCE_FORCE_FACTOR = 10.0   # |f_n| beyond this multiple of |f_des| aborts
LIMIT_PIN_SECONDS = 1.0          # continuous joint-limit clamping that aborts


@dataclass(frozen=True)
class RunSummary:
    rms_force_error_after_contact: float | None
    max_overshoot: float
    settle_time: float | None
    sweep_force_rms: float | None
    d2_range: tuple[float, float]
    phase_boundaries: tuple[float | None, float | None]
    diverged: bool
    insufficient_contact_window: bool
    f_des: float
    seed: int

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["d2_range"] = list(self.d2_range)
        d["phase_boundaries"] = list(self.phase_boundaries)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _effective_world(cfg: ScenarioConfig):
    world = cfg.world
    if not cfg.toggles.noise:
        world = replace(world, noise_sigma=0.0)
    if not cfg.toggles.stiction:
        world = replace(world, mu_s=0.0, mu_k=0.0, stiction_coupling=0.0)
    return world


def run_scenario(cfg: ScenarioConfig) -> tuple[Trace, RunSummary]:
    """Run the full approach/stabilize/sweep trial and summarize it.

    Deterministic for a fixed config and seed. A controller failure or a
    tripped divergence guard is reported through RunSummary.diverged; the
    (possibly partial) trace is always returned for post-mortem.
    """
    world = _effective_world(cfg)
    controller = AdmittanceController(
        cfg.admittance, cfg.setpoint, cfg.stiffness, cfg.robot,
        protocol=cfg.protocol, dt_force=cfg.timing.dt_force,
        gain_hold=cfg.toggles.gain_hold,
        lowpass_cutoff=cfg.toggles.lowpass_cutoff,
    )

    force_cap = DIVERGENCE_FORCE_FACTOR * abs(cfg.setpoint.f_des)
    pin = {"t": 0.0}
    tripped = {"hit": False}

    def guard(state, reading):
        pin["t"] = pin["t"] + cfg.timing.dt_plant if state.limit_hit else 0.0
        if abs(reading.f_n) > force_cap or pin["t"] > LIMIT_PIN_SECONDS:
            tripped["hit"] = True
            return True
        return False

    diverged = False
    try:
        trace = run_timeline(cfg.duration, cfg.timing, controller, world,
                             cfg.stiffness, cfg.robot, cfg.q0, stop=guard)
    except TimelineError as exc:
        trace = exc.trace if exc.trace is not None else Trace()
        diverged = True
    diverged = diverged or tripped["hit"]

    return trace, summarize(trace, cfg, diverged)


def summarize(trace: Trace, cfg: ScenarioConfig, diverged: bool) -> RunSummary:
    f_des = cfg.setpoint.f_des
    t_contact = _first_phase_time(trace, "stabilize")
    t_sweep = _first_phase_time(trace, "sweep")
    insufficient = t_contact is None

    if len(trace):
        d2 = trace.column("d2")
        d2_range = (float(d2.min()), float(d2.max()))
    else:
        d2_range = (cfg.q0.d2, cfg.q0.d2)

    rms = None
    overshoot = 0.0
    sweep_rms = None
    if t_contact is not None:
        rms = rms_force_error(trace, f_des, t_contact)
        t = trace.column("t")
        f_n = trace.column("f_n")
        mask = t >= t_contact
        overshoot = float(max(0.0, np.max(f_des - f_n[mask])))
        if t_sweep is not None and np.any(t >= t_sweep):
            sweep_rms = rms_force_error(trace, f_des, t_sweep)

    settle = None
    if t_contact is not None and t_sweep is not None:
        settle = q9(t_sweep - t_contact)

    return RunSummary(
        rms_force_error_after_contact=rms,
        max_overshoot=overshoot,
        settle_time=settle,
        sweep_force_rms=sweep_rms,
        d2_range=d2_range,
        phase_boundaries=(t_contact, t_sweep),
        diverged=diverged,
        insufficient_contact_window=insufficient,
        f_des=f_des,
        seed=cfg.world.seed,
    )


def _first_phase_time(trace: Trace, token: str) -> float | None:
    for s in trace:
        if s.phase == token:
            return s.t
    return None


def rms_force_error(trace: Trace, f_des: float,
                    from_t: float | None = None) -> float:
    """sqrt(mean((f_n - f_des)^2)) over samples with t >= from_t.

    from_t defaults to the first contact time (the first stabilize row).
    """
    if len(trace) == 0:
        raise EmptyWindow("empty trace")
    if from_t is None:
        from_t = _first_phase_time(trace, "stabilize")
        if from_t is None:
            raise EmptyWindow("trace never reaches contact")
    t = trace.column("t")
    mask = t >= from_t
    if not np.any(mask):
        raise EmptyWindow(f"no samples at t >= {from_t}")
    err = trace.column("f_n")[mask] - f_des
    return float(np.sqrt(np.mean(err * err)))


# ---------------------------------------------------------------------------
# second-order transient identification

@dataclass(frozen=True)
class FitResult:
    omega_n: float
    eta: float
    quality: str  # "good" | "poor"


def _second_order_error(t, omega_n, eta, e0, edot0):
    """Free response of e'' + 2 eta wn e' + wn^2 e = 0 with e(0)=e0, e'(0)=edot0."""
    t = np.asarray(t, dtype=float)
    a = eta * omega_n
    disc = 1.0 - eta * eta
    wd = omega_n * math.sqrt(abs(disc))
    if wd * np.max(t, initial=0.0) < 1e-6:
        # critical limit: (e0 + (edot0 + a e0) t) exp(-a t)
        return (e0 + (edot0 + a * e0) * t) * np.exp(-a * t)
    if disc > 0:
        c, s = np.cos(wd * t), np.sin(wd * t) / wd
    else:
        c, s = np.cosh(wd * t), np.sinh(wd * t) / wd
    return np.exp(-a * t) * (e0 * c + (edot0 + a * e0) * s)


def fit_second_order(trace: Trace, window: tuple[float, float]) -> FitResult:
    """Identify (omega_n, eta) from the force transient inside the window.

    The settled force (mean of the window's last tenth) defines the error
    signal. Initial estimates come from the first-overshoot ratio when the
    response rings, or from the 10-90% rise time when it does not; a
    least-squares pass over the analytic free response (with free initial
    conditions) refines them. Raises FitFailed when there is no usable
    transient.
    """
    t_all = trace.column("t")
    mask = (t_all >= window[0]) & (t_all <= window[1])
    t = t_all[mask]
    f = trace.column("f_n")[mask]
    if t.size < 20:
        raise FitFailed(f"window contains only {t.size} samples")

    tail = f[-max(2, t.size // 10):]
    f_final = float(np.mean(tail))
    e = f - f_final
    e0 = e[0]
    noise = float(np.std(tail))
    if abs(e0) < max(5e-3, 4.0 * noise):
        raise FitFailed("no transient: initial error indistinguishable from tail")

    t = t - t[0]
    r = 1.0 - e / e0  # normalized step-like response, 0 -> 1

    overshoot = float(np.max(r)) - 1.0
    if overshoot > 0.02:
        ln = math.log(1.0 / overshoot)
        eta0 = ln / math.sqrt(math.pi ** 2 + ln ** 2)
        t_peak = t[int(np.argmax(r))]
        wd = math.pi / t_peak if t_peak > 0 else 1.0
        wn0 = wd / math.sqrt(1.0 - eta0 ** 2)
    else:
        eta0 = 1.0
        t10 = _first_crossing(t, r, 0.1)
        t90 = _first_crossing(t, r, 0.9)
        if t10 is None or t90 is None or t90 <= t10:
            raise FitFailed("transient too short: no 10-90% rise inside window")
        wn0 = 3.3579 / (t90 - t10)  # normalized 10-90 rise time at eta = 1

    edot0 = (e[1] - e[0]) / (t[1] - t[0]) if t.size > 1 else 0.0

    def resid(p):
        return _second_order_error(t, p[0], p[1], p[2], p[3]) - e

    sol = least_squares(resid, x0=[wn0, eta0, e0, edot0],
                        bounds=([1e-2, 0.02, -np.inf, -np.inf],
                                [1e4, 10.0, np.inf, np.inf]))
    rel = float(np.linalg.norm(sol.fun) / np.linalg.norm(e))
    if rel > 0.5:
        raise FitFailed(f"model residual {rel:.2f} of signal: not second order")
    return FitResult(float(sol.x[0]), float(sol.x[1]),
                     "good" if rel < 0.05 else "poor")


def _first_crossing(t, r, level):
    idx = np.nonzero(r >= level)[0]
    if idx.size == 0:
        return None
    i = idx[0]
    if i == 0:
        return float(t[0])
    # linear interpolation between the bracketing samples
    frac = (level - r[i - 1]) / (r[i] - r[i - 1])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


# ---------------------------------------------------------------------------
# discrete-loop stability

@dataclass(frozen=True)
class StabilityResult:
    max_stable_dt: float
    all_unstable: bool


def loop_matrix(spec: AdmittanceSpec, k_eq: float, dt: float) -> np.ndarray:
    """Linearized in-contact update for the state [v_n, p]."""
    g = schedule_gains(spec, k_eq)
    return np.array([
        [1.0 - dt * g.b / g.mass, -dt * g.k_f * k_eq / g.mass],
        [dt, 1.0],
    ])


def is_stable_dt(spec: AdmittanceSpec, k_eq: float, dt: float) -> bool:
    """Stability of the force loop at period dt.

    Two conditions: the in-contact 2x2 update matrix must have spectral
    radius < 1, and the off-contact velocity decay term 1 - dt*B/M must lie
    in (-1, 1) (contact is unilateral, so the free-flight mode matters too).
    """
    g = schedule_gains(spec, k_eq)
    if dt * g.b / g.mass >= 2.0:
        return False
    eig = np.linalg.eigvals(loop_matrix(spec, k_eq, dt))
    return bool(np.max(np.abs(eig)) < 1.0)


def stability_bound(spec: AdmittanceSpec, k_eq: float,
                    scan=(1e-4, 0.5, 400)) -> StabilityResult:
    """Largest stable force-loop period over a dt scan grid."""
    lo, hi, n = scan
    if not (0 < lo < hi):
        raise ValueError("scan range must satisfy 0 < lo < hi")
    dts = np.linspace(lo, hi, int(n))
    best = None
    for dt in dts:
        if is_stable_dt(spec, k_eq, float(dt)):
            best = float(dt)
    if best is None:
        return StabilityResult(float(lo), True)
    return StabilityResult(best, False)
