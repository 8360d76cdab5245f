"""Self-contained end-to-end checks, runnable via `boomsim verify`.

Each check is a fast variant of the corresponding invariant: kinematics
against finite differences, the static stiffness probe, setpoint
equilibrium across stiffnesses, the scheduled-dynamics fit, trace
determinism, and the simulation-vs-matrix stability cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from . import compliance, control, harness, model, plant
from .config import config_from_dict, default_config_dict
from .errors import BoomsimError


def _scenario_overrides(**kw):
    data = default_config_dict()
    data["toggles"]["noise"] = False
    data["toggles"]["stiction"] = False
    for path, value in kw.items():
        node = data
        keys = path.split("__")
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
    return config_from_dict(data)


def _regulation_config(k_eq, eta=1.0, duration=6.0, **kw):
    """Flat-wall regulation scenario with k_eq = k_theta exactly (y0 = 1)."""
    return _scenario_overrides(
        robot__k_theta=k_eq,
        stiffness__k_ee="inf",
        world__wall_x=0.009,
        q0__theta1=math.pi / 2,
        q0__d2=1.0,
        setpoint__v_sweep=0.0,
        admittance__eta=eta,
        duration=duration,
        **kw,
    )


def check_jacobian_fd():
    rng = np.random.default_rng(1)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        q = model.JointState(rng.uniform(0.3, 2.8), rng.uniform(0.3, 1.0))
        J = model.jacobian(q)
        for j, (dth, dd2) in enumerate(((h, 0.0), (0.0, h))):
            hi = model.forward_kinematics(model.JointState(q.theta1 + dth, q.d2 + dd2))
            lo = model.forward_kinematics(model.JointState(q.theta1 - dth, q.d2 - dd2))
            col = np.array([(hi.x - lo.x), (hi.y - lo.y)]) / (2 * h)
            worst = max(worst, float(np.max(np.abs(col - J[:, j]) / np.maximum(np.abs(J[:, j]), 1e-3))))
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det + q.d2) > 1e-12:
            return False, f"det(J) != -d2 at {q}"
    return worst < 1e-6, f"max relative FD error {worst:.2e}"


def check_stiffness_probe():
    rng = np.random.default_rng(2)
    robot = model.RobotParams(d2_min=0.05, d2_max=5.0, theta1_min=0.01,
                              theta1_max=math.pi - 0.01)
    worst = 0.0
    for _ in range(10):
        q = model.JointState(rng.uniform(0.3, 2.8), rng.uniform(0.3, 1.0))
        k_theta = rng.uniform(10.0, 200.0)
        k_ee = rng.choice([500.0, 5000.0, math.inf])
        stiff = compliance.StiffnessModel(k_theta=k_theta, k_ee=float(k_ee))
        tip = model.forward_kinematics(q)
        world = plant.WorldModel(wall_x=tip.x, noise_sigma=0.0, mu_s=0.0,
                                 mu_k=0.0, stiction_coupling=0.0)
        state = plant.PlantState(q_nominal=q)
        dt = 5e-4
        for _ in range(100):
            qdot, _ = model.resolved_rate(state.q_nominal, (0.02, 0.0),
                                          model.RobotParams(dls_lambda=0.0,
                                                            d2_min=0.05, d2_max=5.0,
                                                            theta1_min=0.01,
                                                            theta1_max=math.pi - 0.01))
            state, reading = plant.plant_step(state, qdot, world, stiff, robot, dt)
        qn = state.q_nominal
        pen = world.wall_x - qn.d2 * math.cos(qn.theta1)
        k_probe = reading.f_n / pen
        k_x = k_theta / (qn.d2 ** 2 * math.sin(qn.theta1) ** 2)
        k_expect = k_x if math.isinf(k_ee) else 1.0 / (1.0 / k_x + 1.0 / k_ee)
        worst = max(worst, abs(k_probe - k_expect) / k_expect)
    return worst < 0.01, f"max probe mismatch {worst * 100:.3f}%"


def check_equilibrium():
    worst = 0.0
    for k_eq in (10.0, 100.0, 5000.0):
        cfg = _regulation_config(k_eq)
        trace, summary = harness.run_scenario(cfg)
        if summary.diverged:
            return False, f"diverged at k_eq={k_eq}"
        err = abs(trace[-1].f_n - cfg.setpoint.f_des)
        worst = max(worst, err)
    return worst < 1e-3, f"max steady-state error {worst:.2e} N"


def check_scheduled_dynamics():
    for k_eq in (20.0, 500.0):
        cfg = _regulation_config(k_eq)
        trace, summary = harness.run_scenario(cfg)
        t_c = summary.phase_boundaries[0]
        if t_c is None:
            return False, f"no contact at k_eq={k_eq}"
        fit = harness.fit_second_order(trace, (t_c, t_c + 2.0))
        if abs(fit.omega_n - 10.0) > 1.0 or abs(fit.eta - 1.0) > 0.15:
            return False, (f"k_eq={k_eq}: fitted (wn={fit.omega_n:.2f}, "
                           f"eta={fit.eta:.2f}) off spec (10, 1)")
    return True, "fitted dynamics within 10%/15% of spec"


def check_determinism():
    cfg = _scenario_overrides(duration=2.0)
    a, _ = harness.run_scenario(cfg)
    b, _ = harness.run_scenario(cfg)
    same = a.to_csv() == b.to_csv()
    return same, "byte-identical traces" if same else "traces differ"


def check_stability_cross():
    spec = control.AdmittanceSpec()
    bound = harness.stability_bound(spec, 50.0, scan=(1e-3, 0.4, 400)).max_stable_dt
    if bound <= 0.002:
        return False, f"bound {bound:.4f}s does not clear the 500 Hz loop period"
    dt_lo = round(0.5 * bound / 5e-4) * 5e-4
    lo = _regulation_config(50.0, duration=6.0,
                            timing__dt_force=dt_lo, timing__dt_traj=2 * dt_lo)
    trace_lo, s_lo = harness.run_scenario(lo)
    err_lo = abs(trace_lo[-1].f_n - lo.setpoint.f_des)
    dt_hi = round(1.5 * bound / 5e-4) * 5e-4
    hi = _regulation_config(50.0, duration=6.0,
                            timing__dt_force=dt_hi, timing__dt_traj=2 * dt_hi)
    _, s_hi = harness.run_scenario(hi)
    ok = (not s_lo.diverged) and err_lo < 1e-3 and s_hi.diverged
    return ok, (f"bound={bound:.3f}s, 0.5x err={err_lo:.1e}, "
                f"1.5x {'diverged' if s_hi.diverged else 'CONVERGED'}")


CHECKS = (
    ("jacobian_fd", check_jacobian_fd),
    ("stiffness_probe", check_stiffness_probe),
    ("equilibrium", check_equilibrium),
    ("scheduled_dynamics", check_scheduled_dynamics),
    ("determinism", check_determinism),
    ("stability_cross_check", check_stability_cross),
)


def run_checks(names=None, printer=print) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        if names and name not in names:
            continue
        try:
            ok, detail = fn()
        except BoomsimError as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        printer(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
