"""Scenario configuration: JSON schema, validation, and dotted overrides.

The JSON document mirrors ScenarioConfig section by section. Unknown keys
are rejected with the full key path. k_ee accepts the string "inf" (or a
JSON Infinity) for a rigid contact. The torsional stiffness lives once, in
robot.k_theta; the stiffness model is assembled from it.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources

from .compliance import StiffnessModel
from .control import AdmittanceSpec, ContactProtocol, ControlSetpoint
from .errors import ConfigError
from .model import JointState, RobotParams
from .plant import LoopTiming, WorldModel


@dataclass(frozen=True)
class Toggles:
    noise: bool = True
    stiction: bool = True
    gain_hold: bool = False
    lowpass_cutoff: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    robot: RobotParams
    stiffness: StiffnessModel
    world: WorldModel
    admittance: AdmittanceSpec
    setpoint: ControlSetpoint
    protocol: ContactProtocol
    timing: LoopTiming
    q0: JointState
    duration: float
    toggles: Toggles

    def __post_init__(self):
        if self.duration <= 0:
            raise ConfigError("duration must be > 0")
        if not (self.robot.d2_min <= self.q0.d2 <= self.robot.d2_max):
            raise ConfigError("q0.d2 outside [d2_min, d2_max]")
        if not (self.robot.theta1_min <= self.q0.theta1 <= self.robot.theta1_max):
            raise ConfigError("q0.theta1 outside [theta1_min, theta1_max]")


_SECTIONS = {
    "robot": RobotParams,
    "world": WorldModel,
    "admittance": AdmittanceSpec,
    "setpoint": ControlSetpoint,
    "protocol": ContactProtocol,
    "timing": LoopTiming,
    "toggles": Toggles,
}
_SCALARS = ("duration",)


def default_config_dict() -> dict:
    """The bundled desk-scale contact trial, as a plain dict."""
    path = resources.files("boomsim").joinpath("configs/paper_replica.json")
    return json.loads(path.read_text())


def replica_config() -> "ScenarioConfig":
    return config_from_dict(default_config_dict())


def _coerce(section: str, key: str, value, typ):
    if key == "k_ee" and isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"{section}.{key}: expected a number or 'inf', got {value!r}")
    if key == "y_traj":
        if value is None:
            return None
        try:
            pts = tuple((float(t), float(y)) for t, y in value)
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{key}: expected a list of [t, dy] pairs")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ConfigError(f"{section}.{key}: breakpoint times must increase")
        return pts
    if key == "lowpass_cutoff" and value is None:
        return None
    if typ is bool or isinstance(value, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{section}.{key}: expected a boolean, got {value!r}")
        return value
    if isinstance(value, (int, float)):
        return int(value) if key in ("n_consecutive", "seed") else float(value)
    raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")


def _build_section(name: str, cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name: f for f in dataclasses.fields(cls)}
    if name == "world" and "wall_x" not in data:
        raise ConfigError("world.wall_x is required")
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown key {name}.{key}")
        kwargs[key] = _coerce(name, key, value, known[key].type)
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = set(_SECTIONS) | set(_SCALARS) | {"q0", "stiffness"}
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key}")

    sections = {}
    for name, cls in _SECTIONS.items():
        sections[name] = _build_section(name, cls, data.get(name, {}))

    q0_data = data.get("q0")
    if not isinstance(q0_data, dict) or set(q0_data) != {"theta1", "d2"}:
        raise ConfigError("q0 must be an object with exactly theta1 and d2")
    q0 = JointState(float(q0_data["theta1"]), float(q0_data["d2"]))

    stiff_data = dict(data.get("stiffness", {}))
    for key in stiff_data:
        if key not in ("k_ee", "sin_eps"):
            raise ConfigError(f"unknown key stiffness.{key}")
    stiffness = StiffnessModel(
        k_theta=sections["robot"].k_theta,
        k_ee=_coerce("stiffness", "k_ee", stiff_data.get("k_ee", math.inf), float),
        sin_eps=float(stiff_data.get("sin_eps", 1e-3)),
    )

    if "duration" not in data:
        raise ConfigError("duration is required")

    return ScenarioConfig(
        robot=sections["robot"],
        stiffness=stiffness,
        world=sections["world"],
        admittance=sections["admittance"],
        setpoint=sections["setpoint"],
        protocol=sections["protocol"],
        timing=sections["timing"],
        q0=q0,
        duration=float(data["duration"]),
        toggles=sections["toggles"],
    )


def load_config(path, overrides=()) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    data = apply_overrides(data, overrides)
    return config_from_dict(data)


def apply_overrides(data: dict, overrides) -> dict:
    """Apply key=value overrides addressed by dotted paths, pre-validation."""
    data = json.loads(json.dumps(data))  # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        path, raw = item.split("=", 1)
        keys = path.split(".")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {path}: {key} is not a section")
        node[keys[-1]] = value
    return data


def config_to_dict(cfg: ScenarioConfig) -> dict:
    out = {}
    for name in _SECTIONS:
        out[name] = dataclasses.asdict(getattr(cfg, name))
    out["stiffness"] = {"k_ee": cfg.stiffness.k_ee if math.isfinite(cfg.stiffness.k_ee) else "inf",
                        "sin_eps": cfg.stiffness.sin_eps}
    out["q0"] = {"theta1": cfg.q0.theta1, "d2": cfg.q0.d2}
    out["duration"] = cfg.duration
    if out["setpoint"]["y_traj"] is not None:
        out["setpoint"]["y_traj"] = [list(p) for p in out["setpoint"]["y_traj"]]
    return out
