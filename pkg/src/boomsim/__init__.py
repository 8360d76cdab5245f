"""Gain-scheduled velocity-admittance contact control for a long-reach
extensible-boom arm, with a deterministic quasi-static simulator."""

from .compliance import StiffnessModel, equivalent_stiffness, series_stiffness, task_normal_stiffness
from .config import ScenarioConfig, Toggles, config_from_dict, load_config, replica_config
from .control import (
    AdmittanceController,
    AdmittanceGains,
    AdmittanceSpec,
    ContactProtocol,
    ControlSetpoint,
    ControllerState,
    Phase,
    admittance_step,
    controller_tick,
    detect_contact,
    phase_update,
    schedule_gains,
    tangential_velocity,
)
from .harness import (
    FitResult,
    RunSummary,
    StabilityResult,
    fit_second_order,
    rms_force_error,
    run_scenario,
    stability_bound,
)
from .model import (
    EndpointState,
    JointState,
    JointVelocity,
    RobotParams,
    dls_inverse,
    forward_kinematics,
    jacobian,
    resolved_rate,
)
from .plant import (
    LoopTiming,
    PlantState,
    SensorReading,
    WorldModel,
    contact_force,
    plant_step,
    run_timeline,
)
from .trace import Trace, TraceSample

__version__ = "0.1.0"
