"""Bi-quadcopter flight stack: dynamics, control, allocation, simulation.

The vehicle has two tilting rotors on a transverse arm above the body and two
fixed coaxial-style rotors below; the tilting pair buys pitch authority at
the cost of a small lateral force, and the bottom pair is redundant, so the
vehicle stays controllable when one or both bottom rotors fail.
"""
from .actuation import (ActuatorCommand, ForceDecomposition, SaturationReport,
                        decompose, forward_wrench, recompose)
from .allocation import (AllocationMatrix, FailureMode, RankDeficiencyError,
                         ReducedWrench, allocate, allocate_decomposition,
                         build_allocation, closed_form_pinv, min_norm_check)
from .attitude_control import (AttitudeError, RateLoopState, attitude_error,
                               initial_rate_state, inner_loop, outer_loop)
from .harness import (CSV_COLUMNS, ScenarioConfig, SimLogRecord, SimResult,
                      StepDiagnostics, SummaryStats, format_summary,
                      quat_to_euler_zyx, run_scenario, summarize, write_csv)
from .params import (ControllerGains, ParamError, VehicleParams,
                     default_params, load_params, serialize_params, validate)
from .position_control import (DegenerateAttitudeError, DesiredAttitude,
                               ReferenceSignal, circle_reference,
                               desired_attitude, hover_reference,
                               position_law, project_fz)
from .rigid_body import (RigidBodyState, StateDerivative, Wrench,
                         quat_conjugate, quat_from_rotmat, quat_multiply,
                         quat_normalize, quat_to_rotmat, rk4_step,
                         state_derivative)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "1.0.0"
