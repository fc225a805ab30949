"""Closed-loop simulation harness: scenarios, logging, and CSV output.

One control cycle runs, in order: sample the reference, position PD law,
desired attitude (holding the previous one if the force direction is
degenerate), attitude error, rate command, torque law, thrust projection
onto the current body z, allocation under the active failure mode, then the
resulting wrench is held constant while the physics integrates one or more
substeps. The state is logged once per control cycle, before stepping.

CSV files written here have a fixed column order (CSV_COLUMNS) with angles in
radians and one row per control cycle; floats are written with full
round-trip precision so a re-run produces byte-identical output.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .actuation import forward_wrench
from .allocation import FailureMode, ReducedWrench, allocate
from .attitude_control import attitude_error, initial_rate_state, inner_loop, outer_loop
from .params import ControllerGains, VehicleParams, default_params
from .position_control import (DegenerateAttitudeError, DesiredAttitude,
                               ReferenceSignal, circle_reference,
                               desired_attitude, hover_reference, position_law,
                               project_fz)
from .rigid_body import RigidBodyState, Wrench, quat_to_rotmat, rk4_step, state_derivative

_GIMBAL_MARGIN = 1e-6

CSV_COLUMNS = (
    "t",
    "px", "py", "pz",
    "pdx", "pdy", "pdz",
    "vx", "vy", "vz",
    "qw", "qx", "qy", "qz",
    "roll", "pitch", "yaw",
    "wx", "wy", "wz",
    "f1", "f2", "f3", "f4",
    "beta1", "beta2",
    "Fz_cmd",
    "taux_cmd", "tauy_cmd", "tauz_cmd",
    "sat_thrust", "sat_tilt",
)

_IDENTITY_ATTITUDE = DesiredAttitude(
    q_c=(1.0, 0.0, 0.0, 0.0),
    R_c=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))


def quat_to_euler_zyx(q) -> tuple[np.ndarray, bool]:
    """ZYX (yaw-pitch-roll) angles plus a near-gimbal-lock flag.

    The flag trips when |pitch| is within about a microradian of 90 degrees,
    where roll and yaw become numerically indistinguishable; the angles are
    still returned, the caller decides whether to trust them.
    """
    R = quat_to_rotmat(q)
    roll = np.arctan2(R[2, 1], R[2, 2])
    pitch = np.arcsin(np.clip(-R[2, 0], -1.0, 1.0))
    yaw = np.arctan2(R[1, 0], R[0, 0])
    near_gimbal = bool(abs(pitch) > np.pi / 2.0 - _GIMBAL_MARGIN)
    return np.array([roll, pitch, yaw]), near_gimbal


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one closed-loop run."""

    trajectory: str = "hover"  # "hover" | "circle" | "file"
    hover_point: tuple[float, float, float] = (0.0, 0.0, 4.0)
    hover_psi: float = 0.0
    trajectory_path: str | None = None
    duration: float = 40.0
    physics_dt: float = 1e-3
    control_dt: float | None = None  # defaults to physics_dt
    failure: FailureMode = field(default_factory=FailureMode.nominal)
    failure_time: float | None = None  # non-nominal failure with None starts failed
    initial_state: RigidBodyState | None = None  # None: origin, at rest, level
    output: str | None = None

    def __post_init__(self):
        if self.trajectory not in ("hover", "circle", "file"):
            raise ValueError(f"unknown trajectory kind {self.trajectory!r}")
        if self.trajectory == "file" and not self.trajectory_path:
            raise ValueError("file trajectory needs trajectory_path")
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        if self.physics_dt <= 0:
            raise ValueError(f"physics_dt must be positive, got {self.physics_dt}")
        if self.control_dt is not None:
            ratio = self.control_dt / self.physics_dt
            if self.control_dt <= 0 or abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError(
                    f"control_dt ({self.control_dt}) must be a positive integer "
                    f"multiple of physics_dt ({self.physics_dt})")
        if self.failure_time is not None and self.failure.tag == "nominal":
            raise ValueError("failure_time given without a failure mode")

    @property
    def effective_control_dt(self) -> float:
        return self.physics_dt if self.control_dt is None else self.control_dt

    @property
    def substeps(self) -> int:
        return int(round(self.effective_control_dt / self.physics_dt))


@dataclass(frozen=True)
class SimLogRecord:
    """One control cycle: state at the cycle start plus the commands issued."""

    t: float
    p: tuple[float, float, float]
    p_d: tuple[float, float, float]
    v: tuple[float, float, float]
    q: tuple[float, float, float, float]
    euler: tuple[float, float, float]
    w: tuple[float, float, float]
    f1: float
    f2: float
    f3: float
    f4: float
    beta1: float
    beta2: float
    Fz_cmd: float
    tau_cmd: tuple[float, float, float]
    sat_thrust: bool
    sat_tilt: bool


@dataclass(frozen=True)
class StepDiagnostics:
    """Control-loop internals kept out of the CSV: rate error, its derivative
    estimate, and the angular acceleration the applied wrench produced."""

    t: float
    omega_e: tuple[float, float, float]
    deriv_estimate: tuple[float, float, float]
    wdot: tuple[float, float, float]
    saturated: bool
    degenerate: bool


@dataclass
class SimResult:
    records: list[SimLogRecord]
    diagnostics: list[StepDiagnostics]
    final_state: RigidBodyState
    config: ScenarioConfig


def _load_trajectory_file(path: str):
    """Rows of t, position (3), velocity (3), acceleration (3), yaw."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            try:
                values = [float(x) for x in parts]
            except ValueError:
                if not rows and lineno == 1:
                    continue  # header line
                raise ValueError(f"{path}:{lineno}: not numeric: {line.strip()!r}")
            if len(values) != 11:
                raise ValueError(
                    f"{path}:{lineno}: expected 11 columns "
                    f"(t, p[3], v[3], a[3], psi), got {len(values)}")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no trajectory rows")
    data = np.array(rows)
    t = data[:, 0]
    if len(t) > 1 and np.any(np.diff(t) <= 0):
        raise ValueError(f"{path}: time column must be strictly increasing")
    return t, data[:, 1:]


def make_sampler(config: ScenarioConfig):
    """Reference sampler t -> ReferenceSignal for a scenario's trajectory."""
    if config.trajectory == "hover":
        ref = hover_reference(config.hover_point, config.hover_psi)
        return lambda t: ref
    if config.trajectory == "circle":
        return circle_reference
    t_knots, values = _load_trajectory_file(config.trajectory_path)

    def sample(t: float) -> ReferenceSignal:
        row = [float(np.interp(t, t_knots, values[:, j])) for j in range(10)]
        return ReferenceSignal(p_d=tuple(row[0:3]), v_d=tuple(row[3:6]),
                               a_d=tuple(row[6:9]), psi=row[9])

    return sample


def run_scenario(config: ScenarioConfig,
                 params: VehicleParams | None = None,
                 gains: ControllerGains | None = None,
                 smoothing: float = 0.5) -> SimResult:
    """Run one closed-loop scenario and return its log.

    A non-nominal failure switches the allocation mode (and pins the failed
    rotors to zero thrust) from the first control cycle at or after
    failure_time; with failure_time None the run starts already failed.
    """
    if params is None or gains is None:
        dp, dg = default_params()
        params = dp if params is None else params
        gains = dg if gains is None else gains

    sampler = make_sampler(config)
    control_dt = config.effective_control_dt
    n_steps = int(np.floor(config.duration / control_dt + 1e-9))

    state = config.initial_state if config.initial_state is not None \
        else RigidBodyState.at_rest()
    state = RigidBodyState(p=np.asarray(state.p, dtype=float).copy(),
                           v=np.asarray(state.v, dtype=float).copy(),
                           q=np.asarray(state.q, dtype=float).copy(),
                           w=np.asarray(state.w, dtype=float).copy())

    nominal = FailureMode.nominal()
    start_failed = config.failure.tag != "nominal" and config.failure_time is None
    active_mode = config.failure if start_failed else nominal

    rls = initial_rate_state()
    last_desired = _IDENTITY_ATTITUDE
    records: list[SimLogRecord] = []
    diagnostics: list[StepDiagnostics] = []

    for k in range(n_steps):
        t = k * control_dt
        if (active_mode.tag == "nominal" and config.failure_time is not None
                and t >= config.failure_time - 1e-9):
            active_mode = config.failure

        ref = sampler(t)
        F_des = position_law(state.p, state.v, ref, params, gains)
        degenerate = False
        try:
            last_desired = desired_attitude(F_des, ref.psi)
        except DegenerateAttitudeError:
            degenerate = True
        err = attitude_error(state.q, np.asarray(last_desired.q_c))
        omega_d = outer_loop(err, gains)
        tau_d, rls = inner_loop(state.w, omega_d, rls, control_dt,
                                params, gains, smoothing=smoothing)
        Fx_body = float(tau_d[1]) / params.b1
        R = quat_to_rotmat(state.q)
        Fz_d = project_fz(F_des, R, Fx_body)

        wrench_cmd = ReducedWrench(Fz=Fz_d, tau=tuple(float(x) for x in tau_d))
        command, report = allocate(wrench_cmd, params, active_mode)
        applied = forward_wrench(command, params)

        euler, _ = quat_to_euler_zyx(state.q)
        records.append(SimLogRecord(
            t=t,
            p=tuple(float(x) for x in state.p),
            p_d=ref.p_d,
            v=tuple(float(x) for x in state.v),
            q=tuple(float(x) for x in state.q),
            euler=tuple(float(x) for x in euler),
            w=tuple(float(x) for x in state.w),
            f1=command.f1, f2=command.f2, f3=command.f3, f4=command.f4,
            beta1=command.beta1, beta2=command.beta2,
            Fz_cmd=Fz_d,
            tau_cmd=tuple(float(x) for x in tau_d),
            sat_thrust=bool(report.clamped_thrusts),
            sat_tilt=bool(report.tilt_exceeded)))
        diagnostics.append(StepDiagnostics(
            t=t,
            omega_e=rls.prev_omega_e,
            deriv_estimate=rls.prev_derivative,
            wdot=tuple(float(x) for x in
                       state_derivative(state, applied, params).dw),
            saturated=report.saturated,
            degenerate=degenerate))

        for _ in range(config.substeps):
            state = rk4_step(state, applied, config.physics_dt, params)

    result = SimResult(records=records, diagnostics=diagnostics,
                       final_state=state, config=config)
    if config.output:
        write_csv(records, config.output)
    return result


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(records, path) -> None:
    """Write log records with the CSV_COLUMNS header, full float precision."""
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        row = [
            _fmt(r.t),
            _fmt(r.p[0]), _fmt(r.p[1]), _fmt(r.p[2]),
            _fmt(r.p_d[0]), _fmt(r.p_d[1]), _fmt(r.p_d[2]),
            _fmt(r.v[0]), _fmt(r.v[1]), _fmt(r.v[2]),
            _fmt(r.q[0]), _fmt(r.q[1]), _fmt(r.q[2]), _fmt(r.q[3]),
            _fmt(r.euler[0]), _fmt(r.euler[1]), _fmt(r.euler[2]),
            _fmt(r.w[0]), _fmt(r.w[1]), _fmt(r.w[2]),
            _fmt(r.f1), _fmt(r.f2), _fmt(r.f3), _fmt(r.f4),
            _fmt(r.beta1), _fmt(r.beta2),
            _fmt(r.Fz_cmd),
            _fmt(r.tau_cmd[0]), _fmt(r.tau_cmd[1]), _fmt(r.tau_cmd[2]),
            str(int(r.sat_thrust)), str(int(r.sat_tilt)),
        ]
        lines.append(",".join(row))
    out_dir = os.path.dirname(os.path.abspath(os.fspath(path)))
    os.makedirs(out_dir, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SummaryStats:
    rms_error_final_half: float
    max_error_after_20s: float
    max_thrust: float
    saturated_steps: int
    n_records: int


def summarize(records) -> SummaryStats:
    if not records:
        return SummaryStats(float("nan"), float("nan"), float("nan"), 0, 0)
    t = np.array([r.t for r in records])
    p = np.array([r.p for r in records])
    p_d = np.array([r.p_d for r in records])
    pe = np.linalg.norm(p - p_d, axis=1)
    half = t >= t[-1] / 2.0
    late = pe[t >= 20.0]
    thrusts = np.array([[r.f1, r.f2, r.f3, r.f4] for r in records])
    sat = sum(1 for r in records if r.sat_thrust or r.sat_tilt)
    return SummaryStats(
        rms_error_final_half=float(np.sqrt(np.mean(pe[half] ** 2))),
        max_error_after_20s=float(np.max(late)) if late.size else float("nan"),
        max_thrust=float(np.max(thrusts)),
        saturated_steps=sat,
        n_records=len(records))


def format_summary(stats: SummaryStats) -> str:
    return "\n".join([
        f"records:                 {stats.n_records}",
        f"rms |p_e|, final half:   {stats.rms_error_final_half:.6g} m",
        f"max |p_e| after 20 s:    {stats.max_error_after_20s:.6g} m",
        f"max thrust:              {stats.max_thrust:.6g} N",
        f"saturated control steps: {stats.saturated_steps}",
    ])
