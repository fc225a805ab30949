"""Forward actuator model: thrusts and tilt angles to a body wrench.

The vehicle has four propellers:

* 1 and 2 sit at the ends of the lateral arms (+l and -l along body y),
  raised b1 above the center of mass, and tilt about the body y axis by servo
  angles beta1 and beta2. Propeller 1 spins counterclockwise, 2 clockwise.
* 3 and 4 are fixed coaxial propellers below the center of mass (depth b2),
  also at +l and -l along y, thrusting straight up along body z. Propeller 3
  spins clockwise, 4 counterclockwise.

A tilted rotor's thrust splits into a vertical component f cos(beta) and a
lateral (body-x) component f sin(beta); that split is the force decomposition
the allocator works in, because it turns the wrench map into a linear one.

Torque comes from three effects: moment arms (d_i x F_i), and each rotor's
aerodynamic drag torque k_r * f_i along its spin axis, signed by spin
direction and rotated with the rotor when it tilts. The bottom-rotor depth b2
cancels out of every torque component (their thrust is parallel to z, and
d x F for the z part only involves the lateral offsets), which is why it
never appears in the wrench formulas.

forward_wrench is the componentwise closed form used everywhere at runtime;
forward_wrench_vector_oracle rebuilds the same wrench from explicit rotation
matrices and cross products and exists purely as an independent check in the
test suite. The two must agree to machine precision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import VehicleParams
from .rigid_body import Wrench

DEFAULT_TILT_LIMIT = np.pi / 2


@dataclass(frozen=True)
class ActuatorCommand:
    """Four thrust magnitudes (N) and the two tilt servo angles (rad)."""

    f1: float
    f2: float
    f3: float
    f4: float
    beta1: float = 0.0
    beta2: float = 0.0

    def __post_init__(self):
        for name in ("f1", "f2", "f3", "f4"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not -np.pi <= value <= np.pi:
                raise ValueError(f"{name} must lie in [-pi, pi], got {value}")

    def thrusts(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4])


_TAG_BY_LENGTH = {6: "nominal", 5: "one_bottom_out", 4: "both_bottom_out"}


@dataclass(frozen=True)
class ForceDecomposition:
    """Decomposed forces, ordered [F1V, F1L, F2V, F2L, ...surviving bottom thrusts].

    Length 6 when all rotors run, 5 with one bottom rotor out, 4 in pure
    bicopter mode. The length is the mode tag.
    """

    entries: tuple[float, ...]

    def __post_init__(self):
        if len(self.entries) not in _TAG_BY_LENGTH:
            raise ValueError(
                f"decomposition must have 6, 5 or 4 entries, got {len(self.entries)}")

    @property
    def mode_tag(self) -> str:
        return _TAG_BY_LENGTH[len(self.entries)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)


@dataclass(frozen=True)
class SaturationReport:
    """What the actuator recovery had to clamp or flag.

    clamped_thrusts lists bottom rotors whose requested thrust was negative and
    got clamped to zero (they cannot reverse). tilt_exceeded lists tilt angles
    outside the servo limit; those are flagged but not altered.
    """

    clamped_thrusts: tuple[str, ...] = ()
    tilt_exceeded: tuple[str, ...] = ()

    @property
    def saturated(self) -> bool:
        return bool(self.clamped_thrusts or self.tilt_exceeded)


@dataclass(frozen=True)
class ArmGeometry:
    """Propeller positions in the body frame."""

    d1: tuple[float, float, float]
    d2: tuple[float, float, float]
    d3: tuple[float, float, float]
    d4: tuple[float, float, float]


def arm_geometry(params: VehicleParams) -> ArmGeometry:
    l, b1, b2 = params.l, params.b1, params.b2
    return ArmGeometry(
        d1=(0.0, l, b1),
        d2=(0.0, -l, b1),
        d3=(0.0, l, -b2),
        d4=(0.0, -l, -b2),
    )


def tilt_rotation(beta: float) -> np.ndarray:
    """Rotation about the body y axis by the servo angle beta.

    Maps the rotor's thrust direction: at beta = 0 thrust is +z, at
    beta = pi/2 it points along +x.
    """
    c, s = np.cos(beta), np.sin(beta)
    return np.array([
        [c, 0.0, s],
        [0.0, 1.0, 0.0],
        [-s, 0.0, c],
    ])


def forward_wrench(u: ActuatorCommand, params: VehicleParams) -> Wrench:
    """Body wrench produced by an actuator command (componentwise closed form).

    F_y is identically zero (no actuator can push along body y) and
    F_x = tau_y / b1 always (the same lateral thrust components produce both),
    so only four of the six wrench components are independent.
    """
    l, b1, k_r = params.l, params.b1, params.k_r
    s1, c1 = np.sin(u.beta1), np.cos(u.beta1)
    s2, c2 = np.sin(u.beta2), np.cos(u.beta2)
    f1v, f1l = u.f1 * c1, u.f1 * s1
    f2v, f2l = u.f2 * c2, u.f2 * s2

    Fx = f1l + f2l
    Fz = f1v + f2v + u.f3 + u.f4
    tau_x = l * (f1v - f2v) + l * (u.f3 - u.f4) - k_r * (f1l - f2l)
    tau_y = b1 * (f1l + f2l)
    tau_z = k_r * (u.f3 - u.f4) - k_r * (f1v - f2v) - l * (f1l - f2l)
    return Wrench(F=np.array([Fx, 0.0, Fz]),
                  tau=np.array([tau_x, tau_y, tau_z]))


# Spin direction of each rotor's drag torque about its own thrust axis:
# counterclockwise rotors (1 and 4) react with -k_r per newton, clockwise
# rotors (2 and 3) with +k_r.
_SPIN_SIGN = (-1.0, +1.0, +1.0, -1.0)


def forward_wrench_vector_oracle(u: ActuatorCommand,
                                 params: VehicleParams) -> Wrench:
    """Same wrench, rebuilt from explicit rotations and cross products.

    Exists as an independent oracle for forward_wrench; runtime code should
    call forward_wrench instead.
    """
    arms = arm_geometry(params)
    d = [np.asarray(di, dtype=float) for di in (arms.d1, arms.d2, arms.d3, arms.d4)]
    thrusts = [np.array([0.0, 0.0, fi]) for fi in (u.f1, u.f2, u.f3, u.f4)]
    rotations = [tilt_rotation(u.beta1), tilt_rotation(u.beta2),
                 np.eye(3), np.eye(3)]

    F = np.zeros(3)
    tau = np.zeros(3)
    for di, Ri, Fi, spin in zip(d, rotations, thrusts, _SPIN_SIGN):
        force_i = Ri @ Fi
        F = F + force_i
        tau = tau + np.cross(di, force_i) + spin * params.k_r * force_i
    return Wrench(F=F, tau=tau)


def decompose(u: ActuatorCommand) -> ForceDecomposition:
    """Split the tilting rotors' thrusts into vertical and lateral parts."""
    return ForceDecomposition(entries=(
        u.f1 * np.cos(u.beta1),
        u.f1 * np.sin(u.beta1),
        u.f2 * np.cos(u.beta2),
        u.f2 * np.sin(u.beta2),
        u.f3,
        u.f4,
    ))


def recompose(fd: ForceDecomposition,
              tilt_limit: float = DEFAULT_TILT_LIMIT
              ) -> tuple[ActuatorCommand, SaturationReport]:
    """Recover actuator inputs from a length-6 decomposition.

    f1 = hypot(F1V, F1L) with beta1 = atan2(F1L, F1V), same for rotor 2; the
    bottom thrusts pass through. A negative vertical component simply lands in
    the angle (a tilt beyond 90 degrees), which is flagged when it exceeds the
    servo limit. Negative bottom thrusts are clamped to zero and reported,
    since fixed-pitch propellers cannot reverse.
    """
    if len(fd.entries) != 6:
        raise ValueError(
            f"recompose needs a length-6 decomposition, got {len(fd.entries)}"
            " (expand failure-mode vectors to the full actuator set first)")
    f1v, f1l, f2v, f2l, f3, f4 = fd.entries

    f1 = float(np.hypot(f1v, f1l))
    beta1 = float(np.arctan2(f1l, f1v)) if f1 > 0 else 0.0
    f2 = float(np.hypot(f2v, f2l))
    beta2 = float(np.arctan2(f2l, f2v)) if f2 > 0 else 0.0

    clamped = []
    if f3 < 0:
        f3 = 0.0
        clamped.append("f3")
    if f4 < 0:
        f4 = 0.0
        clamped.append("f4")

    tilt_flags = [name for name, beta in (("beta1", beta1), ("beta2", beta2))
                  if abs(beta) > tilt_limit]

    command = ActuatorCommand(f1=f1, f2=f2, f3=float(f3), f4=float(f4),
                              beta1=beta1, beta2=beta2)
    report = SaturationReport(clamped_thrusts=tuple(clamped),
                              tilt_exceeded=tuple(tilt_flags))
    return command, report
