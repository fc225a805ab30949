"""Outer position loop: PD force law and desired-attitude construction.

The position loop produces a desired inertial force vector; the vehicle can
only realize force along (mostly) its body z-axis, so the desired attitude
tilts body z onto that vector while a commanded yaw fixes the remaining
heading freedom. The small lateral force from tilting the top rotors is then
accounted for when projecting the force demand onto the current body z.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ControllerGains, VehicleParams
from .rigid_body import quat_from_rotmat

_E1 = np.array([1.0, 0.0, 0.0])
_E3 = np.array([0.0, 0.0, 1.0])


class DegenerateAttitudeError(ValueError):
    """The desired force cannot define an attitude (zero, or parallel to heading)."""


@dataclass(frozen=True)
class ReferenceSignal:
    """Position/velocity/acceleration setpoint plus commanded yaw, one instant."""

    p_d: tuple[float, float, float]
    v_d: tuple[float, float, float]
    a_d: tuple[float, float, float]
    psi: float


@dataclass(frozen=True)
class DesiredAttitude:
    q_c: tuple[float, float, float, float]
    R_c: tuple  # 3x3 nested tuples, body-to-inertial


def hover_reference(p: tuple[float, float, float], psi: float = 0.0) -> ReferenceSignal:
    return ReferenceSignal(p_d=tuple(float(x) for x in p),
                           v_d=(0.0, 0.0, 0.0), a_d=(0.0, 0.0, 0.0), psi=float(psi))


def circle_reference(t: float) -> ReferenceSignal:
    """Radius-4 circle at 4 m altitude, one lap per 8 s, fixed 30-degree yaw."""
    omega = np.pi / 4.0
    c, s = np.cos(omega * t), np.sin(omega * t)
    return ReferenceSignal(
        p_d=(4.0 * c, 4.0 * s, 4.0),
        v_d=(-4.0 * omega * s, 4.0 * omega * c, 0.0),
        a_d=(-4.0 * omega * omega * c, -4.0 * omega * omega * s, 0.0),
        psi=np.pi / 6.0)


def position_law(p: np.ndarray, v: np.ndarray, ref: ReferenceSignal,
                 params: VehicleParams, gains: ControllerGains) -> np.ndarray:
    """PD-plus-feedforward desired inertial force.

    Gravity compensation appears with a positive sign because the force is
    expressed in the same z-up frame the weight -m g e3 lives in.
    """
    p_e = p - np.asarray(ref.p_d)
    v_e = v - np.asarray(ref.v_d)
    return (-gains.k_p * p_e - gains.k_d * v_e
            + params.m * params.g * _E3 + params.m * np.asarray(ref.a_d))


def desired_attitude(F_des: np.ndarray, psi: float,
                     eps_f: float = 1e-6, eps_x: float = 1e-6) -> DesiredAttitude:
    """Rotation matrix and quaternion aligning body z with the desired force.

    Desired body z is the unit force direction; desired body y is orthogonal
    to both that and the yaw heading (cos psi, sin psi, 0); desired body x
    completes the triad. Raises DegenerateAttitudeError when the force
    vanishes or is parallel to the heading, since either leaves the attitude
    undefined; callers should hold the previous command for that cycle.
    """
    norm_f = np.linalg.norm(F_des)
    if norm_f < eps_f:
        raise DegenerateAttitudeError(
            f"desired force magnitude {norm_f:.3e} is below {eps_f:.1e}")
    z_bd = F_des / norm_f
    x_bc = np.array([np.cos(psi), np.sin(psi), 0.0])
    y_raw = np.cross(z_bd, x_bc)
    norm_y = np.linalg.norm(y_raw)
    if norm_y < eps_x:
        raise DegenerateAttitudeError(
            "desired force is parallel to the heading vector; "
            f"cross-product norm {norm_y:.3e} is below {eps_x:.1e}")
    y_bd = y_raw / norm_y
    x_bd = np.cross(y_bd, z_bd)
    R_c = np.column_stack([x_bd, y_bd, z_bd])
    q_c = quat_from_rotmat(R_c)
    return DesiredAttitude(q_c=tuple(float(x) for x in q_c),
                           R_c=tuple(tuple(float(x) for x in row) for row in R_c))


def project_fz(F_des: np.ndarray, R: np.ndarray, Fx_body: float) -> float:
    """Thrust along current body z after removing the lateral-force share.

    The top rotors' tilt produces a known body-x force (the one that buys the
    pitch torque), so that part of the demand is subtracted before projecting
    what remains onto the body z-axis.
    """
    remainder = F_des - R @ (Fx_body * _E1)
    return float(remainder @ (R @ _E3))
