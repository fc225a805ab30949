"""Rigid-body state, quaternion math and the fixed-step integrator.

Conventions, fixed once here and relied on everywhere else:

* Inertial frame is world NWU with z up; gravity pulls along -z.
* The attitude quaternion q is scalar-first [q0, q1, q2, q3] and maps body
  coordinates to inertial coordinates: x_inertial = R(q) @ x_body.
* Angular velocity w is expressed in the body frame and enters the kinematics
  by right multiplication, q_dot = 0.5 * q x (0, w).
* The inertia tensor is diagonal (principal body axes).

Newton-Euler equations of motion:

    p_dot = v
    m v_dot = -m g e3 + R(q) F
    q_dot = 0.5 q x (0, w)
    J w_dot = -w x (J w) + tau

with F, tau the body-frame force and torque. The integrator is classical RK4
with the wrench held constant across the step (zero-order hold, which is what
a discrete control loop produces) and the quaternion renormalized once per
step to stop drift from accumulating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import VehicleParams

_QUAT_TOL = 1e-6


@dataclass
class RigidBodyState:
    """Position, velocity, attitude quaternion and body angular velocity."""

    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    w: np.ndarray

    @staticmethod
    def at_rest(p=(0.0, 0.0, 0.0), q=(1.0, 0.0, 0.0, 0.0)) -> "RigidBodyState":
        return RigidBodyState(
            p=np.asarray(p, dtype=float).copy(),
            v=np.zeros(3),
            q=np.asarray(q, dtype=float).copy(),
            w=np.zeros(3),
        )


@dataclass
class Wrench:
    """Body-frame force (N) and torque (N m)."""

    F: np.ndarray
    tau: np.ndarray


@dataclass
class StateDerivative:
    """Time derivative of a RigidBodyState (dq is a raw quaternion rate)."""

    dp: np.ndarray
    dv: np.ndarray
    dq: np.ndarray
    dw: np.ndarray


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix of w, so that hat(w) @ x == cross(w, x)."""
    wx, wy, wz = w
    return np.array([
        [0.0, -wz, wy],
        [wz, 0.0, -wx],
        [-wy, wx, 0.0],
    ])


def quat_multiply(a, b) -> np.ndarray:
    """Hamilton product a x b, scalar-first."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q) -> np.ndarray:
    qw, qx, qy, qz = q
    return np.array([qw, -qx, -qy, -qz])


def quat_normalize(q) -> np.ndarray:
    """Scale q to unit norm. Raises ValueError on the zero quaternion."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("cannot normalize the zero quaternion")
    return q / n


def quat_to_rotmat(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion (body-to-inertial).

    The input must already be a unit quaternion up to small integrator drift;
    anything further off than 1e-6 is rejected as a usage error. Within the
    tolerance the quaternion is renormalized first, so the returned matrix is
    orthonormal to machine precision regardless of drift.
    """
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if abs(n - 1.0) > _QUAT_TOL:
        raise ValueError(f"quaternion norm {n} is not within {_QUAT_TOL} of 1")
    qw, qx, qy, qz = q / n
    return np.array([
        [1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qw * qz), 2 * (qx * qz + qw * qy)],
        [2 * (qx * qy + qw * qz), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qw * qx)],
        [2 * (qx * qz - qw * qy), 2 * (qy * qz + qw * qx), 1 - 2 * (qx * qx + qy * qy)],
    ])


def quat_from_rotmat(R) -> np.ndarray:
    """Unit quaternion of a rotation matrix, scalar part kept nonnegative.

    Shepperd's branch selection: pick the largest of the four squared
    components so no branch divides by a small number.
    """
    R = np.asarray(R, dtype=float)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > 0:
        s = 2.0 * np.sqrt(tr + 1.0)
        q = np.array([0.25 * s,
                      (R[2, 1] - R[1, 2]) / s,
                      (R[0, 2] - R[2, 0]) / s,
                      (R[1, 0] - R[0, 1]) / s])
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = np.array([(R[2, 1] - R[1, 2]) / s,
                      0.25 * s,
                      (R[0, 1] + R[1, 0]) / s,
                      (R[0, 2] + R[2, 0]) / s])
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = np.array([(R[0, 2] - R[2, 0]) / s,
                      (R[0, 1] + R[1, 0]) / s,
                      0.25 * s,
                      (R[1, 2] + R[2, 1]) / s])
    else:
        s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = np.array([(R[1, 0] - R[0, 1]) / s,
                      (R[0, 2] + R[2, 0]) / s,
                      (R[1, 2] + R[2, 1]) / s,
                      0.25 * s])
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return q


# Packed-vector layout used by the integrator: [p(3), v(3), q(4), w(3)].

def _pack(s: RigidBodyState) -> np.ndarray:
    return np.concatenate([s.p, s.v, s.q, s.w])


def _unpack(y: np.ndarray) -> RigidBodyState:
    return RigidBodyState(p=y[0:3].copy(), v=y[3:6].copy(),
                          q=y[6:10].copy(), w=y[10:13].copy())


def _deriv_packed(y: np.ndarray, F: np.ndarray, tau: np.ndarray,
                  m: float, g: float, J: np.ndarray) -> np.ndarray:
    v = y[3:6]
    q = y[6:10]
    w = y[10:13]
    # RK4 stage states drift slightly off unit norm; use the normalized
    # direction for the rotation without touching the integrated q itself.
    R = quat_to_rotmat(q / np.linalg.norm(q))
    dv = (R @ F) / m
    dv[2] -= g
    dq = 0.5 * quat_multiply(q, (0.0, w[0], w[1], w[2]))
    dw = (tau - np.cross(w, J * w)) / J
    return np.concatenate([v, dv, dq, dw])


def state_derivative(s: RigidBodyState, wr: Wrench,
                     params: VehicleParams) -> StateDerivative:
    """Newton-Euler time derivative of the state under a body wrench."""
    y = _deriv_packed(_pack(s), np.asarray(wr.F, dtype=float),
                      np.asarray(wr.tau, dtype=float),
                      params.m, params.g, np.asarray(params.J, dtype=float))
    return StateDerivative(dp=y[0:3], dv=y[3:6], dq=y[6:10], dw=y[10:13])


def rk4_step(s: RigidBodyState, wr: Wrench, dt: float,
             params: VehicleParams) -> RigidBodyState:
    """One classical RK4 step with the wrench held constant.

    The quaternion is renormalized after the update, so the returned state is
    always safe to hand back to quat_to_rotmat.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    F = np.asarray(wr.F, dtype=float)
    tau = np.asarray(wr.tau, dtype=float)
    m, g = params.m, params.g
    J = np.asarray(params.J, dtype=float)

    y = _pack(s)
    k1 = _deriv_packed(y, F, tau, m, g, J)
    k2 = _deriv_packed(y + 0.5 * dt * k1, F, tau, m, g, J)
    k3 = _deriv_packed(y + 0.5 * dt * k2, F, tau, m, g, J)
    k4 = _deriv_packed(y + dt * k3, F, tau, m, g, J)
    y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    y[6:10] /= np.linalg.norm(y[6:10])
    return _unpack(y)
