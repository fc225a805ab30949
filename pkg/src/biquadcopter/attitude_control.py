"""Inner attitude loop: quaternion error, rate command, and torque law.

The attitude error uses the axis-angle-scaled vector part of the error
quaternion, which behaves like a rotation vector for small and large errors
alike and picks the short way around via the sign of the scalar part. The
rate loop is PD on the rate error with gyroscopic feedforward; it cancels the
rigid-body cross term so each axis closes a linear loop around the inertia.

The rate-error derivative is a backward difference passed through a one-pole
smoother. The raw difference interacts with the zero-order-hold torque in a
way that is unstable for this inertia/gain combination at any sample rate
(the discrete characteristic roots have product -K_d/J, and pitch has
K_d/J > 1), so the smoother is load-bearing, not cosmetic. smoothing=0.0
recovers the raw difference for anyone who wants it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ControllerGains, VehicleParams
from .rigid_body import quat_conjugate, quat_multiply

_SMALL_ANGLE = 1e-6


@dataclass(frozen=True)
class AttitudeError:
    """Rotation-vector style attitude error plus the raw quaternion pieces."""

    e_err: tuple[float, float, float]
    phi: float  # full error angle in [0, 2*pi)
    eta_e: float
    eps_e: tuple[float, float, float]


@dataclass(frozen=True)
class RateLoopState:
    """Carry-over between control cycles for the rate-error derivative."""

    prev_omega_e: tuple[float, float, float] = (0.0, 0.0, 0.0)
    prev_derivative: tuple[float, float, float] = (0.0, 0.0, 0.0)
    initialized: bool = False


def initial_rate_state() -> RateLoopState:
    return RateLoopState()


def attitude_error(q: np.ndarray, q_c: np.ndarray) -> AttitudeError:
    """Error between current and commanded attitude, double-cover safe.

    q and -q describe the same physical attitude; taking sign(eta_e) (with
    sign(0) treated as +1) makes the output identical for both. The scaling
    phi_c / sin(phi_c / 2) turns the quaternion vector part into a true
    rotation vector; its small-angle limit is 2, used below the angle guard.
    """
    q_e = quat_multiply(quat_conjugate(np.asarray(q_c, dtype=float)),
                        np.asarray(q, dtype=float))
    eta = float(q_e[0])
    eps = q_e[1:4]
    norm_eps = float(np.linalg.norm(eps))
    phi_c = 2.0 * np.arctan2(norm_eps, abs(eta))
    if phi_c < _SMALL_ANGLE:
        factor = 2.0
    else:
        factor = phi_c / np.sin(phi_c / 2.0)
    sign = 1.0 if eta >= 0.0 else -1.0
    e = sign * factor * eps
    phi = 2.0 * np.arctan2(norm_eps, eta)
    if phi < 0.0:
        phi += 2.0 * np.pi
    return AttitudeError(e_err=tuple(float(x) for x in e), phi=float(phi),
                         eta_e=eta, eps_e=tuple(float(x) for x in eps))


def outer_loop(err: AttitudeError, gains: ControllerGains) -> np.ndarray:
    """Proportional rate command driving the attitude error to zero."""
    return -gains.k_p_q * np.asarray(err.e_err)


def inner_loop(w: np.ndarray, omega_d: np.ndarray, state: RateLoopState,
               dt: float, params: VehicleParams, gains: ControllerGains,
               smoothing: float = 0.5) -> tuple[np.ndarray, RateLoopState]:
    """PD torque on the rate error with gyroscopic feedforward.

    Returns the desired torque and the updated carry-over state. The state's
    prev_derivative is the derivative estimate actually used this cycle,
    which is what the feedback-linearization identity
    J @ wdot = -K_p_w @ omega_e - K_d_w @ D holds against.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not 0.0 <= smoothing < 1.0:
        raise ValueError(f"smoothing must be in [0, 1), got {smoothing}")
    w = np.asarray(w, dtype=float)
    omega_e = w - np.asarray(omega_d, dtype=float)
    if state.initialized:
        raw = (omega_e - np.asarray(state.prev_omega_e)) / dt
    else:
        raw = np.zeros(3)
    derivative = smoothing * np.asarray(state.prev_derivative) + (1.0 - smoothing) * raw

    J = np.asarray(params.J)
    K_p = np.asarray(gains.K_p_w)
    K_d = np.asarray(gains.K_d_w)
    tau_d = -K_p * omega_e - K_d * derivative + np.cross(w, J * w)

    new_state = RateLoopState(
        prev_omega_e=tuple(float(x) for x in omega_e),
        prev_derivative=tuple(float(x) for x in derivative),
        initialized=True)
    return tau_d, new_state
