"""Control allocation: reduced wrench in, actuator command out.

Only four wrench components are independently controllable (F_z and the three
torques; F_x rides along as tau_y / b1 and F_y is structurally zero), while
there are six decomposed force variables, so allocation solves an
underdetermined linear system

    [F_z, tau_x, tau_y, tau_z]^T = A @ F_dec

and picks the minimum-norm solution via the Moore-Penrose pseudo-inverse.
Minimizing ||F_dec|| minimizes the actual thrust magnitudes too, because each
tilting rotor's thrust is exactly the norm of its (vertical, lateral) pair.

Failure handling drops the failed bottom rotor's column (or both), shrinking
the system to 4x5 or 4x4; the 4x4 bicopter case is square and invertible with
determinant 4 * b1 * (l^2 + k_r^2). Matrices are built once per parameter set
and failure mode, rank-checked, and cached.

The closed-form pseudo-inverse for the nominal matrix is implemented
separately as a test oracle against the SVD-based numeric path.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .actuation import (ActuatorCommand, DEFAULT_TILT_LIMIT, ForceDecomposition,
                        SaturationReport, recompose)
from .params import VehicleParams

_RANK_RCOND = 1e-12


class RankDeficiencyError(ValueError):
    """The allocation matrix lost row rank; the geometry cannot span the wrench."""


@dataclass(frozen=True)
class FailureMode:
    """Which actuators are out: none, one bottom rotor (3 or 4), or both."""

    tag: str
    which: int | None = None

    @staticmethod
    def nominal() -> "FailureMode":
        return FailureMode(tag="nominal")

    @staticmethod
    def one_bottom_out(which: int) -> "FailureMode":
        if which not in (3, 4):
            raise ValueError(f"only bottom rotors 3 and 4 can fail here, got {which}")
        return FailureMode(tag="one_bottom_out", which=which)

    @staticmethod
    def both_bottom_out() -> "FailureMode":
        return FailureMode(tag="both_bottom_out")

    @property
    def failed_rotors(self) -> tuple[int, ...]:
        if self.tag == "nominal":
            return ()
        if self.tag == "one_bottom_out":
            return (self.which,)
        return (3, 4)

    def decomposition_columns(self) -> tuple[int, ...]:
        """Indices into the nominal [F1V, F1L, F2V, F2L, F3, F4] that survive."""
        drop = {rotor + 1 for rotor in self.failed_rotors}  # rotor 3 -> col 4, 4 -> 5
        return tuple(i for i in range(6) if i not in drop)


@dataclass(frozen=True)
class ReducedWrench:
    """The controllable wrench components: body-z force and the torque vector."""

    Fz: float
    tau: tuple[float, float, float]

    def vector(self) -> np.ndarray:
        return np.array([self.Fz, self.tau[0], self.tau[1], self.tau[2]])


@dataclass(frozen=True)
class AllocationMatrix:
    """A static allocation matrix with its precomputed pseudo-inverse."""

    mode: FailureMode
    columns: tuple[int, ...]
    A: np.ndarray
    A_pinv: np.ndarray
    null_basis: np.ndarray  # rows span the null space of A (may be empty)


def _static_matrix(params: VehicleParams) -> np.ndarray:
    l, b1, k_r = params.l, params.b1, params.k_r
    return np.array([
        [1.0,   0.0,  1.0,  0.0, 1.0,  1.0],
        [l,    -k_r, -l,    k_r, l,   -l],
        [0.0,   b1,   0.0,  b1,  0.0,  0.0],
        [-k_r, -l,    k_r,  l,   k_r, -k_r],
    ])


@lru_cache(maxsize=None)
def build_allocation(params: VehicleParams, mode: FailureMode) -> AllocationMatrix:
    """Build (and cache) the allocation matrix and pseudo-inverse for a mode.

    Raises RankDeficiencyError when the surviving columns cannot produce all
    four wrench components (degenerate geometry, for example l = 0 with
    k_r = 0, which collapses the roll row against the yaw row).
    """
    columns = mode.decomposition_columns()
    A = _static_matrix(params)[:, list(columns)]

    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    cutoff = _RANK_RCOND * s[0] if s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff))
    if rank < 4:
        raise RankDeficiencyError(
            f"allocation matrix rank {rank} < 4 in mode {mode.tag}: "
            f"geometry (l={params.l}, b1={params.b1}, k_r={params.k_r}) "
            "cannot span the reduced wrench")

    inv_s = 1.0 / s[:rank]
    A_pinv = Vt[:rank].T @ (inv_s[:, None] * U.T[:rank])
    null_basis = Vt[rank:]

    for array in (A, A_pinv, null_basis):
        array.setflags(write=False)
    return AllocationMatrix(mode=mode, columns=columns, A=A, A_pinv=A_pinv,
                            null_basis=null_basis)


def closed_form_pinv(params: VehicleParams) -> np.ndarray:
    """Symbolic pseudo-inverse of the nominal 4x6 matrix (oracle only).

    Column order of the result matches the wrench ordering
    (F_z, tau_x, tau_y, tau_z); rows follow [F1V, F1L, F2V, F2L, F3, F4].
    """
    l, b1, k_r = params.l, params.b1, params.k_r
    L2 = l * l + k_r * k_r
    a = l * (l * l + 3.0 * k_r * k_r) / (4.0 * L2 * L2)
    b = k_r * (3.0 * l * l + k_r * k_r) / (4.0 * L2 * L2)
    c = k_r ** 3 / (2.0 * L2 * L2)
    d = l ** 3 / (2.0 * L2 * L2)
    e = 1.0 / (2.0 * b1)
    return np.array([
        [0.25,  a,   0.0, -b],
        [0.0,  -c,   e,   -d],
        [0.25, -a,   0.0,  b],
        [0.0,   c,   e,    d],
        [0.25,  l / (4.0 * L2), 0.0,  k_r / (4.0 * L2)],
        [0.25, -l / (4.0 * L2), 0.0, -k_r / (4.0 * L2)],
    ])


def allocate_decomposition(w: ReducedWrench, params: VehicleParams,
                           mode: FailureMode) -> ForceDecomposition:
    """Minimum-norm decomposed forces achieving the wrench in the given mode."""
    alloc = build_allocation(params, mode)
    fd = alloc.A_pinv @ w.vector()
    return ForceDecomposition(entries=tuple(float(x) for x in fd))


def _expand_to_full(fd: ForceDecomposition, mode: FailureMode) -> ForceDecomposition:
    full = [0.0] * 6
    for value, col in zip(fd.entries, mode.decomposition_columns()):
        full[col] = value
    return ForceDecomposition(entries=tuple(full))


def allocate(w: ReducedWrench, params: VehicleParams, mode: FailureMode,
             tilt_limit: float = DEFAULT_TILT_LIMIT
             ) -> tuple[ActuatorCommand, SaturationReport]:
    """Wrench to actuator command, reporting (never raising on) infeasibility.

    Failed rotors are pinned to exactly zero thrust in the output regardless
    of numerics. Saturation (a negative bottom-thrust request, or a tilt past
    the servo limit) comes back in the report so a control loop can log it and
    keep running.
    """
    fd = allocate_decomposition(w, params, mode)
    command, report = recompose(_expand_to_full(fd, mode), tilt_limit=tilt_limit)
    if mode.failed_rotors:
        patch = {f"f{rotor}": 0.0 for rotor in mode.failed_rotors}
        command = ActuatorCommand(
            f1=command.f1, f2=command.f2,
            f3=patch.get("f3", command.f3), f4=patch.get("f4", command.f4),
            beta1=command.beta1, beta2=command.beta2)
    return command, report


def min_norm_check(w: ReducedWrench, fd: ForceDecomposition,
                   params: VehicleParams, mode: FailureMode,
                   n_samples: int = 100, rng=None,
                   solution_tol: float = 1e-8) -> bool:
    """True iff fd beats n_samples random null-space perturbations in 2-norm.

    fd must actually solve A @ fd = w (within solution_tol, scaled by the
    wrench magnitude); otherwise the comparison is meaningless and this
    raises. For the square bicopter system the null space is trivial and the
    check passes vacuously.
    """
    alloc = build_allocation(params, mode)
    x = fd.as_array()
    target = w.vector()
    residual = np.linalg.norm(alloc.A @ x - target)
    if residual > solution_tol * max(1.0, np.linalg.norm(target)):
        raise ValueError(
            f"decomposition does not solve the allocation system "
            f"(residual {residual:.3e})")
    if alloc.null_basis.shape[0] == 0:
        return True
    if rng is None:
        rng = np.random.default_rng(0)
    norm_x = np.linalg.norm(x)
    for _ in range(n_samples):
        coeffs = rng.standard_normal(alloc.null_basis.shape[0])
        candidate = x + coeffs @ alloc.null_basis
        if np.linalg.norm(candidate) < norm_x - 1e-12:
            return False
    return True
