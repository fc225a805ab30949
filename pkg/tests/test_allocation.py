import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from biquadcopter.actuation import ForceDecomposition, forward_wrench
from biquadcopter.allocation import (FailureMode, RankDeficiencyError,
                                     ReducedWrench, allocate,
                                     allocate_decomposition, build_allocation,
                                     closed_form_pinv, min_norm_check)
from biquadcopter.params import VehicleParams, default_params

PARAMS, _ = default_params()

ALL_MODES = (FailureMode.nominal(),
             FailureMode.one_bottom_out(3),
             FailureMode.one_bottom_out(4),
             FailureMode.both_bottom_out())


def random_params(rng):
    return VehicleParams(
        m=5.0, g=9.8,
        l=rng.uniform(0.05, 0.5),
        b1=rng.uniform(0.05, 0.3),
        b2=0.15,
        J=(0.366, 0.171, 0.391),
        k_r=rng.uniform(0.0, 0.01))


def random_wrench(rng):
    return ReducedWrench(Fz=float(rng.uniform(0.0, 100.0)),
                         tau=tuple(rng.uniform(-5.0, 5.0, size=3)))


def test_failure_mode_column_bookkeeping():
    assert FailureMode.nominal().decomposition_columns() == (0, 1, 2, 3, 4, 5)
    assert FailureMode.one_bottom_out(3).decomposition_columns() == (0, 1, 2, 3, 5)
    assert FailureMode.one_bottom_out(4).decomposition_columns() == (0, 1, 2, 3, 4)
    assert FailureMode.both_bottom_out().decomposition_columns() == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        FailureMode.one_bottom_out(1)


def test_static_matrix_rows():
    A = build_allocation(PARAMS, FailureMode.nominal()).A
    l, b1, k_r = PARAMS.l, PARAMS.b1, PARAMS.k_r
    assert_allclose(A[0], [1, 0, 1, 0, 1, 1], atol=0)
    assert_allclose(A[1], [l, -k_r, -l, k_r, l, -l], atol=0)
    assert_allclose(A[2], [0, b1, 0, b1, 0, 0], atol=0)
    assert_allclose(A[3], [-k_r, -l, k_r, l, k_r, -k_r], atol=0)


def test_matrix_agrees_with_forward_model():
    # A @ decompose(u) must reproduce the physical wrench for any command
    from biquadcopter.actuation import ActuatorCommand, decompose
    rng = np.random.default_rng(20)
    A = build_allocation(PARAMS, FailureMode.nominal()).A
    for _ in range(50):
        u = ActuatorCommand(f1=rng.uniform(0, 30), f2=rng.uniform(0, 30),
                            f3=rng.uniform(0, 30), f4=rng.uniform(0, 30),
                            beta1=rng.uniform(-np.pi, np.pi),
                            beta2=rng.uniform(-np.pi, np.pi))
        w = forward_wrench(u, PARAMS)
        reduced = A @ decompose(u).as_array()
        assert_allclose(reduced, [w.F[2], *w.tau], atol=1e-10)


def test_closed_form_matches_numeric_pinv():
    numeric = build_allocation(PARAMS, FailureMode.nominal()).A_pinv
    symbolic = closed_form_pinv(PARAMS)
    assert np.max(np.abs(numeric - symbolic)) < 1e-12


def test_closed_form_matches_numeric_pinv_random_params():
    rng = np.random.default_rng(21)
    for _ in range(100):
        params = random_params(rng)
        numeric = build_allocation(params, FailureMode.nominal()).A_pinv
        assert np.max(np.abs(numeric - closed_form_pinv(params))) < 1e-12


def test_closed_form_thrust_column():
    # the F_z column splits the request evenly: a quarter to each vertical slot
    col = closed_form_pinv(PARAMS)[:, 0]
    assert_allclose(col, [0.25, 0.0, 0.25, 0.0, 0.25, 0.25], atol=0)


def test_pinv_is_right_inverse_in_every_mode():
    for mode in ALL_MODES:
        alloc = build_allocation(PARAMS, mode)
        assert_allclose(alloc.A @ alloc.A_pinv, np.eye(4), atol=1e-12)


def test_round_trip_random_wrenches_all_modes():
    rng = np.random.default_rng(22)
    for mode in ALL_MODES:
        alloc = build_allocation(PARAMS, mode)
        for _ in range(100):
            w = random_wrench(rng)
            fd = allocate_decomposition(w, PARAMS, mode)
            assert len(fd.entries) == len(mode.decomposition_columns())
            assert_allclose(alloc.A @ fd.as_array(), w.vector(), atol=1e-9)


def test_bicopter_determinant_formula():
    A = build_allocation(PARAMS, FailureMode.both_bottom_out()).A
    expected = 4.0 * PARAMS.b1 * (PARAMS.l ** 2 + PARAMS.k_r ** 2)
    assert abs(np.linalg.det(A) - expected) < 1e-12
    assert abs(expected - 0.03826177129200001) < 1e-15

    rng = np.random.default_rng(23)
    for _ in range(100):
        params = random_params(rng)
        A = build_allocation(params, FailureMode.both_bottom_out()).A
        expected = 4.0 * params.b1 * (params.l ** 2 + params.k_r ** 2)
        assert abs(np.linalg.det(A) - expected) < 1e-12


def test_single_failure_pinv_frozen_entry():
    # the lateral slots answer pitch torque with exactly 1 / (2 b1), the same
    # response the nominal matrix has; losing a bottom rotor does not move it
    alloc = build_allocation(PARAMS, FailureMode.one_bottom_out(4))
    assert abs(alloc.A_pinv[1, 2] - 3.3697263782180804) < 1e-12
    assert abs(alloc.A_pinv[1, 2] - 1.0 / (2.0 * PARAMS.b1)) < 1e-12


def test_allocate_hover_nominal():
    w = ReducedWrench(Fz=49.0, tau=(0.0, 0.0, 0.0))
    u, report = allocate(w, PARAMS, FailureMode.nominal())
    assert_allclose(u.thrusts(), [12.25] * 4, atol=1e-12)
    assert u.beta1 == 0.0 and u.beta2 == 0.0
    assert not report.saturated


def test_allocate_hover_both_bottom_out():
    w = ReducedWrench(Fz=49.0, tau=(0.0, 0.0, 0.0))
    u, report = allocate(w, PARAMS, FailureMode.both_bottom_out())
    assert_allclose([u.f1, u.f2], [24.5, 24.5], atol=1e-9)
    assert u.f3 == 0.0 and u.f4 == 0.0
    assert not report.saturated


def test_allocate_hover_one_bottom_out():
    w = ReducedWrench(Fz=49.0, tau=(0.0, 0.0, 0.0))
    u, report = allocate(w, PARAMS, FailureMode.one_bottom_out(4))
    assert u.f4 == 0.0
    # the surviving bottom rotor carries half the weight, the diagonally
    # opposite tilting rotor picks up the slack
    assert abs(u.f2 / (u.f1 + u.f2 + u.f3 + u.f4) - 0.5) < 0.01
    got = forward_wrench(u, PARAMS)
    assert_allclose([got.F[2], *got.tau], [49.0, 0, 0, 0], atol=1e-9)
    assert not report.saturated


def test_allocate_command_achieves_wrench():
    rng = np.random.default_rng(24)
    for mode in ALL_MODES:
        for _ in range(25):
            w = ReducedWrench(Fz=float(rng.uniform(20.0, 100.0)),
                              tau=tuple(rng.uniform(-2.0, 2.0, size=3)))
            u, report = allocate(w, PARAMS, mode)
            if report.clamped_thrusts:
                continue  # clamping intentionally trades wrench fidelity
            got = forward_wrench(u, PARAMS)
            assert_allclose([got.F[2], *got.tau], w.vector(), atol=1e-9)
            for rotor in mode.failed_rotors:
                assert getattr(u, f"f{rotor}") == 0.0


def test_allocate_reports_negative_bottom_request():
    w = ReducedWrench(Fz=-49.0, tau=(0.0, 0.0, 0.0))
    u, report = allocate(w, PARAMS, FailureMode.nominal())
    assert set(report.clamped_thrusts) == {"f3", "f4"}
    assert u.f3 == 0.0 and u.f4 == 0.0


def test_min_norm_property_holds_for_allocation():
    rng = np.random.default_rng(25)
    for mode in ALL_MODES:
        for _ in range(10):
            w = random_wrench(rng)
            fd = allocate_decomposition(w, PARAMS, mode)
            assert min_norm_check(w, fd, PARAMS, mode,
                                  rng=np.random.default_rng(99))


def test_min_norm_check_rejects_perturbed_solution():
    w = ReducedWrench(Fz=49.0, tau=(0.5, -0.25, 0.1))
    mode = FailureMode.nominal()
    fd = allocate_decomposition(w, PARAMS, mode)
    basis = build_allocation(PARAMS, mode).null_basis
    shifted = ForceDecomposition(
        entries=tuple(fd.as_array() + 3.0 * basis[0]))
    # still a solution, but no longer the smallest one
    assert not min_norm_check(w, shifted, PARAMS, mode,
                              rng=np.random.default_rng(98))


def test_min_norm_check_rejects_non_solution():
    w = ReducedWrench(Fz=49.0, tau=(0.0, 0.0, 0.0))
    bogus = ForceDecomposition(entries=(1.0, 2.0, 3.0, 4.0, 5.0, 6.0))
    with pytest.raises(ValueError, match="solve"):
        min_norm_check(w, bogus, PARAMS, FailureMode.nominal())


def test_min_norm_check_vacuous_for_square_system():
    w = ReducedWrench(Fz=49.0, tau=(1.0, 1.0, 1.0))
    mode = FailureMode.both_bottom_out()
    fd = allocate_decomposition(w, PARAMS, mode)
    assert min_norm_check(w, fd, PARAMS, mode)


def test_degenerate_geometry_raises():
    flat = VehicleParams(m=5.0, g=9.8, l=0.0, b1=0.14838, b2=0.14838,
                         J=(0.366, 0.171, 0.391), k_r=0.0)
    with pytest.raises(RankDeficiencyError):
        build_allocation(flat, FailureMode.nominal())


def test_build_allocation_is_cached():
    a = build_allocation(PARAMS, FailureMode.nominal())
    b = build_allocation(PARAMS, FailureMode.nominal())
    assert a is b
    c = build_allocation(dataclasses.replace(PARAMS, l=0.3),
                         FailureMode.nominal())
    assert c is not a


def test_allocation_arrays_are_read_only():
    alloc = build_allocation(PARAMS, FailureMode.nominal())
    with pytest.raises(ValueError):
        alloc.A[0, 0] = 2.0
    with pytest.raises(ValueError):
        alloc.A_pinv[0, 0] = 2.0


def test_reduced_wrench_vector_order():
    w = ReducedWrench(Fz=1.0, tau=(2.0, 3.0, 4.0))
    assert_allclose(w.vector(), [1.0, 2.0, 3.0, 4.0])
