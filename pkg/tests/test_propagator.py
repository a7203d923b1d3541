import numpy as np
import pytest

from tripodholo import (
    Harmonics,
    PropagationSettings,
    canonical_angle,
    evolve_lab,
    evolve_moving,
    evolve_to_nominal,
    extract_logical_gate,
    fourier_path,
    gate_from_connection,
    latitude_loop,
    lune_path,
    r_rotation,
    solid_angle,
    step_unitary,
    timing_mismatch_error,
)
from tripodholo.propagator import dark_basis_matrix


def constant_path(theta0=1.1, phi0=0.4, r0=1.3):
    return fourier_path(
        Harmonics(offset=theta0),
        Harmonics(offset=phi0, slope=0.0),
        Harmonics(offset=r0),
    )


GENERIC_FOURIER = fourier_path(
    Harmonics(offset=1.2, sin=(0.25,), cos=(0.0, 0.1)),
    Harmonics(offset=0.0, slope=2 * np.pi, sin=(0.2,)),
    Harmonics(offset=1.0, slope=0.5),
)


def test_settings_validation():
    with pytest.raises(ValueError):
        PropagationSettings(epsilon=0.0)
    with pytest.raises(ValueError):
        PropagationSettings(epsilon=0.1, steps_per_unit_time=0)
    with pytest.raises(ValueError):
        PropagationSettings(epsilon=0.1, frame="rotating")


def test_constant_path_matches_single_step():
    path = constant_path()
    settings = PropagationSettings(epsilon=0.1)
    u = evolve_lab(path, settings)
    expected = step_unitary(path.x(0.0), 10.0)
    assert np.linalg.norm(u - expected) < 1e-12
    v = evolve_moving(path, settings)
    assert np.linalg.norm(v - expected) < 1e-12


def test_unitarity_after_propagation():
    for path in (latitude_loop(np.pi / 3), lune_path(np.pi / 2, 1e-3), GENERIC_FOURIER):
        u = evolve_lab(path, PropagationSettings(epsilon=0.05))
        assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-9


def test_step_halving_second_order():
    path = latitude_loop(1.0, 1.0)
    blocks = []
    for spu in (20, 40, 80):
        u = evolve_lab(path, PropagationSettings(epsilon=0.05, steps_per_unit_time=spu))
        blocks.append(extract_logical_gate(u, path).block)
    d1 = np.linalg.norm(blocks[0] - blocks[1])
    d2 = np.linalg.norm(blocks[1] - blocks[2])
    assert 2.5 < d1 / d2 < 6.0


def test_frame_duality_three_families():
    for path in (latitude_loop(np.pi / 3), lune_path(np.pi / 2, 1e-3), GENERIC_FOURIER):
        settings = PropagationSettings(epsilon=0.05, steps_per_unit_time=2500)
        u = evolve_lab(path, settings)
        v = evolve_moving(path, settings)
        r1 = r_rotation(path, 1.0).astype(complex)
        assert np.linalg.norm(v - r1 @ u) < 1e-6


def test_extract_identity_and_synthetic_rotation():
    path = latitude_loop(1.0, 1.0)
    gate = extract_logical_gate(np.eye(4, dtype=complex), path)
    assert np.allclose(gate.block, np.eye(2))
    assert gate.leakage == pytest.approx(0.0, abs=1e-14)
    assert gate.angle_estimate == pytest.approx(0.0)
    assert not gate.adiabaticity_lost

    basis = dark_basis_matrix(path)
    omega = 0.77
    e_th, e_ph = basis[:, 0], basis[:, 1]
    # dark-plane rotation with the same orientation as the gate matrix
    # [[cos, sin], [-sin, cos]] in the (e_theta, e_phi) basis
    generator = np.outer(e_th, e_ph) - np.outer(e_ph, e_th)
    u = np.eye(4) + np.sin(omega) * generator + (1 - np.cos(omega)) * generator @ generator
    gate = extract_logical_gate(u.astype(complex), path)
    assert gate.leakage == pytest.approx(0.0, abs=1e-12)
    assert gate.angle_estimate == pytest.approx(omega, abs=1e-12)
    flipped = extract_logical_gate(u.conj().T, path)
    assert flipped.angle_estimate == pytest.approx(-omega, abs=1e-12)


def test_extraction_flags_heavy_leakage():
    path = latitude_loop(1.0, 1.0)
    basis = dark_basis_matrix(path)
    e_th = basis[:, 0]
    sd_other = np.eye(4, dtype=complex)
    # swap the dark vector with the ground state: all population leaves
    e0 = np.zeros(4)
    e0[0] = 1.0
    swap = np.eye(4) - np.outer(e_th, e_th) - np.outer(e0, e0)
    swap = swap + np.outer(e_th, e0) + np.outer(e0, e_th)
    gate = extract_logical_gate((sd_other @ swap).astype(complex), path)
    assert gate.leakage > 0.4
    assert gate.adiabaticity_lost


def test_extracted_angle_converges_to_solid_angle_with_sign():
    path = latitude_loop(1.0, 1.0)
    omega = solid_angle(path).omega_canonical
    assert omega == pytest.approx(2 * np.pi * np.cos(1.0) - 2 * np.pi)
    errors = []
    for eps in (0.05, 0.025, 0.0125):
        u = evolve_lab(path, PropagationSettings(epsilon=eps, steps_per_unit_time=40))
        gate = extract_logical_gate(u, path)
        errors.append(abs(canonical_angle(gate.angle_estimate - omega)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[-1] < 0.02
    # the opposite sign convention is excluded by a wide margin
    assert abs(canonical_angle(gate.angle_estimate + omega)) > 0.4


def test_moving_frame_same_extracted_gate():
    path = latitude_loop(np.pi / 3, 1.0)
    settings = PropagationSettings(epsilon=0.02, steps_per_unit_time=100)
    gu = extract_logical_gate(evolve_lab(path, settings), path)
    gv = extract_logical_gate(evolve_moving(path, settings), path)
    assert np.linalg.norm(gu.block - gv.block) < 1e-6


def test_r_profile_independence_of_extracted_angle():
    eps = 0.025
    settings = PropagationSettings(epsilon=eps, steps_per_unit_time=40)
    varying = GENERIC_FOURIER
    flat = fourier_path(
        Harmonics(offset=1.2, sin=(0.25,), cos=(0.0, 0.1)),
        Harmonics(offset=0.0, slope=2 * np.pi, sin=(0.2,)),
        Harmonics(offset=1.0),
    )
    ga = extract_logical_gate(evolve_lab(flat, settings), flat)
    gb = extract_logical_gate(evolve_lab(varying, settings), varying)
    assert abs(canonical_angle(ga.angle_estimate - gb.angle_estimate)) < 5 * eps


def test_evolve_to_nominal_zero_mismatch_is_exact():
    path = latitude_loop(np.pi / 3, 1.0)
    settings = PropagationSettings(epsilon=0.01)
    assert np.array_equal(evolve_to_nominal(path, settings, 0.0),
                          evolve_lab(path, settings))
    with pytest.raises(ValueError):
        evolve_to_nominal(path, settings, 60.0)


def test_timing_error_linear_in_mismatch():
    path = latitude_loop(np.pi / 3, 1.0)
    e1 = timing_mismatch_error(path, 400.0, 1.0)
    e2 = timing_mismatch_error(path, 400.0, 2.0)
    assert e2 / e1 == pytest.approx(2.0, rel=0.05)


def test_timing_error_matches_first_order_prediction():
    # Leading order: the residual frame rotation at the nominal stop time,
    # applied to the partially accumulated ideal gate.
    path = latitude_loop(np.pi / 3, 1.0)
    t0, d_t = 400.0, 1.0
    measured = timing_mismatch_error(path, t0, d_t)
    s0 = t0 / (t0 + d_t)
    basis = dark_basis_matrix(path).astype(complex)
    omega_full = solid_angle(path).omega_cos
    from tripodholo.holonomy import ideal_gate

    pred = np.linalg.norm(
        r_rotation(path, s0).T.astype(complex) @ basis @ ideal_gate(omega_full * s0).matrix
        - basis @ ideal_gate(omega_full).matrix)
    assert measured == pytest.approx(pred, rel=0.05)
