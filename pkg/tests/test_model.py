"""Static model: operators, spectrum, resonant pair selection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kicked_lmg import (
    ModelParams,
    SpectrumError,
    StaticSpectrum,
    build_h0,
    build_spin_matrices,
    build_static_spectrum,
    calibrate_tau,
    coherent_state,
    compute_spectrum,
    hbar_eff,
    parity_operator,
    quantum_period,
    resonance_spec,
    select_index_by_energy,
    select_resonant_index,
)

from conftest import INDEX_TABLE, PERIOD_TABLE

TWO_PI = 2.0 * math.pi


def test_spin_half_is_pauli_over_two():
    ops = build_spin_matrices(0.5)
    assert np.allclose(ops.jx, [[0.0, 0.5], [0.5, 0.0]], atol=1e-15)
    assert np.allclose(ops.jy, [[0.0, 0.5j], [-0.5j, 0.0]], atol=1e-15)
    assert np.allclose(ops.jz, [[-0.5, 0.0], [0.0, 0.5]], atol=1e-15)


def test_spin_one_h0_matrix_literal():
    # omega0 Jz + gamma_x Jx^2 at J=1 works out by hand
    ops = build_spin_matrices(1.0)
    h0 = build_h0(ops, ModelParams(j=1.0))
    expect = np.array(
        [[-1.475, 0.0, -0.475], [0.0, -0.95, 0.0], [-0.475, 0.0, 0.525]]
    )
    assert np.allclose(h0, expect, atol=1e-15)
    spec = build_static_spectrum(h0, parity_operator(1.0))
    assert np.allclose(
        spec.energies, [-1.58207949389124, -0.95, 0.63207949389124], atol=1e-10
    )


@given(two_j=st.integers(min_value=1, max_value=40))
@settings(max_examples=25, deadline=None)
def test_angular_momentum_algebra(two_j):
    j = two_j / 2.0
    ops = build_spin_matrices(j)
    comm = ops.jx @ ops.jy - ops.jy @ ops.jx
    assert np.abs(comm - 1j * ops.jz).max() < 1e-12 * max(j, 1.0)
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.abs(casimir - j * (j + 1) * np.eye(ops.dim)).max() < 1e-10 * max(j * j, 1.0)


def test_parity_operator_alternates_sign():
    p = parity_operator(1.5)
    assert np.allclose(p, np.diag([1.0, -1.0, 1.0, -1.0]))


def test_spectrum_ascending_parity_alternating():
    spec = compute_spectrum(ModelParams(j=30.0))
    assert np.all(np.diff(spec.energies) > 0)
    # neighboring levels never share parity in this spectrum range
    assert np.all(spec.parities[1:] * spec.parities[:-1] == -1)


def test_spectrum_orthonormal_and_parity_commutes():
    params = ModelParams(j=30.0)
    spec = compute_spectrum(params)
    gram = spec.states.T @ spec.states
    assert np.abs(gram - np.eye(spec.dim)).max() < 1e-10
    ops = build_spin_matrices(30.0)
    h0 = build_h0(ops, params)
    pi = parity_operator(30.0)
    assert np.abs(h0 @ pi - pi @ h0).max() < 1e-12
    assert abs(np.trace(h0) - spec.energies.sum()) < 1e-10 * np.abs(h0).max()


def test_spectrum_build_is_bit_identical():
    a = compute_spectrum(ModelParams(j=60.0))
    b = compute_spectrum(ModelParams(j=60.0))
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.states, b.states)


def test_degenerate_spectrum_rejected():
    with pytest.raises(SpectrumError):
        build_static_spectrum(np.eye(2), np.diag([1.0, -1.0]))


def test_parity_mixing_rejected():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(SpectrumError):
        build_static_spectrum(h, np.diag([1.0, -1.0]))


def test_parity_selection_rule():
    # the kick generator only couples levels of opposite parity, so
    # first neighbors couple and second neighbors do not
    spec = compute_spectrum(ModelParams(j=30.0))
    ops = build_spin_matrices(30.0)
    jx_eig = spec.states.T @ ops.jx @ spec.states
    first = np.abs(np.diagonal(jx_eig, offset=1))
    second = np.abs(np.diagonal(jx_eig, offset=2))
    assert first.min() > 1e-6
    assert second.max() < 1e-10


def test_period_table_reproduced_spot():
    spec = compute_spectrum(ModelParams(j=30.0))
    for r, ref in ((1, PERIOD_TABLE[30.0][0]), (2, PERIOD_TABLE[30.0][1])):
        k = select_resonant_index(spec, 8.0, r)
        assert k == INDEX_TABLE[30.0][r - 1]
        assert abs(calibrate_tau(spec, k, r, 1) - ref) / ref < 1e-10


def test_resonant_index_and_calibration_j300(spectrum_j300):
    assert select_resonant_index(spectrum_j300, 8.0, 1) == 140
    assert select_resonant_index(spectrum_j300, 8.0, 2) == 139
    t1 = calibrate_tau(spectrum_j300, 140, 1, 1)
    t2 = calibrate_tau(spectrum_j300, 139, 2, 1)
    assert abs(t1 - 7.998978076540702) / 8.0 < 1e-10
    assert abs(t2 - 4.004682359106553) / 4.0 < 1e-10
    # s multiplies the calibrated period linearly
    assert calibrate_tau(spectrum_j300, 140, 1, 3) == pytest.approx(3 * t1, rel=1e-15)


def test_quantum_period_definition(spectrum_j300):
    e = spectrum_j300.energies
    assert quantum_period(spectrum_j300, 139, 2) == pytest.approx(
        TWO_PI / (e[141] - e[139]), rel=1e-15
    )
    with pytest.raises(ValueError):
        quantum_period(spectrum_j300, spectrum_j300.dim - 1, 1)
    with pytest.raises(ValueError):
        quantum_period(spectrum_j300, 0, 0)


def test_energy_rule_is_locally_optimal(spectrum_j300):
    e_r = -0.723276
    k = select_index_by_energy(spectrum_j300, 300.0, e_r)
    scaled = spectrum_j300.energies / 300.0
    assert abs(scaled[k] - e_r) <= abs(scaled[k - 1] - e_r)
    assert abs(scaled[k] - e_r) <= abs(scaled[k + 1] - e_r)


def test_energy_rule_tie_break_prefers_smaller_index():
    energies = np.array([0.0, 1.0, 3.0, 4.0])
    fake = StaticSpectrum(
        energies=energies, states=np.eye(4), parities=np.array([1, -1, 1, -1])
    )
    assert select_index_by_energy(fake, 1.0, 2.0) == 1


def test_resonance_spec_bundles_selection(spectrum_j300):
    rs = resonance_spec(spectrum_j300, 2, 1, 8.0, e_r=-0.723276)
    assert rs.k_R == 139
    assert rs.tau_q == pytest.approx(4.004682359106553, rel=1e-10)
    assert rs.E_R == -0.723276


def test_uncoupled_limit_linear_ladder():
    # gamma_x = 0 leaves a pure Jz ladder with spacing omega0
    spec = compute_spectrum(ModelParams(j=5.0, omega0=2.0, gamma_x=0.0))
    assert np.allclose(np.diff(spec.energies), 2.0, atol=1e-12)
    k = select_resonant_index(spec, TWO_PI / 2.0, 1)
    assert calibrate_tau(spec, k, 1, 1) == pytest.approx(TWO_PI / 2.0, rel=1e-14)


def test_hbar_eff_inverse_spin():
    assert hbar_eff(300.0) == pytest.approx(1.0 / 300.0, rel=1e-15)


def test_validate_spin_rejects_bad_values():
    with pytest.raises(ValueError):
        build_spin_matrices(0.3)
    with pytest.raises(ValueError):
        build_spin_matrices(-2.0)


@given(
    phi=st.floats(min_value=-3.0, max_value=3.0),
    z=st.floats(min_value=-0.95, max_value=0.95),
)
@settings(max_examples=20, deadline=None)
def test_coherent_state_centroid(phi, z):
    j = 40.0
    ops = build_spin_matrices(j)
    psi = coherent_state(j, phi, z)
    assert abs(np.vdot(psi, psi) - 1.0) < 1e-12
    assert np.vdot(psi, ops.jz @ psi).real / j == pytest.approx(z, abs=1e-10)
    sx = np.vdot(psi, ops.jx @ psi).real / j
    assert sx == pytest.approx(math.sqrt(1.0 - z * z) * math.cos(phi), abs=1e-10)


def test_coherent_state_poles_are_extremal_basis_states():
    psi = coherent_state(3.0, 0.7, -1.0)
    expect = np.zeros(7)
    expect[0] = 1.0
    assert np.allclose(np.abs(psi), expect, atol=1e-14)
