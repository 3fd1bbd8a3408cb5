import numpy as np
import pytest

import scramblesim.statevector as sv
from scramblesim.floquet import FloquetSpec, lightcone_sites
from scramblesim.otoc import (
    OtocPoint,
    interferometric_expectation,
    interferometric_two_qubit_count,
    normalized,
    operator_averaged,
    otoc_exact,
    otoc_shots,
    site_pauli,
)
from oracles import dense_floquet_unitary, op_on, PAULI

SELF_DUAL = dict(jt=np.pi / 2, bxt=np.pi / 2, bzt=1.3 * np.pi / 2)


def test_idle_drive_disjoint_paulis_commute():
    spec = FloquetSpec(5, **SELF_DUAL)
    val = otoc_exact(spec, 0, site_pauli("Z", 1), site_pauli("X", 4), sv.zero_state(5))
    assert val == pytest.approx(1.0, abs=1e-14)


def test_idle_drive_same_site_anticommutes():
    spec = FloquetSpec(5, **SELF_DUAL)
    val = otoc_exact(spec, 0, site_pauli("Z", 1), site_pauli("X", 1), sv.zero_state(5))
    assert val == pytest.approx(-1.0, abs=1e-14)


def test_matches_dense_evaluation_four_sites():
    spec = FloquetSpec(4, **SELF_DUAL)
    m = 2
    u = np.linalg.matrix_power(dense_floquet_unitary(spec), m)
    o_a = op_on(4, {0: PAULI["Z"]})
    o_d = op_on(4, {2: PAULI["X"]})
    vec = np.zeros(16, dtype=complex)
    vec[0] = 1.0
    expected = vec.conj() @ (
        u.conj().T @ o_d.conj().T @ u @ o_a.conj().T @ u.conj().T @ o_d @ u @ o_a @ vec
    )
    got = otoc_exact(spec, m, site_pauli("Z", 1), site_pauli("X", 3), sv.zero_state(4))
    assert abs(got - expected) < 1e-12


def test_haar_input_dense_oracle_with_y_operators():
    spec = FloquetSpec(3, jt=1.2, bxt=0.9, bzt=0.5)
    m = 3
    u = np.linalg.matrix_power(dense_floquet_unitary(spec), m)
    o_a = op_on(3, {0: PAULI["Y"]})
    o_d = op_on(3, {2: PAULI["Y"]})
    rng = np.random.default_rng(9)
    psi = sv.haar_state(3, rng)
    vec = psi.amplitudes
    expected = vec.conj() @ (
        u.conj().T @ o_d.conj().T @ u @ o_a.conj().T @ u.conj().T @ o_d @ u @ o_a @ vec
    )
    got = otoc_exact(spec, m, site_pauli("Y", 1), site_pauli("Y", 3), psi)
    assert abs(got - expected) < 1e-12


def test_magnitude_bounded_by_one():
    spec = FloquetSpec(6, **SELF_DUAL)
    rng = np.random.default_rng(2)
    for m in range(0, 9, 2):
        psi = sv.haar_state(6, rng)
        val = otoc_exact(spec, m, site_pauli("Z", 1), site_pauli("X", 5), psi)
        assert abs(val) <= 1.0 + 1e-9


def test_causal_plateau_matches_lightcone():
    # the correlator stays exactly 1 until the butterfly cone reaches the
    # measurement site
    spec = FloquetSpec(8, **SELF_DUAL, boundary="open")
    z1 = site_pauli("Z", 1)
    for n in range(2, 9):
        xn = site_pauli("X", n)
        for m in range(7):
            val = otoc_exact(spec, m, z1, xn, sv.zero_state(8))
            if 1 not in lightcone_sites(spec, m, {n}):
                assert val == pytest.approx(1.0, abs=1e-10), (n, m)


def test_late_time_decay_at_maximal_chaos():
    spec = FloquetSpec(10, **SELF_DUAL, boundary="open")
    z1 = site_pauli("Z", 1)
    for n in range(1, 6):
        xn = site_pauli("X", n)
        vals = [
            abs(otoc_exact(spec, m, z1, xn, sv.zero_state(10))) for m in range(10, 21)
        ]
        assert np.mean(vals) < 0.1, n


def test_shot_estimates_track_exact_values():
    spec = FloquetSpec(4, **SELF_DUAL)
    z1, x3 = site_pauli("Z", 1), site_pauli("X", 3)
    rng = np.random.default_rng(0)
    for m in (0, 2, 4, 6):
        exact = otoc_exact(spec, m, z1, x3, sv.zero_state(4)).real
        point = otoc_shots(spec, m, z1, x3, sv.zero_state(4), 10**6, rng, m)
        tol = 4 * max(point.stderr, 1e-3)
        assert abs(np.real(point.value) - exact) < tol


def test_deterministic_outcomes_have_zero_stderr():
    spec = FloquetSpec(4, **SELF_DUAL)
    rng = np.random.default_rng(1)
    point = otoc_shots(
        spec, 0, site_pauli("Z", 1), site_pauli("X", 3), sv.zero_state(4), 500, rng
    )
    assert point.value == 1.0 and point.stderr == 0.0
    point = otoc_shots(
        spec, 0, site_pauli("Z", 1), site_pauli("X", 1), sv.zero_state(4), 500, rng
    )
    assert point.value == -1.0 and point.stderr == 0.0


def test_operator_average_idle_values():
    spec = FloquetSpec(4, **SELF_DUAL)
    assert operator_averaged(spec, 0, 1, 3) == pytest.approx(1.0, abs=1e-12)
    # same site: 6 of the 16 Pauli pairs anticommute
    assert operator_averaged(spec, 0, 2, 2) == pytest.approx(0.25, abs=1e-12)


def test_operator_average_input_modes():
    spec = FloquetSpec(3, **SELF_DUAL)
    zero = operator_averaged(spec, 2, 1, 3, input_mode="zero")
    mixed = operator_averaged(spec, 2, 1, 3, input_mode="mixed")
    assert -1.0 <= zero <= 1.0 and -1.0 <= mixed <= 1.0
    with pytest.raises(ValueError):
        operator_averaged(spec, 1, 1, 3, input_mode="thermal")
    with pytest.raises(ValueError):
        operator_averaged(spec, 1, 0, 3)


def test_normalized_point_arithmetic():
    raw = OtocPoint(3, 5, 0.8, 0.01)
    norm = OtocPoint(3, 5, 1.0, 0.0)
    out = normalized(raw, norm)
    assert out.value == pytest.approx(0.8)
    assert out.stderr == pytest.approx(0.01)
    assert out.valid


def test_normalized_cancels_global_rescaling_exactly():
    # a fidelity factor f^2 multiplying both runs drops out of the ratio
    f2 = 0.8464
    ideal = -0.37
    out = normalized(OtocPoint(2, 7, f2 * ideal), OtocPoint(2, 7, f2))
    assert out.value == pytest.approx(ideal, abs=1e-15)


def test_normalized_flags_vanishing_reference():
    out = normalized(OtocPoint(1, 1, 0.5, 0.1), OtocPoint(1, 1, 1e-9, 0.1))
    assert not out.valid
    assert out.value == 0.5  # untouched raw value travels with the flag


def test_normalized_error_propagation():
    raw = OtocPoint(1, 1, 0.6, 0.02)
    norm = OtocPoint(1, 1, 0.9, 0.03)
    out = normalized(raw, norm)
    expected = np.hypot(0.02 / 0.9, 0.6 * 0.03 / 0.81)
    assert out.stderr == pytest.approx(expected)


@pytest.mark.parametrize("n,m,site_d", [(4, 2, 3), (5, 3, 4), (6, 2, 5)])
def test_interferometer_construction_matches_direct_path(n, m, site_d):
    spec = FloquetSpec(n, **SELF_DUAL)
    z1, xd = site_pauli("Z", 1), site_pauli("X", site_d)
    start = sv.zero_state(n)
    direct = otoc_exact(spec, m, z1, xd, start)
    circuit = interferometric_expectation(spec, m, z1, xd, start)
    assert abs(circuit - direct) < 1e-12
    # dropping the first controlled block is legal when the measure operator
    # stabilizes the input
    dropped = interferometric_expectation(
        spec, m, z1, xd, start, include_initial_control=False
    )
    assert abs(dropped - direct) < 1e-12


def test_interferometer_construction_haar_input_complex_value():
    spec = FloquetSpec(4, jt=1.0, bxt=0.6, bzt=0.9)
    rng = np.random.default_rng(12)
    psi = sv.haar_state(4, rng)
    z2, x4 = site_pauli("Z", 2), site_pauli("X", 4)
    direct = otoc_exact(spec, 2, z2, x4, psi)
    circuit = interferometric_expectation(spec, 2, z2, x4, psi)
    assert abs(circuit - direct) < 1e-12
    assert abs(direct.imag) > 1e-3  # the check exercises the Y readout


def test_interferometric_gate_count_convention():
    # Published figure for the 19-site, 15-cycle interferometer: 367 gates,
    # maximal at butterfly sites 10 and 11. Our compiled-circuit convention
    # (butterfly-cone cancellation plus measurement-cone pruning) reproduces
    # the location of the maximum but counts 397; the published 367 matches
    # no cancellation convention we could construct, so the discrepancy is
    # documented here rather than absorbed into the counter.
    spec = FloquetSpec(19, **SELF_DUAL, boundary="open")
    counts = {n: interferometric_two_qubit_count(spec, 15, n) for n in range(1, 13)}
    peak = max(counts.values())
    assert {n for n, c in counts.items() if c == peak} == {10, 11}
    assert peak == 397
    assert counts[4] == 367  # closest published-value sighting, off-peak
    # monotone-ish sanity: count grows from the measured edge to the middle
    assert counts[1] < counts[6] <= peak
    # the two controlled blocks variant adds exactly one gate
    assert (
        interferometric_two_qubit_count(spec, 15, 10, include_initial_control=True)
        == peak + 1
    )
