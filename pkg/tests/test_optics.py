"""Tests for optical elements, circuit composition, and state transformation."""

import json
import math

import numpy as np
import pytest

from bellforge.optics import (
    HWP,
    PBS,
    PDBS,
    Circuit,
    Hadamard,
    ModeUnitary,
    PauliX,
    PauliZ,
    PhaseShifter,
    Swap,
    apply,
    circuit_from_json,
    circuit_to_json,
    compose,
    element_unitary,
    haar_unitary,
)
from bellforge.states import H, V, PhotonMode, make_bell_pairs


def test_mode_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        ModeUnitary(np.ones((4, 4)))
    with pytest.raises(ValueError):
        ModeUnitary(np.eye(3))


def test_pdbs_single_photon_amplitudes():
    # A V photon in mode 1 stays with amplitude sqrt(1/3) and crosses with
    # amplitude -sqrt(2/3); an H photon passes untouched.
    U = element_unitary(PDBS(1.0, 1 / 3, (1, 2)), 2).matrix
    v1 = PhotonMode(1, V).flat_index(2)
    v2 = PhotonMode(2, V).flat_index(2)
    h1 = PhotonMode(1, H).flat_index(2)
    assert U[v1, v1] == pytest.approx(math.sqrt(1 / 3))
    assert abs(U[v2, v1]) == pytest.approx(math.sqrt(2 / 3))
    assert abs(U[v1, v2]) == pytest.approx(math.sqrt(2 / 3))
    assert U[v2, v1] == pytest.approx(-U[v1, v2])
    assert U[h1, h1] == pytest.approx(1.0)


def test_pdbs_full_transmission_is_identity():
    U = element_unitary(PDBS(1.0, 1.0, (1, 2)), 2).matrix
    np.testing.assert_allclose(U, np.eye(4))


def test_pdbs_rejects_out_of_range_transmittance():
    with pytest.raises(ValueError):
        PDBS(1.2, 0.5, (1, 2))
    with pytest.raises(ValueError):
        PDBS(0.5, -0.1, (1, 2))
    with pytest.raises(ValueError):
        PDBS(0.5, 0.5, (1, 1))


def test_pbs_equals_pdbs_1_0():
    a = element_unitary(PBS((1, 2)), 3).matrix
    b = element_unitary(PDBS(1.0, 0.0, (1, 2)), 3).matrix
    np.testing.assert_allclose(a, b)


def test_hwp_quarter_turn_is_x():
    U = element_unitary(HWP(math.pi / 4, 1), 2).matrix
    X = element_unitary(PauliX(1), 2).matrix
    np.testing.assert_allclose(U, X, atol=1e-15)
    assert U[0, 1] == pytest.approx(1.0)
    assert U[1, 0] == pytest.approx(1.0)


def test_hwp_eighth_turn_is_hadamard():
    U = element_unitary(HWP(math.pi / 8, 1), 2).matrix
    Hd = element_unitary(Hadamard(1), 2).matrix
    np.testing.assert_allclose(U, Hd, atol=1e-15)


def test_pauli_z_is_pi_phase_on_v():
    a = element_unitary(PauliZ(2), 2).matrix
    b = element_unitary(PhaseShifter(math.pi, 2, "V"), 2).matrix
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_phase_shifter_both_polarizations():
    U = element_unitary(PhaseShifter(0.7, 1, "both"), 2).matrix
    assert U[0, 0] == pytest.approx(np.exp(0.7j))
    assert U[1, 1] == pytest.approx(np.exp(0.7j))
    assert U[2, 2] == pytest.approx(1.0)


@pytest.mark.parametrize("L", [2, 3, 4])
def test_every_element_is_unitary(L):
    rng = np.random.default_rng(2024)
    elements = [
        PDBS(rng.uniform(), rng.uniform(), (1, 2)),
        PDBS(rng.uniform(), rng.uniform(), (1, L)),
        PBS((1, 2)),
        HWP(rng.uniform(-math.pi, math.pi), 1),
        Hadamard(2),
        PhaseShifter(rng.uniform(-math.pi, math.pi), 1, "H"),
        PhaseShifter(rng.uniform(-math.pi, math.pi), 2, "both"),
        PauliX(1),
        PauliZ(2),
        Swap((1, 2)),
    ]
    for e in elements:
        U = element_unitary(e, L).matrix
        defect = np.max(np.abs(U.conj().T @ U - np.eye(2 * L)))
        assert defect <= 1e-10


def test_compose_empty_is_identity():
    U = compose(Circuit(2, ()))
    np.testing.assert_allclose(U.matrix, np.eye(4))


def test_compose_double_x_is_identity():
    U = compose(Circuit(2, (PauliX(1), PauliX(1))))
    np.testing.assert_allclose(U.matrix, np.eye(4), atol=1e-15)


def test_compose_matches_dense_matrix_product():
    # Oracle: square the single-element matrix densely.
    e = PDBS(1.0, 1 / 3, (1, 2))
    single = element_unitary(e, 2).matrix
    twice = compose(Circuit(2, (e, e)))
    np.testing.assert_allclose(twice.matrix, single @ single, atol=1e-14)


def test_compose_applies_in_temporal_order():
    # X then Z on the same mode is the matrix product Z @ X, not X @ Z.
    U = compose(Circuit(2, (PauliX(1), PauliZ(1)))).matrix
    Zm = element_unitary(PauliZ(1), 2).matrix
    Xm = element_unitary(PauliX(1), 2).matrix
    np.testing.assert_allclose(U, Zm @ Xm, atol=1e-15)
    assert not np.allclose(U, Xm @ Zm)


def test_circuit_rejects_mode_overflow():
    with pytest.raises(ValueError):
        Circuit(2, (PDBS(0.5, 0.5, (1, 3)),))
    with pytest.raises(ValueError):
        element_unitary(PauliX(5), 2)


def test_apply_identity_leaves_state():
    state = make_bell_pairs(2)
    out = apply(ModeUnitary(np.eye(4)), state)
    np.testing.assert_allclose(out.blocks, state.blocks)


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(ModeUnitary(np.eye(6)), make_bell_pairs(2))


def test_apply_preserves_norm_on_random_unitaries():
    rng = np.random.default_rng(11)
    state = make_bell_pairs(2)
    for _ in range(100):
        U = ModeUnitary(haar_unitary(4, rng))
        out = apply(U, state)
        assert out.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_apply_is_congruence_homomorphism():
    rng = np.random.default_rng(12)
    state = make_bell_pairs(3)
    for _ in range(20):
        U1 = haar_unitary(6, rng)
        U2 = haar_unitary(6, rng)
        seq = apply(ModeUnitary(U2), apply(ModeUnitary(U1), state))
        once = apply(ModeUnitary(U2 @ U1), state)
        np.testing.assert_allclose(seq.blocks, once.blocks, atol=1e-12)


def test_pdbs_equal_transmittance_is_polarization_independent():
    U = element_unitary(PDBS(0.37, 0.37, (1, 2)), 2).matrix
    h_block = U[np.ix_([0, 2], [0, 2])]
    v_block = U[np.ix_([1, 3], [1, 3])]
    np.testing.assert_allclose(h_block, v_block)


def test_circuit_json_round_trip():
    circuit = Circuit(
        4,
        (
            PDBS(1.0, 1 / 3, (1, 3)),
            PBS((1, 2)),
            HWP(0.3, 1),
            Hadamard(2),
            PhaseShifter(1.1, 2, "V"),
            PauliX(1),
            PauliZ(2),
            Swap((3, 4)),
        ),
    )
    data = json.loads(json.dumps(circuit_to_json(circuit)))
    back = circuit_from_json(data)
    assert back == circuit


def test_circuit_json_validates():
    with pytest.raises(ValueError):
        circuit_from_json({"L": 2, "elements": [{"kind": "PDBS", "tH": 2.0, "tV": 0.5, "modes": [1, 2]}]})
    with pytest.raises(ValueError):
        circuit_from_json({"L": 2, "elements": [{"kind": "Mystery"}]})
