"""Tests for mode labels, two-photon states, targets, and the network state."""

import json
import math

import numpy as np
import pytest

from bellforge.states import (
    H,
    V,
    FourQubitPureState,
    JointState,
    PhotonMode,
    Target,
    TwoPhotonState,
    make_bell_pairs,
    overlap,
    target_state,
)

S2 = math.sqrt(2)


def test_photon_mode_flat_index():
    assert PhotonMode(1, H).flat_index(2) == 0
    assert PhotonMode(1, V).flat_index(2) == 1
    assert PhotonMode(2, H).flat_index(2) == 2
    assert PhotonMode(3, V).flat_index(4) == 5


def test_photon_mode_rejects_bad_indices():
    with pytest.raises(ValueError):
        PhotonMode(0, H)
    with pytest.raises(ValueError):
        PhotonMode(3, H).flat_index(2)


def test_two_photon_state_is_exactly_symmetric():
    rng = np.random.default_rng(7)
    C = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    state = TwoPhotonState(2, C)
    assert np.array_equal(state.amps, state.amps.T)


def test_norm_convention_distinct_modes():
    # One photon in each of two distinct modes with C entries 1/2 has unit norm.
    state = TwoPhotonState.from_pair(2, PhotonMode(1, H), PhotonMode(2, H))
    assert state.amps[0, 2] == pytest.approx(0.5)
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-14)


def test_norm_convention_double_occupation():
    state = TwoPhotonState.from_pair(2, PhotonMode(1, V), PhotonMode(1, V))
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-14)
    assert state.pair_amplitude(PhotonMode(1, V), PhotonMode(1, V)) == pytest.approx(1.0)


def test_make_bell_pairs_block_amplitudes():
    state = make_bell_pairs(2)
    # Block (H,H): one photon in (1,H), one in (2,H), physical amplitude 1/2.
    amp = state.block(H, H).pair_amplitude(PhotonMode(1, H), PhotonMode(2, H))
    assert amp == pytest.approx(0.5)
    amp_vv = state.block(V, V).pair_amplitude(PhotonMode(1, V), PhotonMode(2, V))
    assert amp_vv == pytest.approx(0.5)


def test_make_bell_pairs_normalized():
    assert make_bell_pairs(2).norm_squared() == pytest.approx(1.0, abs=1e-14)
    assert make_bell_pairs(2).is_normalized()


def test_make_bell_pairs_independent_of_mode_count():
    # Brute-force enumeration of occupied basis pairs: every nonzero entry of
    # every L=4 block must match the L=2 block, and modes 3,4 stay empty.
    small = make_bell_pairs(2)
    large = make_bell_pairs(4)
    for s1 in (0, 1):
        for s4 in (0, 1):
            big = large.blocks[s1, s4]
            occupied = [(i, j) for i in range(8) for j in range(8) if big[i, j] != 0]
            for i, j in occupied:
                assert i < 4 and j < 4
                assert big[i, j] == small.blocks[s1, s4][i, j]
    assert large.norm_squared() == pytest.approx(1.0, abs=1e-14)


def test_make_bell_pairs_rejects_single_mode():
    with pytest.raises(ValueError):
        make_bell_pairs(1)


def test_target_states_unit_norm_and_distinct():
    states = [target_state(name) for name in Target]
    for s in states:
        assert abs(s.norm() - 1.0) <= 1e-12
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            assert np.linalg.norm(states[i].amps - states[j].amps) > 1e-6


def test_target_state_spot_amplitudes():
    assert target_state("C4").amp(V, V, V, V) == pytest.approx(-0.5)
    assert target_state("D4_2").amp(H, H, V, V) == pytest.approx(1 / math.sqrt(6))
    assert target_state("Chi").amp(H, H, V, V) == pytest.approx(-1 / (2 * S2))
    assert target_state("GHZ4").amp(H, H, H, H) == pytest.approx(1 / S2)
    assert target_state("W4").amp(V, H, H, H) == pytest.approx(0.5)
    assert target_state("BellPairs_13_24").amp(H, V, H, V) == pytest.approx(0.5)
    assert target_state("BellPairs_14_23").amp(H, V, V, H) == pytest.approx(0.5)


def test_target_state_unknown_name():
    with pytest.raises(ValueError):
        target_state("C5")


def _overlap_by_sum(a, b):
    # Independent oracle: direct 16-term sum.
    total = 0.0 + 0.0j
    for k in range(16):
        total += a.amps[k].conjugate() * b.amps[k]
    return total


def test_overlap_examples():
    c4 = target_state("C4")
    ghz = target_state("GHZ4")
    assert overlap(c4, c4) == pytest.approx(1.0)
    assert overlap(ghz, c4) == pytest.approx(_overlap_by_sum(ghz, c4))
    assert overlap(ghz, c4) == pytest.approx(0.0, abs=1e-15)
    chi = target_state("Chi")
    bell = target_state("BellPairs_14_23")
    assert overlap(bell, chi) == pytest.approx(1 / S2)


def test_overlap_conjugate_linear_first_argument():
    a = FourQubitPureState(np.arange(16) * (0.3 + 0.1j))
    b = FourQubitPureState(np.arange(16)[::-1] * (0.2 - 0.4j))
    z = 0.5 + 0.25j
    scaled = FourQubitPureState(z * a.amps)
    assert overlap(scaled, b) == pytest.approx(z.conjugate() * overlap(a, b))


def test_four_qubit_state_normalized_flag():
    with pytest.raises(ValueError):
        FourQubitPureState(np.ones(16), normalized=True)
    ok = FourQubitPureState(np.ones(16) / 4.0, normalized=True)
    assert ok.normalized


def test_four_qubit_state_json_round_trip():
    chi = target_state("Chi")
    data = json.loads(json.dumps(chi.to_json()))
    back = FourQubitPureState.from_json(data, normalized=True)
    np.testing.assert_allclose(back.amps, chi.amps)


def test_joint_state_json_round_trip():
    state = make_bell_pairs(3)
    data = json.loads(json.dumps(state.to_json()))
    back = JointState.from_json(data)
    assert back.L == 3
    np.testing.assert_allclose(back.blocks, state.blocks)


def test_from_register_state_matches_bell_loading():
    # Loading the relabeled initial product state reproduces make_bell_pairs.
    amps = np.zeros(16, dtype=complex)
    for s1 in (0, 1):
        for s4 in (0, 1):
            amps[8 * s1 + 4 * s1 + 2 * s4 + s4] = 0.5
    loaded = JointState.from_register_state(FourQubitPureState(amps, normalized=True), L=2)
    np.testing.assert_allclose(loaded.blocks, make_bell_pairs(2).blocks)
