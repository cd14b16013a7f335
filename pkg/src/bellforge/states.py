"""Photonic mode labels, two-photon bosonic states, and the four-qubit network state.

The network holds four polarization qubits: nodes 1 and 4 keep their photons
local, while the photons of nodes 2 and 3 travel through a shared passive
optical circuit.  A ``JointState`` therefore factors into a 2x2 grid of
two-photon states, one block per polarization pair (s1, s4) of the outer
qubits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


class Polarization(enum.IntEnum):
    """Photon polarization; H sorts before V in every lexicographic ordering."""

    H = 0
    V = 1


H = Polarization.H
V = Polarization.V

_POLS = (H, V)


@dataclass(frozen=True)
class PhotonMode:
    """One bosonic mode: 1-based spatial index plus polarization."""

    spatial: int
    polarization: Polarization

    def __post_init__(self):
        if self.spatial < 1:
            raise ValueError(f"spatial index must be >= 1, got {self.spatial}")

    def flat_index(self, L: int) -> int:
        """Row/column index of this mode in a (2L)x(2L) mode matrix."""
        if self.spatial > L:
            raise ValueError(f"spatial index {self.spatial} exceeds mode count {L}")
        return 2 * (self.spatial - 1) + int(self.polarization)


def _flat(spatial: int, pol: int) -> int:
    return 2 * (spatial - 1) + pol


class TwoPhotonState:
    """Two-photon bosonic state over L spatial modes and 2 polarizations.

    Stored as the symmetric amplitude matrix C of the expansion
    sum_{m,m'} C[m,m'] b†_m b†_{m'} |vac>.  With this convention the squared
    norm is 2 tr(C†C) (double occupation included: C[m,m] contributes
    2|C[m,m]|^2, matching the sqrt(2) normalization of |2_m>), and a mode
    unitary acts by the congruence C -> U C Uᵀ.
    """

    def __init__(self, L: int, amps: np.ndarray):
        if L < 2:
            raise ValueError(f"mode count must be >= 2, got {L}")
        amps = np.asarray(amps, dtype=complex)
        if amps.shape != (2 * L, 2 * L):
            raise ValueError(f"amplitude matrix must be {2 * L}x{2 * L}, got {amps.shape}")
        self.L = L
        # (C + Cᵀ)/2 is exactly symmetric in floating point.
        self.amps = (amps + amps.T) / 2

    @classmethod
    def zero(cls, L: int) -> "TwoPhotonState":
        return cls(L, np.zeros((2 * L, 2 * L), dtype=complex))

    @classmethod
    def from_pair(cls, L: int, a: PhotonMode, b: PhotonMode, amplitude: complex = 1.0) -> "TwoPhotonState":
        """State ``amplitude * |1_a 1_b>`` (or ``amplitude * |2_a>`` when a == b)."""
        i, j = a.flat_index(L), b.flat_index(L)
        C = np.zeros((2 * L, 2 * L), dtype=complex)
        if i == j:
            C[i, i] = amplitude / math.sqrt(2)
        else:
            C[i, j] = amplitude / 2
            C[j, i] = amplitude / 2
        return cls(L, C)

    def pair_amplitude(self, a: PhotonMode, b: PhotonMode) -> complex:
        """Amplitude of the normalized occupation state |1_a 1_b> (|2_a> if a == b)."""
        i, j = a.flat_index(self.L), b.flat_index(self.L)
        if i == j:
            return math.sqrt(2) * self.amps[i, i]
        return self.amps[i, j] + self.amps[j, i]

    def norm_squared(self) -> float:
        return 2 * float(np.sum(np.abs(self.amps) ** 2))

    def __add__(self, other: "TwoPhotonState") -> "TwoPhotonState":
        if self.L != other.L:
            raise ValueError("mode counts differ")
        return TwoPhotonState(self.L, self.amps + other.amps)

    def scaled(self, factor: complex) -> "TwoPhotonState":
        return TwoPhotonState(self.L, factor * self.amps)


class FourQubitPureState:
    """Pure state of the four node qubits, 16 amplitudes indexed (s1,s2,s3,s4).

    Index order is the node order 1,2,3,4 with H < V, so the flat index of
    amplitude (s1,s2,s3,s4) is 8*s1 + 4*s2 + 2*s3 + s4.
    """

    def __init__(self, amps, normalized: bool = False):
        amps = np.asarray(amps, dtype=complex).reshape(16)
        if normalized:
            n = np.linalg.norm(amps)
            if abs(n - 1.0) > NORM_TOL:
                raise ValueError(f"state flagged normalized but norm is {n!r}")
        self.amps = amps
        self.normalized = normalized

    def amp(self, s1, s2, s3, s4) -> complex:
        return self.amps[8 * int(s1) + 4 * int(s2) + 2 * int(s3) + int(s4)]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "FourQubitPureState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return FourQubitPureState(self.amps / n, normalized=True)

    def to_json(self) -> list:
        """Flat 16-entry array of [re, im] pairs, lexicographic with H < V."""
        return [[float(a.real), float(a.imag)] for a in self.amps]

    @classmethod
    def from_json(cls, data, normalized: bool = False) -> "FourQubitPureState":
        if isinstance(data, dict):
            data = data["amps"]
        if len(data) != 16:
            raise ValueError(f"expected 16 amplitude entries, got {len(data)}")
        amps = [complex(re, im) for re, im in data]
        return cls(amps, normalized=normalized)

    def __repr__(self):
        return f"FourQubitPureState(norm={self.norm():.6g})"


def overlap(a: FourQubitPureState, b: FourQubitPureState) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    return complex(np.vdot(a.amps, b.amps))


class Target(str, enum.Enum):
    """The seven named four-qubit target states."""

    C4 = "C4"
    GHZ4 = "GHZ4"
    W4 = "W4"
    D4_2 = "D4_2"
    BELL_13_24 = "BellPairs_13_24"
    BELL_14_23 = "BellPairs_14_23"
    CHI = "Chi"


TARGET_NAMES = tuple(t.value for t in Target)


def _amps_from(entries: dict[str, complex]) -> np.ndarray:
    amps = np.zeros(16, dtype=complex)
    for key, value in entries.items():
        idx = 0
        for ch in key:
            idx = 2 * idx + (0 if ch == "H" else 1)
        amps[idx] = value
    return amps


_S2 = math.sqrt(2)
_S6 = math.sqrt(6)

_TARGET_AMPS = {
    # Linear cluster state: note the minus sign on |VVVV>.
    Target.C4: _amps_from({"HHHH": 0.5, "HHVV": 0.5, "VVHH": 0.5, "VVVV": -0.5}),
    Target.GHZ4: _amps_from({"HHHH": 1 / _S2, "VVVV": 1 / _S2}),
    Target.W4: _amps_from({"HHHV": 0.5, "HHVH": 0.5, "HVHH": 0.5, "VHHH": 0.5}),
    Target.D4_2: _amps_from(
        {k: 1 / _S6 for k in ("HHVV", "HVHV", "VHHV", "HVVH", "VHVH", "VVHH")}
    ),
    # Bell pairs between nodes (1,3) and (2,4): |a b a b>.
    Target.BELL_13_24: _amps_from({"HHHH": 0.5, "HVHV": 0.5, "VHVH": 0.5, "VVVV": 0.5}),
    # Bell pairs between nodes (1,4) and (2,3): |a b b a>.
    Target.BELL_14_23: _amps_from({"HHHH": 0.5, "HVVH": 0.5, "VHHV": 0.5, "VVVV": 0.5}),
    Target.CHI: _amps_from(
        {
            "HHHH": 1 / (2 * _S2),
            "HHVV": -1 / (2 * _S2),
            "HVHV": -1 / (2 * _S2),
            "VHHV": 1 / (2 * _S2),
            "HVVH": 1 / (2 * _S2),
            "VHVH": 1 / (2 * _S2),
            "VVHH": 1 / (2 * _S2),
            "VVVV": 1 / (2 * _S2),
        }
    ),
}


def target_state(name: Target | str) -> FourQubitPureState:
    """Return the named four-qubit target state (unit norm)."""
    try:
        target = Target(name)
    except ValueError:
        raise ValueError(f"unknown target state {name!r}; known: {TARGET_NAMES}") from None
    return FourQubitPureState(_TARGET_AMPS[target].copy(), normalized=True)


_BLOCK_KEYS = ("HH", "HV", "VH", "VV")


class JointState:
    """Four-qubit network state: outer polarization pair (s1, s4) times the
    two-photon state of the nodes 2/3 register.

    ``blocks[s1, s4]`` is the (2L)x(2L) symmetric amplitude matrix of the
    register conditioned on qubits 1 and 4 being (s1, s4).  The total squared
    norm is the sum of the block norms.
    """

    def __init__(self, L: int, blocks: np.ndarray):
        if L < 2:
            raise ValueError(f"mode count must be >= 2, got {L}")
        blocks = np.asarray(blocks, dtype=complex)
        if blocks.shape != (2, 2, 2 * L, 2 * L):
            raise ValueError(f"blocks must have shape (2,2,{2 * L},{2 * L}), got {blocks.shape}")
        self.L = L
        self.blocks = (blocks + np.transpose(blocks, (0, 1, 3, 2))) / 2

    def block(self, s1, s4) -> TwoPhotonState:
        return TwoPhotonState(self.L, self.blocks[int(s1), int(s4)])

    def norm_squared(self) -> float:
        return 2 * float(np.sum(np.abs(self.blocks) ** 2))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    @classmethod
    def from_register_state(cls, psi: FourQubitPureState, L: int = 2) -> "JointState":
        """Load a four-qubit state into the network with the node-2/3 photons
        occupying spatial modes 1 and 2 (qubit 2 in mode 1, qubit 3 in mode 2)."""
        blocks = np.zeros((2, 2, 2 * L, 2 * L), dtype=complex)
        for s1 in (0, 1):
            for s4 in (0, 1):
                for s2 in (0, 1):
                    for s3 in (0, 1):
                        a = psi.amp(s1, s2, s3, s4) / 2
                        blocks[s1, s4, _flat(1, s2), _flat(2, s3)] += a
                        blocks[s1, s4, _flat(2, s3), _flat(1, s2)] += a
        return cls(L, blocks)

    def to_json(self) -> dict:
        out = {"L": self.L, "blocks": {}}
        for s1 in (0, 1):
            for s4 in (0, 1):
                key = _BLOCK_KEYS[2 * s1 + s4]
                mat = self.blocks[s1, s4]
                out["blocks"][key] = [
                    [[float(c.real), float(c.imag)] for c in row] for row in mat
                ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "JointState":
        L = int(data["L"])
        blocks = np.zeros((2, 2, 2 * L, 2 * L), dtype=complex)
        for s1 in (0, 1):
            for s4 in (0, 1):
                key = _BLOCK_KEYS[2 * s1 + s4]
                mat = data["blocks"][key]
                blocks[s1, s4] = np.array(
                    [[complex(re, im) for re, im in row] for row in mat]
                )
        return cls(L, blocks)


def make_bell_pairs(L: int) -> JointState:
    """Initial network state: a Bell pair between nodes (1,2) and one between (3,4).

    The node-2 photon enters spatial mode 1 carrying polarization s1; the
    node-3 photon enters spatial mode 2 carrying polarization s4.  Each of the
    four (s1, s4) blocks carries physical amplitude 1/2.
    """
    if L < 2:
        raise ValueError(f"mode count must be >= 2, got {L}")
    blocks = np.zeros((2, 2, 2 * L, 2 * L), dtype=complex)
    for s1 in (0, 1):
        for s4 in (0, 1):
            i, j = _flat(1, s1), _flat(2, s4)
            blocks[s1, s4, i, j] = 0.25
            blocks[s1, s4, j, i] = 0.25
    return JointState(L, blocks)
