"""Passive linear-optical elements as mode unitaries and circuit composition.

Every element is represented by its action on the single-photon creation
operators b†_m of the 2L modes: the element's unitary U sends
b†_m -> sum_n U[n, m] b†_n, so a two-photon amplitude matrix transforms by
the congruence C -> U C Uᵀ.

Beamsplitter sign convention (real asymmetric): transmission amplitude
sqrt(t) on both ports, reflection amplitudes +sqrt(1-t) and -sqrt(1-t).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .states import JointState, Polarization, TwoPhotonState

UNITARITY_TOL = 1e-10


class ModeUnitary:
    """A (2L)x(2L) unitary on the photonic modes; unitarity checked on construction."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {matrix.shape}")
        if matrix.shape[0] % 2 != 0:
            raise ValueError("mode matrix dimension must be even (2 polarizations per mode)")
        defect = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
        if defect > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (max |U†U - I| = {defect:.3e})")
        self.matrix = matrix
        self.dim = matrix.shape[0]

    @property
    def L(self) -> int:
        return self.dim // 2

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self.matrix @ other.matrix)


def _check_mode(j: int, name: str = "mode"):
    if j < 1:
        raise ValueError(f"{name} index must be >= 1, got {j}")


def _check_mode_pair(modes):
    j, k = modes
    _check_mode(j)
    _check_mode(k)
    if j == k:
        raise ValueError(f"two-mode element needs distinct spatial modes, got {modes}")


@dataclass(frozen=True)
class PDBS:
    """Polarization-dependent beamsplitter with transmittances (t_h, t_v) coupling two spatial modes."""

    t_h: float
    t_v: float
    modes: tuple[int, int]

    def __post_init__(self):
        for t, name in ((self.t_h, "t_h"), (self.t_v, "t_v")):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {t}")
        _check_mode_pair(self.modes)


@dataclass(frozen=True)
class PBS:
    """Polarizing beamsplitter: transmits H, reflects V (PDBS with t_h=1, t_v=0)."""

    modes: tuple[int, int]

    def __post_init__(self):
        _check_mode_pair(self.modes)


@dataclass(frozen=True)
class HWP:
    """Half-wave plate at plate angle theta: Jones matrix
    [[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]] on the mode's (H, V) pair."""

    angle: float
    mode: int

    def __post_init__(self):
        _check_mode(self.mode)


@dataclass(frozen=True)
class Hadamard:
    """Wave plate operating as the Hadamard gate (HWP at pi/8)."""

    mode: int

    def __post_init__(self):
        _check_mode(self.mode)


@dataclass(frozen=True)
class PhaseShifter:
    """Multiplies the selected (mode, polarization) amplitudes by exp(i*phase)."""

    phase: float
    mode: int
    polarization: str = "both"  # "H", "V", or "both"

    def __post_init__(self):
        _check_mode(self.mode)
        if self.polarization not in ("H", "V", "both"):
            raise ValueError(f"polarization must be 'H', 'V', or 'both', got {self.polarization!r}")


@dataclass(frozen=True)
class PauliX:
    """Wave plate operating as X: swaps H and V (HWP at pi/4)."""

    mode: int

    def __post_init__(self):
        _check_mode(self.mode)


@dataclass(frozen=True)
class PauliZ:
    """Phase shifter operating as Z: flips the sign of the V amplitude."""

    mode: int

    def __post_init__(self):
        _check_mode(self.mode)


@dataclass(frozen=True)
class Swap:
    """Exchange of two spatial modes (both polarizations), e.g. crossed fibers."""

    modes: tuple[int, int]

    def __post_init__(self):
        _check_mode_pair(self.modes)


CircuitElement = PDBS | PBS | HWP | Hadamard | PhaseShifter | PauliX | PauliZ | Swap


@dataclass(frozen=True)
class Circuit:
    """Ordered list of elements, applied left-to-right in temporal order."""

    L: int
    elements: tuple[CircuitElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for e in self.elements:
            for j in _element_modes(e):
                if j > self.L:
                    raise ValueError(f"element {e} uses spatial mode {j} but circuit has L={self.L}")


def _element_modes(e: CircuitElement) -> tuple[int, ...]:
    if isinstance(e, (PDBS, PBS, Swap)):
        return e.modes
    return (e.mode,)


def _jones(e: CircuitElement) -> np.ndarray:
    if isinstance(e, HWP):
        c, s = math.cos(2 * e.angle), math.sin(2 * e.angle)
        return np.array([[c, s], [s, -c]], dtype=complex)
    if isinstance(e, Hadamard):
        r = 1 / math.sqrt(2)
        return np.array([[r, r], [r, -r]], dtype=complex)
    if isinstance(e, PauliX):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if isinstance(e, PauliZ):
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if isinstance(e, PhaseShifter):
        ph = cmath.exp(1j * e.phase)
        d = [ph if e.polarization in ("H", "both") else 1.0,
             ph if e.polarization in ("V", "both") else 1.0]
        return np.diag(d).astype(complex)
    raise TypeError(f"element {e} has no single-mode Jones matrix")


def element_unitary(e: CircuitElement, L: int) -> ModeUnitary:
    """The (2L)x(2L) unitary of a single element (identity outside its modes)."""
    for j in _element_modes(e):
        if j > L:
            raise ValueError(f"element {e} uses spatial mode {j} but L={L}")
    U = np.eye(2 * L, dtype=complex)

    if isinstance(e, (PDBS, PBS)):
        t_h, t_v = (e.t_h, e.t_v) if isinstance(e, PDBS) else (1.0, 0.0)
        j, k = e.modes
        for pol, t in ((0, t_h), (1, t_v)):
            a = 2 * (j - 1) + pol
            b = 2 * (k - 1) + pol
            tr = math.sqrt(t)
            rf = math.sqrt(1.0 - t)
            U[a, a] = tr
            U[b, b] = tr
            U[a, b] = rf
            U[b, a] = -rf
        return ModeUnitary(U)

    if isinstance(e, Swap):
        j, k = e.modes
        for pol in (0, 1):
            a = 2 * (j - 1) + pol
            b = 2 * (k - 1) + pol
            U[a, a] = U[b, b] = 0.0
            U[a, b] = U[b, a] = 1.0
        return ModeUnitary(U)

    jones = _jones(e)
    a = 2 * (e.mode - 1)
    U[a : a + 2, a : a + 2] = jones
    return ModeUnitary(U)


def compose(circuit: Circuit) -> ModeUnitary:
    """Product of the element unitaries in application (temporal) order."""
    U = np.eye(2 * circuit.L, dtype=complex)
    for e in circuit.elements:
        U = element_unitary(e, circuit.L).matrix @ U
    return ModeUnitary(U)


def apply(U: ModeUnitary, state: JointState) -> JointState:
    """Transform every (s1, s4) block by the congruence C -> U C Uᵀ."""
    if U.dim != 2 * state.L:
        raise ValueError(f"dimension mismatch: unitary is {U.dim}x{U.dim}, state has 2L={2 * state.L}")
    M = U.matrix
    blocks = np.einsum("ab,xybc,dc->xyad", M, state.blocks, M, optimize=True)
    return JointState(state.L, blocks)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


# --- circuit (de)serialization -------------------------------------------------

def circuit_to_json(circuit: Circuit) -> dict:
    elements = []
    for e in circuit.elements:
        if isinstance(e, PDBS):
            elements.append({"kind": "PDBS", "tH": e.t_h, "tV": e.t_v, "modes": list(e.modes)})
        elif isinstance(e, PBS):
            elements.append({"kind": "PBS", "modes": list(e.modes)})
        elif isinstance(e, HWP):
            elements.append({"kind": "HWP", "angle": e.angle, "mode": e.mode})
        elif isinstance(e, Hadamard):
            elements.append({"kind": "Hadamard", "mode": e.mode})
        elif isinstance(e, PhaseShifter):
            elements.append(
                {"kind": "PhaseShifter", "phase": e.phase, "mode": e.mode,
                 "polarization": e.polarization}
            )
        elif isinstance(e, PauliX):
            elements.append({"kind": "PauliX", "mode": e.mode})
        elif isinstance(e, PauliZ):
            elements.append({"kind": "PauliZ", "mode": e.mode})
        elif isinstance(e, Swap):
            elements.append({"kind": "Swap", "modes": list(e.modes)})
        else:
            raise TypeError(f"unknown element {e}")
    return {"L": circuit.L, "elements": elements}


def circuit_from_json(data: dict) -> Circuit:
    """Parse a circuit description, validating element invariants."""
    L = int(data["L"])
    elements = []
    for entry in data["elements"]:
        kind = entry["kind"]
        if kind == "PDBS":
            elements.append(PDBS(entry["tH"], entry["tV"], tuple(entry["modes"])))
        elif kind == "PBS":
            elements.append(PBS(tuple(entry["modes"])))
        elif kind == "HWP":
            elements.append(HWP(entry["angle"], entry["mode"]))
        elif kind == "Hadamard":
            elements.append(Hadamard(entry["mode"]))
        elif kind == "PhaseShifter":
            elements.append(
                PhaseShifter(entry["phase"], entry["mode"], entry.get("polarization", "both"))
            )
        elif kind == "PauliX":
            elements.append(PauliX(entry["mode"]))
        elif kind == "PauliZ":
            elements.append(PauliZ(entry["mode"]))
        elif kind == "Swap":
            elements.append(Swap(tuple(entry["modes"])))
        else:
            raise ValueError(f"unknown element kind {kind!r}")
    return Circuit(L, tuple(elements))
