"""Coincidence postselection: success probability, output state, and fidelity.

Postselection succeeds when exactly one photon arrives at each of output
spatial modes 1 and 2.  The surviving amplitudes form an (unnormalized)
four-qubit state indexed (s1, s2, s3, s4), where s2 and s3 are the
polarizations detected in modes 1 and 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import FourQubitPureState, JointState, overlap

_ZERO_AMPLITUDE_TOL = 1e-30  # on the squared norm


@dataclass(frozen=True)
class DetectorModel:
    """Efficiencies of the two threshold detectors on output modes 1 and 2."""

    eta: float = 1.0
    eta_prime: float = 1.0

    def __post_init__(self):
        for value, name in ((self.eta, "eta"), (self.eta_prime, "eta_prime")):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ConversionOutcome:
    """Result of postselecting a circuit run against a target state.

    ``fidelity`` is the modulus of the overlap |<target|output>| (not its
    square).  It is None (undefined) when the coincidence amplitudes vanish,
    in which case ``output`` is also None.
    """

    p_suc: float
    fidelity: float | None
    output: FourQubitPureState | None
    eta_product: float

    def to_json(self) -> dict:
        return {
            "p_suc": self.p_suc,
            "fidelity": self.fidelity,
            "output": None if self.output is None else self.output.to_json(),
            "eta_product": self.eta_product,
        }


def coincidence_amplitudes(state: JointState) -> FourQubitPureState:
    """Unnormalized amplitudes surviving the one-photon-per-output-mode projection.

    A[s1,s2,s3,s4] = 2 C^(s1,s4)[(1,s2),(2,s3)]; the factor 2 is the bosonic
    double counting of the symmetric matrix.  All other occupation patterns
    (both photons in one mode, photons in modes > 2) are discarded.
    """
    amps = np.empty(16, dtype=complex)
    blocks = state.blocks
    for s1 in (0, 1):
        for s4 in (0, 1):
            for s2 in (0, 1):
                for s3 in (0, 1):
                    amps[8 * s1 + 4 * s2 + 2 * s3 + s4] = 2 * blocks[s1, s4, s2, 2 + s3]
    return FourQubitPureState(amps)


def evaluate(
    state: JointState,
    target: FourQubitPureState,
    detectors: DetectorModel = DetectorModel(),
) -> ConversionOutcome:
    """Postselect ``state`` and compare against a unit-norm ``target``.

    p_suc = eta * eta' * sum |A|^2; the detector efficiencies scale the
    success probability only and never touch the fidelity.
    """
    if abs(target.norm() - 1.0) > 1e-10:
        raise ValueError(f"target must be unit-norm, got norm {target.norm()!r}")
    amps = coincidence_amplitudes(state)
    raw = float(np.sum(np.abs(amps.amps) ** 2))
    eta_product = detectors.eta * detectors.eta_prime
    if raw < _ZERO_AMPLITUDE_TOL:
        return ConversionOutcome(0.0, None, None, eta_product)
    output = FourQubitPureState(amps.amps / np.sqrt(raw), normalized=True)
    fidelity = abs(overlap(target, output))
    return ConversionOutcome(eta_product * raw, fidelity, output, eta_product)
