"""Named passive converters, their closed forms, sensitivity grids, and
ancilla-assisted composite probability bookkeeping.

The linear-cluster converter couples each signal mode to a vacuum mode with a
PDBS, flips polarizations, interferes the signal modes on a central PDBS with
the same transmittances, flips back, and finishes with phase plates.  Mirror
reflections in the folded geometry contribute polarization-dependent pi
phases; they appear here as explicit Z plates and are pinned down by exact
agreement between the simulated and closed-form success probability and
fidelity over the whole transmittance square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .optics import PBS, PDBS, Circuit, Hadamard, PauliX, PauliZ, Swap, apply, compose
from .postselect import ConversionOutcome, DetectorModel, evaluate
from .states import FourQubitPureState, JointState, make_bell_pairs, target_state

# Analytic optima of the postselected conversion from two Bell pairs, by target.
OPTIMAL_SUCCESS = {
    "C4": Fraction(1, 9),
    "GHZ4": Fraction(1, 2),
    "W4": Fraction(0),
    "D4_2": Fraction(0),
    "BellPairs_13_24": Fraction(1),
    "BellPairs_14_23": Fraction(1, 4),
    "Chi": Fraction(0),
}

IDEAL_T_H = 1.0
IDEAL_T_V = 1.0 / 3.0

# Half-wave-plate angles of the three-photon W-state expansion stage,
# 2*theta = arcsin(sqrt((5 +- sqrt 5)/10)); constants only, no circuit here.
W_EXPANSION_HWP_PLUS = 0.5 * math.asin(math.sqrt((5 + math.sqrt(5)) / 10))
W_EXPANSION_HWP_MINUS = 0.5 * math.asin(math.sqrt((5 - math.sqrt(5)) / 10))


@dataclass(frozen=True)
class PdbsParams:
    """Common transmittances of all PDBSs in the cluster converter."""

    t_h: float
    t_v: float

    def __post_init__(self):
        for t, name in ((self.t_h, "t_h"), (self.t_v, "t_v")):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {t}")


@dataclass(frozen=True)
class SensitivityPoint:
    """One point of the transmittance sweep: closed form next to simulation."""

    t_h: float
    t_v: float
    eta: float
    eta_prime: float
    p_closed: float
    p_sim: float
    f_closed: float | None
    f_sim: float | None


@dataclass(frozen=True)
class CompositeScheme:
    """Chain of probabilistic stages with exact rational bookkeeping."""

    name: str
    stages: tuple[tuple[str, Fraction, int], ...]

    @property
    def total_probability(self) -> Fraction:
        p = Fraction(1)
        for _, prob, _ in self.stages:
            p *= prob
        return p

    @property
    def total_ancillas(self) -> int:
        return sum(n for _, _, n in self.stages)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "stages": [
                {"label": label, "probability": str(prob), "ancillas": n}
                for label, prob, n in self.stages
            ],
            "total_probability": str(self.total_probability),
            "total_ancillas": self.total_ancillas,
        }


def c4_converter(params: PdbsParams, layout: str = "attenuate-first") -> Circuit:
    """Converter from the Bell pairs to the linear cluster state (4 modes:
    signal modes 1, 2 plus vacuum failure modes 3, 4).

    ``layout`` selects which PDBS stage acts first; "attenuate-first" is the
    reading that reproduces the closed forms and is the default.  The Z plate
    on mode 1 before the central PDBS carries the mirror phase of the folded
    signal path.
    """
    t_h, t_v = params.t_h, params.t_v
    attenuators = (PDBS(t_h, t_v, (1, 3)), PDBS(t_h, t_v, (2, 4)))
    central = (PauliX(1), PauliX(2), PauliZ(1), PDBS(t_h, t_v, (1, 2)), PauliX(1), PauliX(2))
    tail = (PauliZ(2),)
    if layout == "attenuate-first":
        elements = attenuators + central + tail
    elif layout == "interfere-first":
        elements = central + attenuators + tail
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return Circuit(4, elements)


def c4_closed_form(
    params: PdbsParams, detectors: DetectorModel = DetectorModel()
) -> tuple[float, float | None]:
    """Closed-form (p_suc, fidelity) of the cluster converter.

    p_suc = eta eta' (T_H^2 + 2 T_H T_V + T_V^2 - 6 T_H^2 T_V - 6 T_H T_V^2
    + 12 T_H^2 T_V^2)/4 and F = |T_H + 2 T_H T_V - T_V| / (2 sqrt(radicand));
    the fidelity is None when the radicand vanishes (no coincidences at all).
    """
    th, tv = params.t_h, params.t_v
    radicand = (
        th**2 + 2 * th * tv + tv**2 - 6 * th**2 * tv - 6 * th * tv**2 + 12 * th**2 * tv**2
    )
    p = detectors.eta * detectors.eta_prime * radicand / 4
    if radicand <= 0.0:
        return (max(p, 0.0), None)
    fidelity = abs(th + 2 * th * tv - tv) / (2 * math.sqrt(radicand))
    return (p, fidelity)


def ghz_converter() -> Circuit:
    """PBS interference of the two signal modes; the Z plate compensates the
    reflection sign so the even component comes out with a plus."""
    return Circuit(2, (PBS((1, 2)), PauliZ(2)))


def bell_rewire_converter(target: str) -> Circuit:
    """Rewiring converters: "13_24" is a mode swap (unit probability);
    "14_23" filters on the symmetric Bell state via two-photon interference
    on a balanced beamsplitter, dressed by wave plates on mode 2."""
    if target == "13_24":
        return Circuit(2, (Swap((1, 2)),))
    if target == "14_23":
        return Circuit(
            2,
            (
                PauliZ(2),
                PauliX(2),
                PDBS(0.5, 0.5, (1, 2)),
                PauliX(2),
                PauliZ(2),
            ),
        )
    raise ValueError(f"unknown rewiring target {target!r}; use '13_24' or '14_23'")


def chi_from_c4_converter() -> Circuit:
    """Converter from a loaded linear-cluster register to the chi state.

    A PBS between Hadamard plates passes only the even-parity diagonal
    components; the surrounding Z plates steer the parity filter onto the
    Bell-basis map that sends the cluster correlations to the chi ones.
    """
    return Circuit(
        2,
        (
            PauliZ(1),
            Hadamard(1),
            Hadamard(2),
            PBS((1, 2)),
            PauliZ(1),
            Hadamard(1),
            Hadamard(2),
            PauliZ(1),
            PauliZ(2),
        ),
    )


def simulate_converter(
    circuit: Circuit,
    target: FourQubitPureState,
    detectors: DetectorModel = DetectorModel(),
    initial: JointState | None = None,
) -> ConversionOutcome:
    """Compose, apply to the initial state (Bell pairs by default), postselect."""
    if initial is None:
        initial = make_bell_pairs(circuit.L)
    if initial.L != circuit.L:
        raise ValueError(f"initial state has L={initial.L} but circuit has L={circuit.L}")
    return evaluate(apply(compose(circuit), initial), target, detectors)


def c4_initial_state(L: int = 2) -> JointState:
    """The linear cluster state loaded into the node-2/3 photon register."""
    return JointState.from_register_state(target_state("C4"), L)


def sensitivity_grid(
    t_h_values,
    t_v_values,
    detectors: DetectorModel = DetectorModel(),
) -> list[SensitivityPoint]:
    """Closed form next to simulation for every (t_h, t_v) grid point."""
    points = []
    target = target_state("C4")
    for th in t_h_values:
        for tv in t_v_values:
            params = PdbsParams(float(th), float(tv))
            p_closed, f_closed = c4_closed_form(params, detectors)
            outcome = simulate_converter(c4_converter(params), target, detectors)
            points.append(
                SensitivityPoint(
                    t_h=params.t_h,
                    t_v=params.t_v,
                    eta=detectors.eta,
                    eta_prime=detectors.eta_prime,
                    p_closed=p_closed,
                    p_sim=outcome.p_suc,
                    f_closed=f_closed,
                    f_sim=outcome.fidelity,
                )
            )
    return points


def grid_range(step: float, lo: float = 0.0, hi: float = 1.0) -> list[float]:
    """Inclusive uniform grid, robust against floating-point step drift."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(round((hi - lo) / step))
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


_KLM_CZ = ("KLM controlled-Z (two ancilla photons)", Fraction(1, 16), 2)
_RAIL_IN = ("polarization to dual-rail encoding", Fraction(1), 0)
_RAIL_OUT = ("dual-rail to polarization encoding", Fraction(1), 0)

_COMPOSITE_SCHEMES = {
    "D4_via_KLM": CompositeScheme(
        "D4_via_KLM",
        (
            _RAIL_IN,
            _KLM_CZ,
            _RAIL_OUT,
            ("cluster to symmetric Dicke converter", Fraction(3, 10), 0),
        ),
    ),
    "Chi_via_KLM": CompositeScheme(
        "Chi_via_KLM",
        (
            _RAIL_IN,
            _KLM_CZ,
            _RAIL_OUT,
            ("cluster to chi converter", Fraction(1, 2), 0),
        ),
    ),
    "W4_via_fusion": CompositeScheme(
        "W4_via_fusion",
        (
            ("Bell pairs to three-photon W state", Fraction(3, 20), 0),
            ("W-state expansion by one ancilla photon", Fraction(4, 15), 1),
        ),
    ),
    "KLM_C4": CompositeScheme("KLM_C4", (_RAIL_IN, _KLM_CZ, _RAIL_OUT)),
    "KLM_3CZ": CompositeScheme(
        "KLM_3CZ",
        (_RAIL_IN, _KLM_CZ, _KLM_CZ, _KLM_CZ, _RAIL_OUT),
    ),
}


def composite_scheme(name: str) -> CompositeScheme:
    """Ancilla-assisted composite conversion schemes with exact probabilities."""
    try:
        return _COMPOSITE_SCHEMES[name]
    except KeyError:
        raise ValueError(
            f"unknown composite scheme {name!r}; known: {sorted(_COMPOSITE_SCHEMES)}"
        ) from None
