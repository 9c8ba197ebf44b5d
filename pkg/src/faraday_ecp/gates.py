"""Gates of the concentration protocol.

The conditional-phase table of the cavity interaction, the atomic
Hadamard, the output wave plate that moves the photon into the linear
basis, and the polarizing-beam-splitter detection that heralds each
round.  Gate order inside one round is fixed by the engine; this module
only supplies the individual operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cavity import CavityParams, empty_cavity_reflection, reflection_coefficient
from .states import (
    ATOM_LABELS,
    BasisConfig,
    BasisError,
    PHOTON_SITE,
    PureState,
    ShapeError,
    _finalize,
    apply_single_site_unitary,
    measure,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_UNIMODULAR_TOLERANCE = 1e-9

#: Hadamard on one atom, in (gL, gR) order
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _INV_SQRT2


@dataclass(frozen=True)
class FaradayGate:
    """Conditional phases of one photon reflection off one cavity.

    Field names index photon polarization first (``l``/``r``), atomic
    state second (``l`` for gL, ``r`` for gR).  All four factors must be
    unimodular; a cavity away from its ideal point should be folded into
    an error model, not smuggled in as a lossy gate.
    """

    phase_ll: complex
    phase_rl: complex
    phase_lr: complex
    phase_rr: complex

    def __post_init__(self):
        for name in ("phase_ll", "phase_rl", "phase_lr", "phase_rr"):
            if abs(abs(complex(getattr(self, name))) - 1.0) > _UNIMODULAR_TOLERANCE:
                raise ValueError(f"{name} is not unimodular")

    @classmethod
    def ideal(cls) -> "FaradayGate":
        """The phase table at the ideal operating point."""
        return _IDEAL_GATE

    @classmethod
    def from_reflections(cls, r: complex, r0: complex) -> "FaradayGate":
        """Build the table from coupled and empty reflection amplitudes.

        A left photon meeting gL (or right meeting gR) sees the coupled
        cavity; the two cross pairings see the empty cavity.
        """
        return cls(phase_ll=r, phase_rl=r0, phase_lr=r0, phase_rr=r)

    @classmethod
    def from_cavity(cls, params: CavityParams) -> "FaradayGate":
        return cls.from_reflections(
            reflection_coefficient(params), empty_cavity_reflection(params)
        )

    def factor(self, photon_label: str, atom_label: str) -> complex:
        if photon_label == "L":
            return self.phase_ll if atom_label == "gL" else self.phase_lr
        if photon_label == "R":
            return self.phase_rl if atom_label == "gL" else self.phase_rr
        raise BasisError(f"photon label {photon_label!r} is not circular")


_IDEAL_GATE = FaradayGate(
    phase_ll=-1.0 + 0j, phase_rl=1j, phase_lr=1j, phase_rr=-1.0 + 0j
)


class DetectionOutcome(NamedTuple):
    """Photon polarization and auxiliary atom state seen by the detectors."""

    photon: str
    aux_atom: str


def _require_circular(state: PureState, operation: str) -> None:
    if not state.photon_present:
        raise BasisError(f"{operation} needs a photon in the state")
    if state.photon_basis != "LR":
        raise BasisError(f"{operation} acts on the circular basis only")


def faraday_interact(state: PureState, atom_site: int, gate: FaradayGate | None = None) -> PureState:
    """Reflect the state's photon off the cavity holding one atom."""
    _require_circular(state, "cavity interaction")
    if not 0 <= atom_site < state.register_size:
        raise ShapeError(f"atom index {atom_site} outside register")
    gate = gate or _IDEAL_GATE
    out = {
        config: amp * gate.factor(config.photon, config.atoms[atom_site])
        for config, amp in state.terms.items()
    }
    return _finalize(out, state.register_size, state.photon_basis)


def pass_two_cavities(
    state: PureState, atom_a: int, atom_b: int, gate: FaradayGate | None = None
) -> PureState:
    """Send the photon through the cavities of two distinct atoms in order."""
    if atom_a == atom_b:
        raise ShapeError("the two cavities must hold distinct atoms")
    return faraday_interact(faraday_interact(state, atom_a, gate), atom_b, gate)


def atom_hadamard(state: PureState, atom_site: int) -> PureState:
    """Hadamard on one atom, (gL, gR) basis order."""
    return apply_single_site_unitary(state, atom_site, HADAMARD)


def photon_qwp(state: PureState) -> PureState:
    """Quarter-wave plate: rotate the photon from circular to linear.

    ``L -> (H + V)/sqrt(2)`` and ``R -> (H - V)/sqrt(2)``; the state's
    photon basis tag flips from LR to HV.
    """
    _require_circular(state, "wave plate")
    out: dict[BasisConfig, complex] = {}
    for config, amp in state.terms.items():
        scaled = amp * _INV_SQRT2
        sign = 1.0 if config.photon == "L" else -1.0
        for label, factor in (("H", scaled), ("V", sign * scaled)):
            key = BasisConfig(label, config.atoms)
            out[key] = out.get(key, 0j) + factor
    return _finalize(out, state.register_size, "HV")


def pbs_and_detect(state: PureState, aux_atom_site: int, rng):
    """Measure the photon at the beam splitter and the auxiliary atom.

    Returns ``(outcome, probability, post_state)``.  Both measured
    systems are consumed: the post state carries no photon and drops the
    auxiliary atom from the register.
    """
    if state.photon_basis != "HV":
        raise BasisError("detection happens after the wave plate, in the linear basis")
    record = measure(state, (PHOTON_SITE, aux_atom_site), rng)
    stripped = {}
    for config, amp in record.post_state.terms.items():
        atoms = config.atoms[:aux_atom_site] + config.atoms[aux_atom_site + 1 :]
        stripped[BasisConfig(None, atoms)] = amp
    post = _finalize(stripped, state.register_size - 1, None)
    outcome = DetectionOutcome(photon=record.outcome[0], aux_atom=record.outcome[1])
    return outcome, record.probability, post


def phase_flip(state: PureState, atom_site: int) -> PureState:
    """Conditional sign flip ``gR -> -gR`` on one atom."""
    if not 0 <= atom_site < state.register_size:
        raise ShapeError(f"atom index {atom_site} outside register")
    out = {
        config: -amp if config.atoms[atom_site] == ATOM_LABELS[1] else amp
        for config, amp in state.terms.items()
    }
    return _finalize(out, state.register_size, state.photon_basis)
