"""Round-by-round execution of the concentration protocol.

One round: a fresh probe photon in ``(|L> + |R>)/sqrt(2)`` and a fresh
auxiliary atom in ``beta|gL> + alpha|gR>`` join the ``N``-atom register,
the photon crosses the auxiliary cavity and then the cavity of atom 0,
the auxiliary atom gets a Hadamard, the photon gets the wave plate, and
the beam-splitter detection heralds the branch.  A vertical photon
heralds success (up to a local phase flip); a horizontal photon leaves
the register in the same GHZ shape with squared coefficients, which is
exactly the input of the next round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .gates import DetectionOutcome, atom_hadamard, pass_two_cavities, pbs_and_detect, phase_flip, photon_qwp
from .rng import trial_stream
from .states import PHOTON_SITE, PureState, make_state, outcome_probabilities, tensor

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_NORM_TOLERANCE = 1e-9


class DegenerateStateError(ValueError):
    """Coefficients carry no entanglement to concentrate (alpha*beta = 0)."""


@dataclass(frozen=True)
class CoefficientPair:
    """Amplitudes ``(alpha, beta)`` of the two GHZ branches, unit norm."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not all(math.isfinite(v) for v in (a.real, a.imag, b.real, b.imag)):
            raise ValueError("coefficients must be finite")
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > _NORM_TOLERANCE:
            raise ValueError("|alpha|^2 + |beta|^2 must equal one")

    @classmethod
    def from_alpha2(cls, alpha2: float) -> "CoefficientPair":
        """Real non-negative pair with ``|alpha|^2 = alpha2``."""
        if not 0.0 <= alpha2 <= 1.0:
            raise ValueError("alpha2 must lie in [0, 1]")
        return cls(math.sqrt(alpha2), math.sqrt(1.0 - alpha2))

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "CoefficientPair":
        alpha, beta = complex(alpha), complex(beta)
        # grouped re^2 + im^2 moduli keep this bit-compatible with the
        # compiled backend's recycle step
        norm2 = (alpha.real * alpha.real + alpha.imag * alpha.imag) + (
            beta.real * beta.real + beta.imag * beta.imag
        )
        if norm2 == 0.0:
            raise ValueError("cannot normalize the zero vector")
        norm = math.sqrt(norm2)
        return cls(alpha / norm, beta / norm)

    def moduli2(self) -> tuple[float, float]:
        """(|alpha|^2, |beta|^2)."""
        a, b = complex(self.alpha), complex(self.beta)
        return (
            a.real * a.real + a.imag * a.imag,
            b.real * b.real + b.imag * b.imag,
        )


class Classification(Enum):
    """What the heralded detector pattern means for this round."""

    SUCCESS = "success"
    SUCCESS_AFTER_FLIP = "success_flip"
    RECYCLE = "recycle"
    RECYCLE_AFTER_FLIP = "recycle_flip"

    @property
    def is_success(self) -> bool:
        return self in (Classification.SUCCESS, Classification.SUCCESS_AFTER_FLIP)

    @property
    def needs_flip(self) -> bool:
        return self in (
            Classification.SUCCESS_AFTER_FLIP,
            Classification.RECYCLE_AFTER_FLIP,
        )


#: detector pattern (photon, auxiliary atom) -> branch meaning
CLASSIFICATION_BY_OUTCOME = {
    ("V", "gR"): Classification.SUCCESS,
    ("V", "gL"): Classification.SUCCESS_AFTER_FLIP,
    ("H", "gL"): Classification.RECYCLE,
    ("H", "gR"): Classification.RECYCLE_AFTER_FLIP,
}


@dataclass(frozen=True)
class RoundResult:
    """One heralded round, after any corrective phase flip."""

    outcome: DetectionOutcome
    classification: Classification
    probability: float
    corrected_state: PureState
    next_coefficients: CoefficientPair | None


@dataclass(frozen=True)
class ProtocolTranscript:
    """Full record of one protocol run."""

    initial_coefficients: CoefficientPair
    n_atoms: int
    rounds: tuple[RoundResult, ...]
    final_state: PureState
    seed: int | None = None

    @property
    def succeeded_round(self) -> int | None:
        """1-based index of the successful round, or None."""
        for k, result in enumerate(self.rounds, start=1):
            if result.classification.is_success:
                return k
        return None

    @property
    def succeeded(self) -> bool:
        return self.succeeded_round is not None


def prepare_photon() -> PureState:
    """Probe photon in ``(|L> + |R>)/sqrt(2)``, empty atom register."""
    return make_state([(("L", ()), _INV_SQRT2), (("R", ()), _INV_SQRT2)])


def prepare_initial(coefficients: CoefficientPair, n_atoms: int) -> PureState:
    """GHZ-class register ``alpha|gL gR..gR> + beta|gR gL..gL>``."""
    if n_atoms < 2:
        raise ValueError("the register needs at least two atoms")
    branch_a = ("gL",) + ("gR",) * (n_atoms - 1)
    branch_b = ("gR",) + ("gL",) * (n_atoms - 1)
    return make_state(
        [
            ((None, branch_a), coefficients.alpha),
            ((None, branch_b), coefficients.beta),
        ]
    )


def ghz_target(n_atoms: int) -> PureState:
    """The maximally entangled state the protocol distills towards."""
    return prepare_initial(CoefficientPair.from_alpha2(0.5), n_atoms)


def prepare_aux_atom(coefficients: CoefficientPair) -> PureState:
    """Auxiliary atom ``beta|gL> + alpha|gR>`` (note the swap)."""
    return make_state(
        [
            ((None, ("gL",)), coefficients.beta),
            ((None, ("gR",)), coefficients.alpha),
        ]
    )


def recycled_coefficients(pair: CoefficientPair) -> CoefficientPair:
    """Coefficients after a recycle branch: squared, then renormalized."""
    alpha, beta = complex(pair.alpha), complex(pair.beta)
    if alpha == 0 or beta == 0:
        raise DegenerateStateError("a product state cannot be recycled")
    return CoefficientPair.normalized(alpha * alpha, beta * beta)


def _evolved_joint_state(state: PureState, coefficients: CoefficientPair):
    joint = tensor(tensor(prepare_photon(), state), prepare_aux_atom(coefficients))
    aux_site = state.register_size
    joint = pass_two_cavities(joint, aux_site, 0)
    joint = atom_hadamard(joint, aux_site)
    joint = photon_qwp(joint)
    return joint, aux_site


def detection_weights(state: PureState, coefficients: CoefficientPair) -> dict:
    """Born weights of the four detector patterns, no sampling involved."""
    joint, aux_site = _evolved_joint_state(state, coefficients)
    return outcome_probabilities(joint, (PHOTON_SITE, aux_site))


def run_round(state: PureState, coefficients: CoefficientPair, rng) -> RoundResult:
    """Execute one round on ``state`` and classify the heralded branch."""
    joint, aux_site = _evolved_joint_state(state, coefficients)
    outcome, probability, post = pbs_and_detect(joint, aux_site, rng)
    classification = CLASSIFICATION_BY_OUTCOME[tuple(outcome)]
    corrected = phase_flip(post, 0) if classification.needs_flip else post
    next_pair = None
    if not classification.is_success:
        next_pair = recycled_coefficients(coefficients)
    return RoundResult(outcome, classification, probability, corrected, next_pair)


def run_protocol(
    coefficients: CoefficientPair,
    n_atoms: int,
    max_rounds: int,
    rng=None,
    seed: int | None = None,
) -> ProtocolTranscript:
    """Run rounds until success or ``max_rounds`` recycles are spent.

    The corrected post-detection state of each recycle round is fed
    forward physically; the coefficient pair is tracked alongside it for
    the auxiliary-atom preparation.  Sampling uses ``rng`` when given,
    otherwise a fresh stream derived from ``seed``.
    """
    if max_rounds < 1:
        raise ValueError("need at least one round")
    if complex(coefficients.alpha) == 0 or complex(coefficients.beta) == 0:
        raise DegenerateStateError("a product state cannot be concentrated")
    if rng is None:
        rng = trial_stream(0 if seed is None else seed, 0)
    state = prepare_initial(coefficients, n_atoms)
    pair = coefficients
    rounds: list[RoundResult] = []
    for _ in range(max_rounds):
        result = run_round(state, pair, rng)
        rounds.append(result)
        state = result.corrected_state
        if result.classification.is_success:
            break
        pair = result.next_coefficients
    return ProtocolTranscript(
        initial_coefficients=coefficients,
        n_atoms=n_atoms,
        rounds=tuple(rounds),
        final_state=state,
        seed=seed,
    )


def _format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real + 0.0:+.6f}{z.imag + 0.0:+.6f}j"


def transcript_lines(transcript: ProtocolTranscript) -> list[str]:
    """One line per round: index, outcome, classification, probability,
    and the coefficient pair the round started from."""
    lines = []
    pair = transcript.initial_coefficients
    for k, result in enumerate(transcript.rounds, start=1):
        lines.append(
            f"{k} {result.outcome.photon},{result.outcome.aux_atom} "
            f"{result.classification.value} {result.probability:.6f} "
            f"{_format_complex(pair.alpha)} {_format_complex(pair.beta)}"
        )
        if result.next_coefficients is not None:
            pair = result.next_coefficients
    return lines
