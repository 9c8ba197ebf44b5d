"""Cavity-assisted entanglement concentration of N-atom GHZ states.

Sparse state simulation of the heralded recycling protocol, the
closed-form success ledger it converges to, a seeded Monte Carlo
validator with a compiled hot loop, and the cavity input-output algebra
behind the photonic gates.
"""

from .analytics import (
    DetectionEfficiency,
    ProbabilityLedger,
    default_alpha2_grid,
    figure4_table,
    figure5_table,
    imperfect_reference,
    imperfect_total,
    probability_ledger,
    reference_probability,
    round_probability,
    total_probability,
)
from .cavity import (
    CavityParams,
    PhasePair,
    SingularParameterError,
    empty_cavity_reflection,
    faraday_angles,
    gate_phase_error,
    ideal_operating_point,
    phase_pair,
    reflection_coefficient,
)
from .engine import (
    Classification,
    CoefficientPair,
    DegenerateStateError,
    ProtocolTranscript,
    RoundResult,
    detection_weights,
    ghz_target,
    prepare_aux_atom,
    prepare_initial,
    prepare_photon,
    recycled_coefficients,
    run_protocol,
    run_round,
    transcript_lines,
)
from .gates import (
    DetectionOutcome,
    FaradayGate,
    atom_hadamard,
    faraday_interact,
    pass_two_cavities,
    pbs_and_detect,
    phase_flip,
    photon_qwp,
)
from .montecarlo import (
    EmpiricalLedger,
    LossModel,
    SimulationConfig,
    agreement,
    estimate,
    kernel_available,
)
from .rng import SplitMix64, mix64, stream_seed, trial_stream
from .states import (
    BasisConfig,
    BasisError,
    MeasurementRecord,
    PureState,
    ShapeError,
    StateConstructionError,
    apply_single_site_unitary,
    fidelity,
    make_state,
    measure,
    outcome_probabilities,
    tensor,
)

__version__ = "0.1.0"
