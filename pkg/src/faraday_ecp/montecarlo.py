"""Seeded trajectory sampling used to validate the closed-form ledger.

Two interchangeable backends run the same trials: a compiled kernel
(:mod:`faraday_ecp._mc_kernel`, built from Cython) and a pure-Python loop
over :func:`faraday_ecp.engine.run_protocol`.  Both draw from the same
counter-derived splitmix64 streams, stream 0 for branch sampling and
stream 1 for detector-loss sampling, so a given (config, master_seed)
yields the identical success ledger from either backend.

Loss models:

* ``NONE``: perfect detectors.
* ``GLOBAL_FACTOR``: a successful trial survives a single Bernoulli draw
  with probability ``eta_p * eta_a`` (one photon and one atom detection
  per protocol run, independent of register size).
* ``CASCADED_PER_ROUND``: every executed round must pass one photon and
  one atom detector draw before its herald counts; a failed draw aborts
  the trial.  This is a stricter accounting than the global factor and
  is kept as a labelled alternative, not a replacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

from .analytics import DetectionEfficiency, round_probability
from .engine import CoefficientPair, ProtocolTranscript, run_protocol
from .rng import trial_stream

try:
    from . import _mc_kernel
except ImportError:  # pure-Python fallback
    _mc_kernel = None

#: purpose indices of the per-trial random streams (kernel hardcodes them)
STREAM_PROTOCOL = 0
STREAM_LOSS = 1

_MASK64 = (1 << 64) - 1


def kernel_available() -> bool:
    """True when the compiled trial loop imported successfully."""
    return _mc_kernel is not None


class LossModel(Enum):
    NONE = "none"
    GLOBAL_FACTOR = "global"
    CASCADED_PER_ROUND = "cascaded"


_LOSS_CODE = {LossModel.NONE: 0, LossModel.GLOBAL_FACTOR: 1, LossModel.CASCADED_PER_ROUND: 2}


@dataclass(frozen=True)
class SimulationConfig:
    """One Monte Carlo experiment: protocol inputs plus sampling inputs."""

    coefficients: CoefficientPair
    n_atoms: int = 2
    max_rounds: int = 5
    trials: int = 100_000
    master_seed: int = 0
    loss_model: LossModel = LossModel.NONE
    efficiency: DetectionEfficiency | None = None

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("the register needs at least two atoms")
        if self.max_rounds < 1:
            raise ValueError("need at least one round")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        needs_efficiency = self.loss_model is not LossModel.NONE
        if needs_efficiency and self.efficiency is None:
            raise ValueError(f"loss model {self.loss_model.value!r} needs an efficiency")
        if not needs_efficiency and self.efficiency is not None:
            raise ValueError("efficiency given but the loss model ignores it")


@dataclass(frozen=True)
class EmpiricalLedger:
    """Success counts by round for one simulation."""

    success_count_by_round: tuple[int, ...]
    trials: int

    @property
    def empirical_p_k(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.success_count_by_round)

    @property
    def stderr_k(self) -> tuple[float, ...]:
        """Binomial standard error of each per-round estimate."""
        out = []
        for p in self.empirical_p_k:
            out.append(math.sqrt(p * (1.0 - p) / self.trials))
        return tuple(out)

    @property
    def total_successes(self) -> int:
        return sum(self.success_count_by_round)

    @property
    def empirical_total(self) -> float:
        return self.total_successes / self.trials

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "success_count_by_round": list(self.success_count_by_round),
            "empirical_p_k": list(self.empirical_p_k),
            "stderr_k": list(self.stderr_k),
            "empirical_total": self.empirical_total,
        }


def _survives_loss(config: SimulationConfig, transcript: ProtocolTranscript, loss_rng) -> int | None:
    """Succeeded round after detector losses, or None.

    Draw order is fixed and shared with the kernel: per executed round,
    photon draw then atom draw (cascaded model); one final draw for the
    global model.  A trial never touches the loss stream after aborting.
    """
    if config.loss_model is LossModel.NONE:
        return transcript.succeeded_round
    eta_p, eta_a = config.efficiency.eta_p, config.efficiency.eta_a
    if config.loss_model is LossModel.CASCADED_PER_ROUND:
        for k, result in enumerate(transcript.rounds, start=1):
            u_photon = loss_rng.random()
            u_atom = loss_rng.random()
            if u_photon >= eta_p or u_atom >= eta_a:
                return None
            if result.classification.is_success:
                return k
        return None
    # GLOBAL_FACTOR
    k = transcript.succeeded_round
    if k is None:
        return None
    return k if loss_rng.random() < eta_p * eta_a else None


def _estimate_python(config: SimulationConfig) -> EmpiricalLedger:
    counts = [0] * config.max_rounds
    for trial in range(config.trials):
        rng = trial_stream(config.master_seed, trial, STREAM_PROTOCOL)
        transcript = run_protocol(
            config.coefficients, config.n_atoms, config.max_rounds, rng=rng
        )
        loss_rng = trial_stream(config.master_seed, trial, STREAM_LOSS)
        k = _survives_loss(config, transcript, loss_rng)
        if k is not None:
            counts[k - 1] += 1
    return EmpiricalLedger(tuple(counts), config.trials)


def _estimate_compiled(config: SimulationConfig) -> EmpiricalLedger:
    eta_p = config.efficiency.eta_p if config.efficiency else 1.0
    eta_a = config.efficiency.eta_a if config.efficiency else 1.0
    counts = _mc_kernel.run_trials(
        complex(config.coefficients.alpha),
        complex(config.coefficients.beta),
        config.max_rounds,
        config.trials,
        config.master_seed & _MASK64,
        _LOSS_CODE[config.loss_model],
        eta_p,
        eta_a,
    )
    return EmpiricalLedger(tuple(int(c) for c in counts), config.trials)


def estimate(config: SimulationConfig, backend: str = "auto") -> EmpiricalLedger:
    """Run the experiment on the chosen backend.

    ``auto`` prefers the compiled kernel and falls back to pure Python;
    naming a missing backend raises rather than silently substituting.
    """
    if backend not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and not kernel_available():
        raise RuntimeError("compiled kernel is not available in this install")
    if backend == "python" or (backend == "auto" and not kernel_available()):
        return _estimate_python(config)
    return _estimate_compiled(config)


def agreement(ledger: EmpiricalLedger, pair: CoefficientPair) -> list[dict]:
    """Per-round comparison of the ledger against the closed form.

    The z-score uses the analytic probability in the binomial sigma, so
    rounds whose empirical count is zero still get a finite score.
    """
    rows = []
    for k, (count, empirical) in enumerate(
        zip(ledger.success_count_by_round, ledger.empirical_p_k), start=1
    ):
        analytic = round_probability(pair, k)
        sigma = math.sqrt(analytic * (1.0 - analytic) / ledger.trials)
        if sigma == 0.0:
            z = 0.0 if empirical == analytic else math.inf
        else:
            z = (empirical - analytic) / sigma
        rows.append(
            {
                "round": k,
                "successes": count,
                "empirical_p": empirical,
                "analytic_p": analytic,
                "z": z,
            }
        )
    return rows
