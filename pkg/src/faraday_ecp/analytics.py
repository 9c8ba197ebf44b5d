"""Closed-form success probabilities and comparison tables.

Writing ``m = |alpha|^2`` and ``w = |beta|^2``, the round-``k`` success
probability of the recycling protocol is::

    P_1 = 2 m w
    P_k = 2 (m w)^(2^(k-1)) / prod_{j=2..k} (m^(2^(j-1)) + w^(2^(j-1)))

which telescopes out of the recycle chain: each failed round squares and
renormalizes the coefficients, and the product in the denominator is the
running normalization.  The powers underflow long before k reaches the
round budgets used here, so ``round_probability`` evaluates the closed
form in log space.

The reference both tables compare against is the single-shot protocol
with per-atom heralding: success ``2 m w``, degraded by one photon
detector and ``N`` atom detectors when efficiencies enter.  The recycling
protocol needs one photon and one atom detection per run regardless of
``N``, so its degraded total carries a single ``eta_p * eta_a`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import CoefficientPair


@dataclass(frozen=True)
class DetectionEfficiency:
    """Photon and atom detector efficiencies, each in [0, 1]."""

    eta_p: float
    eta_a: float

    def __post_init__(self):
        for name in ("eta_p", "eta_a"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class ProbabilityLedger:
    """Per-round and cumulative success probabilities for one run budget."""

    per_round: tuple[float, ...]
    total: float
    conditional_per_round: tuple[float, ...]


def _moduli(pair: CoefficientPair) -> tuple[float, float]:
    return pair.moduli2()


def round_probability(pair: CoefficientPair, k: int) -> float:
    """Probability that round ``k`` is reached and succeeds."""
    if k < 1:
        raise ValueError("rounds are counted from one")
    m, w = _moduli(pair)
    mw = m * w
    if k == 1:
        return 2.0 * mw
    if mw == 0.0:
        return 0.0
    # log space: the bare powers underflow around k = 10 already
    log_p = math.log(2.0) + 2.0 ** (k - 1) * math.log(mw)
    hi, lo = max(m, w), min(m, w)
    ratio = lo / hi
    for j in range(2, k + 1):
        exponent = 2.0 ** (j - 1)
        log_p -= exponent * math.log(hi) + math.log1p(ratio**exponent)
    return math.exp(log_p)


def total_probability(pair: CoefficientPair, max_rounds: int) -> float:
    """Probability of success within ``max_rounds`` rounds."""
    if max_rounds < 1:
        raise ValueError("need at least one round")
    return math.fsum(round_probability(pair, k) for k in range(1, max_rounds + 1))


def coefficient_chain(pair: CoefficientPair, max_rounds: int) -> list[tuple[float, float]]:
    """``(m, w)`` moduli entering each round under repeated recycling."""
    m, w = _moduli(pair)
    chain = [(m, w)]
    for _ in range(max_rounds - 1):
        d = m * m + w * w
        m, w = m * m / d, w * w / d
        chain.append((m, w))
    return chain


def probability_ledger(pair: CoefficientPair, max_rounds: int) -> ProbabilityLedger:
    """Closed-form per-round, conditional, and cumulative probabilities."""
    chain = coefficient_chain(pair, max_rounds)
    conditional = tuple(2.0 * m * w for m, w in chain)
    per_round = tuple(round_probability(pair, k) for k in range(1, max_rounds + 1))
    return ProbabilityLedger(
        per_round=per_round,
        total=math.fsum(per_round),
        conditional_per_round=conditional,
    )


def reference_probability(pair: CoefficientPair) -> float:
    """Single-shot success probability of the non-recycling reference."""
    m, w = _moduli(pair)
    return 2.0 * m * w


def imperfect_reference(
    pair: CoefficientPair, efficiency: DetectionEfficiency, n_atoms: int
) -> float:
    """Reference probability with one photon and ``n_atoms`` atom detections."""
    if n_atoms < 1:
        raise ValueError("the reference heralds at least one atom")
    return efficiency.eta_p * efficiency.eta_a**n_atoms * reference_probability(pair)


def imperfect_total(
    pair: CoefficientPair, efficiency: DetectionEfficiency, max_rounds: int
) -> float:
    """Recycling total with one photon and one atom detection per run."""
    return efficiency.eta_p * efficiency.eta_a * total_probability(pair, max_rounds)


def default_alpha2_grid(points: int = 199) -> np.ndarray:
    """Uniform grid of ``|alpha|^2`` values on the open interval (0, 1).

    The grid is ``k / (points + 1)``, so the default 199 points run from
    0.005 to 0.995 in steps of 0.005 and the balanced point 0.5 is an
    exact grid value.
    """
    if points < 1:
        raise ValueError("the grid needs at least one point")
    return np.arange(1, points + 1) / float(points + 1)


def figure4_table(alpha2_grid=None, max_rounds: int = 5) -> list[dict]:
    """Recycling total versus the ideal-detector reference, per grid point."""
    grid = default_alpha2_grid() if alpha2_grid is None else np.asarray(alpha2_grid)
    rows = []
    for alpha2 in grid:
        pair = CoefficientPair.from_alpha2(float(alpha2))
        rows.append(
            {
                "alpha": math.sqrt(float(alpha2)),
                "alpha2": float(alpha2),
                "p_total_ours": total_probability(pair, max_rounds),
                "p_reference": reference_probability(pair),
            }
        )
    return rows


def figure5_table(
    alpha2_grid=None,
    efficiency: DetectionEfficiency | None = None,
    max_rounds: int = 5,
    n_values: tuple[int, ...] = (5, 10),
) -> list[dict]:
    """Degraded recycling total versus the degraded reference at several N."""
    grid = default_alpha2_grid() if alpha2_grid is None else np.asarray(alpha2_grid)
    efficiency = efficiency or DetectionEfficiency(eta_p=0.9, eta_a=0.9)
    rows = []
    for alpha2 in grid:
        pair = CoefficientPair.from_alpha2(float(alpha2))
        row = {
            "alpha": math.sqrt(float(alpha2)),
            "alpha2": float(alpha2),
            "p_total_ours": imperfect_total(pair, efficiency, max_rounds),
        }
        for n in n_values:
            row[f"p_ref_n{n}"] = imperfect_reference(pair, efficiency, n)
        rows.append(row)
    return rows
