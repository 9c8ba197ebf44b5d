"""Input-output optics of a three-level atom in a single-sided cavity.

Everything here is closed-form steady-state algebra: the reflection
amplitude seen by a weak probe pulse, its empty-cavity limit, the two
reflection phases, and the polarization rotation angles they induce.
Frequencies and rates carry arbitrary but shared units; every result
depends only on ratios, which the tests pin down as a scale invariance.

With probe detuning ``dc = omega_c - omega_p`` and atomic detuning
``d0 = omega_0 - omega_p``, the coupled and empty reflections are::

    r  = [(i*dc - kappa/2) * (i*d0 + gamma/2) + g^2]
         / [(i*dc + kappa/2) * (i*d0 + gamma/2) + g^2]
    r0 = (i*dc - kappa/2) / (i*dc + kappa/2)

At ``omega_0 = omega_c``, ``omega_p = omega_c - kappa/2``, ``g = kappa/2``
and ``gamma = 0`` these land on ``r = -1`` and ``r0 = i``, the point where
the conditional polarization rotations become the pi/4 pair the protocol
gates assume.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

#: a reflection denominator below this modulus is treated as singular
SINGULAR_TOLERANCE = 1e-15


class SingularParameterError(ValueError):
    """Parameters put a reflection denominator at (numerical) zero."""


@dataclass(frozen=True)
class CavityParams:
    """Cavity, atom and probe parameters in shared arbitrary units."""

    omega_c: float
    omega_0: float
    omega_p: float
    kappa: float
    gamma: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        for name in ("omega_c", "omega_0", "omega_p", "kappa", "gamma", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.gamma < 0.0 or self.g < 0.0:
            raise ValueError("gamma and g must be non-negative")

    def detunings(self) -> tuple[float, float]:
        """(omega_c - omega_p, omega_0 - omega_p)."""
        return self.omega_c - self.omega_p, self.omega_0 - self.omega_p


@dataclass(frozen=True)
class PhasePair:
    """Reflection phases of the coupled and empty cavity, in (-pi, pi]."""

    phi: float
    phi_0: float

    def __post_init__(self):
        for value in (self.phi, self.phi_0):
            if not -math.pi < value <= math.pi:
                raise ValueError("phases must lie in (-pi, pi]")


def _principal(angle: float) -> float:
    # cmath.phase returns [-pi, pi]; fold the open end onto +pi
    return math.pi if angle <= -math.pi else angle


def reflection_coefficient(params: CavityParams) -> complex:
    """Steady-state reflection amplitude of the coupled cavity."""
    dc, d0 = params.detunings()
    atom = 1j * d0 + params.gamma / 2.0
    g2 = params.g * params.g
    numerator = (1j * dc - params.kappa / 2.0) * atom + g2
    denominator = (1j * dc + params.kappa / 2.0) * atom + g2
    if abs(denominator) < SINGULAR_TOLERANCE:
        raise SingularParameterError(
            "reflection denominator vanishes; move the probe off the "
            "bare atomic resonance or give the atom a linewidth"
        )
    return numerator / denominator


def empty_cavity_reflection(params: CavityParams) -> complex:
    """Reflection amplitude with the atom decoupled (g = 0)."""
    dc, _ = params.detunings()
    return (1j * dc - params.kappa / 2.0) / (1j * dc + params.kappa / 2.0)


def phase_pair(params: CavityParams) -> PhasePair:
    """Arguments of the coupled and empty reflection amplitudes."""
    return PhasePair(
        phi=_principal(cmath.phase(reflection_coefficient(params))),
        phi_0=_principal(cmath.phase(empty_cavity_reflection(params))),
    )


def faraday_angles(phases: PhasePair) -> tuple[float, float]:
    """Polarization rotation angles for the two atomic ground states.

    Returns ``(theta_minus, theta_plus)``; they are exact negatives of
    each other by construction.
    """
    theta_minus = (phases.phi_0 - phases.phi) / 2.0
    return theta_minus, -theta_minus


def ideal_operating_point(kappa: float, omega_c: float = 1.0) -> CavityParams:
    """The resonant, lossless point that yields ``r = -1`` and ``r0 = i``."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    return CavityParams(
        omega_c=omega_c,
        omega_0=omega_c,
        omega_p=omega_c - kappa / 2.0,
        kappa=kappa,
        gamma=0.0,
        g=kappa / 2.0,
    )


def gate_phase_error(params: CavityParams) -> float:
    """Distance of the reflections from the ideal pair (-1, i).

    ``max(|r + 1|, |r0 - i|)``; zero exactly at the ideal operating point,
    and a convenient scalar for sweeps over coupling or detuning.
    """
    r = reflection_coefficient(params)
    r0 = empty_cavity_reflection(params)
    return max(abs(r + 1.0), abs(r0 - 1j))
