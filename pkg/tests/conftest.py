import math

import numpy as np


class FixedRng:
    """Scripted rng stub: returns queued uniforms, errors when exhausted."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)


def unitary_2x2(theta: float, phi: float, lam: float) -> np.ndarray:
    """Unitary by construction from three angles."""
    return np.array(
        [
            [math.cos(theta), -np.exp(1j * lam) * math.sin(theta)],
            [np.exp(1j * phi) * math.sin(theta), np.exp(1j * (phi + lam)) * math.cos(theta)],
        ]
    )
