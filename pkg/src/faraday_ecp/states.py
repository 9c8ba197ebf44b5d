"""Sparse pure states over one photon mode and a register of atomic qubits.

A state is a map from basis configurations to complex amplitudes.  Nothing
in the concentration protocol grows a state past a handful of terms, so
the map representation scales to registers of hundreds of atoms where a
dense vector could not.

Conventions:

* The photon is written in one of two basis families, circular (``L``/``R``)
  or linear (``H``/``V``).  A state records which family it uses; the two
  families never mix inside one state.
* Atoms are labelled by the ground sublevels ``gL`` and ``gR``.
* States are immutable values and every operation returns a new state.
  The caller-owned ``rng`` consumed by :func:`measure` is the only
  stateful input in the package.
* State identity is physical, not numeric: compare with :func:`fidelity`,
  which ignores global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, NamedTuple

import numpy as np

PHOTON_SITE = "photon"
ATOM_LABELS = ("gL", "gR")

_BASIS_OF_LABEL = {"L": "LR", "R": "LR", "H": "HV", "V": "HV"}
_BASIS_ORDER = {"LR": ("L", "R"), "HV": ("H", "V")}

#: amplitudes with squared modulus below this squared are dropped
DROP_TOLERANCE = 1e-12
#: permitted deviation of a squared norm from one
NORM_TOLERANCE = 1e-9
_UNITARY_TOLERANCE = 1e-9


class StateConstructionError(ValueError):
    """A term list cannot form a valid normalized state."""


class ShapeError(ValueError):
    """Operands or site lists disagree about the state layout."""


class BasisError(ValueError):
    """An operation met the wrong photon basis family."""


class BasisConfig(NamedTuple):
    """One basis ket: optional photon label plus the atom label tuple."""

    photon: str | None
    atoms: tuple[str, ...]


def _abs2(z: complex) -> float:
    # re^2 + im^2 rather than abs()**2 so both backends round identically
    return z.real * z.real + z.imag * z.imag


def _coerce_config(config) -> BasisConfig:
    try:
        photon, atoms = config
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"config must be (photon, atoms), got {config!r}") from exc
    if photon is not None and photon not in _BASIS_OF_LABEL:
        raise ShapeError(f"unknown photon label {photon!r}")
    atoms = tuple(atoms)
    for label in atoms:
        if label not in ATOM_LABELS:
            raise ShapeError(f"unknown atom label {label!r}")
    return BasisConfig(photon, atoms)


class PureState:
    """Normalized sparse pure state.  Build through :func:`make_state`."""

    __slots__ = ("_terms", "register_size", "photon_present", "photon_basis")

    def __init__(self, terms: dict, register_size: int, photon_basis: str | None):
        # internal constructor: terms must already be validated and normalized
        self._terms = terms
        self.register_size = register_size
        self.photon_present = photon_basis is not None
        self.photon_basis = photon_basis

    @property
    def terms(self) -> dict:
        """Copy of the config -> amplitude map."""
        return dict(self._terms)

    def amplitude(self, config) -> complex:
        return self._terms.get(_coerce_config(config), 0j)

    def norm(self) -> float:
        return math.sqrt(math.fsum(_abs2(a) for a in self._terms.values()))

    def sorted_items(self) -> list:
        """Terms in canonical (sorted config) order."""
        return sorted(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{c.photon or '-'}|{''.join(a[1] for a in c.atoms)}: {amp:.4f}"
            for c, amp in self.sorted_items()
        )
        return f"PureState({inner})"


def make_state(terms: Iterable) -> PureState:
    """Build a normalized state from ``(config, amplitude)`` pairs.

    Amplitudes of duplicate configs are summed before normalizing.  All
    configs must agree on photon presence, photon basis family, and
    register size; violations raise :class:`ShapeError`.  A term list
    whose total weight vanishes raises :class:`StateConstructionError`.
    """
    accum: dict[BasisConfig, complex] = {}
    register_size: int | None = None
    photon_basis: str | None = None
    photon_present: bool | None = None
    for raw_config, raw_amp in terms:
        config = _coerce_config(raw_config)
        if register_size is None:
            register_size = len(config.atoms)
            photon_present = config.photon is not None
            photon_basis = _BASIS_OF_LABEL[config.photon] if photon_present else None
        else:
            if len(config.atoms) != register_size:
                raise ShapeError("configs disagree on register size")
            if (config.photon is not None) != photon_present:
                raise ShapeError("configs disagree on photon presence")
            if photon_present and _BASIS_OF_LABEL[config.photon] != photon_basis:
                raise ShapeError("configs mix photon basis families")
        accum[config] = accum.get(config, 0j) + complex(raw_amp)
    if register_size is None:
        raise StateConstructionError("state needs at least one term")
    return _finalize(accum, register_size, photon_basis)


def _finalize(accum: dict, register_size: int, photon_basis: str | None) -> PureState:
    norm2 = math.fsum(_abs2(a) for a in accum.values())
    if norm2 <= 0.0:
        raise StateConstructionError("all amplitudes vanish")
    inv = 1.0 / math.sqrt(norm2)
    kept = {}
    for config, amp in accum.items():
        amp = amp * inv
        if _abs2(amp) > DROP_TOLERANCE * DROP_TOLERANCE:
            kept[config] = amp
    if not kept:
        raise StateConstructionError("all amplitudes vanish")
    return PureState(kept, register_size, photon_basis)


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; ``a``'s atoms precede ``b``'s in the new register.

    At most one operand may carry a photon (the protocol never holds two),
    and the product keeps that operand's basis family.
    """
    if a.photon_present and b.photon_present:
        raise ShapeError("both operands carry a photon")
    photon_basis = a.photon_basis or b.photon_basis
    size = a.register_size + b.register_size
    out: dict[BasisConfig, complex] = {}
    for ca, xa in a._terms.items():
        for cb, xb in b._terms.items():
            photon = ca.photon if ca.photon is not None else cb.photon
            out[BasisConfig(photon, ca.atoms + cb.atoms)] = xa * xb
    return _finalize(out, size, photon_basis)


def _site_labels(state: PureState, site) -> tuple:
    if site == PHOTON_SITE:
        if not state.photon_present:
            raise ShapeError("state carries no photon")
        return _BASIS_ORDER[state.photon_basis]
    if not isinstance(site, (int, np.integer)):
        raise ShapeError(f"site must be an atom index or {PHOTON_SITE!r}")
    if not 0 <= site < state.register_size:
        raise ShapeError(f"atom index {site} outside register of {state.register_size}")
    return ATOM_LABELS


def _config_label(config: BasisConfig, site) -> str:
    return config.photon if site == PHOTON_SITE else config.atoms[site]


def _replace_label(config: BasisConfig, site, label: str) -> BasisConfig:
    if site == PHOTON_SITE:
        return BasisConfig(label, config.atoms)
    atoms = list(config.atoms)
    atoms[site] = label
    return BasisConfig(config.photon, tuple(atoms))


def apply_single_site_unitary(state: PureState, site, u) -> PureState:
    """Apply a 2x2 unitary to one site (an atom index or ``"photon"``).

    The matrix acts in the site's label order, ``(gL, gR)`` for atoms and
    ``(L, R)`` or ``(H, V)`` for the photon.  Non-unitary input is
    rejected rather than silently denormalizing the state.
    """
    labels = _site_labels(state, site)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > _UNITARY_TOLERANCE:
        raise ValueError("matrix is not unitary")
    index = {labels[0]: 0, labels[1]: 1}
    out: dict[BasisConfig, complex] = {}
    for config, amp in state._terms.items():
        col = index[_config_label(config, site)]
        for row in (0, 1):
            scaled = u[row, col] * amp
            if scaled == 0:
                continue
            new_config = _replace_label(config, site, labels[row])
            out[new_config] = out.get(new_config, 0j) + scaled
    return _finalize(out, state.register_size, state.photon_basis)


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2, insensitive to global phase, clipped to [0, 1]."""
    if (
        a.register_size != b.register_size
        or a.photon_present != b.photon_present
        or a.photon_basis != b.photon_basis
    ):
        raise ShapeError("states live on different registers")
    overlap = 0j
    for config, amp in a._terms.items():
        other = b._terms.get(config)
        if other is not None:
            overlap += amp.conjugate() * other
    return min(max(_abs2(overlap), 0.0), 1.0)


def _validate_sites(state: PureState, sites: Sequence) -> tuple:
    sites = tuple(sites)
    if not sites:
        raise ShapeError("need at least one site to measure")
    if len(set(sites)) != len(sites):
        raise ShapeError("duplicate sites in measurement")
    for site in sites:
        _site_labels(state, site)
    return sites


def outcome_probabilities(state: PureState, sites: Sequence) -> dict:
    """Born weights for a projective measurement of ``sites``.

    Returns outcome tuple -> probability in canonical (sorted) outcome
    order.  Weights are accumulated over configs in canonical order so
    every backend reproduces the same floating-point values.
    """
    sites = _validate_sites(state, sites)
    buckets: dict[tuple, float] = {}
    for config, amp in state.sorted_items():
        outcome = tuple(_config_label(config, s) for s in sites)
        buckets[outcome] = buckets.get(outcome, 0.0) + _abs2(amp)
    return {outcome: buckets[outcome] for outcome in sorted(buckets)}


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one projective measurement."""

    sites: tuple
    outcome: tuple
    probability: float
    post_state: PureState


def measure(state: PureState, sites: Sequence, rng) -> MeasurementRecord:
    """Projective measurement of ``sites``, sampled with ``rng.random()``.

    One uniform draw picks the outcome by cumulative weight over the
    canonical outcome order.  The post state keeps the measured sites
    (so measuring again returns the same outcome with probability one).
    """
    sites = _validate_sites(state, sites)
    probabilities = outcome_probabilities(state, sites)
    u = rng.random()
    cumulative = 0.0
    outcomes = list(probabilities)
    picked = outcomes[-1]  # guard against cumulative rounding below 1
    for outcome in outcomes:
        cumulative += probabilities[outcome]
        if u < cumulative:
            picked = outcome
            break
    kept = [
        (config, amp)
        for config, amp in state.sorted_items()
        if tuple(_config_label(config, s) for s in sites) == picked
    ]
    post = _finalize(dict(kept), state.register_size, state.photon_basis)
    return MeasurementRecord(sites, picked, probabilities[picked], post)
