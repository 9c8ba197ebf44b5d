import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faraday_ecp.states import (
    BasisConfig,
    BasisError,
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

from conftest import FixedRng, unitary_2x2

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def pair_state(alpha, beta):
    """alpha |gL gR> + beta |gR gL>."""
    return make_state(
        [((None, ("gL", "gR")), alpha), ((None, ("gR", "gL")), beta)]
    )


def photon_plus():
    return make_state([(("L", ()), 1.0), (("R", ()), 1.0)])


# -- strategies ---------------------------------------------------------

amplitudes = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=10.0, allow_nan=False, allow_infinity=False
)


@st.composite
def sparse_states(draw, max_atoms=3, with_photon=None):
    n_atoms = draw(st.integers(min_value=1, max_value=max_atoms))
    has_photon = draw(st.booleans()) if with_photon is None else with_photon
    basis = draw(st.sampled_from(["LR", "HV"])) if has_photon else None
    photon_labels = {"LR": ("L", "R"), "HV": ("H", "V")}.get(basis, (None,))
    configs = st.tuples(
        st.sampled_from(photon_labels),
        st.tuples(*[st.sampled_from(["gL", "gR"]) for _ in range(n_atoms)]),
    )
    terms = draw(
        st.lists(st.tuples(configs, amplitudes), min_size=1, max_size=6, unique_by=lambda t: t[0])
    )
    return make_state(terms)


angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


# -- construction -------------------------------------------------------

class TestMakeState:
    def test_normalizes_photon_superposition(self):
        state = photon_plus()
        assert state.amplitude(("L", ())) == pytest.approx(INV_SQRT2)
        assert state.amplitude(("R", ())) == pytest.approx(INV_SQRT2)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_keeps_normalized_input(self):
        alpha, beta = math.sqrt(0.8), math.sqrt(0.2)
        state = pair_state(alpha, beta)
        assert state.amplitude((None, ("gL", "gR"))) == pytest.approx(alpha)
        assert state.amplitude((None, ("gR", "gL"))) == pytest.approx(beta)

    def test_sums_duplicate_configs(self):
        state = make_state(
            [((None, ("gL",)), 0.5), ((None, ("gL",)), 0.5), ((None, ("gR",)), 1.0)]
        )
        assert state.amplitude((None, ("gL",))) == pytest.approx(INV_SQRT2)

    def test_duplicate_cancellation_drops_term(self):
        state = make_state(
            [((None, ("gL",)), 1.0), ((None, ("gL",)), -1.0), ((None, ("gR",)), 1.0)]
        )
        assert len(state) == 1
        assert state.amplitude((None, ("gR",))) == pytest.approx(1.0)

    def test_all_zero_amplitudes_rejected(self):
        with pytest.raises(StateConstructionError):
            make_state([((None, ("gL",)), 0.0)])

    def test_empty_terms_rejected(self):
        with pytest.raises(StateConstructionError):
            make_state([])

    def test_inconsistent_register_size_rejected(self):
        with pytest.raises(ShapeError):
            make_state([((None, ("gL",)), 1.0), ((None, ("gL", "gR")), 1.0)])

    def test_inconsistent_photon_presence_rejected(self):
        with pytest.raises(ShapeError):
            make_state([(("L", ("gL",)), 1.0), ((None, ("gL",)), 1.0)])

    def test_mixed_photon_bases_rejected(self):
        with pytest.raises(ShapeError):
            make_state([(("L", ()), 1.0), (("H", ()), 1.0)])

    def test_unknown_labels_rejected(self):
        with pytest.raises(ShapeError):
            make_state([(("X", ()), 1.0)])
        with pytest.raises(ShapeError):
            make_state([((None, ("up",)), 1.0)])

    @given(sparse_states())
    def test_norm_is_one(self, state):
        assert state.norm() == pytest.approx(1.0, abs=1e-9)

    @given(sparse_states())
    def test_no_subdrop_amplitudes_survive(self, state):
        assert all(abs(a) > 1e-12 for a in state.terms.values())


# -- tensor -------------------------------------------------------------

class TestTensor:
    def test_photon_times_pair_times_aux(self):
        alpha, beta = math.sqrt(0.7), math.sqrt(0.3)
        aux = make_state([((None, ("gL",)), beta), ((None, ("gR",)), alpha)])
        joint = tensor(tensor(photon_plus(), pair_state(alpha, beta)), aux)
        assert len(joint) == 8
        assert joint.register_size == 3
        # spot-check two amplitudes of the product
        assert joint.amplitude(("L", ("gL", "gR", "gR"))) == pytest.approx(
            INV_SQRT2 * alpha * alpha
        )
        assert joint.amplitude(("R", ("gR", "gL", "gL"))) == pytest.approx(
            INV_SQRT2 * beta * beta
        )
        assert joint.norm() == pytest.approx(1.0, abs=1e-12)

    def test_two_photons_rejected(self):
        with pytest.raises(ShapeError):
            tensor(photon_plus(), photon_plus())

    def test_order_of_atoms(self):
        left = make_state([((None, ("gL",)), 1.0)])
        right = make_state([((None, ("gR",)), 1.0)])
        assert tensor(left, right).amplitude((None, ("gL", "gR"))) == pytest.approx(1.0)
        assert tensor(right, left).amplitude((None, ("gR", "gL"))) == pytest.approx(1.0)

    def test_photon_slot_comes_from_either_operand(self):
        atom = make_state([((None, ("gL",)), 1.0)])
        joint = tensor(atom, photon_plus())
        assert joint.photon_present and joint.photon_basis == "LR"
        assert joint.amplitude(("L", ("gL",))) == pytest.approx(INV_SQRT2)

    @given(sparse_states(with_photon=False), sparse_states(with_photon=False))
    def test_tensor_preserves_normalization(self, a, b):
        assert tensor(a, b).norm() == pytest.approx(1.0, abs=1e-9)


# -- single-site unitaries ----------------------------------------------

class TestApplyUnitary:
    def test_hadamard_on_atom(self):
        state = make_state([((None, ("gL",)), 1.0)])
        h = np.array([[1, 1], [1, -1]]) * INV_SQRT2
        rotated = apply_single_site_unitary(state, 0, h)
        assert rotated.amplitude((None, ("gL",))) == pytest.approx(INV_SQRT2)
        assert rotated.amplitude((None, ("gR",))) == pytest.approx(INV_SQRT2)

    def test_hadamard_involution(self):
        state = pair_state(math.sqrt(0.6), math.sqrt(0.4))
        h = np.array([[1, 1], [1, -1]]) * INV_SQRT2
        twice = apply_single_site_unitary(apply_single_site_unitary(state, 1, h), 1, h)
        assert fidelity(twice, state) == pytest.approx(1.0, abs=1e-12)

    def test_photon_site_uses_basis_order(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        swapped = apply_single_site_unitary(photon_plus(), "photon", x)
        assert fidelity(swapped, photon_plus()) == pytest.approx(1.0, abs=1e-12)
        only_l = make_state([(("L", ()), 1.0)])
        assert apply_single_site_unitary(only_l, "photon", x).amplitude(
            ("R", ())
        ) == pytest.approx(1.0)

    def test_non_unitary_rejected(self):
        state = make_state([((None, ("gL",)), 1.0)])
        with pytest.raises(ValueError):
            apply_single_site_unitary(state, 0, np.array([[1, 0], [0, 2.0]]))

    def test_wrong_shape_rejected(self):
        state = make_state([((None, ("gL",)), 1.0)])
        with pytest.raises(ShapeError):
            apply_single_site_unitary(state, 0, np.eye(3))

    def test_missing_photon_rejected(self):
        state = make_state([((None, ("gL",)), 1.0)])
        with pytest.raises(ShapeError):
            apply_single_site_unitary(state, "photon", np.eye(2))

    def test_out_of_range_site_rejected(self):
        state = make_state([((None, ("gL",)), 1.0)])
        with pytest.raises(ShapeError):
            apply_single_site_unitary(state, 1, np.eye(2))

    @given(sparse_states(), angles, angles, angles, st.integers(min_value=0, max_value=2))
    @settings(max_examples=60)
    def test_unitary_preserves_norm(self, state, theta, phi, lam, site_pick):
        site = site_pick % state.register_size
        rotated = apply_single_site_unitary(state, site, unitary_2x2(theta, phi, lam))
        assert rotated.norm() == pytest.approx(1.0, abs=1e-9)


# -- fidelity ------------------------------------------------------------

class TestFidelity:
    def test_self_fidelity_is_one(self):
        state = pair_state(math.sqrt(0.8), math.sqrt(0.2))
        assert fidelity(state, state) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_bell_like_pair(self):
        plus = pair_state(INV_SQRT2, INV_SQRT2)
        minus = pair_state(INV_SQRT2, -INV_SQRT2)
        assert fidelity(plus, minus) == pytest.approx(0.0, abs=1e-12)

    def test_global_phase_invariance(self):
        alpha, beta = math.sqrt(0.3), math.sqrt(0.7)
        rotated = pair_state(alpha * 1j, beta * 1j)
        assert fidelity(pair_state(alpha, beta), rotated) == pytest.approx(1.0, abs=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            fidelity(pair_state(1.0, 1.0), make_state([((None, ("gL",)), 1.0)]))
        with pytest.raises(ShapeError):
            fidelity(photon_plus(), make_state([(("H", ()), 1.0)]))

    @given(sparse_states(), angles)
    def test_phase_invariance_property(self, state, phase):
        rotated = make_state(
            [(config, amp * np.exp(1j * phase)) for config, amp in state.terms.items()]
        )
        assert fidelity(state, rotated) == pytest.approx(1.0, abs=1e-9)

    @given(sparse_states(max_atoms=2))
    def test_fidelity_bounded(self, state):
        other = make_state([(c, a * (1 + 0.5j)) for c, a in list(state.terms.items())[:1]])
        if other.register_size != state.register_size:
            return
        value = fidelity(state, other)
        assert 0.0 <= value <= 1.0


# -- measurement ---------------------------------------------------------

class TestOutcomeProbabilities:
    def test_pair_state_weights(self):
        probs = outcome_probabilities(pair_state(math.sqrt(0.8), math.sqrt(0.2)), (0, 1))
        assert probs[("gL", "gR")] == pytest.approx(0.8, abs=1e-12)
        assert probs[("gR", "gL")] == pytest.approx(0.2, abs=1e-12)

    def test_canonical_order(self):
        probs = outcome_probabilities(pair_state(1.0, 1.0), (0,))
        assert list(probs) == [("gL",), ("gR",)]

    def test_marginal_on_one_site(self):
        probs = outcome_probabilities(pair_state(math.sqrt(0.7), math.sqrt(0.3)), (1,))
        assert probs[("gR",)] == pytest.approx(0.7, abs=1e-12)

    @given(sparse_states())
    def test_completeness(self, state):
        sites = (0,) if state.register_size else ("photon",)
        probs = outcome_probabilities(state, sites)
        assert math.fsum(probs.values()) == pytest.approx(1.0, abs=1e-9)

    def test_duplicate_sites_rejected(self):
        with pytest.raises(ShapeError):
            outcome_probabilities(pair_state(1.0, 1.0), (0, 0))


class TestMeasure:
    def test_scripted_draw_picks_by_cumulative_weight(self):
        state = pair_state(math.sqrt(0.8), math.sqrt(0.2))
        # canonical order: (gL, gR) with weight 0.8 first
        low = measure(state, (0, 1), FixedRng([0.5]))
        assert low.outcome == ("gL", "gR")
        assert low.probability == pytest.approx(0.8, abs=1e-12)
        high = measure(state, (0, 1), FixedRng([0.9]))
        assert high.outcome == ("gR", "gL")
        assert high.probability == pytest.approx(0.2, abs=1e-12)

    def test_post_state_projected_and_normalized(self):
        state = pair_state(math.sqrt(0.8), math.sqrt(0.2))
        record = measure(state, (0,), FixedRng([0.0]))
        assert record.outcome == ("gL",)
        assert record.post_state.amplitude((None, ("gL", "gR"))) == pytest.approx(1.0)
        assert record.post_state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_measurement_idempotent(self):
        state = pair_state(math.sqrt(0.55), math.sqrt(0.45))
        first = measure(state, (0, 1), FixedRng([0.7]))
        again = measure(first.post_state, (0, 1), FixedRng([0.999999]))
        assert again.outcome == first.outcome
        assert again.probability == pytest.approx(1.0, abs=1e-9)

    def test_draw_at_boundary_falls_through_to_last(self):
        state = pair_state(INV_SQRT2, INV_SQRT2)
        record = measure(state, (0,), FixedRng([1.0 - 1e-16]))
        assert record.outcome == ("gR",)

    def test_empirical_frequencies_converge(self):
        from faraday_ecp.rng import trial_stream

        state = pair_state(math.sqrt(0.8), math.sqrt(0.2))
        rng = trial_stream(5, 0)
        n = 20_000
        hits = sum(
            1 for _ in range(n) if measure(state, (0, 1), rng).outcome == ("gL", "gR")
        )
        sigma = math.sqrt(0.8 * 0.2 / n)
        assert abs(hits / n - 0.8) < 5 * sigma

    def test_measuring_absent_photon_rejected(self):
        with pytest.raises(ShapeError):
            measure(pair_state(1.0, 1.0), ("photon",), FixedRng([0.1]))
