# SPDX-License-Identifier: MIT-0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lib.channels import (
    CERTIFIED_NONPOSITIVE, NUMERICALLY_POSITIVE, PAULI_X, PAULI_Z, QuantumMap, adjoint, apply,
    apply_by_teleportation, apply_kraus, channel_fidelity_bound, channel_from_kraus, choi_from_function, choi_of,
    classify, compose, depolarizing_map, fidelity_samples, ha_map, identity_map, kraus_from_choi, make_named_map,
    random_channel, reduction_map, registry_entries, tensor_maps, tensor_with_identity, transpose_map, unot_map,
)
from lib.errors import DimensionError, NotCompletelyPositiveError, ParameterError
from lib.states import EXAMPLE_QUBIT, max_entangled, random_pure_ket, random_state, sym_antisym_projectors
from lib.tensor_core import min_eigenvalue, swap_operator

from .conftest import seeds

REGISTRY_SAMPLES = [
    ('identity', {'d': 3}, True),
    ('transpose', {'d': 3}, True),
    ('reduction', {'d': 3}, True),
    ('choi_map', {}, True),
    ('ha_map', {'a': 1, 'b': 1, 'c': 1, 'theta': np.pi / 6}, False),
    ('inversion', {'d': 2}, False),
    ('depolarize', {'d_in': 2, 'd_out': 3}, True),
    ('partial_depolarize', {'d': 3, 'p': 0.4}, True),
    ('unot', {}, True),
    ('pauli_xz', {}, True),
    ('breuer_hall', {'d': 4}, True),
]


class TestChoi:
    def test_identity_choi_is_max_entangled(self):
        np.testing.assert_allclose(identity_map(2).choi, max_entangled(2).matrix, atol=1e-15)

    def test_transpose_choi_is_swap(self, transpose2):
        np.testing.assert_allclose(transpose2.choi, swap_operator(2) / 2, atol=1e-15)
        assert min_eigenvalue(transpose2.choi) == pytest.approx(-0.5)

    def test_ragged_table(self):
        with pytest.raises(DimensionError):
            choi_of([[np.eye(2), np.eye(2)], [np.eye(2)]])

    def test_non_hermitian_choi_rejected(self):
        with pytest.raises(ParameterError):
            QuantumMap(2, 2, np.triu(np.ones((4, 4))))

    def test_choi_is_frozen(self, transpose2):
        with pytest.raises(ValueError):
            transpose2.choi[0, 0] = 1


class TestApply:
    def test_transpose_of_example_qubit(self, transpose2):
        np.testing.assert_allclose(apply(transpose2, EXAMPLE_QUBIT), EXAMPLE_QUBIT.T, atol=1e-14)

    def test_depolarizing(self, rng):
        rho = random_state((3,), rng)
        np.testing.assert_allclose(apply(depolarizing_map(3, 2), rho), np.eye(2) / 2, atol=1e-14)

    def test_shape_checked(self, transpose2):
        with pytest.raises(DimensionError):
            apply(transpose2, np.eye(3))

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_teleportation_reading(self, seed):
        channel = random_channel(2, 3, 2, seed % (2 ** 32))
        rho = random_state((2,), seed)
        np.testing.assert_allclose(apply_by_teleportation(channel, rho), apply(channel, rho), atol=1e-10)

    def test_tensor_maps_act_factorwise(self, rng):
        f, g = random_channel(2, 2, 2, 1), transpose_map(3)
        a, b = random_state((2,), rng).matrix, random_state((3,), rng).matrix
        np.testing.assert_allclose(apply(tensor_maps(f, g), np.kron(a, b)), np.kron(apply(f, a), apply(g, b)),
                                   atol=1e-12)

    def test_identity_extension_of_transpose_is_partial_transpose(self):
        extended = tensor_with_identity(transpose_map(2), 2)
        np.testing.assert_allclose(apply(extended, max_entangled(2)), swap_operator(2) / 2, atol=1e-14)

    def test_compose(self, rng):
        rho = random_state((2,), rng).matrix
        twice = compose(transpose_map(2), transpose_map(2))
        np.testing.assert_allclose(apply(twice, rho), rho, atol=1e-14)

    def test_adjoint_duality(self, rng):
        channel = random_channel(2, 3, 2, 5)
        x = random_state((2,), rng).matrix
        y = random_state((3,), rng).matrix
        lhs = np.trace(apply(channel, x) @ y)
        rhs = np.trace(x @ apply(adjoint(channel), y))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(seeds, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
    def test_linear(self, seed, alpha, beta):
        rng = np.random.default_rng(seed)
        channel = random_channel(3, 2, 2, seed)
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        combined = apply(channel, alpha * x + beta * y)
        np.testing.assert_allclose(combined, alpha * apply(channel, x) + beta * apply(channel, y), atol=1e-9)
        np.testing.assert_allclose(apply(transpose_map(3), alpha * x + beta * y), alpha * x.T + beta * y.T,
                                   atol=1e-9)


class TestClassify:
    def test_transpose(self, transpose2):
        report = classify(transpose2)
        assert not report.is_cp
        assert report.is_tp
        assert report.is_unital
        assert report.min_choi_eigenvalue == pytest.approx(-0.5)
        assert report.positivity_estimate.status == NUMERICALLY_POSITIVE

    def test_inversion_certified_nonpositive(self):
        report = classify(make_named_map('inversion', {'d': 2}))
        estimate = report.positivity_estimate
        assert estimate.status == CERTIFIED_NONPOSITIVE
        image = apply(make_named_map('inversion', {'d': 2}), np.outer(estimate.input_ket, estimate.input_ket.conj()))
        assert (estimate.output_ket.conj() @ image @ estimate.output_ket).real < 0

    def test_random_channel_is_cptp(self):
        report = classify(random_channel(3, 2, 3, 11))
        assert report.is_cp and report.is_tp

    def test_depolarizing_not_unital_across_dims(self):
        report = classify(depolarizing_map(2, 3))
        assert report.is_tp
        assert not report.is_unital

    def test_choi_map_positive_not_cp(self):
        report = classify(make_named_map('choi_map'))
        assert not report.is_cp
        assert report.positivity_estimate.minimum >= -1e-9


class TestKraus:
    def test_round_trip(self):
        channel = random_channel(2, 2, 3, 7)
        kraus = kraus_from_choi(channel)
        assert kraus.completeness_deviation() < 1e-10
        assert len(kraus) <= 4
        np.testing.assert_allclose(channel_from_kraus(kraus.operators).choi, channel.choi, atol=1e-12)

    def test_pauli_xz_kraus(self, rng):
        rho = random_state((2,), rng).matrix
        kraus = kraus_from_choi(make_named_map('pauli_xz'))
        expected = (rho + PAULI_X @ rho @ PAULI_X + PAULI_Z @ rho @ PAULI_Z) / 3
        np.testing.assert_allclose(apply_kraus(kraus, rho), expected, atol=1e-12)

    def test_not_cp(self, transpose2):
        with pytest.raises(NotCompletelyPositiveError):
            kraus_from_choi(transpose2)


class TestFidelityBound:
    def test_spa_transpose_against_depolarization(self):
        spa_transpose = QuantumMap(2, 2, sym_antisym_projectors(2)[0] / 3)
        assert channel_fidelity_bound(spa_transpose, depolarizing_map(2, 2)) == pytest.approx(0.5)

    def test_identical(self):
        assert channel_fidelity_bound(identity_map(2), identity_map(2)) == pytest.approx(1.0)

    def test_sampled_worst_respects_bound(self):
        a, b = random_channel(2, 2, 2, 3), random_channel(2, 2, 2, 4)
        samples = fidelity_samples(a, b, samples=50, seed=0)
        assert samples.worst >= channel_fidelity_bound(a, b) - 1e-9
        assert samples.worst <= samples.average


class TestRegistry:
    def test_entries_sorted(self):
        names = [entry['name'] for entry in registry_entries()]
        assert names == sorted(names)
        assert {'transpose', 'reduction', 'choi_map', 'ha_map', 'pauli_xz'} <= set(names)

    def test_missing_parameter(self):
        with pytest.raises(ParameterError):
            make_named_map('transpose')

    def test_unknown(self):
        with pytest.raises(ParameterError):
            make_named_map('teleport', {'d': 2})

    def test_ha_map_raw_trace(self):
        assert ha_map(1, 1, 1, 0.0).trace == pytest.approx(3.0)

    def test_ha_map_negative_coefficient(self):
        with pytest.raises(ParameterError):
            ha_map(-1, 1, 1, 0.0)

    def test_choi_from_function_matches_table(self):
        built = choi_from_function(lambda x: x.T, 3)
        np.testing.assert_allclose(built.choi, transpose_map(3).choi)

    def test_breuer_hall_is_unital_positive_not_cp(self):
        report = classify(make_named_map('breuer_hall', {'d': 4}), starts=8)
        assert report.is_unital and report.is_tp
        assert not report.is_cp

    @pytest.mark.parametrize('name, params, trace_preserving', REGISTRY_SAMPLES)
    def test_choi_round_trip(self, name, params, trace_preserving):
        quantum_map = make_named_map(name, params)
        rebuilt = choi_from_function(lambda x: apply(quantum_map, x), quantum_map.d_in)
        np.testing.assert_allclose(rebuilt.choi, quantum_map.choi, atol=1e-12)

    @pytest.mark.parametrize('name, params, trace_preserving', REGISTRY_SAMPLES)
    def test_trace_preservation(self, name, params, trace_preserving, rng):
        quantum_map = make_named_map(name, params)
        assert classify(quantum_map, starts=2).is_tp == trace_preserving
        if trace_preserving:
            rho = random_state((quantum_map.d_in,), rng)
            assert np.trace(apply(quantum_map, rho)).real == pytest.approx(1.0, abs=1e-12)

    def test_samples_cover_registry(self):
        assert {sample[0] for sample in REGISTRY_SAMPLES} == {entry['name'] for entry in registry_entries()}


class TestUnot:
    def test_equals_qubit_reduction(self):
        np.testing.assert_allclose(unot_map().choi, reduction_map(2).choi, atol=1e-15)

    def test_choi(self):
        expected = np.eye(4) / 2 - max_entangled(2).matrix
        np.testing.assert_allclose(unot_map().choi, expected, atol=1e-15)
        assert min_eigenvalue(unot_map().choi) == pytest.approx(-0.5)

    def test_involution(self):
        np.testing.assert_allclose(compose(unot_map(), unot_map()).choi, identity_map(2).choi, atol=1e-14)

    def test_flips_pure_states(self, rng):
        ket = random_pure_ket(2, rng)
        image = apply(unot_map(), np.outer(ket, ket.conj()))
        assert np.vdot(ket, image @ ket).real == pytest.approx(0.0, abs=1e-12)
        assert np.trace(image).real == pytest.approx(1.0)
