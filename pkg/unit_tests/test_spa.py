# SPDX-License-Identifier: MIT-0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lib.channels import QuantumMap, apply, depolarizing_map, make_named_map, random_channel
from lib.designs import design_channel, mub, sic
from lib.errors import NotCompletelyPositiveError, ParameterError
from lib.spa import (
    EB, INCONCLUSIVE, NOT_EB, bisect_mixing, choi_state, conjecture_report, eb_noise_gap, eb_verdict,
    isotropic_scan, measure_prepare_from, mixing_parameter, normalized_map, spa, spa_bipartite, spa_general,
    spa_inversion, spa_locc,
)
from lib.measure_prepare import decomposition_operator
from lib.states import DensityMatrix, max_entangled, random_pure_ket, random_state, sym_antisym_projectors
from lib.tensor_core import min_eigenvalue

from .conftest import seeds


class TestSpa:
    @pytest.mark.parametrize('d', [2, 3, 4, 5, 6])
    def test_transpose_p_star(self, d):
        assert spa(make_named_map('transpose', {'d': d})).p_star == pytest.approx(d / (d + 1), abs=1e-9)

    @pytest.mark.parametrize('d', [2, 3, 4, 5])
    def test_transpose_symmetric_projector(self, d):
        symmetric, _ = sym_antisym_projectors(d)
        result = spa(make_named_map('transpose', {'d': d}))
        np.testing.assert_allclose(result.spa_map.choi, 2 * symmetric / (d * (d + 1)), atol=1e-10)

    def test_qubit_transpose_min_eigenvalue(self, transpose2):
        result = spa(transpose2)
        assert result.negativity == pytest.approx(0.5)
        assert min_eigenvalue(result.spa_map.choi) == pytest.approx(0.0, abs=1e-12)

    def test_cp_input_unchanged(self):
        channel = random_channel(2, 2, 2, 0)
        result = spa(channel)
        assert result.p_star == 0.0
        np.testing.assert_allclose(result.spa_map.choi, channel.choi)

    def test_negative_trace_rejected(self):
        with pytest.raises(ParameterError):
            spa(make_named_map('inversion', {'d': 2}))

    def test_choi_map(self):
        result = spa(make_named_map('choi_map'))
        assert 0.0 < result.p_star < 1.0
        assert min_eigenvalue(result.spa_map.choi) >= -1e-12

    def test_ha_map_is_normalized(self):
        result = spa(make_named_map('ha_map', {'a': 1, 'b': 1, 'c': 1, 'theta': np.pi / 6}))
        assert result.spa_map.trace == pytest.approx(1.0)
        assert min_eigenvalue(result.spa_map.choi) >= -1e-9

    def test_zero_trace_rejected(self):
        with pytest.raises(ParameterError):
            normalized_map(QuantumMap(2, 2, np.diag([1.0, -1.0, 0.0, 0.0])))

    def test_mixing_parameter(self):
        assert mixing_parameter(-0.5, 4) == pytest.approx(2 / 3)
        assert mixing_parameter(0.2, 4) == 0.0

    def test_bisection_matches_closed_form(self, transpose2):
        assert bisect_mixing(transpose2.choi, np.eye(4) / 4) == pytest.approx(2 / 3, abs=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_spa_output_is_psd(self, seed):
        operator = random_state((2, 2), seed).matrix - 0.3 * np.eye(4) / 4
        quantum_map = QuantumMap(2, 2, operator / np.trace(operator).real)
        result = spa(quantum_map)
        assert min_eigenvalue(result.spa_map.choi) >= -1e-9
        assert 0.0 <= result.p_star < 1.0

    @pytest.mark.parametrize('name, params', [
        ('transpose', {'d': 2}), ('transpose', {'d': 3}), ('transpose', {'d': 4}), ('choi_map', {}),
        ('reduction', {'d': 3}),
    ])
    def test_p_star_is_minimal(self, name, params):
        result = spa(make_named_map(name, params))
        chi = normalized_map(result.original).choi
        noise = np.eye(chi.shape[0]) / chi.shape[0]
        below = result.p_star - 1e-6
        assert min_eigenvalue((1 - below) * chi + below * noise) < 0
        assert min_eigenvalue(result.spa_map.choi) >= -1e-12


class TestSpaGeneral:
    def test_maximally_mixed_noise_matches_spa(self, transpose2):
        noise = DensityMatrix(np.eye(2) / 2, (2,))
        assert spa_general(transpose2, noise).p_star == pytest.approx(spa(transpose2).p_star, abs=1e-8)

    def test_biased_noise_needs_more(self, transpose2):
        noise = DensityMatrix(np.diag([0.9, 0.1]), (2,))
        result = spa_general(transpose2, noise)
        assert result.p_star > spa(transpose2).p_star
        assert min_eigenvalue(result.spa_map.choi) >= -1e-12

    def test_rank_deficient_noise(self, transpose2):
        with pytest.raises(ParameterError):
            spa_general(transpose2, DensityMatrix(np.diag([1.0, 0.0]), (2,)))


class TestBipartite:
    def test_transpose(self, transpose2):
        result = spa_bipartite(transpose2)
        assert result.p_star == pytest.approx(8 / 9, abs=1e-12)
        assert result.threshold == pytest.approx(2 / 9, abs=1e-12)

    def test_reduction_matches_transpose(self, reduction2):
        result = spa_bipartite(reduction2)
        assert result.negativity == pytest.approx(0.5)
        assert result.p_star == pytest.approx(8 / 9, abs=1e-12)
        assert result.threshold == pytest.approx(2 / 9, abs=1e-12)

    def test_threshold_relation(self):
        result = spa_bipartite(make_named_map('transpose', {'d': 3}))
        assert result.threshold == pytest.approx(result.p_star / 9, abs=1e-12)

    def test_cp_map_has_zero_threshold(self):
        result = spa_bipartite(random_channel(2, 2, 2, 9))
        assert result.p_star == 0.0 and result.threshold == 0.0

    def test_non_square_threshold(self, embedded_transpose):
        result = spa_bipartite(embedded_transpose)
        assert result.negativity == pytest.approx(0.5)
        assert result.p_star == pytest.approx(12 / 13, abs=1e-12)
        assert result.threshold == pytest.approx(result.p_star / 6, abs=1e-12)
        assert result.spa_map.dims == (4, 6)

    def test_non_square_locc_split(self, embedded_transpose):
        assert spa_locc(embedded_transpose).residual <= 1e-9


class TestLocc:
    def test_transpose_weights(self, transpose2):
        split = spa_locc(transpose2)
        np.testing.assert_allclose(split.weights, (1 / 3, 2 / 3), atol=1e-12)
        np.testing.assert_allclose(split.mixture(), spa_bipartite(transpose2).spa_map.choi, atol=1e-9)

    def test_reduction(self, reduction2):
        split = spa_locc(reduction2)
        assert split.residual <= 1e-9

    def test_inversion_spa_choi(self):
        d = 3
        theta = spa_inversion(d)
        np.testing.assert_allclose(theta.choi, (np.eye(d * d) - max_entangled(d).matrix) / (d * d - 1), atol=1e-14)
        assert min_eigenvalue(theta.choi) >= -1e-12


class TestFourWayAgreement:
    def test_qubit_spa_transpose_realizations(self, transpose2):
        formula = spa(transpose2).spa_map
        pauli = make_named_map('pauli_xz')
        tetrahedron = design_channel(sic(2)).to_map()
        mubs = design_channel(mub(2)).to_map()
        rng = np.random.default_rng(100)
        for _ in range(100):
            rho = random_state((2,), rng)
            expected = apply(formula, rho)
            for channel in (pauli, tetrahedron, mubs):
                np.testing.assert_allclose(apply(channel, rho), expected, atol=1e-9)

    def test_formula_mixture(self, transpose2, rng):
        rho = random_state((2,), rng).matrix
        expected = (1 / 3) * rho.T + (2 / 3) * np.eye(2) / 2
        np.testing.assert_allclose(apply(spa(transpose2).spa_map, rho), expected, atol=1e-12)


class TestEbVerdict:
    def test_qubit_transpose_is_eb(self, transpose2):
        result = spa(transpose2)
        verdict = eb_verdict(result.spa_map, seed=0, max_iter=500)
        assert verdict.status == EB
        assert verdict.certificate['kind'] == 'design_decomposition'
        assert verdict.certificate['design'] == 'sic_identity'
        weights = [term[0] for term in verdict.decomposition]
        assert sum(weights) == pytest.approx(1.0)
        assert min(weights) > 0
        reconstructed = decomposition_operator(verdict.decomposition)
        np.testing.assert_allclose(reconstructed, choi_state(result.spa_map).matrix, atol=1e-10)

    def test_qutrit_transpose_design_certificate(self):
        result = spa(make_named_map('transpose', {'d': 3}))
        verdict = eb_verdict(result.spa_map, seed=0, max_iter=50)
        assert verdict.status == EB
        assert verdict.certificate['kind'] == 'design_decomposition'
        assert verdict.certificate['residual'] < 1e-10
        reconstructed = decomposition_operator(verdict.decomposition)
        np.testing.assert_allclose(reconstructed, choi_state(result.spa_map).matrix, atol=1e-10)

    def test_identity_channel_is_not_eb(self):
        verdict = eb_verdict(make_named_map('identity', {'d': 2}))
        assert verdict.status == NOT_EB
        assert verdict.certificate['kind'] == 'nppt'

    def test_depolarizing_is_eb(self):
        verdict = eb_verdict(depolarizing_map(3, 3), max_iter=10)
        assert verdict.status == EB

    def test_non_cp_rejected(self, transpose2):
        with pytest.raises(NotCompletelyPositiveError):
            eb_verdict(transpose2)

    def test_certificate_is_a_measure_prepare_channel(self):
        result = spa(make_named_map('transpose', {'d': 3}))
        verdict = eb_verdict(result.spa_map)
        channel = measure_prepare_from(verdict.decomposition, d_in=3).to_map()
        np.testing.assert_allclose(channel.choi, result.spa_map.choi, atol=1e-10)


def _product_mixture(dims, seed: int, terms: int = 5) -> QuantumMap:
    rng = np.random.default_rng(seed)
    choi = 0
    for weight in rng.dirichlet(np.ones(terms)):
        ket = np.kron(random_pure_ket(dims[0], rng), random_pure_ket(dims[1], rng))
        choi = choi + weight * np.outer(ket, ket.conj())
    return QuantumMap(dims[0], dims[1], choi, 'product_mixture')


def _assert_certificate_holds(quantum_map: QuantumMap, verdict):
    assert verdict.status == EB
    target = choi_state(quantum_map).matrix
    if verdict.decomposition is None:
        assert verdict.certificate['kind'] == 'ppt_exact_dimension'
        assert verdict.certificate['residual'] >= 1e-8
    else:
        assert np.max(np.abs(decomposition_operator(verdict.decomposition) - target)) < 1e-8


class TestEbCertificates:
    @pytest.mark.parametrize('quantum_map', [
        spa(make_named_map('transpose', {'d': 2})).spa_map,
        spa(make_named_map('transpose', {'d': 3})).spa_map,
        spa(make_named_map('reduction', {'d': 2})).spa_map,
        depolarizing_map(2, 2),
        depolarizing_map(2, 3),
        depolarizing_map(3, 3),
        make_named_map('pauli_xz'),
        design_channel(mub(3)).to_map(),
    ])
    def test_attached_decomposition_rebuilds_choi(self, quantum_map):
        _assert_certificate_holds(quantum_map, eb_verdict(quantum_map, seed=0, max_iter=200))

    @settings(max_examples=8, deadline=None)
    @given(st.sampled_from([(2, 2), (2, 3), (3, 2)]), seeds)
    def test_product_mixtures(self, dims, seed):
        quantum_map = _product_mixture(dims, seed)
        _assert_certificate_holds(quantum_map, eb_verdict(quantum_map, seed=seed, max_iter=60))

    def test_exact_dimension_records_residual(self):
        quantum_map = _product_mixture((2, 3), 11)
        verdict = eb_verdict(quantum_map, seed=0, max_iter=40)
        assert verdict.certificate['kind'] == 'ppt_exact_dimension'
        assert {'residual', 'gilbert_distance', 'gilbert_iterations', 'terms'} <= set(verdict.certificate)
        assert verdict.certificate['terms'] == (0 if verdict.decomposition is None else len(verdict.decomposition))


class TestNoiseGapAndScan:
    def test_qubit_transpose_gap(self, transpose2):
        gap = eb_noise_gap(transpose2)
        assert gap.p_separable == pytest.approx(2 / 3, abs=1e-8)
        assert gap.gap == pytest.approx(0.0, abs=1e-8)

    def test_large_dims_skip_gap(self):
        assert eb_noise_gap(make_named_map('transpose', {'d': 3})) is None

    @pytest.mark.parametrize('d', [2, 3])
    def test_transpose_scan_boundary(self, d):
        scan = isotropic_scan(make_named_map('transpose', {'d': d}))
        assert scan.detects_all_entangled
        assert scan.boundary_estimate == pytest.approx(d / (d + 1), abs=1e-3)


class TestConjectureReport:
    def test_qubit_transpose(self, transpose2):
        report = conjecture_report(transpose2, seed=0, max_iter=200).to_dict()
        assert report['verdict'] == EB
        assert report['p_star'] == pytest.approx(2 / 3)
        assert report['lambda'] == pytest.approx(0.5)
        assert set(report['isotropic_scan']) == {'boundary_estimate', 'grid', 'detects_all_entangled'}

    def test_choi_map_report_validates(self):
        report = conjecture_report(make_named_map('choi_map'), seed=1, max_iter=50)
        assert report.verdict.status in (EB, NOT_EB, INCONCLUSIVE)
        if report.verdict.decomposition is not None:
            residual = np.max(np.abs(decomposition_operator(report.verdict.decomposition)
                                     - choi_state(report.spa_result.spa_map).matrix))
            assert residual < 1e-8

    def test_choi_map_notes_explain_verdict(self):
        report = conjecture_report(make_named_map('choi_map'), seed=1, max_iter=50)
        notes = ' '.join(report.notes)
        boundary = report.isotropic_scan.boundary_estimate
        if boundary is not None:
            assert f'boundary {boundary:.6f}' in notes
        assert 'd/(d+1) = 0.750000' in notes
        if report.verdict.status == INCONCLUSIVE:
            assert f'distance {report.verdict.certificate["distance"]:.3e}' in notes
            assert 'iteration cap' in notes
        assert report.to_dict()['notes'] == report.notes

    @pytest.mark.parametrize('theta', [np.pi / 6, -np.pi / 6, np.pi / 4, -np.pi / 4])
    def test_ha_map_reports_are_well_formed(self, theta):
        ha = make_named_map('ha_map', {'a': 1, 'b': 1, 'c': 1, 'theta': theta})
        report = conjecture_report(ha, seed=0, max_iter=30)
        document = report.to_dict()
        assert document['verdict'] in (EB, NOT_EB, INCONCLUSIVE)
        certificate = document['certificate']
        if document['verdict'] == NOT_EB:
            margin = -certificate['min_eigenvalue'] if certificate['kind'] == 'nppt' else certificate['value'] - 1
            assert margin > 1e-9
        if report.verdict.decomposition is not None:
            residual = np.max(np.abs(decomposition_operator(report.verdict.decomposition)
                                     - choi_state(report.spa_result.spa_map).matrix))
            assert residual < 1e-8
