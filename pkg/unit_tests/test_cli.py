# SPDX-License-Identifier: MIT-0

import json

import numpy as np
import pytest

from lib import cli, codec
from lib.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main, parse_params, run
from lib.configuration import APPLICATION_NAME, VERSION
from lib.errors import NumericalError, ParameterError
from lib.separability import ENTANGLED
from lib.spa import EB
from lib.states import bell_state
from lib.tagging import TAG_BLOCK
from lib.witnesses import DETECTED


def run_ok(*argv):
    result = run(list(argv))
    assert result.exit_code == EXIT_OK, result.payload
    return result.payload


class TestParseParams:
    def test_expressions(self):
        assert parse_params('1,1,1,pi/6') == pytest.approx([1, 1, 1, np.pi / 6])

    def test_empty(self):
        assert parse_params(None) == []

    @pytest.mark.parametrize('text', ['x', '1,(', 'I'])
    def test_not_real(self, text):
        with pytest.raises(ParameterError):
            parse_params(text)


class TestSpaCommand:
    def test_transpose_dim_four(self):
        payload = run_ok('spa', '--map', 'transpose', '--dim', '4')
        assert payload['p_star'] == pytest.approx(0.8, abs=1e-9)
        assert payload['lambda'] == pytest.approx(0.25)
        assert (payload['d_in'], payload['d_out']) == (4, 4)

    def test_bipartite_and_locc(self):
        payload = run_ok('spa', '--map', 'reduction', '--dim', '2', '--bipartite', '--locc')
        assert payload['bipartite']['p_star'] == pytest.approx(8 / 9)
        assert payload['bipartite']['threshold'] == pytest.approx(2 / 9)
        assert sum(payload['locc']['weights']) == pytest.approx(1.0)

    def test_ha_map_params(self):
        payload = run_ok('spa', '--map', 'ha_map', '--params', '1,1,1,pi/6')
        assert 0.0 < payload['p_star'] < 1.0

    def test_missing_dimension(self):
        result = run(['spa', '--map', 'transpose'])
        assert result.exit_code == EXIT_INVALID
        assert result.payload['error']['type'] == 'ParameterError'

    def test_unknown_map(self):
        result = run(['spa', '--map', 'teleport', '--dim', '2'])
        assert result.exit_code == EXIT_INVALID

    def test_extra_params(self):
        assert run(['spa', '--map', 'transpose', '--dim', '2', '--params', '1']).exit_code == EXIT_INVALID

    def test_numerical_failure_exit_code(self, monkeypatch):
        def broken(_):
            raise NumericalError('routes disagree')

        monkeypatch.setattr(cli, 'spa', broken)
        result = run(['spa', '--map', 'transpose', '--dim', '2'])
        assert result.exit_code == EXIT_NUMERICAL
        assert result.payload['error'] == {'type': 'NumericalError', 'message': 'routes disagree'}


class TestUsageErrors:
    def test_conjecture_needs_seed(self):
        assert run(['conjecture', '--map', 'transpose', '--dim', '2']).exit_code == EXIT_INVALID

    def test_unknown_flag(self):
        result = run(['spa', '--map', 'transpose', '--dim', '2', '--frobnicate'])
        assert result.exit_code == EXIT_INVALID
        assert result.payload is None

    def test_help_is_not_an_error(self):
        result = run(['--help'])
        assert result.exit_code == EXIT_OK
        assert result.payload is None


class TestOtherCommands:
    def test_maps_list(self):
        names = {entry['name'] for entry in run_ok('maps', 'list')['maps']}
        assert {'transpose', 'reduction', 'choi_map'} <= names

    def test_conjecture(self):
        payload = run_ok('conjecture', '--map', 'transpose', '--dim', '2', '--seed', '0', '--max-iter', '100')
        assert payload['verdict'] == EB
        assert payload['p_star'] == pytest.approx(2 / 3)

    def test_design_verify_sic(self):
        payload = run_ok('design', 'verify', '--kind', 'sic', '--dim', '3')
        assert payload['count'] == 9
        assert payload['residual'] < 1e-10
        assert len(payload['kets']) == 9

    def test_design_verify_rotated_tetrahedron(self):
        payload = run_ok('design', 'verify', '--kind', 'sic', '--dim', '2', '--phase-offset', 'pi/5')
        assert payload['channel_residual'] < 1e-10

    def test_design_verify_composite_mub(self):
        assert run(['design', 'verify', '--kind', 'mub', '--dim', '4']).exit_code == EXIT_INVALID

    def test_witness_eval(self):
        payload = run_ok('witness', 'eval', '--map', 'transpose', '--dim', '2', '--state', 'bell:psi-')
        assert payload['value'] == pytest.approx(-0.5)
        assert payload['verdict'] == DETECTED
        assert payload['spa_witness']['threshold'] == pytest.approx(1 / 6)
        assert payload['spa_witness']['detected']


class TestDetectCommand:
    def test_bell_state(self):
        payload = run_ok('detect', '--state', 'bell:phi+', '--method', 'spa:transpose')
        assert payload['statistic'] == pytest.approx(1 / 6, abs=1e-12)
        assert payload['threshold'] == pytest.approx(2 / 9, abs=1e-12)
        assert payload['verdict'] == ENTANGLED

    def test_state_from_file(self, tmp_path):
        path = tmp_path / 'singlet.json'
        path.write_text(codec.dumps(codec.matrix_to_dict(bell_state('psi-').matrix, (2, 2))))
        payload = run_ok('detect', '--state', str(path), '--method', 'ppt')
        assert payload['statistic'] == pytest.approx(-0.5)

    def test_hom_needs_seed(self):
        result = run(['detect', '--state', 'bell:psi-', '--method', 'hom', '--shots', '100'])
        assert result.exit_code == EXIT_INVALID

    def test_hom(self):
        payload = run_ok('detect', '--state', 'bell:psi-', '--method', 'hom', '--shots', '5000', '--seed', '1')
        assert payload['shots'] == 5000
        assert payload['verdict'] == ENTANGLED

    def test_sweep_csv(self, tmp_path):
        path = tmp_path / 'sweep.csv'
        payload = run_ok('detect', '--sweep', 'isotropic', '--dim', '2', '--step', '0.25', '--csv', str(path))
        assert payload['points'] == 5
        assert payload['boundary_estimate'] == pytest.approx(0.75)
        lines = path.read_text().splitlines()
        assert lines[0] == 'p,statistic,threshold,verdict'
        assert len(lines) == 6

    def test_detect_needs_a_state(self):
        assert run(['detect', '--method', 'ppt']).exit_code == EXIT_INVALID


class TestChoiFiles:
    def test_dump_then_load(self, tmp_path):
        path = tmp_path / 'reduction.json'
        assert run_ok('choi', 'dump', '--map', 'reduction', '--dim', '3', '--out', str(path)) == {
            'written': str(path), TAG_BLOCK: {'application': APPLICATION_NAME, 'command': 'choi dump',
                                              'version': VERSION}}
        loaded = run_ok('choi', 'load', str(path))
        inline = run_ok('choi', 'dump', '--map', 'reduction', '--dim', '3')
        assert loaded['data'] == inline['data']
        assert (loaded['d_in'], loaded['d_out']) == (3, 3)

    def test_map_file_feeds_spa(self, tmp_path):
        path = tmp_path / 'transpose.json'
        run_ok('choi', 'dump', '--map', 'transpose', '--dim', '3', '--out', str(path))
        payload = run_ok('spa', '--map-file', str(path))
        assert payload['p_star'] == pytest.approx(0.75, abs=1e-9)

    def test_missing_file(self, tmp_path):
        assert run(['choi', 'load', str(tmp_path / 'absent.json')]).exit_code == EXIT_INVALID


class TestMain:
    def test_prints_tagged_json(self, capsys):
        assert main(['spa', '--map', 'transpose', '--dim', '2', '--json']) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document['p_star'] == pytest.approx(2 / 3)
        assert document[TAG_BLOCK]['command'] == 'spa'

    def test_error_payload_on_stdout(self, capsys):
        assert main(['spa', '--map', 'teleport', '--dim', '2']) == EXIT_INVALID
        document = json.loads(capsys.readouterr().out)
        assert document['error']['type'] == 'ParameterError'
