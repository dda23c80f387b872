# SPDX-License-Identifier: MIT-0

"""
Command-line surface. JSON payloads go to stdout, diagnostics to stderr.

Exit codes: 0 success, 2 invalid input (including argparse usage errors),
3 internal numerical failure.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import sympy

from . import codec
from .channels import REGISTRY, QuantumMap, make_named_map, registry_entries
from .configuration import APPLICATION_NAME, VERSION, load_log_config
from .designs import MUB, SIC, design_channel, mub, overlap_check, sic, tetrahedron_phases, two_design_check
from .detect import isotropic_sweep, map_for_dimension, run_method, write_sweep_csv
from .errors import NumericalError, ParameterError, ToolkitError
from .spa import conjecture_report, spa, spa_bipartite, spa_locc
from .states import DensityMatrix, make_state, named_state, sym_antisym_projectors
from .tagging import tag
from .witnesses import evaluate_witness, spa_witness, witness_from_map

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

DIMENSION_KEYS = ('d', 'd_in', 'd_out')


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    payload: Optional[dict]


def parse_params(text: Optional[str]) -> List[float]:
    """Comma-separated real expressions such as "1,1,1,pi/6"."""
    if not text:
        return []
    values = []
    for item in text.split(','):
        try:
            values.append(float(sympy.sympify(item.strip())))
        except (sympy.SympifyError, TypeError, ValueError):
            raise ParameterError(f'Parameter {item!r} is not a real expression')
    return values


def _read_json(path: str):
    with open(path) as handle:
        return codec.loads(handle.read())


def build_map(args) -> QuantumMap:
    if getattr(args, 'map_file', None):
        return codec.map_from_dict(_read_json(args.map_file))
    if not args.map:
        raise ParameterError('Pass --map or --map-file')
    if args.map not in REGISTRY:
        raise ParameterError(f'Unknown map {args.map!r}; see `maps list`')

    _, parameters, _ = REGISTRY[args.map]
    values = parse_params(args.params)
    params = {}
    for key in parameters:
        if key in DIMENSION_KEYS:
            if args.dim is None:
                raise ParameterError(f'Map {args.map!r} needs --dim')
            params[key] = args.dim
        elif values:
            params[key] = values.pop(0)
        else:
            raise ParameterError(f'Map {args.map!r} needs --params {",".join(parameters)}')
    if values:
        raise ParameterError(f'Map {args.map!r} takes {len(params)} parameters, got extra {values}')
    return make_named_map(args.map, params)


def load_state(reference: str) -> DensityMatrix:
    if os.path.isfile(reference):
        matrix, dims = codec.matrix_from_dict(_read_json(reference))
        return make_state(matrix, dims)
    return named_state(reference)


def _maps_list(args) -> dict:
    return {'maps': registry_entries()}


def _spa(args) -> dict:
    quantum_map = build_map(args)
    result = spa(quantum_map)
    payload = {
        'map': quantum_map.label,
        'd_in': quantum_map.d_in,
        'd_out': quantum_map.d_out,
        'p_star': result.p_star,
        'lambda': result.negativity,
        'min_eigenvalue': result.min_eigenvalue,
    }
    if args.bipartite:
        bipartite = spa_bipartite(quantum_map)
        payload['bipartite'] = {'p_star': bipartite.p_star, 'threshold': bipartite.threshold}
    if args.locc:
        locc = spa_locc(quantum_map)
        payload['locc'] = {'q': locc.q, 'weights': list(locc.weights), 'residual': locc.residual}
    return payload


def _conjecture(args) -> dict:
    return conjecture_report(build_map(args), seed=args.seed, max_iter=args.max_iter).to_dict()


def _design_verify(args) -> dict:
    if args.kind == 'sic':
        phases = tetrahedron_phases(parse_params(args.phase_offset)[0]) if args.phase_offset else None
        design = sic(args.dim, phases)
    else:
        design = mub(args.dim)
    residual = two_design_check(design)
    channel = design_channel(design).to_map(f'{design.kind.lower()}_channel')
    symmetric, _ = sym_antisym_projectors(design.dim)
    channel_residual = float(np.max(np.abs(channel.choi - 2 * symmetric / (design.dim * (design.dim + 1)))))
    if max(residual, channel_residual) > 1e-8:
        raise NumericalError(f'{design.kind} set for d={design.dim} fails the two-design check ({residual:.3e})')
    return {
        'kind': design.kind,
        'dim': design.dim,
        'count': len(design),
        'residual': residual,
        'overlap_residual': overlap_check(design),
        'channel_residual': channel_residual,
        'kets': codec.kets_to_list(design.vectors),
    }


def _witness_eval(args) -> dict:
    witness = witness_from_map(build_map(args))
    rho = load_state(args.state)
    value = evaluate_witness(witness, rho)
    spa_w = spa_witness(witness)
    return {
        'value': value.value,
        'verdict': value.verdict,
        'spa_witness': {
            'p_star': spa_w.p_star,
            'threshold': spa_w.threshold,
            'value': spa_w.value(rho),
            'detected': spa_w.detects(rho),
        },
    }


def _detect(args) -> dict:
    if args.sweep:
        family, _, name = args.method.partition(':')
        if family != 'spa':
            raise ParameterError('Sweeps run with --method spa:<map>')
        if args.dim is None:
            raise ParameterError('Sweeps need --dim')
        target = map_for_dimension(name or 'transpose', args.dim)
        sweep = isotropic_sweep(args.dim, target, step=args.step)
        if args.csv:
            with open(args.csv, 'w', newline='') as handle:
                write_sweep_csv(sweep, handle)
        return {
            'sweep': 'isotropic',
            'map': sweep.map_label,
            'd': sweep.d,
            'points': len(sweep.rows),
            'boundary_estimate': sweep.boundary_estimate,
            'csv': args.csv,
        }
    if not args.state:
        raise ParameterError('detect needs --state or --sweep')
    report = run_method(load_state(args.state), args.method, shots=args.shots, seed=args.seed)
    return report.to_dict()


def _choi_dump(args) -> dict:
    document = codec.map_to_dict(build_map(args))
    if args.out:
        with open(args.out, 'w') as handle:
            handle.write(codec.dumps(document))
        return {'written': args.out}
    return document


def _choi_load(args) -> dict:
    return codec.map_to_dict(codec.map_from_dict(_read_json(args.path)))


def _add_map_arguments(parser):
    parser.add_argument('--map', help='registry name, see `maps list`')
    parser.add_argument('--map-file', dest='map_file', help='map document written by `choi dump`')
    parser.add_argument('--dim', type=int)
    parser.add_argument('--params', help='comma-separated values, expressions such as pi/6 allowed')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='accepted for compatibility; output is always JSON')

    parser = argparse.ArgumentParser(prog=APPLICATION_NAME, description='SPA, channel and entanglement toolkit')
    parser.add_argument('--version', action='version', version=VERSION)
    commands = parser.add_subparsers(dest='command', required=True)

    maps = commands.add_parser('maps', parents=[common])
    maps_commands = maps.add_subparsers(dest='action', required=True)
    maps_commands.add_parser('list', parents=[common]).set_defaults(handler=_maps_list)

    spa_parser = commands.add_parser('spa', parents=[common])
    _add_map_arguments(spa_parser)
    spa_parser.add_argument('--bipartite', action='store_true', help='also report spa of id (x) Lambda')
    spa_parser.add_argument('--locc', action='store_true', help='also report the LOCC split')
    spa_parser.set_defaults(handler=_spa)

    conjecture = commands.add_parser('conjecture', parents=[common])
    _add_map_arguments(conjecture)
    conjecture.add_argument('--seed', type=int, required=True)
    conjecture.add_argument('--max-iter', dest='max_iter', type=int)
    conjecture.set_defaults(handler=_conjecture)

    design = commands.add_parser('design', parents=[common])
    design_commands = design.add_subparsers(dest='action', required=True)
    verify = design_commands.add_parser('verify', parents=[common])
    verify.add_argument('--kind', choices=[SIC.lower(), MUB.lower()], required=True)
    verify.add_argument('--dim', type=int, required=True)
    verify.add_argument('--phase-offset', dest='phase_offset', help='tetrahedron family offset t, e.g. pi/5')
    verify.set_defaults(handler=_design_verify)

    witness = commands.add_parser('witness', parents=[common])
    witness_commands = witness.add_subparsers(dest='action', required=True)
    evaluate = witness_commands.add_parser('eval', parents=[common])
    _add_map_arguments(evaluate)
    evaluate.add_argument('--state', required=True)
    evaluate.set_defaults(handler=_witness_eval)

    detect = commands.add_parser('detect', parents=[common])
    detect.add_argument('--state', help='registry name or matrix document')
    detect.add_argument('--method', default='spa:transpose', help='spa:<map>, witness:<map>, hom[:<map>], ppt, ccnr')
    detect.add_argument('--shots', type=int)
    detect.add_argument('--seed', type=int)
    detect.add_argument('--sweep', choices=['isotropic'])
    detect.add_argument('--dim', type=int)
    detect.add_argument('--step', type=float)
    detect.add_argument('--csv')
    detect.set_defaults(handler=_detect)

    choi = commands.add_parser('choi', parents=[common])
    choi_commands = choi.add_subparsers(dest='action', required=True)
    dump = choi_commands.add_parser('dump', parents=[common])
    _add_map_arguments(dump)
    dump.add_argument('--out')
    dump.set_defaults(handler=_choi_dump)
    load = choi_commands.add_parser('load', parents=[common])
    load.add_argument('path')
    load.set_defaults(handler=_choi_load)

    return parser


def _command_name(args) -> str:
    action = getattr(args, 'action', None)
    return f'{args.command} {action}' if action else args.command


def _error_payload(error: Exception, command: str) -> dict:
    return tag({'error': {'type': type(error).__name__, 'message': str(error)}}, command)


def run(argv: Sequence[str]) -> CommandResult:
    """
    Parses argv, runs the subcommand and returns its tagged payload.
    @param argv: Arguments without the program name
    @return: CommandResult: exit code and JSON document (None after --help/--version)
    """
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as exit_request:
        code = exit_request.code if isinstance(exit_request.code, int) else EXIT_INVALID
        return CommandResult(code, None)

    command = _command_name(args)
    logger.info(f'[INFO] {command} called')
    try:
        return CommandResult(EXIT_OK, tag(args.handler(args), command))
    except NumericalError as e:
        logger.error('[ERROR] {} failed:{}'.format(command, e))
        return CommandResult(EXIT_NUMERICAL, _error_payload(e, command))
    except (ToolkitError, ValueError, OSError) as e:
        logger.error('[ERROR] {} failed:{}'.format(command, e))
        return CommandResult(EXIT_INVALID, _error_payload(e, command))


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_log_config()
    result = run(sys.argv[1:] if argv is None else argv)
    if result.payload is not None:
        sys.stdout.write(codec.dumps(result.payload) + '\n')
    return result.exit_code
