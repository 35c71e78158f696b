#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: dpsurcli.py
#
# Copyright 2026 Willem Kuipers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
#  of this software and associated documentation files (the "Software"), to
#  deal in the Software without restriction, including without limitation the
#  rights to use, copy, modify, merge, publish, distribute, sublicense, and/or
#  sell copies of the Software, and to permit persons to whom the Software is
#  furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
#  all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#  IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#  FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#  AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#  LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
#  FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
#  DEALINGS IN THE SOFTWARE.
#

"""
Main code for dpsurcli.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import argparse
import json
import logging
import logging.config
from dataclasses import MISSING, fields
from enum import Enum
from pathlib import Path

import coloredlogs

from dpsurcli.accountant import (PrivacyLedger,
                                 SubsampledGaussianSpec,
                                 calibrate_max_updates,
                                 ledger_curve,
                                 ledger_epsilon_and_order)
from dpsurcli.conf import (DEFAULT_DELTA,
                           DEFAULT_VERIFICATION_BUDGET,
                           ENCODING,
                           EXIT_CONFIG_ERROR,
                           EXIT_FAILURE,
                           EXIT_INFEASIBLE_BUDGET,
                           EXIT_VERIFICATION_FAILURE)
from dpsurcli.datasets import SyntheticKind, generate_synthetic, write_csv
from dpsurcli.dpsurcliexceptions import (CheckpointFormatError,
                                         ConfigurationError,
                                         DatasetFormatError,
                                         EmptyWindowError,
                                         InfeasibleBudgetError,
                                         InvalidParameterError,
                                         NonFiniteValueError)
from dpsurcli.engine import TrainConfig
from dpsurcli.experiment import DataConfig, dump_config, load_config, run_experiment
from dpsurcli.verification import SUITES, run_verification

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".


# This is the main prefix used for logging
LOGGER_BASENAME = '''dpsurcli'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())


def _boolean(value):
    if value.lower() in ('true', 'yes', '1'):
        return True
    if value.lower() in ('false', 'no', '0'):
        return False
    raise argparse.ArgumentTypeError(f'expected true or false, got "{value}"')


def _column_list(value):
    return [column.strip() for column in value.split(',') if column.strip()]


def _add_field_flags(parser, dataclass_type, prefix='', skip=()):
    """Adds one flag per dataclass field, defaulting to None so unset flags never override."""
    for item in fields(dataclass_type):
        if item.name in skip:
            continue
        default = item.default if item.default is not MISSING else item.default_factory()
        flag = f'--{item.name.replace("_", "-")}'
        if not flag.startswith(f'--{prefix}'):
            flag = f'--{prefix}{flag[2:]}'
        options = {'dest': f'{prefix.replace("-", "_")}{item.name}', 'default': None, 'action': 'store'}
        if isinstance(default, Enum):
            options['choices'] = [member.value for member in type(default)]
        elif isinstance(default, bool):
            options['type'] = _boolean
        elif isinstance(default, list):
            options['type'] = _column_list
        elif isinstance(default, (int, float)):
            options['type'] = type(default)
        elif default is None:
            options['type'] = int
        parser.add_argument(flag, help=f'Overrides [{"data" if prefix else "train"}] {item.name}', **options)


def _add_config_flags(parser):
    parser.add_argument('--config',
                        '-c',
                        dest='config',
                        action='store',
                        help='The location of the TOML experiment config file',
                        default=None)
    parser.add_argument('--preset',
                        '-p',
                        dest='preset',
                        action='store',
                        help='Named budget preset as dataset:epsilon, for example mnist:3',
                        default=None)
    parser.add_argument('--output',
                        '-o',
                        dest='output_dir',
                        action='store',
                        help='Run directory for the artifacts',
                        default=None)
    _add_field_flags(parser, TrainConfig, skip=('seed',))
    _add_field_flags(parser, DataConfig, prefix='data-')


def _add_mechanism_flags(parser, updates=False):
    parser.add_argument('--train-rate', '-q', dest='train_rate', type=float, required=True,
                        help='Sampling rate q_t of the training phase')
    parser.add_argument('--train-noise', '-s', dest='train_noise', type=float, required=True,
                        help='Noise multiplier sigma_t of the training phase')
    parser.add_argument('--valid-rate', dest='valid_rate', type=float, default=None,
                        help='Sampling rate q_v of the validation phase, leave out for plain DPSGD')
    parser.add_argument('--valid-noise', dest='valid_noise', type=float, default=None,
                        help='Noise multiplier sigma_v of the validation phase')
    parser.add_argument('--delta', '-d', dest='delta', type=float, default=DEFAULT_DELTA,
                        help='Target delta')
    if updates:
        parser.add_argument('--updates', '-t', dest='updates', type=int, required=True,
                            help='Number of accepted updates')
    parser.add_argument('--json', dest='json', action='store_true', default=False,
                        help='Print machine readable JSON')


def get_arguments(arguments=None):
    """
    Gets us the cli arguments.

    Returns the args as parsed from the argsparser.
    """
    # https://docs.python.org/3/library/argparse.html
    parser = argparse.ArgumentParser(
        description='''Differentially private training with selective updates and release''')
    parser.add_argument('--log-config',
                        '-l',
                        action='store',
                        dest='logger_config',
                        help='The location of the logging config json file',
                        default='')
    parser.add_argument('--log-level',
                        '-L',
                        help='Provide the log level. Defaults to info.',
                        dest='log_level',
                        action='store',
                        default='info',
                        choices=['debug',
                                 'info',
                                 'warning',
                                 'error',
                                 'critical'])
    commands = parser.add_subparsers(dest='command', required=True)

    train = commands.add_parser('train', help='Train a model and write the run artifacts')
    _add_config_flags(train)
    train.add_argument('--seed', dest='seed', type=int, required=True, help='Master seed of the run')
    train.add_argument('--resume', dest='resume', action='store_true', default=False,
                       help='Continue from the checkpoint in the run directory')

    show = commands.add_parser('show-config', help='Print the effective configuration with defaults applied')
    _add_config_flags(show)
    show.add_argument('--seed', dest='seed', type=int, default=None, help='Master seed of the run')

    account = commands.add_parser('account', help='Privacy spent by a number of accepted updates')
    _add_mechanism_flags(account, updates=True)

    calibrate = commands.add_parser('calibrate', help='Largest number of accepted updates a budget affords')
    _add_mechanism_flags(calibrate)
    calibrate.add_argument('--epsilon', '-e', dest='epsilon', type=float, required=True, help='Target epsilon')

    verify = commands.add_parser('verify-mechanism', help='Check mechanisms and accountant against oracles')
    verify.add_argument('--budget', '-b', dest='budget', type=int, default=DEFAULT_VERIFICATION_BUDGET,
                        help='Monte-Carlo samples per check')
    verify.add_argument('--seed', dest='seed', type=int, default=0, help='Seed of the suites')
    verify.add_argument('--csv', dest='csv', action='store', default=None,
                        help='Write the (analytic, empirical, tolerance) report to this CSV file')
    verify.add_argument('--suite', dest='suites', action='append', choices=SUITES, default=None,
                        help='Only run this suite, can be repeated')

    generate = commands.add_parser('generate-data', help='Write a seeded synthetic dataset as CSV')
    generate.add_argument('--kind', dest='kind', choices=[kind.value for kind in SyntheticKind],
                          default=SyntheticKind.GAUSSIAN_BLOBS.value)
    generate.add_argument('--n', dest='n', type=int, default=10000, help='Number of examples')
    generate.add_argument('--d', dest='d', type=int, default=20, help='Number of features')
    generate.add_argument('--k', dest='k', type=int, default=5, help='Number of classes')
    generate.add_argument('--noise', dest='noise', type=float, default=1.0, help='Noise level')
    generate.add_argument('--separation', dest='separation', type=float, default=4.0,
                          help='Distance between blob centers in units of the noise level')
    generate.add_argument('--seed', dest='seed', type=int, default=0, help='Generator seed')
    generate.add_argument('--output', '-o', dest='output_dir', default='.', help='Directory for the CSV files')

    args = parser.parse_args(arguments)
    return args


def setup_logging(level, config_file=None):
    """
    Sets up the logging.

    Needs the args to get the log level supplied

    Args:
        level: At which level do we log
        config_file: Configuration to use

    """
    # This will configure the logging, if the user has set a config file.
    # If there's no config file, logging will default to stdout.
    if config_file:
        try:
            with open(config_file, encoding=ENCODING) as conf_file:
                configuration = json.loads(conf_file.read())
                # Configure the logger
                logging.config.dictConfig(configuration)
        except ValueError:
            print(f'File "{config_file}" is not valid json, cannot continue.')
            raise SystemExit(EXIT_FAILURE)
    else:
        coloredlogs.install(level=level.upper())


def _overrides(args, prefix=''):
    values = {}
    for key, value in vars(args).items():
        if prefix and key.startswith(prefix):
            values[key[len(prefix):]] = value
        elif not prefix and key in TrainConfig.field_names():
            values[key] = value
    return values


def _experiment_config(args, require_seed=True):
    return load_config(args.config,
                       preset=args.preset,
                       train_overrides=_overrides(args),
                       data_overrides=_overrides(args, 'data_'),
                       output_overrides={'output_dir': args.output_dir},
                       require_seed=require_seed)


def _mechanisms(args):
    train_spec = SubsampledGaussianSpec(args.train_rate, args.train_noise)
    if (args.valid_rate is None) != (args.valid_noise is None):
        raise ConfigurationError(['--valid-rate and --valid-noise go together'])
    valid_spec = None if args.valid_rate is None else SubsampledGaussianSpec(args.valid_rate, args.valid_noise)
    return train_spec, valid_spec


def command_train(args):
    result = run_experiment(_experiment_config(args), resume=args.resume)
    print(json.dumps(result.as_dict(), indent=2))


def command_show_config(args):
    print(dump_config(_experiment_config(args, require_seed=False)), end='')


def command_account(args):
    train_spec, valid_spec = _mechanisms(args)
    ledger = PrivacyLedger(args.updates, train_spec, valid_spec, args.delta)
    epsilon, order = ledger_epsilon_and_order(ledger)
    curve = ledger_curve(ledger)
    if args.json:
        print(json.dumps({'epsilon': epsilon, 'delta': args.delta, 'best_order': order,
                          'updates': args.updates, 'rdp': curve.as_dict()}, indent=2))
        return
    print(f'epsilon: {epsilon!r} at delta {args.delta} (best order {order})')
    for alpha, value in zip(curve.orders, curve.values):
        print(f'{alpha:>4} {value!r}')


def command_calibrate(args):
    train_spec, valid_spec = _mechanisms(args)
    updates = calibrate_max_updates(train_spec, valid_spec, args.epsilon, args.delta)
    if updates == 0:
        raise InfeasibleBudgetError(f'Target epsilon {args.epsilon} cannot pay for a single accepted update')
    if args.json:
        print(json.dumps({'max_updates': updates, 'epsilon': args.epsilon, 'delta': args.delta}))
        return
    print(updates)


def command_verify(args):
    report = run_verification(args.budget, args.seed, args.suites or SUITES)
    if args.csv:
        report.write_csv(args.csv)
    for name, status in report.summary().items():
        print(f'{name:<24}{status}')
    if not report.passed:
        failed = [check.label for check in report.checks if not check.passed]
        LOGGER.error('%s checks failed, first: %s', len(failed), failed[0])
        raise SystemExit(EXIT_VERIFICATION_FAILURE)


def command_generate(args):
    output = Path(args.output_dir)
    output.mkdir(parents=True, exist_ok=True)
    train_set, test_set, truth = generate_synthetic(args.kind, args.n, args.d, args.k,
                                                    args.noise, args.seed, args.separation)
    write_csv(train_set, Path(output, 'train.csv'))
    write_csv(test_set, Path(output, 'test.csv'))
    ground_truth = {'kind': truth.kind.value, 'input_dim': truth.input_dim, 'output_dim': truth.output_dim,
                    'weights': truth.weights.tolist(), 'provenance': train_set.provenance}
    Path(output, 'ground_truth.json').write_text(json.dumps(ground_truth, indent=2), encoding=ENCODING)


COMMANDS = {'train': command_train,
            'show-config': command_show_config,
            'account': command_account,
            'calibrate': command_calibrate,
            'verify-mechanism': command_verify,
            'generate-data': command_generate}


def main(arguments=None):
    """
    Main method.

    This method holds what you want to execute when
    the script is run on command line.
    """
    args = get_arguments(arguments)
    setup_logging(args.log_level, args.logger_config)
    try:
        COMMANDS[args.command](args)
    except ConfigurationError as error:
        for message in error.errors:
            LOGGER.error(message)
        raise SystemExit(EXIT_CONFIG_ERROR)
    except InfeasibleBudgetError as error:
        LOGGER.error(error)
        raise SystemExit(EXIT_INFEASIBLE_BUDGET)
    except (InvalidParameterError, DatasetFormatError, CheckpointFormatError) as error:
        LOGGER.error(error)
        raise SystemExit(EXIT_CONFIG_ERROR)
    except (NonFiniteValueError, EmptyWindowError) as error:
        LOGGER.error(error)
        raise SystemExit(EXIT_FAILURE)


if __name__ == '__main__':
    main()
