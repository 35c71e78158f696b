#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: experiment.py
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
Experiment configuration and run artifacts.

A run is described by a TOML file with ``[train]``, ``[data]`` and
``[output]`` sections. Running it writes, into the output directory:

    config.toml     the effective configuration, defaults applied
    trace.jsonl     one JSON object per training event, appended as it happens
    trajectory.csv  one row per accepted update, for plotting
    result.json     the summary of the run
    checkpoint.bin  the state to resume from

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import csv
import hashlib
import json
import logging
import math
import numbers
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional

import toml

from dpsurcli.conf import (CHECKPOINT_FILENAME,
                           CONFIG_FILENAME,
                           DEFAULT_VALID_BATCH_SIZE,
                           ENCODING,
                           PRESET_VALID_BATCH_SIZES,
                           RESULT_FILENAME,
                           TRACE_FILENAME,
                           TRAJECTORY_FILENAME,
                           VALIDATION_NOISE_PRESETS)
from dpsurcli.datasets import NormalizationMethod, SyntheticKind, generate_synthetic, load_csv
from dpsurcli.dpsurcliexceptions import ConfigurationError, InvalidParameterError
from dpsurcli.engine import Algorithm, EventKind, TrainConfig, load_checkpoint, save_checkpoint, train
from dpsurcli.models import loss

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
LOGGER_BASENAME = '''dpsurcli.experiment'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())

TRAJECTORY_COLUMNS = ('accepted_update_index', 'train_loss', 'test_metric', 'epsilon')

_NUMBER = ('number', 'null')
TRACE_RECORD_SCHEMA = {'type': 'object',
                       'additionalProperties': False,
                       'required': ['event', 't', 'iteration', 'loss', 'epsilon', 'accuracy', 'delta',
                                    'train_batch_size', 'valid_batch_size', 'delta_e', 'noisy_value', 'elapsed'],
                       'properties': {'event': {'type': 'string', 'enum': [kind.value for kind in EventKind]},
                                      't': {'type': 'integer'},
                                      'iteration': {'type': 'integer'},
                                      'loss': {'type': _NUMBER},
                                      'epsilon': {'type': _NUMBER},
                                      'accuracy': {'type': _NUMBER},
                                      'delta': {'type': 'number'},
                                      'train_batch_size': {'type': 'integer'},
                                      'valid_batch_size': {'type': ('integer', 'null')},
                                      'delta_e': {'type': _NUMBER},
                                      'noisy_value': {'type': _NUMBER},
                                      'elapsed': {'type': 'number'}}}

_JSON_TYPES = {'object': dict,
               'string': str,
               'integer': int,
               'number': (int, float),
               'null': type(None)}


def validate_trace_record(record):
    """Checks a decoded trace record against TRACE_RECORD_SCHEMA.

    Returns:
        list: The problems found, empty for a valid record.

    """
    problems = []
    properties = TRACE_RECORD_SCHEMA['properties']
    problems.extend(f'missing "{name}"' for name in TRACE_RECORD_SCHEMA['required'] if name not in record)
    problems.extend(f'unexpected "{name}"' for name in record if name not in properties)
    for name, value in record.items():
        if name not in properties:
            continue
        allowed = properties[name]['type']
        allowed = (allowed,) if isinstance(allowed, str) else allowed
        if isinstance(value, bool) or not isinstance(value, tuple(_JSON_TYPES[kind] for kind in allowed)):
            problems.append(f'"{name}" should be {" or ".join(allowed)}, got {value!r}')
        elif 'enum' in properties[name] and value not in properties[name]['enum']:
            problems.append(f'"{name}" has unknown value {value!r}')
    return problems


def _json_ready(value):
    """Non finite floats become null, JSON has no spelling for them."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(item) for item in value]
    return value


def trace_record(event):
    return _json_ready(event.as_record())


def _is_finite(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True)
class DataConfig:
    """Where the data comes from.

    ``source`` is ``synthetic`` or ``csv``. ``classes`` is the number of
    classes of a CSV label column, 0 for a regression target.
    """

    source: str = 'synthetic'
    kind: str = SyntheticKind.GAUSSIAN_BLOBS.value
    n: int = 10000
    d: int = 20
    k: int = 5
    noise: float = 1.0
    separation: float = 4.0
    data_seed: int = 0
    train_path: str = ''
    test_path: str = ''
    label_column: str = 'label'
    feature_columns: List[str] = field(default_factory=list)
    normalization: str = NormalizationMethod.NONE.value
    classes: int = 0

    @classmethod
    def from_dict(cls, data):
        names = [item.name for item in fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ConfigurationError([f'unknown data setting "{name}"' for name in unknown])
        return cls(**data)

    def errors(self):
        errors = []
        if self.source not in ('synthetic', 'csv'):
            errors.append(f'data source must be synthetic or csv, got {self.source!r}')
        if self.source == 'synthetic':
            if self.kind not in [kind.value for kind in SyntheticKind]:
                errors.append(f'data kind must be linear_regression or gaussian_blobs, got {self.kind!r}')
            if not (isinstance(self.n, int) and self.n >= 2):
                errors.append(f'data n must be an integer of at least 2, got {self.n!r}')
            if not (isinstance(self.d, int) and self.d >= 1):
                errors.append(f'data d must be a positive integer, got {self.d!r}')
            blobs = self.kind == SyntheticKind.GAUSSIAN_BLOBS.value
            if blobs and not (isinstance(self.k, int) and isinstance(self.d, int) and 2 <= self.k <= self.d):
                errors.append(f'data k must be an integer between 2 and d, got {self.k!r}')
            if not (_is_finite(self.noise) and self.noise >= 0):
                errors.append(f'data noise must be a non negative number, got {self.noise!r}')
            if not (_is_finite(self.separation) and self.separation > 0):
                errors.append(f'data separation must be a positive number, got {self.separation!r}')
            if not (isinstance(self.data_seed, int) and not isinstance(self.data_seed, bool) and self.data_seed >= 0):
                errors.append(f'data data_seed must be a non negative integer, got {self.data_seed!r}')
        if self.source == 'csv':
            if not self.train_path:
                errors.append('data train_path is required for csv data')
            if self.normalization not in [method.value for method in NormalizationMethod]:
                errors.append(f'data normalization must be none, standardize or minmax, got {self.normalization!r}')
            if not (isinstance(self.classes, int) and (self.classes == 0 or self.classes >= 2)):
                errors.append(f'data classes must be 0 or at least 2, got {self.classes!r}')
        return errors

    def load(self):
        """Returns (train Dataset, test Dataset or None)."""
        if self.source == 'synthetic':
            train_set, test_set, _ = generate_synthetic(self.kind, self.n, self.d, self.k,
                                                        self.noise, self.data_seed, self.separation)
            return train_set, test_set
        classes = self.classes or None
        train_set = load_csv(self.train_path, self.label_column, self.feature_columns or None,
                             self.normalization, classes)
        test_set = None
        if self.test_path:
            test_set = load_csv(self.test_path, self.label_column, self.feature_columns or None,
                                classes=classes, reference=train_set.normalization)
        return train_set, test_set


@dataclass(frozen=True)
class ExperimentConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    data: DataConfig = field(default_factory=DataConfig)
    output_dir: str = 'runs/dpsur'
    checkpoint: bool = True

    def validate(self, require_seed=True):
        errors = self.data.errors()
        try:
            self.train.validate(require_seed=require_seed)
        except ConfigurationError as error:
            errors = error.errors + errors
        if errors:
            raise ConfigurationError(errors)
        return self

    def as_dict(self):
        return {'train': {key: value for key, value in self.train.as_dict().items() if value is not None},
                'data': asdict(self.data),
                'output': {'output_dir': self.output_dir, 'checkpoint': self.checkpoint}}

    def digest(self):
        encoded = json.dumps(_json_ready(self.as_dict()), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(encoded.encode(ENCODING)).hexdigest()


def apply_preset(preset):
    """Train settings of a named ``dataset:epsilon`` preset.

    The validation noise multiplier per dataset and budget, and the
    validation batch size, which is smaller for imdb.
    """
    dataset, _, epsilon = str(preset).partition(':')
    table = VALIDATION_NOISE_PRESETS.get(dataset.lower())
    if table is None:
        raise ConfigurationError([f'unknown preset dataset "{dataset}", choose from '
                                  f'{", ".join(sorted(VALIDATION_NOISE_PRESETS))}'])
    try:
        budget = int(epsilon)
    except ValueError:
        budget = None
    if budget not in table:
        raise ConfigurationError([f'preset epsilon must be one of {", ".join(map(str, sorted(table)))}, '
                                  f'got "{epsilon}"'])
    return {'target_epsilon': float(budget),
            'valid_noise_multiplier': table[budget],
            'valid_batch_size': PRESET_VALID_BATCH_SIZES.get(dataset.lower(), DEFAULT_VALID_BATCH_SIZE)}


def load_config(path=None,
                preset=None,
                train_overrides=None,
                data_overrides=None,
                output_overrides=None,
                require_seed=True):
    """Builds the effective ExperimentConfig.

    Precedence, lowest first: built-in defaults, preset, config file,
    overrides. Overrides set to None are ignored. Without ``require_seed`` a
    config without a seed is accepted, for display.

    Raises:
        ConfigurationError: Listing every problem found.

    """
    document = {}
    if path:
        try:
            document = toml.load(str(path))
        except (OSError, toml.TomlDecodeError) as error:
            raise ConfigurationError([f'cannot read {path}: {error}']) from None
    unknown = sorted(set(document) - {'train', 'data', 'output'})
    if unknown:
        raise ConfigurationError([f'unknown section [{name}]' for name in unknown])
    train_values = apply_preset(preset) if preset else {}
    train_values.update(document.get('train', {}))
    train_values.update({key: value for key, value in (train_overrides or {}).items() if value is not None})
    data_values = dict(document.get('data', {}))
    data_values.update({key: value for key, value in (data_overrides or {}).items() if value is not None})
    output_values = dict(document.get('output', {}))
    output_values.update({key: value for key, value in (output_overrides or {}).items() if value is not None})
    errors = []
    sections = {}
    for name, factory, values in (('train', TrainConfig.from_dict, train_values),
                                  ('data', DataConfig.from_dict, data_values)):
        try:
            sections[name] = factory(values)
        except ConfigurationError as error:
            errors.extend(error.errors)
        except TypeError as error:
            errors.append(f'[{name}] {error}')
    unknown_output = sorted(set(output_values) - {'output_dir', 'checkpoint'})
    errors.extend(f'unknown output setting "{name}"' for name in unknown_output)
    if errors:
        raise ConfigurationError(errors)
    config = ExperimentConfig(sections['train'], sections['data'],
                              str(output_values.get('output_dir', ExperimentConfig.output_dir)),
                              bool(output_values.get('checkpoint', ExperimentConfig.checkpoint)))
    return config.validate(require_seed)


def dump_config(config):
    """The effective configuration as TOML text."""
    return toml.dumps(config.as_dict())


def _write_trajectory(path, events, append):
    with open(path, 'a' if append else 'w', encoding=ENCODING, newline='') as trajectory:
        writer = csv.writer(trajectory)
        if not append:
            writer.writerow(TRAJECTORY_COLUMNS)
        for event in events:
            if event.kind is not EventKind.ACCEPTED:
                continue
            writer.writerow([event.accepted_updates,
                             '' if event.loss is None else repr(event.loss),
                             '' if event.test_metric is None else repr(event.test_metric),
                             repr(event.epsilon)])


@dataclass(frozen=True)
class ExperimentResult:
    """Summary of a run, mirrored into result.json."""

    config: dict
    config_digest: str
    algorithm: str
    final_metric: Optional[float]
    accepted: int
    rejected: int
    skipped: int
    accepted_updates: int
    budget_updates: int
    epsilon: float
    delta: float
    best_order: Optional[int]
    stop_reason: str
    trace_path: Optional[str] = None

    def as_dict(self):
        return _json_ready(asdict(self))


def _result(config, trace, trace_path=None):
    return ExperimentResult(config.as_dict(), config.digest(), trace.algorithm.value, trace.final_test_metric,
                            trace.accepted, trace.rejected, trace.skipped, trace.accepted_updates,
                            trace.budget_updates, trace.final_epsilon, trace.delta, trace.best_order,
                            trace.stop_reason.value, trace_path)


def run_experiment(config, resume=False, data=None):
    """Trains according to ``config`` and writes the run artifacts.

    Args:
        config: A validated ExperimentConfig.
        resume: Continue from the checkpoint in the output directory.
        data: Optional (train, test) datasets to use instead of loading them.

    Returns:
        ExperimentResult: The summary that was also written to result.json.

    """
    config = config.validate()
    output = Path(config.output_dir)
    output.mkdir(parents=True, exist_ok=True)
    train_set, test_set = data or config.data.load()
    Path(output, CONFIG_FILENAME).write_text(dump_config(config), encoding=ENCODING)
    initial_state = None
    checkpoint_path = Path(output, CHECKPOINT_FILENAME)
    if resume:
        if not checkpoint_path.exists():
            raise ConfigurationError([f'no checkpoint to resume from in {output}'])
        initial_state = load_checkpoint(checkpoint_path)
    trace_path = Path(output, TRACE_FILENAME)
    with open(trace_path, 'a' if resume else 'w', encoding=ENCODING) as trace_file:

        def write_event(event):
            trace_file.write(json.dumps(trace_record(event), allow_nan=False) + '\n')
            trace_file.flush()

        _, trace = train(train_set, test_set, config.train, write_event, initial_state)
    _write_trajectory(Path(output, TRAJECTORY_FILENAME), trace.events, append=resume)
    if config.checkpoint:
        save_checkpoint(checkpoint_path, trace.final_state)
    result = _result(config, trace, str(trace_path))
    Path(output, RESULT_FILENAME).write_text(json.dumps(result.as_dict(), indent=2, allow_nan=False),
                                             encoding=ENCODING)
    LOGGER.info('Run written to %s', output)
    return result


@dataclass(frozen=True)
class PairedRun:
    seed: int
    dpsur_loss: float
    dpsgd_loss: float
    dpsur_metric: Optional[float]
    dpsgd_metric: Optional[float]
    dpsur_epsilon: float
    dpsgd_epsilon: float

    @property
    def dpsur_wins(self):
        """At least as low a training loss and, for classifiers, at least as high an accuracy."""
        if self.dpsur_loss > self.dpsgd_loss:
            return False
        if self.dpsur_metric is None or self.dpsgd_metric is None:
            return True
        return self.dpsur_metric >= self.dpsgd_metric


@dataclass(frozen=True)
class Comparison:
    runs: List[PairedRun]
    higher_is_better: bool

    @property
    def wins(self):
        return sum(run.dpsur_wins for run in self.runs)


def compare_algorithms(config, seeds):
    """Runs dpsur and dpsgd on the same data for every seed.

    dpsur wins a seed when its final training loss is no higher than the
    dpsgd one and, for classifiers, its test accuracy is no lower.
    """
    if not seeds:
        raise InvalidParameterError('At least one seed is needed for a comparison')
    config = config.validate()
    train_set, test_set = config.data.load()
    classifier = not train_set.is_regression
    runs = []
    for seed in seeds:
        outcomes = {}
        for algorithm in Algorithm:
            train_config = replace(config.train, algorithm=algorithm, seed=seed)
            params, trace = train(train_set, test_set, train_config)
            outcomes[algorithm] = (loss(params, train_set.batch),
                                   trace.final_test_metric if classifier else None,
                                   trace.final_epsilon)
        dpsur, dpsgd = outcomes[Algorithm.DPSUR], outcomes[Algorithm.DPSGD]
        runs.append(PairedRun(seed, dpsur[0], dpsgd[0], dpsur[1], dpsgd[1], dpsur[2], dpsgd[2]))
        LOGGER.info('Seed %s: dpsur loss %.5f, dpsgd loss %.5f', seed, dpsur[0], dpsgd[0])
    comparison = Comparison(runs, classifier)
    LOGGER.info('dpsur at least as good as dpsgd in %s of %s seeds', comparison.wins, len(runs))
    return comparison
