#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: engine.py
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
Training loops.

``dpsur_train`` only keeps a noisy gradient step when a privately tested
validation loss says it helped and only pays privacy for the steps it keeps.
``dpsgd_train`` is the baseline that keeps and pays for every step. Both
draw their randomness from independent seeded streams so an accept or a
reject never shifts the sampling of later iterations.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import json
import logging
import math
import numbers
import struct
import time
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from dpsurcli.accountant import (PrivacyLedger,
                                 SubsampledGaussianSpec,
                                 calibrate_max_updates,
                                 ledger_epsilon_and_order)
from dpsurcli.conf import (CHECKPOINT_MAGIC,
                           CHECKPOINT_VERSION,
                           DEFAULT_BETA,
                           DEFAULT_DELTA,
                           DEFAULT_MOMENTUM,
                           DEFAULT_VALID_BATCH_SIZE,
                           DEFAULT_VALID_CLIP_BOUND,
                           ENCODING,
                           MAX_CALIBRATION_UPDATES,
                           MAX_TRAINING_ITERATIONS)
from dpsurcli.dpsurcliexceptions import (CheckpointFormatError,
                                         ConfigurationError,
                                         InfeasibleBudgetError,
                                         NonFiniteValueError,
                                         ShapeMismatchError)
from dpsurcli.mechanisms import ClipMode, ValidationMechanismSpec, noisy_threshold_test
from dpsurcli.models import (ExampleBatch,
                             GradientDivisor,
                             ModelKind,
                             ModelParams,
                             clip_per_sample,
                             init_params,
                             loss,
                             noisy_mean_gradient,
                             per_sample_gradients,
                             predict,
                             sgd_momentum_step)

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
LOGGER_BASENAME = '''dpsurcli.engine'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())

STREAM_NAMES = ('train_sampling', 'gradient_noise', 'valid_sampling', 'valid_noise', 'init')


class Algorithm(str, Enum):
    DPSUR = 'dpsur'
    DPSGD = 'dpsgd'


class EventKind(str, Enum):
    ACCEPTED = 'accepted'
    REJECTED = 'rejected'
    SKIPPED = 'skipped'


class StopReason(str, Enum):
    MAX_UPDATES = 'max_updates'
    BUDGET = 'budget'
    ITERATION_CAP = 'iteration_cap'


_ENUM_FIELDS = {'algorithm': Algorithm,
                'model': ModelKind,
                'clipping': ClipMode,
                'gradient_divisor': GradientDivisor}


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run needs apart from the data.

    Batch sizes are expected sizes; the realized Poisson batches vary.
    ``max_updates`` caps the accepted updates on top of what the budget
    affords, None leaves the budget alone in charge. A zero noise multiplier
    is only accepted together with an infinite target epsilon.
    """

    algorithm: Algorithm = Algorithm.DPSUR
    model: ModelKind = ModelKind.LOGISTIC
    hidden_dim: int = 16
    eta: float = 0.5
    momentum: float = DEFAULT_MOMENTUM
    train_batch_size: int = 256
    valid_batch_size: int = DEFAULT_VALID_BATCH_SIZE
    train_clip_bound: float = 1.0
    valid_clip_bound: float = DEFAULT_VALID_CLIP_BOUND
    train_noise_multiplier: float = 1.1
    valid_noise_multiplier: float = 0.8
    beta: float = DEFAULT_BETA
    target_epsilon: float = 3.0
    delta: float = DEFAULT_DELTA
    max_updates: Optional[int] = None
    max_iterations: int = MAX_TRAINING_ITERATIONS
    seed: Optional[int] = None
    clipping: ClipMode = ClipMode.MINIMAL
    gradient_divisor: GradientDivisor = GradientDivisor.REALIZED
    charge_validation: bool = True
    eval_every: int = 0

    def __post_init__(self):
        for name, enum in _ENUM_FIELDS.items():
            try:
                object.__setattr__(self, name, enum(getattr(self, name)))
            except ValueError:
                pass

    @classmethod
    def field_names(cls):
        return [item.name for item in fields(cls)]

    @classmethod
    def from_dict(cls, data):
        unknown = sorted(set(data) - set(cls.field_names()))
        if unknown:
            raise ConfigurationError([f'unknown train setting "{name}"' for name in unknown])
        return cls(**data)

    def as_dict(self):
        return {key: value.value if isinstance(value, Enum) else value
                for key, value in asdict(self).items()}

    @property
    def charges_validation(self):
        return self.algorithm is Algorithm.DPSUR and self.charge_validation

    def validate(self, dataset_size=None, require_seed=True):
        """Collects every problem of the config and raises them in one go.

        A missing seed only counts as a problem with ``require_seed``.

        Raises:
            ConfigurationError: Listing all violations.

        """
        errors = []
        for name, enum in _ENUM_FIELDS.items():
            if not isinstance(getattr(self, name), enum):
                choices = ', '.join(member.value for member in enum)
                errors.append(f'{name} must be one of {choices}, got {getattr(self, name)!r}')
        if self.seed is None:
            if require_seed:
                errors.append('seed is required')
        elif not _is_count(self.seed, minimum=0):
            errors.append(f'seed must be a non negative integer, got {self.seed!r}')
        if not _is_positive(self.eta):
            errors.append(f'eta must be positive, got {self.eta}')
        if not (_is_number(self.momentum) and 0 <= self.momentum < 1):
            errors.append(f'momentum must lie in [0, 1), got {self.momentum}')
        for name in ('train_batch_size', 'valid_batch_size'):
            value = getattr(self, name)
            if not _is_count(value, minimum=1):
                errors.append(f'{name} must be a positive integer, got {value!r}')
            elif dataset_size is not None and value > dataset_size:
                errors.append(f'{name} {value} exceeds the {dataset_size} training examples')
        for name in ('train_clip_bound', 'valid_clip_bound'):
            if not _is_positive(getattr(self, name)):
                errors.append(f'{name} must be positive, got {getattr(self, name)}')
        noiseless = []
        for name in ('train_noise_multiplier', 'valid_noise_multiplier'):
            value = getattr(self, name)
            if not (_is_number(value) and math.isfinite(value) and value >= 0):
                errors.append(f'{name} must be a finite non negative number, got {value!r}')
            elif value == 0:
                noiseless.append(name)
        charged = {'train_noise_multiplier'} | ({'valid_noise_multiplier'} if self.charges_validation else set())
        if charged & set(noiseless) and self.target_epsilon != math.inf:
            errors.append('a zero noise multiplier gives no privacy, set target_epsilon to inf')
        if not _is_number(self.beta) or math.isnan(self.beta):
            errors.append(f'beta must be a number, got {self.beta!r}')
        if not (_is_number(self.target_epsilon) and self.target_epsilon > 0):
            errors.append(f'target_epsilon must be positive, got {self.target_epsilon!r}')
        if not (_is_number(self.delta) and 0 < self.delta < 1):
            errors.append(f'delta must lie in (0, 1), got {self.delta!r}')
        if self.max_updates is not None and not _is_count(self.max_updates, minimum=1):
            errors.append(f'max_updates must be a positive integer, got {self.max_updates!r}')
        if not _is_count(self.max_iterations, minimum=1):
            errors.append(f'max_iterations must be a positive integer, got {self.max_iterations!r}')
        if self.model is ModelKind.MLP1 and not _is_count(self.hidden_dim, minimum=1):
            errors.append(f'hidden_dim must be a positive integer, got {self.hidden_dim!r}')
        if not _is_count(self.eval_every, minimum=0):
            errors.append(f'eval_every must be a non negative integer, got {self.eval_every!r}')
        if errors:
            raise ConfigurationError(errors)
        return self


def _is_count(value, minimum):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool) and value >= minimum


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _is_positive(value):
    return _is_number(value) and math.isfinite(value) and value > 0


class RngStreams:
    """Independent generators spawned from one master seed."""

    def __init__(self, seed):
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        self._generators = {name: np.random.Generator(np.random.PCG64(child))
                            for name, child in zip(STREAM_NAMES, children)}

    def __getattr__(self, name):
        try:
            return self.__dict__['_generators'][name]
        except KeyError:
            raise AttributeError(name) from None

    def get_state(self):
        return {name: generator.bit_generator.state for name, generator in self._generators.items()}

    def set_state(self, state):
        if set(state) != set(STREAM_NAMES):
            raise CheckpointFormatError(f'Expected generator states for {", ".join(STREAM_NAMES)}')
        for name, generator in self._generators.items():
            generator.bit_generator.state = state[name]


def poisson_sample(dataset, rate, rng):
    """Indices of a Poisson sample, each included independently with probability ``rate``.

    ``dataset`` is a size or anything with a length.
    """
    size = int(dataset) if isinstance(dataset, numbers.Integral) else len(dataset)
    if not 0 < rate <= 1:
        raise ConfigurationError([f'sampling rate must lie in (0, 1], got {rate}'])
    return np.flatnonzero(rng.random(size) < rate)


@dataclass(frozen=True)
class TraceEvent:
    """One iteration of a training loop.

    ``loss`` is the loss of the parameters kept after the event, measured on
    the validation batch for dpsur and on the training batch for dpsgd.
    """

    kind: EventKind
    iteration: int
    accepted_updates: int
    train_batch_size: int
    valid_batch_size: Optional[int]
    loss: Optional[float]
    delta_e: Optional[float]
    noisy_value: Optional[float]
    epsilon: float
    delta: float
    elapsed: float
    test_metric: Optional[float] = None

    def as_record(self, include_timing=True):
        """The trace line of the event.

        ``t`` counts the accepted updates so far and ``accuracy`` carries
        the periodic test metric, which is the test loss for regression.
        """
        record = {'event': self.kind.value,
                  't': self.accepted_updates,
                  'iteration': self.iteration,
                  'loss': self.loss,
                  'epsilon': self.epsilon,
                  'accuracy': self.test_metric,
                  'delta': self.delta,
                  'train_batch_size': self.train_batch_size,
                  'valid_batch_size': self.valid_batch_size,
                  'delta_e': self.delta_e,
                  'noisy_value': self.noisy_value}
        if include_timing:
            record['elapsed'] = self.elapsed
        return record


@dataclass(frozen=True)
class TrainingState:
    """Everything needed to resume a run exactly where it stopped."""

    params: ModelParams
    accepted_updates: int
    iterations: int
    rng_state: Dict[str, Any]
    algorithm: Algorithm
    accounting: Dict[str, Any] = field(default_factory=dict)


@dataclass
class TrainTrace:
    algorithm: Algorithm
    delta: float
    budget_updates: int
    events: List[TraceEvent] = field(default_factory=list)
    stop_reason: Optional[StopReason] = None
    final_epsilon: float = 0.0
    best_order: Optional[int] = None
    final_test_metric: Optional[float] = None
    final_state: Optional[TrainingState] = None

    def _count(self, kind):
        return sum(1 for event in self.events if event.kind is kind)

    @property
    def accepted(self):
        return self._count(EventKind.ACCEPTED)

    @property
    def rejected(self):
        return self._count(EventKind.REJECTED)

    @property
    def skipped(self):
        return self._count(EventKind.SKIPPED)

    @property
    def accepted_updates(self):
        return self.final_state.accepted_updates if self.final_state else self.accepted


def _as_batch(data):
    batch = getattr(data, 'batch', data)
    return batch if isinstance(batch, ExampleBatch) else ExampleBatch.from_examples(batch)


def evaluate(params, test_set):
    """Accuracy for classifiers, mean loss for regression."""
    batch = _as_batch(test_set)
    if not len(batch):
        raise ShapeMismatchError('Cannot evaluate on an empty test set')
    if params.kind.is_classifier:
        return float(np.mean(predict(params, batch.features) == batch.labels))
    return loss(params, batch)


class _TrainingLoop:
    """Runs one training loop; use :func:`dpsur_train` or :func:`dpsgd_train`."""

    def __init__(self, dataset, test_set, config, callback=None, initial_state=None):
        self._logger = logging.getLogger(f'{LOGGER_BASENAME}.{self.__class__.__name__}')
        self.dataset = dataset
        self.data = _as_batch(dataset)
        self.test_set = test_set
        self.callback = callback
        self.size = len(self.data)
        self.config = config.validate(self.size)
        self.train_rate = min(1.0, config.train_batch_size / self.size)
        self.valid_rate = min(1.0, config.valid_batch_size / self.size)
        self.validation = ValidationMechanismSpec(config.valid_clip_bound,
                                                  config.valid_noise_multiplier,
                                                  config.beta,
                                                  config.clipping)
        self.streams = RngStreams(config.seed)
        self.ledger = self._ledger()
        self.budget_updates = self._budget_updates()
        self.params, self.accepted_updates, self.iterations = self._start(initial_state)
        self.epsilon, self.best_order = self._epsilon()
        self.skips = 0

    def _specs(self):
        if self.config.train_noise_multiplier == 0:
            return None, None
        train_spec = SubsampledGaussianSpec(self.train_rate, self.config.train_noise_multiplier)
        valid_spec = None
        if self.config.charges_validation:
            if self.config.valid_noise_multiplier == 0:
                return None, None
            valid_spec = SubsampledGaussianSpec(self.valid_rate, self.config.valid_noise_multiplier)
        return train_spec, valid_spec

    def _ledger(self):
        train_spec, valid_spec = self._specs()
        if train_spec is None:
            self._logger.warning('Training without noise, no privacy is accounted for')
            return None
        return PrivacyLedger(0, train_spec, valid_spec, self.config.delta)

    def _budget_updates(self):
        cap = self.config.max_updates or MAX_CALIBRATION_UPDATES
        if self.config.target_epsilon == math.inf:
            return cap
        affordable = calibrate_max_updates(self.ledger.train_spec,
                                           self.ledger.valid_spec,
                                           self.config.target_epsilon,
                                           self.config.delta)
        if affordable == 0:
            raise InfeasibleBudgetError(f'Target epsilon {self.config.target_epsilon} cannot pay for a '
                                        f'single accepted update at delta {self.config.delta}')
        self._logger.info('Budget of epsilon %s affords %s accepted updates',
                          self.config.target_epsilon, affordable)
        return affordable

    def accounting(self):
        if self.ledger is None:
            return {}
        valid_spec = self.ledger.valid_spec
        return {'train_rate': self.ledger.train_spec.q,
                'train_noise_multiplier': self.ledger.train_spec.sigma,
                'valid_rate': valid_spec.q if valid_spec else None,
                'valid_noise_multiplier': valid_spec.sigma if valid_spec else None,
                'delta': self.ledger.delta}

    def _start(self, initial_state):
        if self.config.model is ModelKind.LINEAR:
            output_dim = 1
        else:
            output_dim = getattr(self.dataset, 'n_classes', None) or int(np.max(self.data.labels)) + 1
        if initial_state is None:
            params = init_params(self.config.model,
                                 self.data.features.shape[1],
                                 output_dim,
                                 self.streams.init,
                                 hidden_dim=self.config.hidden_dim if self.config.model is ModelKind.MLP1 else 0)
            return params, 0, 0
        if initial_state.algorithm is not self.config.algorithm:
            raise ConfigurationError([f'checkpoint was written by {initial_state.algorithm.value}, '
                                      f'not {self.config.algorithm.value}'])
        if initial_state.accounting != self.accounting():
            raise ConfigurationError(['checkpoint accounting does not match the config'])
        self.streams.set_state(initial_state.rng_state)
        if self.ledger is not None:
            self.ledger = replace(self.ledger, accepted_updates=initial_state.accepted_updates)
        self._logger.info('Resuming at iteration %s with %s accepted updates',
                          initial_state.iterations, initial_state.accepted_updates)
        return initial_state.params, initial_state.accepted_updates, initial_state.iterations

    def _epsilon(self):
        if self.ledger is None:
            return math.inf, None
        return ledger_epsilon_and_order(self.ledger)

    def _event(self, kind, train_size, valid_size=None, loss_value=None, delta_e=None, noisy_value=None):
        test_metric = None
        if (kind is EventKind.ACCEPTED and self.config.eval_every
                and self.accepted_updates % self.config.eval_every == 0 and self.test_set is not None):
            test_metric = evaluate(self.params, self.test_set)
        event = TraceEvent(kind, self.iterations, self.accepted_updates, int(train_size), valid_size,
                           loss_value, delta_e, noisy_value, self.epsilon, self.config.delta,
                           time.perf_counter() - self.started, test_metric)
        self._logger.debug('Iteration %s %s, t=%s, epsilon=%.6f', self.iterations, kind.value,
                           self.accepted_updates, self.epsilon)
        if self.callback is not None:
            self.callback(event)
        return event

    def _skip(self, phase):
        self.skips += 1
        if self.skips == 1:
            self._logger.warning('Iteration %s drew an empty %s batch and was skipped without privacy cost',
                                 self.iterations, phase)
        else:
            self._logger.debug('Iteration %s skipped on an empty %s batch', self.iterations, phase)

    def _accept(self, candidate):
        self.params = candidate
        self.accepted_updates += 1
        if self.ledger is not None:
            self.ledger = self.ledger.charge()
            self.epsilon, self.best_order = self._epsilon()

    def _candidate(self, batch):
        gradients = clip_per_sample(per_sample_gradients(self.params, batch), self.config.train_clip_bound)
        gradient = noisy_mean_gradient(gradients,
                                       self.config.train_noise_multiplier,
                                       self.streams.gradient_noise,
                                       expected_batch_size=self.config.train_batch_size,
                                       divisor=self.config.gradient_divisor)
        return sgd_momentum_step(self.params, gradient, self.config.eta, self.config.momentum)

    def step(self):
        self.iterations += 1
        train_indices = poisson_sample(self.size, self.train_rate, self.streams.train_sampling)
        if not train_indices.size:
            self._skip('training')
            return self._event(EventKind.SKIPPED, 0)
        train_batch = self.data.subset(train_indices)
        candidate = self._candidate(train_batch)
        if self.config.algorithm is Algorithm.DPSGD:
            self._accept(candidate)
            return self._event(EventKind.ACCEPTED, train_indices.size, loss_value=loss(candidate, train_batch))
        valid_indices = poisson_sample(self.size, self.valid_rate, self.streams.valid_sampling)
        if not valid_indices.size:
            self._skip('validation')
            return self._event(EventKind.SKIPPED, train_indices.size, valid_size=0)
        valid_batch = self.data.subset(valid_indices)
        previous_loss = loss(self.params, valid_batch)
        candidate_loss = loss(candidate, valid_batch)
        delta_e = candidate_loss - previous_loss
        test = noisy_threshold_test(delta_e, self.validation, self.streams.valid_noise)
        if test.accepted:
            self._accept(candidate)
            kind, kept_loss = EventKind.ACCEPTED, candidate_loss
        else:
            kind, kept_loss = EventKind.REJECTED, previous_loss
        return self._event(kind, train_indices.size, int(valid_indices.size), kept_loss,
                           float(delta_e), test.noisy_value)

    def state(self):
        return TrainingState(self.params, self.accepted_updates, self.iterations,
                             self.streams.get_state(), self.config.algorithm, self.accounting())

    def run(self):
        self.started = time.perf_counter()
        trace = TrainTrace(self.config.algorithm, self.config.delta, self.budget_updates)
        limit = min(self.budget_updates, self.config.max_updates or self.budget_updates)
        self._logger.info('Training %s with %s on %s examples, at most %s accepted updates',
                          self.config.model.value, self.config.algorithm.value, self.size, limit)
        while self.accepted_updates < limit and self.iterations < self.config.max_iterations:
            try:
                trace.events.append(self.step())
            except NonFiniteValueError as error:
                raise NonFiniteValueError(str(error), self.iterations) from error
        if self.accepted_updates >= limit:
            budget_binds = self.config.target_epsilon != math.inf and limit == self.budget_updates
            trace.stop_reason = StopReason.BUDGET if budget_binds else StopReason.MAX_UPDATES
        else:
            trace.stop_reason = StopReason.ITERATION_CAP
            self._logger.warning('Stopped at the iteration cap of %s with %s accepted updates',
                                 self.config.max_iterations, self.accepted_updates)
        if self.skips > 1:
            self._logger.warning('%s iterations were skipped on empty batches', self.skips)
        trace.final_epsilon, trace.best_order = self.epsilon, self.best_order
        if self.test_set is not None:
            trace.final_test_metric = evaluate(self.params, self.test_set)
        trace.final_state = self.state()
        self._logger.info('Stopped on %s: %s accepted, %s rejected, %s skipped, epsilon %.4f',
                          trace.stop_reason.value, trace.accepted, trace.rejected, trace.skipped,
                          trace.final_epsilon)
        return self.params, trace


def dpsur_train(dataset, test_set, config, callback=None, initial_state=None):
    """Trains with selective updates and release.

    Args:
        dataset: Training data, a Dataset or an ExampleBatch.
        test_set: Held out data for the test metric, may be None.
        config: The TrainConfig; its algorithm is forced to dpsur.
        callback: Called with every TraceEvent as it happens.
        initial_state: A TrainingState to resume from.

    Returns:
        tuple: (final ModelParams, TrainTrace)

    Raises:
        ConfigurationError: On an invalid config.
        InfeasibleBudgetError: When the budget cannot pay for one accepted update.
        NonFiniteValueError: When a loss or gradient stops being finite.

    """
    config = replace(config, algorithm=Algorithm.DPSUR)
    return _TrainingLoop(dataset, test_set, config, callback, initial_state).run()


def dpsgd_train(dataset, test_set, config, callback=None, initial_state=None):
    """Plain DPSGD, every step is kept and charged. Arguments as :func:`dpsur_train`."""
    config = replace(config, algorithm=Algorithm.DPSGD)
    return _TrainingLoop(dataset, test_set, config, callback, initial_state).run()


def train(dataset, test_set, config, callback=None, initial_state=None):
    """Dispatches on ``config.algorithm``."""
    trainer = dpsur_train if Algorithm(config.algorithm) is Algorithm.DPSUR else dpsgd_train
    return trainer(dataset, test_set, config, callback, initial_state)


def save_checkpoint(path, state):
    """Writes ``state`` to ``path``.

    Layout: magic, uint16 version, uint32 header length, JSON header, then the
    weights and the momentum buffer as little endian float64.
    """
    params = state.params
    header = {'algorithm': state.algorithm.value,
              'kind': params.kind.value,
              'input_dim': params.input_dim,
              'output_dim': params.output_dim,
              'hidden_dim': params.hidden_dim,
              'size': params.size,
              'accepted_updates': state.accepted_updates,
              'iterations': state.iterations,
              'accounting': state.accounting,
              'rng_state': state.rng_state}
    encoded = json.dumps(header, sort_keys=True).encode(ENCODING)
    with open(path, 'wb') as checkpoint:
        checkpoint.write(CHECKPOINT_MAGIC)
        checkpoint.write(struct.pack('<HI', CHECKPOINT_VERSION, len(encoded)))
        checkpoint.write(encoded)
        checkpoint.write(params.weights.astype('<f8').tobytes())
        checkpoint.write(params.momentum.astype('<f8').tobytes())
    LOGGER.info('Wrote checkpoint at %s accepted updates to %s', state.accepted_updates, path)


def load_checkpoint(path):
    """Reads a TrainingState written by :func:`save_checkpoint`.

    Raises:
        CheckpointFormatError: On a bad magic, an unknown version or a truncated file.

    """
    with open(path, 'rb') as checkpoint:
        payload = checkpoint.read()
    prefix = len(CHECKPOINT_MAGIC)
    if payload[:prefix] != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(f'{path} is not a checkpoint')
    try:
        version, length = struct.unpack_from('<HI', payload, prefix)
    except struct.error:
        raise CheckpointFormatError(f'{path} is truncated') from None
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f'Unsupported checkpoint version {version}')
    start = prefix + struct.calcsize('<HI')
    try:
        header = json.loads(payload[start:start + length].decode(ENCODING))
    except ValueError:
        raise CheckpointFormatError(f'{path} has a corrupt header') from None
    body = payload[start + length:]
    width = header['size'] * 8
    if len(body) != 2 * width:
        raise CheckpointFormatError(f'{path} holds {len(body)} bytes of parameters, expected {2 * width}')
    weights = np.frombuffer(body[:width], dtype='<f8')
    momentum = np.frombuffer(body[width:], dtype='<f8')
    params = ModelParams(header['kind'], header['input_dim'], header['output_dim'], weights, momentum,
                         hidden_dim=header['hidden_dim'])
    return TrainingState(params, header['accepted_updates'], header['iterations'], header['rng_state'],
                         Algorithm(header['algorithm']), header['accounting'])
