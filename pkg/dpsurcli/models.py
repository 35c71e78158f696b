#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: models.py
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
Small differentiable models with exact per-sample gradients.

Linear regression, multinomial logistic regression and a one hidden layer
tanh network. Parameters are a flat float64 vector plus a momentum buffer of
the same length; all operations return new objects so a rejected candidate
leaves the previous parameters untouched.

Flat layouts:
    linear:   w (d), b
    logistic: W (k x d, row major), b (k)
    mlp1:     W1 (h x d), b1 (h), W2 (k x h), b2 (k)

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from dpsurcli.dpsurcliexceptions import (InvalidParameterError,
                                         NonFiniteValueError,
                                         ShapeMismatchError)

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
LOGGER_BASENAME = '''dpsurcli.models'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())


class ModelKind(str, Enum):
    LINEAR = 'linear'
    LOGISTIC = 'logistic'
    MLP1 = 'mlp1'

    @property
    def is_classifier(self):
        return self is not ModelKind.LINEAR


class GradientDivisor(str, Enum):
    REALIZED = 'realized'
    EXPECTED = 'expected'


def parameter_count(kind, input_dim, output_dim, hidden_dim=0):
    """Length of the flat weight vector of a model."""
    kind = ModelKind(kind)
    if kind is ModelKind.LINEAR:
        return input_dim + 1
    if kind is ModelKind.LOGISTIC:
        return output_dim * input_dim + output_dim
    return hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim


def _frozen(values):
    array = np.array(values, dtype=float, copy=True).reshape(-1)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class ModelParams:
    """Weights and momentum buffer of a model together with its shape."""

    kind: ModelKind
    input_dim: int
    output_dim: int
    weights: np.ndarray = field(repr=False)
    momentum: Optional[np.ndarray] = field(default=None, repr=False)
    hidden_dim: int = 0

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        if self.input_dim < 1 or self.output_dim < 1:
            raise InvalidParameterError('Input and output dimensions must be positive')
        if kind is ModelKind.LINEAR and self.output_dim != 1:
            raise InvalidParameterError('Linear regression has a single output')
        if kind.is_classifier and self.output_dim < 2:
            raise InvalidParameterError('A classifier needs at least two classes')
        if kind is ModelKind.MLP1 and self.hidden_dim < 1:
            raise InvalidParameterError('mlp1 needs a positive hidden dimension')
        weights = _frozen(self.weights)
        momentum = np.zeros_like(weights) if self.momentum is None else self.momentum
        momentum = _frozen(momentum)
        expected = parameter_count(kind, self.input_dim, self.output_dim, self.hidden_dim)
        if weights.size != expected or momentum.size != expected:
            raise ShapeMismatchError(f'{kind.value} model of shape ({self.input_dim}, {self.output_dim}, '
                                     f'{self.hidden_dim}) has {expected} weights, got {weights.size} '
                                     f'weights and {momentum.size} momentum entries')
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(momentum))):
            raise NonFiniteValueError('Model parameters contain non finite entries')
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'momentum', momentum)

    @property
    def size(self):
        return self.weights.size

    def same_as(self, other):
        """Bitwise equality of weights and momentum."""
        return (self.kind is other.kind
                and self.weights.tobytes() == other.weights.tobytes()
                and self.momentum.tobytes() == other.momentum.tobytes())


class Example(NamedTuple):
    features: tuple
    label: float


@dataclass(frozen=True)
class ExampleBatch:
    """Array view of a list of examples, one row per example."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim == 1:
            features = features.reshape(1, -1) if features.size else features.reshape(0, 0)
        labels = np.asarray(self.labels, dtype=float).reshape(-1)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ShapeMismatchError(f'{features.shape[0] if features.ndim else 0} feature rows '
                                     f'but {labels.shape[0]} labels')
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def from_examples(cls, examples):
        examples = list(examples)
        if not examples:
            return cls(np.empty((0, 0)), np.empty(0))
        return cls(np.array([example.features for example in examples], dtype=float),
                   np.array([example.label for example in examples], dtype=float))

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, indices):
        return ExampleBatch(self.features[indices], self.labels[indices])

    def to_examples(self):
        return [Example(tuple(row), label) for row, label in zip(self.features.tolist(), self.labels.tolist())]


@dataclass(frozen=True)
class GradientBatch:
    """Per-sample gradients, one row per example."""

    per_sample: np.ndarray
    clip_bound: Optional[float] = None
    clipped: bool = False

    def __len__(self):
        return self.per_sample.shape[0]


def _as_batch(batch):
    return batch if isinstance(batch, ExampleBatch) else ExampleBatch.from_examples(batch)


def _check_batch(params, batch):
    batch = _as_batch(batch)
    if not len(batch):
        raise ShapeMismatchError('Batch is empty')
    if batch.features.shape[1] != params.input_dim:
        raise ShapeMismatchError(f'Model expects {params.input_dim} features, '
                                 f'batch has {batch.features.shape[1]}')
    if not np.all(np.isfinite(batch.features)):
        raise NonFiniteValueError('Batch features contain non finite entries')
    if params.kind.is_classifier:
        labels = batch.labels
        if np.any(labels != np.round(labels)) or np.any(labels < 0) or np.any(labels >= params.output_dim):
            raise ShapeMismatchError(f'Class labels must be integers in [0, {params.output_dim})')
    return batch


def _layers(params):
    d, k, h, w = params.input_dim, params.output_dim, params.hidden_dim, params.weights
    if params.kind is ModelKind.LINEAR:
        return w[:d], w[d]
    if params.kind is ModelKind.LOGISTIC:
        return w[:k * d].reshape(k, d), w[k * d:]
    first = h * d
    second = first + h
    third = second + k * h
    return (w[:first].reshape(h, d), w[first:second],
            w[second:third].reshape(k, h), w[third:])


def _logits(params, features):
    layers = _layers(params)
    if params.kind is ModelKind.LOGISTIC:
        weights, bias = layers
        return features @ weights.T + bias, None
    hidden_weights, hidden_bias, output_weights, output_bias = layers
    activation = np.tanh(features @ hidden_weights.T + hidden_bias)
    return activation @ output_weights.T + output_bias, activation


def _cross_entropy(logits, labels):
    classes = labels.astype(int)
    log_norm = special.logsumexp(logits, axis=1)
    losses = log_norm - logits[np.arange(len(classes)), classes]
    errors = np.exp(logits - log_norm[:, None])
    errors[np.arange(len(classes)), classes] -= 1.0
    return losses, errors


def per_sample_losses(params, batch):
    batch = _check_batch(params, batch)
    if params.kind is ModelKind.LINEAR:
        weights, bias = _layers(params)
        residual = batch.features @ weights + bias - batch.labels
        return 0.5 * residual ** 2
    logits, _ = _logits(params, batch.features)
    losses, _ = _cross_entropy(logits, batch.labels)
    return losses


def loss(params, batch):
    """Mean per-sample loss of ``batch``.

    Half squared error for linear regression, cross-entropy in nats for the
    classifiers.
    """
    losses = per_sample_losses(params, batch)
    value = float(np.mean(losses))
    if not math.isfinite(value):
        raise NonFiniteValueError('Loss is not finite')
    return value


def per_sample_gradients(params, batch):
    """Exact analytic gradient of the loss of every example, one row each."""
    batch = _check_batch(params, batch)
    features = batch.features
    count = len(batch)
    if params.kind is ModelKind.LINEAR:
        weights, bias = _layers(params)
        residual = features @ weights + bias - batch.labels
        gradients = np.hstack([residual[:, None] * features, residual[:, None]])
    elif params.kind is ModelKind.LOGISTIC:
        logits, _ = _logits(params, features)
        _, errors = _cross_entropy(logits, batch.labels)
        weight_grads = np.einsum('nk,nd->nkd', errors, features).reshape(count, -1)
        gradients = np.hstack([weight_grads, errors])
    else:
        _, _, output_weights, _ = _layers(params)
        logits, activation = _logits(params, features)
        _, errors = _cross_entropy(logits, batch.labels)
        hidden_errors = (errors @ output_weights) * (1.0 - activation ** 2)
        gradients = np.hstack([np.einsum('nh,nd->nhd', hidden_errors, features).reshape(count, -1),
                               hidden_errors,
                               np.einsum('nk,nh->nkh', errors, activation).reshape(count, -1),
                               errors])
    return GradientBatch(gradients)


def clip_per_sample(gradients, clip_bound):
    """Scales each gradient by 1 / max(1, norm / clip_bound).

    Gradients already inside the ball come back bit for bit.
    """
    if not clip_bound > 0:
        raise InvalidParameterError(f'Clip bound must be positive, got {clip_bound}')
    per_sample = gradients.per_sample
    if not np.all(np.isfinite(per_sample)):
        raise NonFiniteValueError('Per-sample gradients contain non finite entries')
    norms = np.linalg.norm(per_sample, axis=1)
    factors = np.maximum(1.0, norms / clip_bound)
    return GradientBatch(per_sample / factors[:, None], float(clip_bound), True)


def noisy_mean_gradient(gradients,
                        noise_multiplier,
                        rng,
                        expected_batch_size=None,
                        divisor=GradientDivisor.REALIZED):
    """Sum of clipped gradients plus N(0, (sigma C)^2) noise, divided by the batch size.

    Args:
        gradients: A clipped GradientBatch.
        noise_multiplier: sigma_t, zero for a noiseless step.
        rng: Generator of the gradient noise stream.
        expected_batch_size: Fixed divisor used with ``divisor='expected'``.
        divisor: ``realized`` divides by the sampled batch size, ``expected`` by
            ``expected_batch_size``.

    Returns:
        numpy.ndarray: The noisy gradient, or None for an empty batch, in which
            case nothing is drawn from ``rng``.

    """
    if not gradients.clipped:
        raise InvalidParameterError('Gradients must be clipped before noise is added')
    if noise_multiplier < 0:
        raise InvalidParameterError(f'Noise multiplier cannot be negative, got {noise_multiplier}')
    count = len(gradients)
    if count == 0:
        return None
    divisor = GradientDivisor(divisor)
    if divisor is GradientDivisor.EXPECTED:
        if not expected_batch_size or expected_batch_size <= 0:
            raise InvalidParameterError('The expected divisor needs a positive expected batch size')
        denominator = float(expected_batch_size)
    else:
        denominator = float(count)
    total = gradients.per_sample.sum(axis=0)
    noise = rng.standard_normal(total.shape[0])
    return (total + noise_multiplier * gradients.clip_bound * noise) / denominator


def sgd_momentum_step(params, gradient, eta, momentum_coefficient):
    """One SGD with momentum step; ``params`` itself is left untouched.

    buffer = momentum_coefficient * buffer + gradient
    weights = weights - eta * buffer
    """
    gradient = np.asarray(gradient, dtype=float)
    if gradient.shape != params.weights.shape:
        raise ShapeMismatchError(f'Gradient of shape {gradient.shape} for {params.size} weights')
    buffer = momentum_coefficient * params.momentum + gradient
    return replace(params, weights=params.weights - eta * buffer, momentum=buffer)


def init_params(kind, input_dim, output_dim, rng, hidden_dim=0):
    """Seeded uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer."""
    kind = ModelKind(kind)

    def uniform(fan_in, size):
        limit = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-limit, limit, size)

    if kind is ModelKind.LINEAR:
        weights = uniform(input_dim, input_dim + 1)
    elif kind is ModelKind.LOGISTIC:
        weights = uniform(input_dim, output_dim * input_dim + output_dim)
    else:
        weights = np.concatenate([uniform(input_dim, hidden_dim * input_dim + hidden_dim),
                                  uniform(hidden_dim, output_dim * hidden_dim + output_dim)])
    return ModelParams(kind, input_dim, output_dim, weights, hidden_dim=hidden_dim)


def predict(params, features):
    """Predicted targets for regression, predicted class indices for classifiers."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[1] != params.input_dim:
        raise ShapeMismatchError(f'Model expects {params.input_dim} features, got {features.shape[1]}')
    if params.kind is ModelKind.LINEAR:
        weights, bias = _layers(params)
        return features @ weights + bias
    logits, _ = _logits(params, features)
    return np.argmax(logits, axis=1)
