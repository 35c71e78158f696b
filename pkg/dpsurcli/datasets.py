#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: datasets.py
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
Local datasets: CSV ingestion and seeded synthetic generators.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from dpsurcli.conf import ENCODING
from dpsurcli.dpsurcliexceptions import DatasetFormatError, InvalidParameterError
from dpsurcli.models import ExampleBatch, ModelKind, ModelParams

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
LOGGER_BASENAME = '''dpsurcli.datasets'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())

TRAIN_FRACTION = 0.8


class NormalizationMethod(str, Enum):
    NONE = 'none'
    STANDARDIZE = 'standardize'
    MINMAX = 'minmax'


class SyntheticKind(str, Enum):
    LINEAR_REGRESSION = 'linear_regression'
    GAUSSIAN_BLOBS = 'gaussian_blobs'


@dataclass(frozen=True)
class Normalization:
    """Per-feature affine map (x - offset) / scale."""

    method: NormalizationMethod
    offsets: Tuple[float, ...] = ()
    scales: Tuple[float, ...] = ()

    @classmethod
    def fit(cls, method, features):
        method = NormalizationMethod(method)
        if method is NormalizationMethod.NONE or not features.size:
            return cls(NormalizationMethod.NONE)
        if method is NormalizationMethod.STANDARDIZE:
            offsets = features.mean(axis=0)
            scales = features.std(axis=0)
        else:
            offsets = features.min(axis=0)
            scales = features.max(axis=0) - offsets
        scales = np.where(scales > 0, scales, 1.0)
        return cls(method, tuple(offsets.tolist()), tuple(scales.tolist()))

    def apply(self, features):
        if self.method is NormalizationMethod.NONE:
            return features
        if len(self.offsets) != features.shape[1]:
            raise DatasetFormatError(f'Normalization fitted on {len(self.offsets)} features, '
                                     f'data has {features.shape[1]}')
        return (features - np.asarray(self.offsets)) / np.asarray(self.scales)

    def as_dict(self):
        return {'method': self.method.value, 'offsets': list(self.offsets), 'scales': list(self.scales)}


@dataclass(frozen=True)
class Dataset:
    """Examples plus what is needed to sample from and describe them.

    ``n_classes`` is None for regression targets.
    """

    batch: ExampleBatch
    n_classes: Optional[int] = None
    name: str = ''
    provenance: dict = field(default_factory=dict)
    normalization: Normalization = Normalization(NormalizationMethod.NONE)

    def __post_init__(self):
        labels = self.batch.labels
        if self.n_classes is not None:
            if np.any(labels != np.round(labels)) or np.any(labels < 0) or np.any(labels >= self.n_classes):
                raise DatasetFormatError(f'Labels must be class indices in [0, {self.n_classes})')

    def __len__(self):
        return len(self.batch)

    @property
    def features(self):
        return self.batch.features

    @property
    def labels(self):
        return self.batch.labels

    @property
    def dimension(self):
        return self.batch.features.shape[1]

    @property
    def is_regression(self):
        return self.n_classes is None

    @property
    def examples(self):
        return self.batch.to_examples()

    def describe(self):
        return {'name': self.name,
                'size': len(self),
                'dimension': self.dimension,
                'n_classes': self.n_classes,
                'provenance': self.provenance,
                'normalization': self.normalization.as_dict()}


def _parse_number(cell, column, row):
    try:
        value = float(cell)
    except ValueError:
        raise DatasetFormatError(f'column "{column}" holds "{cell}", which is not a number', row) from None
    if not math.isfinite(value):
        raise DatasetFormatError(f'column "{column}" holds non finite value "{cell}"', row)
    return value


def _parse_label(cell, column, row, classes):
    if classes is None:
        return _parse_number(cell, column, row)
    if isinstance(classes, int):
        value = _parse_number(cell, column, row)
        if value != int(value) or not 0 <= value < classes:
            raise DatasetFormatError(f'unknown label "{cell}", expected a class index below {classes}', row)
        return value
    if cell not in classes:
        raise DatasetFormatError(f'unknown label "{cell}"', row)
    return float(classes.index(cell))


def load_csv(path,
             label_column,
             feature_columns=None,
             normalization=NormalizationMethod.NONE,
             classes=None,
             reference=None,
             name=None):
    """Reads a CSV file with a header row into a Dataset.

    Args:
        path: The CSV file.
        label_column: Header of the label column.
        feature_columns: Headers of the feature columns, all other columns if None.
        normalization: none, standardize or minmax.
        classes: None for a regression target, the number of classes for
            integer labels or a list of label names mapped to their position.
        reference: A Normalization fitted on the training split; used instead
            of fitting one on this file.
        name: Dataset name, the file stem if None.

    Returns:
        Dataset: The examples with the normalization constants that were applied.

    Raises:
        DatasetFormatError: For ragged rows, non numeric cells and unknown labels,
            naming the 1-based data row.

    """
    path = Path(path)
    classes = list(classes) if isinstance(classes, (list, tuple)) else classes
    with open(path, encoding=ENCODING, newline='') as csv_file:
        reader = csv.reader(csv_file)
        try:
            header = [column.strip() for column in next(reader)]
        except StopIteration:
            raise DatasetFormatError(f'{path} is empty') from None
        if label_column not in header:
            raise DatasetFormatError(f'label column "{label_column}" is not in the header of {path}')
        feature_columns = list(feature_columns or [column for column in header if column != label_column])
        missing = [column for column in feature_columns if column not in header]
        if missing:
            raise DatasetFormatError(f'feature columns {", ".join(missing)} are not in the header of {path}')
        label_index = header.index(label_column)
        feature_indices = [header.index(column) for column in feature_columns]
        features, labels = [], []
        for row, cells in enumerate(reader, start=1):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DatasetFormatError(f'expected {len(header)} cells, found {len(cells)}', row)
            features.append([_parse_number(cells[index].strip(), header[index], row) for index in feature_indices])
            labels.append(_parse_label(cells[label_index].strip(), label_column, row, classes))
    features = np.array(features, dtype=float).reshape(len(labels), len(feature_columns))
    fitted = reference or Normalization.fit(normalization, features)
    n_classes = len(classes) if isinstance(classes, list) else classes
    LOGGER.info('Loaded %s examples with %s features from %s', len(labels), len(feature_columns), path)
    return Dataset(ExampleBatch(fitted.apply(features), np.array(labels, dtype=float)),
                   n_classes,
                   name or path.stem,
                   {'path': str(path), 'label_column': label_column, 'feature_columns': feature_columns},
                   fitted)


def write_csv(dataset, path):
    """Writes ``dataset`` with columns x0 .. x{d-1} and label."""
    with open(path, 'w', encoding=ENCODING, newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow([f'x{index}' for index in range(dataset.dimension)] + ['label'])
        for row, label in zip(dataset.features.tolist(), dataset.labels.tolist()):
            writer.writerow([repr(value) for value in row] + [int(label) if dataset.n_classes else repr(label)])
    LOGGER.info('Wrote %s examples to %s', len(dataset), path)


def _blob_centers(dimension, classes, distance, rng):
    if classes > dimension:
        raise InvalidParameterError(f'gaussian_blobs places {classes} orthogonal centers, '
                                    f'which needs at least as many dimensions, got {dimension}')
    basis, _ = np.linalg.qr(rng.standard_normal((dimension, classes)))
    return basis.T * distance / math.sqrt(2)


def generate_synthetic(kind, n, d, k=2, noise=0.1, seed=0, separation=10.0):
    """Seeded synthetic data, split 80/20 into train and test.

    ``linear_regression`` draws standard normal features and targets
    w*.x + N(0, noise^2). ``gaussian_blobs`` places k balanced clusters of
    spread ``noise`` on orthogonal centers ``separation * noise`` apart
    (``separation`` apart when noise is zero).

    Returns:
        tuple: (train Dataset, test Dataset, ground truth ModelParams). For
            blobs the ground truth is the linear classifier that picks the
            nearest center.

    """
    kind = SyntheticKind(kind)
    errors = []
    if not n >= 2:
        errors.append(f'n must be at least 2, got {n}')
    if not d >= 1:
        errors.append(f'd must be at least 1, got {d}')
    if kind is SyntheticKind.GAUSSIAN_BLOBS and not k >= 2:
        errors.append(f'k must be at least 2 for gaussian_blobs, got {k}')
    if not noise >= 0:
        errors.append(f'noise must be non negative, got {noise}')
    if not separation > 0:
        errors.append(f'separation must be positive, got {separation}')
    if errors:
        raise InvalidParameterError('; '.join(errors))
    rng = np.random.default_rng(seed)
    if kind is SyntheticKind.LINEAR_REGRESSION:
        truth = rng.standard_normal(d)
        features = rng.standard_normal((n, d))
        labels = features @ truth + noise * rng.standard_normal(n)
        ground_truth = ModelParams(ModelKind.LINEAR, d, 1, np.append(truth, 0.0))
        n_classes = None
    else:
        centers = _blob_centers(d, k, separation * noise if noise > 0 else separation, rng)
        labels = rng.permutation(np.arange(n) % k).astype(float)
        features = centers[labels.astype(int)] + noise * rng.standard_normal((n, d))
        bias = -0.5 * np.sum(centers ** 2, axis=1)
        ground_truth = ModelParams(ModelKind.LOGISTIC, d, k, np.concatenate([centers.reshape(-1), bias]))
        n_classes = k
    order = rng.permutation(n)
    cut = min(n - 1, max(1, int(round(TRAIN_FRACTION * n))))
    provenance = {'generator': kind.value, 'n': n, 'd': d, 'k': k, 'noise': noise,
                  'separation': separation, 'seed': seed}
    splits = []
    for split, indices in (('train', order[:cut]), ('test', order[cut:])):
        splits.append(Dataset(ExampleBatch(features[indices], labels[indices]),
                              n_classes,
                              f'{kind.value}-{split}',
                              dict(provenance, split=split)))
    LOGGER.info('Generated %s %s examples (%s train, %s test)', n, kind.value, cut, n - cut)
    return splits[0], splits[1], ground_truth
