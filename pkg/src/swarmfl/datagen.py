"""Synthetic world generation: client metrics, datasets, partitions, schedules.

Client quality metrics are drawn uniformly from fixed ranges (detection
accuracy 50-100%, false positive rate 0-20%, response time 0.1-1s).  The
labeled data is a two-class Gaussian mixture whose class means sit
``class_separation`` apart, and a client's labels are flipped at a rate tied
to its detection accuracy, so selecting bad clients really does feed the
global model worse data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fitness import ClientProfile

__all__ = [
    "DatasetSpec",
    "PartitionSpec",
    "NoiseSpec",
    "ParticipationSchedule",
    "LabeledDataset",
    "sample_client_profiles",
    "gen_dataset",
    "dirichlet_partition",
    "corrupt_labels",
    "participation_at",
]

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DatasetSpec:
    """Shape of the synthetic detection task (two classes: 0 benign, 1 intrusion)."""

    n_train_per_client: int = 200
    n_test: int = 2000
    n_features: int = 10
    class_separation: float = 2.0
    n_classes: int = 2

    def __post_init__(self) -> None:
        if self.n_train_per_client < 1 or self.n_test < 1 or self.n_features < 1:
            raise ValueError("dataset counts must be >= 1")
        if self.class_separation <= 0:
            raise ValueError("class_separation must be > 0")
        if self.n_classes != 2:
            raise ValueError("only the two-class task is supported")


@dataclass(frozen=True)
class PartitionSpec:
    """How per-client class proportions are assigned."""

    mode: str = "iid"
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in ("iid", "dirichlet"):
            raise ConfigError(f"partition mode must be iid or dirichlet, got {self.mode!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise level applied to the accuracy clients report."""

    level: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"noise level must be in [0,1], got {self.level}")


@dataclass(frozen=True)
class ParticipationSchedule:
    kind: str = "fixed"
    start: int = 25
    end: int = 25
    epochs: int = 10

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "increasing", "decreasing"):
            raise ConfigError(f"unknown schedule kind {self.kind!r}")
        if self.start < 1 or self.end < 1:
            raise ValueError("start and end must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.kind == "fixed" and self.start != self.end:
            raise ConfigError("fixed schedule requires start == end")
        if self.kind == "increasing" and self.start > self.end:
            raise ConfigError("increasing schedule requires start <= end")
        if self.kind == "decreasing" and self.start < self.end:
            raise ConfigError("decreasing schedule requires start >= end")
        if self.epochs == 1 and self.start != self.end:
            raise ConfigError("single-epoch schedule cannot move between sizes")


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels row counts differ")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be binary")

    def __len__(self) -> int:
        return int(self.labels.shape[0])


def sample_client_profiles(
    n: int, noise: NoiseSpec, rng: np.random.Generator
) -> list:
    """Draw n client profiles; the reported accuracy gets +-level uniform noise.

    Draw order (detection accuracies, FPRs, response times, then the noise
    block) is fixed so the same generator state always produces the same
    clients.
    """
    if n < 1:
        raise ValueError("need at least one client")
    det = rng.uniform(0.5, 1.0, n)
    fpr = rng.uniform(0.0, 0.2, n)
    rt = rng.uniform(0.1, 1.0, n)
    shift = rng.uniform(-noise.level, noise.level, n)
    reported = np.clip(det + shift, 0.0, 1.0)
    return [
        ClientProfile(
            id=i,
            det_accuracy=float(det[i]),
            false_positive_rate=float(fpr[i]),
            response_time=float(rt[i]),
            reported_accuracy=float(reported[i]),
            label_flip_rate=float(1.0 - det[i]),
        )
        for i in range(n)
    ]


def gen_dataset(
    spec: DatasetSpec,
    n_samples: int,
    class_proportions,
    rng: np.random.Generator,
) -> LabeledDataset:
    """Sample a labeled set: class labels per the proportions, Gaussian features.

    Class 0 is centered at the origin; class 1 is shifted by
    class_separation / sqrt(n_features) along every axis, so the distance
    between class means equals class_separation.
    """
    props = np.asarray(class_proportions, dtype=float)
    if props.shape != (2,):
        raise ValueError("class_proportions must have length 2")
    if np.any(props < 0) or abs(props.sum() - 1.0) > _SUM_TOL:
        raise ValueError("class_proportions must be nonnegative and sum to 1")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")

    labels = (rng.random(n_samples) < props[1]).astype(int)
    shift = spec.class_separation / math.sqrt(spec.n_features)
    features = rng.standard_normal((n_samples, spec.n_features))
    features += labels[:, None] * shift
    return LabeledDataset(features=features, labels=labels)


def dirichlet_partition(
    alpha: float, n_clients: int, n_classes: int, rng: np.random.Generator
) -> list:
    """Per-client class-proportion vectors drawn from a symmetric Dirichlet."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if n_clients < 1:
        raise ValueError("n_clients must be >= 1")
    if n_classes < 2:
        raise ValueError("n_classes must be >= 2")
    draws = rng.dirichlet(np.full(n_classes, alpha), size=n_clients)
    return [draws[i] for i in range(n_clients)]


def corrupt_labels(
    data: LabeledDataset, flip_rate: float, rng: np.random.Generator
) -> LabeledDataset:
    """Flip each label independently with the given probability."""
    if not 0.0 <= flip_rate <= 1.0:
        raise ValueError(f"flip_rate must be in [0,1], got {flip_rate}")
    flips = rng.random(len(data)) < flip_rate
    labels = np.where(flips, 1 - data.labels, data.labels)
    return LabeledDataset(features=data.features, labels=labels)


def participation_at(schedule: ParticipationSchedule, epoch: int) -> int:
    """Available-client count at an epoch; endpoints are hit exactly.

    Interior epochs interpolate linearly with half-away-from-zero rounding.
    """
    if not 0 <= epoch < schedule.epochs:
        raise ValueError(
            f"epoch must be in 0..{schedule.epochs - 1}, got {epoch}"
        )
    if schedule.kind == "fixed" or schedule.start == schedule.end:
        return schedule.start
    span = schedule.end - schedule.start
    exact = schedule.start + span * epoch / (schedule.epochs - 1)
    return int(math.floor(exact + 0.5))
