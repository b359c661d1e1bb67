"""Federated training loop: per-round selection, local SGD, FedAvg, metrics.

Each round, a swarm optimizer picks a fixed-size subset of the available
clients by their composite fitness; the selected clients run one epoch of
minibatch SGD on a shared logistic model starting from the current global
parameters; updates are sample-count-weighted averaged; the result is scored
on a held-out balanced test set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .datagen import (
    DatasetSpec,
    LabeledDataset,
    NoiseSpec,
    ParticipationSchedule,
    PartitionSpec,
    corrupt_labels,
    dirichlet_partition,
    gen_dataset,
    participation_at,
    sample_client_profiles,
)
from .fitness import ClientProfile, FitnessWeights, SubsetObjective
from .swarm import OptimizerParams, SelectionProblem, optimize

__all__ = [
    "ModelParams",
    "ClientState",
    "GlobalMetrics",
    "RoundRecord",
    "SessionConfig",
    "logistic_loss",
    "loss_gradient",
    "local_train",
    "fed_avg",
    "evaluate_global",
    "run_round",
    "build_clients",
    "run_session",
]

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Flat logistic-regression parameters: one weight per feature plus bias."""

    weights: np.ndarray
    bias: float

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1:
            raise ValueError("weights must be a vector")
        if not np.all(np.isfinite(weights)) or not math.isfinite(self.bias):
            raise FloatingPointError("model parameters must be finite")
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def zeros(n_features: int) -> "ModelParams":
        return ModelParams(weights=np.zeros(n_features), bias=0.0)


@dataclass(frozen=True)
class ClientState:
    """One client's profile, its (already corrupted) local data, and class mix."""

    profile: ClientProfile
    data: LabeledDataset
    class_distribution: np.ndarray

    def __post_init__(self) -> None:
        if len(self.data) == 0:
            raise ValueError("client data must be nonempty")
        dist = np.asarray(self.class_distribution, dtype=float)
        if abs(dist.sum() - 1.0) > _SUM_TOL:
            raise ValueError("class_distribution must sum to 1")
        object.__setattr__(self, "class_distribution", dist)


@dataclass(frozen=True)
class GlobalMetrics:
    accuracy: float
    recall: float
    f1: float

    def __post_init__(self) -> None:
        for name in ("accuracy", "recall", "f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} out of [0,1]: {v}")


@dataclass(frozen=True)
class RoundRecord:
    epoch: int
    available: int
    selected: frozenset
    selection_value: float
    metrics: GlobalMetrics


def _logits(params: ModelParams, features: np.ndarray) -> np.ndarray:
    return features @ params.weights + params.bias


def logistic_loss(params: ModelParams, data: LabeledDataset) -> float:
    """Mean cross-entropy of the sigmoid model, computed in log-space."""
    z = _logits(params, data.features)
    y = data.labels
    per_sample = y * np.logaddexp(0.0, -z) + (1 - y) * np.logaddexp(0.0, z)
    return float(per_sample.mean())


def loss_gradient(params: ModelParams, data: LabeledDataset):
    """Analytic gradient of ``logistic_loss`` wrt weights and bias."""
    err = expit(_logits(params, data.features)) - data.labels
    grad_w = data.features.T @ err / len(data)
    grad_b = float(err.mean())
    return grad_w, grad_b


def local_train(
    params: ModelParams,
    data: LabeledDataset,
    lr: float,
    batch_size: int,
    rng: np.random.Generator,
) -> ModelParams:
    """One epoch of minibatch SGD on the logistic loss; returns new params."""
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if lr <= 0:
        raise ValueError("lr must be > 0")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")

    w = params.weights.copy()
    b = params.bias
    order = rng.permutation(len(data))
    for lo in range(0, len(data), batch_size):
        idx = order[lo : lo + batch_size]
        x_b = data.features[idx]
        err = expit(x_b @ w + b) - data.labels[idx]
        w -= lr * (x_b.T @ err) / idx.size
        b -= lr * float(err.mean())
    if not np.all(np.isfinite(w)) or not math.isfinite(b):
        raise FloatingPointError("training produced non-finite parameters")
    return ModelParams(weights=w, bias=b)


def fed_avg(updates) -> ModelParams:
    """Sample-count-weighted element-wise mean of parameter sets."""
    if not updates:
        raise ValueError("fed_avg needs at least one update")
    dim = updates[0][0].weights.size
    total = 0
    w_acc = np.zeros(dim)
    b_acc = 0.0
    for params, count in updates:
        if count < 1:
            raise ValueError("sample counts must be >= 1")
        if params.weights.size != dim:
            raise ValueError("parameter vectors must have equal length")
        w_acc += count * params.weights
        b_acc += count * params.bias
        total += count
    return ModelParams(weights=w_acc / total, bias=b_acc / total)


def evaluate_global(params: ModelParams, test: LabeledDataset) -> GlobalMetrics:
    """Accuracy, recall, and F1 of thresholded predictions on the test set.

    Predicts intrusion when the predicted probability reaches 0.5, i.e. when
    the logit is nonnegative.  Degenerate cases follow the usual conventions:
    recall is 1 when there are no positives, precision is 1 when nothing is
    predicted positive, and F1 is 0 when precision and recall are both 0.
    """
    if len(test) == 0:
        raise ValueError("test set must be nonempty")
    predicted = _logits(params, test.features) >= 0.0
    actual = test.labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    tn = int(np.sum(~predicted & ~actual))

    accuracy = (tp + tn) / len(test)
    recall = tp / (tp + fn) if (tp + fn) > 0 else 1.0
    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return GlobalMetrics(accuracy=accuracy, recall=recall, f1=f1)


def selection_size(select_fraction: float, pool_size: int) -> int:
    """Round(fraction * pool) with half away from zero, floored at 2, capped at the pool."""
    if not 0.0 < select_fraction <= 1.0:
        raise ValueError("select_fraction must be in (0, 1]")
    k = max(2, int(math.floor(select_fraction * pool_size + 0.5)))
    return min(k, pool_size)


def run_round(
    global_params: ModelParams,
    pool,
    optimizer: OptimizerParams,
    weights: FitnessWeights,
    select_fraction: float,
    test: LabeledDataset,
    rng: np.random.Generator,
    epoch: int = 0,
    coverage_bonus: float = 0.0,
    lr: float = 0.1,
    batch_size: int = 32,
):
    """One federated round over the given client pool.

    Consumes the generator in a fixed order: one draw for the per-round
    optimizer seed, then one shuffle per selected client in ascending pool
    index.  Returns the new global parameters and the round's record.
    """
    if not pool:
        raise ValueError("pool must be nonempty")
    k = selection_size(select_fraction, len(pool))

    objective = SubsetObjective(
        profiles=[c.profile for c in pool],
        weights=weights,
        coverage_bonus=coverage_bonus,
        class_distributions=(
            [c.class_distribution for c in pool] if coverage_bonus > 0 else None
        ),
    )
    problem = SelectionProblem(n_clients=len(pool), k=k, objective=objective)
    round_seed = int(rng.integers(0, 2**64, dtype=np.uint64))
    result = optimize(problem, replace(optimizer, seed=round_seed))

    updates = []
    for i in sorted(result.best_subset):
        trained = local_train(global_params, pool[i].data, lr, batch_size, rng)
        updates.append((trained, len(pool[i].data)))
    new_global = fed_avg(updates)
    metrics = evaluate_global(new_global, test)
    record = RoundRecord(
        epoch=epoch,
        available=len(pool),
        selected=frozenset(result.best_subset),
        selection_value=result.best_value,
        metrics=metrics,
    )
    return new_global, record


@dataclass(frozen=True)
class SessionConfig:
    """Everything one simulated federated session needs besides its seed."""

    schedule: ParticipationSchedule
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    partition: PartitionSpec = field(default_factory=PartitionSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    optimizer: OptimizerParams = field(
        default_factory=lambda: OptimizerParams("gwo")
    )
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    select_fraction: float = 0.4
    coverage_bonus: float = 0.0
    lr: float = 0.1
    batch_size: int = 32

    def __post_init__(self) -> None:
        if not 0.0 < self.select_fraction <= 1.0:
            raise ValueError("select_fraction must be in (0, 1]")
        if self.coverage_bonus < 0:
            raise ValueError("coverage_bonus must be nonnegative")
        if self.lr <= 0:
            raise ValueError("lr must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def build_clients(config: SessionConfig, rng: np.random.Generator):
    """Materialize the session's master client list and its global test set.

    The master list covers the schedule's largest participation count so a
    decreasing schedule can start full; an epoch's pool is a prefix of this
    list, which keeps sessions comparable across algorithms under one seed.
    """
    n_master = max(config.schedule.start, config.schedule.end)
    profiles = sample_client_profiles(n_master, config.noise, rng)
    if config.partition.mode == "dirichlet":
        proportions = dirichlet_partition(
            config.partition.alpha, n_master, config.dataset.n_classes, rng
        )
    else:
        proportions = [np.array([0.5, 0.5]) for _ in range(n_master)]

    clients = []
    for i in range(n_master):
        data = gen_dataset(
            config.dataset, config.dataset.n_train_per_client, proportions[i], rng
        )
        data = corrupt_labels(data, profiles[i].label_flip_rate, rng)
        clients.append(
            ClientState(
                profile=profiles[i],
                data=data,
                class_distribution=proportions[i],
            )
        )
    test = gen_dataset(config.dataset, config.dataset.n_test, (0.5, 0.5), rng)
    return clients, test


def run_session(config: SessionConfig, seed: int) -> list:
    """Run a full multi-round session; returns one RoundRecord per epoch."""
    rng = np.random.default_rng(seed)
    clients, test = build_clients(config, rng)
    params = ModelParams.zeros(config.dataset.n_features)

    records = []
    for epoch in range(config.schedule.epochs):
        available = participation_at(config.schedule, epoch)
        params, record = run_round(
            params,
            clients[:available],
            config.optimizer,
            config.weights,
            config.select_fraction,
            test,
            rng,
            epoch=epoch,
            coverage_bonus=config.coverage_bonus,
            lr=config.lr,
            batch_size=config.batch_size,
        )
        records.append(record)
    return records
