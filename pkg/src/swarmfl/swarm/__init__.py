"""Nine swarm-intelligence optimizers over fixed-cardinality client subsets.

Every algorithm maximizes a ``SubsetObjective`` over k-of-N subsets and is
fully deterministic given ``OptimizerParams.seed``.  Continuous algorithms
search [0,1]^N positions decoded by rank; ``aco`` and ``iwd`` construct
subsets directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..errors import ConfigError
from ..fitness import SubsetObjective
from . import aco, bat, bee, cuckoo, fish, glowworm, gwo, iwd, pso
from .support import (
    BatchObjective,
    Position,
    decode_position,
    levy_sample,
    pheromone_construct,
)

__all__ = [
    "ALGORITHM_NAMES",
    "OptimizerParams",
    "Position",
    "SelectionProblem",
    "SelectionResult",
    "decode_position",
    "levy_sample",
    "optimize",
    "pheromone_construct",
]

_MODULES = MappingProxyType(
    {
        "gwo": gwo,
        "pso": pso,
        "cuckoo": cuckoo,
        "bat": bat,
        "bee": bee,
        "aco": aco,
        "fish": fish,
        "glowworm": glowworm,
        "iwd": iwd,
    }
)

ALGORITHM_NAMES = tuple(_MODULES)

_MAX_SEED = 2**64


@dataclass(frozen=True)
class SelectionProblem:
    """Pick the best k-element subset of an N-client pool."""

    n_clients: int
    k: int
    objective: SubsetObjective

    def __post_init__(self) -> None:
        if self.n_clients < 1:
            raise ValueError("n_clients must be positive")
        if not 1 <= self.k <= self.n_clients:
            raise ValueError(f"k must be in 1..{self.n_clients}, got {self.k}")
        if len(self.objective.profiles) != self.n_clients:
            raise ValueError(
                "objective profile count must equal n_clients "
                f"({len(self.objective.profiles)} vs {self.n_clients})"
            )


@dataclass(frozen=True)
class OptimizerParams:
    algorithm: str
    population: int = 20
    iterations: int = 100
    seed: int = 0
    algo_constants: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.algorithm not in _MODULES:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; "
                f"expected one of {', '.join(ALGORITHM_NAMES)}"
            )
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.seed < _MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        module = _MODULES[self.algorithm]
        unknown = set(self.algo_constants) - set(module.DEFAULTS)
        if unknown:
            raise ConfigError(
                f"unknown {self.algorithm} constants: {sorted(unknown)}"
            )


@dataclass(frozen=True)
class SelectionResult:
    best_subset: frozenset
    best_value: float
    trace: tuple
    evaluations: int


def optimize(problem: SelectionProblem, params: OptimizerParams) -> SelectionResult:
    """Run the named algorithm and return the best subset ever evaluated.

    The evaluation count is bounded by population * (iterations + 1) times
    the per-algorithm ``EVAL_FACTOR`` (at most 3).
    """
    module = _MODULES[params.algorithm]
    constants = dict(module.DEFAULTS)
    constants.update(params.algo_constants)
    rng = np.random.default_rng(params.seed)
    batch = BatchObjective(problem.objective)
    tracker = module.run(
        problem.n_clients,
        problem.k,
        params.population,
        params.iterations,
        batch,
        constants,
        rng,
    )
    return SelectionResult(
        best_subset=frozenset(int(i) for i in tracker.best_row),
        best_value=tracker.best_value,
        trace=tuple(tracker.trace),
        evaluations=batch.evaluations,
    )
