"""Cuckoo search: Lévy-flight moves plus abandonment of the worst nests.

Each iteration every nest proposes a Lévy step scaled by its distance to the
best nest (greedy replacement), then the worst quarter of nests is rebuilt
uniformly at random.  At most two evaluations per nest per iteration.
"""

from __future__ import annotations

import numpy as np

from .support import BatchObjective, BestTracker, decode_rows, fold_into_box, levy_sample

EVAL_FACTOR = 2

DEFAULTS = {
    "step_scale": 0.01,
    "levy_beta": 1.5,
    "abandon_fraction": 0.25,
}


def run(n, k, population, iterations, objective: BatchObjective, constants, rng):
    scale = constants["step_scale"]
    beta = constants["levy_beta"]
    n_abandon = int(np.floor(constants["abandon_fraction"] * population + 0.5))

    x = rng.random((population, n))
    rows = decode_rows(x, k)
    values = objective.value_rows(rows)
    tracker = BestTracker()
    tracker.update(rows, values)

    b = int(np.argmax(values))
    best_x = x[b].copy()
    best_val = float(values[b])

    for _ in range(iterations):
        steps = levy_sample(beta, rng, (population, n))
        cand = fold_into_box(x + scale * steps * (x - best_x))
        cand_rows = decode_rows(cand, k)
        cand_values = objective.value_rows(cand_rows)
        tracker.update(cand_rows, cand_values)
        improved = cand_values > values
        x[improved] = cand[improved]
        values[improved] = cand_values[improved]

        if n_abandon > 0:
            worst = np.argsort(values, kind="stable")[:n_abandon]
            x[worst] = rng.random((n_abandon, n))
            new_rows = decode_rows(x[worst], k)
            new_values = objective.value_rows(new_rows)
            tracker.update(new_rows, new_values)
            values[worst] = new_values

        b = int(np.argmax(values))
        if values[b] > best_val:
            best_x = x[b].copy()
            best_val = float(values[b])
        tracker.close_iteration()
    return tracker
