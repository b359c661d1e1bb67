"""Intelligent water drops building subsets over an eroding soil field.

Drops pick unvisited clients with probability proportional to the inverse
soil level, gain velocity on low-soil ground, and erode soil faster where
the travel time is short (short time = high-fitness client), so quality
information accumulates in the soil field.  The iteration-best subset gets a
multiplicative soil reinforcement.  One evaluation per drop per iteration.

Erosion and reinforcement rates here are deliberately gentle: literal
textbook magnitudes collapse the field after a handful of visits at this
problem scale, which freezes the search on whatever was sampled first.  The
chosen constants keep per-visit erosion at most ~1% of the initial soil and
bound the field to [soil_min, soil_max] so selection probabilities stay
finite and exploration never fully dies.
"""

from __future__ import annotations

import numpy as np

from .support import BatchObjective, BestTracker

EVAL_FACTOR = 1

DEFAULTS = {
    "soil_init": 1000.0,
    "velocity_init": 100.0,
    "prob_eps": 0.01,
    "velocity_gain": 100.0,
    "time_eps": 0.01,
    "erosion_scale": 100.0,
    "erosion_rate": 0.001,
    "reinforce": 0.9,
    "eta_floor": 0.01,
    "soil_min": 0.01,
    "soil_max": 1e6,
}


def run(n, k, population, iterations, objective: BatchObjective, constants, rng):
    eps = constants["prob_eps"]
    soil_min = constants["soil_min"]
    soil_max = constants["soil_max"]

    soil = np.full(n, constants["soil_init"])
    eta = objective.fitness - objective.fitness.min() + constants["eta_floor"]
    eta_inv = 1.0 / np.maximum(eta, constants["eta_floor"])

    tracker = BestTracker()
    for _ in range(iterations):
        rows = np.empty((population, k), dtype=int)
        for d in range(population):
            velocity = constants["velocity_init"]
            available = np.ones(n, dtype=bool)
            path = np.empty(k, dtype=int)
            for s in range(k):
                weights = np.where(available, 1.0 / (eps + soil), 0.0)
                cum = np.cumsum(weights)
                r = rng.random() * cum[-1]
                i = min(int(np.searchsorted(cum, r, side="right")), n - 1)
                while not available[i]:
                    i -= 1
                path[s] = i
                available[i] = False

                velocity += constants["velocity_gain"] / (eps + soil[i])
                travel_time = eta_inv[i] / velocity
                delta = constants["erosion_scale"] / (
                    constants["time_eps"] + travel_time**2
                )
                soil[i] = min(
                    max(soil[i] - constants["erosion_rate"] * delta, soil_min),
                    soil_max,
                )
            rows[d] = np.sort(path)
        values = objective.value_rows(rows)
        tracker.update(rows, values)

        best = rows[int(np.argmax(values))]
        soil[best] = np.clip(soil[best] * constants["reinforce"], soil_min, soil_max)
        tracker.close_iteration()
    return tracker
