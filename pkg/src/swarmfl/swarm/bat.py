"""Bat algorithm: frequency-tuned velocities with a loudness/pulse schedule.

Bats fly at random frequencies relative to the best position while a second
candidate per bat takes a Gaussian local walk around that best, scaled by the
mean loudness.  Both candidates are scored every iteration — the flights
carry exploration, the walks refine the incumbent — so the budget factor is
2.  The pulse schedule picks which of the two a bat considers adopting; a
candidate replaces its bat only when it improves and a loudness coin-flip
accepts it, after which that bat's loudness decays.

Velocities start random and are clamped to +/-``velocity_clamp``; a flight
that would leave the unit box bounces, flipping the offending velocity
component, so velocities cannot pin at the clamp and freeze the flight.
"""

from __future__ import annotations

import numpy as np

from .support import BatchObjective, BestTracker, decode_rows, fold_into_box

EVAL_FACTOR = 2

DEFAULTS = {
    "freq_max": 2.0,
    "loudness": 1.0,
    "loudness_decay": 0.95,
    "pulse_rate": 0.5,
    "pulse_growth": 0.9,
    "walk_scale": 0.3,
    "velocity_clamp": 0.5,
}


def run(n, k, population, iterations, objective: BatchObjective, constants, rng):
    fmax = constants["freq_max"]
    alpha = constants["loudness_decay"]
    r0 = constants["pulse_rate"]
    gamma = constants["pulse_growth"]
    walk = constants["walk_scale"]
    vmax = constants["velocity_clamp"]

    x = rng.random((population, n))
    v = rng.uniform(-vmax, vmax, (population, n))
    loud = np.full(population, constants["loudness"])
    rows = decode_rows(x, k)
    values = objective.value_rows(rows)
    tracker = BestTracker()
    tracker.update(rows, values)

    b = int(np.argmax(values))
    best_x = x[b].copy()
    best_val = float(values[b])

    for t in range(iterations):
        pulse = r0 * (1.0 - np.exp(-gamma * t))
        freq = rng.uniform(0.0, fmax, population)
        v = np.clip(v + freq[:, None] * (x - best_x), -vmax, vmax)
        flight = x + v
        out = (flight < 0.0) | (flight > 1.0)
        v = np.where(out, -v, v)
        flight = fold_into_box(flight)

        walk_gate = rng.random(population) > pulse
        eps = rng.normal(0.0, 1.0, (population, n))
        local = fold_into_box(best_x + walk * eps * loud.mean())

        flight_rows = decode_rows(flight, k)
        flight_values = objective.value_rows(flight_rows)
        tracker.update(flight_rows, flight_values)
        local_rows = decode_rows(local, k)
        local_values = objective.value_rows(local_rows)
        tracker.update(local_rows, local_values)

        cand = np.where(walk_gate[:, None], local, flight)
        cand_values = np.where(walk_gate, local_values, flight_values)
        accept = (rng.random(population) < loud) & (cand_values > values)
        x[accept] = cand[accept]
        values[accept] = cand_values[accept]
        loud[accept] *= alpha

        b = int(np.argmax(values))
        if values[b] > best_val:
            best_x = x[b].copy()
            best_val = float(values[b])
        tracker.close_iteration()
    return tracker
