"""Particle swarm optimizer with constriction-style coefficients.

Velocities blend inertia with pulls toward each particle's personal best and
the global best; speeds are clamped so particles cannot overshoot the unit
box in one step.  Because the rank decoding makes the objective piecewise
constant, two stall-prevention measures stay on by default: velocities start
random instead of zero, and each iteration a small random fraction of the
swarm gets its velocity re-randomized (the classic "craziness" kick).
Particles bounce off the box walls — the offending velocity component flips
sign — rather than parking on them.  One evaluation per particle per
iteration.
"""

from __future__ import annotations

import numpy as np

from .support import BatchObjective, BestTracker, decode_rows, fold_into_box

EVAL_FACTOR = 1

DEFAULTS = {
    "inertia": 0.729,
    "cognitive": 1.49445,
    "social": 1.49445,
    "velocity_clamp": 0.5,
    "craziness": 0.02,
}


def run(n, k, population, iterations, objective: BatchObjective, constants, rng):
    omega = constants["inertia"]
    c1 = constants["cognitive"]
    c2 = constants["social"]
    vmax = constants["velocity_clamp"]
    crazy = constants["craziness"]

    x = rng.random((population, n))
    v = rng.uniform(-vmax, vmax, (population, n))
    rows = decode_rows(x, k)
    values = objective.value_rows(rows)
    tracker = BestTracker()
    tracker.update(rows, values)

    pbest = x.copy()
    pbest_val = values.copy()
    g = int(np.argmax(values))
    gbest = x[g].copy()
    gbest_val = float(values[g])

    for _ in range(iterations):
        r1 = rng.random((population, n))
        r2 = rng.random((population, n))
        v = omega * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
        if crazy > 0.0:
            mask = rng.random(population) < crazy
            fresh = rng.uniform(-vmax, vmax, (population, n))
            v = np.where(mask[:, None], fresh, v)
        v = np.clip(v, -vmax, vmax)
        raw = x + v
        out = (raw < 0.0) | (raw > 1.0)
        v = np.where(out, -v, v)
        x = fold_into_box(raw)

        rows = decode_rows(x, k)
        values = objective.value_rows(rows)
        tracker.update(rows, values)

        improved = values > pbest_val
        pbest[improved] = x[improved]
        pbest_val[improved] = values[improved]
        g = int(np.argmax(pbest_val))
        if pbest_val[g] > gbest_val:
            gbest = pbest[g].copy()
            gbest_val = float(pbest_val[g])
        tracker.close_iteration()
    return tracker
