"""Glowworm swarm optimization with luciferin-guided local movement.

Each glowworm carries decaying luciferin replenished from its current
objective value and moves a small fixed step toward a roulette-chosen
brighter neighbor inside its adaptive decision radius.  A glowworm with no
brighter neighbor is a local champion; instead of standing still (which
would stop producing new candidate subsets entirely) it probes a uniform
random offset of scale ``idle_probe`` around itself.  Movement decisions use
a synchronous snapshot of the swarm.  One evaluation per glowworm per
iteration.
"""

from __future__ import annotations

import math

import numpy as np

from .support import BatchObjective, BestTracker, decode_rows, fold_into_box

EVAL_FACTOR = 1

DEFAULTS = {
    "luciferin_decay": 0.4,
    "luciferin_gain": 0.6,
    "luciferin_init": 5.0,
    "step": 0.03,
    "radius_gain": 0.08,
    "target_neighbors": 5,
    "idle_probe": 0.25,
}


def run(n, k, population, iterations, objective: BatchObjective, constants, rng):
    rho = constants["luciferin_decay"]
    gamma = constants["luciferin_gain"]
    step = constants["step"]
    beta = constants["radius_gain"]
    n_target = constants["target_neighbors"]
    probe_scale = constants["idle_probe"]
    r_sense = 0.5 * math.sqrt(n)

    x = rng.random((population, n))
    rows = decode_rows(x, k)
    values = objective.value_rows(rows)
    tracker = BestTracker()
    tracker.update(rows, values)

    luciferin = np.full(population, constants["luciferin_init"])
    radius = np.full(population, r_sense)

    for _ in range(iterations):
        luciferin = (1.0 - rho) * luciferin + gamma * values

        snapshot = x.copy()
        lucif = luciferin.copy()
        moved = x.copy()
        for i in range(population):
            dist = np.linalg.norm(snapshot - snapshot[i], axis=1)
            dist[i] = np.inf
            brighter = np.flatnonzero((dist < radius[i]) & (lucif > lucif[i]))
            idle = True
            if len(brighter) > 0:
                gaps = lucif[brighter] - lucif[i]
                cum = np.cumsum(gaps)
                r = rng.random() * cum[-1]
                j = brighter[min(int(np.searchsorted(cum, r, side="right")),
                                 len(brighter) - 1)]
                d = snapshot[j] - snapshot[i]
                norm = np.linalg.norm(d)
                if norm > 0.0:  # coincident positions can differ in luciferin
                    moved[i] = fold_into_box(snapshot[i] + step * d / norm)
                    idle = False
            if idle and probe_scale > 0.0:
                probe = rng.uniform(-probe_scale, probe_scale, n)
                moved[i] = fold_into_box(snapshot[i] + probe)
            radius[i] = min(
                r_sense, max(0.0, radius[i] + beta * (n_target - len(brighter)))
            )
        x = moved

        rows = decode_rows(x, k)
        values = objective.value_rows(rows)
        tracker.update(rows, values)
        tracker.close_iteration()
    return tracker
