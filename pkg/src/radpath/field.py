"""Inverse-square exposure and the per-cell arrival reward.

Each source contributes gamma * strength / distance^2 to a cell's exposure.
The reward of a cell is the exit-proximity term minus that exposure:

    reward(c) = urgency / dist(c, exit) - sum_i gamma * S_i / dist(c, source_i)^2

with all Euclidean distances clamped from below by R_MIN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import Cell, Scenario

# Distances below one cell width are clamped to one. Both terms of the reward
# diverge at zero distance; the clamp keeps every cell finite while preserving
# the ordering of cells one or more cells apart. Standing on a source stays
# legal, just expensive.
R_MIN = 1.0


def exposure_at(cell: Cell, scenario: Scenario) -> float:
    """Summed inverse-square intensity at ``cell`` from all sources."""
    total = 0.0
    # Fixed summation order so the result is independent of how the sources
    # are listed (floating-point addition does not commute bitwise).
    for position, strength in sorted(scenario.sources):
        d2 = (cell.x - position.x) ** 2 + (cell.y - position.y) ** 2
        total += scenario.gamma_const * strength / max(d2, R_MIN * R_MIN)
    return total


def reward_at(cell: Cell, scenario: Scenario) -> float:
    """Reward collected on arriving at ``cell``."""
    r_exit = math.hypot(cell.x - scenario.exit.x, cell.y - scenario.exit.y)
    return scenario.urgency / max(r_exit, R_MIN) - exposure_at(cell, scenario)


@dataclass(frozen=True)
class RewardField:
    """Dense per-cell tabulation, indexed [y, x]."""

    width: int
    height: int
    exposure: np.ndarray
    reward: np.ndarray


def reward_field(scenario: Scenario) -> RewardField:
    """Tabulate exposure and reward over the whole grid."""
    exposure = np.zeros((scenario.height, scenario.width))
    reward = np.zeros_like(exposure)
    for y in range(scenario.height):
        for x in range(scenario.width):
            cell = Cell(x, y)
            exposure[y, x] = exposure_at(cell, scenario)
            reward[y, x] = reward_at(cell, scenario)
    return RewardField(scenario.width, scenario.height, exposure, reward)
