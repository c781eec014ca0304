"""Episode dynamics: action legality, transitions, termination, state encoding.

An episode walks the agent from the start cell until it reaches the exit
(win), exhausts the step budget, or boxes itself in (cells may never be
revisited within an episode).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .field import reward_at
from .scenario import Cell, Scenario

# Canonical action order; the position in this tuple is the action index used
# everywhere (Q-value columns, logs, tie-breaking).
ACTION_DELTAS = (
    (0, 1),    # 0: up
    (0, -1),   # 1: down
    (-1, 0),   # 2: left
    (1, 0),    # 3: right
    (1, 1),    # 4: up-right
    (-1, 1),   # 5: up-left
    (1, -1),   # 6: down-right
    (-1, -1),  # 7: down-left
)
N_ACTIONS = len(ACTION_DELTAS)

RUNNING = "running"
WIN = "win"
FAIL_STEP_BUDGET = "fail_step_budget"
FAIL_DEAD_END = "fail_dead_end"
OUTCOMES = (RUNNING, WIN, FAIL_STEP_BUDGET, FAIL_DEAD_END)


@dataclass(frozen=True)
class EpisodeState:
    agent: Cell
    visited: frozenset[Cell]
    steps_taken: int
    outcome: str


@dataclass
class Experience:
    """One stored transition."""

    state_vec: np.ndarray
    action: int
    reward: float
    next_state_vec: np.ndarray
    terminal: bool


def reset(scenario: Scenario) -> EpisodeState:
    return EpisodeState(scenario.start, frozenset((scenario.start,)), 0, RUNNING)


def apply_action(cell: Cell, action: int) -> Cell:
    dx, dy = ACTION_DELTAS[action]
    return Cell(cell.x + dx, cell.y + dy)


def wall_valid_actions(cell: Cell, scenario: Scenario) -> tuple[int, ...]:
    """Actions that stay inside the grid, ignoring the visited set."""
    return tuple(
        a for a in range(N_ACTIONS) if scenario.contains(apply_action(cell, a))
    )


@lru_cache(maxsize=None)
def wall_valid_mask(scenario: Scenario) -> np.ndarray:
    """Boolean [num_cells, 8] lookup of wall_valid_actions, row-major cells."""
    mask = np.zeros((scenario.num_cells, N_ACTIONS), dtype=bool)
    for y in range(scenario.height):
        for x in range(scenario.width):
            mask[y * scenario.width + x, list(wall_valid_actions(Cell(x, y), scenario))] = True
    mask.setflags(write=False)
    return mask


def valid_actions(state: EpisodeState, scenario: Scenario) -> list[int]:
    """In-grid actions whose target cell has not been visited, canonical order."""
    out = []
    for a in range(N_ACTIONS):
        dest = apply_action(state.agent, a)
        if scenario.contains(dest) and dest not in state.visited:
            out.append(a)
    return out


def _has_move(cell: Cell, visited: frozenset[Cell], scenario: Scenario) -> bool:
    for a in range(N_ACTIONS):
        dest = apply_action(cell, a)
        if scenario.contains(dest) and dest not in visited:
            return True
    return False


def step(
    state: EpisodeState, action: int, scenario: Scenario
) -> tuple[EpisodeState, float, bool]:
    """Advance one transition. The action must come from valid_actions."""
    if state.outcome != RUNNING:
        raise ValueError("episode already terminated")
    dest = apply_action(state.agent, action)
    if not scenario.contains(dest) or dest in state.visited:
        # Callers pre-filter with valid_actions; reaching this is a bug.
        raise ValueError(f"invalid action {action} from {state.agent}")
    reward = reward_at(dest, scenario)
    steps = state.steps_taken + 1
    visited = state.visited | {dest}
    if dest == scenario.exit:
        outcome = WIN
    elif steps >= scenario.max_steps:
        outcome = FAIL_STEP_BUDGET
    elif not _has_move(dest, visited, scenario):
        outcome = FAIL_DEAD_END
    else:
        outcome = RUNNING
    return EpisodeState(dest, visited, steps, outcome), reward, outcome != RUNNING


def encode_state(agent: Cell, scenario: Scenario) -> np.ndarray:
    """Flatten the agent one-hot plane plus one strength plane per source.

    Planes are row-major (index = y * width + x); length is
    (num_sources + 1) * width * height.
    """
    if not scenario.contains(agent):
        raise ValueError(f"agent cell ({agent.x},{agent.y}) outside grid")
    t = scenario.num_cells
    vec = np.zeros((len(scenario.sources) + 1) * t)
    vec[agent.y * scenario.width + agent.x] = 1.0
    for i, (position, strength) in enumerate(scenario.sources, start=1):
        vec[i * t + position.y * scenario.width + position.x] = strength
    return vec


def decode_agent(state_vec: np.ndarray, scenario: Scenario) -> Cell:
    """Recover the agent cell from the one-hot plane of an encoded state."""
    idx = int(np.argmax(state_vec[: scenario.num_cells]))
    return Cell(idx % scenario.width, idx // scenario.width)
