"""Problem definitions: the grid scenario, training settings, and the config schema.

A scenario document is JSON with the following top-level sections, all optional
(defaults shown):

    {
      "grid":      {"width": 10, "height": 10},
      "start":     {"x": 0, "y": 9},
      "exit":      {"x": 9, "y": 0},
      "sources":   [{"x": 2, "y": 2, "strength": 1.0}],
      "constants": {"gamma": 1.0, "urgency": 1.0, "max_steps": 30},
      "training":  {"learning_rate": 0.001, "episodes": 5000, ...}
    }

Coordinates are zero-based with y increasing upward, so the default start
(0, 9) sits in the top-left region of a 10x10 grid and the exit (9, 0) in the
bottom-right. ``constants.gamma`` is the dose-rate proportionality constant of
the sources; the reinforcement-learning discount factor is ``training.discount``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from importlib import resources
from typing import Any, NamedTuple

STRATEGIES = ("vanilla", "restricted", "partial")
SYNC_MODES = ("fixed", "adaptive")

BUILTIN_NAMES = (
    "case_i",
    "case_ii",
    "case_iii",
    "case_iv",
    "case_v",
    "case_v1",
    "case_v2",
    "case_v3",
)


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document. The message names the field."""


class Cell(NamedTuple):
    x: int
    y: int


class Source(NamedTuple):
    position: Cell
    strength: float


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one grid-world problem."""

    width: int = 10
    height: int = 10
    start: Cell = Cell(0, 9)
    exit: Cell = Cell(9, 0)
    sources: tuple[Source, ...] = ()
    gamma_const: float = 1.0
    urgency: float = 1.0
    max_steps: int = 30

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ScenarioError("grid: width and height must be positive")
        for label, cell in (("start", self.start), ("exit", self.exit)):
            if not self.contains(cell):
                raise ScenarioError(
                    f"{label}: ({cell.x},{cell.y}) outside {self.width}x{self.height} grid"
                )
        if self.start == self.exit:
            raise ScenarioError("start: must differ from exit")
        for i, source in enumerate(self.sources):
            pos = source.position
            if not self.contains(pos):
                raise ScenarioError(
                    f"sources[{i}].position: ({pos.x},{pos.y}) outside "
                    f"{self.width}x{self.height} grid"
                )
            if not source.strength > 0:
                raise ScenarioError(f"sources[{i}].strength: must be > 0")
        if self.gamma_const <= 0:
            raise ScenarioError("constants.gamma: must be > 0")
        if self.urgency <= 0:
            raise ScenarioError("constants.urgency: must be > 0")
        if self.max_steps < 1:
            raise ScenarioError("constants.max_steps: must be >= 1")

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell.x < self.width and 0 <= cell.y < self.height

    @property
    def num_cells(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters with their standard defaults."""

    learning_rate: float = 0.001
    discount: float = 0.9
    batch_size: int = 30
    buffer_capacity: int = 2000
    episodes: int = 5000
    base_update_frequency: int = 600
    strategy: str = "restricted"
    sync_mode: str = "adaptive"
    epsilon_start: float = 1.0
    epsilon_min: float = 0.05
    epsilon_decay: float = 0.999
    n_ep_min: int = 100
    n_win_min: int = 20
    uf: float = 2.0
    m: int = 2
    k: int = 10
    r_win_min: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ScenarioError("training.learning_rate: must be > 0")
        if not 0 < self.discount <= 1:
            raise ScenarioError("training.discount: must be in (0, 1]")
        if self.batch_size < 1:
            raise ScenarioError("training.batch_size: must be >= 1")
        if self.buffer_capacity < 1:
            raise ScenarioError("training.buffer_capacity: must be >= 1")
        if self.episodes < 0:
            raise ScenarioError("training.episodes: must be >= 0")
        if self.base_update_frequency < 1:
            raise ScenarioError("training.base_update_frequency: must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ScenarioError(
                f"training.strategy: {self.strategy!r} not one of {STRATEGIES}"
            )
        if self.sync_mode not in SYNC_MODES:
            raise ScenarioError(
                f"training.sync_mode: {self.sync_mode!r} not one of {SYNC_MODES}"
            )
        if not 0 <= self.epsilon_min <= self.epsilon_start <= 1:
            raise ScenarioError(
                "training.epsilon_start/epsilon_min: need 0 <= min <= start <= 1"
            )
        if not 0 < self.epsilon_decay <= 1:
            raise ScenarioError("training.epsilon_decay: must be in (0, 1]")
        if self.n_ep_min < 0 or self.n_win_min < 0:
            raise ScenarioError("training.n_ep_min/n_win_min: must be >= 0")
        if self.uf <= 1:
            raise ScenarioError("training.uf: must be > 1")
        if self.m < 0:
            raise ScenarioError("training.m: must be >= 0")
        if self.k < 1:
            raise ScenarioError("training.k: must be >= 1")
        if not 0 <= self.r_win_min <= 1:
            raise ScenarioError("training.r_win_min: must be in [0, 1]")
        if self.seed < 0:
            raise ScenarioError("training.seed: must be >= 0")


_TOP_KEYS = ("grid", "start", "exit", "sources", "constants", "training")
_TRAIN_FIELDS = {f.name for f in fields(TrainConfig)}
_INT_TRAIN_FIELDS = {
    f.name for f in fields(TrainConfig) if f.type in ("int", int)
}


def _require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}: expected an object")
    return value


def _reject_unknown(mapping: dict, allowed, path: str) -> None:
    for key in mapping:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ScenarioError(f"{where}: unknown field")


def _get_int(mapping: dict, key: str, default: int, path: str) -> int:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}.{key}: expected an integer")
    return value


def _get_number(mapping: dict, key: str, default: float, path: str) -> float:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number")
    return float(value)


def _parse_cell(doc: dict, key: str, default: Cell) -> Cell:
    section = _require_mapping(doc.get(key, {"x": default.x, "y": default.y}), key)
    _reject_unknown(section, {"x", "y"}, key)
    return Cell(
        _get_int(section, "x", default.x, key), _get_int(section, "y", default.y, key)
    )


def parse_scenario(text: str) -> tuple[Scenario, TrainConfig]:
    """Parse and validate a scenario document, applying defaults for omitted fields."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"document is not valid JSON: {exc}") from None
    doc = _require_mapping(doc, "document")
    _reject_unknown(doc, _TOP_KEYS, "")

    grid = _require_mapping(doc.get("grid", {}), "grid")
    _reject_unknown(grid, {"width", "height"}, "grid")
    width = _get_int(grid, "width", 10, "grid")
    height = _get_int(grid, "height", 10, "grid")

    start = _parse_cell(doc, "start", Cell(0, 9))
    exit_cell = _parse_cell(doc, "exit", Cell(9, 0))

    raw_sources = doc.get("sources", [])
    if not isinstance(raw_sources, list):
        raise ScenarioError("sources: expected a list")
    sources = []
    for i, entry in enumerate(raw_sources):
        path = f"sources[{i}]"
        entry = _require_mapping(entry, path)
        _reject_unknown(entry, {"x", "y", "strength"}, path)
        if "x" not in entry or "y" not in entry:
            raise ScenarioError(f"{path}.position: x and y are required")
        pos = Cell(_get_int(entry, "x", 0, path), _get_int(entry, "y", 0, path))
        strength = _get_number(entry, "strength", 1.0, path)
        sources.append(Source(pos, strength))

    constants = _require_mapping(doc.get("constants", {}), "constants")
    _reject_unknown(constants, {"gamma", "urgency", "max_steps"}, "constants")
    scenario = Scenario(
        width=width,
        height=height,
        start=start,
        exit=exit_cell,
        sources=tuple(sources),
        gamma_const=_get_number(constants, "gamma", 1.0, "constants"),
        urgency=_get_number(constants, "urgency", 1.0, "constants"),
        max_steps=_get_int(constants, "max_steps", 30, "constants"),
    )

    training = _require_mapping(doc.get("training", {}), "training")
    _reject_unknown(training, _TRAIN_FIELDS, "training")
    kwargs = {}
    for name, value in training.items():
        if name in ("strategy", "sync_mode"):
            if not isinstance(value, str):
                raise ScenarioError(f"training.{name}: expected a string")
            kwargs[name] = value
        elif name in _INT_TRAIN_FIELDS:
            kwargs[name] = _get_int(training, name, 0, "training")
        else:
            kwargs[name] = _get_number(training, name, 0.0, "training")
    config = TrainConfig(**kwargs)
    return scenario, config


def serialize_scenario(scenario: Scenario, config: TrainConfig | None = None) -> str:
    """Emit a full document (all fields explicit) that re-parses to the same objects."""
    doc: dict[str, Any] = {
        "grid": {"width": scenario.width, "height": scenario.height},
        "start": {"x": scenario.start.x, "y": scenario.start.y},
        "exit": {"x": scenario.exit.x, "y": scenario.exit.y},
        "sources": [
            {"x": s.position.x, "y": s.position.y, "strength": s.strength}
            for s in scenario.sources
        ],
        "constants": {
            "gamma": scenario.gamma_const,
            "urgency": scenario.urgency,
            "max_steps": scenario.max_steps,
        },
    }
    if config is not None:
        doc["training"] = asdict(config)
    return json.dumps(doc, indent=2)


def load_builtin(name: str) -> tuple[Scenario, TrainConfig]:
    """Load one of the bundled scenarios by name (see BUILTIN_NAMES)."""
    if name not in BUILTIN_NAMES:
        raise ScenarioError(
            f"unknown scenario {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        )
    text = (
        resources.files("radpath").joinpath("scenarios", f"{name}.json").read_text()
    )
    return parse_scenario(text)


def builtin_scenarios() -> dict[str, Scenario]:
    """All bundled scenarios, validated through the regular document parser."""
    return {name: load_builtin(name)[0] for name in BUILTIN_NAMES}
