"""The action-value network and its optimizer, in plain float64 numpy.

Architecture: input -> 200 -> 100 -> 8, leaky rectifier on both hidden layers,
linear output. Training minimizes the squared error between the Q-value of the
taken action and a one-step bootstrapped target; gradients flow only through
the taken-action output. Hidden sizes are parameters so tests can run
finite-difference checks on small instances, but the layer count and the
8-action output are fixed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .env import Experience, wall_valid_mask
from .scenario import Scenario

LEAKY_SLOPE = 0.01
WEIGHT_FORMAT_VERSION = "1"


@dataclass
class QNetwork:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    slope: float = LEAKY_SLOPE

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    def parameters(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2, self.w3, self.b3]


def init_network(
    input_dim: int, seed: int, hidden: tuple[int, int] = (200, 100), n_actions: int = 8
) -> QNetwork:
    """Fresh network: Glorot-normal weights, zero biases, reproducible from seed."""
    rng = np.random.default_rng(seed)

    def glorot(fan_in, fan_out):
        std = math.sqrt(2.0 / (fan_in + fan_out))
        return rng.normal(0.0, std, size=(fan_in, fan_out))

    h1, h2 = hidden
    return QNetwork(
        w1=glorot(input_dim, h1),
        b1=np.zeros(h1),
        w2=glorot(h1, h2),
        b2=np.zeros(h2),
        w3=glorot(h2, n_actions),
        b3=np.zeros(n_actions),
    )


def _lrelu(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z >= 0.0, z, slope * z)


def _lrelu_grad(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z >= 0.0, 1.0, slope)


def forward(net: QNetwork, x: np.ndarray) -> np.ndarray:
    """Q-values for one state vector (returns shape (8,)) or a batch (B, 8)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.input_dim:
        raise ValueError(
            f"state vector has length {x.shape[-1]}, network expects {net.input_dim}"
        )
    a1 = _lrelu(x @ net.w1 + net.b1, net.slope)
    a2 = _lrelu(a1 @ net.w2 + net.b2, net.slope)
    return a2 @ net.w3 + net.b3


def loss_and_grads(
    net: QNetwork, x: np.ndarray, actions: np.ndarray, targets: np.ndarray
) -> tuple[float, list[np.ndarray]]:
    """Mean squared error on the taken actions and its parameter gradients.

    Exposed separately from train_step so the gradients can be checked against
    finite differences with the targets held fixed.
    """
    batch = x.shape[0]
    z1 = x @ net.w1 + net.b1
    a1 = _lrelu(z1, net.slope)
    z2 = a1 @ net.w2 + net.b2
    a2 = _lrelu(z2, net.slope)
    q = a2 @ net.w3 + net.b3

    rows = np.arange(batch)
    err = q[rows, actions] - targets
    loss = float(np.mean(err**2))

    dq = np.zeros_like(q)
    dq[rows, actions] = 2.0 * err / batch
    dw3 = a2.T @ dq
    db3 = dq.sum(axis=0)
    dz2 = (dq @ net.w3.T) * _lrelu_grad(z2, net.slope)
    dw2 = a1.T @ dz2
    db2 = dz2.sum(axis=0)
    dz1 = (dz2 @ net.w2.T) * _lrelu_grad(z1, net.slope)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, [dw1, db1, dw2, db2, dw3, db3]


@dataclass
class AdamState:
    """Per-parameter moment accumulators for the adaptive-moment optimizer."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_state(net: QNetwork, learning_rate: float) -> AdamState:
    return AdamState(
        learning_rate=learning_rate,
        m=[np.zeros_like(p) for p in net.parameters()],
        v=[np.zeros_like(p) for p in net.parameters()],
    )


def adam_update(net: QNetwork, opt: AdamState, grads: Sequence[np.ndarray]) -> None:
    """One bias-corrected adaptive-moment step, in place."""
    opt.step += 1
    c1 = 1.0 - opt.beta1**opt.step
    c2 = 1.0 - opt.beta2**opt.step
    for p, g, m, v in zip(net.parameters(), grads, opt.m, opt.v):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * (g * g)
        p -= opt.learning_rate * (m / c1) / (np.sqrt(v / c2) + opt.epsilon)


def bootstrap_targets(
    target_net: QNetwork,
    batch: Sequence[Experience],
    discount: float,
    scenario: Scenario,
) -> np.ndarray:
    """One-step targets: r, plus the discounted best next Q for non-terminal samples.

    The next-state maximum ranges over wall-valid actions only; the episode's
    visited set is not part of the stored transition.
    """
    rewards = np.array([e.reward for e in batch])
    terminal = np.array([e.terminal for e in batch])
    next_x = np.stack([e.next_state_vec for e in batch])
    q_next = forward(target_net, next_x)
    agent_idx = np.argmax(next_x[:, : scenario.num_cells], axis=1)
    mask = wall_valid_mask(scenario)[agent_idx]
    best_next = np.where(mask, q_next, -np.inf).max(axis=1)
    return np.where(terminal, rewards, rewards + discount * best_next)


def train_step(
    net: QNetwork,
    opt: AdamState,
    batch: Sequence[Experience],
    target_net: QNetwork,
    discount: float,
    scenario: Scenario,
) -> float:
    """One optimizer step on a minibatch; returns the pre-update loss."""
    if not batch:
        raise ValueError("minibatch must be non-empty")
    x = np.stack([e.state_vec for e in batch])
    actions = np.array([e.action for e in batch])
    targets = bootstrap_targets(target_net, batch, discount, scenario)
    loss, grads = loss_and_grads(net, x, actions, targets)
    adam_update(net, opt, grads)
    return loss


def clone_network(net: QNetwork) -> QNetwork:
    """Deep copy; training the original never mutates the copy."""
    return QNetwork(*(p.copy() for p in net.parameters()), slope=net.slope)


def save_weights(net: QNetwork) -> str:
    """Serialize all parameters losslessly, with a format-version tag."""
    doc = {
        "format_version": WEIGHT_FORMAT_VERSION,
        "slope": net.slope,
        "layers": [
            {"weights": w.tolist(), "bias": b.tolist()}
            for w, b in ((net.w1, net.b1), (net.w2, net.b2), (net.w3, net.b3))
        ],
    }
    return json.dumps(doc)


def load_weights(text: str) -> QNetwork:
    """Inverse of save_weights. Rejects unknown versions and inconsistent shapes."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"weight document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format_version") != WEIGHT_FORMAT_VERSION:
        raise ValueError(
            f"unsupported weight format version {doc.get('format_version')!r}"
            if isinstance(doc, dict)
            else "weight document must be an object"
        )
    layers = doc.get("layers")
    if not isinstance(layers, list) or len(layers) != 3:
        raise ValueError("weight document must contain exactly 3 layers")
    arrays = []
    for i, layer in enumerate(layers):
        w = np.array(layer["weights"], dtype=float)
        b = np.array(layer["bias"], dtype=float)
        if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
            raise ValueError(f"layer {i}: weight/bias shapes inconsistent")
        arrays.extend([w, b])
    if arrays[0].shape[1] != arrays[2].shape[0] or arrays[2].shape[1] != arrays[4].shape[0]:
        raise ValueError("layer shapes do not chain")
    if arrays[4].shape[1] != 8:
        raise ValueError("output layer must have exactly 8 actions")
    return QNetwork(*arrays, slope=float(doc.get("slope", LEAKY_SLOPE)))
