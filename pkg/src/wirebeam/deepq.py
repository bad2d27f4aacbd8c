"""Dueling deep-Q machinery, written directly in numpy.

The network is a small fully connected trunk with ReLU activations feeding
a scalar value head and a per-action advantage head, combined as

    Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a'),

trained on the Huber loss of the TD error against a periodically synced
target network, with a hand-derived backward pass and Adam updates. All
parameters and activations are 64-bit floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NumericError(RuntimeError):
    """Raised when a forward/backward pass produces non-finite numbers."""


@dataclass
class QNetwork:
    trunk_w: list  # list of (fan_in, fan_out) float64 matrices
    trunk_b: list  # list of (fan_out,) float64 vectors
    value_w: np.ndarray  # (hidden, 1)
    value_b: np.ndarray  # (1,)
    adv_w: np.ndarray  # (hidden, n_actions)
    adv_b: np.ndarray  # (n_actions,)

    @property
    def n_actions(self) -> int:
        return self.adv_w.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.trunk_w[0].shape[0]

    @property
    def hidden(self) -> tuple:
        return tuple(w.shape[1] for w in self.trunk_w)

    def parameters(self) -> list:
        """All parameter arrays in a fixed, documented order."""
        out = []
        for w, b in zip(self.trunk_w, self.trunk_b):
            out.extend([w, b])
        out.extend([self.value_w, self.value_b, self.adv_w, self.adv_b])
        return out

    def copy(self) -> "QNetwork":
        return QNetwork(
            [w.copy() for w in self.trunk_w],
            [b.copy() for b in self.trunk_b],
            self.value_w.copy(),
            self.value_b.copy(),
            self.adv_w.copy(),
            self.adv_b.copy(),
        )


def init_qnetwork(
    n_actions: int,
    rng: np.random.Generator,
    n_inputs: int = 9,
    hidden: tuple = (32, 32, 32, 32),
    head_scale: float = 1.0,
) -> QNetwork:
    """Seeded He-style uniform fan-in init, zero biases.

    head_scale multiplies the value/advantage head weights; 0 starts the
    network at exact indifference (Q = 0 for every action), which makes
    the initial greedy policy the no-op action and removes init noise
    from the early Q estimates.
    """
    if n_actions not in (5, 7):
        raise ValueError("n_actions must be 5 (tracking agent) or 7 (wind adversary)")
    trunk_w, trunk_b = [], []
    fan_in = n_inputs
    for width in hidden:
        bound = np.sqrt(6.0 / fan_in)
        trunk_w.append(rng.uniform(-bound, bound, size=(fan_in, width)))
        trunk_b.append(np.zeros(width))
        fan_in = width
    bound = np.sqrt(6.0 / fan_in)
    return QNetwork(
        trunk_w=trunk_w,
        trunk_b=trunk_b,
        value_w=head_scale * rng.uniform(-bound, bound, size=(fan_in, 1)),
        value_b=np.zeros(1),
        adv_w=head_scale * rng.uniform(-bound, bound, size=(fan_in, n_actions)),
        adv_b=np.zeros(n_actions),
    )


def _locate_nonfinite_layer(net: QNetwork, x: np.ndarray) -> str:
    h = x
    for i, (w, b) in enumerate(zip(net.trunk_w, net.trunk_b)):
        h = np.maximum(h @ w + b, 0.0)
        if not np.isfinite(h).all():
            return f"trunk layer {i}"
    if not np.isfinite(h @ net.value_w + net.value_b).all():
        return "value head"
    if not np.isfinite(h @ net.adv_w + net.adv_b).all():
        return "advantage head"
    return "combine"


def _forward_cached(net: QNetwork, x: np.ndarray):
    """Forward pass keeping pre-activations for the backward pass."""
    hs = [x]
    zs = []
    h = x
    for w, b in zip(net.trunk_w, net.trunk_b):
        z = h @ w + b
        zs.append(z)
        h = np.maximum(z, 0.0)
        hs.append(h)
    v = h @ net.value_w + net.value_b  # (B, 1)
    a = h @ net.adv_w + net.adv_b  # (B, n_actions)
    q = v + a - a.mean(axis=1, keepdims=True)
    return q, hs, zs


def forward(net: QNetwork, state: np.ndarray) -> np.ndarray:
    """Q values for one state (9,) or a batch (B, 9)."""
    x = np.asarray(state, dtype=np.float64)
    single = x.ndim == 1
    q, _, _ = _forward_cached(net, x[None, :] if single else x)
    if not np.isfinite(q).all():
        raise NumericError(
            f"non-finite activations in {_locate_nonfinite_layer(net, np.atleast_2d(x))}"
        )
    return q[0] if single else q


def act_epsilon_greedy(
    net: QNetwork, state: np.ndarray, epsilon: float, rng: np.random.Generator
) -> int:
    """Uniform random action with probability epsilon, else the argmax of
    Q(s, .) with ties broken toward the lowest action index."""
    if rng.random() < epsilon:
        return int(rng.integers(net.n_actions))
    return int(np.argmax(forward(net, state)))


def huber(x):
    """x^2/2 inside |x| <= 1, |x| - 1/2 outside; gradient is bounded by 1."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) <= 1.0, 0.5 * x * x, np.abs(x) - 0.5)
    return out if out.ndim else float(out)


def _huber_grad(x: np.ndarray) -> np.ndarray:
    return np.where(np.abs(x) <= 1.0, x, np.sign(x))


@dataclass
class AdamState:
    first_moment: list
    second_moment: list
    step_count: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def init_like(cls, net: QNetwork, learning_rate: float = 1e-3) -> "AdamState":
        return cls(
            first_moment=[np.zeros_like(p) for p in net.parameters()],
            second_moment=[np.zeros_like(p) for p in net.parameters()],
            learning_rate=learning_rate,
        )


@dataclass
class Experience:
    """One stored transition (s, a, r, s')."""

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.reward <= 1.0 + 1e-12:
            raise ValueError("reward must be clipped to [-1, 1]")


class ReplayMemory:
    """Bounded FIFO ring of transitions with uniform sampling (with replacement)."""

    def __init__(self, capacity: int = 100_000, rng: np.random.Generator | None = None):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.rng = rng if rng is not None else np.random.default_rng()
        self._states = None
        self._actions = np.empty(capacity, dtype=np.int64)
        self._rewards = np.empty(capacity, dtype=np.float64)
        self._next_states = None
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def push(self, state, action=None, reward=None, next_state=None):
        """Append one transition (an Experience or the four raw pieces);
        the oldest entry is evicted once capacity is exceeded."""
        if isinstance(state, Experience):
            exp = state
            state, action, reward, next_state = exp.state, exp.action, exp.reward, exp.next_state
        if not -1.0 - 1e-12 <= reward <= 1.0 + 1e-12:
            raise ValueError("reward must be clipped to [-1, 1]")
        if self._states is None:
            dim = len(state)
            self._states = np.empty((self.capacity, dim), dtype=np.float64)
            self._next_states = np.empty((self.capacity, dim), dtype=np.float64)
        i = self._cursor
        self._states[i] = state
        self._actions[i] = action
        self._rewards[i] = reward
        self._next_states[i] = next_state
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def contents(self):
        """Snapshot of the stored transitions in storage order (oldest first)."""
        idx = (np.arange(self._size) + (self._cursor - self._size)) % self.capacity
        return (
            self._states[idx].copy(),
            self._actions[idx].copy(),
            self._rewards[idx].copy(),
            self._next_states[idx].copy(),
        )

    def sample(self, k: int):
        """k transitions drawn uniformly with replacement as stacked arrays."""
        if k < 1:
            raise ValueError("sample size must be >= 1")
        if self._size < k:
            raise ValueError(f"memory holds {self._size} < {k} transitions")
        idx = self.rng.integers(0, self._size, size=k)
        return (
            self._states[idx],
            self._actions[idx],
            self._rewards[idx],
            self._next_states[idx],
        )


def _coerce_batch(batch):
    if isinstance(batch, tuple):
        states, actions, rewards, next_states = batch
        return (
            np.asarray(states, dtype=np.float64),
            np.asarray(actions, dtype=np.int64),
            np.asarray(rewards, dtype=np.float64),
            np.asarray(next_states, dtype=np.float64),
        )
    states = np.stack([e.state for e in batch]).astype(np.float64)
    actions = np.array([e.action for e in batch], dtype=np.int64)
    rewards = np.array([e.reward for e in batch], dtype=np.float64)
    next_states = np.stack([e.next_state for e in batch]).astype(np.float64)
    return states, actions, rewards, next_states


def batch_loss(net: QNetwork, target_net: QNetwork, batch, gamma: float) -> float:
    """Mean Huber loss of the TD errors on a batch (no parameter update).

    Targets are r + gamma * max_a' Q(s', a') under the target network,
    which is treated as a constant.
    """
    states, actions, rewards, next_states = _coerce_batch(batch)
    targets = rewards + gamma * forward(target_net, next_states).max(axis=1)
    q, _, _ = _forward_cached(net, states)
    td = targets - q[np.arange(len(actions)), actions]
    return float(huber(td).mean())


def loss_and_gradients(net: QNetwork, target_net: QNetwork, batch, gamma: float):
    """Mean Huber TD loss and its exact gradient w.r.t. every parameter.

    The backward pass is hand-derived for the piecewise loss and ReLU
    trunk (subgradient 0 at the kinks). Sketch, with g_j = -huber'(td_j)/B
    routed to the chosen action of sample j: the value head receives g_j,
    the advantage head receives g_j * (1[a = a_j] - 1/|A|), and both flow
    back through the trunk. Gradients come out in parameters() order.
    """
    states, actions, rewards, next_states = _coerce_batch(batch)
    if len(actions) == 0:
        raise ValueError("batch must be non-empty")
    b = len(actions)

    targets = rewards + gamma * forward(target_net, next_states).max(axis=1)
    q, hs, zs = _forward_cached(net, states)
    rows = np.arange(b)
    td = targets - q[rows, actions]
    loss = float(huber(td).mean())

    g = -_huber_grad(td) / b  # dLoss/dQ(s_j, a_j)
    d_adv = np.zeros_like(q)
    d_adv[rows, actions] = g
    d_adv -= g[:, None] / net.n_actions
    d_val = g[:, None]

    h_last = hs[-1]
    grads = [None] * len(net.parameters())
    grads[-4] = h_last.T @ d_val
    grads[-3] = d_val.sum(axis=0)
    grads[-2] = h_last.T @ d_adv
    grads[-1] = d_adv.sum(axis=0)

    dh = d_val @ net.value_w.T + d_adv @ net.adv_w.T
    for layer in range(len(net.trunk_w) - 1, -1, -1):
        dz = dh * (zs[layer] > 0.0)
        grads[2 * layer] = hs[layer].T @ dz
        grads[2 * layer + 1] = dz.sum(axis=0)
        if layer > 0:
            dh = dz @ net.trunk_w[layer].T

    if not np.isfinite(loss):
        raise NumericError("non-finite loss in train_batch")
    for grad in grads:
        if not np.isfinite(grad).all():
            raise NumericError("non-finite gradient in train_batch")
    return loss, grads


def train_batch(net: QNetwork, target_net: QNetwork, batch, gamma: float, adam: AdamState) -> float:
    """One Adam step on the mean Huber TD loss; returns that loss."""
    loss, grads = loss_and_gradients(net, target_net, batch, gamma)
    _adam_update(net, grads, adam)
    return loss


def _adam_update(net: QNetwork, grads: list, adam: AdamState):
    adam.step_count += 1
    t = adam.step_count
    bc1 = 1.0 - adam.beta1**t
    bc2 = 1.0 - adam.beta2**t
    for p, grad, m, v in zip(net.parameters(), grads, adam.first_moment, adam.second_moment):
        m *= adam.beta1
        m += (1.0 - adam.beta1) * grad
        v *= adam.beta2
        v += (1.0 - adam.beta2) * grad * grad
        p -= adam.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + adam.epsilon)


def sync_target(net: QNetwork, target_net: QNetwork):
    """Overwrite the target's parameters with byte-identical copies."""
    for dst, src in zip(target_net.parameters(), net.parameters()):
        if dst.shape != src.shape:
            raise ValueError("network and target shapes differ")
        np.copyto(dst, src)
