"""Learned label propagation over a featurized word graph.

Each attribute ``i`` of a word ``w`` is estimated from its neighbours as::

    a_hat[i, w] = tanh( sum_v (phi(w, v) . theta[i]) * a[i, v] )

``theta`` is trained on the labeled-only subgraph by minimising the squared
error to the gold vectors with per-node AdaGrad updates, then unlabeled
vectors are filled in by synchronous sweeps of the same estimate.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import FeatureGraph
from .lexicon import Lexicon, WeightMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 50
    loss_tolerance: float = 1e-4
    shuffle_seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be nonnegative, got {self.l2}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.loss_tolerance < 0:
            raise ValueError(f"loss_tolerance must be nonnegative, got {self.loss_tolerance}")


@dataclass(frozen=True)
class PropagationConfig:
    stop_distance: float = 0.1
    max_sweeps: int = 100

    def __post_init__(self):
        if not self.stop_distance > 0:
            raise ValueError(f"stop_distance must be positive, got {self.stop_distance}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")


class AdaGradState:
    """Per-coordinate sum of squared gradients."""

    def __init__(self, shape, learning_rate: float, l2: float = 0.0):
        self.accumulated_squares = np.zeros(shape)
        self.learning_rate = learning_rate
        self.l2 = l2

    def step(self, theta: np.ndarray, grad: np.ndarray, cols: np.ndarray) -> None:
        """Update ``theta[:, cols]`` in place with the gradient block ``grad``.

        Closed-form AdaGrad step with an l2 penalty:
        ``theta <- (theta - eta * g) / (1 + eta * l2)`` where
        ``eta = lr / sqrt(G)``.  Coordinates that never saw a gradient are left
        untouched.
        """
        acc = self.accumulated_squares[:, cols] + grad * grad
        self.accumulated_squares[:, cols] = acc
        seen = acc > 0
        eta = np.zeros_like(acc)
        eta[seen] = self.learning_rate / np.sqrt(acc[seen])
        block = theta[:, cols]
        theta[:, cols] = np.where(seen, (block - eta * grad) / (1.0 + eta * self.l2), block)


# --------------------------------------------------------------------------
# state helpers


def node_state(graph: FeatureGraph, seed: Lexicon) -> tuple[np.ndarray, np.ndarray]:
    """Initial ``(N, |A|)`` attribute state and labeled mask.

    Seed words present in the graph carry their gold vectors; every other
    node starts at all zeros.
    """
    n_attr = len(seed.inventory)
    state = np.zeros((graph.n_nodes, n_attr))
    labeled = np.zeros(graph.n_nodes, dtype=bool)
    for word, vec in seed.items():
        i = graph.index.get(word)
        if i is not None:
            state[i] = vec
            labeled[i] = True
    return state, labeled


def _theta_array(graph: FeatureGraph, theta) -> np.ndarray:
    if isinstance(theta, WeightMatrix):
        if theta.features != graph.catalog.names:
            return _align(theta, graph.catalog.names)
        return np.asarray(theta.weights)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[1] != graph.n_features:
        raise ValueError(f"theta has shape {theta.shape}, graph has {graph.n_features} features")
    return theta


def _align(model: WeightMatrix, names) -> np.ndarray:
    """Reorder model columns to ``names``; features unknown to the model get zero weight."""
    out = np.zeros((model.weights.shape[0], len(names)))
    for j, name in enumerate(names):
        k = model.feature_index.get(name)
        if k is not None:
            out[:, j] = model.weights[:, k]
    return out


def _incidence(graph: FeatureGraph, edges: np.ndarray) -> sp.csr_matrix:
    """Sparse ``(N, len(edges))`` matrix summing edge rows onto their node."""
    return sp.csr_matrix(
        (np.ones(len(edges)), (graph.node[edges], np.arange(len(edges)))),
        shape=(graph.n_nodes, len(edges)),
    )


def preactivation(graph: FeatureGraph, theta, state: np.ndarray, edge_mask=None) -> np.ndarray:
    """``sum_v (phi(w, v) . theta_i) * a[i, v]`` for every node and attribute."""
    theta = _theta_array(graph, theta)
    edges = np.arange(graph.n_edges) if edge_mask is None else np.flatnonzero(edge_mask)
    if not len(edges):
        return np.zeros((graph.n_nodes, theta.shape[0]))
    strength = np.asarray(graph.phi[edges] @ theta.T)
    messages = strength * state[graph.neighbor[edges]]
    return np.asarray(_incidence(graph, edges) @ messages)


def estimate(graph: FeatureGraph, theta, state: np.ndarray, edge_mask=None) -> np.ndarray:
    """Empirical attribute estimates for every node, shape ``(N, |A|)``."""
    return np.tanh(preactivation(graph, theta, state, edge_mask))


def estimate_attribute(graph: FeatureGraph, word: str, i: int, theta_row, state) -> float:
    """Estimate one attribute of one word by walking its neighbour list."""
    theta_row = np.asarray(theta_row, dtype=float)
    w = graph.index[word]
    total = 0.0
    for e in range(graph.offsets[w], graph.offsets[w + 1]):
        cols = graph.phi.indices[graph.phi.indptr[e] : graph.phi.indptr[e + 1]]
        vals = graph.phi.data[graph.phi.indptr[e] : graph.phi.indptr[e + 1]]
        total += float(vals @ theta_row[cols]) * float(state[graph.neighbor[e], i])
    return float(np.tanh(total))


# --------------------------------------------------------------------------
# training


def loss(graph: FeatureGraph, seed: Lexicon, theta) -> float:
    """Squared error over labeled nodes using only labeled-labeled edges (no penalty)."""
    state, labeled = node_state(graph, seed)
    return _loss(graph, state, labeled, _theta_array(graph, theta))


def _loss(graph, state, labeled, theta) -> float:
    mask = labeled[graph.node] & labeled[graph.neighbor]
    est = estimate(graph, theta, state, mask)
    diff = state[labeled] - est[labeled]
    return float(np.sum(diff * diff))


def loss_gradient(graph: FeatureGraph, seed: Lexicon, theta) -> tuple[float, np.ndarray]:
    """Loss and its full-batch gradient with respect to ``theta``."""
    state, labeled = node_state(graph, seed)
    theta = _theta_array(graph, theta)
    mask = labeled[graph.node] & labeled[graph.neighbor]
    est = estimate(graph, theta, state, mask)
    resid = np.where(labeled[:, None], state - est, 0.0)
    value = float(np.sum(resid * resid))
    # d/dz of (a - tanh z)^2
    delta = -2.0 * resid * (1.0 - est * est)
    edges = np.flatnonzero(mask)
    if not len(edges):
        return value, np.zeros_like(theta)
    weighted = delta[graph.node[edges]] * state[graph.neighbor[edges]]
    grad = np.asarray((graph.phi[edges].T @ weighted).T)
    return value, grad


@dataclass
class _NodeBlock:
    node: int
    cols: np.ndarray
    # sum over labeled neighbours of phi(w, v)[cols] * a[i, v], shape (|A|, len(cols))
    coupling: np.ndarray


def _node_blocks(graph: FeatureGraph, state, labeled) -> list[_NodeBlock]:
    blocks = []
    phi = graph.phi
    for w in np.flatnonzero(labeled).tolist():
        lo, hi = graph.offsets[w], graph.offsets[w + 1]
        edges = [e for e in range(lo, hi) if labeled[graph.neighbor[e]]]
        if not edges:
            continue
        sub = phi[edges]
        cols = np.unique(sub.indices)
        dense = sub[:, cols].toarray()
        coupling = state[graph.neighbor[edges]].T @ dense
        blocks.append(_NodeBlock(w, cols, coupling))
    return blocks


@dataclass
class TrainResult:
    model: WeightMatrix
    losses: list[float] = field(default_factory=list)
    epochs: int = 0
    converged: bool = False


def train_with_history(graph: FeatureGraph, seed: Lexicon, cfg: TrainConfig | None = None) -> TrainResult:
    """Fit ``theta`` with online AdaGrad; see :func:`train`."""
    cfg = cfg or TrainConfig()
    if len(seed) == 0:
        raise ValueError("seed lexicon is empty")
    inventory = seed.inventory
    state, labeled = node_state(graph, seed)
    theta = np.zeros((len(inventory), graph.n_features))

    trainable = np.any(state[labeled] > 0, axis=0) if labeled.any() else np.zeros(len(inventory), bool)
    for i in np.flatnonzero(~trainable):
        warnings.warn(
            f"attribute {inventory.attributes[i]!r} has no labeled occurrence; its weights stay zero",
            stacklevel=2,
        )

    blocks = _node_blocks(graph, state, labeled)
    history = [_loss(graph, state, labeled, theta)]
    if not blocks:
        log.warning("no labeled-labeled edges; weights stay at zero")
        return TrainResult(WeightMatrix(theta, graph.catalog.names, inventory), history, 0, True)

    opt = AdaGradState(theta.shape, cfg.learning_rate, cfg.l2)
    rng = np.random.default_rng(cfg.shuffle_seed)
    gold = state
    converged = False
    epoch = 0
    for epoch in range(1, cfg.max_epochs + 1):
        for k in rng.permutation(len(blocks)).tolist():
            b = blocks[k]
            z = np.sum(theta[:, b.cols] * b.coupling, axis=1)
            est = np.tanh(z)
            delta = -2.0 * (gold[b.node] - est) * (1.0 - est * est)
            delta[~trainable] = 0.0
            grad = delta[:, None] * b.coupling
            opt.step(theta, grad, b.cols)
        current = _loss(graph, state, labeled, theta)
        previous = history[-1]
        history.append(current)
        log.debug("epoch %d loss %.6f", epoch, current)
        if current == 0.0 or abs(previous - current) <= cfg.loss_tolerance * max(previous, 1e-300):
            converged = True
            break
    return TrainResult(
        WeightMatrix(theta, graph.catalog.names, inventory), history, epoch, converged
    )


def train(graph: FeatureGraph, seed: Lexicon, cfg: TrainConfig | None = None) -> WeightMatrix:
    """Learn one weight row per attribute from the labeled part of the graph.

    Labeled nodes are visited in an order shuffled by ``cfg.shuffle_seed``;
    training stops at ``cfg.max_epochs`` or once the relative change of the
    epoch loss drops below ``cfg.loss_tolerance``.
    """
    return train_with_history(graph, seed, cfg).model


# --------------------------------------------------------------------------
# propagation


@dataclass
class PropagationResult:
    lexicon: Lexicon
    sweeps: int
    distances: list[float]
    converged: bool


def propagate(
    graph: FeatureGraph, theta, seed: Lexicon, cfg: PropagationConfig | None = None
) -> PropagationResult:
    """Fill in unlabeled nodes by synchronous sweeps of the estimate.

    Labeled nodes stay clamped to their gold vectors.  The first sweep has no
    predecessor to compare against; from the second sweep on, propagation
    stops once the mean squared change over unlabeled nodes is below
    ``cfg.stop_distance``.
    """
    cfg = cfg or PropagationConfig()
    if isinstance(theta, WeightMatrix) and theta.inventory.attributes != seed.inventory.attributes:
        raise ValueError("model and seed lexicon use different attribute inventories")
    theta = _theta_array(graph, theta)
    if theta.shape[0] != len(seed.inventory):
        raise ValueError(f"theta has {theta.shape[0]} rows, inventory has {len(seed.inventory)}")
    state, labeled = node_state(graph, seed)
    unlabeled = np.flatnonzero(~labeled)
    words = [graph.words[i] for i in unlabeled.tolist()]
    if not len(unlabeled):
        return PropagationResult(Lexicon({}, seed.inventory), 0, [], True)

    edges = np.flatnonzero(~labeled[graph.node])
    strength = np.asarray(graph.phi[edges] @ theta.T) if len(edges) else np.zeros((0, theta.shape[0]))
    nbr = graph.neighbor[edges]
    incidence = _incidence(graph, edges)[unlabeled]

    distances: list[float] = []
    converged = False
    sweep = 0
    for sweep in range(1, cfg.max_sweeps + 1):
        new = np.tanh(np.asarray(incidence @ (strength * state[nbr])))
        change = new - state[unlabeled]
        state[unlabeled] = new
        if sweep == 1:
            continue
        dist = float(np.mean(np.sum(change * change, axis=1)))
        distances.append(dist)
        if dist < cfg.stop_distance:
            converged = True
            break
    if not converged:
        log.warning("propagation stopped at max_sweeps=%d before converging", cfg.max_sweeps)
    out = Lexicon(dict(zip(words, state[unlabeled])), seed.inventory)
    return PropagationResult(out, sweep, distances, converged)
