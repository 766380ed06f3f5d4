"""Markov-chain view of a transition graph: damped stochastic matrix,
stationary distribution by power iteration, and entropy rate.

Damping mixes the row-normalized transition matrix with the uniform
matrix, which makes the chain irreducible and aperiodic so the
stationary distribution exists and is unique. Rows of nodes with no
out-edges are set uniform before damping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyGraph, NonConvergence
from .graph import TransitionGraph

DEFAULT_DAMPING = 0.05


@dataclass
class StochasticMatrix:
    nodes: list[int]
    raw: np.ndarray  # row-normalized transitions, dangling rows uniform
    damped: np.ndarray
    damping: float

    @property
    def dimension(self) -> int:
        return len(self.nodes)


@dataclass
class StationaryDistribution:
    probabilities: np.ndarray
    residual: float  # L1 norm of pi @ P_damped - pi


@dataclass
class NetworkEntropy:
    node_entropies: np.ndarray
    total: float
    stationary: StationaryDistribution


def stochastic_matrix(g: TransitionGraph, damping: float = DEFAULT_DAMPING) -> StochasticMatrix:
    if not 0 < damping < 1:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    nodes = sorted(g.nodes)
    n = len(nodes)
    if n == 0:
        raise EmptyGraph("no nodes")
    index = {node: i for i, node in enumerate(nodes)}
    raw = np.zeros((n, n))
    for (s, t), w in g.edges.items():
        raw[index[s], index[t]] = w
    strengths = raw.sum(axis=1)
    dangling = strengths == 0
    raw[dangling] = 1.0 / n
    raw[~dangling] /= strengths[~dangling, None]
    damped = (1 - damping) * raw + damping / n
    return StochasticMatrix(nodes=nodes, raw=raw, damped=damped, damping=damping)


def stationary_distribution(
    m: StochasticMatrix, tol: float = 1e-12, max_iter: int = 100_000
) -> StationaryDistribution:
    """Power iteration from the uniform start until the L1 step < tol."""
    n = m.dimension
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ m.damped
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tol:
            pi = nxt
            break
        pi = nxt
    residual = float(np.abs(pi @ m.damped - pi).sum())
    if residual > tol * 10:
        raise NonConvergence(residual, max_iter)
    return StationaryDistribution(probabilities=pi, residual=residual)


def node_entropies(m: StochasticMatrix, damped_rows: bool = True) -> np.ndarray:
    """Row-wise Shannon entropy, natural log. Zero entries contribute 0."""
    rows = m.damped if damped_rows else m.raw
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log(rows), 0.0)
    return -terms.sum(axis=1)


def network_entropy(
    g: TransitionGraph,
    damping: float = DEFAULT_DAMPING,
    damped_rows: bool = True,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> NetworkEntropy:
    """Stationary-weighted mean of node entropies.

    ``damped_rows=False`` scores rows of the undamped matrix instead (a
    sensitivity variant); the stationary weights always come from the
    damped chain.
    """
    m = stochastic_matrix(g, damping=damping)
    pi = stationary_distribution(m, tol=tol, max_iter=max_iter)
    h = node_entropies(m, damped_rows=damped_rows)
    total = float(pi.probabilities @ h)
    if m.dimension == 1:
        total = 0.0
    return NetworkEntropy(node_entropies=h, total=total, stationary=pi)


def max_entropy(n: int) -> float:
    return math.log(n) if n > 1 else 0.0
