"""Per-song scalar network measures.

Conventions used throughout:
  * natural logarithm (normalizations cancel the base anyway);
  * unreachable node pairs contribute 0 to efficiency;
  * nodes with out-degree <= 1 contribute 0 entropy but still count in
    the mean's denominator.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DegenerateGraph, EmptyCollection, EmptyGraph
from .graph import TransitionGraph
from .nullmodels import RandomizerConfig, shuffled_replicas


@dataclass
class MetricReport:
    song_id: str
    vertex_count: int
    edge_count: int
    density: float
    reciprocity_binary: float
    weighted_reciprocity_raw: float
    weighted_reciprocity_norm: float
    mean_node_entropy: float
    efficiency: float
    weighted_efficiency: float
    full_density: bool = False  # binary reciprocity undefined at density 1
    degenerate_baseline: bool = False  # r_NM = 1, normalized value undefined


def density(g: TransitionGraph) -> float:
    n = g.node_count
    if n < 2:
        raise DegenerateGraph(f"density undefined for {n} node(s)")
    return g.edge_count / (n * (n - 1))


def reciprocity_binary(g: TransitionGraph) -> tuple[float, bool]:
    """Reciprocated-edge excess over the density baseline.

    Returns (value, full_density_flag); a graph at density 1 has every
    edge reciprocated and the excess is reported as 1 with the flag set.
    """
    if g.edge_count == 0:
        raise EmptyGraph("reciprocity undefined without edges")
    a = density(g)
    if a >= 1.0:
        return 1.0, True
    reciprocated = sum(1 for (s, t) in g.edges if (t, s) in g.edges)
    r = reciprocated / g.edge_count
    return (r - a) / (1 - a), False


def weighted_reciprocity_raw(g: TransitionGraph) -> float:
    """Reciprocated weight fraction: sum of pairwise minima over total."""
    total = g.total_weight
    if total == 0:
        raise EmptyGraph("no weight in graph")
    reciprocated = sum(
        min(w, g.edges[(t, s)])
        for (s, t), w in g.edges.items()
        if (t, s) in g.edges
    )
    return reciprocated / total


def weighted_reciprocity_norm(
    g: TransitionGraph, null_samples: int = 10, seed: int = 0
) -> tuple[float, bool]:
    """Weighted reciprocity against the out-weight-shuffle baseline.

    Returns (value, degenerate_flag); when the baseline itself is fully
    reciprocated (r_NM = 1) the value is undefined and reported as NaN
    with the flag set.
    """
    r = weighted_reciprocity_raw(g)
    cfg = RandomizerConfig(seed=seed, null_samples=null_samples)
    samples = [weighted_reciprocity_raw(rep) for rep in shuffled_replicas(g, cfg)]
    r_nm = sum(samples) / len(samples)
    if r_nm >= 1.0:
        return math.nan, True
    return (r - r_nm) / (1 - r_nm), False


def mean_node_entropy(g: TransitionGraph) -> float:
    """Mean normalized Shannon entropy of per-node out-weight splits."""
    nodes = g.nodes
    if not nodes:
        raise EmptyGraph("no nodes")
    adj = g.successors()
    total = 0.0
    for node in nodes:
        out = adj.get(node, [])
        k = len(out)
        if k <= 1:
            continue
        strength = sum(w for _, w in out)
        h = -sum((w / strength) * math.log(w / strength) for _, w in out)
        total += h / math.log(k)
    return total / len(nodes)


def _dijkstra(adj: dict[int, list[tuple[int, int]]], source: int, weighted: bool) -> dict[int, float]:
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj.get(u, ()):
            nd = d + (w if weighted else 1)
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def global_efficiency(g: TransitionGraph, weighted: bool = False) -> float:
    """Mean inverse shortest-path distance over ordered node pairs.

    Unreachable pairs contribute 0. The weighted variant uses total edge
    weight as path cost; with all weights >= 1 it never exceeds the
    unweighted value.
    """
    n = g.node_count
    if n < 2:
        raise DegenerateGraph(f"efficiency undefined for {n} node(s)")
    adj = g.successors()
    acc = 0.0
    for source in adj:
        dist = _dijkstra(adj, source, weighted)
        acc += sum(1.0 / d for node, d in dist.items() if node != source)
    return acc / (n * (n - 1))


def weight_ccdf(graphs: Iterable[TransitionGraph]) -> list[tuple[int, float]]:
    """P(W >= w) over every edge weight in the collection."""
    weights = sorted(w for g in graphs for w in g.edges.values())
    if not weights:
        raise EmptyCollection("no edges in collection")
    total = len(weights)
    out = []
    for i, w in enumerate(weights):
        if i == 0 or w != weights[i - 1]:
            out.append((w, (total - i) / total))
    return out


def compute_report(
    g: TransitionGraph, null_samples: int = 10, seed: int = 0
) -> MetricReport:
    """Assemble every scalar measure for one song graph."""
    rho, full = reciprocity_binary(g)
    rho_w, degenerate = weighted_reciprocity_norm(g, null_samples=null_samples, seed=seed)
    return MetricReport(
        song_id=g.song_id,
        vertex_count=g.node_count,
        edge_count=g.edge_count,
        density=density(g),
        reciprocity_binary=rho,
        weighted_reciprocity_raw=weighted_reciprocity_raw(g),
        weighted_reciprocity_norm=rho_w,
        mean_node_entropy=mean_node_entropy(g),
        efficiency=global_efficiency(g, weighted=False),
        weighted_efficiency=global_efficiency(g, weighted=True),
        full_density=full,
        degenerate_baseline=degenerate,
    )
