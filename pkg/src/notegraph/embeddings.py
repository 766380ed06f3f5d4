"""Interval-class embeddings, group centroids, GS-scores and a
deterministic 2-D PCA projection.

An interval class is the unsigned pitch difference modulo 12, so octave
placement never matters. Index -> name follows Western convention, from
perfect unison (0 semitones) up to major seventh (11).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyGraph, EmptyGroup, EmptySet, TooShort, ZeroVariance, ZeroVector
from .graph import TransitionGraph
from . import stats

INTERVAL_NAMES = (
    "perfect unison",
    "minor second",
    "major second",
    "minor third",
    "major third",
    "perfect fourth",
    "tritone",
    "perfect fifth",
    "minor sixth",
    "major sixth",
    "minor seventh",
    "major seventh",
)

N_INTERVALS = 12


def interval_class(pitch_a: int, pitch_b: int) -> int:
    return abs(pitch_a - pitch_b) % 12


def interval_vector(
    g: TransitionGraph, normalize: bool = True, weighted: bool = True
) -> np.ndarray:
    """12-vector of interval occurrences over the graph's edges.

    Each edge contributes its weight (or 1 when ``weighted`` is off) to
    the component of its interval class. ``normalize`` rescales to unit
    L2 norm.
    """
    if g.edge_count == 0:
        raise EmptyGraph("no edges to count intervals from")
    v = np.zeros(N_INTERVALS)
    for (s, t), w in g.edges.items():
        v[interval_class(s, t)] += w if weighted else 1
    if normalize:
        v /= np.linalg.norm(v)
    return v


def interval_fractions(graphs: Iterable[TransitionGraph], weighted: bool = True) -> np.ndarray:
    """Corpus-level interval shares: summed counts divided by the total."""
    total = np.zeros(N_INTERVALS)
    seen = False
    for g in graphs:
        total += interval_vector(g, normalize=False, weighted=weighted)
        seen = True
    if not seen:
        raise EmptyGroup("no graphs in group")
    return total / total.sum()


def gs_score(vectors: Sequence[np.ndarray]) -> float:
    """Mean cosine similarity of a vector set to its centroid.

    1 means all vectors point the same way (a specialist group); values
    near 0 mean the set is spread out.
    """
    if len(vectors) == 0:
        raise EmptySet("GS-score of an empty set")
    matrix = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0):
        raise ZeroVector("GS-score undefined with a zero vector")
    centroid = matrix.mean(axis=0)
    c_norm = np.linalg.norm(centroid)
    if c_norm == 0:
        raise ZeroVector("centroid is the zero vector")
    return float(np.mean((matrix @ centroid) / (norms * c_norm)))


@dataclass
class GroupEmbedding:
    label: str
    centroid: np.ndarray
    member_count: int
    gs_score: float | None  # None when the group is below the size threshold


def group_embedding(
    label: str, vectors: Sequence[np.ndarray], min_group_size: int = 5
) -> GroupEmbedding:
    """Centroid for any group; GS-score only at or above the size cut."""
    if len(vectors) == 0:
        raise EmptyGroup(f"group {label!r} has no members")
    matrix = np.asarray(vectors, dtype=float)
    score = gs_score(vectors) if len(vectors) >= min_group_size else None
    return GroupEmbedding(
        label=label,
        centroid=matrix.mean(axis=0),
        member_count=len(vectors),
        gs_score=score,
    )


@dataclass
class Projection:
    coordinates: np.ndarray  # (n_rows, k)
    explained_variance: np.ndarray  # fraction per component
    components: np.ndarray  # (k, n_features) loadings


def pca_project(matrix: np.ndarray, k: int = 2) -> Projection:
    """Deterministic PCA: mean-center, SVD, fixed sign convention.

    Each component is flipped so its largest-magnitude loading is
    positive. Rank-deficient inputs are zero-padded to k components.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least 2 rows")
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0 else 0
    n_keep = min(k, rank)
    coords = np.zeros((x.shape[0], k))
    components = np.zeros((k, x.shape[1]))
    for i in range(n_keep):
        load = vt[i]
        sign = 1.0 if load[np.argmax(np.abs(load))] >= 0 else -1.0
        components[i] = sign * load
        coords[:, i] = sign * u[:, i] * s[i]
    total_var = float(np.sum(s**2))
    explained = np.zeros(k)
    if total_var > 0:
        explained[:n_keep] = (s[:n_keep] ** 2) / total_var
    return Projection(coordinates=coords, explained_variance=explained, components=components)


@dataclass
class CorrelationEntry:
    component: int
    feature: str
    r: float
    p_value: float
    p_adjusted: float
    undefined: bool = False


def component_correlations(
    coordinates: np.ndarray,
    features: dict[str, Sequence[float]],
) -> list[CorrelationEntry]:
    """Pearson r of each projection axis against each feature column.

    Holm adjustment is applied across the whole table; zero-variance
    pairs are flagged undefined and excluded from the family.
    """
    coords = np.asarray(coordinates, dtype=float)
    entries: list[CorrelationEntry] = []
    raw_pvals: list[float] = []
    for comp in range(coords.shape[1]):
        axis = coords[:, comp]
        for name, column in features.items():
            col = np.asarray(column, dtype=float)
            if len(col) != len(axis):
                raise ValueError(f"feature {name!r} length mismatch")
            try:
                res = stats.pearson(axis, col)
            except (ZeroVariance, TooShort):
                entries.append(CorrelationEntry(comp, name, np.nan, np.nan, np.nan, True))
                continue
            entries.append(CorrelationEntry(comp, name, res.statistic, res.p_value, np.nan))
            raw_pvals.append(res.p_value)
    adjusted = stats.holm_correction(raw_pvals) if raw_pvals else []
    it = iter(adjusted)
    for e in entries:
        if not e.undefined:
            e.p_adjusted = next(it)
    return entries
