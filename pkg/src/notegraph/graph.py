"""Weighted directed note-transition networks built from onset streams.

Simultaneous onsets (identical tick, same channel) form a chord; each
consecutive chord pair contributes the complete bipartite edge set
between its pitches, loops excluded. Channels are processed separately
and their transition counts summed into one graph per song.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import groupby

from .errors import EmptySong
from .midi import NoteOnset


@dataclass(frozen=True)
class Chord:
    onset_tick: int
    pitches: frozenset[int]


@dataclass
class TransitionGraph:
    """Directed multigraph-free pitch transition network.

    ``edges`` maps (source, target) to a positive integer count.
    ``isolated`` holds pitches whose only transitions were loops; they
    remain nodes but touch no edge.
    """

    song_id: str = ""
    edges: dict[tuple[int, int], int] = field(default_factory=dict)
    isolated: frozenset[int] = frozenset()

    @property
    def nodes(self) -> frozenset[int]:
        pitches = {p for edge in self.edges for p in edge}
        return frozenset(pitches | self.isolated)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())

    def out_weights(self, node: int) -> dict[int, int]:
        return {t: w for (s, t), w in self.edges.items() if s == node}

    def successors(self) -> dict[int, list[tuple[int, int]]]:
        """Adjacency map: node -> [(target, weight), ...], sorted."""
        adj: dict[int, list[tuple[int, int]]] = {n: [] for n in self.nodes}
        for (s, t), w in sorted(self.edges.items()):
            adj[s].append((t, w))
        return adj

    def dump_edge_list(self) -> str:
        """Edge-list text, one "source target weight" line, sorted."""
        lines = [f"{s} {t} {w}" for (s, t), w in sorted(self.edges.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def parse_edge_list(text: str, song_id: str = "") -> TransitionGraph:
    """Inverse of :meth:`TransitionGraph.dump_edge_list`."""
    edges: dict[tuple[int, int], int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        s, t, w = line.split()
        edges[(int(s), int(t))] = int(w)
    if not edges:
        raise EmptySong("edge list contains no edges")
    return TransitionGraph(song_id=song_id, edges=edges)


def group_chords(onsets: list[NoteOnset]) -> list[Chord]:
    """Merge same-tick onsets of one channel into chords, order kept."""
    return [
        Chord(onset_tick=tick, pitches=frozenset(o.pitch for o in group))
        for tick, group in groupby(onsets, key=lambda o: o.tick)
    ]


def build_graph(chord_sequences: list[list[Chord]], song_id: str = "") -> TransitionGraph:
    """Sum per-channel chord-to-chord transitions into one graph.

    Raises EmptySong when no channel contributes any non-loop transition.
    """
    counts: dict[tuple[int, int], int] = defaultdict(int)
    loop_pitches: set[int] = set()
    for chords in chord_sequences:
        for a, b in zip(chords, chords[1:]):
            for x in a.pitches:
                for y in b.pitches:
                    if x == y:
                        loop_pitches.add(x)
                    else:
                        counts[(x, y)] += 1
    if not counts:
        raise EmptySong(f"no non-loop transitions in song {song_id!r}")
    endpoints = {p for edge in counts for p in edge}
    return TransitionGraph(
        song_id=song_id,
        edges=dict(counts),
        isolated=frozenset(loop_pitches - endpoints),
    )


def graph_from_onsets(onsets: list[NoteOnset], song_id: str = "") -> TransitionGraph:
    """Group a mixed-channel onset stream into chords and build the graph."""
    by_channel: dict[int, list[NoteOnset]] = defaultdict(list)
    for o in onsets:
        by_channel[o.channel].append(o)
    sequences = [group_chords(by_channel[ch]) for ch in sorted(by_channel)]
    return build_graph(sequences, song_id=song_id)
