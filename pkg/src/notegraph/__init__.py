"""notegraph: note-transition network analysis of MIDI corpora."""

from .graph import Chord, TransitionGraph, build_graph, graph_from_onsets, group_chords
from .metrics import MetricReport, compute_report
from .midi import NoteOnset, ParsedMidi, duration_seconds, onset_stream, parse_midi

__all__ = [
    "Chord",
    "MetricReport",
    "NoteOnset",
    "ParsedMidi",
    "TransitionGraph",
    "build_graph",
    "compute_report",
    "duration_seconds",
    "graph_from_onsets",
    "group_chords",
    "onset_stream",
    "parse_midi",
]

__version__ = "0.1.0"
