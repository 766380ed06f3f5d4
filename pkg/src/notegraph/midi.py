"""Standard MIDI File parsing and tempo-aware note onset extraction.

Only note identity and timing are kept: pitch bends, aftertouch and
controller data are decoded (to keep the stream in sync) and discarded.
Channel 10 (index 9) is the General MIDI percussion channel and is
excluded from onset streams.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BadVariableLengthQuantity,
    MalformedHeader,
    TruncatedChunk,
    UnsupportedFormat,
)

DEFAULT_TEMPO_US = 500_000  # microseconds per quarter note (120 BPM)
PERCUSSION_CHANNEL = 9


@dataclass(frozen=True)
class NoteEvent:
    """A decoded note-on or note-off, in absolute ticks."""

    tick: int
    channel: int
    pitch: int
    velocity: int
    on: bool


@dataclass(frozen=True)
class NoteOnset:
    """A sounding note start, with its tempo-map position in seconds."""

    tick: int
    seconds: float
    pitch: int
    channel: int
    track: int


@dataclass
class ParsedMidi:
    format: int
    ticks_per_quarter: int
    tracks: list[list[NoteEvent]]
    tempo_changes: list[tuple[int, int]]  # (tick, microseconds per quarter)
    duration: float


def _read_u16(data: bytes, pos: int) -> int:
    if pos + 2 > len(data):
        raise TruncatedChunk("unexpected end of data while reading u16")
    return int.from_bytes(data[pos:pos + 2], "big")


def _read_u32(data: bytes, pos: int) -> int:
    if pos + 4 > len(data):
        raise TruncatedChunk("unexpected end of data while reading u32")
    return int.from_bytes(data[pos:pos + 4], "big")


def _read_vlq(data: bytes, pos: int, end: int) -> tuple[int, int]:
    """Read a variable-length quantity; returns (value, new position)."""
    value = 0
    for i in range(4):
        if pos >= end:
            raise TruncatedChunk("variable-length quantity runs past chunk end")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise BadVariableLengthQuantity("variable-length quantity longer than 4 bytes")


def _parse_track(data: bytes, start: int, end: int) -> tuple[list[NoteEvent], list[tuple[int, int]]]:
    events: list[NoteEvent] = []
    tempos: list[tuple[int, int]] = []
    tick = 0
    running_status: int | None = None
    pos = start
    while pos < end:
        delta, pos = _read_vlq(data, pos, end)
        tick += delta
        if pos >= end:
            raise TruncatedChunk("event status missing at chunk end")
        byte = data[pos]
        if byte >= 0x80:
            status = byte
            pos += 1
        else:
            if running_status is None:
                raise TruncatedChunk("data byte with no running status")
            status = running_status

        if status == 0xFF:  # meta event
            running_status = None
            if pos >= end:
                raise TruncatedChunk("meta event type missing")
            meta_type = data[pos]
            pos += 1
            length, pos = _read_vlq(data, pos, end)
            if pos + length > end:
                raise TruncatedChunk("meta event data runs past chunk end")
            if meta_type == 0x51 and length == 3:
                tempos.append((tick, int.from_bytes(data[pos:pos + 3], "big")))
            pos += length
            if meta_type == 0x2F:  # end of track
                break
        elif status in (0xF0, 0xF7):  # sysex
            running_status = None
            length, pos = _read_vlq(data, pos, end)
            if pos + length > end:
                raise TruncatedChunk("sysex data runs past chunk end")
            pos += length
        elif status >= 0xF0:  # stray system common / realtime
            running_status = None
            skip = {0xF2: 2, 0xF3: 1}.get(status, 0)
            if pos + skip > end:
                raise TruncatedChunk("system message data runs past chunk end")
            pos += skip
        else:  # channel voice message
            running_status = status
            kind = status & 0xF0
            channel = status & 0x0F
            n_data = 1 if kind in (0xC0, 0xD0) else 2
            if pos + n_data > end:
                raise TruncatedChunk("channel message data runs past chunk end")
            d1 = data[pos] & 0x7F
            d2 = data[pos + 1] & 0x7F if n_data == 2 else 0
            pos += n_data
            if kind == 0x90:
                events.append(NoteEvent(tick, channel, d1, d2, on=d2 > 0))
            elif kind == 0x80:
                events.append(NoteEvent(tick, channel, d1, d2, on=False))
    return events, tempos


def parse_midi(data: bytes) -> ParsedMidi:
    """Decode a Standard MIDI File (format 0 or 1) from raw bytes."""
    if len(data) < 14 or data[:4] != b"MThd":
        raise MalformedHeader("missing MThd chunk")
    header_len = _read_u32(data, 4)
    if header_len < 6:
        raise MalformedHeader(f"header length {header_len} < 6")
    fmt = _read_u16(data, 8)
    n_tracks = _read_u16(data, 10)
    division = _read_u16(data, 12)
    if fmt not in (0, 1):
        raise UnsupportedFormat(f"SMF format {fmt} not supported")
    if division & 0x8000:
        raise UnsupportedFormat("SMPTE time division not supported")
    if division == 0:
        raise MalformedHeader("zero ticks per quarter note")

    pos = 8 + header_len
    tracks: list[list[NoteEvent]] = []
    tempos: list[tuple[int, int]] = []
    parsed = 0
    while parsed < n_tracks and pos < len(data):
        if pos + 8 > len(data):
            raise TruncatedChunk("chunk header runs past end of file")
        chunk_id = data[pos:pos + 4]
        chunk_len = _read_u32(data, pos + 4)
        body_start = pos + 8
        body_end = body_start + chunk_len
        if body_end > len(data):
            raise TruncatedChunk(f"{chunk_id!r} chunk body runs past end of file")
        if chunk_id == b"MTrk":
            events, track_tempos = _parse_track(data, body_start, body_end)
            tracks.append(events)
            tempos.extend(track_tempos)
            parsed += 1
        # alien chunks are skipped per the SMF spec
        pos = body_end
    if parsed < n_tracks:
        raise TruncatedChunk(f"header declares {n_tracks} tracks, found {parsed}")

    tempo_map = _dedupe_tempos(tempos)
    last_tick = max((ev.tick for track in tracks for ev in track), default=0)
    m = ParsedMidi(
        format=fmt,
        ticks_per_quarter=division,
        tracks=tracks,
        tempo_changes=tempo_map,
        duration=0.0,
    )
    m.duration = _tick_to_seconds(last_tick, tempo_map, division)
    return m


def _dedupe_tempos(tempos: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Sort by tick; when several tempi share a tick, the last one wins."""
    out: dict[int, int] = {}
    for tick, tempo in sorted(tempos, key=lambda t: t[0]):
        out[tick] = tempo
    return sorted(out.items())


def _tick_to_seconds(tick: int, tempo_changes: list[tuple[int, int]], tpq: int) -> float:
    seconds = 0.0
    cur_tick = 0
    cur_tempo = DEFAULT_TEMPO_US
    for change_tick, tempo in tempo_changes:
        if change_tick >= tick:
            break
        if change_tick > cur_tick:
            seconds += (change_tick - cur_tick) * cur_tempo / (tpq * 1e6)
            cur_tick = change_tick
        cur_tempo = tempo
    seconds += (tick - cur_tick) * cur_tempo / (tpq * 1e6)
    return seconds


def duration_seconds(m: ParsedMidi) -> float:
    """Tempo-map integrated time of the last event tick."""
    last_tick = max((ev.tick for track in m.tracks for ev in track), default=0)
    return _tick_to_seconds(last_tick, m.tempo_changes, m.ticks_per_quarter)


def onset_stream(m: ParsedMidi) -> list[NoteOnset]:
    """All sounding note starts, sorted by (channel, tick), drums excluded.

    Note-offs and velocity-0 note-ons (the SMF note-off shorthand) are
    dropped.
    """
    onsets = []
    for track_index, events in enumerate(m.tracks):
        for ev in events:
            if not ev.on or ev.channel == PERCUSSION_CHANNEL:
                continue
            onsets.append(
                NoteOnset(
                    tick=ev.tick,
                    seconds=_tick_to_seconds(ev.tick, m.tempo_changes, m.ticks_per_quarter),
                    pitch=ev.pitch,
                    channel=ev.channel,
                    track=track_index,
                )
            )
    onsets.sort(key=lambda o: (o.channel, o.tick, o.track, o.pitch))
    return onsets
