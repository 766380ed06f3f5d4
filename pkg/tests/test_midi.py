import random

import pytest

from notegraph.errors import (
    BadVariableLengthQuantity,
    MalformedHeader,
    MidiParseError,
    TruncatedChunk,
    UnsupportedFormat,
)
from notegraph.midi import duration_seconds, onset_stream, parse_midi

from fixture_midi import header_chunk, track_chunk, vlq, write_midi


def test_single_note_duration_and_onset():
    data = write_midi([(0, 0, 60, 480)], tpq=480, tempos=[(0, 500_000)])
    m = parse_midi(data)
    onsets = onset_stream(m)
    assert len(onsets) == 1
    assert onsets[0].pitch == 60
    assert onsets[0].seconds == 0.0
    # note-off at tick 480 = one quarter at 120 BPM
    assert m.duration == pytest.approx(0.5)


def test_empty_file_parses_to_empty_stream():
    data = header_chunk(0, 1, 480) + track_chunk([])
    m = parse_midi(data)
    assert onset_stream(m) == []
    assert m.duration == 0.0


def test_format_2_rejected():
    data = header_chunk(2, 1, 480) + track_chunk([])
    with pytest.raises(UnsupportedFormat):
        parse_midi(data)


def test_smpte_division_rejected():
    data = b"MThd" + (6).to_bytes(4, "big") + b"\x00\x00\x00\x01" + b"\xe7\x28" + track_chunk([])
    with pytest.raises(UnsupportedFormat):
        parse_midi(data)


def test_bad_header_rejected():
    with pytest.raises(MalformedHeader):
        parse_midi(b"RIFF" + b"\x00" * 20)
    with pytest.raises(MalformedHeader):
        parse_midi(b"MThd")


def test_truncated_track_rejected():
    data = write_midi([(0, 0, 60, 480)])
    with pytest.raises(TruncatedChunk):
        parse_midi(data[:-4])


def test_overlong_vlq_rejected():
    body = b"\xff\xff\xff\xff\xff"  # 5 continuation bytes
    chunk = b"MTrk" + len(body).to_bytes(4, "big") + body
    with pytest.raises(BadVariableLengthQuantity):
        parse_midi(header_chunk(0, 1, 480) + chunk)


def test_default_tempo_arithmetic():
    # no tempo events: 960 ticks at 480 tpq, 500000 us/quarter -> 1 s
    data = write_midi([(0, 0, 60, 960)], tpq=480, tempos=[])
    assert parse_midi(data).duration == pytest.approx(1.0)


def test_tempo_change_midway():
    # 480 ticks at 120 BPM then 480 ticks at 240 BPM: 0.5 + 0.25 s
    data = write_midi(
        [(0, 0, 60, 960)], tpq=480, tempos=[(0, 500_000), (480, 250_000)]
    )
    assert parse_midi(data).duration == pytest.approx(0.75)


def test_same_tick_tempo_last_wins():
    data = write_midi(
        [(0, 0, 60, 480)], tpq=480, tempos=[(0, 250_000), (0, 500_000)]
    )
    assert parse_midi(data).duration == pytest.approx(0.5)


def test_drum_channel_excluded():
    data = write_midi([(0, 9, 36, 240), (0, 9, 38, 240)])
    assert onset_stream(parse_midi(data)) == []


def test_two_channels_stay_grouped():
    data = write_midi(
        [(0, 0, 60, 240), (120, 1, 72, 240), (240, 0, 62, 240), (360, 1, 74, 240)]
    )
    onsets = onset_stream(parse_midi(data))
    channels = [o.channel for o in onsets]
    assert channels == sorted(channels)
    assert [(o.channel, o.pitch) for o in onsets] == [
        (0, 60), (0, 62), (1, 72), (1, 74)
    ]


def test_velocity_zero_note_on_is_note_off():
    # running status: note-on, then pitch/velocity pairs without a status byte
    body = (
        vlq(0) + bytes([0x90, 60, 64])
        + vlq(480) + bytes([60, 0])  # running-status note-off shorthand
        + vlq(0) + bytes([62, 64])
        + vlq(480) + bytes([62, 0])
    )
    chunk = b"MTrk" + len(body + b"\x00\xff\x2f\x00").to_bytes(4, "big") + body + b"\x00\xff\x2f\x00"
    m = parse_midi(header_chunk(0, 1, 480) + chunk)
    onsets = onset_stream(m)
    assert [o.pitch for o in onsets] == [60, 62]


def test_roundtrip_tick_pitch_channel_multiset():
    rng = random.Random(7)
    notes = [
        (rng.randrange(0, 4000), rng.randrange(0, 9), rng.randrange(30, 100), 120)
        for _ in range(200)
    ]
    m = parse_midi(write_midi(notes, fmt=1))
    got = sorted((o.tick, o.pitch, o.channel) for o in onset_stream(m))
    expected = sorted((t, p, c) for t, c, p, _ in notes)
    assert got == expected


def test_fuzz_never_panics():
    rng = random.Random(99)
    valid_prefix = write_midi([(0, 0, 60, 480)])
    for trial in range(300):
        if trial % 3 == 0:
            data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 200)))
        elif trial % 3 == 1:
            cut = rng.randrange(0, len(valid_prefix))
            data = valid_prefix[:cut]
        else:
            data = bytearray(valid_prefix)
            for _ in range(rng.randrange(1, 6)):
                data[rng.randrange(len(data))] = rng.randrange(256)
            data = bytes(data)
        try:
            parse_midi(data)
        except MidiParseError:
            pass


def test_duration_monotone_in_last_tick():
    durations = [
        parse_midi(write_midi([(0, 0, 60, last)], tempos=[(0, 500_000)])).duration
        for last in (100, 500, 1000, 5000)
    ]
    assert durations == sorted(durations)
