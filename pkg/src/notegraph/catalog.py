"""Offline song metadata: name cleaning, fuzzy track matching, macro-genre
keyword tagging, release-year reconciliation and era bucketing.

The catalog is a delimiter-separated text file with header columns
(song_id, title, artists, genres, year_a, year_b, popularity); year_a is
the streaming-catalog date, year_b the secondary (estimated) date, and
genre tags within a field are separated by "|".
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

MACRO_GENRE_KEYWORDS = {
    "rock": "rock",
    "pop": "pop",
    "electronic": "electronic",
    "classical": "classical",
    "jazz": "jazz",
    "hiphop": "hip hop",
    "hip hop": "hip hop",
}

MACRO_GENRES = ("rock", "pop", "electronic", "classical", "jazz", "hip hop")

ERA_BUCKETS = ("pre-1900", "1900-1949", "1950-1979", "1980-1999", "2000-plus")

ARTIST_DELIMITERS = re.compile(r"[;,&]")

# year_b is trusted below this cutoff, year_a at or above it
SECONDARY_SOURCE_CUTOFF = 1980
MAX_RELEASE_YEAR = 2021
MIN_YEAR_MODERN = 1950  # rock / pop / electronic / hip hop
MIN_YEAR_JAZZ = 1900

_FEAT_TOKEN = re.compile(r"\b(?:feat\.|ft\.)", re.IGNORECASE)
_PARENS = re.compile(r"\([^)]*\)")
_NON_ALNUM = re.compile(r"[^0-9a-zA-Z]+")


@dataclass
class CatalogRecord:
    song_id: str
    raw_title: str = ""
    raw_artist: str = ""
    clean_title: str = ""
    clean_artist: str = ""
    genres: list[str] = field(default_factory=list)
    macro_genres: frozenset[str] = frozenset()
    release_year_a: Optional[int] = None
    release_year_b: Optional[int] = None
    release_year: Optional[int] = None
    era: Optional[str] = None
    popularity: Optional[int] = None


def clean_name(s: str) -> str:
    """Truncate at feat./ft., drop parenthesized spans and punctuation."""
    s = _FEAT_TOKEN.split(s, maxsplit=1)[0]
    s = _PARENS.sub(" ", s)
    s = _NON_ALNUM.sub(" ", s)
    return " ".join(s.split()).casefold()


def first_artist(artists: str) -> str:
    """First listed artist; composers come first in classical listings."""
    return ARTIST_DELIMITERS.split(artists, maxsplit=1)[0].strip()


def artist_list(artists: str) -> list[str]:
    return [a.strip() for a in ARTIST_DELIMITERS.split(artists) if a.strip()]


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def match_track(
    query: CatalogRecord, candidates: Iterable[CatalogRecord]
) -> Optional[CatalogRecord]:
    """Closest-title candidate among those listing the query's artist.

    Ties on edit distance go to the earliest release date (avoiding
    remasters and live versions), then to the lexicographically smallest
    song_id so candidate order never matters.
    """
    query_artist = query.clean_artist or clean_name(first_artist(query.raw_artist))
    query_title = query.clean_title or clean_name(query.raw_title)
    best = None
    best_key = None
    for cand in candidates:
        artists = {clean_name(a) for a in artist_list(cand.raw_artist)}
        if query_artist not in artists:
            continue
        title = cand.clean_title or clean_name(cand.raw_title)
        year = cand.release_year_a if cand.release_year_a is not None else 10**6
        key = (levenshtein(query_title, title), year, cand.song_id)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def macro_genres(tags: Iterable[str]) -> frozenset[str]:
    """Case-insensitive keyword containment over raw genre tags."""
    found = set()
    for tag in tags:
        folded = tag.casefold()
        for keyword, canonical in MACRO_GENRE_KEYWORDS.items():
            if keyword in folded:
                found.add(canonical)
    return frozenset(found)


def reconcile_release_year(
    year_a: Optional[int],
    year_b: Optional[int],
    genres: frozenset[str] | set[str] = frozenset(),
) -> Optional[int]:
    """Pick a release year from the two sources, then sanity-filter it.

    The secondary estimate wins for pre-1980 years (it is more reliable
    for old songs); otherwise the catalog date is used when present.
    Years failing the per-genre plausibility thresholds are dropped.
    """
    if year_a is None and year_b is None:
        return None
    if year_b is not None and year_b < SECONDARY_SOURCE_CUTOFF:
        year = year_b
    elif year_a is not None:
        year = year_a
    else:
        year = year_b
    if year is None or year > MAX_RELEASE_YEAR:
        return None
    modern = {"rock", "pop", "electronic", "hip hop"}
    if genres & modern and year < MIN_YEAR_MODERN:
        return None
    if "jazz" in genres and year < MIN_YEAR_JAZZ:
        return None
    return year


def era_bucket(year: int) -> str:
    if year < 1900:
        return "pre-1900"
    if year < 1950:
        return "1900-1949"
    if year < 1980:
        return "1950-1979"
    if year < 2000:
        return "1980-1999"
    return "2000-plus"


def _parse_int(value: str) -> Optional[int]:
    value = value.strip()
    return int(value) if value else None


def build_record(
    song_id: str,
    title: str = "",
    artists: str = "",
    genres: Iterable[str] = (),
    year_a: Optional[int] = None,
    year_b: Optional[int] = None,
    popularity: Optional[int] = None,
) -> CatalogRecord:
    """Derive all cleaned and reconciled fields for one raw row."""
    tags = list(genres)
    macro = macro_genres(tags)
    year = reconcile_release_year(year_a, year_b, macro)
    return CatalogRecord(
        song_id=song_id,
        raw_title=title,
        raw_artist=artists,
        clean_title=clean_name(title),
        clean_artist=clean_name(first_artist(artists)),
        genres=tags,
        macro_genres=macro,
        release_year_a=year_a,
        release_year_b=year_b,
        release_year=year,
        era=era_bucket(year) if year is not None else None,
        popularity=popularity,
    )


def load_catalog(path: str | Path, delimiter: str = "\t") -> dict[str, CatalogRecord]:
    """Read the catalog file into song_id -> record."""
    records: dict[str, CatalogRecord] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh, delimiter=delimiter):
            rec = build_record(
                song_id=row["song_id"].strip(),
                title=row.get("title", ""),
                artists=row.get("artists", ""),
                genres=[g for g in row.get("genres", "").split("|") if g],
                year_a=_parse_int(row.get("year_a", "") or ""),
                year_b=_parse_int(row.get("year_b", "") or ""),
                popularity=_parse_int(row.get("popularity", "") or ""),
            )
            records[rec.song_id] = rec
    return records
