"""Batch corpus pipeline: scan MIDI files, filter, analyze in parallel,
aggregate per-genre tables and statistical test batteries.

Determinism contract: identical (inputs, config, seed) produce byte
identical outputs regardless of worker count. Per-song seeds derive
from the master seed and the file's content hash, so scheduling order
never matters; all output rows are sorted by song_id.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import catalog as catalog_mod
from . import stats as stats_mod
from .embeddings import (
    INTERVAL_NAMES,
    component_correlations,
    group_embedding,
    interval_vector,
    pca_project,
)
from .errors import (
    EmptySong,
    InsufficientGroups,
    MidiParseError,
    NoInputs,
    TooFewEdges,
    UnwritableOutput,
)
from .graph import graph_from_onsets
from .markov import network_entropy
from .metrics import compute_report, global_efficiency, weighted_reciprocity_raw
from .midi import onset_stream, parse_midi
from .nullmodels import RandomizerConfig, rewired_replicas, shuffled_replicas

CACHE_ENV_VAR = "NOTEGRAPH_CACHE"

# stable export order for metrics.csv and the test batteries
METRIC_COLUMNS = (
    "vertex_count",
    "edge_count",
    "density",
    "reciprocity_binary",
    "weighted_reciprocity_raw",
    "weighted_reciprocity_norm",
    "mean_node_entropy",
    "efficiency",
    "weighted_efficiency",
    "network_entropy",
)

TESTED_MEASURES = (
    "vertex_count",
    "density",
    "weighted_reciprocity_raw",
    "mean_node_entropy",
    "efficiency",
    "weighted_efficiency",
)

TREND_MEASURES = ("efficiency", "weighted_efficiency")


@dataclass
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)
    catalog_path: Optional[str] = None
    output_dir: str = "notegraph-out"
    min_duration: float = 60.0
    damping: float = 0.05
    null_samples: int = 10
    swap_multiplier: int = 10
    seed: int = 0
    workers: int = 1
    gs_min_group_size: int = 5
    cache_dir: Optional[str] = None

    def resolved_cache_dir(self) -> Optional[Path]:
        path = self.cache_dir or os.environ.get(CACHE_ENV_VAR)
        return Path(path) if path else None

    def analysis_signature(self) -> str:
        """Hash of every parameter that affects per-song results."""
        key = (
            f"{self.min_duration}|{self.damping}|{self.null_samples}"
            f"|{self.swap_multiplier}|{self.seed}"
        )
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def result_config(self) -> dict:
        """Config echo for reports: only parameters that shape results."""
        skip = ("workers", "cache_dir", "output_dir")
        return {k: v for k, v in asdict(self).items() if k not in skip}

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        """Simple key = value config file; '#' starts a comment."""
        cfg = cls()
        casts = {
            "min_duration": float, "damping": float, "null_samples": int,
            "swap_multiplier": int, "seed": int, "workers": int,
            "gs_min_group_size": int,
        }
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "inputs":
                cfg.inputs = value.split()
            elif key in ("catalog_path", "output_dir", "cache_dir"):
                setattr(cfg, key, value)
            elif key in casts:
                setattr(cfg, key, casts[key](value))
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cfg


def song_seed(master_seed: int, content_hash: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{content_hash}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _mean_std(values: list[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    arr = np.asarray(values)
    return float(arr.mean()), float(arr.std())


def analyze_song(song_id: str, data: bytes, cfg: PipelineConfig) -> dict[str, Any]:
    """Full per-song analysis; returns a JSON-serializable record.

    Raises the underlying parse/build error; the pipeline catches those
    and logs the song as excluded.
    """
    content_hash = hashlib.sha256(data).hexdigest()
    m = parse_midi(data)
    if m.duration <= cfg.min_duration:
        raise EmptySong(
            f"duration {m.duration:.2f}s not longer than {cfg.min_duration:g}s"
        )
    g = graph_from_onsets(onset_stream(m), song_id=song_id)
    seed = song_seed(cfg.seed, content_hash)
    report = compute_report(g, null_samples=cfg.null_samples, seed=seed)

    null_cfg = RandomizerConfig(
        seed=seed, swap_multiplier=cfg.swap_multiplier, null_samples=cfg.null_samples
    )
    rewired_eff: list[float] = []
    rewired_weff: list[float] = []
    try:
        for rep in rewired_replicas(g, null_cfg):
            rewired_eff.append(global_efficiency(rep, weighted=False))
            rewired_weff.append(global_efficiency(rep, weighted=True))
    except TooFewEdges:
        pass
    shuffled_weff: list[float] = []
    shuffled_rec: list[float] = []
    for rep in shuffled_replicas(g, null_cfg):
        shuffled_weff.append(global_efficiency(rep, weighted=True))
        shuffled_rec.append(weighted_reciprocity_raw(rep))

    ent = network_entropy(g, damping=cfg.damping, damped_rows=True)
    ent_raw_rows = network_entropy(g, damping=cfg.damping, damped_rows=False)
    iv = interval_vector(g, normalize=True)
    counts = interval_vector(g, normalize=False)
    weight_hist: dict[int, int] = {}
    for w in g.edges.values():
        weight_hist[w] = weight_hist.get(w, 0) + 1

    record: dict[str, Any] = {
        "song_id": song_id,
        "content_hash": content_hash,
        "duration": m.duration,
        "network_entropy": ent.total,
        "network_entropy_undamped_rows": ent_raw_rows.total,
        "interval_vector": [float(v) for v in iv],
        "interval_counts": [float(v) for v in counts],
        "weight_histogram": {str(k): v for k, v in sorted(weight_hist.items())},
        "null_rewired_efficiency_mean": _mean_std(rewired_eff)[0],
        "null_rewired_efficiency_std": _mean_std(rewired_eff)[1],
        "null_rewired_weighted_efficiency_mean": _mean_std(rewired_weff)[0],
        "null_rewired_weighted_efficiency_std": _mean_std(rewired_weff)[1],
        "null_shuffled_weighted_efficiency_mean": _mean_std(shuffled_weff)[0],
        "null_shuffled_weighted_efficiency_std": _mean_std(shuffled_weff)[1],
        "null_shuffled_reciprocity_mean": _mean_std(shuffled_rec)[0],
        "null_shuffled_reciprocity_std": _mean_std(shuffled_rec)[1],
    }
    for key, value in asdict(report).items():
        if key != "song_id":
            record[key] = value
    return record


def _worker(args: tuple[str, str, dict]) -> dict[str, Any]:
    song_id, path, cfg_dict = args
    cfg = PipelineConfig(**cfg_dict)
    data = Path(path).read_bytes()
    content_hash = hashlib.sha256(data).hexdigest()

    cache_dir = cfg.resolved_cache_dir()
    cache_file = None
    if cache_dir is not None:
        cache_file = cache_dir / f"{content_hash}-{cfg.analysis_signature()}.json"
        if cache_file.is_file():
            cached = json.loads(cache_file.read_text())
            cached["song_id"] = song_id
            return {"ok": True, "record": cached, "cached": True}

    try:
        record = analyze_song(song_id, data, cfg)
    except (MidiParseError, EmptySong) as exc:
        return {
            "ok": False,
            "song_id": song_id,
            "path": path,
            "reason": f"{type(exc).__name__}: {exc}",
        }
    if cache_file is not None:
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_file.write_text(json.dumps(record, sort_keys=True))
    return {"ok": True, "record": record, "cached": False}


def scan_inputs(inputs: list[str]) -> list[Path]:
    files: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(q for q in p.rglob("*") if q.suffix.lower() in (".mid", ".midi"))
        elif p.is_file():
            files.append(p)
    return sorted(set(files))


def run_pipeline(cfg: PipelineConfig) -> dict[str, Any]:
    """Map phase over songs, then single-threaded aggregation and export."""
    files = scan_inputs(cfg.inputs)
    if not files:
        raise NoInputs(f"no MIDI files under {cfg.inputs!r}")
    out_dir = Path(cfg.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutput(str(exc)) from exc

    jobs = [(p.stem, str(p), asdict(cfg)) for p in files]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_worker, jobs))
    else:
        outcomes = [_worker(job) for job in jobs]

    records = []
    exclusions = []
    seen_hashes: set[str] = set()
    computed = cached = 0
    for outcome in outcomes:
        if not outcome["ok"]:
            exclusions.append(outcome)
            continue
        rec = outcome["record"]
        if rec["content_hash"] in seen_hashes:
            exclusions.append({
                "song_id": rec["song_id"],
                "path": "",
                "reason": "Duplicate: content hash already analyzed",
            })
            continue
        seen_hashes.add(rec["content_hash"])
        records.append(rec)
        if outcome["cached"]:
            cached += 1
        else:
            computed += 1
    records.sort(key=lambda r: r["song_id"])
    exclusions.sort(key=lambda e: e["song_id"])

    cat = catalog_mod.load_catalog(cfg.catalog_path) if cfg.catalog_path else {}
    for rec in records:
        entry = cat.get(rec["song_id"])
        rec["genres"] = sorted(entry.macro_genres) if entry else []
        rec["release_year"] = entry.release_year if entry else None
        rec["era"] = entry.era if entry else None
        rec["artist"] = entry.clean_artist if entry else None
        rec["popularity"] = entry.popularity if entry else None

    _write_jsonl(out_dir / "songs.jsonl", records)
    _write_metrics_csv(out_dir / "metrics.csv", records)
    _write_embeddings_csv(out_dir / "embeddings.csv", records)
    _write_csv(
        out_dir / "exclusions.csv",
        ["song_id", "path", "reason"],
        [[e["song_id"], e["path"], e["reason"]] for e in exclusions],
    )
    aggregates = write_aggregates(records, out_dir, cfg)

    summary = {
        "files_scanned": len(files),
        "songs_analyzed": len(records),
        "songs_excluded": len(exclusions),
        "computed": computed,
        "cached": cached,
        "config": cfg.result_config(),
        **aggregates,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary


# --- aggregation ---

def _genre_groups(records: list[dict]) -> dict[str, list[dict]]:
    groups: dict[str, list[dict]] = {}
    for rec in records:
        for genre in rec.get("genres") or ["all"]:
            groups.setdefault(genre, []).append(rec)
    return groups


def pairwise_genre_tests(records: list[dict], measures=TESTED_MEASURES) -> list[dict]:
    """Mann-Whitney U for every genre pair, Holm-corrected per measure."""
    groups = {
        g: members
        for g, members in _genre_groups(records).items()
        if len(members) >= 2
    }
    if len(groups) < 2:
        raise InsufficientGroups(f"need >= 2 genres with >= 2 songs, got {len(groups)}")
    rows: list[dict] = []
    for measure in measures:
        batch = []
        for a, b in [(x, y) for i, x in enumerate(sorted(groups)) for y in sorted(groups)[i + 1:]]:
            xs = [r[measure] for r in groups[a] if _finite(r[measure])]
            ys = [r[measure] for r in groups[b] if _finite(r[measure])]
            res = stats_mod.mann_whitney_u(xs, ys, mode="auto")
            batch.append({
                "measure": measure, "genre_a": a, "genre_b": b,
                "statistic": res.statistic, "p_value": res.p_value,
                "method": res.method,
            })
        adjusted = stats_mod.holm_correction([row["p_value"] for row in batch])
        for row, p_adj in zip(batch, adjusted):
            row["p_adjusted"] = p_adj
        rows.extend(batch)
    return rows


def trend_report(
    records: list[dict], measures=TREND_MEASURES, min_decades: int = 3
) -> tuple[list[dict], list[dict], list[str]]:
    """Decade-mean series per genre plus a Mann-Kendall test table.

    Returns (decade_rows, test_rows, skipped_genres); genres with fewer
    than ``min_decades`` populated decades are skipped, not fatal.
    """
    dated = [r for r in records if r.get("release_year") is not None]
    decade_rows: list[dict] = []
    test_rows: list[dict] = []
    skipped: list[str] = []
    for genre, members in sorted(_genre_groups(dated).items()):
        by_decade: dict[int, list[dict]] = {}
        for rec in members:
            by_decade.setdefault(rec["release_year"] // 10 * 10, []).append(rec)
        decades = sorted(by_decade)
        if len(decades) < min_decades:
            skipped.append(genre)
            continue
        series: dict[str, list[float]] = {m: [] for m in measures}
        for decade in decades:
            row = {"genre": genre, "decade": decade, "count": len(by_decade[decade])}
            for measure in measures:
                vals = [r[measure] for r in by_decade[decade] if _finite(r[measure])]
                mean = sum(vals) / len(vals) if vals else math.nan
                row[measure] = mean
                series[measure].append(mean)
            decade_rows.append(row)
        for measure in measures:
            res = stats_mod.mann_kendall(series[measure])
            test_rows.append({
                "genre": genre, "measure": measure,
                "tau": res.statistic, "p_value": res.p_value,
                "all_tied": res.all_tied,
            })
    if test_rows:
        adjusted = stats_mod.holm_correction([r["p_value"] for r in test_rows])
        for row, p_adj in zip(test_rows, adjusted):
            row["p_adjusted"] = p_adj
    return decade_rows, test_rows, skipped


def write_aggregates(records: list[dict], out_dir: Path, cfg: PipelineConfig) -> dict[str, Any]:
    """Corpus-level tables: CCDF, interval fractions, tests, trends, GS."""
    notes: dict[str, Any] = {}

    ccdf_rows = []
    for genre, members in sorted(_genre_groups(records).items()):
        hist: dict[int, int] = {}
        for rec in members:
            for w, c in rec["weight_histogram"].items():
                hist[int(w)] = hist.get(int(w), 0) + c
        total = sum(hist.values())
        remaining = total
        for w in sorted(hist):
            ccdf_rows.append([genre, w, remaining / total])
            remaining -= hist[w]
    _write_csv(out_dir / "ccdf.csv", ["genre", "weight", "ccdf"], ccdf_rows)

    fraction_rows = []
    for genre, members in sorted(_genre_groups(records).items()):
        counts = np.zeros(12)
        for rec in members:
            counts += np.asarray(rec["interval_counts"])
        fractions = counts / counts.sum()
        for i, frac in enumerate(fractions):
            fraction_rows.append([genre, i, INTERVAL_NAMES[i], float(frac)])
    _write_csv(
        out_dir / "interval_fractions.csv",
        ["genre", "interval", "name", "fraction"],
        fraction_rows,
    )

    try:
        test_rows = pairwise_genre_tests(records)
        _write_csv(
            out_dir / "genre_tests.csv",
            ["measure", "genre_a", "genre_b", "statistic", "p_value", "p_adjusted", "method"],
            [[r["measure"], r["genre_a"], r["genre_b"], r["statistic"],
              r["p_value"], r["p_adjusted"], r["method"]] for r in test_rows],
        )
    except InsufficientGroups as exc:
        notes["genre_tests_skipped"] = str(exc)

    decade_rows, mk_rows, skipped = trend_report(records)
    _write_csv(
        out_dir / "trend_decades.csv",
        ["genre", "decade", "count", *TREND_MEASURES],
        [[r["genre"], r["decade"], r["count"], *[r[m] for m in TREND_MEASURES]]
         for r in decade_rows],
    )
    _write_csv(
        out_dir / "trend_tests.csv",
        ["genre", "measure", "tau", "p_value", "p_adjusted", "all_tied"],
        [[r["genre"], r["measure"], r["tau"], r["p_value"],
          r.get("p_adjusted", ""), r["all_tied"]] for r in mk_rows],
    )
    if skipped:
        notes["trend_skipped_genres"] = skipped

    gs_rows = []
    for group_type, key in (("genre", "genres"), ("era", "era"), ("artist", "artist")):
        groups: dict[str, list] = {}
        for rec in records:
            labels = rec[key] if key == "genres" else [rec[key]] if rec.get(key) else []
            for label in labels:
                groups.setdefault(label, []).append(np.asarray(rec["interval_vector"]))
        for label, vectors in sorted(groups.items()):
            emb = group_embedding(label, vectors, min_group_size=cfg.gs_min_group_size)
            gs_rows.append([
                group_type, label, emb.member_count,
                emb.gs_score if emb.gs_score is not None else "",
            ])
    _write_csv(out_dir / "gs_scores.csv", ["group_type", "label", "member_count", "gs_score"], gs_rows)

    if len(records) >= 2:
        matrix = np.asarray([r["interval_vector"] for r in records])
        proj = pca_project(matrix, k=2)
        _write_csv(
            out_dir / "coordinates.csv",
            ["song_id", "pc1", "pc2"],
            [[rec["song_id"], float(row[0]), float(row[1])]
             for rec, row in zip(records, proj.coordinates)],
        )
        notes["explained_variance"] = [float(v) for v in proj.explained_variance]

        features = {
            m: [r[m] for r in records]
            for m in TESTED_MEASURES
        }
        usable = len(records) >= 3
        if usable:
            corr = component_correlations(proj.coordinates, features)
            _write_csv(
                out_dir / "component_correlations.csv",
                ["component", "feature", "r", "p_value", "p_adjusted", "undefined"],
                [[e.component, e.feature, e.r, e.p_value, e.p_adjusted, e.undefined]
                 for e in corr],
            )
    return notes


# --- serialization helpers ---

def _finite(v: Any) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v)


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _write_metrics_csv(path: Path, records: list[dict]) -> None:
    header = ["song_id", *METRIC_COLUMNS, "full_density", "degenerate_baseline"]
    rows = [
        [rec["song_id"], *[rec[c] for c in METRIC_COLUMNS],
         rec["full_density"], rec["degenerate_baseline"]]
        for rec in records
    ]
    _write_csv(path, header, rows)


def _write_embeddings_csv(path: Path, records: list[dict]) -> None:
    header = ["song_id", *[f"iv_{i}" for i in range(12)]]
    rows = [[rec["song_id"], *rec["interval_vector"]] for rec in records]
    _write_csv(path, header, rows)
