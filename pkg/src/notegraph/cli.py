"""Command-line interface.

Subcommands: analyze (full per-song pipeline and aggregate tables),
nullmodel (randomized replicas of one graph), embed (PCA projection of
an analyzed corpus), stats (pairwise genre test battery), trend
(decade trends with Mann-Kendall tests), report (re-run all aggregate
tables from an existing songs.jsonl).

Exit code 0 on success; on failure a JSON error summary goes to stderr
and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import catalog as catalog_mod
from .errors import NotegraphError
from .graph import parse_edge_list, graph_from_onsets
from .midi import onset_stream, parse_midi
from .nullmodels import RandomizerConfig, rewired_replicas, shuffled_replicas
from .pipeline import (
    PipelineConfig,
    _write_csv,
    pairwise_genre_tests,
    run_pipeline,
    trend_report,
    write_aggregates,
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--catalog", dest="catalog_path")
    parser.add_argument("--output", dest="output_dir")
    parser.add_argument("--min-duration", type=float, dest="min_duration")
    parser.add_argument("--damping", type=float)
    parser.add_argument("--null-samples", type=int, dest="null_samples")
    parser.add_argument("--swap-multiplier", type=int, dest="swap_multiplier")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--gs-min-group", type=int, dest="gs_min_group_size")
    parser.add_argument("--cache-dir", dest="cache_dir")


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for key in (
        "catalog_path", "output_dir", "min_duration", "damping", "null_samples",
        "swap_multiplier", "seed", "workers", "gs_min_group_size", "cache_dir",
    ):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "inputs", None):
        cfg.inputs = args.inputs
    return cfg


def _load_songs(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def _load_graph(path: str):
    p = Path(path)
    if p.suffix.lower() in (".mid", ".midi"):
        return graph_from_onsets(onset_stream(parse_midi(p.read_bytes())), song_id=p.stem)
    return parse_edge_list(p.read_text(), song_id=p.stem)


def cmd_analyze(args: argparse.Namespace) -> int:
    summary = run_pipeline(_build_config(args))
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def cmd_nullmodel(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    cfg = RandomizerConfig(
        seed=args.seed, swap_multiplier=args.swap_multiplier, null_samples=args.samples
    )
    out = Path(args.output_dir or "nullmodel-out")
    out.mkdir(parents=True, exist_ok=True)
    for i, rep in enumerate(rewired_replicas(g, cfg)):
        (out / f"rewired_{i:03d}.edges").write_text(rep.dump_edge_list())
    for i, rep in enumerate(shuffled_replicas(g, cfg)):
        (out / f"shuffled_{i:03d}.edges").write_text(rep.dump_edge_list())
    print(json.dumps({"graph": g.song_id, "replicas": args.samples, "output": str(out)}))
    return 0


def _rejoin_catalog(records: list[dict], catalog_path: str | None) -> None:
    if not catalog_path:
        return
    cat = catalog_mod.load_catalog(catalog_path)
    for rec in records:
        entry = cat.get(rec["song_id"])
        rec["genres"] = sorted(entry.macro_genres) if entry else []
        rec["release_year"] = entry.release_year if entry else None
        rec["era"] = entry.era if entry else None
        rec["artist"] = entry.clean_artist if entry else None
        rec["popularity"] = entry.popularity if entry else None


def cmd_embed(args: argparse.Namespace) -> int:
    from .embeddings import pca_project

    records = _load_songs(args.songs)
    matrix = np.asarray([r["interval_vector"] for r in records])
    proj = pca_project(matrix, k=2)
    out = Path(args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "coordinates.csv",
        ["song_id", "pc1", "pc2"],
        [[rec["song_id"], float(row[0]), float(row[1])]
         for rec, row in zip(records, proj.coordinates)],
    )
    print(json.dumps({"explained_variance": [float(v) for v in proj.explained_variance]}))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    records = _load_songs(args.songs)
    _rejoin_catalog(records, args.catalog_path)
    rows = pairwise_genre_tests(records)
    out = Path(args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "genre_tests.csv",
        ["measure", "genre_a", "genre_b", "statistic", "p_value", "p_adjusted", "method"],
        [[r["measure"], r["genre_a"], r["genre_b"], r["statistic"],
          r["p_value"], r["p_adjusted"], r["method"]] for r in rows],
    )
    print(json.dumps({"tests": len(rows)}))
    return 0


def cmd_trend(args: argparse.Namespace) -> int:
    records = _load_songs(args.songs)
    _rejoin_catalog(records, args.catalog_path)
    decade_rows, test_rows, skipped = trend_report(records)
    out = Path(args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "trend_decades.csv",
        ["genre", "decade", "count", "efficiency", "weighted_efficiency"],
        [[r["genre"], r["decade"], r["count"], r["efficiency"], r["weighted_efficiency"]]
         for r in decade_rows],
    )
    _write_csv(
        out / "trend_tests.csv",
        ["genre", "measure", "tau", "p_value", "p_adjusted", "all_tied"],
        [[r["genre"], r["measure"], r["tau"], r["p_value"],
          r.get("p_adjusted", ""), r["all_tied"]] for r in test_rows],
    )
    print(json.dumps({"trend_tests": len(test_rows), "skipped": skipped}))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    records = _load_songs(args.songs)
    _rejoin_catalog(records, cfg.catalog_path)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    notes = write_aggregates(records, out, cfg)
    print(json.dumps(notes, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="notegraph")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full corpus pipeline")
    p.add_argument("inputs", nargs="*", help="MIDI files or directories")
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("nullmodel", help="emit randomized replicas of one graph")
    p.add_argument("graph", help="a .mid file or an edge-list dump")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--swap-multiplier", type=int, default=10)
    p.add_argument("--output", dest="output_dir")
    p.set_defaults(func=cmd_nullmodel)

    p = sub.add_parser("embed", help="2-D projection of interval embeddings")
    p.add_argument("songs", help="songs.jsonl from a previous analyze run")
    p.add_argument("--output", dest="output_dir")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("stats", help="pairwise genre Mann-Whitney battery")
    p.add_argument("songs")
    p.add_argument("--catalog", dest="catalog_path")
    p.add_argument("--output", dest="output_dir")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("trend", help="decade trends and Mann-Kendall tests")
    p.add_argument("songs")
    p.add_argument("--catalog", dest="catalog_path")
    p.add_argument("--output", dest="output_dir")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("report", help="rebuild aggregate tables from songs.jsonl")
    p.add_argument("songs")
    _add_config_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotegraphError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
