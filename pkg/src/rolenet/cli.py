"""Command-line interface: one subcommand per pipeline stage, plus full runs.

Stages communicate through the documented file formats (edge-list CSV,
embedding CSV, labeled similarity CSV or flat binary, clustering CSV,
curve CSV, profiles JSON), so any stage can be rerun on its own.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algorithms import (
    SpectralConfig,
    agglomerative_clustering,
    agglomerative_merges,
    make_agglomerative_solver,
    make_spectral_solver,
    spectral_clustering,
    write_clustering_csv,
    write_dendrogram_csv,
)
from .features import build_embedding, read_embedding_csv, write_embedding_csv
from .graph import read_edge_csv, write_edge_csv
from .objectives import Normalization, select_cluster_count, write_curve_csv
from .pipeline import PipelineConfig, run
from .profiles import LabelThresholds, label_profiles, profile_clusters
from .profiles import write_profile_bars_csv, write_profiles_json
from .similarity import (
    l1_distance_matrix,
    read_matrix_csv,
    similarity_from_distances,
    write_matrix_bin,
    write_matrix_csv,
)
from .synth import PRESETS, generate, preset, spec_from_json, spec_to_json, write_planted_csv


def _parse_m_range(text: str) -> list[int]:
    """'2:11' (inclusive) or a comma list '2,4,6'."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.spec:
        spec = spec_from_json(args.spec)
        if args.seed is not None:
            spec = type(spec)(spec.roles, spec.layers, args.seed)
    else:
        spec = preset(args.preset, args.seed if args.seed is not None else 0)
    graph, planted = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_csv(graph, str(out / "edges.csv"))
    write_planted_csv(graph.node_labels, planted, spec.role_names(), str(out / "planted.csv"))
    spec_to_json(spec, str(out / "synth_spec.json"))
    print(f"wrote {out / 'edges.csv'} ({graph.n_nodes} nodes, {graph.n_layers} layers)")
    return 0


def _cmd_features(args: argparse.Namespace) -> int:
    graph = read_edge_csv(args.input, args.layers.split(",") if args.layers else None)
    emb = build_embedding(graph, args.k_max, args.include_cross)
    write_embedding_csv(emb, args.output)
    print(f"wrote {args.output} ({emb.n_features} features x {emb.n_nodes} nodes)")
    return 0


def _cmd_similarity(args: argparse.Namespace) -> int:
    emb = read_embedding_csv(args.embedding)
    distances = l1_distance_matrix(emb.values)
    sim = similarity_from_distances(distances)
    if sim.degenerate:
        print("warning: all embeddings identical, similarity is all zero", file=sys.stderr)
    write_matrix_csv(sim.values, emb.node_labels, args.output)
    if args.bin:
        write_matrix_bin(sim.values, args.bin)
    print(f"wrote {args.output}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    labels, s = read_matrix_csv(args.similarity)
    if args.algorithm == "spectral":
        cfg = SpectralConfig(
            n_clusters=args.n_clusters,
            laplacian=args.laplacian,
            restarts=args.restarts,
            seed=args.seed,
        )
        clustering, score = spectral_clustering(s, cfg)
    else:
        clustering = agglomerative_clustering(s, args.n_clusters, args.linkage)
        score = None
    write_clustering_csv(clustering, labels, args.output)
    if args.dendrogram:
        if args.algorithm != "agglomerative":
            raise ValueError("--dendrogram requires --algorithm agglomerative")
        write_dendrogram_csv(agglomerative_merges(s, args.linkage), args.dendrogram)
    msg = f"wrote {args.output} ({clustering.n_clusters} clusters)"
    if score is not None:
        msg += f", within score {score:.6g}"
    print(msg)
    return 0


def _cmd_select_m(args: argparse.Namespace) -> int:
    labels, s = read_matrix_csv(args.similarity)
    if args.algorithm == "spectral":
        solver = make_spectral_solver(
            laplacian_kind=args.laplacian,
            restarts=args.restarts,
            seed=args.seed,
            max_components=max(args.m_range),
        )
    else:
        solver = make_agglomerative_solver(args.linkage)
    result = select_cluster_count(s, args.m_range, solver, Normalization(args.normalization))
    write_curve_csv(result.curve, args.output)
    if args.clustering:
        write_clustering_csv(result.clustering, labels, args.clustering)
    if result.degenerate:
        print("warning: degenerate all-zero similarity matrix", file=sys.stderr)
    print(f"wrote {args.output}; best M = {result.best_m}")
    return 0


def _cmd_profile(args: argparse.Namespace) -> int:
    from .algorithms import read_clustering_csv

    emb = read_embedding_csv(args.embedding)
    labels, clustering = read_clustering_csv(args.clustering)
    if labels != emb.node_labels:
        raise ValueError("embedding and clustering list different nodes")
    thresholds = LabelThresholds(args.balance_band, args.specialism_share)
    profiles = label_profiles(profile_clusters(emb, clustering), thresholds)
    write_profiles_json(profiles, emb, args.output, thresholds)
    if args.bars:
        write_profile_bars_csv(profiles, emb, args.bars)
    print(f"wrote {args.output} ({len(profiles)} clusters)")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = PipelineConfig.from_json(args.config)
    result = run(config)
    print(f"best M = {result.selection.best_m}; artifacts in {config.output_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rolenet",
        description="Role-based clustering of multi-layer directed networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic network with planted roles")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=PRESETS)
    group.add_argument("--spec", help="JSON spec file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("features", help="build the walk-count embedding")
    p.add_argument("--input", required=True, help="edge list CSV")
    p.add_argument("--k-max", "--K", dest="k_max", type=int, default=3)
    p.add_argument("--include-cross", action="store_true", help="add cross-layer features")
    p.add_argument("--layers", help="comma-separated layer order")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_features)

    p = sub.add_parser("similarity", help="embedding to similarity matrix")
    p.add_argument("--embedding", required=True)
    p.add_argument("--output", required=True, help="labeled CSV")
    p.add_argument("--bin", help="also write the flat binary form")
    p.set_defaults(fn=_cmd_similarity)

    p = sub.add_parser("cluster", help="cluster a similarity matrix at fixed M")
    p.add_argument("--similarity", required=True)
    p.add_argument("--n-clusters", "-M", dest="n_clusters", type=int, required=True)
    p.add_argument("--algorithm", choices=("spectral", "agglomerative"), default="spectral")
    p.add_argument("--laplacian", choices=("normalized", "unnormalized"), default="normalized")
    p.add_argument("--linkage", choices=("single", "complete", "average"), default="average")
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--dendrogram", help="merge list CSV (agglomerative only)")
    p.set_defaults(fn=_cmd_cluster)

    p = sub.add_parser("select-m", help="grid search over the number of clusters")
    p.add_argument("--similarity", required=True)
    p.add_argument("--m-range", type=_parse_m_range, default=list(range(2, 12)))
    p.add_argument("--algorithm", choices=("spectral", "agglomerative"), default="spectral")
    p.add_argument("--laplacian", choices=("normalized", "unnormalized"), default="normalized")
    p.add_argument("--linkage", choices=("single", "complete", "average"), default="average")
    p.add_argument("--normalization", choices=("size", "volume", "pair_count"), default="volume")
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="curve CSV")
    p.add_argument("--clustering", help="also write the best clustering CSV")
    p.set_defaults(fn=_cmd_select_m)

    p = sub.add_parser("profile", help="per-cluster scores and role labels")
    p.add_argument("--embedding", required=True)
    p.add_argument("--clustering", required=True)
    p.add_argument("--balance-band", type=float, default=0.25)
    p.add_argument("--specialism-share", type=float, default=0.8)
    p.add_argument("--output", required=True, help="profiles JSON")
    p.add_argument("--bars", help="long-form mean embedding CSV")
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("run", help="full pipeline from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"rolenet {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
