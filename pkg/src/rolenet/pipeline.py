"""Config-driven end-to-end runs: edge list in, clustering artifacts out.

A run ingests an edge-list CSV, builds the walk embedding, converts it to
similarities, selects the cluster count over a grid, and writes every
intermediate artifact plus a manifest (config and library versions) that
suffices to reproduce the run byte for byte. All randomness flows from the
single seed in the config; the thread cap (ROLENET_THREADS) never changes
results.
"""

from __future__ import annotations

import json
import platform
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .algorithms import (
    make_agglomerative_solver,
    make_spectral_solver,
    write_clustering_csv,
)
from .features import build_embedding, write_embedding_csv
from .graph import read_edge_csv
from .objectives import (
    Normalization,
    SelectionResult,
    select_cluster_count,
    write_curve_csv,
)
from .profiles import (
    LabelThresholds,
    label_profiles,
    profile_clusters,
    write_profile_bars_csv,
    write_profiles_json,
)
from .similarity import l1_distance_matrix, similarity_from_distances, write_matrix_csv


class PipelineError(RuntimeError):
    """A stage failed; the message carries the stage name and input path."""


@dataclass
class PipelineConfig:
    input: str
    output_dir: str
    layers: list[str] | None = None  # pin layer order; None = first appearance
    k_max: int = 3
    include_cross: bool = False
    distance: str = "l1"
    normalization: str = "volume"
    algorithm: str = "spectral"  # or "agglomerative"
    laplacian: str = "normalized"
    linkage: str = "average"
    m_values: list[int] = field(default_factory=lambda: list(range(2, 12)))
    restarts: int = 500
    kmeans_max_iter: int = 300
    kmeans_tol: float = 1e-8
    seed: int = 0
    balance_band: float = 0.25
    specialism_share: float = 0.8

    def __post_init__(self) -> None:
        if self.distance != "l1":
            raise ValueError(f"only the l1 distance is supported, got {self.distance!r}")
        if self.algorithm not in ("spectral", "agglomerative"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        Normalization(self.normalization)  # raises on bad value

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, path: str) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class RunResult:
    selection: SelectionResult
    artifacts: dict[str, str]  # artifact name -> file path


def _solver_for(config: PipelineConfig):
    if config.algorithm == "spectral":
        return make_spectral_solver(
            laplacian_kind=config.laplacian,
            restarts=config.restarts,
            seed=config.seed,
            kmeans_max_iter=config.kmeans_max_iter,
            kmeans_tol=config.kmeans_tol,
            max_components=max(config.m_values),
        )
    return make_agglomerative_solver(config.linkage)


def run(config: PipelineConfig) -> RunResult:
    """Execute the full pipeline and write all artifacts to config.output_dir."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, str] = {}

    def stage(name: str, path: str, fn):
        try:
            return fn()
        except Exception as exc:
            raise PipelineError(f"stage {name!r} failed on {path}: {exc}") from exc

    graph = stage("ingest", config.input, lambda: read_edge_csv(config.input, config.layers))
    emb = stage(
        "features",
        config.input,
        lambda: build_embedding(graph, config.k_max, config.include_cross),
    )
    emb_path = str(out / "embedding.csv")
    write_embedding_csv(emb, emb_path)
    artifacts["embedding"] = emb_path

    def _similarity():
        distances = l1_distance_matrix(emb.values)
        return similarity_from_distances(distances)

    sim = stage("similarity", emb_path, _similarity)
    sim_path = str(out / "similarity.csv")
    write_matrix_csv(sim.values, graph.node_labels, sim_path)
    artifacts["similarity"] = sim_path

    selection = stage(
        "select-m",
        sim_path,
        lambda: select_cluster_count(
            sim.values,
            config.m_values,
            _solver_for(config),
            Normalization(config.normalization),
        ),
    )
    curve_path = str(out / "curve.csv")
    write_curve_csv(selection.curve, curve_path)
    artifacts["curve"] = curve_path
    clustering_path = str(out / "clustering.csv")
    write_clustering_csv(selection.clustering, graph.node_labels, clustering_path)
    artifacts["clustering"] = clustering_path

    thresholds = LabelThresholds(config.balance_band, config.specialism_share)
    profiles = stage(
        "profile",
        clustering_path,
        lambda: label_profiles(profile_clusters(emb, selection.clustering), thresholds),
    )
    profiles_path = str(out / "profiles.json")
    write_profiles_json(profiles, emb, profiles_path, thresholds)
    artifacts["profiles"] = profiles_path
    bars_path = str(out / "profile_bars.csv")
    write_profile_bars_csv(profiles, emb, bars_path)
    artifacts["profile_bars"] = bars_path

    # The output directory is where the manifest itself lives; leaving it
    # out keeps logically identical runs byte-identical wherever they land.
    config_doc = {k: v for k, v in config.to_dict().items() if k != "output_dir"}
    manifest = {
        "config": config_doc,
        "versions": {
            "rolenet": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    manifest_path = str(out / "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    artifacts["manifest"] = manifest_path

    return RunResult(selection, artifacts)


def rerun_from_manifest(manifest_path: str, output_dir: str | None = None) -> RunResult:
    """Reproduce a run from its manifest; defaults to regenerating in place."""
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if output_dir is None:
        output_dir = str(Path(manifest_path).parent)
    config = PipelineConfig.from_dict({**manifest["config"], "output_dir": output_dir})
    return run(config)
