"""Role-based clustering of multi-layer directed networks.

Builds interpretable walk-count embeddings per node, turns them into a
similarity matrix, optimizes normalized within/between cluster scores with
spectral or agglomerative algorithms, selects the number of clusters, and
summarizes each cluster as a qualitative role profile.
"""

__version__ = "0.1.0"

from .graph import MultiLayerGraph, from_edges, read_edge_csv, write_edge_csv
from .features import (
    Embedding,
    FeatureSpec,
    build_embedding,
    cross_layer_features,
    cross_layer_walk_counts,
    ratio_normalize,
    walk_counts,
)
from .similarity import (
    SimilarityResult,
    l1_distance_matrix,
    similarity_from_distances,
    symmetrize,
)
from .objectives import (
    Clustering,
    Normalization,
    SelectionResult,
    best_partition_exhaustive,
    between_similarity,
    relabel_dense,
    select_cluster_count,
    within_similarity,
)
from .algorithms import (
    SpectralConfig,
    agglomerative_clustering,
    agglomerative_merges,
    kmeans,
    laplacian,
    make_agglomerative_solver,
    make_spectral_solver,
    spectral_clustering,
)
from .synth import (
    RoleTemplate,
    SynthSpec,
    adjusted_rand_index,
    generate,
    preset,
)
from .profiles import (
    ClusterProfile,
    LabelThresholds,
    label_profiles,
    profile_clusters,
)
from .pipeline import PipelineConfig, PipelineError, RunResult, rerun_from_manifest, run

__all__ = [
    "MultiLayerGraph",
    "from_edges",
    "read_edge_csv",
    "write_edge_csv",
    "Embedding",
    "FeatureSpec",
    "build_embedding",
    "cross_layer_features",
    "cross_layer_walk_counts",
    "ratio_normalize",
    "walk_counts",
    "SimilarityResult",
    "l1_distance_matrix",
    "similarity_from_distances",
    "symmetrize",
    "Clustering",
    "Normalization",
    "SelectionResult",
    "best_partition_exhaustive",
    "between_similarity",
    "relabel_dense",
    "select_cluster_count",
    "within_similarity",
    "SpectralConfig",
    "agglomerative_clustering",
    "agglomerative_merges",
    "kmeans",
    "laplacian",
    "make_agglomerative_solver",
    "make_spectral_solver",
    "spectral_clustering",
    "RoleTemplate",
    "SynthSpec",
    "adjusted_rand_index",
    "generate",
    "preset",
    "ClusterProfile",
    "LabelThresholds",
    "label_profiles",
    "profile_clusters",
    "PipelineConfig",
    "PipelineError",
    "RunResult",
    "rerun_from_manifest",
    "run",
]
