"""Clustering algorithms: spectral (Laplacian eigenvectors + K-means) and agglomerative.

Spectral clustering embeds nodes with the eigenvectors belonging to the
smallest eigenvalues of the similarity Laplacian and clusters the embedded
points with restarted K-means. The normalized Laplacian variant relaxes
the volume-normalized cut objective, the unnormalized variant the
size-normalized one; each restart is scored with the matching within
score on the original similarity matrix and the best restart wins.

All randomness is derived from an explicit base seed; restart r always
uses seed base + r, so results do not depend on execution order or the
worker-thread cap (ROLENET_THREADS).
"""

from __future__ import annotations

import csv
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .objectives import Clustering, Normalization, relabel_dense, within_similarity
from .similarity import check_similarity

_EIG_RESIDUAL_TOL = 1e-6

LINKAGES = ("single", "complete", "average")


def thread_count() -> int:
    """Worker threads for restart evaluation; ROLENET_THREADS caps it (default 1)."""
    raw = os.environ.get("ROLENET_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Laplacians and the spectral embedding
# ---------------------------------------------------------------------------

def laplacian(s: np.ndarray, kind: str = "unnormalized") -> np.ndarray:
    """Graph Laplacian of a similarity matrix.

    unnormalized: L = D - S for D = diag(row sums of S). normalized:
    L = I - D^{-1/2} S D^{-1/2}, where rows/columns of isolated nodes
    (zero row sum) are left zero in the scaling.
    """
    s = check_similarity(s)
    degrees = s.sum(axis=1)
    if kind == "unnormalized":
        return np.diag(degrees) - s
    if kind == "normalized":
        with np.errstate(divide="ignore"):
            inv_sqrt = np.where(degrees > 0, 1.0 / np.sqrt(degrees), 0.0)
        lap = -s * inv_sqrt[:, None] * inv_sqrt[None, :]
        np.fill_diagonal(lap, 1.0)
        return lap
    raise ValueError(f"unknown laplacian kind {kind!r}")


def spectral_basis(s: np.ndarray, kind: str, n_components: int) -> np.ndarray:
    """Eigenvectors of the n_components smallest Laplacian eigenvalues, as columns."""
    lap = laplacian(s, kind)
    vals, vecs = np.linalg.eigh(lap)
    used_vals = vals[:n_components]
    used_vecs = vecs[:, :n_components]
    residual = np.linalg.norm(lap @ used_vecs - used_vecs * used_vals, axis=0)
    if np.any(residual > _EIG_RESIDUAL_TOL):
        raise RuntimeError(
            f"eigendecomposition residual {residual.max():.2e} exceeds {_EIG_RESIDUAL_TOL}"
        )
    return used_vecs


def _row_normalize(points: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return points / safe[:, None]


# ---------------------------------------------------------------------------
# K-means (Lloyd iterations, seeded restarts handled by the caller)
# ---------------------------------------------------------------------------

def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clip tiny negatives from cancellation.
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _init_random_points(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct rows of points, chosen by scanning a random permutation."""
    chosen: list[np.ndarray] = []
    for idx in rng.permutation(points.shape[0]):
        row = points[idx]
        if not any(np.array_equal(row, c) for c in chosen):
            chosen.append(row)
            if len(chosen) == k:
                break
    return np.array(chosen)


def _init_plus_plus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """kmeans++ seeding; falls back to uniform choice when all mass is at distance 0."""
    chosen = [points[rng.integers(points.shape[0])]]
    while len(chosen) < k:
        d2 = _squared_distances(points, np.array(chosen)).min(axis=1)
        total = d2.sum()
        if total <= 0:
            extra = _init_random_points(points, k, rng)
            for row in extra:
                if not any(np.array_equal(row, c) for c in chosen):
                    chosen.append(row)
                    if len(chosen) == k:
                        break
            break
        idx = int(np.searchsorted(np.cumsum(d2 / total), rng.random(), side="right"))
        chosen.append(points[min(idx, points.shape[0] - 1)])
    return np.array(chosen)


def kmeans(
    points: np.ndarray,
    n_clusters: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-8,
    plus_plus: bool = False,
) -> np.ndarray:
    """Lloyd's algorithm from randomly chosen distinct starting points.

    Stops when the largest centroid movement drops below tol or after
    max_iter sweeps. An empty cluster is repaired by reseeding its
    centroid at the point currently farthest from its assigned centroid.
    Raises ValueError when the data has fewer than n_clusters distinct
    points.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    n = points.shape[0]
    if n_clusters < 1 or n_clusters > n:
        raise ValueError(f"n_clusters must be in [1, {n}], got {n_clusters}")
    if np.unique(points, axis=0).shape[0] < n_clusters:
        raise ValueError(f"fewer than {n_clusters} distinct points")
    rng = np.random.default_rng(seed)
    init = _init_plus_plus if plus_plus else _init_random_points
    centroids = init(points, n_clusters, rng)

    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        d2 = _squared_distances(points, centroids)
        labels = np.argmin(d2, axis=1)
        counts = np.bincount(labels, minlength=n_clusters)
        while np.any(counts == 0):
            own = d2[np.arange(n), labels]
            farthest = int(np.argmax(own))
            empty = int(np.flatnonzero(counts == 0)[0])
            centroids[empty] = points[farthest]
            labels[farthest] = empty
            d2[:, empty] = _squared_distances(points, centroids[empty : empty + 1])[:, 0]
            d2[farthest, empty] = 0.0
            counts = np.bincount(labels, minlength=n_clusters)
        new_centroids = np.empty_like(centroids)
        for c in range(n_clusters):
            new_centroids[c] = points[labels == c].mean(axis=0)
        shift = np.linalg.norm(new_centroids - centroids, axis=1).max()
        centroids = new_centroids
        if shift < tol:
            break
    return labels


# ---------------------------------------------------------------------------
# Spectral clustering with restarts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralConfig:
    n_clusters: int
    laplacian: str = "normalized"
    restarts: int = 500
    kmeans_max_iter: int = 300
    kmeans_tol: float = 1e-8
    seed: int = 0
    plus_plus: bool = False

    def __post_init__(self) -> None:
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")
        if self.laplacian not in ("normalized", "unnormalized"):
            raise ValueError(f"unknown laplacian {self.laplacian!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.kmeans_tol <= 0:
            raise ValueError("kmeans_tol must be positive")


def _restart_block(
    points: np.ndarray,
    s: np.ndarray,
    cfg: SpectralConfig,
    norm: Normalization,
    restarts: range,
) -> list[tuple[float, np.ndarray]]:
    out = []
    for r in restarts:
        labels = kmeans(
            points,
            cfg.n_clusters,
            seed=cfg.seed + r,
            max_iter=cfg.kmeans_max_iter,
            tol=cfg.kmeans_tol,
            plus_plus=cfg.plus_plus,
        )
        score = within_similarity(s, Clustering(labels, cfg.n_clusters), norm)
        out.append((score, labels))
    return out


def _best_restart(
    points: np.ndarray, s: np.ndarray, cfg: SpectralConfig, norm: Normalization
) -> tuple[float, np.ndarray]:
    workers = min(thread_count(), cfg.restarts)
    if workers <= 1:
        results = _restart_block(points, s, cfg, norm, range(cfg.restarts))
    else:
        bounds = np.linspace(0, cfg.restarts, workers + 1).astype(int)
        chunks = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(
                pool.map(lambda c: _restart_block(points, s, cfg, norm, c), chunks)
            )
        results = [item for block in blocks for item in block]
    best_score, best_labels = results[0]
    for score, labels in results[1:]:
        if score > best_score:
            best_score, best_labels = score, labels
    return best_score, best_labels


def spectral_clustering(
    s: np.ndarray, config: SpectralConfig, basis: np.ndarray | None = None
) -> tuple[Clustering, float]:
    """Best-of-restarts spectral clustering.

    Returns the clustering and its within score (volume-normalized for the
    normalized Laplacian, size-normalized otherwise). A precomputed
    spectral basis with at least n_clusters columns may be passed to share
    the eigendecomposition across calls.

    If the spectral embedding holds fewer distinct rows than requested
    clusters, K-means cannot separate them; the identical-row grouping is
    returned instead, with a warning (fewer clusters than asked).
    """
    s = check_similarity(s)
    if not np.any(s):
        raise ValueError("similarity matrix is all zero")
    if config.n_clusters >= s.shape[0]:
        raise ValueError("n_clusters must be smaller than the number of nodes")
    if basis is None:
        basis = spectral_basis(s, config.laplacian, config.n_clusters)
    points = basis[:, : config.n_clusters]
    if config.laplacian == "normalized":
        points = _row_normalize(points)
    norm = Normalization.VOLUME if config.laplacian == "normalized" else Normalization.SIZE

    _, inverse = np.unique(points, axis=0, return_inverse=True)
    n_distinct = int(inverse.max()) + 1
    if n_distinct < config.n_clusters:
        warnings.warn(
            f"spectral embedding has only {n_distinct} distinct rows; "
            f"returning {n_distinct} clusters instead of {config.n_clusters}",
            stacklevel=2,
        )
        clustering = relabel_dense(inverse)
        return clustering, within_similarity(s, clustering, norm)

    best_score, best_labels = _best_restart(points, s, config, norm)
    return Clustering(best_labels, config.n_clusters), best_score


def make_spectral_solver(
    laplacian_kind: str = "normalized",
    restarts: int = 500,
    seed: int = 0,
    kmeans_max_iter: int = 300,
    kmeans_tol: float = 1e-8,
    plus_plus: bool = False,
    max_components: int | None = None,
):
    """Solver callable for select_cluster_count, sharing one eigendecomposition.

    The basis is computed once per similarity matrix object (up to
    max_components columns, or all of them) and sliced per requested
    cluster count.
    """
    state: dict[str, np.ndarray | None] = {"s": None, "basis": None}

    def solve(s: np.ndarray, m: int) -> tuple[Clustering, float]:
        if state["s"] is not s:
            n_comp = s.shape[0] if max_components is None else min(max_components, s.shape[0])
            state["basis"] = spectral_basis(s, laplacian_kind, n_comp)
            state["s"] = s
        basis = state["basis"]
        assert basis is not None
        if m > basis.shape[1]:
            raise ValueError(f"solver prepared for at most {basis.shape[1]} clusters")
        cfg = SpectralConfig(
            n_clusters=m,
            laplacian=laplacian_kind,
            restarts=restarts,
            kmeans_max_iter=kmeans_max_iter,
            kmeans_tol=kmeans_tol,
            seed=seed,
            plus_plus=plus_plus,
        )
        return spectral_clustering(s, cfg, basis=basis)

    return solve


# ---------------------------------------------------------------------------
# Agglomerative clustering
# ---------------------------------------------------------------------------

class Merge(NamedTuple):
    step: int
    cluster_a: int  # surviving cluster (always the smaller id)
    cluster_b: int  # absorbed cluster
    value: float    # linkage similarity at merge time


def _pair_values(work: np.ndarray, x: int, others: np.ndarray) -> np.ndarray:
    """Linkage values between cluster x and each of others, regardless of order."""
    return np.where(others > x, work[x, others], work[others, x])


def _merge_sequence(
    s: np.ndarray, linkage: str, n_final: int
) -> tuple[list[Merge], np.ndarray, list[int]]:
    """Greedy merging down to n_final clusters.

    Clusters are identified by their smallest member index. Returns the
    merge list, a representative id per node, and the sorted surviving
    ids. Ties pick the pair with the smallest (first id, second id).
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    s = check_similarity(s)
    n = s.shape[0]
    if not 1 <= n_final <= n:
        raise ValueError(f"target cluster count must be in [1, {n}], got {n_final}")

    active = np.ones(n, dtype=bool)
    rep = np.arange(n)  # node -> current cluster id (smallest member)
    sizes = np.ones(n)
    if linkage == "average":
        sums = s.astype(float).copy()  # total cross similarity between clusters
    # Working matrix of linkage values for active pairs a < b; -inf elsewhere.
    work = np.full((n, n), -np.inf)
    iu = np.triu_indices(n, k=1)
    work[iu] = s[iu]

    merges: list[Merge] = []
    for step in range(n - n_final):
        flat = int(np.argmax(work))
        a, b = divmod(flat, n)
        value = work[a, b]
        merges.append(Merge(step, a, b, float(value)))

        # Merge b into a (a < b by construction).
        others = np.flatnonzero(active)
        others = others[(others != a) & (others != b)]
        if linkage == "average":
            sums[a, others] += sums[b, others]
            sums[others, a] = sums[a, others]
            new_vals = sums[a, others] / ((sizes[a] + sizes[b]) * sizes[others])
        elif linkage == "single":
            new_vals = np.maximum(_pair_values(work, a, others), _pair_values(work, b, others))
        else:
            new_vals = np.minimum(_pair_values(work, a, others), _pair_values(work, b, others))
        lo = np.minimum(a, others)
        hi = np.maximum(a, others)
        work[lo, hi] = new_vals
        active[b] = False
        work[b, :] = -np.inf
        work[:, b] = -np.inf
        sizes[a] += sizes[b]
        rep[rep == b] = a
    return merges, rep, sorted(int(i) for i in np.flatnonzero(active))


def agglomerative_clustering(s: np.ndarray, n_clusters: int, linkage: str = "average") -> Clustering:
    """Merge singletons greedily by highest linkage similarity until n_clusters remain.

    Linkage between clusters: average = mean similarity over cross pairs,
    single = maximum, complete = minimum. Output ids follow ascending
    smallest-member order.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    _, rep, survivors = _merge_sequence(s, linkage, n_clusters)
    id_map = {r: i for i, r in enumerate(survivors)}
    labels = np.array([id_map[r] for r in rep])
    return Clustering(labels, n_clusters)


def agglomerative_merges(s: np.ndarray, linkage: str = "average") -> list[Merge]:
    """The full merge sequence down to a single cluster (dendrogram data)."""
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    merges, _, _ = _merge_sequence(s, linkage, 1)
    return merges


def make_agglomerative_solver(linkage: str = "average"):
    """Solver callable for select_cluster_count."""

    def solve(s: np.ndarray, m: int) -> tuple[Clustering, float]:
        clustering = agglomerative_clustering(s, m, linkage)
        return clustering, within_similarity(s, clustering, Normalization.PAIR_COUNT)

    return solve


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def write_clustering_csv(
    clustering: Clustering, node_labels: Sequence[str], path: str
) -> None:
    if len(node_labels) != clustering.n_nodes:
        raise ValueError("label count does not match clustering size")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_label", "cluster_id"])
        for label, cid in zip(node_labels, clustering.labels):
            writer.writerow([label, int(cid)])


def read_clustering_csv(path: str) -> tuple[tuple[str, ...], Clustering]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["node_label", "cluster_id"]:
            raise ValueError(f"{path}: not a clustering CSV")
        rows = [row for row in reader if row]
    labels = tuple(row[0] for row in rows)
    ids = np.array([int(row[1]) for row in rows])
    return labels, Clustering(ids, int(ids.max()) + 1)


def write_dendrogram_csv(merges: Sequence[Merge], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "cluster_a", "cluster_b", "linkage_value"])
        for m in merges:
            writer.writerow([m.step, m.cluster_a, m.cluster_b, repr(float(m.value))])
