"""Cluster evaluation scores, exhaustive optimization, and cluster-count selection.

The central quantity is the normalized within-cluster similarity: the sum
of similarities inside each cluster, divided per cluster by a normalizer
and summed over clusters. Its complement, the normalized between-cluster
similarity, sums each cluster's outgoing similarity instead. Under the
volume normalizer the two are tied by an exact identity: their sum equals
the number of clusters whenever every cluster has positive volume, because
each cluster's internal and outgoing similarity add up to its volume.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np


class Normalization(Enum):
    """Per-cluster divisor for the similarity sums.

    SIZE divides by the number of members, VOLUME by the members' total
    similarity to all other nodes, PAIR_COUNT by the number of ordered
    member pairs |C|^2 - |C| (the divisor under which greedy average-link
    merging climbs the within score).
    """

    SIZE = "size"
    VOLUME = "volume"
    PAIR_COUNT = "pair_count"


@dataclass(frozen=True, eq=False)
class Clustering:
    """A hard partition: labels[i] is the cluster of node i, ids dense in [0, M)."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-d array")
        used = np.unique(labels)
        if used[0] < 0 or used[-1] >= self.n_clusters or used.size != self.n_clusters:
            raise ValueError(
                f"labels must use every id in [0, {self.n_clusters}); found {used.tolist()}"
            )
        labels.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.labels.size)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)


def relabel_dense(labels: Sequence[int] | np.ndarray) -> Clustering:
    """Build a Clustering from arbitrary labels, remapped to dense ids.

    Ids are assigned in order of first appearance, so the result is
    invariant to the original label values.
    """
    labels = np.asarray(labels)
    _, dense = np.unique(labels, return_inverse=True)
    order = {}
    remapped = np.empty(labels.size, dtype=int)
    for i, v in enumerate(dense):
        if v not in order:
            order[v] = len(order)
        remapped[i] = order[v]
    return Clustering(remapped, len(order))


def _check_inputs(s: np.ndarray, clustering: Clustering) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (clustering.n_nodes, clustering.n_nodes):
        raise ValueError(
            f"similarity shape {s.shape} does not match {clustering.n_nodes} labels"
        )
    return s


def cluster_volumes(s: np.ndarray, clustering: Clustering) -> np.ndarray:
    """Per-cluster volume: sum over members of their total similarity."""
    s = _check_inputs(s, clustering)
    degrees = s.sum(axis=1)
    return np.bincount(clustering.labels, weights=degrees, minlength=clustering.n_clusters)


def _normalizers(s: np.ndarray, clustering: Clustering, norm: Normalization) -> np.ndarray:
    sizes = clustering.sizes()
    if norm is Normalization.SIZE:
        return sizes.astype(float)
    if norm is Normalization.PAIR_COUNT:
        return (sizes * sizes - sizes).astype(float)
    return cluster_volumes(s, clustering)


def _within_sums(s: np.ndarray, clustering: Clustering) -> np.ndarray:
    """Sum of S_ij over ordered same-cluster pairs, per cluster (zero diagonal assumed)."""
    onehot = np.zeros((clustering.n_nodes, clustering.n_clusters))
    onehot[np.arange(clustering.n_nodes), clustering.labels] = 1.0
    to_cluster = s @ onehot
    per_node = to_cluster[np.arange(clustering.n_nodes), clustering.labels]
    return np.bincount(clustering.labels, weights=per_node, minlength=clustering.n_clusters)


def within_similarity(
    s: np.ndarray, clustering: Clustering, norm: Normalization = Normalization.VOLUME
) -> float:
    """Normalized within-cluster similarity.

    Clusters whose normalizer is zero contribute 0; with a nonnegative S a
    zero volume forces a zero internal sum anyway.
    """
    s = _check_inputs(s, clustering)
    within = _within_sums(s, clustering)
    denom = _normalizers(s, clustering, norm)
    ok = denom > 0
    return float(np.sum(within[ok] / denom[ok]))


def between_similarity(
    s: np.ndarray, clustering: Clustering, norm: Normalization = Normalization.VOLUME
) -> float:
    """Normalized between-cluster similarity (each cluster's outgoing sum)."""
    s = _check_inputs(s, clustering)
    volumes = cluster_volumes(s, clustering)
    cut = volumes - _within_sums(s, clustering)
    denom = _normalizers(s, clustering, norm)
    ok = denom > 0
    return float(np.sum(cut[ok] / denom[ok]))


# ---------------------------------------------------------------------------
# Exhaustive search. Partitions are enumerated as restricted growth strings
# (cluster ids in order of first appearance), which is also the canonical,
# lexicographically ordered form used for tie-breaking.
# ---------------------------------------------------------------------------

_MAX_EXHAUSTIVE_NODES = 12
_MAX_EXHAUSTIVE_CLUSTERS = 4


def partitions_into(n_nodes: int, n_clusters: int) -> Iterator[np.ndarray]:
    """All partitions of n_nodes items into exactly n_clusters nonempty blocks.

    Yields canonical label arrays in lexicographic order.
    """
    labels = np.zeros(n_nodes, dtype=int)

    def rec(i: int, used: int) -> Iterator[np.ndarray]:
        if i == n_nodes:
            if used == n_clusters:
                yield labels.copy()
            return
        # Not enough positions left to introduce the missing ids: prune.
        if n_clusters - used > n_nodes - i:
            return
        for c in range(min(used + 1, n_clusters)):
            labels[i] = c
            yield from rec(i + 1, max(used, c + 1))

    return rec(1, 1) if n_nodes else iter(())


def best_partition_exhaustive(
    s: np.ndarray, n_clusters: int, norm: Normalization = Normalization.VOLUME
) -> tuple[Clustering, float]:
    """Exact maximizer of the within score over all partitions into n_clusters blocks.

    Only feasible for small problems; guarded at 12 nodes / 4 clusters.
    Ties resolve to the lexicographically smallest label array.
    """
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    if n > _MAX_EXHAUSTIVE_NODES:
        raise ValueError(f"exhaustive search capped at {_MAX_EXHAUSTIVE_NODES} nodes, got {n}")
    if n_clusters > _MAX_EXHAUSTIVE_CLUSTERS:
        raise ValueError(
            f"exhaustive search capped at {_MAX_EXHAUSTIVE_CLUSTERS} clusters, got {n_clusters}"
        )
    if n_clusters > n:
        raise ValueError("more clusters than nodes")
    best_labels: np.ndarray | None = None
    best_score = -np.inf
    for labels in partitions_into(n, n_clusters):
        score = within_similarity(s, Clustering(labels, n_clusters), norm)
        if score > best_score:
            best_score = score
            best_labels = labels
    assert best_labels is not None
    return Clustering(best_labels, n_clusters), float(best_score)


# ---------------------------------------------------------------------------
# Cluster-count selection: grid search over M, maximizing the within score.
# ---------------------------------------------------------------------------

Solver = Callable[[np.ndarray, int], tuple[Clustering, float]]


@dataclass(frozen=True)
class SelectionResult:
    best_m: int
    clustering: Clustering
    curve: tuple[tuple[int, float], ...]  # (M, within score) per grid point
    degenerate: bool  # all-zero S: every partition scores 0


def select_cluster_count(
    s: np.ndarray,
    m_values: Iterable[int],
    solver: Solver,
    norm: Normalization = Normalization.VOLUME,
) -> SelectionResult:
    """Run the solver for every candidate cluster count and keep the best.

    The solver is expected to return its best clustering for the given
    count (handling its own restarts); the score used to compare counts is
    recomputed here under ``norm`` so the curve is consistent across
    solvers. Ties prefer the smallest count.

    An all-zero S scores 0 for every partition, so no solver is run: the
    result carries the degenerate flag, a flat zero curve, and an
    arbitrary (deterministic) clustering at the smallest count.
    """
    s = np.asarray(s, dtype=float)
    m_list = sorted(set(int(m) for m in m_values))
    if not m_list:
        raise ValueError("m_values must be nonempty")
    if m_list[0] < 2 or m_list[-1] >= s.shape[0]:
        raise ValueError(f"cluster counts must lie in [2, {s.shape[0] - 1}], got {m_list}")
    if not np.any(s):
        m = m_list[0]
        fallback = Clustering(np.minimum(np.arange(s.shape[0]), m - 1), m)
        return SelectionResult(m, fallback, tuple((m, 0.0) for m in m_list), True)
    curve: list[tuple[int, float]] = []
    best: tuple[int, Clustering, float] | None = None
    for m in m_list:
        try:
            clustering, _ = solver(s, m)
        except Exception as exc:
            raise RuntimeError(f"solver failed at M={m}: {exc}") from exc
        score = within_similarity(s, clustering, norm)
        curve.append((m, score))
        if best is None or score > best[2]:
            best = (m, clustering, score)
    assert best is not None
    return SelectionResult(best[0], best[1], tuple(curve), False)


def write_curve_csv(curve: Sequence[tuple[int, float]], path: str) -> None:
    """Write the score-per-count curve as CSV with header ``M,phi_within``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["M", "phi_within"])
        for m, score in curve:
            writer.writerow([m, repr(float(score))])
