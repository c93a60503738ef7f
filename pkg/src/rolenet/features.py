"""Egonet walk-count embeddings for multi-layer directed graphs.

Each node is described by how many directed walks of length k = 1..K start
at it (outgoing) or end at it (ingoing), per layer, and optionally by
cross-layer walks that take k steps in one layer followed by k' steps in
another. "Walk" is meant literally: vertices and edges may repeat, which
is what repeated multiplication by the adjacency matrix counts.

Raw counts of successive orders are strongly serially correlated (every
length-k walk extends a length-(k-1) walk), so orders k >= 2 are stored as
elementwise ratios count_k / count_{k-1}: the average number of onward
continuations per shorter walk. 0/0 is defined as 0; count_{k-1} = 0 with
count_k > 0 is impossible by construction and treated as an internal error.
"""

from __future__ import annotations

from dataclasses import dataclass
import csv

import numpy as np

from .graph import MultiLayerGraph


@dataclass(frozen=True)
class FeatureSpec:
    """Describes one embedding row.

    direction is "in" or "out"; layers holds one layer index (within-layer
    walks) or an ordered pair (walks crossing from layers[0] into
    layers[1]); order holds the step counts per layer, matching layers in
    length.
    """

    direction: str
    layers: tuple[int, ...]
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.direction not in ("in", "out"):
            raise ValueError(f"direction must be 'in' or 'out', got {self.direction!r}")
        if len(self.layers) not in (1, 2) or len(self.order) != len(self.layers):
            raise ValueError("layers/order must have matching length 1 or 2")
        if len(self.layers) == 2 and self.layers[0] == self.layers[1]:
            raise ValueError("cross-layer feature needs two distinct layers")
        if any(k < 1 for k in self.order):
            raise ValueError("walk orders must be >= 1")

    @property
    def total_order(self) -> int:
        return sum(self.order)

    def column_name(self, layer_names: tuple[str, ...]) -> str:
        pattern = "->".join(layer_names[l] for l in self.layers)
        order = "-".join(str(k) for k in self.order)
        return f"{self.direction}_{pattern}_k{order}"


@dataclass(frozen=True, eq=False)
class Embedding:
    """A d x N feature matrix plus the description of each feature row."""

    features: tuple[FeatureSpec, ...]
    values: np.ndarray
    node_labels: tuple[str, ...]
    layer_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.features), len(self.node_labels)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.features)} features x {len(self.node_labels)} nodes"
            )
        if np.any(self.values < 0):
            raise ValueError("embedding entries must be nonnegative")
        self.values.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def n_features(self) -> int:
        return len(self.features)

    def column_names(self) -> list[str]:
        return [f.column_name(self.layer_names) for f in self.features]

    def vector(self, label: str) -> np.ndarray:
        return self.values[:, self.node_labels.index(label)]


def walk_counts(graph: MultiLayerGraph, layer: int, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Raw within-layer walk counts for orders 1..k_max.

    Returns (in_counts, out_counts), each of shape (k_max, N):
    in_counts[k-1, i] is the number of length-k walks ending at node i,
    out_counts[k-1, i] the number starting at i. Computed by repeatedly
    multiplying a vector of ones by the adjacency matrix, never by forming
    matrix powers.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    graph._check_layer(layer)
    a = graph.adjacency[layer]
    n = graph.n_nodes
    in_counts = np.empty((k_max, n))
    out_counts = np.empty((k_max, n))
    vin = np.ones(n)
    vout = np.ones(n)
    for k in range(k_max):
        vin = vin @ a
        vout = a @ vout
        in_counts[k] = vin
        out_counts[k] = vout
    return in_counts, out_counts


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Elementwise num/den with 0/0 := 0; num>0 with den=0 is a count bug."""
    bad = (den == 0) & (num != 0)
    if np.any(bad):
        raise AssertionError(
            "walk counting bug: found walks whose one-step-shorter prefix/suffix is missing"
        )
    return np.divide(num, den, out=np.zeros_like(num), where=den != 0)


def ratio_normalize(counts: np.ndarray) -> np.ndarray:
    """Replace orders k >= 2 of raw counts (K, N) by count_k / count_{k-1}."""
    out = counts.astype(float).copy()
    for k in range(1, counts.shape[0]):
        out[k] = _safe_ratio(counts[k], counts[k - 1])
    return out


def cross_layer_orders(k_max: int) -> list[tuple[int, int]]:
    """Step-count pairs (k, k') with k, k' >= 1 and k + k' <= k_max.

    Ordered by total length, then by the number of steps taken in the
    second layer: for k_max = 3 this yields (1,1), (2,1), (1,2).
    """
    if k_max < 2:
        return []
    return [
        (k, k2)
        for total in range(2, k_max + 1)
        for k2 in range(1, total)
        for k in (total - k2,)
    ]


def _cross_layer_tables(
    graph: MultiLayerGraph, layer_a: int, layer_b: int, k_max: int
) -> tuple[dict[tuple[int, int], np.ndarray], dict[tuple[int, int], np.ndarray]]:
    """Count vectors for every pattern (k steps in layer_a, k' in layer_b).

    Covers the full triangle k, k' >= 0, k + k' <= k_max, whose k = 0 and
    k' = 0 edges are the plain within-layer counts used as normalization
    denominators. in_tab[(k, k')][j] counts such walks ending at j,
    out_tab[(k, k')][i] those starting at i. Built by repeated
    vector-matrix products, never by matrix powers.
    """
    if layer_a == layer_b:
        raise ValueError("cross-layer counts need two distinct layers")
    if k_max < 2:
        raise ValueError("cross-layer walks need k_max >= 2")
    graph._check_layer(layer_a)
    graph._check_layer(layer_b)
    a = graph.adjacency[layer_a]
    b = graph.adjacency[layer_b]
    ones = np.ones(graph.n_nodes)

    out_tab: dict[tuple[int, int], np.ndarray] = {(0, 0): ones}
    in_tab: dict[tuple[int, int], np.ndarray] = {(0, 0): ones}
    for k2 in range(1, k_max + 1):
        # out: suffix walks entirely in layer_b; in: 1^T B^k'
        out_tab[(0, k2)] = b @ out_tab[(0, k2 - 1)]
        in_tab[(0, k2)] = in_tab[(0, k2 - 1)] @ b
    for k in range(1, k_max + 1):
        in_tab[(k, 0)] = in_tab[(k - 1, 0)] @ a
        for k2 in range(0, k_max - k + 1):
            out_tab[(k, k2)] = a @ out_tab[(k - 1, k2)]
            if k2 > 0:
                in_tab[(k, k2)] = in_tab[(k, k2 - 1)] @ b
    return in_tab, out_tab


def cross_layer_walk_counts(
    graph: MultiLayerGraph, layer_a: int, layer_b: int, k_max: int
) -> tuple[list[tuple[int, int]], np.ndarray, np.ndarray]:
    """Raw counts of walks taking k steps in layer_a then k' steps in layer_b.

    Returns (orders, in_counts, out_counts); row p of each count array
    corresponds to orders[p]. in_counts[p, j] counts such walks ending at
    node j, out_counts[p, i] those starting at i.
    """
    in_tab, out_tab = _cross_layer_tables(graph, layer_a, layer_b, k_max)
    orders = cross_layer_orders(k_max)
    in_counts = np.array([in_tab[o] for o in orders])
    out_counts = np.array([out_tab[o] for o in orders])
    return orders, in_counts, out_counts


def cross_layer_features(
    graph: MultiLayerGraph, layer_a: int, layer_b: int, k_max: int
) -> tuple[list[tuple[int, int]], np.ndarray, np.ndarray]:
    """Normalized cross-layer counts.

    Each (k, k') count is divided by the count of the same walk pattern
    with one step removed: the final step for outgoing features (so the
    denominator of (k, k') is the (k, k'-1) pattern, with (k, 0) meaning
    the within-layer count A^k 1) and the first step for ingoing features
    (denominator (k-1, k'), with (0, k') meaning 1^T B^k'). 0/0 := 0 as
    for within-layer ratios.
    """
    in_tab, out_tab = _cross_layer_tables(graph, layer_a, layer_b, k_max)
    orders = cross_layer_orders(k_max)
    in_norm = np.empty((len(orders), graph.n_nodes))
    out_norm = np.empty((len(orders), graph.n_nodes))
    for p, (k, k2) in enumerate(orders):
        out_norm[p] = _safe_ratio(out_tab[(k, k2)], out_tab[(k, k2 - 1)])
        in_norm[p] = _safe_ratio(in_tab[(k, k2)], in_tab[(k - 1, k2)])
    return orders, in_norm, out_norm


def build_embedding(
    graph: MultiLayerGraph,
    k_max: int = 3,
    include_cross: bool = False,
    log_transform: bool = False,
) -> Embedding:
    """Assemble the full embedding matrix.

    Row order: for each layer l ascending, the ingoing block (k = 1..K)
    then the outgoing block; then, if include_cross, for each ordered layer
    pair (l, l') in lexicographic order, the ingoing then outgoing
    cross-layer blocks in cross_layer_orders() order.

    log_transform applies log1p to all values; off by default, exploration
    only.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    features: list[FeatureSpec] = []
    blocks: list[np.ndarray] = []
    for l in range(graph.n_layers):
        in_raw, out_raw = walk_counts(graph, l, k_max)
        for direction, block in (("in", ratio_normalize(in_raw)), ("out", ratio_normalize(out_raw))):
            features.extend(
                FeatureSpec(direction, (l,), (k,)) for k in range(1, k_max + 1)
            )
            blocks.append(block)
    if include_cross and graph.n_layers > 1 and k_max >= 2:
        for la in range(graph.n_layers):
            for lb in range(graph.n_layers):
                if la == lb:
                    continue
                orders, in_norm, out_norm = cross_layer_features(graph, la, lb, k_max)
                for direction, block in (("in", in_norm), ("out", out_norm)):
                    features.extend(
                        FeatureSpec(direction, (la, lb), o) for o in orders
                    )
                    blocks.append(block)
    values = np.vstack(blocks)
    if log_transform:
        values = np.log1p(values)
    return Embedding(tuple(features), values, graph.node_labels, graph.layer_names)


def write_embedding_csv(emb: Embedding, path: str) -> None:
    """Write the embedding with one row per node: label, then one column per feature."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_label", *emb.column_names()])
        for i, label in enumerate(emb.node_labels):
            writer.writerow([label, *(repr(float(v)) for v in emb.values[:, i])])


def _parse_column_name(name: str, layer_lookup: dict[str, int]) -> FeatureSpec:
    direction, rest = name.split("_", 1)
    pattern, _, order = rest.rpartition("_k")
    layers = tuple(layer_lookup[p] for p in pattern.split("->"))
    return FeatureSpec(direction, layers, tuple(int(k) for k in order.split("-")))


def read_embedding_csv(path: str) -> Embedding:
    """Read an embedding written by write_embedding_csv."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "node_label":
            raise ValueError(f"{path}: not an embedding CSV")
        rows = [row for row in reader if row]
    # Layer names are recovered from the column patterns, in first-appearance
    # order of the within-layer blocks.
    layer_lookup: dict[str, int] = {}
    for col in header[1:]:
        pattern = col.split("_", 1)[1].rpartition("_k")[0]
        for part in pattern.split("->"):
            if part not in layer_lookup:
                layer_lookup[part] = len(layer_lookup)
    features = tuple(_parse_column_name(col, layer_lookup) for col in header[1:])
    labels = tuple(row[0] for row in rows)
    values = np.array([[float(v) for v in row[1:]] for row in rows]).T
    layer_names = tuple(sorted(layer_lookup, key=layer_lookup.get))
    return Embedding(features, values, labels, layer_names)
