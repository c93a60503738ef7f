"""Multi-layer directed graph data model and edge-list ingestion.

A multi-layer graph holds one binary directed adjacency matrix per layer
over a shared node set. Edges are binarized on ingestion: the matrices
record whether at least one edge (transaction, link, ...) was observed,
not how many. Optional edge weights are parsed and kept around for
inspection but are ignored by everything downstream.

Node identity is label-based at the boundary (CSV files carry labels) and
index-based internally: indices are assigned densely by first appearance
in the input stream, and the node set is the union across all layers.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Dense adjacency matrices; matrix products dominate the cost downstream,
# so the model is intentionally capped at a size where N x N dense math
# stays cheap.
MAX_DENSE_NODES = 5000


class EdgeListError(ValueError):
    """Malformed or empty edge-list input."""


@dataclass(frozen=True, eq=False)
class MultiLayerGraph:
    """Immutable multi-layer directed graph with binary adjacency per layer.

    Attributes
    ----------
    node_labels : tuple of str
        External identifiers; position is the node index.
    layer_names : tuple of str
        Layer identifiers; position is the layer index.
    adjacency : tuple of ndarray
        One (N, N) float64 0/1 matrix per layer, zero diagonal.
    edge_weights : tuple of dict
        Per layer, accumulated weight for each (src, dst) index pair.
        Empty dicts when the input carried no weights. Not used by any
        computation in this package.
    """

    node_labels: tuple[str, ...]
    layer_names: tuple[str, ...]
    adjacency: tuple[np.ndarray, ...]
    edge_weights: tuple[dict[tuple[int, int], float], ...] = field(repr=False, default=())

    def __post_init__(self) -> None:
        n = len(self.node_labels)
        if len(set(self.node_labels)) != n:
            raise EdgeListError("node labels must be unique")
        if len(set(self.layer_names)) != len(self.layer_names):
            raise EdgeListError("layer names must be unique")
        if n > MAX_DENSE_NODES:
            raise EdgeListError(
                f"{n} nodes exceeds the dense-representation limit of {MAX_DENSE_NODES}"
            )
        if len(self.adjacency) != len(self.layer_names):
            raise EdgeListError("one adjacency matrix per layer required")
        for a in self.adjacency:
            if a.shape != (n, n):
                raise EdgeListError(f"adjacency shape {a.shape} does not match {n} nodes")
            if np.any(np.diag(a) != 0):
                raise EdgeListError("self-loops are not allowed")
            if not np.all((a == 0) | (a == 1)):
                raise EdgeListError("adjacency entries must be 0 or 1")
            a.setflags(write=False)
        if not self.edge_weights:
            object.__setattr__(
                self, "edge_weights", tuple({} for _ in self.layer_names)
            )

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def n_layers(self) -> int:
        return len(self.layer_names)

    def layer_index(self, name: str) -> int:
        try:
            return self.layer_names.index(name)
        except ValueError:
            raise KeyError(f"unknown layer {name!r}") from None

    def node_index(self, label: str) -> int:
        try:
            return self.node_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown node {label!r}") from None

    def _check_layer(self, layer: int) -> None:
        if not 0 <= layer < self.n_layers:
            raise IndexError(f"layer {layer} out of range [0, {self.n_layers})")

    def out_degrees(self, layer: int) -> np.ndarray:
        """Number of outgoing edges per node in the given layer."""
        self._check_layer(layer)
        return self.adjacency[layer].sum(axis=1)

    def in_degrees(self, layer: int) -> np.ndarray:
        """Number of incoming edges per node in the given layer."""
        self._check_layer(layer)
        return self.adjacency[layer].T.sum(axis=1)

    def n_edges(self, layer: int) -> int:
        self._check_layer(layer)
        return int(self.adjacency[layer].sum())

    def edges(self) -> list[tuple[str, str, str]]:
        """All edges as (src_label, dst_label, layer_name), canonical order.

        Canonical order sorts by (layer name, src label, dst label), which
        is what the CSV export emits.
        """
        out: list[tuple[str, str, str]] = []
        for l, name in enumerate(self.layer_names):
            src, dst = np.nonzero(self.adjacency[l])
            for i, j in zip(src, dst):
                out.append((self.node_labels[i], self.node_labels[j], name))
        out.sort(key=lambda e: (e[2], e[0], e[1]))
        return out


def from_edges(
    rows: Iterable[Sequence[object]],
    layer_order: Sequence[str] | None = None,
) -> MultiLayerGraph:
    """Build a graph from (src, dst, layer[, weight]) rows.

    Node indices are assigned by first appearance (src before dst within a
    row); the node set is the union over all layers. Duplicate edges
    collapse to a single entry; self-loops are dropped with a warning that
    counts them. Layers appear in first-appearance order unless
    ``layer_order`` pins an explicit ordering.
    """
    labels: list[str] = []
    label_idx: dict[str, int] = {}
    layer_names: list[str] = []
    layer_idx: dict[str, int] = {}
    if layer_order is not None:
        for name in layer_order:
            layer_idx[str(name)] = len(layer_names)
            layer_names.append(str(name))

    edges: list[tuple[int, int, int, float | None]] = []
    n_rows = 0
    n_self_loops = 0
    for row_no, row in enumerate(rows, start=1):
        n_rows += 1
        if not isinstance(row, Sequence) or len(row) not in (3, 4):
            raise EdgeListError(f"row {row_no}: expected (src, dst, layer[, weight]), got {row!r}")
        src, dst, layer = (str(row[0]).strip(), str(row[1]).strip(), str(row[2]).strip())
        if not src or not dst or not layer:
            raise EdgeListError(f"row {row_no}: empty src/dst/layer field")
        weight: float | None = None
        if len(row) == 4 and str(row[3]).strip() != "":
            try:
                weight = float(row[3])
            except (TypeError, ValueError):
                raise EdgeListError(f"row {row_no}: bad weight {row[3]!r}") from None
        if layer not in layer_idx:
            if layer_order is not None:
                raise EdgeListError(f"row {row_no}: layer {layer!r} not in {list(layer_order)}")
            layer_idx[layer] = len(layer_names)
            layer_names.append(layer)
        for lab in (src, dst):
            if lab not in label_idx:
                label_idx[lab] = len(labels)
                labels.append(lab)
        i, j = label_idx[src], label_idx[dst]
        if i == j:
            n_self_loops += 1
            continue
        edges.append((layer_idx[layer], i, j, weight))

    if n_rows == 0:
        raise EdgeListError("empty edge list")
    if n_self_loops:
        warnings.warn(f"dropped {n_self_loops} self-loop(s)", stacklevel=2)

    n = len(labels)
    adjacency = tuple(np.zeros((n, n)) for _ in layer_names)
    weights: tuple[dict[tuple[int, int], float], ...] = tuple({} for _ in layer_names)
    for l, i, j, w in edges:
        adjacency[l][i, j] = 1.0
        if w is not None:
            weights[l][(i, j)] = weights[l].get((i, j), 0.0) + w
    return MultiLayerGraph(tuple(labels), tuple(layer_names), adjacency, weights)


def read_edge_csv(path: str, layer_order: Sequence[str] | None = None) -> MultiLayerGraph:
    """Read an edge list CSV with header ``src,dst,layer[,weight]``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EdgeListError(f"{path}: empty file") from None
        header = [h.strip().lower() for h in header]
        if header[:3] != ["src", "dst", "layer"]:
            raise EdgeListError(f"{path}: expected header src,dst,layer[,weight], got {header}")
        rows = [row for row in reader if row and any(f.strip() for f in row)]
    if not rows:
        raise EdgeListError(f"{path}: no edges")
    return from_edges(rows, layer_order=layer_order)


def write_edge_csv(graph: MultiLayerGraph, path: str) -> None:
    """Write the canonical edge list: ``src,dst,layer`` sorted by (layer, src, dst).

    Weights are not re-emitted; the canonical form is the binarized graph.
    Isolated nodes (no edges in any layer) are not representable in this
    format and are lost on a round trip.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "layer"])
        for src, dst, layer in graph.edges():
            writer.writerow([src, dst, layer])
