"""Pairwise distances, the distance-to-similarity conversion, and symmetrization.

Similarity between nodes i and j is defined by flipping their L1 embedding
distance: S_ij = D_max - D_ij, where D_max is the largest off-diagonal
distance. The most distant pair therefore gets similarity 0 and identical
embeddings get D_max. The diagonal is forced to 0 so that self-similarity
never enters any cluster volume.
"""

from __future__ import annotations

import csv
import struct
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform


class SimilarityResult(NamedTuple):
    values: np.ndarray
    degenerate: bool  # all embeddings identical: S is all zero


def l1_distance_matrix(values: np.ndarray) -> np.ndarray:
    """Pairwise L1 distances between columns of a (d, N) feature matrix.

    Each pair is computed once, so the result is exactly symmetric.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError("expected a (d, N) matrix with d >= 1")
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite feature values")
    if values.shape[1] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(values.T, metric="cityblock"))


def similarity_from_distances(distances: np.ndarray) -> SimilarityResult:
    """Convert a distance matrix to similarities via S = D_max - D.

    D_max is the maximum off-diagonal distance; the diagonal of S is set
    to 0 regardless. If all off-diagonal distances are 0 (every embedding
    identical), the all-zero matrix is returned with the degenerate flag
    set.
    """
    d = np.asarray(distances, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("expected a square distance matrix")
    if not np.all(np.isfinite(d)):
        raise ValueError("non-finite distances")
    n = d.shape[0]
    off = ~np.eye(n, dtype=bool)
    d_max = float(d[off].max()) if n > 1 else 0.0
    if d_max == 0.0:
        return SimilarityResult(np.zeros_like(d), True)
    s = d_max - d
    np.fill_diagonal(s, 0.0)
    return SimilarityResult(s, False)


def symmetrize(proximity: np.ndarray, mode: str = "average") -> np.ndarray:
    """Symmetrize an asymmetric proximity matrix.

    mode: "average" -> (P_ij + P_ji) / 2; "min" -> min(P_ij, P_ji);
    "max" -> max(P_ij, P_ji).
    """
    p = np.asarray(proximity, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(p)):
        raise ValueError("non-finite proximities")
    if np.any(np.diag(p) != 0):
        raise ValueError("expected a zero diagonal")
    if mode == "average":
        return (p + p.T) / 2.0
    if mode == "min":
        return np.minimum(p, p.T)
    if mode == "max":
        return np.maximum(p, p.T)
    raise ValueError(f"unknown mode {mode!r}; expected average, min or max")


def check_similarity(s: np.ndarray) -> np.ndarray:
    """Validate a similarity matrix: square, symmetric, nonnegative, zero diagonal."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("similarity matrix must be square")
    if not np.all(np.isfinite(s)):
        raise ValueError("non-finite similarities")
    if not np.array_equal(s, s.T):
        raise ValueError("similarity matrix must be symmetric")
    if np.any(np.diag(s) != 0):
        raise ValueError("similarity diagonal must be zero")
    if np.any(s < 0):
        raise ValueError("similarities must be nonnegative")
    return s


# ---------------------------------------------------------------------------
# Matrix file formats: labeled dense CSV, and a flat binary form for cheap
# round-tripping between pipeline stages (8-byte little-endian node count,
# then N*N row-major little-endian float64).
# ---------------------------------------------------------------------------

def write_matrix_csv(m: np.ndarray, labels: tuple[str, ...] | list[str], path: str) -> None:
    if m.shape != (len(labels), len(labels)):
        raise ValueError("matrix shape does not match label count")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_label", *labels])
        for i, label in enumerate(labels):
            writer.writerow([label, *(repr(float(v)) for v in m[i])])


def read_matrix_csv(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels = tuple(header[1:])
        rows = [row for row in reader if row]
    if len(rows) != len(labels):
        raise ValueError(f"{path}: expected {len(labels)} rows, found {len(rows)}")
    m = np.array([[float(v) for v in row[1:]] for row in rows])
    return labels, m


def write_matrix_bin(m: np.ndarray, path: str) -> None:
    m = np.ascontiguousarray(m, dtype="<f8")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", m.shape[0]))
        fh.write(m.tobytes())


def read_matrix_bin(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"{path}: expected {n * n} values, found {data.size}")
    return data.reshape(n, n).astype(float)
