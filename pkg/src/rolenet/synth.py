"""Synthetic multi-layer networks with planted roles.

Each layer is a directed stochastic block model: the probability of an
edge from node i to node j depends only on (role of i, role of j, layer).
The planted role assignment is returned alongside the graph so recovered
clusterings can be scored against it.

The bundled presets are calibrated so the planted roles are recoverable
from depth-3 walk embeddings; their sizes and probabilities are package
conventions, useful as test fixtures and demo inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graph import MultiLayerGraph


@dataclass(frozen=True)
class RoleTemplate:
    """One planted role: its size and outgoing link probabilities.

    out_probs[layer_name][target_role_name] is the probability of a
    directed edge from a node of this role to each node of the target role
    in that layer; omitted entries mean probability 0.
    """

    name: str
    size: int
    out_probs: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"role {self.name!r}: size must be >= 1")
        for layer, targets in self.out_probs.items():
            for target, p in targets.items():
                if not 0.0 <= p <= 1.0:
                    raise ValueError(
                        f"role {self.name!r}: p({layer}, ->{target}) = {p} outside [0, 1]"
                    )


@dataclass(frozen=True)
class SynthSpec:
    roles: tuple[RoleTemplate, ...]
    layers: tuple[str, ...]
    seed: int

    def __post_init__(self) -> None:
        if len(self.roles) < 2:
            raise ValueError("need at least 2 roles")
        names = [r.name for r in self.roles]
        if len(set(names)) != len(names):
            raise ValueError("role names must be unique")
        if not self.layers or len(set(self.layers)) != len(self.layers):
            raise ValueError("layer names must be nonempty and unique")
        for role in self.roles:
            for layer, targets in role.out_probs.items():
                if layer not in self.layers:
                    raise ValueError(f"role {role.name!r} references unknown layer {layer!r}")
                for target in targets:
                    if target not in names:
                        raise ValueError(f"role {role.name!r} references unknown role {target!r}")

    @property
    def n_nodes(self) -> int:
        return sum(r.size for r in self.roles)

    def role_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.roles)


def _block_probabilities(spec: SynthSpec, layer: str) -> np.ndarray:
    names = spec.role_names()
    p = np.zeros((len(names), len(names)))
    for i, role in enumerate(spec.roles):
        targets = role.out_probs.get(layer, {})
        for target, prob in targets.items():
            p[i, names.index(target)] = prob
    return p


def generate(spec: SynthSpec) -> tuple[MultiLayerGraph, np.ndarray]:
    """Sample a graph from the spec. Returns (graph, planted role ids).

    Deterministic given spec.seed; each layer draws from its own stream
    derived from the seed, so layers could be sampled in parallel without
    changing the result.
    """
    n = spec.n_nodes
    planted = np.repeat(np.arange(len(spec.roles)), [r.size for r in spec.roles])
    width = max(3, len(str(n - 1)))
    labels = tuple(f"n{i:0{width}d}" for i in range(n))

    streams = np.random.SeedSequence(spec.seed).spawn(len(spec.layers))
    adjacency = []
    for layer, stream in zip(spec.layers, streams):
        rng = np.random.default_rng(stream)
        block_p = _block_probabilities(spec, layer)
        p = block_p[np.ix_(planted, planted)]
        a = (rng.random((n, n)) < p).astype(float)
        np.fill_diagonal(a, 0.0)
        adjacency.append(a)
    graph = MultiLayerGraph(labels, spec.layers, tuple(adjacency))
    return graph, planted


def adjusted_rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Chance-corrected agreement between two partitions, in [-1, 1].

    1.0 for identical partitions (including the degenerate case where the
    chance correction is undefined), about 0 for independent ones.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("label arrays must be 1-d and of equal length")
    n = a.size
    if n < 2:
        return 1.0
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    cont = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(cont, (ia, ib), 1)

    def comb2(x: np.ndarray) -> np.ndarray:
        return x * (x - 1) / 2.0

    sum_cells = comb2(cont).sum()
    sum_rows = comb2(cont.sum(axis=1)).sum()
    sum_cols = comb2(cont.sum(axis=0)).sum()
    expected = sum_rows * sum_cols / comb2(np.int64(n))
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _core_periphery_roles(p_core: float, p_tier: float, p_periph: float) -> tuple[RoleTemplate, ...]:
    return (
        RoleTemplate("core", 10, {"interbank": {"core": p_core, "tier1": p_tier}}),
        RoleTemplate("tier1", 20, {"interbank": {"core": p_tier, "receiver": p_periph}}),
        RoleTemplate("sender", 20, {"interbank": {"tier1": p_periph}}),
        RoleTemplate("receiver", 20, {}),
    )


def _six_role_roles() -> tuple[RoleTemplate, ...]:
    # Two-layer money-market style structure: a systemic core intermediating
    # both segments, three secured mid-tiers with different peer structure
    # and unsecured exposure, a systemic bridge active in both segments, and
    # peripheral unsecured cash suppliers lending to core and bridge.
    return (
        RoleTemplate(
            "core-intermediary",
            25,
            {
                "secured": {
                    "core-intermediary": 0.7,
                    "secured-mid-indirect": 0.35,
                    "cross-mid": 0.3,
                    "secured-mid-direct": 0.3,
                    "bridge": 0.5,
                },
                "unsecured": {"core-intermediary": 0.2, "cross-mid": 0.12},
            },
        ),
        RoleTemplate(
            "secured-mid-indirect",
            40,
            {"secured": {"core-intermediary": 0.35}},
        ),
        RoleTemplate(
            "cross-mid",
            35,
            {
                "secured": {"core-intermediary": 0.3},
                "unsecured": {"core-intermediary": 0.12, "bridge": 0.1},
            },
        ),
        RoleTemplate(
            "secured-mid-direct",
            35,
            {
                "secured": {
                    "core-intermediary": 0.3,
                    "secured-mid-direct": 0.25,
                }
            },
        ),
        RoleTemplate(
            "bridge",
            25,
            {
                "secured": {"core-intermediary": 0.5, "bridge": 0.45},
                "unsecured": {"core-intermediary": 0.3, "bridge": 0.2},
            },
        ),
        RoleTemplate(
            "unsecured-supplier",
            40,
            {"unsecured": {"core-intermediary": 0.25, "bridge": 0.25}},
        ),
    )


PRESETS = ("core-periphery", "core-periphery-noiseless", "six-role")


def preset(name: str, seed: int = 0) -> SynthSpec:
    """A bundled SynthSpec: 'core-periphery', 'core-periphery-noiseless' or 'six-role'."""
    if name == "core-periphery":
        return SynthSpec(_core_periphery_roles(0.8, 0.5, 0.3), ("interbank",), seed)
    if name == "core-periphery-noiseless":
        return SynthSpec(_core_periphery_roles(1.0, 1.0, 1.0), ("interbank",), seed)
    if name == "six-role":
        return SynthSpec(_six_role_roles(), ("secured", "unsecured"), seed)
    raise ValueError(f"unknown preset {name!r}; available: {PRESETS}")


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def spec_to_json(spec: SynthSpec, path: str) -> None:
    doc = {
        "seed": spec.seed,
        "layers": list(spec.layers),
        "roles": [
            {
                "name": r.name,
                "size": r.size,
                "out_probs": {l: dict(t) for l, t in r.out_probs.items()},
            }
            for r in spec.roles
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def spec_from_json(path: str) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    roles = tuple(
        RoleTemplate(r["name"], int(r["size"]), r.get("out_probs", {}))
        for r in doc["roles"]
    )
    return SynthSpec(roles, tuple(doc["layers"]), int(doc.get("seed", 0)))


def write_planted_csv(
    node_labels: Sequence[str], planted: np.ndarray, role_names: Sequence[str], path: str
) -> None:
    if len(node_labels) != len(planted):
        raise ValueError("label/planted length mismatch")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_label", "role_id", "role_name"])
        for label, rid in zip(node_labels, planted):
            writer.writerow([label, int(rid), role_names[int(rid)]])


def read_planted_csv(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["node_label", "role_id"]:
            raise ValueError(f"{path}: not a planted-roles CSV")
        rows = [row for row in reader if row]
    labels = tuple(row[0] for row in rows)
    roles = np.array([int(row[1]) for row in rows])
    return labels, roles
