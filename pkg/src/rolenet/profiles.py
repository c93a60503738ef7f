"""Per-cluster embedding profiles and qualitative role labels.

Clusters of a walk-count embedding are summarized along four reading
dimensions: connectivity (total embedding mass), funding balance
(outgoing vs ingoing mass), segment balance (per-layer shares of the
within-layer mass), and counterparty access (share of direct, order-1
links in the total mass). Labels discretize the scores; the thresholds
are package conventions, configurable and recorded in the JSON report.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .features import Embedding
from .objectives import Clustering

CONNECTIVITY_LABELS = ("Peripheral", "Mid-tier", "Systemic")
ACCESS_LABELS = ("Indirect", "Semi-direct", "Direct")
FUNDING_LABELS = ("Supplier", "Intermediation", "Consumer")
SEGMENT_LABELS = ("Segment specialism", "Cross-segment activity")


@dataclass(frozen=True)
class LabelThresholds:
    """Score cutoffs behind the qualitative labels.

    funding balances within +-balance_band read as intermediation;
    a layer share of at least specialism_share reads as segment
    specialism. Connectivity and access labels use population terciles,
    which need no threshold.
    """

    balance_band: float = 0.25
    specialism_share: float = 0.8


@dataclass(frozen=True)
class ClusterProfile:
    cluster_id: int
    size: int
    mean_embedding: np.ndarray
    connectivity: float
    funding_balance: float  # (out - in) / (out + in), in [-1, 1]
    layer_shares: dict[str, float]  # shares of within-layer mass, sum to 1 when any
    direct_share: float  # order-1 mass / total mass, in [0, 1]
    labels: dict[str, str] = field(default_factory=dict)

    @property
    def specialism_layer(self) -> str | None:
        if self.labels.get("segment", "").startswith(SEGMENT_LABELS[0]) and self.layer_shares:
            return max(self.layer_shares, key=self.layer_shares.get)
        return None


def profile_clusters(emb: Embedding, clustering: Clustering) -> list[ClusterProfile]:
    """Mean embedding and reading-dimension scores for every cluster."""
    if clustering.n_nodes != emb.n_nodes:
        raise ValueError("embedding and clustering disagree on node count")
    directions = np.array([f.direction == "out" for f in emb.features])
    single_layer = np.array([len(f.layers) == 1 for f in emb.features])
    order_one = np.array([len(f.layers) == 1 and f.order == (1,) for f in emb.features])
    layer_rows = {
        name: np.array([len(f.layers) == 1 and f.layers[0] == l for f in emb.features])
        for l, name in enumerate(emb.layer_names)
    }

    profiles = []
    for c in range(clustering.n_clusters):
        members = clustering.members(c)
        mean = emb.values[:, members].mean(axis=1)
        total = float(mean.sum())
        out_mass = float(mean[directions].sum())
        in_mass = float(mean[~directions].sum())
        balance = (out_mass - in_mass) / (out_mass + in_mass) if out_mass + in_mass > 0 else 0.0
        within_total = float(mean[single_layer].sum())
        shares = {
            name: (float(mean[rows].sum()) / within_total if within_total > 0 else 0.0)
            for name, rows in layer_rows.items()
        }
        direct = float(mean[order_one].sum()) / total if total > 0 else 0.0
        profiles.append(
            ClusterProfile(
                cluster_id=c,
                size=int(members.size),
                mean_embedding=mean,
                connectivity=total,
                funding_balance=balance,
                layer_shares=shares,
                direct_share=direct,
            )
        )
    return profiles


def _tercile(scores: np.ndarray, value: float, names: tuple[str, str, str]) -> str:
    low, high = np.quantile(scores, [1.0 / 3.0, 2.0 / 3.0])
    if value <= low:
        return names[0]
    if value >= high:
        return names[2]
    return names[1]


def label_profiles(
    profiles: list[ClusterProfile], thresholds: LabelThresholds = LabelThresholds()
) -> list[ClusterProfile]:
    """Attach qualitative labels; returns new profiles, inputs unchanged.

    Connectivity and counterparty access are labeled relative to the other
    clusters (population terciles); funding and segment balance against
    the fixed thresholds.
    """
    if len(profiles) < 2:
        raise ValueError("labeling needs at least 2 clusters")
    connectivity = np.array([p.connectivity for p in profiles])
    direct = np.array([p.direct_share for p in profiles])
    labeled = []
    for p in profiles:
        if abs(p.funding_balance) <= thresholds.balance_band:
            funding = "Intermediation"
        elif p.funding_balance > 0:
            funding = "Supplier"
        else:
            funding = "Consumer"
        max_share = max(p.layer_shares.values()) if p.layer_shares else 0.0
        if max_share >= thresholds.specialism_share:
            top = max(p.layer_shares, key=p.layer_shares.get)
            segment = f"{SEGMENT_LABELS[0]} ({top})"
        else:
            segment = SEGMENT_LABELS[1]
        labels = {
            "connectivity": _tercile(connectivity, p.connectivity, CONNECTIVITY_LABELS),
            "funding": funding,
            "segment": segment,
            "access": _tercile(direct, p.direct_share, ACCESS_LABELS),
        }
        labeled.append(
            ClusterProfile(
                cluster_id=p.cluster_id,
                size=p.size,
                mean_embedding=p.mean_embedding,
                connectivity=p.connectivity,
                funding_balance=p.funding_balance,
                layer_shares=dict(p.layer_shares),
                direct_share=p.direct_share,
                labels=labels,
            )
        )
    return labeled


def write_profiles_json(
    profiles: list[ClusterProfile],
    emb: Embedding,
    path: str,
    thresholds: LabelThresholds = LabelThresholds(),
) -> None:
    doc = {
        "thresholds": asdict(thresholds),
        "feature_names": emb.column_names(),
        "clusters": [
            {
                "id": p.cluster_id,
                "size": p.size,
                "scores": {
                    "connectivity": p.connectivity,
                    "funding_balance": p.funding_balance,
                    "layer_shares": p.layer_shares,
                    "direct_share": p.direct_share,
                },
                "labels": p.labels,
                "mean_embedding": [float(v) for v in p.mean_embedding],
            }
            for p in profiles
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_profile_bars_csv(profiles: list[ClusterProfile], emb: Embedding, path: str) -> None:
    """Long-form mean embeddings: one row per (cluster, feature)."""
    names = emb.column_names()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster", "feature_name", "mean_value"])
        for p in profiles:
            for name, value in zip(names, p.mean_embedding):
                writer.writerow([p.cluster_id, name, repr(float(value))])
