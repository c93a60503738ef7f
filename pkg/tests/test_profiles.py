from __future__ import annotations

import json

import numpy as np
import pytest

from rolenet import (
    Clustering,
    LabelThresholds,
    build_embedding,
    from_edges,
    label_profiles,
    profile_clusters,
)
from rolenet.features import Embedding, FeatureSpec
from rolenet.profiles import write_profile_bars_csv, write_profiles_json


def manual_embedding(values, layer_names=("sec", "unsec")):
    """(in_k1, out_k1) per layer from explicit rows for label testing."""
    features = []
    for l in range(len(layer_names)):
        features.append(FeatureSpec("in", (l,), (1,)))
        features.append(FeatureSpec("out", (l,), (1,)))
    n = values.shape[1]
    return Embedding(
        tuple(features), values, tuple(f"n{i}" for i in range(n)), tuple(layer_names)
    )


def test_pure_supplier_balance():
    # two nodes with only outgoing sec links, two with only incoming
    values = np.array(
        [
            [0.0, 0.0, 3.0, 3.0],  # in_sec
            [3.0, 3.0, 0.0, 0.0],  # out_sec
            [0.0, 0.0, 0.0, 0.0],  # in_unsec
            [0.0, 0.0, 0.0, 0.0],  # out_unsec
        ]
    )
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.array([0, 0, 1, 1]), 2))
    assert profiles[0].funding_balance == pytest.approx(1.0)
    assert profiles[1].funding_balance == pytest.approx(-1.0)
    labeled = label_profiles(profiles)
    assert labeled[0].labels["funding"] == "Supplier"
    assert labeled[1].labels["funding"] == "Consumer"


def test_balanced_cluster_is_intermediation():
    values = np.array([[2.0, 2.0], [2.0, 2.0], [0.0, 1.0], [0.0, 1.0]])
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.array([0, 1]), 2))
    assert profiles[0].funding_balance == 0.0
    assert label_profiles(profiles)[0].labels["funding"] == "Intermediation"


def test_single_layer_share_is_specialism():
    values = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 2.0], [0.0, 2.0]])
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.array([0, 1]), 2))
    assert profiles[0].layer_shares == {"sec": 1.0, "unsec": 0.0}
    labeled = label_profiles(profiles)
    assert labeled[0].labels["segment"] == "Segment specialism (sec)"
    assert labeled[0].specialism_layer == "sec"
    assert labeled[1].labels["segment"] == "Cross-segment activity"
    assert labeled[1].specialism_layer is None


def test_connectivity_is_sum_and_direct_share_uses_order_one():
    g = from_edges([("a", "b", "l"), ("b", "c", "l"), ("c", "d", "l")])
    emb = build_embedding(g, 3)
    profiles = profile_clusters(emb, Clustering(np.zeros(4, dtype=int), 1))
    p = profiles[0]
    assert p.connectivity == pytest.approx(p.mean_embedding.sum())
    order_one = [i for i, f in enumerate(emb.features) if f.order == (1,)]
    assert p.direct_share == pytest.approx(
        emb.values[order_one].mean(axis=1).sum() / p.mean_embedding.sum()
    )


def test_labels_deterministic_and_invariant_to_node_order():
    rng = np.random.default_rng(0)
    values = rng.random((4, 10)) * 5
    emb = manual_embedding(values)
    labels = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2, 2])
    profiles = label_profiles(profile_clusters(emb, Clustering(labels, 3)))
    perm = rng.permutation(10)
    emb_p = manual_embedding(values[:, perm])
    profiles_p = label_profiles(profile_clusters(emb_p, Clustering(labels[perm], 3)))
    for a, b in zip(profiles, profiles_p):
        assert a.labels == b.labels
        assert a.connectivity == pytest.approx(b.connectivity)
        assert np.allclose(a.mean_embedding, b.mean_embedding)


def test_connectivity_ranking_scale_invariant():
    rng = np.random.default_rng(1)
    values = rng.random((4, 9))
    emb = manual_embedding(values)
    clustering = Clustering(np.array([0, 0, 0, 1, 1, 1, 2, 2, 2]), 3)
    base = profile_clusters(emb, clustering)
    scaled = profile_clusters(manual_embedding(values * 7.3), clustering)
    rank = np.argsort([p.connectivity for p in base])
    rank_scaled = np.argsort([p.connectivity for p in scaled])
    assert np.array_equal(rank, rank_scaled)
    # tercile labels follow the ranking, so they match too
    for a, b in zip(label_profiles(base), label_profiles(scaled)):
        assert a.labels["connectivity"] == b.labels["connectivity"]


def test_zero_mass_cluster_scores():
    values = np.zeros((4, 4))
    values[:, 2:] = 1.0
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.array([0, 0, 1, 1]), 2))
    p = profiles[0]
    assert p.connectivity == 0.0
    assert p.funding_balance == 0.0
    assert p.direct_share == 0.0
    assert all(v == 0.0 for v in p.layer_shares.values())


def test_label_needs_two_clusters():
    values = np.ones((4, 3))
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.zeros(3, dtype=int), 1))
    with pytest.raises(ValueError, match="at least 2"):
        label_profiles(profiles)


def test_custom_thresholds():
    values = np.array([[1.0, 0.0], [2.0, 3.0], [0.0, 1.0], [0.0, 2.0]])
    emb = manual_embedding(values)
    profiles = profile_clusters(emb, Clustering(np.array([0, 1]), 2))
    # cluster 0 balance = (2-1)/3 = 1/3: Supplier at band 0.25, Intermediation at 0.4
    assert label_profiles(profiles)[0].labels["funding"] == "Supplier"
    wide = label_profiles(profiles, LabelThresholds(balance_band=0.4))
    assert wide[0].labels["funding"] == "Intermediation"


def test_six_role_label_table_matches_planted_semantics():
    # end to end: the matched clusters reproduce the qualitative pattern the
    # preset plants (funding and segment dimensions; tercile dimensions for
    # the extremes only, since mid-field terciles are boundary-sensitive)
    from collections import Counter

    from rolenet import (
        SpectralConfig,
        generate,
        l1_distance_matrix,
        preset,
        similarity_from_distances,
        spectral_clustering,
    )

    spec = preset("six-role", 0)
    graph, planted = generate(spec)
    emb = build_embedding(graph, 3)
    s = similarity_from_distances(l1_distance_matrix(emb.values)).values
    clustering, _ = spectral_clustering(s, SpectralConfig(n_clusters=6, restarts=60, seed=0))
    profiles = label_profiles(profile_clusters(emb, clustering))
    names = spec.role_names()
    by_role = {}
    for rid, name in enumerate(names):
        members = np.flatnonzero(planted == rid)
        by_role[name] = profiles[Counter(clustering.labels[members].tolist()).most_common(1)[0][0]]

    expected = {
        "core-intermediary": ("Intermediation", "Cross-segment activity"),
        "secured-mid-indirect": ("Intermediation", "Segment specialism (secured)"),
        "cross-mid": ("Intermediation", "Cross-segment activity"),
        "secured-mid-direct": ("Intermediation", "Segment specialism (secured)"),
        "bridge": ("Intermediation", "Cross-segment activity"),
        "unsecured-supplier": ("Supplier", "Segment specialism (unsecured)"),
    }
    for role, (funding, segment) in expected.items():
        assert by_role[role].labels["funding"] == funding, role
        assert by_role[role].labels["segment"] == segment, role
    assert by_role["core-intermediary"].labels["connectivity"] == "Systemic"
    assert by_role["unsecured-supplier"].labels["connectivity"] == "Peripheral"
    assert by_role["core-intermediary"].labels["access"] == "Direct"
    assert by_role["secured-mid-indirect"].labels["access"] == "Indirect"


def test_profiles_json_and_bars(tmp_path):
    g = from_edges([("a", "b", "l"), ("b", "c", "l"), ("c", "a", "l"), ("d", "a", "l")])
    emb = build_embedding(g, 2)
    clustering = Clustering(np.array([0, 0, 0, 1]), 2)
    profiles = label_profiles(profile_clusters(emb, clustering))
    jpath = tmp_path / "profiles.json"
    write_profiles_json(profiles, emb, str(jpath))
    doc = json.loads(jpath.read_text())
    assert doc["thresholds"] == {"balance_band": 0.25, "specialism_share": 0.8}
    assert len(doc["clusters"]) == 2
    assert doc["clusters"][0]["size"] == 3
    assert set(doc["clusters"][0]["labels"]) == {"connectivity", "funding", "segment", "access"}
    assert len(doc["clusters"][0]["mean_embedding"]) == emb.n_features
    bpath = tmp_path / "bars.csv"
    write_profile_bars_csv(profiles, emb, str(bpath))
    lines = bpath.read_text().strip().splitlines()
    assert lines[0] == "cluster,feature_name,mean_value"
    assert len(lines) == 1 + 2 * emb.n_features
