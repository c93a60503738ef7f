from __future__ import annotations

import numpy as np
import pytest

from rolenet import RoleTemplate, SynthSpec, adjusted_rand_index, generate, preset
from rolenet.synth import (
    read_planted_csv,
    spec_from_json,
    spec_to_json,
    write_planted_csv,
)


def tiny_spec(seed=0, p=0.5):
    roles = (
        RoleTemplate("a", 6, {"l": {"a": p, "b": p / 2}}),
        RoleTemplate("b", 5, {"l": {"a": p / 2}}),
    )
    return SynthSpec(roles, ("l",), seed)


def test_generate_shapes_and_planted():
    graph, planted = generate(tiny_spec())
    assert graph.n_nodes == 11
    assert planted.tolist() == [0] * 6 + [1] * 5
    assert graph.layer_names == ("l",)


def test_generate_deterministic():
    g1, p1 = generate(tiny_spec(seed=9))
    g2, p2 = generate(tiny_spec(seed=9))
    assert np.array_equal(g1.adjacency[0], g2.adjacency[0])
    assert np.array_equal(p1, p2)
    g3, _ = generate(tiny_spec(seed=10))
    assert not np.array_equal(g1.adjacency[0], g3.adjacency[0])


def test_zero_probability_spec_gives_empty_graph():
    roles = (RoleTemplate("a", 3, {}), RoleTemplate("b", 3, {}))
    graph, _ = generate(SynthSpec(roles, ("l",), 1))
    assert not graph.adjacency[0].any()


def test_block_densities_within_3_sigma():
    # edge counts per role pair are Binomial(trials, p); check the preset
    # core->core and tier1->core blocks across seeds
    spec = preset("core-periphery", 0)
    names = spec.role_names()
    sizes = {r.name: r.size for r in spec.roles}
    for src, dst, p in (("core", "core", 0.8), ("tier1", "core", 0.5), ("sender", "tier1", 0.3)):
        trials_per_seed = sizes[src] * sizes[dst] - (sizes[src] if src == dst else 0)
        count = 0
        n_seeds = 12
        for seed in range(n_seeds):
            graph, planted = generate(preset("core-periphery", seed))
            si, di = names.index(src), names.index(dst)
            block = graph.adjacency[0][np.ix_(planted == si, planted == di)]
            count += int(block.sum())
        trials = trials_per_seed * n_seeds
        sigma = np.sqrt(trials * p * (1 - p))
        assert abs(count - trials * p) < 3 * sigma


def test_validation_errors():
    with pytest.raises(ValueError, match="at least 2 roles"):
        SynthSpec((RoleTemplate("a", 3, {}),), ("l",), 0)
    with pytest.raises(ValueError, match="unknown layer"):
        SynthSpec(
            (RoleTemplate("a", 3, {"x": {"a": 0.5}}), RoleTemplate("b", 3, {})),
            ("l",),
            0,
        )
    with pytest.raises(ValueError, match="outside"):
        RoleTemplate("a", 3, {"l": {"a": 1.5}})
    with pytest.raises(ValueError, match="size"):
        RoleTemplate("a", 0, {})


def test_presets_exist_and_cover_described_roles():
    cp = preset("core-periphery", 3)
    assert cp.n_nodes == 70 and len(cp.roles) == 4
    noiseless = preset("core-periphery-noiseless", 3)
    probs = [
        p
        for role in noiseless.roles
        for targets in role.out_probs.values()
        for p in targets.values()
    ]
    assert probs and all(p in (0.0, 1.0) for p in probs)
    six = preset("six-role", 3)
    assert six.n_nodes == 200 and len(six.roles) == 6
    assert six.layers == ("secured", "unsecured")
    with pytest.raises(ValueError, match="unknown preset"):
        preset("nope")


def test_noiseless_preset_is_deterministic_blockwise():
    g1, planted = generate(preset("core-periphery-noiseless", 1))
    g2, _ = generate(preset("core-periphery-noiseless", 2))
    assert np.array_equal(g1.adjacency[0], g2.adjacency[0])  # seed-independent
    names = preset("core-periphery-noiseless", 0).role_names()
    core = planted == names.index("core")
    block = g1.adjacency[0][np.ix_(core, core)]
    assert block.sum() == core.sum() * (core.sum() - 1)  # complete block


# ---------------------------------------------------------------------------
# adjusted Rand index
# ---------------------------------------------------------------------------

def test_ari_identical_partitions():
    labels = np.array([0, 0, 1, 1, 2])
    assert adjusted_rand_index(labels, labels) == 1.0
    assert adjusted_rand_index(labels, (labels + 1) % 3) == 1.0  # relabeled


def test_ari_hand_computed_blocks_vs_singletons():
    # two blocks of 3 vs all singletons: every pair disagrees where it can.
    # contingency rows are all ones; sum_cells = 0, sum_rows = 2*C(3,2) = 6,
    # sum_cols = 0 -> expected = 0, max_index = 3 -> ARI = 0
    blocks = np.array([0, 0, 0, 1, 1, 1])
    singles = np.arange(6)
    assert adjusted_rand_index(blocks, singles) == pytest.approx(0.0)


def test_ari_hand_computed_partial_overlap():
    a = np.array([0, 0, 1, 1])
    b = np.array([0, 0, 0, 1])
    # contingency [[2,0],[1,1]]: sum_cells=1, rows=C(2,2)+C(2,2)=2,
    # cols=C(3,2)+0=3, total=C(4,2)=6 -> expected=1, max=2.5 -> (1-1)/(2.5-1)=0
    assert adjusted_rand_index(a, b) == pytest.approx(0.0)
    c = np.array([0, 0, 1, 2])
    # contingency [[2,0,0],[0,1,1]]: cells=1, rows=2, cols=1 -> expected=1/3,
    # max=1.5 -> (1-1/3)/(1.5-1/3) = 4/7
    assert adjusted_rand_index(a, c) == pytest.approx(4.0 / 7.0)


def test_ari_matches_sklearn():
    sklearn_metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(3, 30))
        a = rng.integers(0, 4, size=n)
        b = rng.integers(0, 3, size=n)
        assert adjusted_rand_index(a, b) == pytest.approx(
            sklearn_metrics.adjusted_rand_score(a, b), abs=1e-12
        )


def test_ari_near_zero_for_independent_partitions():
    rng = np.random.default_rng(1)
    values = [
        adjusted_rand_index(rng.integers(0, 3, 60), rng.integers(0, 3, 60))
        for _ in range(100)
    ]
    assert abs(float(np.mean(values))) < 0.02


def test_ari_length_mismatch():
    with pytest.raises(ValueError):
        adjusted_rand_index([0, 1], [0, 1, 2])


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def test_spec_json_round_trip(tmp_path):
    spec = preset("six-role", 77)
    path = tmp_path / "spec.json"
    spec_to_json(spec, str(path))
    back = spec_from_json(str(path))
    assert back.seed == 77
    assert back.layers == spec.layers
    assert back.role_names() == spec.role_names()
    assert [r.size for r in back.roles] == [r.size for r in spec.roles]
    g1, _ = generate(spec)
    g2, _ = generate(back)
    assert np.array_equal(g1.adjacency[0], g2.adjacency[0])


def test_planted_csv_round_trip(tmp_path):
    graph, planted = generate(tiny_spec())
    path = tmp_path / "planted.csv"
    write_planted_csv(graph.node_labels, planted, ("a", "b"), str(path))
    labels, roles = read_planted_csv(str(path))
    assert labels == graph.node_labels
    assert np.array_equal(roles, planted)
