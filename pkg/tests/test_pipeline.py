from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
import pytest

from rolenet import PipelineConfig, PipelineError, adjusted_rand_index, run
from rolenet.cli import main
from rolenet.pipeline import rerun_from_manifest
from rolenet.synth import read_planted_csv


def synth_dir(tmp_path: Path, preset_name="core-periphery", seed=5) -> Path:
    out = tmp_path / "net"
    assert main(["synth", "--preset", preset_name, "--seed", str(seed), "--out", str(out)]) == 0
    return out


def small_config(tmp_path: Path, net: Path, **overrides) -> PipelineConfig:
    settings = dict(
        input=str(net / "edges.csv"),
        output_dir=str(tmp_path / "out"),
        m_values=[2, 3, 4, 5],
        restarts=30,
        seed=11,
    )
    settings.update(overrides)
    return PipelineConfig(**settings)


def read_bytes(folder: str) -> dict[str, bytes]:
    root = Path(folder)
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_run_writes_all_artifacts(tmp_path):
    net = synth_dir(tmp_path)
    config = small_config(tmp_path, net)
    result = run(config)
    expected = {
        "embedding.csv",
        "similarity.csv",
        "curve.csv",
        "clustering.csv",
        "profiles.json",
        "profile_bars.csv",
        "manifest.json",
    }
    assert {Path(p).name for p in result.artifacts.values()} == expected
    assert result.selection.best_m == 4  # four planted roles
    labels, planted = read_planted_csv(str(net / "planted.csv"))
    by_label = dict(zip(labels, planted))
    import csv

    with open(result.artifacts["clustering"]) as fh:
        rows = list(csv.DictReader(fh))
    found = np.array([int(r["cluster_id"]) for r in rows])
    truth = np.array([by_label[r["node_label"]] for r in rows])
    assert adjusted_rand_index(found, truth) > 0.9


def test_run_deterministic_across_thread_caps(tmp_path, monkeypatch):
    net = synth_dir(tmp_path)
    config_a = small_config(tmp_path, net, output_dir=str(tmp_path / "a"))
    config_b = small_config(tmp_path, net, output_dir=str(tmp_path / "b"))
    monkeypatch.setenv("ROLENET_THREADS", "1")
    run(config_a)
    monkeypatch.setenv("ROLENET_THREADS", "4")
    run(config_b)
    bytes_a = read_bytes(config_a.output_dir)
    bytes_b = read_bytes(config_b.output_dir)
    assert bytes_a == bytes_b


def test_manifest_reruns_reproduce_artifacts(tmp_path):
    net = synth_dir(tmp_path)
    config = small_config(tmp_path, net)
    result = run(config)
    rerun_from_manifest(result.artifacts["manifest"], str(tmp_path / "again"))
    original = read_bytes(config.output_dir)
    again = read_bytes(str(tmp_path / "again"))
    assert original == again


def test_stage_error_names_stage_and_path(tmp_path):
    config = PipelineConfig(
        input=str(tmp_path / "missing.csv"), output_dir=str(tmp_path / "out")
    )
    with pytest.raises(PipelineError, match="ingest.*missing.csv"):
        run(config)


def test_config_validation():
    with pytest.raises(ValueError, match="l1"):
        PipelineConfig(input="x", output_dir="y", distance="cosine")
    with pytest.raises(ValueError, match="algorithm"):
        PipelineConfig(input="x", output_dir="y", algorithm="louvain")
    with pytest.raises(ValueError, match="unknown config"):
        PipelineConfig.from_dict({"input": "x", "output_dir": "y", "bogus": 1})


def test_agglomerative_pipeline(tmp_path):
    net = synth_dir(tmp_path)
    config = small_config(tmp_path, net, algorithm="agglomerative", linkage="average")
    result = run(config)
    assert result.selection.best_m >= 2


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_stagewise_matches_run(tmp_path, capsys):
    net = synth_dir(tmp_path)
    emb = tmp_path / "emb.csv"
    sim = tmp_path / "sim.csv"
    curve = tmp_path / "curve.csv"
    clustering = tmp_path / "clust.csv"
    profiles = tmp_path / "profiles.json"
    assert main(["features", "--input", str(net / "edges.csv"), "--K", "3",
                 "--output", str(emb)]) == 0
    assert main(["similarity", "--embedding", str(emb), "--output", str(sim),
                 "--bin", str(tmp_path / "sim.bin")]) == 0
    assert main(["select-m", "--similarity", str(sim), "--m-range", "2:5",
                 "--restarts", "30", "--seed", "11", "--output", str(curve),
                 "--clustering", str(clustering)]) == 0
    assert main(["profile", "--embedding", str(emb), "--clustering", str(clustering),
                 "--output", str(profiles)]) == 0
    config = small_config(tmp_path, net)
    result = run(config)
    assert emb.read_bytes() == Path(result.artifacts["embedding"]).read_bytes()
    assert sim.read_bytes() == Path(result.artifacts["similarity"]).read_bytes()
    assert curve.read_bytes() == Path(result.artifacts["curve"]).read_bytes()
    assert clustering.read_bytes() == Path(result.artifacts["clustering"]).read_bytes()
    assert profiles.read_bytes() == Path(result.artifacts["profiles"]).read_bytes()


def test_cli_features_chain_example(tmp_path):
    edges = tmp_path / "edges.csv"
    edges.write_text("src,dst,layer\n1,2,l\n2,3,l\n")
    out = tmp_path / "emb.csv"
    assert main(["features", "--input", str(edges), "--K", "3", "--output", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "node_label,in_l_k1,in_l_k2,in_l_k3,out_l_k1,out_l_k2,out_l_k3"
    first = lines[1].split(",")
    assert first[0] == "1"
    assert [float(v) for v in first[1:]] == [0.0, 0.0, 0.0, 1.0, 1.0, 0.0]


def test_cli_cluster_fixed_m(tmp_path):
    net = synth_dir(tmp_path)
    emb = tmp_path / "emb.csv"
    sim = tmp_path / "sim.csv"
    out = tmp_path / "clust.csv"
    main(["features", "--input", str(net / "edges.csv"), "--output", str(emb)])
    main(["similarity", "--embedding", str(emb), "--output", str(sim)])
    assert main(["cluster", "--similarity", str(sim), "-M", "4", "--restarts", "30",
                 "--output", str(out)]) == 0
    labels, planted = read_planted_csv(str(net / "planted.csv"))
    import csv

    with open(out) as fh:
        rows = {r["node_label"]: int(r["cluster_id"]) for r in csv.DictReader(fh)}
    found = np.array([rows[l] for l in labels])
    assert adjusted_rand_index(found, planted) > 0.9


def test_cli_dendrogram_export(tmp_path):
    net = synth_dir(tmp_path)
    emb, sim = tmp_path / "emb.csv", tmp_path / "sim.csv"
    main(["features", "--input", str(net / "edges.csv"), "--output", str(emb)])
    main(["similarity", "--embedding", str(emb), "--output", str(sim)])
    dendro = tmp_path / "dendro.csv"
    assert main(["cluster", "--similarity", str(sim), "-M", "4",
                 "--algorithm", "agglomerative", "--output", str(tmp_path / "c.csv"),
                 "--dendrogram", str(dendro)]) == 0
    lines = dendro.read_text().strip().splitlines()
    assert lines[0] == "step,cluster_a,cluster_b,linkage_value"
    assert len(lines) == 70  # 70 nodes -> 69 merges + header


def test_cli_run_command(tmp_path):
    net = synth_dir(tmp_path)
    config = small_config(tmp_path, net)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config.to_dict()))
    assert main(["run", "--config", str(cfg_path)]) == 0
    assert (Path(config.output_dir) / "manifest.json").exists()


def test_cli_missing_input_fails_with_path(tmp_path, capsys):
    code = main(["features", "--input", str(tmp_path / "nope.csv"),
                 "--output", str(tmp_path / "emb.csv")])
    assert code != 0
    err = capsys.readouterr().err
    assert "nope.csv" in err


def test_cli_end_to_end_six_role_elbow(tmp_path):
    # synth then run through the CLI files only: the curve peaks at the six
    # planted roles and the clustering matches them
    import csv

    net = tmp_path / "net"
    assert main(["synth", "--preset", "six-role", "--seed", "7", "--out", str(net)]) == 0
    config = PipelineConfig(
        input=str(net / "edges.csv"),
        output_dir=str(tmp_path / "out"),
        m_values=list(range(2, 12)),
        restarts=150,
        seed=7,
    )
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config.to_dict()))
    assert main(["run", "--config", str(cfg_path)]) == 0

    with open(tmp_path / "out" / "curve.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["M", "phi_within"]
    curve = {int(r["M"]): float(r["phi_within"]) for r in rows}
    assert max(curve, key=curve.get) == 6

    labels, planted = read_planted_csv(str(net / "planted.csv"))
    with open(tmp_path / "out" / "clustering.csv") as fh:
        found_by_label = {r["node_label"]: int(r["cluster_id"]) for r in csv.DictReader(fh)}
    found = np.array([found_by_label[l] for l in labels])
    assert adjusted_rand_index(found, planted) >= 0.9


def test_cli_synth_from_spec_file(tmp_path):
    spec_doc = {
        "seed": 3,
        "layers": ["l"],
        "roles": [
            {"name": "a", "size": 4, "out_probs": {"l": {"b": 1.0}}},
            {"name": "b", "size": 3, "out_probs": {}},
        ],
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec_doc))
    out = tmp_path / "net"
    assert main(["synth", "--spec", str(spec_path), "--out", str(out)]) == 0
    edges = (out / "edges.csv").read_text().strip().splitlines()
    assert len(edges) == 1 + 4 * 3  # full bipartite a -> b
