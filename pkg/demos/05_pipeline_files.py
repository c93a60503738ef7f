"""The file-based pipeline: every stage reads and writes documented formats.

Equivalent to the CLI sequence

    rolenet synth --preset six-role --seed 7 --out work/net
    rolenet run --config work/cfg.json

and shows that stage outputs can be reloaded and reused independently.

Run: python demos/05_pipeline_files.py  (about a minute)
"""

import csv
import json
import tempfile
from pathlib import Path

import numpy as np

from rolenet import PipelineConfig, adjusted_rand_index, run
from rolenet.cli import main
from rolenet.features import read_embedding_csv
from rolenet.similarity import read_matrix_csv
from rolenet.synth import read_planted_csv

work = Path(tempfile.mkdtemp(prefix="rolenet_demo_"))
net = work / "net"
print(f"working directory: {work}")

main(["synth", "--preset", "six-role", "--seed", "7", "--out", str(net)])

config = PipelineConfig(
    input=str(net / "edges.csv"),
    output_dir=str(work / "out"),
    m_values=list(range(2, 12)),
    restarts=200,
    seed=7,
)
(work / "cfg.json").write_text(json.dumps(config.to_dict(), indent=2))
result = run(config)
print(f"pipeline selected M = {result.selection.best_m}")
print("artifacts:")
for name, path in result.artifacts.items():
    print(f"  {name:13s} {path}")

# every artifact stands alone: reload and cross-check
emb = read_embedding_csv(result.artifacts["embedding"])
labels, similarity = read_matrix_csv(result.artifacts["similarity"])
assert labels == emb.node_labels

planted_labels, planted = read_planted_csv(str(net / "planted.csv"))
with open(result.artifacts["clustering"]) as fh:
    found = {r["node_label"]: int(r["cluster_id"]) for r in csv.DictReader(fh)}
ari = adjusted_rand_index(np.array([found[l] for l in planted_labels]), planted)
print(f"\nARI vs planted.csv: {ari:.3f}")

with open(result.artifacts["profiles"]) as fh:
    doc = json.load(fh)
print("cluster labels from profiles.json:")
for cluster in doc["clusters"]:
    print(f"  cluster {cluster['id']}: {cluster['labels']}")
