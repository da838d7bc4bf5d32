# Driving runs and sweeps through the command-line entry point.
import csv
import json
import tempfile
from pathlib import Path

from gsb.cli import main, read_results

work = Path(tempfile.mkdtemp())
(work / "stream.json").write_text(json.dumps({
    "seed": 3,
    "segments": [{"count": 300, "concept": ["C", "N"]}, {"count": 300, "concept": ["O", "S"]}],
}))

# generate the stream as a text file, then learn from it
main(["generate", "--synthetic", str(work / "stream.json"), "--out", str(work / "stream.txt")])
print((work / "stream.txt").read_text()[:60], "...\n")

main(["run", "--stream", str(work / "stream.txt"), "--kernel", "odd", "--h", "2", "--algo", "mixed",
      "--policy", "tau", "--budget", "2000", "--eval-every", "100", "--window", "200", "--out", str(work / "run.csv")])
for row in read_results((work / "run.csv").read_text()):
    print(f"{row['kind']:<8} t={row['t']:<4} auroc={row['auroc']:.3f} errors={row['cumulative_errors']:<4} size={row['model_size']}")

# a sweep over the FS depth and the aggressiveness C
(work / "grid.yaml").write_text("kernel: [fs]\nh: [0, 1, 2]\nC: [0.01, 1.0]\n")
main(["sweep", "--stream", str(work / "stream.txt"), "--grid", str(work / "grid.yaml"), "--out", str(work / "sweep")])
for row in csv.DictReader((work / "sweep" / "index.csv").open()):
    summary = read_results((work / "sweep" / row["file"]).read_text())[-1]
    print(f"h={row['h']} C={row['C']:<5} mean auroc={summary['auroc']:.3f}")
