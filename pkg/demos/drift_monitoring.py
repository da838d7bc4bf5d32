# Watching a primal learner lose and recover accuracy when the target concept changes.
from gsb import (
    DriftStreamConfig,
    EvalConfig,
    KernelConfig,
    LearnerConfig,
    PolicyConfig,
    StreamSegmentConfig,
    generate_drift_stream,
    run_prequential,
)

# positives contain a C-N edge for 1000 graphs, then an O-S edge
segments = [
    StreamSegmentConfig(count=1000, concept=("C", "N"), noise=0.05),
    StreamSegmentConfig(count=1000, concept=("O", "S"), noise=0.05),
]
stream = generate_drift_stream(DriftStreamConfig(segments, seed=0))
learner = LearnerConfig("primal", PolicyConfig("weight"), 5000, 0.01, kernel=KernelConfig("fs", h=1))

res = run_prequential(stream, learner, EvalConfig(eval_every=100, window=100))
for r in res.records:
    bar = "#" * int(round(20 * r.auroc_window))
    mark = "  <- drift" if r.t == 1099 else ""
    print(f"t={r.t:>4}  auroc={r.auroc_window:.3f} {bar:<20} bal.acc={r.balanced_accuracy_window:.3f}{mark}")
print("mean windowed AUROC:", round(res.summary.mean_auroc, 3))
