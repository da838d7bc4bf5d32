# Three ways of storing an online kernel classifier, all held to the same memory budget.
import math

from gsb import (
    DriftStreamConfig,
    EvalConfig,
    FeatureIndex,
    KernelConfig,
    LearnerConfig,
    PolicyConfig,
    StreamSegmentConfig,
    generate_drift_stream,
    make_model,
    run_prequential,
)

segment = lambda concept: StreamSegmentConfig(count=300, concept=concept, noise=0.05)
stream = generate_drift_stream(DriftStreamConfig([segment(("C", "N")), segment(("O", "S"))], seed=1))
kcfg = KernelConfig("fs", h=2)

# with no budget the three representations hold the same hypothesis
print("unbounded:")
for algo, policy in (("dual", "oldest"), ("mixed", "oldest"), ("primal", "weight")):
    res = run_prequential(stream, LearnerConfig(algo, PolicyConfig(policy), math.inf, 0.1, kernel=kcfg), EvalConfig(50, 200))
    s = res.summary
    print(f"  {algo:<7} errors={s.total_errors:<4} size={s.final_model_size:<6} time={s.total_ns / 1e9:.2f}s")

# a tight budget forces evictions; each algorithm measures its size differently
print("budget 400:")
for algo, policy in (("dual", "tau"), ("mixed", "tau"), ("primal", "weight"), ("primal", "fscore")):
    model = make_model(LearnerConfig(algo, PolicyConfig(policy, seed=0), 400, 0.1, kernel=kcfg), FeatureIndex())
    evicted = 0
    for ex in stream:
        evicted += model.learn(ex.graph, ex.label).evicted
        assert model.size <= 400
    print(f"  {algo:<7} {policy:<8} size={model.size:<4} evictions={evicted}")
