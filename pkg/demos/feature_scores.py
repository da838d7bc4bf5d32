# Running F-scores rank features by how well they separate the classes.
import numpy as np

from gsb import FScoreTracker, batch_fscore

rng = np.random.default_rng(0)
y = np.where(rng.random(400) < 0.5, 1, -1)
X = rng.normal(size=(400, 4))
X[:, 0] += 1.5 * (y > 0)  # informative
X[:, 1] += 0.3 * (y > 0)  # weakly informative

tracker = FScoreTracker()
for row, label in zip(X, y):
    tracker.record(dict(enumerate(row)), int(label))

for i in range(4):
    print(f"feature {i}: running={tracker.fscore(i):.4f} two-pass={batch_fscore(X[:, i], y):.4f}")
