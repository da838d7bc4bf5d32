"""Budget maintenance: eviction policies and the incremental F-score."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

FSCORE_EPS = 1e-12


class InsufficientData(ValueError):
    """F-score requested before both classes have at least two examples."""


class CannotEvict(ValueError):
    """Eviction requested from an empty model."""


class Policy(str, enum.Enum):
    RANDOM = "random"
    OLDEST = "oldest"
    TAU = "tau"
    WEIGHT = "weight"
    OLDEST_FEATURE = "oldest-feature"
    FSCORE = "fscore"


EXAMPLE_POLICIES = frozenset({Policy.RANDOM, Policy.OLDEST, Policy.TAU})
FEATURE_POLICIES = frozenset({Policy.RANDOM, Policy.WEIGHT, Policy.OLDEST_FEATURE, Policy.FSCORE})

# memory units per stored feature of the primal model
SIGMA = {Policy.RANDOM: 2, Policy.WEIGHT: 2, Policy.OLDEST_FEATURE: 3, Policy.FSCORE: 5}


@dataclass(frozen=True)
class PolicyConfig:
    kind: Policy = Policy.RANDOM
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Policy(self.kind))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class FScoreTracker:
    """Class counts plus per-feature sums and sums of squares, per class.

    ``stats[i]`` is ``[f_pos, f_neg, f2_pos, f2_neg]`` for feature ``i``.
    """

    def __init__(self):
        self.n_pos = 0
        self.n_neg = 0
        self.stats: dict[int, list[float]] = {}

    def record(self, phi: Mapping[int, float], y: int) -> None:
        stats = self.stats
        if y > 0:
            self.n_pos += 1
            for i, v in phi.items():
                s = stats.get(i)
                if s is None:
                    stats[i] = [v, 0.0, v * v, 0.0]
                else:
                    s[0] += v
                    s[2] += v * v
        else:
            self.n_neg += 1
            for i, v in phi.items():
                s = stats.get(i)
                if s is None:
                    stats[i] = [0.0, v, 0.0, v * v]
                else:
                    s[1] += v
                    s[3] += v * v

    def fscore(self, i: int) -> float:
        """Incremental F-score of feature ``i`` from the running sums."""
        n_pos, n_neg = self.n_pos, self.n_neg
        if n_pos < 2 or n_neg < 2:
            raise InsufficientData(f"need >= 2 examples per class, have {n_pos} positive / {n_neg} negative")
        f_pos, f_neg, f2_pos, f2_neg = self.stats.get(i, (0.0, 0.0, 0.0, 0.0))
        avg_pos = f_pos / n_pos
        avg_neg = f_neg / n_neg
        avg = (f_pos + f_neg) / (n_pos + n_neg)
        num = (avg_pos - avg) ** 2 + (avg_neg - avg) ** 2
        if num == 0.0:
            return 0.0
        d_pos = (f2_pos - 2 * avg_pos * f_pos + n_pos * avg_pos**2) / (n_pos - 1)
        d_neg = (f2_neg - 2 * avg_neg * f_neg + n_neg * avg_neg**2) / (n_neg - 1)
        # rounding can push a zero variance slightly negative
        return num / (max(d_pos, 0.0) + max(d_neg, 0.0) + FSCORE_EPS)

    def score(self, i: int) -> float:
        """F-score with the cold-start convention: 0 while a class has < 2 examples."""
        if self.n_pos < 2 or self.n_neg < 2:
            return 0.0
        return self.fscore(i)


def batch_fscore(values: Sequence[float], labels: Sequence[int]) -> float:
    """Two-pass F-score of one feature over a finished dataset.

    ``values[j]`` is the feature's value in example ``j`` (0 when absent).
    """
    x = np.asarray(values, dtype=float)
    y = np.asarray(labels)
    pos, neg = x[y > 0], x[y <= 0]
    if len(pos) < 2 or len(neg) < 2:
        raise InsufficientData("need >= 2 examples per class")
    avg, avg_pos, avg_neg = x.mean(), pos.mean(), neg.mean()
    num = (avg_pos - avg) ** 2 + (avg_neg - avg) ** 2
    if num == 0.0:
        return 0.0
    den = ((pos - avg_pos) ** 2).sum() / (len(pos) - 1) + ((neg - avg_neg) ** 2).sum() / (len(neg) - 1)
    return num / (den + FSCORE_EPS)


def select_victim_example(entries: Sequence[tuple[int, float]], policy: Policy, rng: np.random.Generator) -> int:
    """Index of the model entry to evict; ``entries`` holds ``(timestamp, tau)`` pairs."""
    if not entries:
        raise CannotEvict("the model is empty")
    policy = Policy(policy)
    if policy is Policy.RANDOM:
        return int(rng.integers(len(entries)))
    if policy is Policy.OLDEST:
        return min(range(len(entries)), key=lambda j: entries[j][0])
    if policy is Policy.TAU:
        low = min(tau for _, tau in entries)
        ties = [j for j, (_, tau) in enumerate(entries) if tau == low]
        return ties[0] if len(ties) == 1 else ties[int(rng.integers(len(ties)))]
    raise ValueError(f"policy {policy.value!r} does not evict whole examples")


class Decision(enum.Enum):
    INSERT_FRESH = "insert"
    EVICT_AND_INSERT = "evict+insert"
    REJECT = "reject"


@dataclass(frozen=True)
class Admission:
    decision: Decision
    victim: int | None = None


def admit_feature_weightlike(
    model_w: Mapping[int, float],
    candidate: tuple[int, float],
    score_of: Callable[[int], float],
    budget_slots: float,
    candidate_score: float | None = None,
) -> Admission:
    """Decide whether a new feature enters a full primal model.

    The model feature with the lowest ``score_of`` is the eviction candidate;
    the new feature replaces it only if it scores strictly higher. With the
    weight policy the candidate's score is ``|contribution|``, which is the
    default when ``candidate_score`` is not given.
    """
    fid, contribution = candidate
    if len(model_w) < budget_slots:
        return Admission(Decision.INSERT_FRESH)
    if not model_w:
        return Admission(Decision.REJECT)
    victim = min(model_w, key=lambda i: (score_of(i), i))
    cand = abs(contribution) if candidate_score is None else candidate_score
    if cand > score_of(victim):
        return Admission(Decision.EVICT_AND_INSERT, victim)
    return Admission(Decision.REJECT)


class FeatureAdmission:
    """Repeated :func:`admit_feature_weightlike` over one update, heap-backed.

    Scores of the features already in the model must stay fixed while the
    object is in use, which holds within a single primal update.
    """

    def __init__(self, scores: Mapping[int, float], budget_slots: float):
        self.slots = budget_slots
        self.size = len(scores)
        self._heap = [(s, i) for i, s in scores.items()]
        heapq.heapify(self._heap)

    def offer(self, fid: int, score: float) -> Admission:
        if self.size < self.slots:
            heapq.heappush(self._heap, (score, fid))
            self.size += 1
            return Admission(Decision.INSERT_FRESH)
        if not self._heap:
            return Admission(Decision.REJECT)
        low, victim = self._heap[0]
        if score > low:
            heapq.heapreplace(self._heap, (score, fid))
            return Admission(Decision.EVICT_AND_INSERT, victim)
        return Admission(Decision.REJECT)
