"""Prequential (test-then-train) evaluation with sliding-window metrics."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .graph import LabeledExample
from .learners import LearnerConfig, make_model


class UndefinedMetric(ValueError):
    """The window holds examples of a single class only."""


def auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney AUROC; tied positive/negative pairs count one half."""
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(labels) > 0
    n_pos = int(pos.sum())
    n_neg = len(s) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("AUROC needs both classes")
    ranks = rankdata(s)
    # rank sums of half-integers are exact in floating point
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def auroc_pairs(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Quadratic pair-counting AUROC; the reference for :func:`auroc`."""
    pos = [s for s, y in zip(scores, labels) if y > 0]
    neg = [s for s, y in zip(scores, labels) if y <= 0]
    if not pos or not neg:
        raise UndefinedMetric("AUROC needs both classes")
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def balanced_accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    p = np.asarray(predictions) > 0
    y = np.asarray(labels) > 0
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("balanced accuracy needs both classes")
    tpr = (p & y).sum() / n_pos
    tnr = (~p & ~y).sum() / n_neg
    return float((tpr + tnr) / 2)


@dataclass(frozen=True)
class EvalConfig:
    eval_every: int = 50
    window: int = 1000

    def __post_init__(self):
        if self.eval_every < 1 or self.window < 1:
            raise ValueError("eval_every and window must be positive")
        if self.eval_every > self.window:
            raise ValueError("eval_every must not exceed window")


@dataclass
class EvalRecord:
    t: int
    auroc_window: float | None
    balanced_accuracy_window: float | None
    cumulative_errors: int
    model_size: int
    elapsed_ns: int


@dataclass
class Summary:
    n_examples: int
    mean_auroc: float | None
    mean_balanced_accuracy: float | None
    total_errors: int
    total_ns: int
    final_model_size: int


@dataclass
class RunResult:
    records: list[EvalRecord]
    summary: Summary
    scores: list[float] = field(default_factory=list, repr=False)


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return float(np.mean(xs)) if xs else None


def run_prequential(stream: Iterable[LabeledExample], learner, cfg: EvalConfig = EvalConfig()) -> RunResult:
    """Score each example, then learn from it; emit a record every ``eval_every`` examples.

    ``learner`` is a :class:`LearnerConfig` or any object with
    ``predict(g)``, ``learn(g, y, score=...)`` and ``size``. A window with a
    single class carries the previous metric value forward (``None`` until a
    value exists). ``cumulative_errors`` counts sign mistakes
    (``score > 0`` predicts +1).
    """
    model = make_model(learner) if isinstance(learner, LearnerConfig) else learner
    win_scores: deque[float] = deque(maxlen=cfg.window)
    win_labels: deque[int] = deque(maxlen=cfg.window)
    records: list[EvalRecord] = []
    all_scores: list[float] = []
    errors = 0
    elapsed = 0
    last_auc = last_bac = None
    n = 0
    clock = time.perf_counter_ns
    for n, ex in enumerate(stream, 1):
        g, y = ex.graph, ex.label
        t0 = clock()
        score = model.predict(g)
        model.learn(g, y, score=score)
        elapsed += clock() - t0
        all_scores.append(score)
        win_scores.append(score)
        win_labels.append(y)
        if (1 if score > 0 else -1) != y:
            errors += 1
        if n % cfg.eval_every == 0:
            try:
                last_auc = auroc(win_scores, win_labels)
            except UndefinedMetric:
                pass
            try:
                last_bac = balanced_accuracy([1 if s > 0 else -1 for s in win_scores], win_labels)
            except UndefinedMetric:
                pass
            records.append(EvalRecord(n - 1, last_auc, last_bac, errors, model.size, elapsed))
    summary = Summary(
        n_examples=n,
        mean_auroc=_mean(r.auroc_window for r in records),
        mean_balanced_accuracy=_mean(r.balanced_accuracy_window for r in records),
        total_errors=errors,
        total_ns=elapsed,
        final_model_size=model.size,
    )
    return RunResult(records, summary, all_scores)
