"""Budgeted passive-aggressive learners over graph streams.

Three representations of the same hypothesis:

* :class:`DualModel` stores graphs and recomputes kernel values from scratch
  at every prediction;
* :class:`MixedModel` stores the feature image of each support graph;
* :class:`PrimalModel` stores only the weight vector ``w``.

With an unbounded budget all three make the same predictions. Under a budget
they differ in what gets evicted and in how model size is counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .budget import (
    EXAMPLE_POLICIES,
    FEATURE_POLICIES,
    SIGMA,
    Decision,
    FeatureAdmission,
    FScoreTracker,
    Policy,
    PolicyConfig,
    select_victim_example,
)
from .graph import Graph
from .kernels import FeatureIndex, KernelConfig, SparseVector, features

DUAL = "dual"
MIXED = "mixed"
PRIMAL = "primal"
ALGORITHMS = (DUAL, MIXED, PRIMAL)

# memory units per (feature id, value) pair in a stored feature image
MIXED_SIGMA = 2


class DegenerateKernel(ValueError):
    """The example's kernel self-value is not positive."""


@dataclass(frozen=True)
class LearnerConfig:
    algorithm: str = PRIMAL
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    budget: float = math.inf
    C: float = 0.01
    beta: float = 1.0
    kernel: KernelConfig = field(default_factory=KernelConfig)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not (self.budget >= 1):
            raise ValueError(f"budget must be >= 1 or inf, got {self.budget!r}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C!r}")
        allowed = FEATURE_POLICIES if self.algorithm == PRIMAL else EXAMPLE_POLICIES
        if self.policy.kind not in allowed:
            names = sorted(p.value for p in allowed)
            raise ValueError(f"policy {self.policy.kind.value!r} is not available for {self.algorithm}; use one of {names}")


@dataclass
class UpdateOutcome:
    score: float
    margin_error: bool
    tau: float = 0.0
    evicted: int = 0
    inserted: bool = False
    dropped_example: bool = False


def compute_tau(score: float, y: int, k_self: float, C: float) -> float:
    """BPA-S step size ``min(C, max(0, 1 - y*score) / K(x, x))``."""
    if not k_self > 0:
        raise DegenerateKernel(f"kernel self-value must be positive, got {k_self}")
    return min(C, max(0.0, 1.0 - y * score) / k_self)


class _Model:
    def __init__(self, cfg: LearnerConfig, index: FeatureIndex | None = None):
        self.cfg = cfg
        self.index = index
        self.rng = cfg.policy.rng()
        self.t = 0
        self._last: tuple[Graph, SparseVector] | None = None

    def _phi(self, g: Graph) -> SparseVector:
        # the incoming graph is usually scored and then learned from
        last = self._last
        if last is not None and last[0] is g:
            return last[1]
        phi = features(self.cfg.kernel, g, self.index)
        self._last = (g, phi)
        return phi

    def predict(self, g: Graph) -> float:
        raise NotImplementedError

    def learn(self, g: Graph, y: int, score: float | None = None) -> UpdateOutcome:
        """One online round on ``(g, y)``; pass ``score`` if ``predict(g)`` was already called."""
        if score is None:
            score = self.predict(g)
        t = self.t
        self.t += 1
        phi = self._phi(g)
        out = UpdateOutcome(score=score, margin_error=y * score <= self.cfg.beta)
        self._observe(phi, y)
        if not out.margin_error:
            return out
        tau = compute_tau(score, y, phi.dot(phi), self.cfg.C)
        if tau == 0.0:
            return out
        self._update(g, phi, y, tau, t, out)
        return out

    def _observe(self, phi: SparseVector, y: int) -> None:
        pass

    def _update(self, g, phi, y, tau, t, out) -> None:
        raise NotImplementedError

    @property
    def size(self) -> int:
        raise NotImplementedError


class _ExampleModel(_Model):
    """Shared budget loop of the dual and mixed learners."""

    def __init__(self, cfg, index=None):
        super().__init__(cfg, index)
        # [payload, alpha, tau, timestamp, size]
        self.entries: list[list] = []
        self._size = 0

    @property
    def size(self) -> int:
        return self._size

    def __len__(self):
        return len(self.entries)

    def _item(self, g: Graph, phi: SparseVector):
        raise NotImplementedError

    def _update(self, g, phi, y, tau, t, out):
        payload, need = self._item(g, phi)
        budget = self.cfg.budget
        if need > budget:
            out.dropped_example = True
            return
        entries = self.entries
        policy = self.cfg.policy.kind
        while self._size + need > budget:
            j = select_victim_example([(e[3], e[2]) for e in entries], policy, self.rng)
            self._size -= entries.pop(j)[4]
            out.evicted += 1
        entries.append([payload, y * tau, tau, t, need])
        self._size += need
        out.tau = tau
        out.inserted = True


class DualModel(_ExampleModel):
    """Support set of graphs; scores need one kernel evaluation per stored graph."""

    def _item(self, g, phi):
        return g, g.n_nodes + g.n_edges + 1

    def predict(self, g: Graph) -> float:
        phi = self._phi(g)
        cfg, index = self.cfg.kernel, self.index
        s = 0.0
        for e in self.entries:
            s += e[1] * features(cfg, e[0], index).dot(phi)
        return s


class MixedModel(_ExampleModel):
    """Support set of precomputed sparse feature images."""

    def _item(self, g, phi):
        return phi, 1 + MIXED_SIGMA * phi.nnz

    def predict(self, g: Graph) -> float:
        phi = self._phi(g)
        s = 0.0
        for e in self.entries:
            s += e[1] * e[0].dot(phi)
        return s


class PrimalModel(_Model):
    """Single sparse weight vector with per-feature eviction."""

    def __init__(self, cfg, index=None):
        super().__init__(cfg, index)
        self.w = SparseVector()
        self.sigma = SIGMA[cfg.policy.kind]
        self.slots = math.inf if math.isinf(cfg.budget) else int(cfg.budget // self.sigma)
        self.touched: dict[int, int] = {}
        self.tracker = FScoreTracker() if cfg.policy.kind is Policy.FSCORE else None

    @property
    def size(self) -> int:
        return self.sigma * len(self.w)

    def predict(self, g: Graph) -> float:
        return self.w.dot(self._phi(g))

    def _observe(self, phi, y):
        if self.tracker is not None:
            self.tracker.record(phi, y)

    def _update(self, g, phi, y, tau, t, out):
        w, touched = self.w, self.touched
        c = tau * y
        fresh = []
        for i, v in phi.items():
            x = w.get(i)
            if x is None:
                fresh.append((i, c * v))
                continue
            x += c * v
            if x == 0.0:
                del w[i]
                touched.pop(i, None)
            else:
                w[i] = x
                touched[i] = t
        out.tau = tau
        out.inserted = True
        if len(w) + len(fresh) <= self.slots:
            for i, x in fresh:
                w[i] = x
                touched[i] = t
            return
        fresh.sort(key=lambda p: (-abs(p[1]), p[0]))
        if self.cfg.policy.kind is Policy.RANDOM:
            self._admit_random(fresh, t, out)
        else:
            self._admit_scored(fresh, t, out)

    def _admit_random(self, fresh, t, out):
        w, touched, rng = self.w, self.touched, self.rng
        keys = list(w)
        for i, x in fresh:
            if len(keys) < self.slots:
                keys.append(i)
            elif keys:
                j = int(rng.integers(len(keys)))
                victim = keys[j]
                del w[victim]
                touched.pop(victim, None)
                keys[j] = i
                out.evicted += 1
            else:
                continue
            w[i] = x
            touched[i] = t

    def _admit_scored(self, fresh, t, out):
        w, touched = self.w, self.touched
        kind = self.cfg.policy.kind
        if kind is Policy.WEIGHT:
            scores = {i: abs(x) for i, x in w.items()}
        elif kind is Policy.OLDEST_FEATURE:
            scores = touched
        else:
            score = self.tracker.score
            scores = {i: score(i) for i in w}
        adm = FeatureAdmission(scores, self.slots)
        for i, x in fresh:
            if kind is Policy.WEIGHT:
                s = abs(x)
            elif kind is Policy.OLDEST_FEATURE:
                s = t
            else:
                s = self.tracker.score(i)
            decision = adm.offer(i, s)
            if decision.decision is Decision.REJECT:
                continue
            if decision.decision is Decision.EVICT_AND_INSERT:
                del w[decision.victim]
                touched.pop(decision.victim, None)
                out.evicted += 1
            w[i] = x
            touched[i] = t


_MODELS = {DUAL: DualModel, MIXED: MixedModel, PRIMAL: PrimalModel}


def make_model(cfg: LearnerConfig, index: FeatureIndex | None = None) -> _Model:
    return _MODELS[cfg.algorithm](cfg, index)
