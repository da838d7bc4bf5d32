"""Graph stream files and a seeded synthetic concept-drift generator.

File format (UTF-8, one record per line)::

    g <id>              start a graph block
    v <index> <label>   node; indices must run 0, 1, 2, ... in order
    e <i> <j>           undirected edge with i < j
    l <+1|-1>           class label; closes the block

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import Graph, GraphError, LabeledExample


class StreamFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def iter_stream(lines: Iterable[str]) -> Iterator[LabeledExample]:
    """Lazily parse stream lines into examples numbered 0, 1, 2, ..."""
    t = 0
    gid = None
    labels: list[str] = []
    edges: list[tuple[int, int]] = []
    start = 0
    open_block = False
    lineno = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        if tag == "g":
            if open_block:
                raise StreamFormatError(lineno, f"graph block started at line {start} has no label line")
            if len(args) > 1:
                raise StreamFormatError(lineno, "expected 'g <id>'")
            gid = args[0] if args else None
            labels, edges = [], []
            open_block, start = True, lineno
            continue
        if not open_block:
            raise StreamFormatError(lineno, f"{tag!r} record outside a graph block")
        if tag == "v":
            if len(args) != 2:
                raise StreamFormatError(lineno, "expected 'v <index> <label>'")
            idx = _int(args[0], lineno)
            if idx != len(labels):
                raise StreamFormatError(lineno, f"node index {idx} out of order, expected {len(labels)}")
            labels.append(args[1])
        elif tag == "e":
            if len(args) != 2:
                raise StreamFormatError(lineno, "expected 'e <i> <j>'")
            i, j = _int(args[0], lineno), _int(args[1], lineno)
            for end in (i, j):
                if not 0 <= end < len(labels):
                    raise StreamFormatError(lineno, f"edge endpoint {end} is not a declared node (have {len(labels)})")
            if i >= j:
                raise StreamFormatError(lineno, f"edge must satisfy i < j, got {i} {j}")
            edges.append((i, j))
        elif tag == "l":
            if len(args) != 1 or args[0] not in ("+1", "-1", "1"):
                raise StreamFormatError(lineno, f"label must be +1 or -1, got {' '.join(args)!r}")
            try:
                g = Graph(labels, edges, id=gid)
            except GraphError as exc:
                raise StreamFormatError(lineno, str(exc)) from None
            yield LabeledExample(g, 1 if args[0] != "-1" else -1, t)
            t += 1
            open_block = False
        else:
            raise StreamFormatError(lineno, f"unknown record type {tag!r}")
    if open_block:
        raise StreamFormatError(lineno, f"graph block started at line {start} is not terminated by a label line")


def _int(s: str, lineno: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise StreamFormatError(lineno, f"expected an integer, got {s!r}") from None


def parse_stream(text: str | Iterable[str]) -> list[LabeledExample]:
    if isinstance(text, str):
        text = text.splitlines()
    return list(iter_stream(text))


def read_stream(path) -> list[LabeledExample]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_stream(fh))


def write_stream(examples: Iterable[LabeledExample]) -> str:
    out = []
    for k, ex in enumerate(examples):
        g = ex.graph
        out.append(f"g {g.id if g.id is not None else k}")
        out.extend(f"v {i} {lab}" for i, lab in enumerate(g.labels))
        out.extend(f"e {i} {j}" for i, j in g.edges)
        out.append("l +1" if ex.label > 0 else "l -1")
    return "".join(line + "\n" for line in out)


@dataclass(frozen=True)
class StreamSegmentConfig:
    """One stationary stretch of the stream.

    A graph is positive iff it has an edge whose endpoint labels are exactly
    ``concept`` (as an unordered pair).
    """

    count: int
    concept: tuple[str, str]
    nodes: tuple[int, int] = (5, 10)
    extra_edges: tuple[int, int] = (0, 3)
    alphabet: tuple[str, ...] = ("C", "N", "O", "S")
    noise: float = 0.0
    target_positive_rate: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "concept", tuple(self.concept))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "extra_edges", tuple(self.extra_edges))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if self.count < 1:
            raise ValueError("segment count must be >= 1")
        if not 1 <= self.nodes[0] <= self.nodes[1]:
            raise ValueError(f"invalid node range {self.nodes}")
        if not 0 <= self.extra_edges[0] <= self.extra_edges[1]:
            raise ValueError(f"invalid extra edge range {self.extra_edges}")
        if not 0 <= self.noise < 0.5:
            raise ValueError("noise must be in [0, 0.5)")
        if not 0 <= self.target_positive_rate <= 1:
            raise ValueError("target_positive_rate must be in [0, 1]")
        if len(self.concept) != 2:
            raise ValueError("concept is a pair of node labels")


@dataclass(frozen=True)
class DriftStreamConfig:
    segments: tuple[StreamSegmentConfig, ...]
    seed: int = 0
    max_attempts: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("a stream needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if frozenset(a.concept) == frozenset(b.concept):
                raise ValueError(f"consecutive segments share the concept {a.concept}; there would be no drift")

    @classmethod
    def from_dict(cls, d: dict) -> "DriftStreamConfig":
        segs = [StreamSegmentConfig(**s) for s in d["segments"]]
        return cls(segments=segs, **{k: v for k, v in d.items() if k != "segments"})

    @classmethod
    def load(cls, path) -> "DriftStreamConfig":
        with open(path, encoding="utf-8") as fh:
            if str(path).endswith((".yaml", ".yml")):
                import yaml

                return cls.from_dict(yaml.safe_load(fh))
            return cls.from_dict(json.load(fh))


class InfeasibleStream(RuntimeError):
    """The generator could not produce a graph of the requested class."""


def has_concept_edge(g: Graph, concept: Sequence[str]) -> bool:
    a, b = concept
    labels = g.labels
    for i, j in g.edges:
        li, lj = labels[i], labels[j]
        if (li == a and lj == b) or (li == b and lj == a):
            return True
    return False


def random_graph(rng: np.random.Generator, seg: StreamSegmentConfig, gid: str | None = None) -> Graph:
    """Random spanning tree plus extra edges, uniform node labels."""
    n = int(rng.integers(seg.nodes[0], seg.nodes[1] + 1))
    labels = [seg.alphabet[k] for k in rng.integers(len(seg.alphabet), size=n)]
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(u, v), max(u, v)))
    free = n * (n - 1) // 2 - len(edges)
    extra = min(int(rng.integers(seg.extra_edges[0], seg.extra_edges[1] + 1)), free)
    while extra > 0:
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        e = (min(u, v), max(u, v))
        if e not in edges:
            edges.add(e)
            extra -= 1
    return Graph(labels, sorted(edges), id=gid)


def generate_drift_stream(cfg: DriftStreamConfig) -> list[LabeledExample]:
    """Concatenate the segments; labels come from each segment's concept.

    Each segment has exactly ``round(count * target_positive_rate)`` positive
    graphs (before noise) at shuffled positions; graphs are drawn by rejection
    until their class matches the slot.
    """
    rng = np.random.default_rng(cfg.seed)
    out: list[LabeledExample] = []
    for s, seg in enumerate(cfg.segments):
        n_pos = int(round(seg.count * seg.target_positive_rate))
        want = np.zeros(seg.count, dtype=bool)
        want[:n_pos] = True
        rng.shuffle(want)
        for k in range(seg.count):
            t = len(out)
            for _ in range(cfg.max_attempts):
                g = random_graph(rng, seg, gid=str(t))
                if has_concept_edge(g, seg.concept) == want[k]:
                    break
            else:
                kind = "positive" if want[k] else "negative"
                raise InfeasibleStream(
                    f"segment {s}: no {kind} graph for concept {seg.concept} after {cfg.max_attempts} attempts"
                )
            y = 1 if want[k] else -1
            if seg.noise > 0 and rng.random() < seg.noise:
                y = -y
            out.append(LabeledExample(g, y, t))
    return out
