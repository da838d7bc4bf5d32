"""Labeled undirected graphs, BFS traversals and rooted-subtree encodings.

Everything here is immutable and pure; the kernels build on these three
primitives (hop distances, BFS DAGs and canonical subtree strings).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Raised when a graph violates the structural invariants."""


class Graph:
    """Immutable node-labeled undirected graph over node indices ``0..n-1``.

    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``. Self-loops and
    duplicate edges are rejected.
    """

    __slots__ = ("labels", "edges", "id", "adjacency")

    def __init__(self, labels: Sequence[str], edges: Iterable[tuple[int, int]] = (), id: str | None = None):
        labels = tuple(str(lab) for lab in labels)
        n = len(labels)
        if n < 1:
            raise GraphError("a graph needs at least one node")
        for lab in labels:
            if not lab or any(c.isspace() for c in lab):
                raise GraphError(f"invalid node label {lab!r}")
        seen = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) has an endpoint outside 0..{n - 1}")
            if i == j:
                raise GraphError(f"self-loop on node {i}")
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.labels, self.edges, self.id))

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def max_outdegree(self) -> int:
        return max(len(a) for a in self.adjacency)

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Return the isomorphic graph where old node ``i`` becomes ``perm[i]``."""
        n = self.n_nodes
        labels = [""] * n
        for old, new in enumerate(perm):
            labels[new] = self.labels[old]
        return Graph(labels, [(perm[i], perm[j]) for i, j in self.edges], id=self.id)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.labels == other.labels and self.edges == other.edges and self.id == other.id

    def __hash__(self):
        return hash((self.labels, self.edges, self.id))

    def __repr__(self):
        return f"Graph(n={self.n_nodes}, m={self.n_edges}, id={self.id!r})"


@dataclass(frozen=True)
class Dag:
    """BFS DAG rooted at ``root``; node keys are indices of the source graph.

    ``order`` lists the nodes in BFS order (parents before children).
    """

    root: int
    order: tuple[int, ...]
    labels: Mapping[int, str]
    children: Mapping[int, tuple[int, ...]]
    depth: Mapping[int, int]

    def __len__(self):
        return len(self.order)


@dataclass(frozen=True)
class LabeledExample:
    graph: Graph
    label: int
    t: int = 0

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.label!r}")


def bfs_distances(g: Graph, source: int, max_dist: int) -> dict[int, int]:
    """Hop distances from ``source`` to every node at distance <= ``max_dist``."""
    if not 0 <= source < g.n_nodes:
        raise GraphError(f"source {source} not in graph")
    dist = {source: 0}
    frontier = [source]
    adj = g.adjacency
    for k in range(1, max_dist + 1):
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = k
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    return dist


def bfs_dag(g: Graph, root: int, h: int) -> Dag:
    """Breadth-first DAG of ``g`` from ``root`` down to depth ``h``.

    Only edges from depth k to depth k+1 are kept; edges inside one BFS level
    (they would close a cycle) are dropped. A node may have several parents.
    """
    depth = bfs_distances(g, root, h)
    order = sorted(depth, key=lambda v: (depth[v], v))
    adj = g.adjacency
    children = {}
    for v in order:
        d = depth[v] + 1
        children[v] = tuple(u for u in adj[v] if depth.get(u) == d)
    labels = {v: g.labels[v] for v in order}
    return Dag(root=root, order=tuple(order), labels=labels, children=children, depth=depth)


def canonical_subtree_string(dag: Dag, v: int) -> str:
    """Canonical encoding of the rooted substructure of ``dag`` below ``v``.

    ``label(child1,child2,...)`` with child encodings sorted lexicographically;
    a leaf is just its label.
    """
    memo: dict[int, str] = {}
    # children always sit one level deeper, so reverse BFS order is bottom-up
    for u in reversed(dag.order):
        kids = dag.children[u]
        if kids:
            memo[u] = dag.labels[u] + "(" + ",".join(sorted(memo[c] for c in kids)) + ")"
        else:
            memo[u] = dag.labels[u]
        if u == v:
            break
    if v not in memo:
        raise GraphError(f"node {v} is not in the dag")
    return memo[v]
