"""Explicit feature maps for the FS (Weisfeiler-Lehman subtree), NSPDK and
ODD_ST graph kernels.

Features are identified by integers handed out by a :class:`FeatureIndex`,
which interns a canonical key (a nested tuple) for every distinct
substructure. Two substructures get the same id iff their canonical keys are
equal, so there are no hash collisions.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Hashable, Iterable

from .graph import Graph

FS = "fs"
NSPDK = "nspdk"
ODD = "odd"
KERNELS = (FS, NSPDK, ODD)


class SparseVector(dict):
    """Feature id -> value map holding only nonzero entries."""

    @property
    def nnz(self) -> int:
        return len(self)

    def dot(self, other: "SparseVector") -> float:
        if len(other) < len(self):
            self, other = other, self
        get = other.get
        s = 0.0
        for k, v in self.items():
            w = get(k)
            if w is not None:
                s += v * w
        return s

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values()))

    def scaled(self, c: float) -> "SparseVector":
        if c == 0:
            return SparseVector()
        return SparseVector({k: v * c for k, v in self.items()})

    def add_scaled(self, other: "SparseVector", c: float) -> None:
        """In-place ``self += c * other``; entries that become exactly 0 are dropped."""
        for k, v in other.items():
            x = self.get(k, 0.0) + c * v
            if x == 0.0:
                self.pop(k, None)
            else:
                self[k] = x


class FeatureIndex:
    """Run-scoped interning table: canonical key <-> dense integer id.

    ``intern`` is safe to call from several threads; ids follow insertion
    order.
    """

    def __init__(self):
        self._ids: dict[Hashable, int] = {}
        self._keys: list[Hashable] = []
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._keys)

    def intern(self, key: Hashable) -> int:
        fid = self._ids.get(key)
        if fid is None:
            with self._lock:
                fid = self._ids.get(key)
                if fid is None:
                    fid = len(self._keys)
                    self._keys.append(key)
                    self._ids[key] = fid
        return fid

    def key(self, fid: int) -> Hashable:
        return self._keys[fid]

    def describe(self, fid: int) -> str:
        """Human-readable canonical string of a feature id (for debugging and tests)."""
        key = self._keys[fid]
        kind = key[0]
        if kind == "st":
            _, label, kids = key
            if not kids:
                return label
            return label + "(" + ",".join(sorted(self.describe(c) for c in kids)) + ")"
        if kind == "wl":
            _, k, label = key[:3]
            if k == 0:
                return label
            own, nbrs = key[2], key[3]
            return self.describe(own) + "|[" + ",".join(sorted(self.describe(c) for c in nbrs)) + "]"
        if kind == "nspdk":
            _, r, dist, a, b = key
            return f"r{r}:d{dist}:{self.describe(a)}~{self.describe(b)}"
        return repr(key)


default_index = FeatureIndex()

_GRIDS = {FS: {"h": (0, 8)}, NSPDK: {"d": (1, 6), "h": (1, 4)}, ODD: {"h": (1, 4)}}


@dataclass(frozen=True)
class KernelConfig:
    """Kernel variant and parameters.

    ``h`` is the WL iteration count (FS), the neighborhood radius (NSPDK) or
    the BFS DAG height (ODD); ``d`` is the NSPDK maximum pair distance and
    ``lam`` the ODD subtree-size weight.
    """

    kind: str = FS
    h: int = 1
    d: int = 1
    lam: float = 1.0
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ValueError(f"unknown kernel {self.kind!r}; expected one of {KERNELS}")
        if self.h < 0 or self.d < 0:
            raise ValueError("kernel parameters h and d must be non-negative")
        if self.kind == ODD and not self.lam > 0:
            raise ValueError("ODD lambda must be positive")
        for name, (lo, hi) in _GRIDS[self.kind].items():
            value = getattr(self, name)
            if not lo <= value <= hi:
                warnings.warn(f"{self.kind} {name}={value} is outside the usual range {lo}..{hi}", stacklevel=3)


def features(cfg: KernelConfig, g: Graph, index: FeatureIndex | None = None) -> SparseVector:
    """Explicit feature image of ``g`` under ``cfg``."""
    index = default_index if index is None else index
    if cfg.kind == FS:
        phi = _fs_features(g, cfg.h, index)
    elif cfg.kind == NSPDK:
        phi = _nspdk_features(g, cfg.d, cfg.h, index)
    else:
        phi = _odd_features(g, cfg.h, cfg.lam, index)
    if cfg.normalize:
        phi = phi.scaled(1.0 / phi.norm())
    return phi


def kernel(cfg: KernelConfig, g1: Graph, g2: Graph, index: FeatureIndex | None = None) -> float:
    """Kernel value as a dot product of freshly computed feature images."""
    return features(cfg, g1, index).dot(features(cfg, g2, index))


def gram_matrix(cfg: KernelConfig, graphs: Iterable[Graph], index: FeatureIndex | None = None):
    import numpy as np

    phis = [features(cfg, g, index) for g in graphs]
    n = len(phis)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            K[i, j] = K[j, i] = phis[i].dot(phis[j])
    return K


def _fs_features(g: Graph, h: int, index: FeatureIndex) -> SparseVector:
    get, intern = index._ids.get, index.intern
    phi = SparseVector()
    cur = []
    for lab in g.labels:
        key = ("wl", 0, lab)
        fid = get(key)
        cur.append(intern(key) if fid is None else fid)
    for fid in cur:
        phi[fid] = phi.get(fid, 0.0) + 1.0
    adj = g.adjacency
    for k in range(1, h + 1):
        nxt = []
        for v, own in enumerate(cur):
            key = ("wl", k, own, tuple(sorted([cur[u] for u in adj[v]])))
            fid = get(key)
            nxt.append(intern(key) if fid is None else fid)
        cur = nxt
        for fid in cur:
            phi[fid] = phi.get(fid, 0.0) + 1.0
    return phi


def _bfs_levels(adj, root: int, h: int, depth: list[int]) -> list[list[int]]:
    """BFS levels from ``root`` up to depth ``h``; fills ``depth`` (reset by caller)."""
    depth[root] = 0
    levels = [[root]]
    frontier = levels[0]
    for k in range(1, h + 1):
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if depth[u] < 0:
                    depth[u] = k
                    nxt.append(u)
        if not nxt:
            break
        levels.append(nxt)
        frontier = nxt
    return levels


def _leaf_ids(labels, get, intern) -> list[int]:
    out = []
    for lab in labels:
        key = ("st", lab, ())
        fid = get(key)
        out.append(intern(key) if fid is None else fid)
    return out


def _odd_features(g: Graph, h: int, lam: float, index: FeatureIndex) -> SparseVector:
    get, intern = index._ids.get, index.intern
    labels, adj = g.labels, g.adjacency
    n = len(labels)
    leaf = _leaf_ids(labels, get, intern)
    phi = SparseVector()
    if h == 0 or not g.edges:
        leaf_w = math.sqrt(lam)
        for fid in leaf:
            phi[fid] = phi.get(fid, 0.0) + leaf_w
        return phi
    weights = {}
    depth = [-1] * n
    ids = [0] * n
    sizes = [0] * n
    for root in range(n):
        levels = _bfs_levels(adj, root, h, depth)
        for k in range(len(levels) - 1, -1, -1):
            below = k + 1
            for v in levels[k]:
                kids = [u for u in adj[v] if depth[u] == below]
                if kids:
                    key = ("st", labels[v], tuple(sorted([ids[u] for u in kids])))
                    fid = get(key)
                    if fid is None:
                        fid = intern(key)
                    size = 1
                    for u in kids:
                        size += sizes[u]
                else:
                    fid = leaf[v]
                    size = 1
                ids[v] = fid
                sizes[v] = size
                w = weights.get(size)
                if w is None:
                    w = weights[size] = lam ** (size / 2)
                phi[fid] = phi.get(fid, 0.0) + w
        for level in levels:
            for v in level:
                depth[v] = -1
    return phi


def _nspdk_features(g: Graph, d: int, h: int, index: FeatureIndex) -> SparseVector:
    get, intern = index._ids.get, index.intern
    labels, adj = g.labels, g.adjacency
    n = len(labels)
    leaf = _leaf_ids(labels, get, intern)
    depth = [-1] * n
    ids = [0] * n
    # neigh[u][r] = canonical id of the radius-r BFS neighborhood of u
    neigh = []
    near = []
    for u in range(n):
        levels = _bfs_levels(adj, u, max(d, h), depth)
        top = min(h, len(levels) - 1)
        row = [leaf[u]]
        if top > 0:
            kids_of = {}
            for k in range(top):
                below = k + 1
                for v in levels[k]:
                    kids_of[v] = [x for x in adj[v] if depth[x] == below]
            for r in range(1, h + 1):
                # ids[v] = canonical id of v's substructure truncated at absolute depth r
                m = min(r, top)
                for v in levels[m]:
                    ids[v] = leaf[v]
                for k in range(m - 1, -1, -1):
                    for v in levels[k]:
                        kids = kids_of[v]
                        if kids:
                            key = ("st", labels[v], tuple(sorted([ids[x] for x in kids])))
                            fid = get(key)
                            ids[v] = intern(key) if fid is None else fid
                        else:
                            ids[v] = leaf[v]
                row.append(ids[u])
        else:
            row *= h + 1
        neigh.append(row)
        near.append([(v, k) for k in range(min(d, len(levels) - 1) + 1) for v in levels[k] if v >= u])
        for level in levels:
            for v in level:
                depth[v] = -1
    phi = SparseVector()
    rs = range(h + 1)
    for u in range(n):
        nu = neigh[u]
        for v, dist in near[u]:
            nv = neigh[v]
            for r in rs:
                a, b = nu[r], nv[r]
                key = ("nspdk", r, dist, a, b) if a <= b else ("nspdk", r, dist, b, a)
                fid = get(key)
                if fid is None:
                    fid = intern(key)
                phi[fid] = phi.get(fid, 0.0) + 1.0
    return phi
