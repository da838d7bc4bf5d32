import math
import random
from collections import Counter
from itertools import product

import numpy as np
import pytest

from conftest import random_graph, random_permutation
from gsb.graph import Graph, bfs_dag, bfs_distances, canonical_subtree_string
from gsb.kernels import FeatureIndex, KernelConfig, SparseVector, features, gram_matrix, kernel


# --- independent string oracles -------------------------------------------


def wl_oracle(g, h):
    """Uncompressed WL relabeling with full strings."""
    out = Counter()
    cur = list(g.labels)
    for k in range(h + 1):
        out.update((k, lab) for lab in cur)
        cur = [cur[v] + "|[" + ",".join(sorted(cur[u] for u in g.adjacency[v])) + "]" for v in range(g.n_nodes)]
    return dict(out)


def tree_size(s):
    # every node contributes exactly one label token
    return len([tok for tok in s.replace("(", ",").replace(")", ",").split(",") if tok])


def odd_oracle(g, h, lam):
    out = Counter()
    for root in range(g.n_nodes):
        dag = bfs_dag(g, root, h)
        for v in dag.order:
            s = canonical_subtree_string(dag, v)
            out[s] += lam ** (tree_size(s) / 2)
    return dict(out)


def nspdk_oracle(g, d, h):
    out = Counter()
    for r in range(h + 1):
        canon = [canonical_subtree_string(bfs_dag(g, u, r), u) for u in range(g.n_nodes)]
        for u in range(g.n_nodes):
            for v, dist in bfs_distances(g, u, d).items():
                if v >= u:
                    out[(r, dist, tuple(sorted((canon[u], canon[v]))))] += 1
    return dict(out)


def decode(cfg, phi, index):
    out = {}
    for fid, val in phi.items():
        key = index.key(fid)
        if cfg.kind == "fs":
            name = (key[1], index.describe(fid))
        elif cfg.kind == "odd":
            name = index.describe(fid)
        else:
            _, r, dist, a, b = key
            name = (r, dist, tuple(sorted((index.describe(a), index.describe(b)))))
        out[name] = val
    return out


def oracle(cfg, g):
    if cfg.kind == "fs":
        return wl_oracle(g, cfg.h)
    if cfg.kind == "odd":
        return odd_oracle(g, cfg.h, cfg.lam)
    return nspdk_oracle(g, cfg.d, cfg.h)


def path(*labels):
    return Graph(labels, [(i, i + 1) for i in range(len(labels) - 1)])


# --- worked examples -------------------------------------------------------------


def test_fs_single_node():
    idx = FeatureIndex()
    cfg = KernelConfig("fs", h=0)
    phi = features(cfg, Graph(["C"]), idx)
    assert decode(cfg, phi, idx) == {(0, "C"): 1.0}


def test_fs_path():
    idx = FeatureIndex()
    cfg = KernelConfig("fs", h=1)
    phi = features(cfg, path("A", "B", "A"), idx)
    assert decode(cfg, phi, idx) == {(0, "A"): 2, (0, "B"): 1, (1, "A|[B]"): 2, (1, "B|[A,A]"): 1}
    assert phi.nnz == 4


def test_nspdk_single_node():
    # one self pair per radius r in 0..h
    idx = FeatureIndex()
    cfg = KernelConfig("nspdk", d=1, h=1)
    phi = features(cfg, Graph(["C"]), idx)
    assert decode(cfg, phi, idx) == {(0, 0, ("C", "C")): 1, (1, 0, ("C", "C")): 1}


def test_nspdk_edge():
    idx = FeatureIndex()
    cfg = KernelConfig("nspdk", d=1, h=0)
    phi = features(cfg, path("A", "B"), idx)
    assert decode(cfg, phi, idx) == {(0, 0, ("A", "A")): 1, (0, 0, ("B", "B")): 1, (0, 1, ("A", "B")): 1}
    assert phi.nnz == 3


def test_odd_edge():
    idx = FeatureIndex()
    cfg = KernelConfig("odd", h=1, lam=1.0)
    phi = features(cfg, path("A", "B"), idx)
    assert decode(cfg, phi, idx) == {"A": 1, "B": 1, "A(B)": 1, "B(A)": 1}


@pytest.mark.parametrize("h", [1, 3])
def test_odd_single_node(h):
    idx = FeatureIndex()
    cfg = KernelConfig("odd", h=h, lam=0.25)
    assert decode(cfg, features(cfg, Graph(["C"]), idx), idx) == {"C": 0.5}


def test_odd_weight_squares_in_kernel():
    # matching subtree t contributes lam^|t| to the kernel
    lam = 1.4
    cfg = KernelConfig("odd", h=1, lam=lam)
    g = path("A", "B")
    assert kernel(cfg, g, g) == pytest.approx(2 * lam + 2 * lam**2)


def test_kernel_disjoint_labels():
    cfg = KernelConfig("fs", h=0)
    assert kernel(cfg, Graph(["A"]), Graph(["B"])) == 0.0


# --- oracle agreement -----------------------------------------------------------

CONFIGS = [
    KernelConfig("fs", h=0),
    KernelConfig("fs", h=1),
    KernelConfig("fs", h=3),
    KernelConfig("nspdk", d=1, h=1),
    KernelConfig("nspdk", d=3, h=2),
    KernelConfig("nspdk", d=2, h=4),
    KernelConfig("odd", h=1, lam=1.0),
    KernelConfig("odd", h=2, lam=0.8),
    KernelConfig("odd", h=4, lam=1.6),
]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: f"{c.kind}-h{c.h}-d{c.d}")
def test_features_match_oracle(cfg):
    rng = random.Random(hash((cfg.kind, cfg.h, cfg.d)) & 0xFFFF)
    idx = FeatureIndex()
    for _ in range(60):
        g = random_graph(rng, n_max=9)
        got = decode(cfg, features(cfg, g, idx), idx)
        want = oracle(cfg, g)
        assert got.keys() == want.keys()
        for k in want:
            assert got[k] == pytest.approx(want[k], rel=1e-12)


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: f"{c.kind}-h{c.h}-d{c.d}")
def test_permutation_invariance(cfg):
    rng = random.Random(7)
    idx = FeatureIndex()
    for _ in range(50):
        g = random_graph(rng, n_max=10)
        pg = g.permuted(random_permutation(rng, g.n_nodes))
        assert features(cfg, g, idx) == features(cfg, pg, idx)


def test_symmetry_and_self_kernel():
    rng = random.Random(3)
    for cfg in CONFIGS:
        for _ in range(100 // len(CONFIGS) + 1):
            g1, g2 = random_graph(rng), random_graph(rng)
            assert kernel(cfg, g1, g2) == kernel(cfg, g2, g1)
            assert kernel(cfg, g1, g1) >= 0


@pytest.mark.parametrize("kind", ["fs", "nspdk", "odd"])
def test_normalized_self_kernel_is_one(kind):
    rng = random.Random(4)
    cfg = KernelConfig(kind, h=2, d=2, lam=1.2, normalize=True)
    for _ in range(30):
        g = random_graph(rng)
        assert abs(kernel(cfg, g, g) - 1.0) <= 1e-12


def test_nnz_bounds():
    rng = random.Random(5)
    for _ in range(200):
        g = random_graph(rng, n_max=12)
        n = g.n_nodes
        h = rng.randint(0, 4)
        d = rng.randint(1, 4)
        assert features(KernelConfig("fs", h=h), g).nnz <= n * (h + 1)
        pairs = sum(1 for u in range(n) for v in bfs_distances(g, u, d) if v >= u)
        assert features(KernelConfig("nspdk", d=d, h=max(h, 1)), g).nnz <= (max(h, 1) + 1) * pairs
        dag_nodes = sum(len(bfs_dag(g, u, max(h, 1))) for u in range(n))
        assert features(KernelConfig("odd", h=max(h, 1)), g).nnz <= dag_nodes


def test_gram_psd():
    rng = random.Random(6)
    graphs = [random_graph(rng, n_max=10) for _ in range(20)]
    for cfg in CONFIGS:
        K = gram_matrix(cfg, graphs)
        assert np.array_equal(K, K.T)
        ev = np.linalg.eigvalsh(K)
        assert ev.min() >= -1e-8 * ev.max()


def test_interning_is_bijective():
    idx = FeatureIndex()
    a = idx.intern(("x", 1))
    assert idx.intern(("x", 1)) == a
    b = idx.intern(("x", 2))
    assert b != a and idx.key(a) == ("x", 1) and idx.key(b) == ("x", 2)
    assert len(idx) == 2


def test_sparse_vector_ops():
    v = SparseVector({1: 2.0, 2: -1.0})
    w = SparseVector({2: 3.0, 5: 1.0})
    assert v.dot(w) == -3.0 == w.dot(v)
    v.add_scaled(SparseVector({2: 1.0}), 1.0)
    assert v == {1: 2.0}
    assert v.norm() == 2.0
    assert v.scaled(0) == {}


def test_config_validation():
    with pytest.raises(ValueError):
        KernelConfig("walk")
    with pytest.raises(ValueError):
        KernelConfig("odd", lam=0)
    with pytest.warns(UserWarning):
        KernelConfig("fs", h=12)
