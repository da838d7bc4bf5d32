# Explicit feature maps for three graph kernels, printed in readable form.
import numpy as np

from gsb import FeatureIndex, Graph, KernelConfig, features, gram_matrix, kernel

# a small molecule-like graph: C-N-C with an O hanging off the first carbon
g = Graph(["C", "N", "C", "O"], [(0, 1), (1, 2), (0, 3)])
h = Graph(["C", "N", "O"], [(0, 1), (0, 2)])
index = FeatureIndex()

for cfg in (KernelConfig("fs", h=1), KernelConfig("nspdk", d=1, h=1), KernelConfig("odd", h=2, lam=0.8)):
    phi = features(cfg, g, index)
    print(f"{cfg.kind}: {phi.nnz} features")
    for fid, value in sorted(phi.items(), key=lambda kv: index.describe(kv[0]))[:8]:
        print(f"   {index.describe(fid):<32} {value:.3f}")
    print(f"   k(g, h) = {kernel(cfg, g, h, index):.3f}\n")

# relabeling the nodes changes nothing
perm = [2, 0, 3, 1]
assert features(KernelConfig("fs", h=2), g, index) == features(KernelConfig("fs", h=2), g.permuted(perm), index)

# Gram matrices are positive semidefinite; normalized ones have a unit diagonal
graphs = [g, h, Graph(["O", "O"], [(0, 1)]), Graph(["C"]), Graph(["N", "C", "C"], [(0, 1), (1, 2), (0, 2)])]
K = gram_matrix(KernelConfig("nspdk", d=2, h=1, normalize=True), graphs, index)
print(np.round(K, 3))
print("smallest eigenvalue:", np.linalg.eigvalsh(K).min().round(6))
