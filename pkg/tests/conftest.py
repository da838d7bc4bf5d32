import sys
import random

import pytest

from gsb.graph import Graph


def random_graph(rng: random.Random, n_max: int = 12, alphabet: str = "ABC", connected: bool = False) -> Graph:
    n = rng.randint(1, n_max)
    labels = [rng.choice(alphabet) for _ in range(n)]
    edges = set()
    if connected:
        for v in range(1, n):
            edges.add((rng.randrange(v), v))
    for _ in range(rng.randint(0, 2 * n)):
        if n > 1:
            i, j = sorted(rng.sample(range(n), 2))
            edges.add((i, j))
    return Graph(labels, edges)


def random_permutation(rng: random.Random, n: int) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is not None and acc.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acc.REPORT, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
