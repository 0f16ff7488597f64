import numpy as np

from grub.graph import SimilarityGraph

# (criterion number, line) pairs collected by the acceptance suite
ACCEPTANCE_LINES = []


def random_graph(rng, n, p=0.5, weighted=False):
    A = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    on = rng.random(iu.size) < p
    w = rng.uniform(0.5, 2.0, iu.size) if weighted else np.ones(iu.size)
    A[iu[on], ju[on]] = w[on]
    return SimilarityGraph(A + A.T)


def random_connected_graph(rng, n, p=0.4, weighted=False):
    # random spanning tree plus extra edges
    A = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        u, v = order[k], order[rng.integers(k)]
        A[u, v] = A[v, u] = rng.uniform(0.5, 2.0) if weighted else 1.0
    iu, ju = np.triu_indices(n, k=1)
    extra = rng.random(iu.size) < p
    for u, v in zip(iu[extra], ju[extra]):
        if A[u, v] == 0:
            A[u, v] = A[v, u] = rng.uniform(0.5, 2.0) if weighted else 1.0
    return SimilarityGraph(A)


def complete_graph(n):
    return SimilarityGraph(np.ones((n, n)) - np.eye(n))


def path_graph(n):
    return SimilarityGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def config1_graph():
    """Isolated node 0, a 9-clique on 1..9 and nine 10-cliques on 10..99."""
    A = np.zeros((100, 100))
    blocks = [range(1, 10)] + [range(10 + 10 * c, 20 + 10 * c) for c in range(9)]
    for b in blocks:
        idx = np.array(list(b))
        A[np.ix_(idx, idx)] = 1.0
    np.fill_diagonal(A, 0.0)
    return SimilarityGraph(A)


def config1_means():
    mu = np.full(100, 10.0)
    mu[0] = 100.0
    mu[1:10] = 40.0
    return mu

