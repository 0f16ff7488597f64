import itertools

import numpy as np
import pytest

from grub.estimator import init_design, record_pull
from grub.graph import SimilarityGraph
from grub.influence import (
    DegenerateInfluenceError,
    NoKMatrixError,
    diag_upper_bound,
    influence_factor,
    influence_table,
    k_matrix,
)

from .helpers import complete_graph, path_graph, random_connected_graph


def test_k_matrix_complete_k3():
    K, members = k_matrix(complete_graph(3), 0, rho=1.0)
    assert members == (0, 1, 2)
    expected = np.array([[0, 0, 0], [0, 2 / 3, 1 / 3], [0, 1 / 3, 2 / 3]])
    np.testing.assert_allclose(K, expected, atol=1e-12)


def test_k_matrix_path_p3():
    K, _ = k_matrix(path_graph(3), 0, rho=1.0)
    # distance form: K_jj = d(0, j), K_jk = min(d(0, j), d(0, k))
    expected = np.array([[0, 0, 0], [0, 1, 1], [0, 1, 2]])
    np.testing.assert_allclose(K, expected, atol=1e-12)


def test_k_matrix_line_distance_form():
    n = 6
    g = path_graph(n)
    for i in range(n):
        K, _ = k_matrix(g, i, 1.0)
        d = np.abs(np.arange(n) - i)
        side = np.sign(np.arange(n) - i)
        expected = np.where(side[:, None] == side[None, :], np.minimum(d[:, None], d[None, :]), 0)
        np.testing.assert_allclose(K, expected, atol=1e-10)


def test_k_matrix_properties(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n, weighted=True)
        rho = float(rng.uniform(0.3, 4))
        i = int(rng.integers(n))
        K, _ = k_matrix(g, i, rho)
        ones = np.ones((n, 1))
        e = np.zeros((1, n))
        e[0, i] = 1
        np.testing.assert_allclose(ones @ e + rho * K @ g.laplacian, np.eye(n), atol=1e-8)
        assert np.abs(K[i]).max() < 1e-10 and np.abs(K[:, i]).max() < 1e-10
        assert np.linalg.eigvalsh(K).min() > -1e-9


def test_k_matrix_matches_repeated_pull_inverse(rng):
    for _ in range(10):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n)
        i = int(rng.integers(n))
        K, _ = k_matrix(g, i, 1.0)
        for T in (1, 2, 5):
            V = g.laplacian.copy()
            V[i, i] += T
            np.testing.assert_allclose(np.linalg.inv(V) - np.ones((n, n)) / T, K, atol=1e-9)


def test_k_matrix_on_component():
    g = SimilarityGraph.from_edges(5, [(0, 1), (2, 3), (3, 4), (2, 4)])
    K, members = k_matrix(g, 3, 1.0)
    assert members == (2, 3, 4)
    np.testing.assert_allclose(K, [[2 / 3, 0, 1 / 3], [0, 0, 0], [1 / 3, 0, 2 / 3]], atol=1e-12)


def test_k_matrix_isolated():
    with pytest.raises(NoKMatrixError):
        k_matrix(SimilarityGraph.from_edges(3, [(0, 1)]), 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_influence_complete(n):
    table = influence_table(complete_graph(n), 1.0)
    np.testing.assert_allclose(table.factors, n / 2, atol=1e-9)
    assert influence_factor(complete_graph(n), n - 1) == pytest.approx(n / 2, abs=1e-9)


def test_influence_path_p3():
    table = influence_table(path_graph(3), 1.0)
    np.testing.assert_allclose(table.factors, [0.5, 1.0, 0.5], atol=1e-12)


def test_influence_isolated_zero():
    g = SimilarityGraph.from_edges(4, [(0, 1), (1, 2)])
    assert influence_factor(g, 3) == 0.0
    table = influence_table(g)
    assert table[3] == 0.0 and np.all(table.factors[:3] > 0)


def test_influence_bounds_random(rng):
    for _ in range(200):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n, p=float(rng.uniform(0, 1)))
        f = influence_table(g, 1.0).factors
        assert np.all(f >= 1 / n - 1e-9) and np.all(f <= n / 2 + 1e-9)


def test_influence_per_component_isolation(rng):
    g1 = random_connected_graph(rng, 5, weighted=True)
    A = np.zeros((9, 9))
    A[:5, :5] = g1.adjacency
    A[5:, 5:] = complete_graph(4).adjacency
    base = influence_table(SimilarityGraph(A)).factors
    perm = np.arange(9)
    perm[5:] = [7, 5, 8, 6]
    shuffled = influence_table(SimilarityGraph(A[np.ix_(perm, perm)])).factors
    np.testing.assert_allclose(base[:5], shuffled[:5], atol=1e-12)
    np.testing.assert_allclose(base[:5], influence_table(g1).factors, atol=1e-12)


def test_influence_scales_with_rho():
    # K scales like 1/rho, so the factor scales like rho
    g = path_graph(4)
    np.testing.assert_allclose(influence_table(g, 3.0).factors, 3 * influence_table(g, 1.0).factors)


def test_degenerate_influence_error(monkeypatch):
    # force every K(i)_jj to zero
    monkeypatch.setattr(np.linalg, "inv", lambda M: np.ones_like(M))
    with pytest.raises(DegenerateInfluenceError):
        influence_table(complete_graph(3))


def _all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [p for b, p in enumerate(pairs) if mask >> b & 1]


@pytest.mark.slow
def test_edge_removal_dichotomy_exhaustive():
    for n in range(2, 6):
        for edges in _all_graphs(n):
            if not edges:
                continue
            A = SimilarityGraph.from_edges(n, edges)
            fa = influence_table(A).factors
            for e in edges:
                B = SimilarityGraph.from_edges(n, [x for x in edges if x != e])
                fb = influence_table(B).factors
                for i in range(n):
                    if B.is_isolated(i):
                        continue
                    if A.k == B.k:
                        assert fa[i] >= fb[i] - 1e-9, (n, edges, e, i)
                    else:
                        assert fa[i] <= fb[i] + 1e-9, (n, edges, e, i)


def test_diag_upper_bound_examples():
    for n in range(2, 9):
        assert diag_upper_bound(0, 1, n / 2) == pytest.approx(2 / n + 1)
    # only arm i sampled: the bound is tight at 1/T
    for T in (1, 3, 10):
        assert diag_upper_bound(T, T, 2.5) == pytest.approx(1 / T)
    assert diag_upper_bound(2, 6, 1.0) == pytest.approx(max(1 / 2.5, 1 / 4))
    with pytest.raises(ValueError):
        diag_upper_bound(0, 3, 0.0)
    with pytest.raises(ValueError):
        diag_upper_bound(0, 0, 1.0)


def test_diag_upper_bound_holds_random(rng):
    for _ in range(300):
        n = int(rng.integers(2, 11))
        g = random_connected_graph(rng, n, p=float(rng.uniform(0, 0.8)))
        J = influence_table(g, 1.0).factors
        s = init_design(g.laplacian, 1.0)
        for arm in rng.integers(n, size=int(rng.integers(1, 30))):
            record_pull(s, int(arm), 0.0)
        T = s.total
        for i in range(n):
            assert s.Vinv[i, i] <= diag_upper_bound(int(s.counts[i]), T, J[i]) + 1e-9
