import numpy as np
import pytest

from difflab import (DirectedGraph, ParameterError, centrality, erdos_renyi,
                     rank_by_score, ranking_similarity)
from difflab.centrality import (betweenness_scores, closeness_scores,
                                outdegree_scores, pagerank_scores)
from difflab.rng import derive_rng

from oracles import betweenness_bruteforce


class TestOutdegree:
    def test_counts_children(self, star4):
        assert list(outdegree_scores(star4)) == [3.0, 0.0, 0.0, 0.0]


class TestCloseness:
    def test_directed_path(self, chain3):
        scores = closeness_scores(chain3)
        assert scores[0] == pytest.approx(2 / 3)
        assert scores[1] == pytest.approx(1 / ((3 + 1) / 2))

    def test_unreachable_counts_as_node_count(self):
        g = DirectedGraph(3, [(0, 1)])
        scores = closeness_scores(g)
        # node 0: distances 1 and 3 (surrogate) -> mean 2
        assert scores[0] == pytest.approx(0.5)


class TestBetweenness:
    def test_bidirectional_star_center(self):
        g = DirectedGraph(4, [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)])
        scores = betweenness_scores(g)
        assert scores[0] == pytest.approx(6.0)
        assert scores[1] == scores[2] == scores[3] == 0.0

    def test_matches_bruteforce_enumeration(self):
        rng = derive_rng(301, "btw")
        for trial in range(25):
            n = rng.randrange(3, 13)
            edges = sorted({(rng.randrange(n), rng.randrange(n))
                            for _ in range(rng.randrange(2, 3 * n))})
            edges = [(u, v) for u, v in edges if u != v]
            if not edges:
                continue
            g = DirectedGraph(n, edges)
            want = betweenness_bruteforce(n, edges)
            got = betweenness_scores(g)
            assert np.allclose(got, want), (n, edges)

    def test_normalized_reading_matches_bruteforce(self):
        rng = derive_rng(302, "btw-norm")
        for trial in range(10):
            n = rng.randrange(3, 10)
            edges = sorted({(rng.randrange(n), rng.randrange(n))
                            for _ in range(rng.randrange(2, 3 * n))})
            edges = [(u, v) for u, v in edges if u != v]
            if not edges:
                continue
            g = DirectedGraph(n, edges)
            want = betweenness_bruteforce(n, edges, normalized=True)
            got = betweenness_scores(g, normalized=True)
            assert np.allclose(got, want), (n, edges)


class TestPagerank:
    def test_symmetric_two_cycle(self):
        g = DirectedGraph(2, [(0, 1), (1, 0)])
        scores = pagerank_scores(g)
        assert scores == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_sums_to_one(self):
        g = erdos_renyi(60, 0.06, 31)
        scores = pagerank_scores(g)
        assert scores.sum() == pytest.approx(1.0, abs=1e-9)

    def test_relabeling_invariance(self):
        g = erdos_renyi(25, 0.15, 32)
        perm = list(range(25))
        derive_rng(33, "perm").shuffle(perm)
        g2 = DirectedGraph(25, [(perm[u], perm[v]) for u, v in g.edges])
        s1 = pagerank_scores(g)
        s2 = pagerank_scores(g2)
        assert np.allclose(s1, s2[perm], atol=1e-8)

    def test_jump_probability_validated(self, chain2):
        with pytest.raises(ParameterError):
            pagerank_scores(chain2, eps=1.5)

    def test_dangling_mass_handled(self, chain3):
        scores = pagerank_scores(chain3)
        assert scores.sum() == pytest.approx(1.0, abs=1e-9)
        assert (scores > 0).all()


class TestRankedList:
    def test_descending_with_id_tiebreak(self):
        ranked = rank_by_score([1.0, 3.0, 3.0, 0.5])
        assert list(ranked.order) == [1, 2, 0, 3]

    def test_centrality_dispatch(self, star4):
        ranked = centrality(star4, "outdegree")
        assert ranked.order[0] == 0
        with pytest.raises(ParameterError):
            centrality(star4, "eigenvector")


class TestRankingSimilarity:
    def test_partial_overlap(self):
        truth = rank_by_score([3.0, 2.0, 1.0, 0.5])   # a, b, c, d
        cand = rank_by_score([3.0, 0.5, 2.0, 1.0])    # a, c, d, b
        # top-3 sets {0,1,2} vs {0,2,3}
        assert ranking_similarity(truth, cand, 3) == pytest.approx(2 / 3)

    def test_identical_rankings(self):
        r = rank_by_score([5.0, 4.0, 1.0])
        for k in (1, 2, 3):
            assert ranking_similarity(r, r, k) == 1.0

    def test_disjoint_top_k(self):
        truth = rank_by_score([2.0, 1.0, 0.0, 0.0])
        cand = rank_by_score([0.0, 0.0, 1.0, 2.0])
        assert ranking_similarity(truth, cand, 2) == 0.0

    def test_k_out_of_range(self):
        r = rank_by_score([1.0, 0.5])
        with pytest.raises(ParameterError):
            ranking_similarity(r, r, 0)
        with pytest.raises(ParameterError):
            ranking_similarity(r, r, 3)
