# file: tests/test_hypergraph.py

from fractions import Fraction
from itertools import chain, combinations
from math import ceil

import networkx as nx
import pytest

from src.generators import clique_hypergraph, pair_index, random_hypergraph
from src.hypergraph import (
    HypergraphError,
    Multihypergraph,
    PreconditionError,
    compact,
    degree,
    delta1_supersaturate,
    expand_labels,
    is_independent,
    link,
    max_degree_t,
    prune_max_degree,
    prune_min_degree,
    remove_vertices,
    restrict,
    t_degrees,
    union_scale,
)
from src.measures import hat_delta, sigma_t
from src.oracles import enumerate_independent_sets


def random_suite(count: int, uniformities=(2, 3), max_vertices: int = 15):
    """Seeded random hypergraphs with at least one edge."""
    for seed in range(count):
        s = uniformities[seed % len(uniformities)]
        v = s + 2 + seed % (max_vertices - s - 1)
        edges = 1 + seed % min(20, len(list(combinations(range(v), s))))
        yield random_hypergraph(v, s, edges, seed)


def star_plus_matching() -> Multihypergraph:
    star = [(0, leaf) for leaf in range(1, 11)]
    matching = [(11 + 2 * i, 12 + 2 * i) for i in range(10)]
    return Multihypergraph.from_edges(2, 31, star + matching)


def powerset(items):
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


class TestConstruction:

    def test_duplicates_merge(self):
        """Repeated vertex sets merge by adding multiplicities."""
        H = Multihypergraph.from_edges(2, 3, [(1, 0), (0, 1), ((0, 1), 3)])
        assert H.multiplicity((0, 1)) == 5
        assert H.edge_count() == 5
        assert H.distinct_edge_count() == 1

    def test_wrong_size_edge_rejected(self):
        """Every edge needs exactly `uniformity` distinct vertices."""
        with pytest.raises(HypergraphError):
            Multihypergraph(3, 4, {(0, 1): 1})
        with pytest.raises(HypergraphError):
            Multihypergraph.from_edges(2, 4, [(1, 1)])

    def test_out_of_range_vertex_rejected(self):
        """Vertices must lie in 0..vertex_count-1."""
        with pytest.raises(HypergraphError):
            Multihypergraph.from_edges(2, 3, [(1, 3)])

    def test_equality_ignores_insertion_order(self):
        """Edges are kept in lexicographic order."""
        A = Multihypergraph.from_edges(2, 4, [(2, 3), (0, 1)])
        B = Multihypergraph.from_edges(2, 4, [(0, 1), (3, 2)])
        assert A == B
        assert A.edge_sets() == [(0, 1), (2, 3)]


class TestDegrees:

    def test_clique_vertex_degree(self):
        """Each K4 edge lies in two triangles."""
        H = clique_hypergraph(4, 2)
        assert all(degree(H, (v,)) == 2 for v in range(6))

    def test_empty_set_degree_is_edge_count(self):
        """deg of the empty set is e(H)."""
        H = Multihypergraph.from_edges(2, 4, [((0, 1), 3), (1, 2)])
        assert degree(H, ()) == 4

    def test_edge_multiplicity_and_isolated_vertex(self):
        """An edge contained in nothing else has its multiplicity as degree."""
        H = Multihypergraph.from_edges(2, 5, [((0, 1), 4), (1, 2)])
        assert degree(H, (0, 1)) == 4
        assert degree(H, (4,)) == 0
        with pytest.raises(HypergraphError):
            degree(H, (5,))

    def test_max_degree_examples(self):
        """Delta_1 = 2 and Delta_3 = 1 on the K4 triangle hypergraph."""
        H = clique_hypergraph(4, 2)
        assert max_degree_t(H, 1) == 2
        assert max_degree_t(H, 3) == 1
        with pytest.raises(HypergraphError):
            max_degree_t(H, 4)
        with pytest.raises(HypergraphError):
            max_degree_t(Multihypergraph.empty(2, 3), 1)

    def test_top_degree_is_max_multiplicity(self):
        """Delta_s is the largest multiplicity."""
        H = Multihypergraph.from_edges(3, 5, [((0, 1, 2), 2), ((1, 2, 3), 7)])
        assert max_degree_t(H, 3) == 7

    def test_handshake(self):
        """Vertex degrees sum to s e(H)."""
        for H in random_suite(30):
            assert sum(H.vertex_degrees()) == H.uniformity * H.edge_count()
            assert sum(t_degrees(H, 1).values()) == H.uniformity * H.edge_count()


class TestStructure:

    def test_link_of_path(self):
        """The link of the middle vertex of a path is two singletons."""
        H = Multihypergraph.from_edges(2, 3, [(0, 1), (1, 2)])
        assert link(H, 1) == Multihypergraph.from_edges(1, 3, [(0,), (2,)])

    def test_link_of_isolated_vertex(self):
        """An isolated vertex has an empty link."""
        H = Multihypergraph.from_edges(2, 4, [(0, 1)])
        assert link(H, 3).is_empty()

    def test_link_sizes(self):
        """e(H_v) = deg v, and v is isolated in its link."""
        H = clique_hypergraph(4, 2)
        assert link(H, 0).edge_count() == 2
        for G in random_suite(20):
            for v in range(G.vertex_count):
                L = link(G, v)
                assert L.edge_count() == degree(G, (v,))
                assert L.vertex_degrees()[v] == 0

    def test_restrict_examples(self):
        """Restricting to a K4 inside K5 leaves its four triangles."""
        H = clique_hypergraph(5, 2)
        index = pair_index(5)
        inside = [index[pair] for pair in combinations(range(4), 2)]
        assert restrict(H, inside).edge_count() == 4
        assert restrict(H, range(H.vertex_count)) == H
        assert restrict(H, []).is_empty()

    def test_remove_vertices(self):
        """Edges meeting the removed set disappear."""
        H = Multihypergraph.from_edges(2, 4, [(0, 1), (1, 2), (2, 3)])
        assert remove_vertices(H, [1]).edge_sets() == [(2, 3)]

    def test_compact_round_trip(self):
        """compact relabels H[W] in order and expand_labels undoes it."""
        H = Multihypergraph.from_edges(2, 6, [(1, 3), (3, 5), (0, 2)])
        local, mapping = compact(H, [1, 3, 5])
        assert mapping == (1, 3, 5)
        assert local.vertex_count == 3
        assert local.edge_sets() == [(0, 1), (1, 2)]
        assert expand_labels(mapping, (0, 2)) == (1, 5)

    def test_union_scale(self):
        """Multiplicities combine linearly."""
        H = Multihypergraph.from_edges(2, 4, [(0, 1), (2, 3)])
        doubled = union_scale(H, H, 1, 1)
        assert doubled.edge_count() == 2 * H.edge_count()
        scaled = union_scale(H, Multihypergraph.empty(2, 4), 5, 1)
        assert scaled.multiplicity((0, 1)) == 5
        for t in (1, 2):
            assert sigma_t(scaled, t).entries == sigma_t(H, t).entries
        with pytest.raises(HypergraphError):
            union_scale(H, Multihypergraph.empty(2, 5), 1, 1)


class TestIndependence:

    def test_trivial_cases(self):
        """The empty set is independent and an edge is not."""
        H = clique_hypergraph(4, 2)
        assert is_independent(H, [])
        assert not is_independent(H, H.edge_sets()[0])

    def test_star_is_triangle_free(self):
        """The three K4 edges at one vertex form no triangle."""
        H = clique_hypergraph(4, 2)
        index = pair_index(4)
        star = [index[(0, 1)], index[(0, 2)], index[(0, 3)]]
        assert is_independent(H, star)

    def test_matches_triangle_freeness(self):
        """Independent sets of the K5 hypergraph are the triangle-free graphs."""
        H = clique_hypergraph(5, 2)
        pairs = list(combinations(range(5), 2))
        for subset in powerset(range(len(pairs))):
            graph = nx.Graph([pairs[i] for i in subset])
            triangle_free = sum(nx.triangles(graph).values()) == 0 if subset else True
            assert is_independent(H, subset) == triangle_free

    def test_agrees_with_oracle(self):
        """Every independent subset is listed by the enumeration oracle."""
        for H in random_suite(12, max_vertices=9):
            listed = set(enumerate_independent_sets(H, maximal_only=False).sets)
            found = {subset for subset in powerset(range(H.vertex_count)) if is_independent(H, subset)}
            assert found == listed


class TestPruning:

    def test_regular_unchanged(self):
        """A regular hypergraph has no vertex above R hat_Delta_1."""
        H = clique_hypergraph(5, 2)
        assert prune_max_degree(H, 3) == H

    def test_star_centre_removed(self):
        """The star centre exceeds 13/2 and loses its ten edges."""
        H = star_plus_matching()
        assert hat_delta(H, 1) == Fraction(13, 4)
        pruned = prune_max_degree(H, 2)
        assert pruned.edge_count() == 10
        assert pruned.vertex_degrees()[0] == 0

    def test_huge_r_unchanged(self):
        """R >= e(H) removes nothing."""
        H = star_plus_matching()
        assert prune_max_degree(H, H.edge_count()) == H

    def test_small_r_rejected(self):
        """R must be at least the uniformity."""
        with pytest.raises(HypergraphError):
            prune_max_degree(clique_hypergraph(4, 2), 2)

    def test_max_degree_bounds_random(self):
        """e(H') > (1 - s/R) e(H) and Delta_1(H') <= R hat_Delta_1(H)."""
        for H in random_suite(100):
            s = H.uniformity
            for R in (Fraction(s), Fraction(5 * s, 2), Fraction(4 * s)):
                pruned = prune_max_degree(H, R)
                assert pruned.edge_count() > (1 - s / R) * H.edge_count()
                assert max(pruned.vertex_degrees()) <= R * hat_delta(H, 1)

    def test_min_degree_path_unchanged(self):
        """Threshold 2/5 is below every degree of the path."""
        H = Multihypergraph.from_edges(2, 3, [(0, 1), (1, 2)])
        assert prune_min_degree(H, Fraction(3, 5)) == H
        assert prune_min_degree(H, Fraction(1, 1000)) == H

    def test_min_degree_single_edge(self):
        """beta = 1 keeps a single edge."""
        H = Multihypergraph.from_edges(3, 5, [(0, 1, 2)])
        assert prune_min_degree(H, 1) == H

    def test_min_degree_bounds_random(self):
        """e(H') >= (1 - beta) e(H) and surviving degrees reach the threshold."""
        for H in random_suite(100):
            for beta in (Fraction(1, 5), Fraction(1, 2), Fraction(9, 10)):
                pruned = prune_min_degree(H, beta)
                threshold = beta * H.edge_count() / H.vertex_count
                assert pruned.edge_count() >= (1 - beta) * H.edge_count()
                assert all(d == 0 or d >= threshold for d in pruned.vertex_degrees())


class TestSupersaturation:

    def test_capped_hypergraph_returned_whole(self):
        """Below the cap every edge is admitted."""
        H = Multihypergraph.from_edges(2, 4, [(0, 1), (2, 3)])
        assert delta1_supersaturate(H, Fraction(1, 2), 2) == H

    def test_single_edge_fails(self):
        """One edge cannot supply two, and the witness is sparse."""
        H = Multihypergraph.from_edges(3, 3, [(0, 1, 2)])
        beta = Fraction(1, 2)
        with pytest.raises(PreconditionError) as info:
            delta1_supersaturate(H, beta, 2)
        W = info.value.witness
        assert len(W) > (1 - beta) * H.vertex_count
        assert restrict(H, W).edge_count() < 2

    def test_clique_bounds(self):
        """K6 triangles with beta = 1/2 and M = 2."""
        H = clique_hypergraph(6, 2)
        beta, M = Fraction(1, 2), 2
        for W in combinations(range(H.vertex_count), ceil((1 - beta) * H.vertex_count)):
            assert restrict(H, W).edge_count() >= M
        dense = delta1_supersaturate(H, beta, M)
        assert dense.edge_count() >= M
        assert max_degree_t(dense, 1) <= ceil(3 / beta * Fraction(dense.edge_count(), 15))
        assert all(dense.multiplicity(edge) <= H.multiplicity(edge) for edge in dense.edge_sets())

    def test_witness_random(self):
        """On failure, the unsaturated vertices span fewer than M edges."""
        for H in random_suite(40):
            beta, M = Fraction(1, 3), H.edge_count()
            try:
                dense = delta1_supersaturate(H, beta, M)
            except PreconditionError as exc:
                assert len(exc.witness) > (1 - beta) * H.vertex_count
                assert restrict(H, exc.witness).edge_count() < M
            else:
                assert dense.edge_count() >= M
