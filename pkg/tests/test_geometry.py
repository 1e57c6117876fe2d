# file: tests/test_geometry.py

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest

from src.generators import clique_hypergraph, random_hypergraph
from src.geometry import (
    ExplicitNormOracle,
    GeometryError,
    WeightedVectors,
    averaging_bound_holds,
    direction_bound_holds,
    direction_gain,
    find_proposition_vertex,
    proposition_holds,
    select_direction,
    select_vertex,
    vertex_objective,
)
from src.hypergraph import Multihypergraph, link, union_scale
from src.measures import AlphaWeights, alpha_norm_sq


def random_instance(rng) -> WeightedVectors:
    d = int(rng.integers(1, 9))
    k = int(rng.integers(1, 9))
    vectors = [[Fraction(int(rng.integers(0, 10)), int(rng.integers(1, 6))) for _ in range(d)]
               for _ in range(k)]
    raw = [int(rng.integers(0, 4)) for _ in range(k)]
    if not any(raw):
        raw[int(rng.integers(0, k))] = 1
    lam = [Fraction(c, sum(raw)) for c in raw]
    mu = [Fraction(int(rng.integers(0, 10)), int(rng.integers(1, 6))) for _ in range(d)]
    x = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 5)))
    xs = [x * Fraction(int(rng.integers(1, 4)), 3) for _ in range(k)]
    return WeightedVectors(tuple(map(tuple, vectors)), tuple(lam), tuple(mu), x, tuple(xs))


def random_accumulator(rng, vertex_count: int, r: int) -> ExplicitNormOracle:
    edges = [tuple(sorted(rng.choice(vertex_count, size=r, replace=False).tolist()))
             for _ in range(int(rng.integers(1, 8)))]
    return ExplicitNormOracle(Multihypergraph.from_edges(r, vertex_count, edges))


def random_alpha(rng, r: int) -> AlphaWeights:
    return AlphaWeights(tuple(Fraction(int(rng.integers(0, 6)), int(rng.integers(1, 4))) for _ in range(r)))


class TestWeightedVectors:

    def test_invalid_instances(self):
        """Weights must sum to 1 and step lengths lie in (0, x]."""
        with pytest.raises(GeometryError):
            WeightedVectors(((1,),), (Fraction(1, 2),), (0,), 1, (1,))
        with pytest.raises(GeometryError):
            WeightedVectors(((1,),), (1,), (0,), 1, (2,))
        with pytest.raises(GeometryError):
            WeightedVectors(((1, 2),), (1,), (0,), 1, (1,))
        with pytest.raises(GeometryError):
            WeightedVectors(((-1,),), (1,), (0,), 1, (1,))

    def test_nu_is_convex_combination(self):
        """nu = sum lambda_i nu_i."""
        w = WeightedVectors(((2, 0), (0, 4)), (Fraction(1, 4), Fraction(3, 4)), (1, 1), 1, (1, 1))
        assert w.nu() == (Fraction(1, 2), Fraction(3))


class TestSelectDirection:

    def test_single_vector_equal_to_mu(self):
        """With k = 1 and nu_1 = mu the only index is returned."""
        w = WeightedVectors(((1, 2),), (1,), (1, 2), 2, (1,))
        assert select_direction(w) == 0
        assert w.mu_i(0) == w.mu
        assert direction_bound_holds(w, 0)

    def test_zero_weights_skipped(self):
        """Indices with lambda_i = 0 are never returned."""
        w = WeightedVectors(((0,), (5,)), (0, 1), (3,), 1, (1, 1))
        assert select_direction(w) == 1

    def test_all_zero_rejected(self):
        """At least one weight must be positive; a zero-sum lam is already invalid."""
        with pytest.raises(GeometryError):
            WeightedVectors(((0,),), (0,), (3,), 1, (1,))

    def test_random_instances(self):
        """The minimiser satisfies the bound and beats every other positive-weight index."""
        rng = np.random.default_rng(500)
        for _ in range(500):
            w = random_instance(rng)
            i = select_direction(w)
            assert w.lam[i] > 0
            assert direction_bound_holds(w, i)
            assert averaging_bound_holds(w)
            gains = [(direction_gain(w, j), j) for j in range(w.k) if w.lam[j] > 0]
            assert min(gains) == (direction_gain(w, i), i)


class TestSelectVertex:

    def test_symmetric_instance(self):
        """A vertex-transitive pair of hypergraphs picks vertex 0."""
        A = clique_hypergraph(4, 2)
        Gstar = ExplicitNormOracle(Multihypergraph.from_edges(2, 6, combinations(range(6), 2)))
        assert select_vertex(A, Gstar, AlphaWeights.of(1, 1)) == 0

    def test_empty_rejected(self):
        """A must have an edge."""
        with pytest.raises(GeometryError):
            select_vertex(Multihypergraph.empty(2, 3), ExplicitNormOracle(Multihypergraph.empty(1, 3)),
                          AlphaWeights.of(1))

    def test_matches_exhaustive_scan(self):
        """The returned vertex minimises the objective over positive-degree vertices."""
        rng = np.random.default_rng(17)
        for seed in range(60):
            n = int(rng.integers(4, 9))
            A = random_hypergraph(n, 2, int(rng.integers(1, n + 1)), seed)
            Gstar = random_accumulator(rng, n, 1)
            alpha = AlphaWeights.of(1)
            baseline = Fraction(int(rng.integers(0, 4)), 10)
            scan = []
            for v, d in enumerate(A.vertex_degrees()):
                if d:
                    merged = union_scale(Gstar.hypergraph, link(A, v), 1, 1)
                    scan.append((merged.edge_count() * (alpha_norm_sq(merged, alpha) - baseline), v))
            chosen = select_vertex(A, Gstar, alpha, baseline)
            assert min(scan)[1] == chosen
            assert vertex_objective(A, Gstar, alpha, chosen, baseline) == min(scan)[0]

    def test_empty_accumulator_oracle(self):
        """An empty accumulator has norm 0 and takes the link's norm once extended."""
        A = Multihypergraph.from_edges(2, 4, [(0, 1), (0, 2)])
        oracle = ExplicitNormOracle(Multihypergraph.empty(1, 4))
        assert oracle.alpha_norm_sq(AlphaWeights.of(1)) == 0
        assert oracle.alpha_norm_sq_with(link(A, 0), AlphaWeights.of(1)) == Fraction(1, 2)


class TestNormChange:

    def test_some_vertex_satisfies_bound(self):
        """For random A and G* some positive-degree vertex keeps the norm change bounded."""
        rng = np.random.default_rng(99)
        for seed in range(100):
            r = 1 + seed % 2
            n = int(rng.integers(r + 2, 9))
            A = random_hypergraph(n, r + 1, min(int(rng.integers(1, 10)), comb(n, r + 1)), seed)
            Gstar = random_accumulator(rng, n, r)
            alpha = random_alpha(rng, r)
            v = find_proposition_vertex(A, Gstar, alpha)
            assert v is not None
            assert A.vertex_degrees()[v] > 0

    def test_isolated_vertex_never_qualifies(self):
        """Vertices outside every edge of A do not count."""
        A = Multihypergraph.from_edges(2, 4, [(0, 1)])
        Gstar = ExplicitNormOracle(Multihypergraph.from_edges(1, 4, [(2,), (3,)]))
        assert not proposition_holds(A, Gstar, AlphaWeights.of(1), 3)

    def test_empty_accumulator_rejected(self):
        """The inequality divides by e(G*)."""
        A = Multihypergraph.from_edges(2, 4, [(0, 1)])
        with pytest.raises(GeometryError):
            proposition_holds(A, ExplicitNormOracle(Multihypergraph.empty(1, 4)), AlphaWeights.of(1), 0)
