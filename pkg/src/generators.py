# file: src/generators.py

import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from src.hypergraph import HypergraphError, Multihypergraph, VertexSet

logger = logging.getLogger(__name__)


class GeneratorError(HypergraphError):
    pass


# --- Indexing schemes ---

def pair_index(n: int) -> Dict[Tuple[int, int], int]:
    """Lexicographic index of the pairs {i, j}, i < j, of 0..n-1."""
    return {pair: index for index, pair in enumerate(combinations(range(n), 2))}


def is_prime(M: int) -> bool:
    if M < 2:
        return False
    d = 2
    while d * d <= M:
        if M % d == 0:
            return False
        d += 1
    return True


# --- Cliques ---

def clique_hypergraph(n: int, r: int) -> Multihypergraph:
    """
    Vertices are the edges of K_n (lexicographic pair order); hyperedges are
    the edge sets of the copies of K_{r+1}.
    """
    if r < 2 or n < r + 1:
        raise GeneratorError(f"clique_hypergraph needs n >= r + 1 >= 3, got n={n}, r={r}.")
    index = pair_index(n)
    edges = [tuple(sorted(index[pair] for pair in combinations(clique, 2)))
             for clique in combinations(range(n), r + 1)]
    return Multihypergraph.from_edges(comb(r + 1, 2), comb(n, 2), edges)


# --- Grid lines ---

@dataclass
class GridLineFamily:
    """
    Lines through [n]^2 with slope M/h, n = m M, each meeting the grid in
    exactly m points. Point (x, y), 1 <= x, y <= n, has index (x-1) n + (y-1).
    """
    m: int
    M: int
    h_max: int
    lines: Dict[int, List[VertexSet]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.m * self.M

    def point_index(self, x: int, y: int) -> int:
        return (x - 1) * self.n + (y - 1)

    def all_lines(self) -> List[VertexSet]:
        return [line for h in sorted(self.lines) for line in self.lines[h]]


def grid_lines_hypergraph(m: int, M: int, s: int,
                          h_max_override: Optional[int] = None) -> Tuple[GridLineFamily, Multihypergraph]:
    """Edges are all s-subsets of the lines of the family (collinear s-sets)."""
    if not is_prime(M):
        raise GeneratorError(f"M = {M} is not prime.")
    if not 2 <= s <= m:
        raise GeneratorError(f"Need 2 <= s <= m, got s={s}, m={m}.")
    n = m * M
    h_max = h_max_override if h_max_override is not None else n // (10 * m)
    if h_max < 1:
        raise GeneratorError("h_max is 0 at this scale; pass an explicit override.")
    if h_max > M - 1:
        raise GeneratorError(f"h_max = {h_max} exceeds M - 1 = {M - 1}.")
    family = GridLineFamily(m=m, M=M, h_max=h_max)
    edges: List[VertexSet] = []
    for h in range(1, h_max + 1):
        lines = []
        for x0 in range(1, n - (m - 1) * h + 1):
            for y0 in range(1, M + 1):
                line = tuple(sorted(family.point_index(x0 + t * h, y0 + t * M) for t in range(m)))
                lines.append(line)
                edges.extend(combinations(line, s))
        family.lines[h] = lines
    logger.info("grid lines: n=%d h_max=%d lines=%d", n, h_max, len(family.all_lines()))
    return family, Multihypergraph.from_edges(s, n * n, edges)


# --- Colourings of complete graphs ---

def folkman_hypergraph(N: int, n: int, k: int) -> Multihypergraph:
    """
    Vertex (pair, i) of E(K_N) x [k] has index pair * k + (i - 1); edges are
    E(K) x {i} for every copy K of K_n and colour i.
    """
    if not (N >= n >= 2 and k >= 1):
        raise GeneratorError(f"folkman_hypergraph needs N >= n >= 2 and k >= 1, got {N}, {n}, {k}.")
    index = pair_index(N)
    edges = []
    for clique in combinations(range(N), n):
        pairs = [index[pair] for pair in combinations(clique, 2)]
        for colour in range(1, k + 1):
            edges.append(tuple(sorted(pair * k + colour - 1 for pair in pairs)))
    return Multihypergraph.from_edges(comb(n, 2), comb(N, 2) * k, edges)


def induced_ramsey_hypergraph(N: int, pattern: nx.Graph, k: int,
                              keep_multiplicity: bool = False) -> Multihypergraph:
    """
    Vertex (pair, c), colours c = 0..k, has index pair * (k + 1) + c. For each
    injection phi of the pattern into K_N and colour i in 1..k the edge is
    phi(E(pattern)) x {i} together with phi(non-edges) x {0}. Injections giving
    the same set collapse to multiplicity 1 unless keep_multiplicity is set.
    """
    pattern = nx.convert_node_labels_to_integers(pattern, ordering="sorted")
    n = pattern.number_of_nodes()
    if not (N >= n >= 2 and k >= 1):
        raise GeneratorError(f"induced_ramsey_hypergraph needs N >= n >= 2 and k >= 1, got {N}, {n}, {k}.")
    index = pair_index(N)
    width = k + 1
    edges = []
    for phi in permutations(range(N), n):
        image = {}
        for a, b in combinations(range(n), 2):
            image[(a, b)] = index[tuple(sorted((phi[a], phi[b])))]
        for colour in range(1, k + 1):
            members = [image[(a, b)] * width + (colour if pattern.has_edge(a, b) else 0)
                       for a, b in combinations(range(n), 2)]
            edges.append(tuple(sorted(members)))
    if not keep_multiplicity:
        edges = sorted(set(edges))
    return Multihypergraph.from_edges(comb(n, 2), comb(N, 2) * width, edges)


# --- Random instances ---

def random_hypergraph(v: int, s: int, edge_count: int, seed: int) -> Multihypergraph:
    """edge_count distinct s-sets drawn without replacement, deterministic in seed."""
    total = comb(v, s)
    if s < 1 or edge_count < 0 or edge_count > total:
        raise GeneratorError(f"Cannot draw {edge_count} distinct {s}-sets from {v} vertices.")
    rng = np.random.default_rng(seed)
    if total <= 200000:
        pool = list(combinations(range(v), s))
        chosen = [pool[i] for i in sorted(rng.choice(total, size=edge_count, replace=False))]
    else:
        seen = set()
        while len(seen) < edge_count:
            seen.add(tuple(sorted(int(u) for u in rng.choice(v, size=s, replace=False))))
        chosen = sorted(seen)
    return Multihypergraph.from_edges(s, v, chosen)


def random_regular_hypergraph(d: int, n: int, seed: int) -> Multihypergraph:
    """A seeded random d-regular graph as a 2-uniform hypergraph."""
    if d < 1 or n <= d or (d * n) % 2:
        raise GeneratorError(f"No {d}-regular graph on {n} vertices.")
    graph = nx.random_regular_graph(d, n, seed=seed)
    return Multihypergraph.from_edges(2, n, (tuple(sorted(edge)) for edge in graph.edges()))
