# file: src/hypergraph.py

import logging
from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

logger = logging.getLogger(__name__)

VertexSet = Tuple[int, ...]
Rational = Union[int, Fraction]


class HypergraphError(ValueError):
    """Base error for every invalid hypergraph operation in the package."""
    pass


class PreconditionError(HypergraphError):
    """
    Raised when delta1_supersaturate cannot reach M edges.
    `witness` is a vertex set W with |W| > (1 - beta) v(H) and e(H[W]) < M.
    """
    def __init__(self, message: str, witness: VertexSet, admitted: int):
        super().__init__(message)
        self.witness = witness
        self.admitted = admitted


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    """Canonical form of a vertex collection: sorted, duplicate-free tuple."""
    return tuple(sorted(set(vertices)))


class Multihypergraph:
    """
    An s-uniform hypergraph on vertices 0..vertex_count-1 whose edges carry
    positive integer multiplicities. Edge sets are stored as sorted tuples in
    lexicographic order; values are never mutated after construction.
    """
    __slots__ = ("uniformity", "vertex_count", "_edges", "_size")

    def __init__(self, uniformity: int, vertex_count: int,
                 edges: Optional[Mapping[VertexSet, int]] = None):
        if uniformity < 1:
            raise HypergraphError(f"Uniformity must be positive, got {uniformity}.")
        if vertex_count < 1:
            raise HypergraphError(f"Vertex count must be positive, got {vertex_count}.")
        self.uniformity = uniformity
        self.vertex_count = vertex_count
        checked: Dict[VertexSet, int] = {}
        for edge, mult in (edges or {}).items():
            key = tuple(edge)
            if len(key) != uniformity or len(set(key)) != uniformity:
                raise HypergraphError(f"Edge {key} is not a set of {uniformity} distinct vertices.")
            if list(key) != sorted(key):
                raise HypergraphError(f"Edge {key} is not sorted.")
            if key[0] < 0 or key[-1] >= vertex_count:
                raise HypergraphError(f"Edge {key} has a vertex outside 0..{vertex_count - 1}.")
            if mult < 1:
                raise HypergraphError(f"Edge {key} has non-positive multiplicity {mult}.")
            checked[key] = int(mult)
        self._edges = {key: checked[key] for key in sorted(checked)}
        self._size = sum(self._edges.values())

    @classmethod
    def from_edges(cls, uniformity: int, vertex_count: int,
                   edges: Iterable[Union[Iterable[int], Tuple[Iterable[int], int]]]) -> "Multihypergraph":
        """
        Builds a hypergraph from vertex collections or (collection, multiplicity)
        pairs. Repeated sets merge by adding their multiplicities.
        """
        merged: Counter = Counter()
        for item in edges:
            if isinstance(item, tuple) and len(item) == 2 and not isinstance(item[0], int):
                members, mult = item
            else:
                members, mult = item, 1
            key = tuple(sorted(members))
            merged[key] += mult
        return cls(uniformity, vertex_count, merged)

    @classmethod
    def empty(cls, uniformity: int, vertex_count: int) -> "Multihypergraph":
        return cls(uniformity, vertex_count, {})

    @property
    def edges(self) -> Mapping[VertexSet, int]:
        return dict(self._edges)

    def items(self) -> Iterator[Tuple[VertexSet, int]]:
        """Edges with multiplicities in lexicographic order."""
        return iter(self._edges.items())

    def edge_sets(self) -> List[VertexSet]:
        return list(self._edges)

    def multiplicity(self, edge: Iterable[int]) -> int:
        return self._edges.get(tuple(sorted(edge)), 0)

    def edge_count(self) -> int:
        """e(H), counting multiplicities."""
        return self._size

    def distinct_edge_count(self) -> int:
        return len(self._edges)

    def is_empty(self) -> bool:
        return self._size == 0

    def vertex_degrees(self) -> List[int]:
        degrees = [0] * self.vertex_count
        for edge, mult in self._edges.items():
            for v in edge:
                degrees[v] += mult
        return degrees

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multihypergraph):
            return NotImplemented
        return (self.uniformity == other.uniformity
                and self.vertex_count == other.vertex_count
                and self._edges == other._edges)

    def __hash__(self) -> int:
        return hash((self.uniformity, self.vertex_count, tuple(self._edges.items())))

    def __repr__(self) -> str:
        return (f"Multihypergraph(uniformity={self.uniformity}, vertex_count={self.vertex_count}, "
                f"distinct_edges={len(self._edges)}, e={self._size})")


# --- Validation helpers ---

def check_vertices(H: Multihypergraph, vertices: Iterable[int]) -> VertexSet:
    """Returns the canonical vertex set, raising on indices outside H."""
    canonical = vertex_set(vertices)
    if canonical and (canonical[0] < 0 or canonical[-1] >= H.vertex_count):
        raise HypergraphError(f"Vertex set {canonical} leaves 0..{H.vertex_count - 1}.")
    return canonical


def _require_nonempty(H: Multihypergraph, operation: str):
    if H.is_empty():
        raise HypergraphError(f"{operation} is undefined for a hypergraph with no edges.")


# --- Degree queries ---

def degree(H: Multihypergraph, T: Iterable[int]) -> int:
    """deg_H T: total multiplicity of the edges containing T."""
    T = check_vertices(H, T)
    if len(T) > H.uniformity:
        raise HypergraphError(f"|T| = {len(T)} exceeds uniformity {H.uniformity}.")
    if not T:
        return H.edge_count()
    members = set(T)
    return sum(mult for edge, mult in H.items() if members.issubset(edge))


def t_degrees(H: Multihypergraph, t: int) -> Dict[VertexSet, int]:
    """Degrees of every t-subset lying inside some edge (all others have degree 0)."""
    if not 1 <= t <= H.uniformity:
        raise HypergraphError(f"t = {t} outside 1..{H.uniformity}.")
    counts: Dict[VertexSet, int] = {}
    for edge, mult in H.items():
        for T in combinations(edge, t):
            counts[T] = counts.get(T, 0) + mult
    return counts


def max_degree_t(H: Multihypergraph, t: int) -> int:
    """Delta_t(H): maximum degree over t-subsets."""
    if not 1 <= t <= H.uniformity:
        raise HypergraphError(f"t = {t} outside 1..{H.uniformity}.")
    _require_nonempty(H, "Maximum degree")
    return max(t_degrees(H, t).values())


# --- Structural operations ---

def link(H: Multihypergraph, v: int) -> Multihypergraph:
    """The (s-1)-uniform link hypergraph H_v on the same vertex set."""
    if H.uniformity < 2:
        raise HypergraphError("The link of a 1-uniform hypergraph is undefined.")
    check_vertices(H, (v,))
    edges = {tuple(u for u in edge if u != v): mult for edge, mult in H.items() if v in edge}
    return Multihypergraph(H.uniformity - 1, H.vertex_count, edges)


def restrict(H: Multihypergraph, W: Iterable[int]) -> Multihypergraph:
    """Induced subhypergraph H[W], keeping the vertex universe unchanged."""
    keep = set(check_vertices(H, W))
    edges = {edge: mult for edge, mult in H.items() if keep.issuperset(edge)}
    return Multihypergraph(H.uniformity, H.vertex_count, edges)


def remove_vertices(H: Multihypergraph, D: Iterable[int]) -> Multihypergraph:
    """H - D: every edge meeting D is deleted."""
    dropped = set(check_vertices(H, D))
    edges = {edge: mult for edge, mult in H.items() if dropped.isdisjoint(edge)}
    return Multihypergraph(H.uniformity, H.vertex_count, edges)


def compact(H: Multihypergraph, W: Iterable[int]) -> Tuple[Multihypergraph, VertexSet]:
    """
    H[W] relabelled onto 0..|W|-1 preserving order. The returned mapping sends
    a new label i back to the original vertex mapping[i].
    """
    mapping = check_vertices(H, W)
    if not mapping:
        raise HypergraphError("Cannot compact onto an empty vertex set.")
    position = {v: i for i, v in enumerate(mapping)}
    edges = {}
    for edge, mult in H.items():
        if all(v in position for v in edge):
            edges[tuple(position[v] for v in edge)] = mult
    return Multihypergraph(H.uniformity, len(mapping), edges), mapping


def expand_labels(mapping: VertexSet, vertices: Iterable[int]) -> VertexSet:
    """Inverse of compact for vertex sets."""
    return vertex_set(mapping[i] for i in vertices)


def union_scale(H1: Multihypergraph, H2: Multihypergraph, k1: int, k2: int) -> Multihypergraph:
    """k1 * H1 + k2 * H2 on edge multiplicities."""
    if H1.uniformity != H2.uniformity or H1.vertex_count != H2.vertex_count:
        raise HypergraphError("union_scale needs equal uniformity and vertex count.")
    if k1 < 1 or k2 < 1:
        raise HypergraphError("Scaling factors must be positive integers.")
    merged: Counter = Counter()
    for edge, mult in H1.items():
        merged[edge] += k1 * mult
    for edge, mult in H2.items():
        merged[edge] += k2 * mult
    return Multihypergraph(H1.uniformity, H1.vertex_count, merged)


def is_independent(H: Multihypergraph, I: Iterable[int]) -> bool:
    """True iff no edge of H lies inside I."""
    members = set(check_vertices(H, I))
    if len(members) < H.uniformity:
        return True
    return not any(members.issuperset(edge) for edge in H.edge_sets())


# --- Pruning subroutines ---

def prune_max_degree(H: Multihypergraph, R: Rational) -> Multihypergraph:
    """
    Removes every edge meeting X = {v : deg v > R * hat_Delta_1(H)}. The result
    keeps more than (1 - s/R) e(H) edges and has maximum degree at most
    R * hat_Delta_1(H).
    """
    from src.measures import hat_delta

    _require_nonempty(H, "prune_max_degree")
    R = Fraction(R)
    if R < H.uniformity:
        raise HypergraphError(f"R = {R} is smaller than the uniformity {H.uniformity}.")
    threshold = R * hat_delta(H, 1)
    degrees = H.vertex_degrees()
    heavy = [v for v, d in enumerate(degrees) if d > threshold]
    if not heavy:
        return H
    logger.debug("prune_max_degree: dropping edges at %d vertices above %s", len(heavy), threshold)
    return remove_vertices(H, heavy)


def prune_min_degree(H: Multihypergraph, beta: Rational) -> Multihypergraph:
    """
    Iteratively deletes the edges at vertices whose current degree is positive
    but below beta * e(H) / |V|, with the threshold fixed from the input.
    """
    _require_nonempty(H, "prune_min_degree")
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise HypergraphError(f"beta = {beta} outside (0, 1].")
    threshold = beta * H.edge_count() / H.vertex_count
    current = H
    while True:
        degrees = current.vertex_degrees()
        light = [v for v, d in enumerate(degrees) if 0 < d < threshold]
        if not light:
            return current
        current = remove_vertices(current, light)


def delta1_supersaturate(H: Multihypergraph, beta: Rational, M: int) -> Multihypergraph:
    """
    Greedily admits edge units in lexicographic order while every vertex load
    stays within ceil(s M / (beta v(H))). The greedy result is maximal under
    that cap, so it has at least M edges whenever every W with
    |W| >= (1 - beta) v(H) spans at least M edges.
    """
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise HypergraphError(f"beta = {beta} outside (0, 1].")
    if M < 1:
        raise HypergraphError(f"M must be a positive integer, got {M}.")
    s, n = H.uniformity, H.vertex_count
    cap = ceil(Fraction(s * M) / (beta * n))
    load = [0] * n
    admitted: Dict[VertexSet, int] = {}
    for edge, mult in H.items():
        room = min(cap - load[v] for v in edge)
        units = min(mult, room)
        if units <= 0:
            continue
        admitted[edge] = units
        for v in edge:
            load[v] += units
    result = Multihypergraph(s, n, admitted)
    if result.edge_count() < M:
        witness = tuple(v for v in range(n) if load[v] < cap)
        raise PreconditionError(
            f"Only {result.edge_count()} < {M} edges fit under the degree cap {cap}; "
            f"H is not robustly dense.", witness, result.edge_count())
    return result
