# file: src/oracles.py

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.hypergraph import HypergraphError, Multihypergraph, VertexSet

logger = logging.getLogger(__name__)

# The oracles keep their own subset logic and never call the degree or
# independence code of the hypergraph module.


class OracleError(HypergraphError):
    pass


# --- Independent sets ---

@dataclass
class IndependentSetEnumeration:
    sets: List[VertexSet]
    partial: bool


def enumerate_independent_sets(H: Multihypergraph, maximal_only: bool = True,
                               cap: int = 100000) -> IndependentSetEnumeration:
    """
    Branch and bound over vertices in index order: include v when it closes
    no edge, exclude it otherwise. For maximal sets an excluded vertex must
    stay blockable by some edge whose other vertices are not yet excluded.
    """
    n = H.vertex_count
    edges = [frozenset(edge) for edge in H.edge_sets()]
    through: List[List[frozenset]] = [[] for _ in range(n)]
    for edge in edges:
        for v in edge:
            through[v].append(edge)
    found: List[VertexSet] = []
    chosen: List[int] = []
    excluded: set = set()

    def closes_edge(v: int) -> bool:
        members = set(chosen)
        return any(all(u == v or u in members for u in edge) for edge in through[v])

    def blockable(v: int) -> bool:
        return any(all(u == v or u not in excluded for u in edge) for edge in through[v])

    def is_maximal() -> bool:
        members = set(chosen)
        return all(any(edge - {v} <= members for edge in through[v]) for v in excluded)

    def search(v: int) -> bool:
        if v == n:
            if not maximal_only or is_maximal():
                if len(found) >= cap:
                    return False
                found.append(tuple(chosen))
            return True
        if not closes_edge(v):
            chosen.append(v)
            if not search(v + 1):
                return False
            chosen.pop()
        excluded.add(v)
        if not maximal_only or blockable(v):
            if not search(v + 1):
                excluded.discard(v)
                return False
        excluded.discard(v)
        return True

    complete = search(0)
    if not complete:
        logger.warning("independent set enumeration capped at %d sets", cap)
    return IndependentSetEnumeration(sets=sorted(found), partial=not complete)


# --- Covers ---

@dataclass
class CoverReport:
    total: int
    covered: int
    uncovered: List[VertexSet] = field(default_factory=list)
    family_size: int = 0
    complete: bool = True

    @property
    def full(self) -> bool:
        return self.complete and self.covered == self.total


def verify_cover(containers: Sequence[Iterable[int]], H: Multihypergraph, cap: int = 100000,
                 witness_limit: int = 10) -> CoverReport:
    """Every maximal independent set must lie inside some container."""
    family = [frozenset(c) for c in containers]
    enumeration = enumerate_independent_sets(H, maximal_only=True, cap=cap)
    covered, uncovered = 0, []
    for I in enumeration.sets:
        if any(c.issuperset(I) for c in family):
            covered += 1
        elif len(uncovered) < witness_limit:
            uncovered.append(I)
    report = CoverReport(total=len(enumeration.sets), covered=covered, uncovered=uncovered,
                         family_size=len(family), complete=not enumeration.partial)
    logger.info("cover check: %d of %d maximal independent sets covered", covered, report.total)
    return report


# --- Ramsey counts ---

def count_mono_cliques(N: int, colouring: Dict[Tuple[int, int], int], n: int,
                       k: int) -> Tuple[int, int]:
    """
    For c: E(K_N) -> {1..k+1}: (number of edges with colour k+1, number of
    copies of K_n monochromatic in one of the colours 1..k).
    """
    normalised: Dict[Tuple[int, int], int] = {}
    for (a, b), colour in colouring.items():
        normalised[(min(a, b), max(a, b))] = colour
    for pair in combinations(range(N), 2):
        colour = normalised.get(pair)
        if colour is None:
            raise OracleError(f"Colouring misses the edge {pair}.")
        if not 1 <= colour <= k + 1:
            raise OracleError(f"Edge {pair} has colour {colour} outside 1..{k + 1}.")
    reserved = sum(1 for colour in normalised.values() if colour == k + 1)
    mono = 0
    for clique in combinations(range(N), n):
        colours = {normalised[pair] for pair in combinations(clique, 2)}
        if len(colours) == 1 and colours.pop() != k + 1:
            mono += 1
    return reserved, mono


# --- Colourings as vertex sets ---

def _pair_positions(N: int) -> Dict[Tuple[int, int], int]:
    return {pair: index for index, pair in enumerate(combinations(range(N), 2))}


def folkman_colouring_vertices(N: int, k: int, colouring: Dict[Tuple[int, int], int]) -> VertexSet:
    """
    A colouring of the edges of some G inside K_N with colours 1..k, as a
    vertex set of the Folkman hypergraph: pair * k + (colour - 1).
    """
    positions = _pair_positions(N)
    members = []
    for (a, b), colour in colouring.items():
        if not 1 <= colour <= k:
            raise OracleError(f"Colour {colour} of edge {(a, b)} is outside 1..{k}.")
        members.append(positions[(min(a, b), max(a, b))] * k + colour - 1)
    return tuple(sorted(members))


def induced_colouring_vertices(N: int, k: int, colouring: Dict[Tuple[int, int], int]) -> VertexSet:
    """
    A colouring of every pair of K_N with colours 0..k, colour 0 marking the
    non-edges of G, as a vertex set of the induced-Ramsey hypergraph:
    pair * (k + 1) + colour.
    """
    positions = _pair_positions(N)
    if len(colouring) != len(positions):
        raise OracleError(f"Colouring covers {len(colouring)} of {len(positions)} pairs.")
    members = []
    for (a, b), colour in colouring.items():
        if not 0 <= colour <= k:
            raise OracleError(f"Colour {colour} of pair {(a, b)} is outside 0..{k}.")
        members.append(positions[(min(a, b), max(a, b))] * (k + 1) + colour)
    return tuple(sorted(members))


@dataclass
class SupersaturationReport:
    reserved: int
    mono: int
    counting_holds: bool
    reserved_branch: bool
    mono_branch: bool

    @property
    def dichotomy_holds(self) -> bool:
        return self.reserved_branch or self.mono_branch


def ramsey_supersaturation(N: int, R: int, n: int, k: int,
                           colouring: Dict[Tuple[int, int], int]) -> SupersaturationReport:
    """
    binom(N, R) <= |c^-1(k+1)| binom(N-2, R-2) + M binom(N-n, R-n), and the
    dichotomy |c^-1(k+1)| >= (N/R)^2 / 2 or M >= (N/R)^n / 2. Valid when every
    k-colouring of K_R has a monochromatic K_n.
    """
    if not 2 <= n <= R <= N:
        raise OracleError(f"Need 2 <= n <= R <= N, got n={n}, R={R}, N={N}.")
    reserved, mono = count_mono_cliques(N, colouring, n, k)
    ratio = Fraction(N, R)
    counting = comb(N, R) <= reserved * comb(N - 2, R - 2) + mono * comb(N - n, R - n)
    return SupersaturationReport(reserved=reserved, mono=mono, counting_holds=counting,
                                 reserved_branch=reserved >= ratio ** 2 / 2,
                                 mono_branch=mono >= ratio ** n / 2)


# --- Epsilon nets ---

def min_eps_net(X: Sequence[int], ranges: Sequence[Iterable[int]], eps: Fraction,
                max_points: int = 30, max_ranges: int = 20) -> Tuple[int, VertexSet]:
    """
    Exact minimum N inside X meeting every range A with |A| >= eps |X|, by
    branch and bound on the first unhit range. Refuses instances with more
    than max_points points and more than max_ranges qualifying ranges.
    """
    if Fraction(eps) <= 0:
        raise OracleError(f"eps = {eps} must be positive.")
    points = set(X)
    threshold = Fraction(eps) * len(points)
    qualifying = sorted({tuple(sorted(set(A) & points)) for A in ranges if len(set(A) & points) >= threshold})
    if len(points) > max_points and len(qualifying) > max_ranges:
        raise OracleError(f"{len(points)} points and {len(qualifying)} qualifying ranges exceed the bounds.")
    if not qualifying:
        return 0, ()
    if qualifying[0] == ():
        raise OracleError("A qualifying range has no point in X and cannot be hit.")
    best: List[Optional[VertexSet]] = [None]

    def lower_bound(open_ranges: List[Tuple[int, ...]]) -> int:
        used, disjoint = set(), 0
        for A in open_ranges:
            if used.isdisjoint(A):
                used.update(A)
                disjoint += 1
        return disjoint

    def search(net: List[int], open_ranges: List[Tuple[int, ...]]):
        if not open_ranges:
            if best[0] is None or len(net) < len(best[0]):
                best[0] = tuple(sorted(net))
            return
        if best[0] is not None and len(net) + lower_bound(open_ranges) >= len(best[0]):
            return
        target = min(open_ranges, key=lambda A: (len(A), A))
        for point in target:
            net.append(point)
            search(net, [A for A in open_ranges if point not in A])
            net.pop()

    search([], qualifying)
    return len(best[0]), best[0]
