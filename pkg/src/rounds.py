# file: src/rounds.py

import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb
from typing import Dict, Iterable, List, Optional, Protocol, Set, Tuple, Union

from src.codec import format_rational
from src.geometry import select_vertex
from src.hypergraph import (
    HypergraphError,
    Multihypergraph,
    VertexSet,
    link,
    prune_max_degree,
    prune_min_degree,
    remove_vertices,
    union_scale,
    vertex_set,
)
from src.measures import AlphaWeights, alpha_norm_sq, alpha_star, hat_delta, sigma_norm_sq

logger = logging.getLogger(__name__)

LinkItems = List[Tuple[VertexSet, int]]
Signature = Tuple[int, Tuple[int, ...]]


class RoundError(HypergraphError):
    pass


# --- Membership oracles ---

class MembershipOracle(Protocol):
    def __call__(self, v: int) -> bool:
        ...


class SetOracle:
    """Answers membership in a fixed vertex set."""

    def __init__(self, vertices: Iterable[int]):
        self.members = frozenset(vertices)

    def __call__(self, v: int) -> bool:
        return v in self.members


class RecordingOracle:
    """Wraps another oracle and keeps every (vertex, answer) pair it gave."""

    def __init__(self, inner: MembershipOracle):
        self.inner = inner
        self.answers: List[Tuple[int, bool]] = []

    def __call__(self, v: int) -> bool:
        answer = bool(self.inner(v))
        self.answers.append((v, answer))
        return answer

    def positives(self) -> VertexSet:
        return vertex_set(v for v, answer in self.answers if answer)


# --- Configuration ---

@dataclass(frozen=True)
class RoundConfig:
    """
    Parameters of one round on an (r+1)-uniform hypergraph, r = alpha.r.
    a = 25/eps^2 and b = ceil(2p|V|/eps) are derived on demand.
    """
    eps: Fraction
    p: Fraction
    alpha: AlphaWeights

    def __post_init__(self):
        eps, p = Fraction(self.eps), Fraction(self.p)
        if not 0 < eps < Fraction(1, 9 * self.alpha.r):
            raise RoundError(f"eps = {eps} outside (0, 1/{9 * self.alpha.r}).")
        if not 0 < p < 1:
            raise RoundError(f"p = {p} outside (0, 1).")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "p", p)

    @property
    def r(self) -> int:
        return self.alpha.r

    @property
    def a(self) -> Fraction:
        return 25 / self.eps ** 2

    def budget(self, vertex_count: int) -> int:
        return ceil(2 * self.p * vertex_count / self.eps)

    def sigma_sq(self, G: Multihypergraph) -> Fraction:
        return alpha_norm_sq(G, self.alpha) / (1 - 3 * self.eps) ** 2

    def hypothesis_bound(self) -> Fraction:
        """Largest ||sigma_G||^2 for which the round's analysis applies."""
        return self.eps ** 3 * self.p / (50 * (self.r + 1))


def choose_scaling(G: Multihypergraph, a: Fraction) -> Tuple[int, int]:
    """
    Smallest k (and then smallest m) with m/(2a) binom(|V|, r) <= k hat_Delta_1(G)
    <= m/a binom(|V|, r). An integer m >= 1 fits exactly when x = a k hat_Delta_1 /
    binom(|V|, r) is at least 1/2, and then m = ceil(x).
    """
    if G.is_empty():
        raise RoundError("choose_scaling needs a nonempty hypergraph.")
    if G.uniformity < 2:
        raise RoundError("choose_scaling needs an (r+1)-uniform hypergraph with r >= 1.")
    a = Fraction(a)
    seed_edges = comb(G.vertex_count, G.uniformity - 1)
    per_unit = a * hat_delta(G, 1) / seed_edges
    k = max(1, ceil(1 / (2 * per_unit)))
    x = k * per_unit
    m = max(1, ceil(x))
    assert Fraction(m, 2) <= x <= m
    return k, m


# --- Seeded accumulator ---

class SeededAccumulator:
    """
    G* = m copies of the complete r-uniform hypergraph on V plus an explicit
    part, without materialising the complete part. For each t the integer
    Q_t = sum over all t-sets T of deg(T)^2 is kept, so that
    ||sigma^(t)||^2 = Q_t / (binom(r, t) e)^2.
    """

    def __init__(self, vertex_count: int, r: int, m: int):
        if r < 1 or m < 1 or vertex_count < r:
            raise RoundError("Accumulator needs r >= 1, m >= 1 and |V| >= r.")
        self.vertex_count = vertex_count
        self.r = r
        self.m = m
        self._seed = [m * comb(vertex_count - t, r - t) for t in range(r + 1)]
        self._scale = [comb(r, t) for t in range(r + 1)]
        self._explicit: List[Dict[VertexSet, int]] = [dict() for _ in range(r + 1)]
        self._sums = [comb(vertex_count, t) * self._seed[t] ** 2 for t in range(r + 1)]
        self._links: Counter = Counter()
        self._explicit_edges = 0

    def edge_count(self) -> int:
        return self._seed[0] + self._explicit_edges

    def explicit_edge_count(self) -> int:
        return self._explicit_edges

    def degree(self, T: Iterable[int]) -> int:
        T = vertex_set(T)
        return self._seed[len(T)] + (self._explicit[len(T)].get(T, 0) if T else self._explicit_edges)

    def norm_sq(self, t: int) -> Fraction:
        return Fraction(self._sums[t], (self._scale[t] * self.edge_count()) ** 2)

    def _check_alpha(self, alpha: AlphaWeights):
        if alpha.r != self.r:
            raise RoundError(f"alpha has {alpha.r} coordinates, accumulator is {self.r}-uniform.")

    def alpha_norm_sq(self, alpha: AlphaWeights) -> Fraction:
        self._check_alpha(alpha)
        return sum((w * self.norm_sq(t) for t, w in enumerate(alpha.weights, start=1) if w), Fraction(0))

    def link_increments(self, items: Iterable[Tuple[VertexSet, int]]) -> Signature:
        """
        (d, (delta_1..delta_r)) for adding the given r-sets: d new edges and
        delta_t = sum_T (deg(T) + a_T)^2 - deg(T)^2.
        """
        added = 0
        counts: List[Dict[VertexSet, int]] = [dict() for _ in range(self.r + 1)]
        for edge, mult in items:
            added += mult
            for t in range(1, self.r + 1):
                bucket = counts[t]
                for T in combinations(edge, t):
                    bucket[T] = bucket.get(T, 0) + mult
        deltas = []
        for t in range(1, self.r + 1):
            seed, explicit = self._seed[t], self._explicit[t]
            deltas.append(sum(2 * (seed + explicit.get(T, 0)) * a + a * a for T, a in counts[t].items()))
        return added, tuple(deltas)

    def objective(self, signature: Signature, alpha: AlphaWeights, baseline: Fraction) -> Fraction:
        """e' (||sigma_alpha||^2 - baseline) after adding a link with the given signature."""
        added, deltas = signature
        total = self.edge_count() + added
        value = sum((w * Fraction(self._sums[t] + deltas[t - 1], self._scale[t] ** 2 * total)
                     for t, w in enumerate(alpha.weights, start=1) if w), Fraction(0))
        return value - baseline * total

    def alpha_norm_sq_with(self, extra: Multihypergraph, alpha: AlphaWeights) -> Fraction:
        self._check_alpha(alpha)
        added, deltas = self.link_increments(extra.items())
        total = self.edge_count() + added
        return sum((w * Fraction(self._sums[t] + deltas[t - 1], (self._scale[t] * total) ** 2)
                    for t, w in enumerate(alpha.weights, start=1) if w), Fraction(0))

    def add(self, items: Iterable[Tuple[VertexSet, int]]) -> Set[int]:
        """Adds r-sets to the explicit part; returns the vertices they cover."""
        covered: Set[int] = set()
        for edge, mult in items:
            covered.update(edge)
            self._links[edge] += mult
            self._explicit_edges += mult
            for t in range(1, self.r + 1):
                explicit, seed = self._explicit[t], self._seed[t]
                for T in combinations(edge, t):
                    old = explicit.get(T, 0)
                    explicit[T] = old + mult
                    self._sums[t] += (seed + old + mult) ** 2 - (seed + old) ** 2
        return covered

    def explicit_part(self) -> Multihypergraph:
        return Multihypergraph(self.r, self.vertex_count, self._links)

    def materialize(self) -> Multihypergraph:
        """The full G*; only sensible for tiny vertex counts."""
        seed = Counter({T: self.m for T in combinations(range(self.vertex_count), self.r)})
        seed.update(self._links)
        return Multihypergraph(self.r, self.vertex_count, seed)


# --- Outcome types ---

@dataclass(frozen=True)
class Pruned:
    container: VertexSet


@dataclass(frozen=True)
class Reduced:
    hypergraph: Multihypergraph


@dataclass
class RoundTrace:
    queries: List[int]
    L: List[int]
    J: int
    hypothesis_satisfied: bool
    k: int
    m: int
    b: int
    accumulator_edges: List[int] = field(default_factory=list)
    accepted_degrees: List[int] = field(default_factory=list)
    pruning_threshold: Fraction = Fraction(0)
    naive: bool = False


@dataclass
class RoundOutcome:
    fingerprint: Tuple[int, ...]
    branch: Union[Pruned, Reduced]
    trace: RoundTrace

    @property
    def is_pruned(self) -> bool:
        return isinstance(self.branch, Pruned)

    @property
    def fingerprint_set(self) -> VertexSet:
        return vertex_set(self.fingerprint)


# --- Candidate scans ---

class _NaiveScan:
    """Recomputes the spanning subgraph and every candidate objective each step."""

    def __init__(self, A: Multihypergraph, acc: SeededAccumulator, alpha: AlphaWeights,
                 baseline: Fraction, eps: Fraction):
        self.A = A
        self.acc = acc
        self.alpha = alpha
        self.baseline = baseline
        self.eps = eps

    def edge_count(self) -> int:
        return self.A.edge_count()

    def select(self) -> Tuple[int, LinkItems]:
        spanning = prune_min_degree(self.A, self.eps)
        v = select_vertex(spanning, self.acc, self.alpha, self.baseline)
        return v, list(link(spanning, v).items())

    def accepted(self, covered: Set[int]):
        pass

    def remove(self, v: int):
        self.A = remove_vertices(self.A, (v,))


class _IncrementalScan:
    """
    Keeps A and its spanning subgraph as incidence structures and buckets the
    candidates by the signature (d, delta_1..delta_r) their links would add.
    Every vertex in a bucket shares one objective, so S2 evaluates one
    objective per bucket; each bucket heap yields its smallest vertex.
    """

    def __init__(self, A: Multihypergraph, acc: SeededAccumulator, alpha: AlphaWeights,
                 baseline: Fraction, eps: Fraction):
        n = A.vertex_count
        self.n = n
        self.acc = acc
        self.alpha = alpha
        self.baseline = baseline
        self.eps = eps
        self.a_edges: Dict[VertexSet, int] = dict(A.items())
        self.a_inc: List[Set[VertexSet]] = [set() for _ in range(n)]
        self.a_deg = [0] * n
        for edge, mult in self.a_edges.items():
            for v in edge:
                self.a_inc[v].add(edge)
                self.a_deg[v] += mult
        self.a_size = A.edge_count()
        self.hat_edges: Dict[VertexSet, int] = {}
        self.hat_inc: List[Set[VertexSet]] = [set() for _ in range(n)]
        self.hat_deg = [0] * n
        self.hat_size = 0
        self.signature: List[Optional[Signature]] = [None] * n
        self.buckets: Dict[Signature, List[int]] = {}
        self.objectives: Dict[Signature, Fraction] = {}
        self.dirty: Set[int] = set()
        self.touched: Optional[Set[int]] = None

    def edge_count(self) -> int:
        return self.a_size

    def _core(self, threshold: Fraction) -> Set[VertexSet]:
        """Edges of A removed by iterated deletion at vertices of degree in (0, threshold)."""
        deg = list(self.a_deg)
        removed: Set[VertexSet] = set()
        queue = [v for v in range(self.n) if 0 < deg[v] < threshold]
        while queue:
            v = queue.pop()
            for edge in self.a_inc[v]:
                if edge in removed:
                    continue
                removed.add(edge)
                mult = self.a_edges[edge]
                for u in edge:
                    deg[u] -= mult
                    if 0 < deg[u] < threshold:
                        queue.append(u)
        return removed

    def _set_hat(self, edge: VertexSet, present: bool):
        mult = self.a_edges[edge]
        sign = 1 if present else -1
        if present:
            self.hat_edges[edge] = mult
        else:
            del self.hat_edges[edge]
        self.hat_size += sign * mult
        for u in edge:
            self.dirty.add(u)
            self.hat_deg[u] += sign * mult
            if present:
                self.hat_inc[u].add(edge)
            else:
                self.hat_inc[u].discard(edge)

    def _refresh_spanning(self):
        threshold = self.eps * self.a_size / self.n
        if (self.touched is not None and self.hat_size == self.a_size
                and all(self.hat_deg[v] == 0 or self.hat_deg[v] >= threshold for v in self.touched)):
            self.touched = set()
            return
        removed = self._core(threshold)
        for edge in [e for e in self.hat_edges if e in removed]:
            self._set_hat(edge, False)
        for edge in self.a_edges:
            if edge not in removed and edge not in self.hat_edges:
                self._set_hat(edge, True)
        self.touched = set()
        logger.debug("spanning subgraph rebuilt: %d of %d edges", self.hat_size, self.a_size)

    def _link_items(self, v: int) -> LinkItems:
        return [(tuple(u for u in edge if u != v), self.hat_edges[edge]) for edge in sorted(self.hat_inc[v])]

    def select(self) -> Tuple[int, LinkItems]:
        self._refresh_spanning()
        for v in self.dirty:
            new = self.acc.link_increments(self._link_items(v)) if self.hat_deg[v] > 0 else None
            if new != self.signature[v]:
                self.signature[v] = new
                if new is not None:
                    heapq.heappush(self.buckets.setdefault(new, []), v)
        self.dirty.clear()
        best: Optional[Tuple[Fraction, int]] = None
        for key in list(self.buckets):
            heap = self.buckets[key]
            while heap and self.signature[heap[0]] != key:
                heapq.heappop(heap)
            if not heap:
                del self.buckets[key]
                self.objectives.pop(key, None)
                continue
            value = self.objectives.get(key)
            if value is None:
                value = self.acc.objective(key, self.alpha, self.baseline)
                self.objectives[key] = value
            candidate = (value, heap[0])
            if best is None or candidate < best:
                best = candidate
        if best is None:
            raise RoundError("No vertex of positive degree is left in the spanning subgraph.")
        return best[1], self._link_items(best[1])

    def accepted(self, covered: Set[int]):
        self.objectives.clear()
        for u in covered:
            for edge in self.hat_inc[u]:
                self.dirty.update(edge)

    def remove(self, v: int):
        for edge in list(self.a_inc[v]):
            mult = self.a_edges[edge]
            if edge in self.hat_edges:
                self._set_hat(edge, False)
            del self.a_edges[edge]
            self.a_size -= mult
            for u in edge:
                self.a_inc[u].discard(edge)
                self.a_deg[u] -= mult
                self.touched.add(u)
                self.dirty.add(u)


# --- The round ---

def run_round(G: Multihypergraph, cfg: RoundConfig, oracle: MembershipOracle,
              naive: bool = False) -> RoundOutcome:
    """
    One application of the fingerprint algorithm to an (r+1)-uniform G. The
    oracle is read only at the queried vertices. Pruned iff
    J (r+1)^2 ||sigma_G||^2 >= eps^2; the container is then V minus the
    queried vertices, otherwise the accumulated links form the reduced
    hypergraph.
    """
    if G.is_empty():
        raise RoundError("run_round needs a nonempty hypergraph.")
    r = cfg.r
    if G.uniformity != r + 1:
        raise RoundError(f"Expected an {r + 1}-uniform hypergraph, got {G.uniformity}-uniform.")
    n, eps = G.vertex_count, cfg.eps

    k, m = choose_scaling(G, cfg.a)
    scaled = G if k == 1 else union_scale(G, Multihypergraph.empty(G.uniformity, n), k, 1)
    sigma_G = sigma_norm_sq(G, 1)
    hypothesis = sigma_G <= cfg.hypothesis_bound()
    b = cfg.budget(n)
    baseline = (1 + eps) * cfg.sigma_sq(G)
    stop_below = (1 - 2 * eps) * scaled.edge_count()
    acc = SeededAccumulator(n, r, m)
    start = prune_max_degree(scaled, Fraction(r + 1) / eps)
    scan = (_NaiveScan if naive else _IncrementalScan)(start, acc, cfg.alpha, baseline, eps)
    logger.info("round r=%d: |V|=%d e(G)=%d k=%d m=%d b=%d hypothesis=%s",
                r, n, G.edge_count(), k, m, b, hypothesis)

    queries: List[int] = []
    L: List[int] = []
    accumulator_edges: List[int] = []
    accepted_degrees: List[int] = []
    j = 0
    while True:
        accumulator_edges.append(acc.edge_count())
        if len(L) == b or scan.edge_count() < stop_below:
            break
        v, link_items = scan.select()
        queries.append(v)
        if oracle(v):
            L.append(j)
            accepted_degrees.append(sum(mult for _, mult in link_items))
            scan.accepted(acc.add(link_items))
        scan.remove(v)
        j += 1

    threshold = eps ** 2 / ((r + 1) ** 2 * sigma_G)
    trace = RoundTrace(queries=queries, L=L, J=j, hypothesis_satisfied=hypothesis, k=k, m=m, b=b,
                       accumulator_edges=accumulator_edges, accepted_degrees=accepted_degrees,
                       pruning_threshold=threshold, naive=naive)
    fingerprint = tuple(queries[i] for i in L)
    if j >= threshold:
        queried = set(queries)
        branch: Union[Pruned, Reduced] = Pruned(tuple(v for v in range(n) if v not in queried))
    else:
        branch = Reduced(acc.explicit_part())
    logger.info("round r=%d done: J=%d |S|=%d branch=%s", r, j, len(fingerprint),
                "pruned" if isinstance(branch, Pruned) else "reduced")
    return RoundOutcome(fingerprint=fingerprint, branch=branch, trace=trace)


def dichotomy_holds(G: Multihypergraph, cfg: RoundConfig, outcome: RoundOutcome) -> bool:
    """
    The analytic conclusion of the taken branch: J >= eps^2/((r+1)^2 ||sigma_G||^2)
    when pruned, ||sigma_alpha(F)||^2 <= ||sigma_alpha*(G)||^2 when reduced.
    """
    if outcome.is_pruned:
        return outcome.trace.J >= outcome.trace.pruning_threshold
    F = outcome.branch.hypergraph
    reduced = Fraction(0) if F.is_empty() else alpha_norm_sq(F, cfg.alpha)
    return reduced <= alpha_norm_sq(G, alpha_star(cfg.alpha, cfg.eps, cfg.p))


def trace_to_dict(outcome: RoundOutcome) -> dict:
    trace = outcome.trace
    payload = {
        "queries": list(trace.queries),
        "L": list(trace.L),
        "J": trace.J,
        "fingerprint": list(outcome.fingerprint),
        "branch": "pruned" if outcome.is_pruned else "reduced",
        "hypothesis": trace.hypothesis_satisfied,
        "k": trace.k,
        "m": trace.m,
        "b": trace.b,
        "pruning_threshold": format_rational(trace.pruning_threshold),
    }
    if outcome.is_pruned:
        payload["container"] = list(outcome.branch.container)
    else:
        payload["reduced_edges"] = outcome.branch.hypergraph.edge_count()
    return payload
