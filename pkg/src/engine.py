# file: src/engine.py

import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from itertools import combinations
from math import comb, floor
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.hypergraph import (
    HypergraphError,
    Multihypergraph,
    PreconditionError,
    VertexSet,
    compact,
    delta1_supersaturate,
    expand_labels,
    is_independent,
    max_degree_t,
    restrict,
    vertex_set,
)
from src.measures import alpha_schedule, epsilon_for, sigma_norm_sq
from src.rounds import MembershipOracle, RoundConfig, RoundOutcome, run_round

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


class HypothesisError(HypergraphError):
    """A theorem's quantitative hypothesis failed and the run was not forced."""
    def __init__(self, message: str, report: "HypothesisReport"):
        super().__init__(message)
        self.report = report


class LimitExceeded(HypergraphError):
    """An enumeration or tree limit was hit; `partial` holds what was built."""
    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


# --- Hypothesis checks ---

@dataclass(frozen=True)
class InequalityCheck:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


@dataclass
class HypothesisReport:
    theorem: str
    checks: List[InequalityCheck] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(check.holds for check in self.checks)

    def failed(self) -> List[str]:
        return [check.name for check in self.checks if not check.holds]


def _unit_interval(name: str, value: Rational, closed_right: bool = False) -> Fraction:
    value = Fraction(value)
    if not (0 < value <= 1 if closed_right else 0 < value < 1):
        raise HypergraphError(f"{name} = {value} is outside (0, 1{']' if closed_right else ')'}.")
    return value


def _require_nonempty(H: Multihypergraph):
    if H.is_empty():
        raise HypergraphError("The container construction needs a nonempty hypergraph.")


def check_hypothesis_main(H: Multihypergraph, p: Rational, delta: Rational) -> HypothesisReport:
    """
    300 s^4 sum_t binom(s-1, t-1) (5000 s^3 / p)^(t-1) ||sigma^(t)||^2
    <= 1/(delta v(H)) <= p/500.
    """
    _require_nonempty(H)
    p = _unit_interval("p", p)
    delta = Fraction(delta)
    if delta <= 0:
        raise HypergraphError(f"delta = {delta} must be positive.")
    s, v = H.uniformity, H.vertex_count
    weighted = sum((comb(s - 1, t - 1) * (5000 * s ** 3 / p) ** (t - 1) * sigma_norm_sq(H, t)
                    for t in range(1, s + 1)), Fraction(0))
    middle = 1 / (delta * v)
    return HypothesisReport("main", [
        InequalityCheck("weighted_norms", 300 * s ** 4 * weighted, middle),
        InequalityCheck("density", middle, p / 500),
    ])


def check_hypothesis_simple(H: Multihypergraph, q: Rational, K: Rational) -> HypothesisReport:
    """q v(H) >= 10^8 s^6 K and Delta_t(H) <= K (q/(10^6 s^5))^(t-1) e(H)/v(H) for every t."""
    _require_nonempty(H)
    q = _unit_interval("q", q, closed_right=True)
    K = Fraction(K)
    if K <= 0:
        raise HypergraphError(f"K = {K} must be positive.")
    s, v, e = H.uniformity, H.vertex_count, H.edge_count()
    report = HypothesisReport("simple", [InequalityCheck("size", 10 ** 8 * s ** 6 * K, q * v)])
    for t in range(1, s + 1):
        bound = K * (q / (10 ** 6 * s ** 5)) ** (t - 1) * Fraction(e, v)
        report.checks.append(InequalityCheck(f"degree_{t}", Fraction(max_degree_t(H, t)), bound))
    return report


def check_hypothesis_packaged(H: Multihypergraph, alpha: Rational, beta: Rational,
                              q: Rational, E: int) -> HypothesisReport:
    """alpha beta q v(H) >= 10^9 s^7, 10^4 s^5 q <= beta, E >= v(H) and the codegree bounds."""
    _require_nonempty(H)
    alpha = _unit_interval("alpha", alpha)
    beta = _unit_interval("beta", beta)
    q = _unit_interval("q", q, closed_right=True)
    if E < 1:
        raise HypergraphError(f"E = {E} must be a positive integer.")
    s, v = H.uniformity, H.vertex_count
    report = HypothesisReport("packaged", [
        InequalityCheck("size", Fraction(10 ** 9 * s ** 7), alpha * beta * q * v),
        InequalityCheck("q_vs_beta", 10 ** 4 * s ** 5 * q, beta),
        InequalityCheck("E_vs_v", Fraction(v), Fraction(E)),
    ])
    for t in range(2, s + 1):
        bound = (q / (10 ** 6 * s ** 5)) ** (t - 1) * Fraction(E, v)
        report.checks.append(InequalityCheck(f"degree_{t}", Fraction(max_degree_t(H, t)), bound))
    return report


# --- Multi-round fingerprints ---

@dataclass
class FingerprintResult:
    g: VertexSet
    f_star: VertexSet
    rounds_used: int
    outcomes: List[RoundOutcome]
    hypotheses: List[HypothesisReport]
    stop_reason: str
    bounds_hold: Optional[bool] = None

    @property
    def container(self) -> VertexSet:
        return vertex_set(self.g + self.f_star)


def build_fingerprint(H: Multihypergraph, p: Rational, delta: Rational, I: MembershipOracle,
                      forced: bool = False, naive: bool = False) -> FingerprintResult:
    """
    Runs rounds r = s-1 down to 1 with eps = 1/(10s) and the alpha^(r)
    schedule. A pruned round stops with f* = its container; a reduced round
    hands its hypergraph to the next one. After the last round f* is the set
    of vertices that are not singleton edges of the 1-uniform remainder.
    """
    report = check_hypothesis_main(H, p, delta)
    if not report.holds and not forced:
        raise HypothesisError(f"Hypothesis fails: {', '.join(report.failed())}.", report)
    p, delta = Fraction(p), Fraction(delta)
    s, n = H.uniformity, H.vertex_count
    eps = epsilon_for(s)
    current = H
    g: set = set()
    outcomes: List[RoundOutcome] = []
    f_star: Optional[VertexSet] = None
    stop_reason = "terminal"
    for r in range(s - 1, 0, -1):
        cfg = RoundConfig(eps, p, alpha_schedule(s, p, r))
        outcome = run_round(current, cfg, I, naive=naive)
        outcomes.append(outcome)
        g.update(outcome.fingerprint)
        if outcome.is_pruned:
            f_star, stop_reason = outcome.branch.container, "pruned"
            break
        current = outcome.branch.hypergraph
        if current.is_empty():
            f_star, stop_reason = tuple(range(n)), "exhausted"
            logger.info("round r=%d left no edges; container is the whole vertex set", r)
            break
    if f_star is None:
        blocked = {edge[0] for edge in current.edge_sets()}
        f_star = tuple(v for v in range(n) if v not in blocked)

    result = FingerprintResult(g=vertex_set(g), f_star=f_star, rounds_used=len(outcomes),
                               outcomes=outcomes, hypotheses=[report], stop_reason=stop_reason)
    if report.holds:
        result.bounds_hold = (len(result.g) <= 30 * s * s * p * n
                              and len(result.f_star) <= (1 - delta) * n)
        if not result.bounds_hold:
            logger.warning("size bounds violated although the hypothesis holds")
    return result


def simple_parameters(s: int, q: Rational, K: Rational) -> Tuple[Fraction, Fraction]:
    """p = q/(30 s^2) and delta = 1/(10^3 s^4 K)."""
    q, K = Fraction(q), Fraction(K)
    return q / (30 * s * s), 1 / (1000 * s ** 4 * K)


def main_simple(H: Multihypergraph, q: Rational, K: Rational, I: MembershipOracle,
                forced: bool = False, naive: bool = False) -> FingerprintResult:
    report = check_hypothesis_simple(H, q, K)
    if not report.holds and not forced:
        raise HypothesisError(f"Hypothesis fails: {', '.join(report.failed())}.", report)
    p, delta = simple_parameters(H.uniformity, q, K)
    result = build_fingerprint(H, p, delta, I, forced=forced, naive=naive)
    result.hypotheses.insert(0, report)
    if report.holds and len(result.g) > Fraction(q) * H.vertex_count:
        logger.warning("fingerprint larger than q v(H) although the hypothesis holds")
    return result


def container_for(H: Multihypergraph, q: Rational, K: Rational, I: MembershipOracle,
                  forced: bool = False) -> Tuple[VertexSet, VertexSet]:
    """Per-I mode: (g(I), g(I) + f*(I))."""
    result = main_simple(H, q, K, I, forced=forced)
    return result.g, result.container


# --- Enumeration over membership answers ---

class _Unanswered(Exception):
    def __init__(self, vertex: int):
        self.vertex = vertex


class ScriptedOracle:
    """
    Answers the first queries from a script of booleans, repeating earlier
    answers for vertices queried again, and raises on the first query past
    the end of the script.
    """

    def __init__(self, script: Sequence[bool]):
        self.script = script
        self.memo: Dict[int, bool] = {}
        self.answers: List[Tuple[int, bool]] = []

    def __call__(self, v: int) -> bool:
        if v in self.memo:
            return self.memo[v]
        if len(self.answers) == len(self.script):
            raise _Unanswered(v)
        answer = bool(self.script[len(self.answers)])
        self.memo[v] = answer
        self.answers.append((v, answer))
        return answer

    def positives(self) -> VertexSet:
        return vertex_set(v for v, answer in self.answers if answer)


@dataclass(frozen=True)
class EnumeratedContainer:
    fingerprint: VertexSet
    container: VertexSet
    answers: Tuple[Tuple[int, bool], ...]


@dataclass
class ContainerEnumeration:
    entries: List[EnumeratedContainer]
    partial: bool

    def containers(self) -> List[VertexSet]:
        return [entry.container for entry in self.entries]


def enumerate_containers(H: Multihypergraph, q: Rational, K: Rational, forced: bool = False,
                         limit: int = 1000) -> ContainerEnumeration:
    """
    Depth-first walk of the membership-answer tree, "no" before "yes". A
    "yes" is only explored while the accepted vertices stay independent in H.
    Each leaf yields the fingerprint and its container.
    """
    report = check_hypothesis_simple(H, q, K)
    if not report.holds and not forced:
        raise HypothesisError(f"Hypothesis fails: {', '.join(report.failed())}.", report)
    stack: List[Tuple[bool, ...]] = [()]
    entries: List[EnumeratedContainer] = []
    partial = False
    while stack:
        script = stack.pop()
        oracle = ScriptedOracle(script)
        try:
            result = main_simple(H, q, K, oracle, forced=True)
        except _Unanswered as pending:
            stack.append(script + (False,))
            if is_independent(H, oracle.positives() + (pending.vertex,)):
                stack.insert(len(stack) - 1, script + (True,))
            continue
        if len(entries) >= limit:
            partial = True
            logger.warning("container enumeration stopped at %d leaves", limit)
            break
        entries.append(EnumeratedContainer(result.g, result.container, tuple(oracle.answers)))
    return ContainerEnumeration(entries=entries, partial=partial)


# --- Packaged container tree ---

@dataclass(frozen=True)
class GoodWitness:
    kind: Optional[str]
    W: Optional[VertexSet] = None
    decided: bool = True


def find_good_witness(H: Multihypergraph, C: Sequence[int], alpha: Rational, beta: Rational,
                      E: int, search_limit: int = 20000) -> GoodWitness:
    """
    "small" when |C| <= alpha v(H); "sparse" with W when some W inside C with
    |W| >= (1 - beta)|C| spans fewer than E edges. Deleting exactly
    floor(beta |C|) vertices is enough to decide the second case; when that
    search exceeds search_limit, greedy max-degree deletion is tried and a
    miss is reported as undecided.
    """
    C = vertex_set(C)
    if len(C) <= Fraction(alpha) * H.vertex_count:
        return GoodWitness("small")
    inside = list(restrict(H, C).items())
    if sum(mult for _, mult in inside) < E:
        return GoodWitness("sparse", C)
    removable = floor(Fraction(beta) * len(C))
    if removable == 0:
        return GoodWitness(None)
    if comb(len(C), removable) > search_limit:
        return _greedy_witness(C, inside, removable, E)
    for removal in combinations(C, removable):
        dropped = set(removal)
        if sum(mult for edge, mult in inside if dropped.isdisjoint(edge)) < E:
            return GoodWitness("sparse", tuple(v for v in C if v not in dropped))
    return GoodWitness(None)


def _greedy_witness(C: VertexSet, inside: List[Tuple[VertexSet, int]], removable: int,
                    E: int) -> GoodWitness:
    remaining = list(inside)
    dropped: set = set()
    for _ in range(removable):
        load: Dict[int, int] = {}
        for edge, mult in remaining:
            for v in edge:
                load[v] = load.get(v, 0) + mult
        if not load:
            break
        heaviest = min(load, key=lambda v: (-load[v], v))
        dropped.add(heaviest)
        remaining = [(edge, mult) for edge, mult in remaining if heaviest not in edge]
    if sum(mult for _, mult in remaining) < E:
        return GoodWitness("sparse", tuple(v for v in C if v not in dropped))
    return GoodWitness(None, decided=False)


@dataclass
class TreeLimits:
    max_nodes: int = 500
    max_leaves: int = 500
    enumeration_limit: int = 1000
    search_limit: int = 20000


@dataclass
class ContainerNode:
    container: VertexSet
    depth: int
    good: bool = False
    witness_kind: Optional[str] = None
    witness: Optional[VertexSet] = None
    stalled: bool = False
    children: List["ContainerNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class ContainerTree:
    root: ContainerNode
    alpha: Fraction
    beta: Fraction
    q: Fraction
    E: int
    forced: bool
    hypothesis: HypothesisReport
    partial: bool = False
    notes: List[str] = field(default_factory=list)

    def nodes(self) -> List[ContainerNode]:
        ordered, queue = [], deque([self.root])
        while queue:
            node = queue.popleft()
            ordered.append(node)
            queue.extend(node.children)
        return ordered

    def leaves(self) -> List[ContainerNode]:
        return [node for node in self.nodes() if node.is_leaf]

    def height(self) -> int:
        return max(node.depth for node in self.nodes())


@dataclass
class NodeExpansion:
    """What one worker learned about a container: a good witness or its children."""
    witness_kind: Optional[str] = None
    witness: Optional[VertexSet] = None
    children: Optional[List[VertexSet]] = None
    overflow: bool = False
    inconsistent: bool = False

    @property
    def good(self) -> bool:
        return self.witness_kind is not None


def expand_container(H: Multihypergraph, alpha: Fraction, beta: Fraction, q: Fraction, E: int,
                     forced: bool, limits: TreeLimits, container: VertexSet) -> NodeExpansion:
    """Classifies one container; a node that is not good gets its child containers."""
    witness = find_good_witness(H, container, alpha, beta, E, limits.search_limit)
    if witness.kind is not None:
        return NodeExpansion(witness.kind, witness.W)
    local, mapping = compact(H, container)
    try:
        dense = delta1_supersaturate(local, beta, E)
    except PreconditionError as exc:
        return NodeExpansion("sparse", expand_labels(mapping, exc.witness), inconsistent=witness.decided)
    K = Fraction(2 * H.uniformity) / beta
    enumeration = enumerate_containers(dense, q, K, forced=forced, limit=limits.enumeration_limit)
    if enumeration.partial:
        return NodeExpansion(overflow=True)
    return NodeExpansion(children=sorted({expand_labels(mapping, c) for c in enumeration.containers()}))


def packaged_containers(H: Multihypergraph, alpha: Rational, beta: Rational, q: Rational, E: int,
                        forced: bool = False, limits: Optional[TreeLimits] = None,
                        workers: int = 1) -> ContainerTree:
    """
    Builds the container tree breadth-first from the root V(H). A node that is
    not good is replaced by the containers of a degree-capped subhypergraph
    of H[C] with at least E edges (K = 2s/beta); children are sorted
    lexicographically. A child equal to its parent is kept as a stalled leaf.
    With workers > 1 the nodes of a level are classified in a process pool;
    results are merged in level order, so the tree does not depend on workers.
    """
    limits = limits or TreeLimits()
    report = check_hypothesis_packaged(H, alpha, beta, q, E)
    if not report.holds and not forced:
        raise HypothesisError(f"Hypothesis fails: {', '.join(report.failed())}.", report)
    tree = ContainerTree(root=ContainerNode(tuple(range(H.vertex_count)), 0), alpha=Fraction(alpha),
                         beta=Fraction(beta), q=Fraction(q), E=E, forced=forced, hypothesis=report)
    level = [tree.root]
    node_count, finished_leaves = 1, 0
    log_child_bound = float(tree.q) * H.vertex_count * (1 - math.log(tree.q))
    expand = partial(expand_container, H, tree.alpha, tree.beta, tree.q, E, forced, limits)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while level:
            containers = [node.container for node in level]
            if pool is not None:
                expansions = list(pool.map(expand, containers))
            else:
                expansions = [expand(container) for container in containers]
            next_level: List[ContainerNode] = []
            for node, expansion in zip(level, expansions):
                if expansion.overflow:
                    raise LimitExceeded(f"Subcall enumeration exceeded {limits.enumeration_limit} leaves.", tree)
                if expansion.good:
                    node.good, node.witness_kind, node.witness = True, expansion.witness_kind, expansion.witness
                    finished_leaves += 1
                    if expansion.inconsistent:
                        message = f"node {list(node.container)} classified not good but has a sparse witness"
                        logger.error(message)
                        tree.notes.append(message)
                    continue
                children = expansion.children
                if report.holds and math.log(len(children)) > log_child_bound:
                    tree.notes.append(f"child count {len(children)} exceeds (e/q)^(q v(H)) at {list(node.container)}")
                for container in children:
                    child = ContainerNode(container, node.depth + 1)
                    node.children.append(child)
                    if container == node.container:
                        child.stalled = True
                        finished_leaves += 1
                        logger.warning("container %s reproduces its parent; kept as a stalled leaf",
                                       list(container))
                    else:
                        next_level.append(child)
                node_count += len(children)
                logger.info("expanded node of size %d into %d children", len(node.container), len(children))
            if node_count > limits.max_nodes:
                raise LimitExceeded(f"Container tree exceeded {limits.max_nodes} nodes.", tree)
            if finished_leaves + len(next_level) > limits.max_leaves:
                raise LimitExceeded(f"Container tree exceeded {limits.max_leaves} leaves.", tree)
            level = next_level
    except LimitExceeded:
        tree.partial = True
        raise
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    if report.holds:
        s = H.uniformity
        height_bound = 10 ** 4 * s ** 5 / float(tree.beta) * (1 - math.log(tree.alpha))
        if tree.height() > height_bound:
            tree.notes.append(f"height {tree.height()} exceeds {height_bound:.3g}")
    return tree
