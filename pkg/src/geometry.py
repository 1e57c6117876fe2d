# file: src/geometry.py

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol, Sequence, Tuple

from src.hypergraph import HypergraphError, Multihypergraph, link, union_scale
from src.measures import AlphaWeights, alpha_norm_sq, hat_delta, hat_delta_alpha, le_sqrt

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]


class GeometryError(HypergraphError):
    pass


def _sq(vector: Sequence[Fraction]) -> Fraction:
    return sum((c * c for c in vector), Fraction(0))


@dataclass(frozen=True)
class WeightedVectors:
    """
    Vectors nu_1..nu_k with convex weights lambda, a base point mu, and step
    lengths 0 < x_i <= x. Indices are 0-based.
    """
    vectors: Tuple[Vector, ...]
    lam: Vector
    mu: Vector
    x: Fraction
    xs: Vector

    def __post_init__(self):
        vectors = tuple(tuple(Fraction(c) for c in v) for v in self.vectors)
        lam = tuple(Fraction(c) for c in self.lam)
        mu = tuple(Fraction(c) for c in self.mu)
        xs = tuple(Fraction(c) for c in self.xs)
        x = Fraction(self.x)
        if not vectors or len(lam) != len(vectors) or len(xs) != len(vectors):
            raise GeometryError("vectors, lam and xs must have the same positive length.")
        if any(len(v) != len(mu) for v in vectors):
            raise GeometryError("Every vector must share the dimension of mu.")
        if any(c < 0 for v in vectors for c in v) or any(c < 0 for c in mu):
            raise GeometryError("Vectors must have nonnegative coordinates.")
        if any(c < 0 for c in lam) or sum(lam) != 1:
            raise GeometryError("lam must be a nonnegative vector summing to exactly 1.")
        if x <= 0 or any(not 0 < xi <= x for xi in xs):
            raise GeometryError("Step lengths must satisfy 0 < x_i <= x.")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "x", x)

    @property
    def k(self) -> int:
        return len(self.vectors)

    def nu(self) -> Vector:
        """The convex combination sum_i lambda_i nu_i."""
        return tuple(sum((l * v[c] for l, v in zip(self.lam, self.vectors)), Fraction(0))
                     for c in range(len(self.mu)))

    def mu_i(self, i: int) -> Vector:
        step = self.xs[i] * self.lam[i]
        return tuple((1 - step) * m + step * n for m, n in zip(self.mu, self.vectors[i]))


def direction_gain(w: WeightedVectors, i: int) -> Fraction:
    """(||mu_i||^2 - ||mu||^2) / (lambda_i x_i)."""
    return (_sq(w.mu_i(i)) - _sq(w.mu)) / (w.lam[i] * w.xs[i])


def select_direction(w: WeightedVectors) -> int:
    """Index with positive weight minimising direction_gain; ties go to the smallest index."""
    best: Optional[Tuple[Fraction, int]] = None
    for i in range(w.k):
        if w.lam[i] == 0:
            continue
        candidate = (direction_gain(w, i), i)
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise GeometryError("Every lambda_i is zero.")
    return best[1]


def _error_terms(w: WeightedVectors) -> Tuple[Fraction, Fraction]:
    mu_sq = _sq(w.mu)
    spread = w.x * _sq(w.lam) * mu_sq + w.x * sum((l * l * _sq(v) for l, v in zip(w.lam, w.vectors)),
                                                  Fraction(0))
    return mu_sq, spread


def direction_bound_holds(w: WeightedVectors, i: int) -> bool:
    """
    ||mu_i||^2 <= ||mu||^2 + lambda_i x_i ((2||nu||/||mu|| - 2 + x||lambda||^2) ||mu||^2
    + x sum_j lambda_j^2 ||nu_j||^2), evaluated with the quotient multiplied out.
    """
    mu_sq, spread = _error_terms(w)
    step = w.lam[i] * w.xs[i]
    lhs = _sq(w.mu_i(i)) - mu_sq - step * (spread - 2 * mu_sq)
    return le_sqrt(lhs, 2 * step, _sq(w.nu()) * mu_sq)


def averaging_bound_holds(w: WeightedVectors) -> bool:
    """The minimum gain is at most 2(||nu|| ||mu|| - ||mu||^2) + the spread terms."""
    mu_sq, spread = _error_terms(w)
    gain = direction_gain(w, select_direction(w))
    return le_sqrt(gain - spread + 2 * mu_sq, 2, _sq(w.nu()) * mu_sq)


# --- Hypergraph form ---

class NormOracle(Protocol):
    """Read access to an r-uniform accumulator G* and its updates G* + extra."""

    def edge_count(self) -> int:
        ...

    def alpha_norm_sq(self, alpha: AlphaWeights) -> Fraction:
        ...

    def alpha_norm_sq_with(self, extra: Multihypergraph, alpha: AlphaWeights) -> Fraction:
        ...


class ExplicitNormOracle:
    """NormOracle over a materialised hypergraph; an empty one has norm 0."""

    def __init__(self, hypergraph: Multihypergraph):
        self.hypergraph = hypergraph

    def edge_count(self) -> int:
        return self.hypergraph.edge_count()

    def alpha_norm_sq(self, alpha: AlphaWeights) -> Fraction:
        if self.hypergraph.is_empty():
            return Fraction(0)
        return alpha_norm_sq(self.hypergraph, alpha)

    def alpha_norm_sq_with(self, extra: Multihypergraph, alpha: AlphaWeights) -> Fraction:
        if extra.is_empty():
            return self.alpha_norm_sq(alpha)
        if self.hypergraph.is_empty():
            return alpha_norm_sq(extra, alpha)
        return alpha_norm_sq(union_scale(self.hypergraph, extra, 1, 1), alpha)


def vertex_objective(A: Multihypergraph, Gstar: NormOracle, alpha: AlphaWeights, v: int,
                     baseline: Fraction = Fraction(0)) -> Fraction:
    """e(G*^v) (||sigma_alpha(G*^v)||^2 - baseline) with G*^v = G* + A_v."""
    extra = link(A, v)
    total = Gstar.edge_count() + extra.edge_count()
    return total * (Gstar.alpha_norm_sq_with(extra, alpha) - baseline)


def select_vertex(A: Multihypergraph, Gstar: NormOracle, alpha: AlphaWeights,
                  baseline: Fraction = Fraction(0)) -> int:
    """
    Positive-degree vertex of A minimising vertex_objective, smallest index on
    ties. The round algorithm passes baseline = (1 + eps) sigma^2.
    """
    if A.is_empty():
        raise GeometryError("select_vertex needs a nonempty hypergraph A.")
    best: Optional[Tuple[Fraction, int]] = None
    for v, d in enumerate(A.vertex_degrees()):
        if d == 0:
            continue
        candidate = (vertex_objective(A, Gstar, alpha, v, baseline), v)
        if best is None or candidate < best:
            best = candidate
    logger.debug("select_vertex: v=%d objective=%s", best[1], best[0])
    return best[1]


def proposition_holds(A: Multihypergraph, Gstar: NormOracle, alpha: AlphaWeights, v: int) -> bool:
    """
    Whether v satisfies the norm-change inequality
    ||s(G*^v)||^2 <= ||s(G*)||^2 + deg v / e(G*^v) * ((2||s(A)||/||s(G*)|| - 2
    + hat_Delta_1(A)/e(G*)) ||s(G*)||^2 + hat_Delta_alpha(A)/e(G*)), s = sigma_alpha.
    """
    e_star = Gstar.edge_count()
    if e_star == 0:
        raise GeometryError("The norm-change inequality needs a nonempty G*.")
    extra = link(A, v)
    if extra.is_empty():
        return False
    current = Gstar.alpha_norm_sq(alpha)
    coeff = Fraction(extra.edge_count(), e_star + extra.edge_count())
    drift = (Fraction(-2) + hat_delta(A, 1) / e_star) * current + hat_delta_alpha(A, alpha) / e_star
    lhs = Gstar.alpha_norm_sq_with(extra, alpha) - current - coeff * drift
    return le_sqrt(lhs, 2 * coeff, alpha_norm_sq(A, alpha) * current)


def find_proposition_vertex(A: Multihypergraph, Gstar: NormOracle, alpha: AlphaWeights) -> Optional[int]:
    """Smallest positive-degree vertex satisfying proposition_holds, if any."""
    for v, d in enumerate(A.vertex_degrees()):
        if d and proposition_holds(A, Gstar, alpha, v):
            return v
    return None
