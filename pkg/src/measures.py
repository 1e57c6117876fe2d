# file: src/measures.py

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Mapping, Tuple, Union

from src.hypergraph import HypergraphError, Multihypergraph, VertexSet, max_degree_t, t_degrees

Rational = Union[int, Fraction]


class MeasureError(HypergraphError):
    """Raised when a measure is undefined or a parameter leaves its range."""
    pass


@dataclass(frozen=True)
class DegreeMeasure:
    """
    The t-degree measure of a host hypergraph: T -> deg T / (binom(r, t) e(H)).
    Only the support is stored; absent t-sets have value 0.
    """
    t: int
    host_uniformity: int
    entries: Mapping[VertexSet, Fraction]

    def entry(self, T: Iterable[int]) -> Fraction:
        return self.entries.get(tuple(sorted(T)), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))


@dataclass(frozen=True)
class AlphaWeights:
    """Nonnegative weights alpha_1..alpha_r; weight(t) is 1-based."""
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        converted = tuple(Fraction(w) for w in self.weights)
        if not converted:
            raise MeasureError("Alpha weights need at least one coordinate.")
        if any(w < 0 for w in converted):
            raise MeasureError(f"Alpha weights must be nonnegative: {converted}.")
        object.__setattr__(self, "weights", converted)

    @classmethod
    def of(cls, *weights: Rational) -> "AlphaWeights":
        return cls(tuple(weights))

    @property
    def r(self) -> int:
        return len(self.weights)

    def weight(self, t: int) -> Fraction:
        return self.weights[t - 1]

    def dominated_by(self, other: "AlphaWeights") -> bool:
        """Coordinate-wise self <= other on equal lengths."""
        return self.r == other.r and all(a <= b for a, b in zip(self.weights, other.weights))


# --- Degree measures and norms ---

def _require_measurable(H: Multihypergraph, t: int):
    if H.is_empty():
        raise MeasureError("Degree measures are defined only for nonempty hypergraphs.")
    if not 1 <= t <= H.uniformity:
        raise MeasureError(f"t = {t} outside 1..{H.uniformity}.")


def sigma_t(H: Multihypergraph, t: int) -> DegreeMeasure:
    _require_measurable(H, t)
    scale = comb(H.uniformity, t) * H.edge_count()
    entries = {T: Fraction(d, scale) for T, d in t_degrees(H, t).items()}
    return DegreeMeasure(t=t, host_uniformity=H.uniformity, entries=entries)


def norm_sq(mu: DegreeMeasure) -> Fraction:
    return sum((value * value for value in mu.entries.values()), Fraction(0))


def sigma_norm_sq(H: Multihypergraph, t: int) -> Fraction:
    """||sigma_H^(t)||^2 from the integer degree sums, without building the measure."""
    _require_measurable(H, t)
    scale = comb(H.uniformity, t) * H.edge_count()
    return Fraction(sum(d * d for d in t_degrees(H, t).values()), scale * scale)


def hat_delta(H: Multihypergraph, t: int) -> Fraction:
    """Robust t-degree (r/t) e(H) ||sigma^(t)||^2."""
    return Fraction(H.uniformity, t) * H.edge_count() * sigma_norm_sq(H, t)


def alpha_norm_sq(H: Multihypergraph, alpha: AlphaWeights) -> Fraction:
    """sum_t alpha_t ||sigma_H^(t)||^2 over t = 1..alpha.r."""
    if H.is_empty():
        raise MeasureError("The alpha-norm is defined only for nonempty hypergraphs.")
    if alpha.r > H.uniformity:
        raise MeasureError(f"alpha has {alpha.r} coordinates but H is {H.uniformity}-uniform.")
    return sum((w * sigma_norm_sq(H, t) for t, w in enumerate(alpha.weights, start=1) if w),
               Fraction(0))


def hat_delta_alpha(A: Multihypergraph, alpha: AlphaWeights) -> Fraction:
    """sum_t alpha_t hat_Delta_{t+1}(A) for an (r+1)-uniform A."""
    if A.uniformity != alpha.r + 1:
        raise MeasureError(f"Expected an {alpha.r + 1}-uniform hypergraph, got {A.uniformity}.")
    if A.is_empty():
        raise MeasureError("hat_delta_alpha is undefined for an empty hypergraph.")
    return sum((w * hat_delta(A, t + 1) for t, w in enumerate(alpha.weights, start=1) if w),
               Fraction(0))


# --- Alpha schedule ---

def epsilon_for(s: int) -> Fraction:
    return Fraction(1, 10 * s)


def gamma_for(s: int) -> Fraction:
    """Gamma = 50 s / eps^2 with eps = 1/(10 s), i.e. 5000 s^3."""
    return 50 * s / epsilon_for(s) ** 2


def alpha_star(alpha: AlphaWeights, eps: Rational, p: Rational) -> AlphaWeights:
    """
    (1+eps)^10 (alpha, 0) + 50(r+1)/(eps^2 p) (0, alpha), a vector of length r+1.
    """
    eps, p = Fraction(eps), Fraction(p)
    r = alpha.r
    if not 0 < eps < Fraction(1, 9 * r):
        raise MeasureError(f"eps = {eps} outside (0, 1/{9 * r}).")
    if not 0 < p < 1:
        raise MeasureError(f"p = {p} outside (0, 1).")
    grow = (1 + eps) ** 10
    shift = Fraction(50 * (r + 1)) / (eps * eps * p)
    head = tuple(grow * w for w in alpha.weights) + (Fraction(0),)
    tail = (Fraction(0),) + tuple(shift * w for w in alpha.weights)
    return AlphaWeights(tuple(a + b for a, b in zip(head, tail)))


def alpha_schedule(s: int, p: Rational, r: int) -> AlphaWeights:
    """alpha_t^(r) = binom(r-1, t-1) (1+eps)^(10(r-t)) (Gamma/p)^(t-1) with eps = 1/(10s)."""
    p = Fraction(p)
    if not 1 <= r <= s:
        raise MeasureError(f"r = {r} outside 1..{s}.")
    if not 0 < p < 1:
        raise MeasureError(f"p = {p} outside (0, 1).")
    eps = epsilon_for(s)
    ratio = gamma_for(s) / p
    return AlphaWeights(tuple(comb(r - 1, t - 1) * (1 + eps) ** (10 * (r - t)) * ratio ** (t - 1)
                              for t in range(1, r + 1)))


# --- Exact comparisons involving square roots ---

def le_sqrt(lhs: Rational, coeff: Rational, radicand: Rational) -> bool:
    """Decides lhs <= coeff * sqrt(radicand) exactly for coeff, radicand >= 0."""
    lhs, coeff, radicand = Fraction(lhs), Fraction(coeff), Fraction(radicand)
    if coeff < 0 or radicand < 0:
        raise MeasureError("le_sqrt needs a nonnegative coefficient and radicand.")
    if lhs <= 0:
        return True
    return lhs * lhs <= coeff * coeff * radicand


def measure_table(H: Multihypergraph, t: int) -> Dict[str, Fraction]:
    """The quantities reported by the measure command for one t."""
    return {
        "norm_sq": sigma_norm_sq(H, t),
        "max_degree": Fraction(max_degree_t(H, t)),
        "hat_delta": hat_delta(H, t),
    }
