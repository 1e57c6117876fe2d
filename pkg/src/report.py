# file: src/report.py

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from src import __version__
from src.codec import format_rational
from src.engine import (
    ContainerEnumeration,
    ContainerNode,
    ContainerTree,
    EnumeratedContainer,
    FingerprintResult,
    HypothesisReport,
    InequalityCheck,
)
from src.oracles import CoverReport, SupersaturationReport
from src.rounds import RoundOutcome, trace_to_dict


class ReportVisitor:
    """Base class for a visitor over result objects."""
    def visit(self, node):
        method_name = 'visit_' + type(node).__name__
        visitor = getattr(self, method_name, self.generic_visit)
        return visitor(node)

    def generic_visit(self, node):
        raise TypeError(f'No visit_{type(node).__name__} method defined')


class JsonReport(ReportVisitor):
    """
    Turns engine and oracle results into JSON-ready dictionaries. Vertex sets
    become sorted lists and every rational becomes a "num/den" string.
    """
    def render(self, node) -> Dict[str, Any]:
        return self.visit(node)

    # --- Hypotheses ---

    def visit_InequalityCheck(self, node: InequalityCheck) -> Dict[str, Any]:
        return {
            "name": node.name,
            "lhs": format_rational(node.lhs),
            "rhs": format_rational(node.rhs),
            "holds": node.holds,
        }

    def visit_HypothesisReport(self, node: HypothesisReport) -> Dict[str, Any]:
        return {
            "theorem": node.theorem,
            "holds": node.holds,
            "checks": [self.visit(check) for check in node.checks],
        }

    # --- Fingerprints ---

    def visit_RoundOutcome(self, node: RoundOutcome) -> Dict[str, Any]:
        return trace_to_dict(node)

    def visit_FingerprintResult(self, node: FingerprintResult) -> Dict[str, Any]:
        return {
            "g": list(node.g),
            "f_star": list(node.f_star),
            "container": list(node.container),
            "rounds_used": node.rounds_used,
            "stop_reason": node.stop_reason,
            "bounds_hold": node.bounds_hold,
            "rounds": [self.visit(outcome) for outcome in node.outcomes],
            "hypotheses": [self.visit(report) for report in node.hypotheses],
        }

    def visit_EnumeratedContainer(self, node: EnumeratedContainer) -> Dict[str, Any]:
        return {
            "fingerprint": list(node.fingerprint),
            "container": list(node.container),
            "answers": [[v, answer] for v, answer in node.answers],
        }

    def visit_ContainerEnumeration(self, node: ContainerEnumeration) -> Dict[str, Any]:
        return {
            "partial": node.partial,
            "containers": [self.visit(entry) for entry in node.entries],
        }

    # --- Container tree ---

    def visit_ContainerNode(self, node: ContainerNode) -> Dict[str, Any]:
        return {
            "C": list(node.container),
            "good": node.good,
            "witness_kind": node.witness_kind,
            "witness_W": None if node.witness is None else list(node.witness),
            "stalled": node.stalled,
            "children": [self.visit(child) for child in node.children],
        }

    def visit_ContainerTree(self, node: ContainerTree) -> Dict[str, Any]:
        return {
            "alpha": format_rational(node.alpha),
            "beta": format_rational(node.beta),
            "q": format_rational(node.q),
            "E": node.E,
            "forced": node.forced,
            "partial": node.partial,
            "height": node.height(),
            "leaf_count": len(node.leaves()),
            "notes": list(node.notes),
            "hypothesis": self.visit(node.hypothesis),
            "tree": self.visit(node.root),
        }

    # --- Oracles ---

    def visit_CoverReport(self, node: CoverReport) -> Dict[str, Any]:
        return {
            "total": node.total,
            "covered": node.covered,
            "uncovered": [list(I) for I in node.uncovered],
            "family_size": node.family_size,
            "complete": node.complete,
            "full": node.full,
        }

    def visit_SupersaturationReport(self, node: SupersaturationReport) -> Dict[str, Any]:
        return {
            "reserved": node.reserved,
            "mono": node.mono,
            "counting_holds": node.counting_holds,
            "dichotomy_holds": node.dichotomy_holds,
        }


class HumanSummary(ReportVisitor):
    """One-line summaries for log output; rationals also shown as decimals."""

    @staticmethod
    def number(value: Fraction) -> str:
        return f"{format_rational(value)} (~{float(value):.6g})"

    def visit_InequalityCheck(self, node: InequalityCheck) -> str:
        mark = "ok" if node.holds else "FAILS"
        return f"{node.name}: {self.number(node.lhs)} <= {self.number(node.rhs)} {mark}"

    def visit_HypothesisReport(self, node: HypothesisReport) -> str:
        return f"{node.theorem} hypothesis: " + "; ".join(self.visit(check) for check in node.checks)

    def visit_ContainerTree(self, node: ContainerTree) -> str:
        return (f"tree: {len(node.nodes())} nodes, {len(node.leaves())} leaves, "
                f"height {node.height()}, partial={node.partial}")

    def visit_ContainerEnumeration(self, node: ContainerEnumeration) -> str:
        distinct = len(set(node.containers()))
        return f"enumeration: {len(node.entries)} leaves, {distinct} distinct containers, partial={node.partial}"

    def visit_CoverReport(self, node: CoverReport) -> str:
        return f"cover: {node.covered}/{node.total} maximal independent sets covered by {node.family_size} containers"


# --- Run manifests ---

@dataclass
class RunManifest:
    command: str
    params: Dict[str, Any]
    seed: Optional[int] = None
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    hypothesis: Optional[Dict[str, Any]] = None
    exit_code: int = 0
    wall_clock: float = 0.0
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "params": {name: _plain(value) for name, value in sorted(self.params.items())},
            "seed": self.seed,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "hypothesis": self.hypothesis,
            "exit_code": self.exit_code,
            "wall_clock": round(self.wall_clock, 6),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(command=data["command"], params=dict(data["params"]), seed=data.get("seed"),
                   inputs=list(data.get("inputs", [])), outputs=list(data.get("outputs", [])),
                   hypothesis=data.get("hypothesis"), exit_code=data.get("exit_code", 0),
                   wall_clock=data.get("wall_clock", 0.0), version=data.get("version", __version__))


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


class Stopwatch:
    def __init__(self):
        self.started = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.started
