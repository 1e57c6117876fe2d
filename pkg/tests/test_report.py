# file: tests/test_report.py

from fractions import Fraction

import pytest

from src.engine import HypothesisReport, InequalityCheck, packaged_containers
from src.generators import clique_hypergraph
from src.oracles import verify_cover
from src.report import HumanSummary, JsonReport, RunManifest


def sample_report() -> HypothesisReport:
    return HypothesisReport("main", [InequalityCheck("density", Fraction(1, 3), Fraction(1, 2)),
                                     InequalityCheck("weighted_norms", Fraction(3), Fraction(2))])


class TestJsonReport:

    def test_hypothesis(self):
        """Checks are rendered with num/den strings."""
        document = JsonReport().visit(sample_report())
        assert document == {
            "theorem": "main",
            "holds": False,
            "checks": [{"name": "density", "lhs": "1/3", "rhs": "1/2", "holds": True},
                       {"name": "weighted_norms", "lhs": "3/1", "rhs": "2/1", "holds": False}],
        }

    def test_tree(self):
        """A tree document nests children under the root and counts its leaves."""
        tree = packaged_containers(clique_hypergraph(5, 2), Fraction(1, 2), Fraction(1, 5), Fraction(1, 2), 2,
                                   forced=True)
        document = JsonReport().visit(tree)
        assert document["tree"]["C"] == list(range(10))
        assert document["leaf_count"] == len(tree.leaves())
        assert document["beta"] == "1/5" and document["forced"] is True

    def test_cover(self):
        """Cover reports keep their counts."""
        document = JsonReport().visit(verify_cover([range(10)], clique_hypergraph(5, 2)))
        assert document["full"] is True and document["total"] == 27

    def test_unknown_node(self):
        """Objects without a visitor are rejected."""
        with pytest.raises(TypeError):
            JsonReport().visit(object())


class TestHumanSummary:

    def test_hypothesis_line(self):
        """Failed checks are marked and decimals added."""
        line = HumanSummary().visit(sample_report())
        assert line.startswith("main hypothesis: density: 1/3 (~0.333333)")
        assert "FAILS" in line

    def test_number(self):
        """Numbers carry their exact and approximate forms."""
        assert HumanSummary.number(Fraction(1, 4)) == "1/4 (~0.25)"


class TestRunManifest:

    def test_rationals_become_strings(self):
        """Fraction parameters are written as num/den."""
        manifest = RunManifest(command="contain", params={"q": Fraction(1, 2), "E": 3, "mode": "simple"})
        data = manifest.to_dict()
        assert data["params"] == {"E": 3, "mode": "simple", "q": "1/2"}
        assert RunManifest.from_dict(data).to_dict() == data
