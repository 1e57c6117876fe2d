# file: src/runner.py

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import networkx as nx

from src import generators
from src.codec import (
    CodecError,
    containers_from_dict,
    dumps,
    format_rational,
    hypergraph_to_dict,
    load_hypergraph,
    load_json,
    parse_rational,
    write_json_atomic,
)
from src.engine import (
    HypothesisError,
    LimitExceeded,
    TreeLimits,
    check_hypothesis_simple,
    enumerate_containers,
    main_simple,
    packaged_containers,
)
from src.hypergraph import HypergraphError
from src.measures import measure_table, sigma_t
from src.oracles import verify_cover
from src.report import HumanSummary, JsonReport, RunManifest, Stopwatch
from src.rounds import SetOracle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_HYPOTHESIS = 3
EXIT_LIMITS = 4
EXIT_UNCOVERED = 5

FAMILIES = ("clique", "gridlines", "folkman", "induced", "random", "regular")


class CommandFailed(Exception):
    """Carries an exit code and the document to write before exiting."""
    def __init__(self, code: int, message: str, document: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.code = code
        self.document = document


# --- Argument parsing ---

def rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except CodecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercontainers",
                                     description="Exact hypergraph containers and their verification.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--human", action="store_true", help="add decimal approximations to log lines")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate an application hypergraph")
    gen.add_argument("--family", required=True, choices=FAMILIES)
    for name in ("--n", "--r", "--m", "--M", "--s", "--h-max", "--N", "--k", "--v", "--edges", "--d"):
        gen.add_argument(name, type=int)
    gen.add_argument("--graph", help="pattern graph as 'nodes:a-b,c-d' for the induced family")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.add_argument("--manifest")

    contain = commands.add_parser("contain", help="build containers for a hypergraph")
    contain.add_argument("--in", dest="in_path", required=True)
    contain.add_argument("--mode", choices=("simple", "packaged"), default="simple")
    contain.add_argument("--q", type=rational, default=Fraction(1, 2))
    contain.add_argument("--K", type=rational, default=Fraction(1))
    contain.add_argument("--alpha", type=rational, default=Fraction(1, 2))
    contain.add_argument("--beta", type=rational, default=Fraction(1, 5))
    contain.add_argument("--E", type=int)
    contain.add_argument("--independent", help="comma-separated vertices: run for this one set only")
    contain.add_argument("--force", action="store_true", help="run even when the hypothesis fails")
    contain.add_argument("--limit", type=int, default=1000, help="maximum enumeration leaves")
    contain.add_argument("--max-nodes", type=int, default=500)
    contain.add_argument("--max-leaves", type=int, default=500)
    contain.add_argument("--out")
    contain.add_argument("--manifest")

    verify = commands.add_parser("verify", help="check that containers cover every maximal independent set")
    verify.add_argument("--in", dest="in_path", required=True)
    verify.add_argument("--containers", required=True)
    verify.add_argument("--cap", type=int, default=100000)
    verify.add_argument("--out")
    verify.add_argument("--manifest")

    measure = commands.add_parser("measure", help="report exact degree measures")
    measure.add_argument("--in", dest="in_path", required=True)
    measure.add_argument("--t", type=int, required=True)
    measure.add_argument("--out")
    measure.add_argument("--manifest")
    return parser


def worker_count() -> int:
    raw = os.environ.get("HCL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring HCL_THREADS=%r", raw)
        return 1


def parse_pattern(text: str) -> nx.Graph:
    try:
        nodes, _, edge_text = text.partition(":")
        graph = nx.empty_graph(int(nodes))
        for pair in filter(None, edge_text.split(",")):
            a, b = pair.split("-")
            graph.add_edge(int(a), int(b))
    except ValueError as exc:
        raise CommandFailed(EXIT_INVALID, f"Cannot read pattern graph '{text}'.") from exc
    return graph


def _require(args: argparse.Namespace, *names: str):
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise CommandFailed(EXIT_INVALID, f"family {args.family} needs {flags}")


# --- Commands ---

def cmd_gen(args: argparse.Namespace, manifest: RunManifest) -> Dict[str, Any]:
    family = args.family
    if family == "clique":
        _require(args, "n", "r")
        H = generators.clique_hypergraph(args.n, args.r)
    elif family == "gridlines":
        _require(args, "m", "M", "s")
        _, H = generators.grid_lines_hypergraph(args.m, args.M, args.s, args.h_max)
    elif family == "folkman":
        _require(args, "N", "n", "k")
        H = generators.folkman_hypergraph(args.N, args.n, args.k)
    elif family == "induced":
        _require(args, "N", "graph", "k")
        H = generators.induced_ramsey_hypergraph(args.N, parse_pattern(args.graph), args.k)
    elif family == "random":
        _require(args, "v", "s", "edges")
        H = generators.random_hypergraph(args.v, args.s, args.edges, args.seed)
    else:
        _require(args, "d", "n")
        H = generators.random_regular_hypergraph(args.d, args.n, args.seed)
    manifest.seed = args.seed if family in ("random", "regular") else None
    logger.info("generated %s: s=%d |V|=%d e=%d", family, H.uniformity, H.vertex_count, H.edge_count())
    return hypergraph_to_dict(H)


def _parse_vertices(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise CommandFailed(EXIT_INVALID, f"Cannot read vertex list '{text}'.") from exc


def cmd_contain(args: argparse.Namespace, manifest: RunManifest, human: bool) -> Dict[str, Any]:
    H = load_hypergraph(args.in_path)
    renderer = JsonReport()
    if args.mode == "simple":
        if args.independent is not None:
            result = main_simple(H, args.q, args.K, SetOracle(_parse_vertices(args.independent)),
                                 forced=args.force)
            manifest.hypothesis = renderer.visit(result.hypotheses[0])
            return {"mode": "simple", "result": renderer.visit(result)}
        enumeration = enumerate_containers(H, args.q, args.K, forced=args.force, limit=args.limit)
        report = check_hypothesis_simple(H, args.q, args.K)
        manifest.hypothesis = renderer.visit(report)
        if human:
            logger.info(HumanSummary().visit(enumeration))
        document = {"mode": "simple", "hypothesis": manifest.hypothesis, **renderer.visit(enumeration)}
        if enumeration.partial:
            raise CommandFailed(EXIT_LIMITS, f"enumeration stopped at {args.limit} leaves", document)
        return document

    E = args.E if args.E is not None else H.vertex_count
    limits = TreeLimits(max_nodes=args.max_nodes, max_leaves=args.max_leaves, enumeration_limit=args.limit)
    manifest.params["E"] = E
    try:
        tree = packaged_containers(H, args.alpha, args.beta, args.q, E, forced=args.force,
                                   limits=limits, workers=worker_count())
    except LimitExceeded as exc:
        document = {"mode": "packaged", **renderer.visit(exc.partial)}
        manifest.hypothesis = document["hypothesis"]
        raise CommandFailed(EXIT_LIMITS, str(exc), document) from exc
    manifest.hypothesis = renderer.visit(tree.hypothesis)
    if human:
        logger.info(HumanSummary().visit(tree))
    return {"mode": "packaged", **renderer.visit(tree)}


def cmd_verify(args: argparse.Namespace, manifest: RunManifest, human: bool) -> Dict[str, Any]:
    H = load_hypergraph(args.in_path)
    containers = containers_from_dict(load_json(args.containers))
    for container in containers:
        if container and (container[0] < 0 or container[-1] >= H.vertex_count):
            raise CommandFailed(EXIT_INVALID, f"container {list(container)} leaves the vertex range")
    report = verify_cover(containers, H, cap=args.cap)
    if human:
        logger.info(HumanSummary().visit(report))
    document = JsonReport().visit(report)
    if not report.complete:
        raise CommandFailed(EXIT_LIMITS, f"independent set enumeration capped at {args.cap}", document)
    if not report.full:
        raise CommandFailed(EXIT_UNCOVERED, f"{report.total - report.covered} maximal independent sets uncovered",
                            document)
    return document


def cmd_measure(args: argparse.Namespace, manifest: RunManifest, human: bool) -> Dict[str, Any]:
    H = load_hypergraph(args.in_path)
    measure = sigma_t(H, args.t)
    table = measure_table(H, args.t)
    if human:
        logger.info("t=%d norm_sq=%s", args.t, HumanSummary.number(table["norm_sq"]))
    return {
        "t": args.t,
        "uniformity": H.uniformity,
        "vertex_count": H.vertex_count,
        "edge_count": H.edge_count(),
        "support": [{"T": list(T), "value": format_rational(value)}
                    for T, value in sorted(measure.entries.items())],
        "norm_sq": format_rational(table["norm_sq"]),
        "max_degree": format_rational(table["max_degree"]),
        "hat_delta": format_rational(table["hat_delta"]),
    }


# --- Entry point ---

def _manifest_path(args: argparse.Namespace) -> Optional[Path]:
    if args.manifest:
        return Path(args.manifest)
    if args.out:
        return Path(args.out + ".manifest.json")
    return None


def _emit(args: argparse.Namespace, document: Optional[Dict[str, Any]], manifest: RunManifest):
    if document is not None:
        if args.out:
            write_json_atomic(args.out, document)
            manifest.outputs.append(args.out)
        else:
            sys.stdout.write(dumps(document))
    path = _manifest_path(args)
    if path is not None:
        write_json_atomic(path, manifest.to_dict())


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    skipped = {"command", "verbose", "human", "out", "manifest", "in_path", "containers"}
    return {name: value for name, value in vars(args).items() if name not in skipped and value is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    clock = Stopwatch()
    manifest = RunManifest(command=args.command, params=_parameters(args))
    for name in ("in_path", "containers"):
        if getattr(args, name, None):
            manifest.inputs.append(getattr(args, name))
    handlers = {"gen": lambda: cmd_gen(args, manifest),
                "contain": lambda: cmd_contain(args, manifest, args.human),
                "verify": lambda: cmd_verify(args, manifest, args.human),
                "measure": lambda: cmd_measure(args, manifest, args.human)}
    document: Optional[Dict[str, Any]] = None
    try:
        document = handlers[args.command]()
    except CommandFailed as exc:
        print(f"Error: {exc}", file=sys.stderr)
        manifest.exit_code, document = exc.code, exc.document
    except HypothesisError as exc:
        print(f"Error: {exc} Use --force to run anyway.", file=sys.stderr)
        if args.human:
            logger.info(HumanSummary().visit(exc.report))
        manifest.exit_code = EXIT_HYPOTHESIS
        manifest.hypothesis = JsonReport().visit(exc.report)
    except (HypergraphError, FileNotFoundError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        manifest.exit_code = EXIT_INVALID
    manifest.wall_clock = clock.elapsed()
    _emit(args, document, manifest)
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
