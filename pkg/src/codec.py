# file: src/codec.py

import json
import os
import tempfile
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

from src.hypergraph import HypergraphError, Multihypergraph, VertexSet

PathLike = Union[str, Path]


class CodecError(HypergraphError):
    """Raised on malformed JSON documents or rational strings."""
    pass


# --- Rationals ---

def format_rational(value: Union[int, Fraction]) -> str:
    """Always "num/den", integers included, so documents stay uniform."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Accepts "num/den", integers and decimal strings; conversion is exact."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = str(text).strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(Decimal(text))
    except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
        raise CodecError(f"'{text}' is not a rational number.") from exc


# --- Hypergraph documents ---

def hypergraph_to_dict(H: Multihypergraph) -> Dict[str, Any]:
    return {
        "uniformity": H.uniformity,
        "vertex_count": H.vertex_count,
        "edges": [{"set": list(edge), "mult": mult} for edge, mult in H.items()],
    }


def hypergraph_from_dict(data: Dict[str, Any]) -> Multihypergraph:
    """Rejects duplicate or unsorted sets instead of merging them."""
    try:
        uniformity = int(data["uniformity"])
        vertex_count = int(data["vertex_count"])
        raw_edges = data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CodecError(f"Hypergraph document is missing a field: {exc}") from exc
    edges: Dict[VertexSet, int] = {}
    for entry in raw_edges:
        try:
            members = tuple(int(v) for v in entry["set"])
            mult = int(entry.get("mult", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise CodecError(f"Malformed edge entry {entry!r}.") from exc
        if list(members) != sorted(members):
            raise CodecError(f"Edge {list(members)} is not sorted ascending.")
        if members in edges:
            raise CodecError(f"Edge {list(members)} appears twice.")
        edges[members] = mult
    return Multihypergraph(uniformity, vertex_count, edges)


def load_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise CodecError(f"{path}: invalid JSON ({exc}).") from exc
    except FileNotFoundError:
        raise
    except (UnicodeDecodeError, OSError) as exc:
        raise CodecError(f"{path}: cannot read ({exc}).") from exc


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json_atomic(path: PathLike, document: Any):
    """Writes to a temporary file in the target directory, then renames it."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(dumps(document))
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_hypergraph(path: PathLike) -> Multihypergraph:
    return hypergraph_from_dict(load_json(path))


def save_hypergraph(path: PathLike, H: Multihypergraph):
    write_json_atomic(path, hypergraph_to_dict(H))


# --- Container documents ---

def _tree_leaves(node: Dict[str, Any]) -> List[VertexSet]:
    children = node.get("children") or []
    if not children:
        return [tuple(node["C"])]
    leaves: List[VertexSet] = []
    for child in children:
        leaves.extend(_tree_leaves(child))
    return leaves


def containers_from_dict(data: Dict[str, Any]) -> List[VertexSet]:
    """
    Reads {"containers": [[...], ...]}, the simple-mode output whose entries
    carry a "container" field, or a packaged report (its tree leaves).
    """
    try:
        if "tree" in data:
            return _tree_leaves(data["tree"])
        result = []
        for entry in data["containers"]:
            members = entry["container"] if isinstance(entry, dict) else entry
            result.append(tuple(sorted(int(v) for v in members)))
        return result
    except (KeyError, TypeError, ValueError) as exc:
        raise CodecError(f"Malformed container document: {exc}") from exc
