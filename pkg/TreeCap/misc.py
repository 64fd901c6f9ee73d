"""
File helpers shared by the CLI: JSON in and out, and the readers for
trees, leaf sets and measures
"""

import sys
import json
import math
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .Tree import Tree, BoundaryMeasure, BoundarySet, TreeSpec, build_tree, DEFAULT_MAX_EDGES
from .exceptions import TreeError, MeasureError

PathLike = Union[str, Path]


def load_json(path: PathLike) -> Any:
    """ Reads a JSON document; '-' reads standard input. """
    if str(path) == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _finite(data: Any) -> Any:
    # JSON has no infinity; unbounded values are written as null
    if isinstance(data, float) and not math.isfinite(data):
        return None
    if isinstance(data, Mapping):
        return {k: _finite(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_finite(v) for v in data]
    return data


def dumps_json(data: Any) -> str:
    return json.dumps(_finite(data), indent=2, allow_nan=False) + "\n"


def dumps_human(data: Any, indent: int = 0) -> str:
    """ Indented 'key: value' listing of a JSON-like document. """
    pad = "  " * indent
    lines = []
    if isinstance(data, Mapping):
        for key, value in data.items():
            if isinstance(value, (Mapping, list, tuple)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(dumps_human(value, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(data, (list, tuple)):
        if all(not isinstance(v, (Mapping, list, tuple)) for v in data):
            lines.append(pad + ", ".join(_scalar(v) for v in data))
        else:
            for value in data:
                lines.append(f"{pad}-")
                lines.append(dumps_human(value, indent + 1).rstrip("\n"))
    else:
        lines.append(pad + _scalar(data))
    return "\n".join(lines) + "\n"


def _scalar(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return "-"
    return str(value)


def write_output(text: str, path: Optional[PathLike] = None):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def load_tree(path: PathLike, depth: Optional[int] = None, max_edges: int = DEFAULT_MAX_EDGES) -> Tree:
    """ Tree JSON, either an edge list or {"spec": ..., "depth": ...}. A spec
    without its own depth is cut at `depth`. """
    data = load_json(path)
    if not isinstance(data, Mapping):
        raise TreeError(f"{path}: expected a JSON object")
    if "spec" in data and data.get("depth") is None and depth is not None:
        spec = TreeSpec.from_json(data["spec"])
        return build_tree(spec, depth if spec.infinite else None, max_edges=max_edges)
    return Tree.from_json(data, max_edges=max_edges)


def load_leaf_set(tree: Tree, path: PathLike) -> BoundarySet:
    """ A JSON list of leaf labels, or an object with a "leaves" list. """
    data = load_json(path)
    if isinstance(data, Mapping):
        data = data.get("leaves")
    if not isinstance(data, list):
        raise TreeError(f"{path}: expected a list of leaf labels")
    return BoundarySet.of(tree, [str(x) for x in data])


def load_measure(tree: Tree, path: PathLike) -> BoundaryMeasure:
    """ {"M": {edge: value}} gives the co-potential on every edge,
    {"weights": {leaf: value}} the masses of the leaves. """
    data = load_json(path)
    if not isinstance(data, Mapping):
        raise MeasureError(f"{path}: expected a JSON object")
    if "M" in data:
        return BoundaryMeasure.from_co_potential(tree, {str(k): v for k, v in data["M"].items()})
    if "weights" in data:
        return BoundaryMeasure.from_leaf_weights(tree, {str(k): v for k, v in data["weights"].items()})
    raise MeasureError(f"{path}: a measure needs 'M' or 'weights'")
