"""
Square tilings of the rectangle [0, c] x [0, 1] induced by p=2 equilibrium
measures: edge a becomes a square of side M(a) whose top sits at height
IM(b(a)), measured downward, inside the bottom segment of its parent's square.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Mapping, Optional, Tuple, Union

import numpy as np
import svgwrite

from .Tree import Tree, BoundaryMeasure
from .potential import PExponent, equilibrium_potential
from .capacity import EquilibriumResult
from .characterization import CharacterizationReport, verify_equilibrium
from .exceptions import TilingError, MeasureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Square:
    edge: int
    x: float
    y: float
    side: float

    @property
    def right(self) -> float:
        return self.x + self.side

    @property
    def bottom(self) -> float:
        return self.y + self.side


@dataclass(frozen=True)
class Tiling:
    width: float
    height: float
    squares: Tuple[Square, ...]

    def by_edge(self) -> dict:
        return {s.edge: s for s in self.squares}

    def to_json(self, tree: Tree) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "squares": [{"edge": tree.labels[s.edge], "x": s.x, "y": s.y, "side": s.side} for s in self.squares],
        }

    @classmethod
    def from_json(cls, data: Mapping, tree: Tree) -> "Tiling":
        try:
            squares = tuple(
                Square(tree.id_of(item["edge"]), float(item["x"]), float(item["y"]), float(item["side"]))
                for item in data["squares"]
            )
            return cls(float(data["width"]), float(data.get("height", 1.0)), squares)
        except (KeyError, TypeError, ValueError) as exc:
            raise TilingError(f"malformed tiling: {exc}")


def build_tiling(tree: Tree, result: Union[EquilibriumResult, BoundaryMeasure], tol: float = 1e-9) -> Tiling:
    """ Lays out one square per edge of positive mass. Siblings are placed
    left to right in their stored order. A bare measure is read as p = 2. """
    if isinstance(result, EquilibriumResult):
        p, measure = result.p, result.measure
    else:
        p, measure = PExponent(2.0), result
    if p.p != 2.0:
        raise TilingError(f"square tilings exist for p = 2 only, got p = {p.p}")
    report = verify_equilibrium(tree, measure, p, tol)
    if not report:
        raise TilingError(f"the measure is not an equilibrium measure (max residual {report.max_residual:.3g})")

    M = measure.co_potential
    y = equilibrium_potential(tree, M, p).at_begin(tree)
    x = np.zeros(len(tree))
    for a in tree.breadth_first():
        offset = x[a]
        for b in tree.children(int(a)):
            x[b] = offset
            offset += M[b]

    squares = tuple(Square(int(a), float(x[a]), float(y[a]), float(M[a])) for a in tree.breadth_first() if M[a] > 0)
    logger.debug("tiling of width %.17g with %d squares", M[tree.root], len(squares))
    return Tiling(float(M[tree.root]), 1.0, squares)


@dataclass(frozen=True)
class TilingReport:
    """ Worst violation per category; `overlaps` lists pairs of edges whose
    squares share interior points. """

    containment: float
    overlap: float
    area: float
    combinatorics: float
    overlaps: Tuple[Tuple[int, int], ...]
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.containment, self.overlap, self.area, self.combinatorics) <= self.tol

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self, tree: Tree) -> dict:
        return {
            "ok": self.ok,
            "containment": self.containment,
            "overlap": self.overlap,
            "area": self.area,
            "combinatorics": self.combinatorics,
            "overlaps": [[tree.labels[a], tree.labels[b]] for a, b in self.overlaps],
        }


def _sweep_overlaps(squares: List[Square], tol: float) -> Tuple[float, List[Tuple[int, int]]]:
    """ Sweep a vertical line left to right; squares leave the active list once
    the line passes their right side. """
    worst, pairs = 0.0, []
    active: List[Square] = []
    for s in sorted(squares, key=lambda s: (s.x, s.y, s.edge)):
        active = [a for a in active if a.right > s.x + tol]
        for a in active:
            dx = min(a.right, s.right) - max(a.x, s.x)
            dy = min(a.bottom, s.bottom) - max(a.y, s.y)
            depth = min(dx, dy)
            if depth > tol:
                pairs.append((min(a.edge, s.edge), max(a.edge, s.edge)))
            worst = max(worst, depth)
        active.append(s)
    return worst, sorted(pairs)


def validate_tiling(t: Tiling, tree: Tree, tol: float = 1e-9) -> TilingReport:
    """ Containment in the rectangle, interior disjointness, the area identity
    and the combinatorics prescribed by the tree (a child's top segment lies
    in its parent's bottom segment). Never raises for a failing verdict. """
    squares = list(t.squares)
    containment = 0.0
    for s in squares:
        containment = max(containment, -s.x, s.right - t.width, -s.y, s.bottom - t.height)

    overlap, pairs = _sweep_overlaps(squares, tol)
    area = abs(sum(s.side ** 2 for s in squares) - t.width * t.height)

    placed = {}
    combinatorics = 0.0
    for s in squares:
        if s.edge not in tree or s.edge in placed:
            combinatorics = float("inf")
            continue
        placed[s.edge] = s
    for s in placed.values():
        parent = tree.parent(s.edge)
        if parent is None:
            combinatorics = max(combinatorics, abs(s.y))
            continue
        q = placed.get(parent)
        if q is None:
            combinatorics = float("inf")
            continue
        combinatorics = max(combinatorics, abs(s.y - q.bottom), q.x - s.x, s.right - q.right)

    return TilingReport(max(containment, 0.0), overlap, area, combinatorics, tuple(pairs), tol)


def section_width(t: Tiling, y: float) -> float:
    """ Total width covered by squares at height y, for y off every square boundary. """
    return float(sum(s.side for s in t.squares if s.y < y < s.bottom))


def measure_from_tiling(t: Tiling, tree: Tree, tol: float = 1e-9) -> Tuple[BoundaryMeasure, CharacterizationReport]:
    """ Reads M(a) = side(a) off a tiling and checks that it is the
    equilibrium measure of its recovered set. """
    placed = t.by_edge()
    for a, s in placed.items():
        kids = [placed[b] for b in tree.children(a) if b in placed]
        if not kids:
            continue
        covered = sum(k.side for k in kids)
        misplaced = max(max(abs(k.y - s.bottom), s.x - k.x, k.right - s.right) for k in kids)
        if abs(covered - s.side) > tol or misplaced > tol:
            raise TilingError(f"the children of edge {tree.labels[a]} do not cover the bottom of its square")

    M = np.zeros(len(tree))
    for a, s in placed.items():
        M[a] = s.side
    try:
        mu = BoundaryMeasure.from_co_potential(tree, M, tol)
    except MeasureError as exc:
        raise TilingError(f"tiling does not follow the tree: {exc}")
    return mu, verify_equilibrium(tree, mu, PExponent(2.0), tol)


def _num(v: float) -> str:
    return f"{v:.6f}"


def emit_svg(t: Tiling, path: Union[str, Path], scale: float = 300.0, stroke: float = 1.0,
             labels: bool = False, tree: Optional[Tree] = None) -> Path:
    """ Writes the tiling as SVG: the rectangle outline as a path and one
    rect per square, sorted by (y, x). Coordinates are fixed to six decimals
    so equal tilings give equal files. """
    path = Path(path)
    width, height = t.width * scale, t.height * scale
    dwg = svgwrite.Drawing(str(path), size=(_num(width), _num(height)), profile="full")
    dwg["viewBox"] = f"0 0 {_num(width)} {_num(height)}"
    dwg.add(dwg.path(d=f"M0 0H{_num(width)}V{_num(height)}H0Z", fill="none", stroke="black",
                     stroke_width=_num(stroke)))

    ordered = sorted(t.squares, key=lambda s: (s.y, s.x, s.edge))
    for s in ordered:
        side = _num(s.side * scale)
        dwg.add(dwg.rect(insert=(_num(s.x * scale), _num(s.y * scale)), size=(side, side),
                         fill="none", stroke="black", stroke_width=_num(stroke)))
    if labels:
        for s in ordered:
            name = tree.labels[s.edge] if tree is not None else str(s.edge)
            cx, cy = (s.x + s.side / 2) * scale, (s.y + s.side / 2) * scale
            dwg.add(dwg.text(name, insert=(_num(cx), _num(cy)), font_size=_num(max(s.side * scale / 4, 1.0)),
                             text_anchor="middle", dominant_baseline="middle"))

    dwg.save()
    logger.debug("wrote %d squares to %s", len(ordered), path)
    return path
