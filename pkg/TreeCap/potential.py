"""
Potentials, co-potentials and energies of edge functions, and the
discrete p-Laplacian on vertices
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .Tree import ORIGIN, Tree, BoundaryMeasure, predecessor_path
from .exceptions import TreeCapError, TreeError


@dataclass(frozen=True)
class PExponent:
    p: float

    def __post_init__(self):
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 1):
            raise TreeCapError(f"p must be a real number > 1, got {self.p!r}")

    @property
    def conj(self) -> float:
        """ p' with 1/p + 1/p' = 1 """
        return self.p / (self.p - 1.0)

    @classmethod
    def of(cls, p: Union[float, "PExponent"]) -> "PExponent":
        return p if isinstance(p, PExponent) else cls(float(p))


@dataclass(frozen=True)
class VertexFunction:
    """ values[a] is the value at e(a), the end vertex of edge a; `origin`
    is the value at o. Leaf end vertices are the boundary points. """

    values: np.ndarray
    origin: float = 0.0

    def __getitem__(self, x: int) -> float:
        return self.origin if x == ORIGIN else float(self.values[x])

    def at_begin(self, tree: Tree) -> np.ndarray:
        """ The value at b(a) for every edge a. """
        out = np.full(len(tree), self.origin)
        parents = tree.parents
        inner = parents != ORIGIN
        out[inner] = self.values[parents[inner]]
        return out


def _abs_power(x: np.ndarray, q: float) -> np.ndarray:
    # |x|**q with 0 -> 0 for fractional exponents
    x = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    nz = x > 0
    out[nz] = np.exp(q * np.log(x[nz]))
    return out


def signed_power(f: np.ndarray, p: Union[float, PExponent]) -> np.ndarray:
    """ f_p = sgn(f) |f|^(p'-1). Note (f_p)_p' == f. """
    p = PExponent.of(p)
    f = np.asarray(f, dtype=float)
    return np.sign(f) * _abs_power(f, p.conj - 1.0)


def potentials(tree: Tree, f: np.ndarray) -> VertexFunction:
    """ If at every vertex, with If(o) = 0. """
    return VertexFunction(tree.accumulate_down(f))


def potential(tree: Tree, f: np.ndarray, x: int) -> float:
    """ If(x), the sum of f over the predecessor set of the vertex x. """
    if x != ORIGIN:
        tree.check(x)
    return float(sum(f[a] for a in predecessor_path(tree, x)))


def equilibrium_potential(tree: Tree, M: np.ndarray, p: Union[float, PExponent]) -> VertexFunction:
    """ V_p(mu) = I(M_p) on every vertex. """
    return potentials(tree, signed_power(M, p))


def local_energies(tree: Tree, mu: BoundaryMeasure, p: Union[float, PExponent]) -> np.ndarray:
    """ E_{p,a}(mu) = sum over b >= a of M(b)^p' for every edge at once. """
    p = PExponent.of(p)
    return tree.accumulate_up(_abs_power(mu.co_potential, p.conj))


def energy(tree: Tree, mu: BoundaryMeasure, p: Union[float, PExponent], alpha: Optional[int] = None) -> float:
    p = PExponent.of(p)
    alpha = tree.root if alpha is None else tree.check(alpha)
    if alpha == tree.root:
        return float(np.sum(_abs_power(mu.co_potential, p.conj)))
    return float(local_energies(tree, mu, p)[alpha])


def _check_interior(tree: Tree, x: int) -> int:
    if x == ORIGIN:
        raise TreeError("the p-Laplacian is not defined at the origin o")
    x = tree.check(x)
    if tree.is_tail(x):
        raise TreeError(f"vertex e({tree.labels[x]}) borders an unexplored tail")
    if tree.is_leaf(x):
        raise TreeError(f"vertex e({tree.labels[x]}) is a boundary point, not an interior vertex")
    return x


def p_laplacian(tree: Tree, g: VertexFunction, x: int, p: Union[float, PExponent]) -> float:
    """ Sum over the neighbours y of x of sgn(g(y)-g(x)) |g(y)-g(x)|^(p-1). """
    p = PExponent.of(p)
    x = _check_interior(tree, x)
    here = g[x]
    neighbours = [tree.begin(x)] + list(tree.children(x))
    diff = np.array([g[y] - here for y in neighbours])
    return float(np.sum(np.sign(diff) * _abs_power(diff, p.p - 1.0)))


def interior_vertices(tree: Tree) -> List[int]:
    return [int(a) for a in np.flatnonzero(~tree.leaf_mask)]


def _laplacians(tree: Tree, g: VertexFunction, p: PExponent) -> np.ndarray:
    # one pass over all edges: every edge a contributes to e(a) and b(a)
    down = g.values - g.at_begin(tree)
    flow = np.sign(down) * _abs_power(down, p.p - 1.0)
    return tree.sum_children(flow) - flow


@dataclass(frozen=True)
class HarmonicityReport:
    ok: bool
    worst_vertex: Optional[int]
    worst_value: float
    violations: Tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def is_p_harmonic(tree: Tree, g: VertexFunction, p: Union[float, PExponent], tol: float = 1e-9) -> HarmonicityReport:
    """ Checks that the p-Laplacian of g vanishes at every interior vertex
    (the end vertices of edges that are neither leaves nor tails). """
    p = PExponent.of(p)
    interior = ~tree.leaf_mask
    if not np.any(interior):
        return HarmonicityReport(True, None, 0.0, ())
    lap = np.abs(_laplacians(tree, g, p))
    lap[~interior] = 0.0
    worst = int(np.argmax(lap))
    violations = tuple(int(a) for a in np.flatnonzero(lap > tol))
    return HarmonicityReport(not violations, worst, float(lap[worst]), violations)
