"""
Checks whether a boundary measure is the p-equilibrium measure of some
set, edge by edge:

    M(a) (1 - IM_p(b(a))) = sum over b >= a of M(b)^p'

and the equivalent equation for the rescaled tent capacities.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Tuple, Union

import numpy as np

from .Tree import ORIGIN, Tree, BoundaryMeasure, BoundarySet
from .potential import PExponent, equilibrium_potential, local_energies, interior_vertices
from .capacity import capacity_of_set
from .exceptions import CapacityError, MeasureError

logger = logging.getLogger(__name__)

MeasureLike = Union[BoundaryMeasure, np.ndarray, Mapping]

#: strict margin for IM_p < 1 at interior vertices
POTENTIAL_MARGIN = 1e-12


def _as_measure(tree: Tree, mu: MeasureLike) -> BoundaryMeasure:
    M = mu.co_potential if isinstance(mu, BoundaryMeasure) else mu
    return BoundaryMeasure.from_co_potential(tree, M)


@dataclass(frozen=True)
class CharacterizationReport:
    """ residuals[a] = |M(a)(1 - IM_p(b(a))) - E_{p,a}(mu)|. Support tails can
    not be classified at this depth and are listed as undetermined. """

    residuals: np.ndarray
    max_residual: float
    is_equilibrium: bool
    recovered_set: BoundarySet
    irregular_points: BoundarySet
    undetermined: Tuple[int, ...]
    mass: float
    p: PExponent
    tol: float
    tree: Tree = field(repr=False, compare=False, default=None)

    def __bool__(self) -> bool:
        return self.is_equilibrium

    def to_json(self) -> dict:
        labels = self.tree.labels
        return {
            "max_residual": self.max_residual,
            "is_equilibrium": self.is_equilibrium,
            "mass": self.mass,
            "recovered_set": self.recovered_set.labels(self.tree),
            "irregular": self.irregular_points.labels(self.tree),
            "undetermined": [labels[a] for a in self.undetermined],
        }


def verify_equilibrium(tree: Tree, mu: MeasureLike, p: Union[float, PExponent], tol: float = 1e-9) -> CharacterizationReport:
    """ Evaluates both sides of the characterization at every edge; the
    right-hand sides come from one bottom-up pass. The measure is an
    equilibrium measure when the worst residual is within tol * mu(boundary). """
    p = PExponent.of(p)
    mu = _as_measure(tree, mu)
    M = mu.co_potential
    V = equilibrium_potential(tree, M, p)

    lhs = M * (1.0 - V.at_begin(tree))
    rhs = local_energies(tree, mu, p)
    residuals = np.abs(lhs - rhs)
    max_residual = float(residuals.max())
    mass = mu.mass
    threshold = tol * mass if mass > 0 else tol

    support = mu.support_leaves(tree)
    recovered, irregular, undetermined = [], [], []
    for zeta in support:
        if tree.is_tail(zeta):
            undetermined.append(zeta)
        elif abs(V[zeta] - 1.0) <= tol:
            recovered.append(zeta)
        elif V[zeta] < 1.0 - tol:
            irregular.append(zeta)

    report = CharacterizationReport(
        residuals=residuals,
        max_residual=max_residual,
        is_equilibrium=max_residual <= threshold,
        recovered_set=BoundarySet(recovered),
        irregular_points=BoundarySet(irregular),
        undetermined=tuple(undetermined),
        mass=mass,
        p=p,
        tol=tol,
        tree=tree,
    )
    if not report.is_equilibrium:
        worst = int(np.argmax(residuals))
        logger.debug("not an equilibrium measure: residual %.3g at edge %s", max_residual, tree.labels[worst])
    return report


@dataclass(frozen=True)
class PotentialBoundReport:
    ok: bool
    worst_vertex: Optional[int]
    worst_value: float
    violations: Tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def check_potential_bound(tree: Tree, mu: MeasureLike, p: Union[float, PExponent]) -> PotentialBoundReport:
    """ IM_p < 1 at o and at every interior vertex, with a margin of 1e-12. """
    p = PExponent.of(p)
    M = mu.co_potential if isinstance(mu, BoundaryMeasure) else np.asarray(mu, dtype=float)
    V = equilibrium_potential(tree, M, p)
    inner = interior_vertices(tree)
    if not inner:
        return PotentialBoundReport(True, ORIGIN, 0.0, ())
    values = V.values[inner]
    violations = tuple(x for x, v in zip(inner, values) if v >= 1.0 - POTENTIAL_MARGIN)
    worst = int(np.argmax(values))
    return PotentialBoundReport(not violations, inner[worst], float(values[worst]), violations)


def potential_maxima(tree: Tree, mu: MeasureLike, p: Union[float, PExponent]) -> List[int]:
    """ Interior vertices e(a) with M(a) > 0 where IM_p is not exceeded by any
    neighbour. A nonnegative forward additive M has none. """
    p = PExponent.of(p)
    M = mu.co_potential if isinstance(mu, BoundaryMeasure) else np.asarray(mu, dtype=float)
    V = equilibrium_potential(tree, M, p)
    out = []
    for x in interior_vertices(tree):
        if M[x] <= 0:
            continue
        neighbours = [tree.begin(x)] + list(tree.children(x))
        if all(V[y] <= V[x] for y in neighbours):
            out.append(x)
    return out


@dataclass(frozen=True)
class CapacityEquationReport:
    """ c_of_alpha[a] = M(a) / (1 - IM_p(b(a)))^(p/p'), which is the capacity
    of the tent at a seen from its own root. """

    c_of_alpha: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residuals: np.ndarray
    max_residual: float
    ok: bool

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self, tree: Tree) -> dict:
        return {
            "max_residual": self.max_residual,
            "ok": self.ok,
            "c": {tree.labels[a]: float(v) for a, v in enumerate(self.c_of_alpha)},
        }


def _signed(x: np.ndarray, q: float) -> np.ndarray:
    return np.sign(x) * np.abs(x) ** q


def capacity_equation_check(tree: Tree, mu: MeasureLike, p: Union[float, PExponent],
                            tol: float = 1e-8) -> CapacityEquationReport:
    """ c(a)(1 - c(a)^(p'-1)) = sum over b > a of c(b)^p' prod over a <= g < b of (1 - c(g)^(p'-1))^p

    The right-hand side is accumulated bottom-up through
    D(b) = c(b)^p' + (1 - c(b)^(p'-1))^p * sum of D over the children of b. """
    p = PExponent.of(p)
    mu = _as_measure(tree, mu)
    bound = check_potential_bound(tree, mu, p)
    if not bound:
        raise CapacityError(f"IM_p reaches {bound.worst_value:.17g} at vertex e({tree.labels[bound.worst_vertex]}); "
                            "the tent capacities are undefined")

    M = mu.co_potential
    V = equilibrium_potential(tree, M, p)
    c = M / (1.0 - V.at_begin(tree)) ** (p.p / p.conj)
    shrink = 1.0 - c ** (p.conj - 1.0)
    g = _signed(shrink, p.p)

    D = c ** p.conj
    parents = tree.parents
    for ids in reversed(tree.by_level()[1:]):
        np.add.at(D, parents[ids], g[parents[ids]] * D[ids])
    # D now holds c^p' + g * sum of children's D at every edge
    rhs = D - c ** p.conj
    lhs = c * shrink
    residuals = np.abs(lhs - rhs)
    max_residual = float(residuals.max())
    return CapacityEquationReport(c, lhs, rhs, residuals, max_residual, max_residual <= tol)


def recover_equilibrium_set(report: CharacterizationReport, check: bool = True) -> BoundarySet:
    """ The leaves of the support where IM_p = 1. With `check`, the capacity of
    the recovered set is recomputed and must match the mass of the measure. """
    if not report.is_equilibrium:
        raise MeasureError(f"not an equilibrium measure (max residual {report.max_residual:.3g})")
    E = report.recovered_set
    if check and E and not report.undetermined:
        achieved = capacity_of_set(report.tree, E, report.p).capacity.midpoint
        if abs(achieved - report.mass) > max(report.tol, 1e-7) * report.mass:
            raise MeasureError(f"recovered set has capacity {achieved:.17g}, the measure has mass {report.mass:.17g}")
    return E
