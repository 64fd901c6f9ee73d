"""
Boundary sets and trees of prescribed capacity
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import List, Tuple, Union

from .Tree import Tree, Subdyadic, SphericallySymmetric, BoundarySet, build_tree, predecessor_path
from .potential import PExponent
from .capacity import CapacityInterval, capacity_of_set, homogeneous_capacity, symmetric_capacity
from .exceptions import ConstructionError

logger = logging.getLogger(__name__)

Real = Union[float, Fraction]


@dataclass(frozen=True)
class DigitExpansion:
    """ lambda = sum of digits[j] * base^j + remainders[-1], with
    0 <= remainders[k] < base^k after every step. """

    base: Real
    digits: Tuple[int, ...]
    target: Real
    remainders: Tuple[Real, ...]

    @property
    def value(self) -> Real:
        return sum((d * self.base ** j for j, d in enumerate(self.digits)), type(self.target)(0))

    @property
    def error(self) -> Real:
        return self.target - self.value


def greedy_digits(lam: Real, B: Real, count: int) -> DigitExpansion:
    """ n_0 = floor(lambda), n_j = floor(r_(j-1) / B^j). Exact when lambda and B
    are Fractions. """
    if not lam > 0:
        raise ConstructionError(f"the target must be > 0, got {lam}")
    if not 0 < B < 1:
        raise ConstructionError(f"the base must lie in (0, 1), got {B}")
    if count < 1:
        raise ConstructionError("at least one digit is needed")

    exact = isinstance(lam, Rational) and isinstance(B, Rational)
    if exact:
        lam, B = Fraction(lam), Fraction(B)
    else:
        lam, B = float(lam), float(B)

    digits, remainders = [], []
    r, power = lam, type(B)(1)
    for j in range(count):
        n = max(math.floor(r / power), 0)
        r = r - n * power
        digits.append(int(n))
        remainders.append(r)
        power = power * B
    return DigitExpansion(B, tuple(digits), lam, tuple(remainders))


@dataclass(frozen=True)
class SubdyadicConstruction:
    spec: Subdyadic
    capacity: CapacityInterval
    digits: DigitExpansion


def subdyadic_tree_of_capacity(c: float, p: Union[float, PExponent], digit_count: int = 30) -> SubdyadicConstruction:
    """ A subdyadic tree whose boundary has capacity c, for 0 < c < c(2, p).

    A run of r_j levels with 2^j edges adds r_j B^j to the level series, with
    B = 2^(1-p'). Every run must hold at least one level, so the runs are
    1 + d_j where the d_j expand lambda - 1/(1-B), lambda = c^(1-p'). """
    p = PExponent.of(p)
    top = homogeneous_capacity(2, p)
    if not 0 < c < top:
        raise ConstructionError(f"target capacity must lie in (0, {top!r}), got {c!r}")

    B = 2.0 ** (1.0 - p.conj)
    lam = c ** (1.0 - p.conj)
    expansion = greedy_digits(lam - 1.0 / (1.0 - B), B, digit_count)
    spec = Subdyadic(tuple(1 + d for d in expansion.digits), tail_run=1)
    capacity = symmetric_capacity(spec, p, spec.listed_levels)
    logger.debug("subdyadic runs %s reach capacity [%.17g, %.17g] for target %.17g",
                 spec.runs, capacity.lower, capacity.upper, c)
    return SubdyadicConstruction(spec, capacity, expansion)


def _homogeneous_order(tree: Tree) -> int:
    degrees = {len(tree.children(a)) for a in range(len(tree)) if not tree.is_leaf(a)}
    if len(degrees) != 1 or min(degrees) < 2:
        raise ConstructionError("the digit map needs a homogeneous tree")
    if len({tree.level(a) for a in tree.leaves()}) != 1:
        raise ConstructionError("the digit map needs a homogeneous tree with all leaves on one level")
    return degrees.pop()


def lambda_digits(tree: Tree, zeta) -> List[int]:
    """ Child indices along the geodesic of a leaf, below the root edge. """
    _homogeneous_order(tree)
    zeta = tree.id_of(zeta) if isinstance(zeta, str) else tree.check(zeta)
    if not tree.is_leaf(zeta):
        raise ConstructionError(f"edge {tree.labels[zeta]} is not a leaf")
    path = predecessor_path(tree, zeta)
    digits = [tree.children(a).index(b) for a, b in zip(path, path[1:])]
    return digits


def lambda_value(tree: Tree, zeta) -> float:
    """ Lambda(zeta) = sum over j >= 1 of i(a_j) n^(-j). """
    n = _homogeneous_order(tree)
    return float(sum(Fraction(d, n ** (j + 1)) for j, d in enumerate(lambda_digits(tree, zeta))))


@dataclass(frozen=True)
class CompactSet:
    """ The leaves of `tree` whose digit cylinder lies in [0, x], and their capacity. """

    leaves: BoundarySet
    capacity: CapacityInterval
    x: float
    tree: Tree

    def to_json(self) -> dict:
        return {"x": self.x, "capacity": self.capacity.to_json(), "leaves": self.leaves.labels(self.tree)}


def compact_set_of_capacity(n: int, p: Union[float, PExponent], t: float, tol: float = 1e-3,
                            depth: int = 16) -> CompactSet:
    """ Bisection on x for the set Lambda^-1[0, x] of the homogeneous tree of
    order n cut at `depth`. Leaves are stored in lexicographic digit order, so
    these sets are the prefixes of the leaf list. The prefix whose capacity is
    closest to t is returned. """
    p = PExponent.of(p)
    if n < 2:
        raise ConstructionError(f"homogeneous trees need degree >= 2, got {n}")
    tree = build_tree(SphericallySymmetric((n,) * depth))
    leaves = tree.by_level()[-1]
    count = len(leaves)

    @lru_cache(maxsize=None)
    def phi(k: int) -> float:
        if k < 0:
            return 0.0
        return capacity_of_set(tree, leaves[: k + 1].tolist(), p).capacity.midpoint

    if t < 0 or t > phi(count - 1) + tol:
        raise ConstructionError(f"capacity {t} is not achievable at depth {depth} (maximum {phi(count - 1)!r})")
    if t == 0:
        return CompactSet(BoundarySet(), CapacityInterval.exact(0.0), 0.0, tree)

    lo, hi = -1, count - 1  # phi(lo) < t <= phi(hi), or hi is the last leaf
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if phi(mid) >= t:
            hi = mid
        else:
            lo = mid
        logger.debug("bisection on prefixes: (%d, %d]", lo, hi)
    k = lo if abs(phi(lo) - t) <= abs(phi(hi) - t) else hi

    achieved = CapacityInterval.exact(phi(k))
    if abs(achieved.midpoint - t) > tol + achieved.width:
        raise ConstructionError(f"closest capacity to {t} at depth {depth} is {achieved.midpoint!r}")
    chosen = BoundarySet(int(a) for a in leaves[: k + 1])
    return CompactSet(chosen, achieved, (k + 1) / count if k >= 0 else 0.0, tree)
