"""
p-capacities and equilibrium measures of boundary sets

The workhorse is the tent recursion c(a) = S / (1 + S^(p'-1))^(p-1) with
S the sum of c over the children of a, evaluated bottom-up; the
equilibrium co-potential follows top-down from
M(a) = c(a) * prod over g < a of (1 - c(g)^(p'-1))^(p-1).
oracle_capacity() solves the variational problem directly and shares
none of this code.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .Tree import Tree, TreeSpec, Explicit, BoundaryMeasure, BoundarySet, predecessor_path, tent
from .potential import PExponent, signed_power, equilibrium_potential
from .threading import WorkerPool
from .exceptions import CapacityError, ConvergenceError, TreeError

logger = logging.getLogger(__name__)

#: outward rounding applied to intervals that certify an infinite object
INTERVAL_PAD = 1e-13


@dataclass(frozen=True)
class CapacityInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise CapacityError(f"invalid capacity interval [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value: float) -> "CapacityInterval":
        value = min(max(float(value), 0.0), 1.0)
        return cls(value, value)

    @classmethod
    def hull(cls, a: float, b: float, pad: float = 0.0) -> "CapacityInterval":
        return cls(max(min(a, b) - pad, 0.0), min(max(a, b) + pad, 1.0))

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class EquilibriumResult:
    """ c_of_alpha holds the rescaled tent capacities, measure the equilibrium
    co-potential M and equilibrium_function the signed power M_p. With tail
    intervals, the per-edge data belong to the optimistic pass. """

    capacity: CapacityInterval
    c_of_alpha: np.ndarray
    measure: BoundaryMeasure
    equilibrium_function: np.ndarray
    p: PExponent

    def to_json(self, tree: Tree, details: bool = True) -> dict:
        data = {"p": self.p.p, "capacity": self.capacity.to_json()}
        if details:
            data["M"] = {tree.labels[a]: float(v) for a, v in enumerate(self.measure.co_potential)}
            data["c"] = {tree.labels[a]: float(v) for a, v in enumerate(self.c_of_alpha)}
        return data


# --- closed forms -------------------------------------------------------------------


def homogeneous_capacity(n: int, p: Union[float, PExponent]) -> float:
    """ c(n,p) = (1 - n^(1-p'))^(p-1), the capacity of the boundary of the homogeneous tree of order n. """
    p = PExponent.of(p)
    if n < 2:
        raise CapacityError("homogeneous trees need degree >= 2")
    return (1.0 - n ** (1.0 - p.conj)) ** (p.p - 1.0)


def single_point_capacity(k: int, p: Union[float, PExponent]) -> float:
    """ Capacity of the endpoint of a geodesic made of k edges. """
    p = PExponent.of(p)
    if k < 1:
        raise CapacityError("a geodesic has at least one edge")
    return float(k) ** (1.0 - p.p)


# --- the recursion ------------------------------------------------------------------


def _contract(S: np.ndarray, p: PExponent) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    out = np.zeros_like(S)
    pos = S > 0
    s = S[pos]
    out[pos] = s / (1.0 + s ** (p.conj - 1.0)) ** (p.p - 1.0)
    return out


def _tent_capacities(tree: Tree, p: PExponent, boundary: np.ndarray) -> np.ndarray:
    """ Bottom-up pass, one level at a time. `boundary` gives the value at leaves. """
    c = np.zeros(len(tree))
    S = np.zeros(len(tree))
    leaf = tree.leaf_mask
    parents = tree.parents
    for k, ids in reversed(list(enumerate(tree.by_level()))):
        at_leaf = leaf[ids]
        c[ids[at_leaf]] = boundary[ids[at_leaf]]
        inner = ids[~at_leaf]
        c[inner] = _contract(S[inner], p)
        if k > 0:
            np.add.at(S, parents[ids], c[ids])
    return c


def _measure_from_tents(tree: Tree, c: np.ndarray, p: PExponent) -> np.ndarray:
    """ Top-down product formula for the co-potential. """
    shrink = np.clip(1.0 - c ** (p.conj - 1.0), 0.0, None) ** (p.p - 1.0)
    factor = np.ones(len(tree))
    parents = tree.parents
    for ids in tree.by_level()[1:]:
        factor[ids] = factor[parents[ids]] * shrink[parents[ids]]
    return c * factor


TailPolicy = Union[str, float, Mapping[int, Union[float, Tuple[float, float], CapacityInterval]]]


def tail_values(tree: Tree, tail_policy: TailPolicy) -> Tuple[np.ndarray, np.ndarray]:
    """ Lower and upper boundary values: 1 at true leaves, the policy's
    value(s) at tails. """
    lo = np.zeros(len(tree))
    hi = np.zeros(len(tree))
    true_leaves = tree.leaf_mask & ~tree.tail_mask
    lo[true_leaves] = hi[true_leaves] = 1.0
    tails = tree.tails()

    def _set(a, low, high):
        if not (0.0 <= low <= high <= 1.0):
            raise CapacityError(f"tail value for edge {tree.labels[a]} must lie in [0, 1], got [{low}, {high}]")
        lo[a], hi[a] = low, high

    if isinstance(tail_policy, Mapping):
        for a in tails:
            if a not in tail_policy:
                raise CapacityError(f"no value given for tail {tree.labels[a]}")
            value = tail_policy[a]
            if isinstance(value, CapacityInterval):
                _set(a, value.lower, value.upper)
            elif isinstance(value, (tuple, list)):
                _set(a, float(value[0]), float(value[1]))
            else:
                _set(a, float(value), float(value))
        return lo, hi

    named = {"pessimistic": (0.0, 0.0), "0": (0.0, 0.0), "optimistic": (1.0, 1.0), "1": (1.0, 1.0),
             "interval": (0.0, 1.0)}
    if isinstance(tail_policy, str):
        if tail_policy not in named:
            raise CapacityError(f"unknown tail policy {tail_policy!r}")
        low, high = named[tail_policy]
    else:
        low = high = float(tail_policy)
    for a in tails:
        _set(a, low, high)
    return lo, hi


def _result(tree: Tree, p: PExponent, c: np.ndarray, capacity: CapacityInterval) -> EquilibriumResult:
    M = _measure_from_tents(tree, c, p)
    return EquilibriumResult(capacity, c, BoundaryMeasure(M), signed_power(M, p), p)


def capacity_recursive(tree: Tree, p: Union[float, PExponent], tail_policy: TailPolicy = "interval",
                       threads: int = 1) -> EquilibriumResult:
    """ Capacity of the boundary of `tree` by the tent recursion. A true leaf
    has tent capacity 1; tails take their value from `tail_policy`
    ("pessimistic"/"0", "optimistic"/"1", "interval", a number, or a mapping
    from tail id to a value or a (lower, upper) pair). Since the recursion is
    monotone in the children's values, the two passes bracket the capacity. """
    p = PExponent.of(p)
    lo, hi = tail_values(tree, tail_policy)

    if np.array_equal(lo, hi):
        c_hi = _tent_capacities(tree, p, hi)
        c_lo = c_hi
    else:
        with WorkerPool(min(threads, 2)) as pool:
            c_lo, c_hi = pool.map(lambda boundary: _tent_capacities(tree, p, boundary), [lo, hi])

    root = tree.root
    pad = INTERVAL_PAD if tree.tails() else 0.0
    capacity = CapacityInterval.hull(float(c_lo[root]), float(c_hi[root]), pad)
    logger.debug("capacity of %s with tails %r: [%.17g, %.17g]", tree, tail_policy, capacity.lower, capacity.upper)
    return _result(tree, p, c_hi, capacity)


def capacity_of_set(tree: Tree, E: Iterable, p: Union[float, PExponent]) -> EquilibriumResult:
    """ Capacity and equilibrium measure of a set of true leaves. Only the
    subtree spanned by E matters: every other leaf and tail enters the
    recursion with value 0, which is the spanned-subtree computation with
    its results extended by zero. """
    p = PExponent.of(p)
    E = BoundarySet.of(tree, E)
    if not E:
        raise CapacityError("the capacity of an empty set has no equilibrium measure")
    boundary = E.mask(tree).astype(float)
    c = _tent_capacities(tree, p, boundary)
    return _result(tree, p, c, CapacityInterval.exact(c[tree.root]))


# --- spherically symmetric trees ----------------------------------------------------


def _level_series(spec: TreeSpec, start: int, q: float, explicit: int = 0) -> float:
    """ Sum over levels k >= start of (card_k / card_start)^(1-q), using the
    spec's periodic tail for an exact remainder. May be infinite. """
    periodic = spec.periodic_tail()
    total, log_card, k = 0.0, 0.0, start
    while True:
        if periodic is not None:
            s0, period, growth = periodic
            if k >= s0 and (k - s0) % period == 0 and k - start >= explicit:
                if growth < 2:
                    return math.inf
                block, lc = 0.0, log_card
                for i in range(period):
                    block += math.exp((1.0 - q) * lc)
                    lc += math.log(spec.degree(k + i))
                return total + block / (1.0 - growth ** (1.0 - q))
        total += math.exp((1.0 - q) * log_card)
        d = spec.degree(k)
        if d == 0:
            return total
        log_card += math.log(d)
        k += 1


def _series_capacity(series: float, p: PExponent) -> float:
    return 0.0 if math.isinf(series) else series ** (1.0 - p.p)


def symmetric_capacity(deg: Union[Sequence[int], TreeSpec], p: Union[float, PExponent], depth: int,
                       eventual_min: Optional[int] = None) -> CapacityInterval:
    """ c_p(boundary) = (sum over levels of card_k^(1-p'))^(1-p) for a spherically
    symmetric tree. For a plain degree sequence the first `depth` levels are
    summed and the rest is bounded by continuing with degree `eventual_min`
    (no bound, hence lower capacity 0, when it is missing or 1). For a
    TreeSpec the remainder is exact. """
    p = PExponent.of(p)
    if depth < 1:
        raise CapacityError("depth must be a positive integer")
    if isinstance(deg, TreeSpec):
        if isinstance(deg, Explicit):
            raise CapacityError("explicit trees are not spherically symmetric")
        c = _series_capacity(_level_series(deg, 0, p.conj, explicit=depth), p)
        pad = INTERVAL_PAD if deg.infinite else 0.0
        return CapacityInterval.hull(c, c, pad)

    deg = list(deg)
    if not deg:
        raise CapacityError("empty degree sequence")
    if any(d < 1 for d in deg):
        raise CapacityError("degrees must be >= 1")
    q = p.conj
    levels = min(depth, len(deg) + 1)
    total, log_card = 0.0, 0.0
    for k in range(levels):
        total += math.exp((1.0 - q) * log_card)
        if k < levels - 1:
            log_card += math.log(deg[k])
    upper = total ** (1.0 - p.p)
    if eventual_min is None or eventual_min < 2:
        return CapacityInterval(0.0, min(upper, 1.0))
    r = eventual_min ** (1.0 - q)
    remainder = math.exp((1.0 - q) * log_card) * r / (1.0 - r)
    lower = (total + remainder) ** (1.0 - p.p)
    return CapacityInterval.hull(lower, upper, INTERVAL_PAD)


def tent_capacity_at_level(spec: TreeSpec, level: int, p: Union[float, PExponent]) -> float:
    """ Capacity of the (full) tent of an edge at `level`, rooted at that edge. """
    p = PExponent.of(p)
    return _series_capacity(_level_series(spec, level, p.conj), p)


def tail_bounds(spec: TreeSpec, tree: Tree, p: Union[float, PExponent]) -> Dict[int, CapacityInterval]:
    """ Certified values for the tails of a tree built from a spherically
    symmetric spec, usable as a tail policy of capacity_recursive(). """
    p = PExponent.of(p)
    cache: Dict[int, CapacityInterval] = {}
    out = {}
    for a in tree.tails():
        k = tree.level(a)
        if k not in cache:
            c = tent_capacity_at_level(spec, k, p)
            cache[k] = CapacityInterval.hull(c, c, INTERVAL_PAD)
        out[a] = cache[k]
    return out


@dataclass(frozen=True)
class SymmetricResult:
    """ Level-compressed equilibrium data: c_by_level[k] and M_by_level[k]
    are the tent capacity and co-potential of every edge at level k. """

    capacity: CapacityInterval
    c_by_level: Tuple[float, ...]
    M_by_level: Tuple[float, ...]
    p: PExponent

    def to_json(self, details: bool = True) -> dict:
        data = {"p": self.p.p, "capacity": self.capacity.to_json()}
        if details:
            data["c_by_level"] = list(self.c_by_level)
            data["M_by_level"] = list(self.M_by_level)
        return data


def capacity_of_spec(spec: TreeSpec, p: Union[float, PExponent], depth: int, tail: str = "interval") -> SymmetricResult:
    """ The tent recursion on one representative edge per level, which is
    capacity_recursive() on the depth-truncated tree without building it.
    tail="interval" uses the TreeSpec's certified tail capacities. """
    p = PExponent.of(p)
    if isinstance(spec, Explicit):
        raise TreeError("explicit trees have no level structure; build them and use capacity_recursive")
    if depth < 1:
        raise TreeError(f"depth must be a positive integer, got {depth}")

    degrees: List[int] = []
    while len(degrees) < depth:
        d = spec.degree(len(degrees))
        if d == 0:
            break
        degrees.append(d)
    bottom = len(degrees)

    pad = 0.0
    if spec.degree(bottom) == 0:
        value = 1.0
    elif tail in ("0", "pessimistic"):
        value = 0.0
    elif tail in ("1", "optimistic"):
        value = 1.0
    elif tail == "interval":
        value, pad = tent_capacity_at_level(spec, bottom, p), INTERVAL_PAD
    else:
        raise CapacityError(f"unknown tail policy {tail!r}")

    c = [0.0] * (bottom + 1)
    c[bottom] = value
    for k in range(bottom - 1, -1, -1):
        c[k] = float(_contract(np.array([degrees[k] * c[k + 1]]), p)[0])
    capacity = CapacityInterval.hull(c[0], c[0], pad)

    M, factor = [], 1.0
    for value in c:
        M.append(value * factor)
        factor *= max(1.0 - value ** (p.conj - 1.0), 0.0) ** (p.p - 1.0)
    return SymmetricResult(capacity, tuple(c), tuple(M), p)


def symmetric_measure(degrees: Sequence[int], p: Union[float, PExponent]) -> List[float]:
    """ Equilibrium co-potential of the finite spherically symmetric tree with
    the given forward degrees (edges at level len(degrees) are leaves):
    M(k) = c / card_k on every edge of level k. """
    p = PExponent.of(p)
    spec = TreeSpec.from_json({"kind": "spherical", "degrees": list(degrees)})
    c = _series_capacity(_level_series(spec, 0, p.conj), p)
    cards, out = 1, []
    for k in range(len(degrees) + 1):
        out.append(c / cards)
        if k < len(degrees):
            cards *= degrees[k]
    return out


# --- rescaling ----------------------------------------------------------------------


@dataclass(frozen=True)
class Rescaling:
    k: float
    tent: Tree
    measure: BoundaryMeasure


def rescaling_constant(tree: Tree, result: EquilibriumResult, alpha: int, p: Union[float, PExponent],
                       tol: float = 1e-12) -> Rescaling:
    """ k_a = (1 - IM_p(b(a)))^(-p/p'). The restriction of the equilibrium
    measure to the tent at a, multiplied by k_a, is the equilibrium measure
    of E_a inside that tent. """
    p = PExponent.of(p)
    alpha = tree.check(alpha)
    V = equilibrium_potential(tree, result.measure.co_potential, p)
    gap = 1.0 - V[tree.begin(alpha)]
    if gap <= tol:
        raise CapacityError(f"degenerate tent at edge {tree.labels[alpha]}: IM_p(b(a)) = {1.0 - gap:.17g}")
    k = gap ** (-p.p / p.conj)
    sub = tent(tree, alpha)
    restricted = BoundaryMeasure(result.measure.co_potential[_tent_ids(tree, alpha)])
    return Rescaling(k, sub, restricted.scaled(k))


def _tent_ids(tree: Tree, alpha: int) -> np.ndarray:
    # host ids of tent(tree, alpha), in the tent's own breadth-first order
    ids, i = [alpha], 0
    while i < len(ids):
        ids.extend(tree.children(ids[i]))
        i += 1
    return np.asarray(ids, dtype=np.int64)


# --- effective resistance -----------------------------------------------------------


@dataclass(frozen=True)
class ResistanceResult:
    """ tent_resistance[a] is the resistance of the tent at a with a unit
    resistor on each edge, edge a included; the total resistance R of the
    tree is measured from e(root), so R = tent_resistance[root] - 1 and
    c_2 = 1 / (1 + R). Bounds come from the tail policy. """

    lower: float
    upper: float
    tent_resistance: np.ndarray

    @property
    def capacity(self) -> CapacityInterval:
        return CapacityInterval.hull(1.0 / (1.0 + self.upper), 1.0 / (1.0 + self.lower))

    def identity_residual(self, c_of_alpha: np.ndarray) -> float:
        """ max over edges of |1/(1 + R(a)) - c(a)| against p=2 tent capacities. """
        with np.errstate(divide="ignore"):
            implied = 1.0 / self.tent_resistance
        return float(np.max(np.abs(implied - c_of_alpha)))

    def to_json(self) -> dict:
        return {"resistance": {"lower": self.lower, "upper": self.upper}, "capacity": self.capacity.to_json()}


def _tent_resistances(tree: Tree, boundary: np.ndarray) -> np.ndarray:
    R = np.zeros(len(tree))
    G = np.zeros(len(tree))
    leaf = tree.leaf_mask
    parents = tree.parents
    with np.errstate(divide="ignore"):
        for k, ids in reversed(list(enumerate(tree.by_level()))):
            at_leaf = ids[leaf[ids]]
            R[at_leaf] = 1.0 / boundary[at_leaf]
            inner = ids[~leaf[ids]]
            R[inner] = 1.0 + 1.0 / G[inner]
            if k > 0:
                np.add.at(G, parents[ids], 1.0 / R[ids])
    return R


def total_resistance(tree: Tree, tail_policy: TailPolicy = "interval") -> ResistanceResult:
    """ Series-parallel reduction of the tree as a network of unit resistors.
    A tail whose tent has capacity c behaves as a resistor 1/c, so the
    optimistic tail values give the lower resistance. """
    lo, hi = tail_values(tree, tail_policy)
    R_hi = _tent_resistances(tree, lo)
    R_lo = _tent_resistances(tree, hi)
    root = tree.root
    return ResistanceResult(float(R_lo[root] - 1.0), float(R_hi[root] - 1.0), R_lo)


def branched_fraction(tree: Tree) -> Tuple[str, Fraction]:
    """ The p=2 capacity of a finite tree written out as a branched continued
    fraction, together with its exact rational value. """
    if tree.tails():
        raise CapacityError("branched fractions are only written for finite trees")
    text: List[str] = [""] * len(tree)
    value: List[Fraction] = [Fraction(0)] * len(tree)
    for ids in reversed(tree.by_level()):
        for a in ids:
            kids = tree.children(int(a))
            if not kids:
                text[a], value[a] = "1", Fraction(1)
                continue
            S = sum((value[b] for b in kids), Fraction(0))
            value[a] = 1 / (1 + 1 / S)
            text[a] = "1/(1 + 1/(" + " + ".join(text[b] for b in kids) + "))"
    return text[tree.root], value[tree.root]


# --- the variational oracle ---------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """ value is ||f||_p^p of the admissible function f (an upper bound for the
    capacity); lower_bound comes from the candidate measure by Hoelder's
    inequality, mu(E)^p / E_p(mu)^(p-1) <= c_p(E). """

    value: float
    lower_bound: float
    f: Dict[int, float]
    iterations: int
    method: str

    @property
    def gap(self) -> float:
        return self.value - self.lower_bound

    def to_json(self, tree: Tree) -> dict:
        return {
            "capacity": self.value,
            "lower_bound": self.lower_bound,
            "iterations": self.iterations,
            "method": self.method,
            "f": {tree.labels[a]: v for a, v in sorted(self.f.items())},
        }


def _constraint_matrix(tree: Tree, E: Sequence[int]) -> Tuple[np.ndarray, List[int], np.ndarray]:
    paths = [predecessor_path(tree, zeta) for zeta in E]
    edges = sorted({a for path in paths for a in path})
    column = {a: j for j, a in enumerate(edges)}
    A = np.zeros((len(paths), len(edges)))
    for i, path in enumerate(paths):
        A[i, [column[a] for a in path]] = 1.0
    leaf_columns = np.array([column[zeta] for zeta in E])
    return A, edges, leaf_columns


def _dual_bound(A: np.ndarray, weights: np.ndarray, p: PExponent) -> float:
    weights = np.clip(weights, 0.0, None)
    mass = float(weights.sum())
    if mass <= 0:
        return 0.0
    M = A.T @ weights
    energy = float(np.sum(M ** p.conj))
    return mass ** p.p / energy ** (p.p - 1.0)


def _kkt_quadratic(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    """ p = 2: f = A^T lam with lam >= 0 solving the active leaf constraints. """
    m = A.shape[0]
    active = np.ones(m, dtype=bool)
    for rounds in range(1, 4 * m + 2):
        lam = np.zeros(m)
        Aa = A[active]
        lam[active] = np.linalg.solve(Aa @ Aa.T, np.ones(int(active.sum())))
        if np.any(lam < 0):
            active[int(np.argmin(lam))] = False
            continue
        f = A.T @ lam
        slack = A @ f - 1.0
        if np.all(slack >= -1e-12):
            return f, lam, rounds
        active[int(np.argmin(slack))] = True
    raise ConvergenceError("active set iteration did not settle", math.inf, 0.0)


def _project(A: np.ndarray, lengths: np.ndarray, f: np.ndarray) -> np.ndarray:
    # correct every violated path by spreading its deficit over its edges
    f = np.clip(f, 0.0, None)
    deficit = np.clip(1.0 - A @ f, 0.0, None)
    if np.any(deficit > 0):
        f = f + np.max(A * (deficit / lengths)[:, None], axis=0)
    return f


def _subgradient(A: np.ndarray, p: PExponent, tol: float, max_iter: int, eta0: float,
                 window: int = 200) -> Tuple[np.ndarray, int]:
    lengths = A.sum(axis=1)
    f = np.max(A / lengths[:, None], axis=0)
    best, best_value = f, float(np.sum(f ** p.p))
    history = [best_value]
    t = 0
    for t in range(1, max_iter + 1):
        g = p.p * f ** (p.p - 1.0)
        norm = float(np.linalg.norm(g))
        if norm == 0:
            break
        f = _project(A, lengths, f - (eta0 / math.sqrt(t)) * g / norm)
        value = float(np.sum(f ** p.p))
        if value < best_value:
            best, best_value = f, value
        history.append(best_value)
        if t % 1000 == 0:
            logger.debug("oracle subgradient iteration %d: best %.17g", t, best_value)
        if t >= window and history[-window - 1] - best_value < tol * best_value:
            break
    return best, t


def _polish(A: np.ndarray, p: PExponent, f0: np.ndarray) -> np.ndarray:
    def objective(f):
        f = np.clip(f, 0.0, None)
        return float(np.sum(f ** p.p)), p.p * f ** (p.p - 1.0)

    res = optimize.minimize(
        objective, f0, jac=True, method="SLSQP",
        bounds=[(0.0, None)] * A.shape[1],
        constraints=[{"type": "ineq", "fun": lambda f: A @ f - 1.0, "jac": lambda f: A}],
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    if not res.success:
        logger.warning("oracle polish step stopped early: %s", res.message)
    return res.x


def oracle_capacity(tree: Tree, E: Iterable, p: Union[float, PExponent], tol: float = 1e-6,
                    max_iter: int = 2000, eta0: float = 0.1) -> OracleResult:
    """ Minimises ||f||_p^p over nonnegative f with If >= 1 on E. For p = 2 the
    KKT system is solved exactly; otherwise projected subgradient steps
    eta0/sqrt(t) from the uniform admissible start are polished with SLSQP.
    The result is accepted once the gap to the measure lower bound is within
    `tol` relative; ConvergenceError otherwise. """
    p = PExponent.of(p)
    E = sorted(BoundarySet.of(tree, E))
    if not E:
        raise CapacityError("the oracle needs a nonempty set")
    A, edges, leaf_columns = _constraint_matrix(tree, E)

    if p.p == 2.0:
        f, lam, iterations = _kkt_quadratic(A)
        method, weights = "kkt", lam
    else:
        f, iterations = _subgradient(A, p, tol, max_iter, eta0)
        f = _polish(A, p, f)
        method = "subgradient+slsqp"
        weights = np.clip(f[leaf_columns], 0.0, None) ** (p.p - 1.0)

    f = np.clip(f, 0.0, None)
    worst = float(np.min(A @ f))
    if worst <= 0:
        raise ConvergenceError("oracle iterate is not admissible", math.inf, 0.0)
    if worst < 1.0:
        f = f / worst
    value = float(np.sum(f ** p.p))
    bound = min(_dual_bound(A, weights, p), value)

    if value - bound > tol * max(value, 1e-300):
        raise ConvergenceError(f"oracle gap {value - bound:.3g} exceeds tolerance after {iterations} iterations",
                               value, bound, dict(zip(edges, f.tolist())))
    return OracleResult(value, bound, dict(zip(edges, f.tolist())), iterations, method)
