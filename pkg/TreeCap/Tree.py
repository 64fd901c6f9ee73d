"""
Rooted trees stored as edge arenas, the specs they are built from,
and the correspondence between boundary measures and forward additive
functions on edges
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import TreeError, MeasureError

logger = logging.getLogger(__name__)

#: vertex id of o, the beginning of the root edge. Every other vertex is
#: addressed by the id of the edge that ends at it.
ORIGIN = -1

DEFAULT_MAX_EDGES = 2_000_000


@dataclass(frozen=True)
class EdgeRecord:
    parent: Optional[int]
    children: Tuple[int, ...]
    level: int
    tail: bool = False


class Tree:
    """ Immutable arena of edges. Edge ids are the positions 0..n-1 in
    breadth-first order from the root edge, children keep the order they
    were given in. A tail leaf stands for an unexplored infinite tent. """

    def __init__(self, children: Sequence[Sequence[int]], tail: Sequence[bool] = None,
                 labels: Sequence[str] = None, origin: Sequence[int] = None):
        n = len(children)
        if n == 0:
            raise TreeError("a tree needs at least the root edge")

        parent = np.full(n, ORIGIN, dtype=np.int64)
        for a, kids in enumerate(children):
            if len(set(kids)) != len(kids):
                raise TreeError(f"edge {a} lists a child twice")
            for b in kids:
                if not 0 <= b < n:
                    raise TreeError(f"edge {a} has unknown child {b}")
                if b == a:
                    raise TreeError(f"edge {a} is its own child")
                if parent[b] != ORIGIN:
                    raise TreeError(f"edge {b} has two parents ({parent[b]} and {a})")
                parent[b] = a

        roots = np.flatnonzero(parent == ORIGIN)
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root edge, found {len(roots)}")
        root = int(roots[0])

        level = np.full(n, -1, dtype=np.int64)
        level[root] = 0
        order = [root]
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b in children[a]:
                level[b] = level[a] + 1
                order.append(b)
                queue.append(b)
        if len(order) != n:
            raise TreeError("adjacency contains a cycle or a detached component")
        if order != list(range(n)):
            raise TreeError("edge ids must follow breadth-first order from the root")

        self._children: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(b) for b in kids) for kids in children)
        self._parent = parent
        self._level = level
        self._tail = np.zeros(n, dtype=bool) if tail is None else np.asarray(tail, dtype=bool).copy()
        self._leaf = np.array([len(kids) == 0 for kids in self._children], dtype=bool)
        if len(self._tail) != n:
            raise TreeError("tail flags do not match the number of edges")
        if np.any(self._tail & ~self._leaf):
            raise TreeError("only leaves may carry the tail flag")

        self.root = root
        self.labels: Tuple[str, ...] = tuple(str(x) for x in labels) if labels is not None else tuple(str(a) for a in range(n))
        self.origin: Optional[Tuple[int, ...]] = tuple(int(x) for x in origin) if origin is not None else None
        self._order = np.asarray(order, dtype=np.int64)
        self._by_level = [np.flatnonzero(level == k) for k in range(int(level.max()) + 1)]
        self._index: Optional[Dict[str, int]] = None

        for arr in (self._parent, self._level, self._tail, self._leaf):
            arr.setflags(write=False)

    # --- basic queries --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._children)

    def __contains__(self, a) -> bool:
        return isinstance(a, (int, np.integer)) and 0 <= a < len(self)

    def __repr__(self) -> str:
        return f"Tree(edges={len(self)}, depth={self.depth}, leaves={int(self._leaf.sum())}, tails={int(self._tail.sum())})"

    def check(self, a) -> int:
        if a not in self:
            raise TreeError(f"unknown edge id {a!r}")
        return int(a)

    def parent(self, a: int) -> Optional[int]:
        p = int(self._parent[self.check(a)])
        return None if p == ORIGIN else p

    def children(self, a: int) -> Tuple[int, ...]:
        return self._children[self.check(a)]

    def level(self, a: int) -> int:
        return int(self._level[self.check(a)])

    def is_leaf(self, a: int) -> bool:
        return bool(self._leaf[self.check(a)])

    def is_tail(self, a: int) -> bool:
        return bool(self._tail[self.check(a)])

    def record(self, a: int) -> EdgeRecord:
        return EdgeRecord(self.parent(a), self.children(a), self.level(a), self.is_tail(a))

    def begin(self, a: int) -> int:
        """ The vertex b(a), as a vertex id. """
        return int(self._parent[self.check(a)])

    @property
    def depth(self) -> int:
        return len(self._by_level) - 1

    @property
    def parents(self) -> np.ndarray:
        return self._parent

    @property
    def levels(self) -> np.ndarray:
        return self._level

    @property
    def leaf_mask(self) -> np.ndarray:
        return self._leaf

    @property
    def tail_mask(self) -> np.ndarray:
        return self._tail

    def leaves(self) -> List[int]:
        return [int(a) for a in np.flatnonzero(self._leaf)]

    def true_leaves(self) -> List[int]:
        return [int(a) for a in np.flatnonzero(self._leaf & ~self._tail)]

    def tails(self) -> List[int]:
        return [int(a) for a in np.flatnonzero(self._tail)]

    def breadth_first(self) -> np.ndarray:
        return self._order

    def by_level(self) -> List[np.ndarray]:
        return self._by_level

    def id_of(self, label) -> int:
        """ Resolves an edge label (as found in JSON files) to its id. """
        if self._index is None:
            self._index = {lab: a for a, lab in enumerate(self.labels)}
        try:
            return self._index[str(label)]
        except KeyError:
            raise TreeError(f"unknown edge {label!r}")

    # --- vectorised passes ----------------------------------------------------------

    def sum_children(self, values: np.ndarray) -> np.ndarray:
        """ For every edge the sum of `values` over its children. """
        values = np.asarray(values, dtype=float)
        mask = self._parent != ORIGIN
        return np.bincount(self._parent[mask], weights=values[mask], minlength=len(self))

    def accumulate_down(self, values: np.ndarray) -> np.ndarray:
        """ out[a] = sum of values over the geodesic from the root to a (inclusive). """
        out = np.asarray(values, dtype=float).copy()
        for ids in self._by_level[1:]:
            out[ids] += out[self._parent[ids]]
        return out

    def accumulate_up(self, values: np.ndarray) -> np.ndarray:
        """ out[a] = sum of values over the tent rooted at a. """
        out = np.asarray(values, dtype=float).copy()
        for ids in reversed(self._by_level[1:]):
            np.add.at(out, self._parent[ids], out[ids])
        return out

    # --- interchange ----------------------------------------------------------------

    def to_json(self) -> dict:
        edges = []
        for a in range(len(self)):
            rec = self.record(a)
            item = {
                "id": self.labels[a],
                "parent": None if rec.parent is None else self.labels[rec.parent],
                "children": [self.labels[b] for b in rec.children],
            }
            if rec.tail:
                item["tail"] = True
            edges.append(item)
        return {"root": self.labels[self.root], "edges": edges}

    @classmethod
    def from_json(cls, data: Mapping, max_edges: int = DEFAULT_MAX_EDGES) -> "Tree":
        if "spec" in data:
            return build_tree(TreeSpec.from_json(data["spec"]), data.get("depth"), max_edges=max_edges)
        if "edges" not in data:
            raise TreeError("tree JSON needs either 'spec' or 'edges'")

        adjacency: Dict[str, List[str]] = {}
        parents: Dict[str, Optional[str]] = {}
        tails = set()
        for item in data["edges"]:
            try:
                key = str(item["id"])
            except (KeyError, TypeError):
                raise TreeError("every edge needs an 'id'")
            if key in adjacency:
                raise TreeError(f"edge {key!r} listed twice")
            adjacency[key] = [str(c) for c in item.get("children", [])]
            if "parent" in item:
                parents[key] = None if item["parent"] is None else str(item["parent"])
            if item.get("tail", False):
                tails.add(key)

        for key, kids in adjacency.items():
            for kid in kids:
                if kid in parents and parents[kid] != key:
                    raise TreeError(f"edge {kid!r} names parent {parents[kid]!r} but is listed under {key!r}")

        root = data.get("root")
        spec = Explicit(adjacency, root=None if root is None else str(root), tails=frozenset(tails))
        return build_tree(spec, data.get("depth"), max_edges=max_edges)


# --- tree specs ---------------------------------------------------------------------


class TreeSpec:
    """ Description of a tree to be built by build_tree(). Everything but
    Explicit is spherically symmetric: the forward degree only depends on
    the level, and degree(level) == 0 means the edges there are true leaves. """

    infinite = False

    def degree(self, level: int) -> int:
        raise TreeError(f"{type(self).__name__} has no per-level degree")

    def level_degrees(self, count: int) -> List[int]:
        return [self.degree(k) for k in range(count)]

    def periodic_tail(self) -> Optional[Tuple[int, int, int]]:
        """ (start, period, growth) such that from level `start` on the degree
        pattern repeats every `period` levels and the number of edges grows by
        `growth` per period; None for finite trees. """
        return None

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(data: Mapping) -> "TreeSpec":
        kind = data.get("kind") if isinstance(data, Mapping) else None
        try:
            if kind == "homogeneous":
                return Homogeneous(int(data["n"]))
            if kind == "spherical":
                tail = data.get("tail_degree")
                return SphericallySymmetric(tuple(int(d) for d in data["degrees"]), None if tail is None else int(tail))
            if kind == "subdyadic":
                tail = data.get("tail_run", 1)
                return Subdyadic(tuple(int(r) for r in data["runs"]), None if tail is None else int(tail))
            if kind == "explicit":
                adjacency = {str(k): [str(c) for c in v] for k, v in data["adjacency"].items()}
                root = data.get("root")
                return Explicit(adjacency, None if root is None else str(root), frozenset(str(t) for t in data.get("tails", [])))
        except (KeyError, TypeError, ValueError) as exc:
            raise TreeError(f"malformed tree spec {dict(data)!r}: {exc}")
        raise TreeError(f"unknown tree spec kind {kind!r}")

    @staticmethod
    def parse(text: str) -> "TreeSpec":
        """ Parses the compact command line form, for example
        'homogeneous:2', 'spherical:3,2,2:2' or 'subdyadic:2,1,1:1'. """
        kind, _, rest = text.partition(":")
        values, _, tail = rest.partition(":")
        try:
            numbers = tuple(int(v) for v in values.split(",") if v.strip())
            if kind == "homogeneous" and len(numbers) == 1 and not tail:
                return Homogeneous(numbers[0])
            if kind == "spherical":
                return SphericallySymmetric(numbers, int(tail) if tail else None)
            if kind == "subdyadic":
                return Subdyadic(numbers, int(tail) if tail else 1)
        except ValueError as exc:
            raise TreeError(f"malformed tree spec {text!r}: {exc}")
        raise TreeError(f"malformed tree spec {text!r}")


@dataclass(frozen=True)
class Explicit(TreeSpec):
    adjacency: Mapping[str, Sequence[str]]
    root: Optional[str] = None
    tails: FrozenSet[str] = frozenset()

    def to_json(self) -> dict:
        data = {"kind": "explicit", "adjacency": {k: list(v) for k, v in self.adjacency.items()}}
        if self.root is not None:
            data["root"] = self.root
        if self.tails:
            data["tails"] = sorted(self.tails)
        return data


@dataclass(frozen=True)
class Homogeneous(TreeSpec):
    n: int
    infinite = True

    def __post_init__(self):
        if self.n < 2:
            raise TreeError(f"homogeneous trees need degree >= 2, got {self.n}")

    def degree(self, level: int) -> int:
        return self.n

    def periodic_tail(self):
        return 0, 1, self.n

    def to_json(self) -> dict:
        return {"kind": "homogeneous", "n": self.n}


@dataclass(frozen=True)
class SphericallySymmetric(TreeSpec):
    """ degrees[k] is the forward degree at level k. With tail_degree the
    tree continues with that degree forever, otherwise the edges at level
    len(degrees) are true leaves. """

    degrees: Tuple[int, ...]
    tail_degree: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        if any(d < 1 for d in self.degrees):
            raise TreeError("spherically symmetric degrees must be >= 1")
        if self.tail_degree is not None and self.tail_degree < 1:
            raise TreeError("the tail degree must be >= 1")
        if not self.degrees and self.tail_degree is None:
            raise TreeError("empty degree sequence")

    @property
    def infinite(self) -> bool:
        return self.tail_degree is not None

    def degree(self, level: int) -> int:
        if level < len(self.degrees):
            return self.degrees[level]
        return self.tail_degree if self.tail_degree is not None else 0

    def periodic_tail(self):
        if self.tail_degree is None:
            return None
        return len(self.degrees), 1, self.tail_degree

    def to_json(self) -> dict:
        data = {"kind": "spherical", "degrees": list(self.degrees)}
        if self.tail_degree is not None:
            data["tail_degree"] = self.tail_degree
        return data


@dataclass(frozen=True)
class Subdyadic(TreeSpec):
    """ Run j holds runs[j] >= 1 consecutive levels with 2**j edges each; the
    last level of a run branches in two. After the listed runs,
    runs of length tail_run follow forever (tail_run=None ends the tree). """

    runs: Tuple[int, ...]
    tail_run: Optional[int] = 1
    _starts: Tuple[int, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        if not self.runs:
            raise TreeError("a subdyadic spec needs at least one run")
        if any(r < 1 for r in self.runs):
            raise TreeError("run lengths must be >= 1")
        if self.tail_run is not None and self.tail_run < 1:
            raise TreeError("the tail run must be >= 1")
        starts, pos = [], 0
        for r in self.runs:
            starts.append(pos)
            pos += r
        object.__setattr__(self, "_starts", tuple(starts))

    @property
    def infinite(self) -> bool:
        return self.tail_run is not None

    @property
    def listed_levels(self) -> int:
        return sum(self.runs)

    def run_of(self, level: int) -> Tuple[int, int]:
        """ (run index, offset inside the run) of a level. """
        end = self.listed_levels
        if level < end:
            j = max(i for i, s in enumerate(self._starts) if s <= level)
            return j, level - self._starts[j]
        if self.tail_run is None:
            raise TreeError(f"level {level} is beyond the finite subdyadic tree")
        extra = level - end
        return len(self.runs) + extra // self.tail_run, extra % self.tail_run

    def _run_length(self, j: int) -> int:
        return self.runs[j] if j < len(self.runs) else (self.tail_run or 0)

    def degree(self, level: int) -> int:
        if self.tail_run is None and level >= self.listed_levels:
            return 0
        j, offset = self.run_of(level)
        if offset < self._run_length(j) - 1:
            return 1
        if j + 1 >= len(self.runs) and self.tail_run is None:
            return 0
        return 2

    def periodic_tail(self):
        if self.tail_run is None:
            return None
        return self.listed_levels, self.tail_run, 2

    def to_json(self) -> dict:
        return {"kind": "subdyadic", "runs": list(self.runs), "tail_run": self.tail_run}


# --- building -----------------------------------------------------------------------


def build_tree(spec: TreeSpec, depth: Optional[int] = None, max_edges: int = DEFAULT_MAX_EDGES) -> Tree:
    """ Realises a spec as an arena. Edges at level `depth` whose tent would
    continue are stored as tail leaves. """
    if depth is not None and depth < 1:
        raise TreeError(f"depth must be a positive integer, got {depth}")
    if isinstance(spec, Explicit):
        return _build_explicit(spec, depth)
    if spec.infinite and depth is None:
        raise TreeError(f"{type(spec).__name__} is infinite and needs a depth")

    counts, total = [1], 1
    k = 0
    while depth is None or k < depth:
        d = spec.degree(k)
        if d == 0:
            break
        counts.append(counts[-1] * d)
        total += counts[-1]
        if total > max_edges:
            raise TreeError(f"tree would exceed {max_edges} edges; lower the depth")
        k += 1

    children: List[Tuple[int, ...]] = []
    tail: List[bool] = []
    frontier, next_id = [0], 1
    for k in range(len(counts)):
        deeper = k + 1 < len(counts)
        d = spec.degree(k) if deeper else 0
        for _ in frontier:
            children.append(tuple(range(next_id, next_id + d)))
            next_id += d
            tail.append(not deeper and spec.degree(k) > 0)
        frontier = range(len(children), next_id)

    tree = Tree(children, tail)
    logger.debug("built %s from %r", tree, spec)
    return tree


def _build_explicit(spec: Explicit, depth: Optional[int]) -> Tree:
    adjacency = {str(k): [str(c) for c in v] for k, v in spec.adjacency.items()}
    known = set(adjacency)
    for kids in adjacency.values():
        known.update(kids)

    seen_as_child = {}
    for key, kids in adjacency.items():
        for kid in kids:
            if kid in seen_as_child:
                raise TreeError(f"edge {kid!r} has two parents ({seen_as_child[kid]!r} and {key!r})")
            seen_as_child[kid] = key

    if spec.root is not None:
        if spec.root not in known:
            raise TreeError(f"root {spec.root!r} is not an edge")
        if spec.root in seen_as_child:
            raise TreeError(f"root {spec.root!r} has a parent")
        root = spec.root
    else:
        roots = [k for k in adjacency if k not in seen_as_child]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root edge, found {len(roots)}")
        root = roots[0]

    # breadth-first renumbering
    labels, index = [root], {root: 0}
    queue = deque([root])
    while queue:
        key = queue.popleft()
        for kid in adjacency.get(key, []):
            if kid in index:
                raise TreeError("adjacency contains a cycle")
            index[kid] = len(labels)
            labels.append(kid)
            queue.append(kid)
    if len(labels) != len(known):
        raise TreeError("adjacency contains a cycle or a detached component")

    level = {root: 0}
    children, tail = [], []
    for key in labels:
        kids = adjacency.get(key, [])
        for kid in kids:
            level[kid] = level[key] + 1
        is_tail = key in spec.tails
        if is_tail and kids:
            raise TreeError(f"tail edge {key!r} has children")
        if depth is not None and level[key] >= depth:
            is_tail = is_tail or bool(kids)
            kids = []
        children.append(tuple(index[k] for k in kids))
        tail.append(is_tail)

    if depth is not None:
        keep = [a for a, key in enumerate(labels) if level[key] <= depth]
        renumber = {a: i for i, a in enumerate(keep)}
        children = [tuple(renumber[b] for b in children[a]) for a in keep]
        tail = [tail[a] for a in keep]
        labels = [labels[a] for a in keep]

    return Tree(children, tail, labels)


# --- structural operations ----------------------------------------------------------


def _subtree(tree: Tree, root: int, keep: Optional[np.ndarray] = None) -> Tree:
    """ Breadth-first copy of the tent at `root`, restricted to edges in `keep`. """
    order, index = [root], {root: 0}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for b in tree.children(a):
            if keep is None or keep[b]:
                index[b] = len(order)
                order.append(b)
                queue.append(b)
    children = [tuple(index[b] for b in tree.children(a) if b in index) for a in order]
    tail = [bool(tree.tail_mask[a]) and not children[i] for i, a in enumerate(order)]
    host_origin = tree.origin
    origin = [host_origin[a] if host_origin is not None else a for a in order]
    return Tree(children, tail, [tree.labels[a] for a in order], origin)


def tent(tree: Tree, alpha: int) -> Tree:
    """ The subtree of all edges >= alpha, rooted at alpha. `origin` maps
    the tent's edge ids back to ids of the host tree. """
    return _subtree(tree, tree.check(alpha))


def predecessor_path(tree: Tree, x: int) -> List[int]:
    """ Edges of the geodesic from the root edge to x, ordered by level.
    P(o) is empty. """
    if x == ORIGIN:
        return []
    path = [tree.check(x)]
    parents = tree.parents
    while parents[path[-1]] != ORIGIN:
        path.append(int(parents[path[-1]]))
    path.reverse()
    return path


def confluent(tree: Tree, zeta: int, eta: int) -> Tuple[int, int]:
    """ (level of the vertex, edge id) of zeta ^ eta: the end vertex of the
    deepest edge the two geodesics share. The boundary distance of the two
    points is exp(-level). """
    for x in (zeta, eta):
        if not tree.is_leaf(x):
            raise TreeError(f"edge {x} is not a leaf")
    common = None
    for a, b in zip(predecessor_path(tree, zeta), predecessor_path(tree, eta)):
        if a != b:
            break
        common = a
    return tree.level(common) + 1, common


class BoundarySet(frozenset):
    """ A set of true leaves of a tree, each standing for the boundary point it ends at. """

    @classmethod
    def of(cls, tree: Tree, leaves: Iterable) -> "BoundarySet":
        ids = np.fromiter((tree.id_of(x) if isinstance(x, str) else tree.check(x) for x in leaves), dtype=np.int64)
        inner = ids[~tree.leaf_mask[ids]]
        if len(inner):
            raise TreeError(f"edge {tree.labels[inner[0]]} is not a leaf")
        tails = ids[tree.tail_mask[ids]]
        if len(tails):
            raise TreeError(f"edge {tree.labels[tails[0]]} is a tail, not a boundary point")
        return cls(ids.tolist())

    def mask(self, tree: Tree) -> np.ndarray:
        out = np.zeros(len(tree), dtype=bool)
        out[list(self)] = True
        return out

    def labels(self, tree: Tree) -> List[str]:
        return [tree.labels[a] for a in sorted(self)]


def spanned_mask(tree: Tree, leaves: Iterable[int]) -> np.ndarray:
    """ Edges of the union of the predecessor sets of `leaves`. """
    keep = np.zeros(len(tree), dtype=bool)
    keep[list(leaves)] = True
    parents = tree.parents
    for ids in reversed(tree.by_level()[1:]):
        keep[parents[ids[keep[ids]]]] = True
    return keep


def spanned_subtree(tree: Tree, E: Iterable[int]) -> Tree:
    E = list(E)
    if not E:
        raise TreeError("cannot span an empty boundary set")
    return _subtree(tree, tree.root, spanned_mask(tree, E))


def common_subtree(S: Tree, T: Tree) -> Tree:
    """ Biggest common subtree of S and T superimposed at the root, children
    matched by position. Labels are taken from S. """
    pairs = [(S.root, T.root)]
    children: List[Tuple[int, ...]] = []
    tail: List[bool] = []
    i = 0
    while i < len(pairs):
        s, t = pairs[i]
        ks, kt = S.children(s), T.children(t)
        shared = min(len(ks), len(kt))
        first = len(pairs)
        pairs.extend(zip(ks[:shared], kt[:shared]))
        children.append(tuple(range(first, first + shared)))
        unknown = (S.is_tail(s) and (T.is_tail(t) or kt)) or (T.is_tail(t) and ks)
        tail.append(bool(unknown) and shared == 0)
        i += 1
    return Tree(children, tail, [S.labels[s] for s, _ in pairs], [s for s, _ in pairs])


# --- edge functions and measures ----------------------------------------------------


def edge_function(tree: Tree, values: Union[Mapping, Sequence, np.ndarray, None] = None) -> np.ndarray:
    """ Dense vector over the edges of `tree`; entries missing from a mapping read as 0.
    Mapping keys may be edge ids or labels. """
    out = np.zeros(len(tree), dtype=float)
    if values is None:
        return out
    if isinstance(values, Mapping):
        for key, value in values.items():
            a = tree.id_of(key) if isinstance(key, str) else tree.check(key)
            out[a] = float(value)
        return out
    arr = np.asarray(values, dtype=float)
    if arr.shape != out.shape:
        raise TreeError(f"edge function has {arr.size} entries for {len(tree)} edges")
    return arr.copy()


@dataclass(frozen=True)
class AdditivityReport:
    ok: bool
    worst_edge: Optional[int]
    worst_violation: float

    def __bool__(self) -> bool:
        return self.ok


def is_forward_additive(tree: Tree, f: np.ndarray, tol: float = 0.0) -> AdditivityReport:
    """ f(a) == sum of f over the children of a, at every edge that is
    neither a leaf nor a tail. """
    f = np.asarray(f, dtype=float)
    gap = np.abs(f - tree.sum_children(f))
    gap[tree.leaf_mask] = 0.0
    if not np.any(~tree.leaf_mask):
        return AdditivityReport(True, None, 0.0)
    worst = int(np.argmax(gap))
    return AdditivityReport(bool(gap[worst] <= tol), worst, float(gap[worst]))


def co_potential(tree: Tree, leaf_weights: Union[Mapping, np.ndarray]) -> np.ndarray:
    """ M(a) = mass of the leaves below a. Weights on non-leaf edges are ignored. """
    w = edge_function(tree, leaf_weights)
    w[~tree.leaf_mask] = 0.0
    return tree.accumulate_up(w)


@dataclass(frozen=True)
class BoundaryMeasure:
    """ A measure on the boundary, carried by its co-potential M = I*mu. """

    co_potential: np.ndarray

    @property
    def mass(self) -> float:
        return float(self.co_potential[0]) if len(self.co_potential) else 0.0

    @classmethod
    def from_leaf_weights(cls, tree: Tree, weights: Union[Mapping, np.ndarray]) -> "BoundaryMeasure":
        M = co_potential(tree, weights)
        if np.any(M < 0):
            raise MeasureError("leaf weights must be nonnegative")
        return cls(M)

    @classmethod
    def from_co_potential(cls, tree: Tree, M: Union[Mapping, np.ndarray], tol: float = 1e-12) -> "BoundaryMeasure":
        """ Validates nonnegativity and forward additivity, with `tol` taken
        relative to the total mass. """
        M = edge_function(tree, M)
        if np.any(M < 0):
            raise MeasureError(f"co-potential is negative at edge {tree.labels[int(np.argmin(M))]}")
        report = is_forward_additive(tree, M, tol * max(float(M[tree.root]), 1.0))
        if not report:
            raise MeasureError(f"co-potential is not forward additive at edge {tree.labels[report.worst_edge]} "
                               f"(violation {report.worst_violation:.3g})")
        return cls(M)

    def scaled(self, k: float) -> "BoundaryMeasure":
        return BoundaryMeasure(self.co_potential * k)

    def support_leaves(self, tree: Tree) -> List[int]:
        M = self.co_potential
        return [int(a) for a in np.flatnonzero(tree.leaf_mask & (M > 0))]

    def leaf_weights(self, tree: Tree) -> Dict[int, float]:
        return {a: float(self.co_potential[a]) for a in tree.leaves()}
