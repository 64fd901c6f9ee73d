import random
from collections import deque

import pytest

from TreeCap import Explicit, SphericallySymmetric, Tree, build_tree


def make_path(k: int) -> Tree:
    """ A geodesic of k edges ending in a true leaf. """
    adjacency = {str(i): [str(i + 1)] for i in range(k - 1)}
    adjacency[str(k - 1)] = []
    return build_tree(Explicit(adjacency, root="0"))


def make_random_tree(rng: random.Random, max_edges: int = 100, max_children: int = 3,
                     branching: bool = False) -> Tree:
    """ Random tree grown breadth-first, so ids come out in breadth-first order.
    With `branching` every non-leaf edge has at least two children. """
    children = [[]]
    frontier = deque([0])
    n = 1
    while frontier:
        a = frontier.popleft()
        if a == 0:
            k = rng.randint(2, max_children)
        elif rng.random() < 0.35:
            k = 0
        else:
            k = rng.randint(2 if branching else 1, max_children)
        if n + k > max_edges:
            k = 0
        kids = list(range(n, n + k))
        n += k
        children[a] = kids
        children.extend([] for _ in kids)
        frontier.extend(kids)
    return Tree(children)


def random_leaf_set(rng: random.Random, tree: Tree):
    leaves = tree.true_leaves()
    return sorted(rng.sample(leaves, rng.randint(1, len(leaves))))


@pytest.fixture
def binary2() -> Tree:
    """ The root edge with two leaf children. """
    return build_tree(Explicit({"w": ["a", "b"]}))


@pytest.fixture
def binary3() -> Tree:
    """ Root, two children, four leaves (7 edges). """
    return build_tree(SphericallySymmetric((2, 2)))


@pytest.fixture
def single_edge() -> Tree:
    return make_path(1)


@pytest.fixture
def path_tree():
    return make_path


@pytest.fixture
def random_tree():
    return make_random_tree


@pytest.fixture
def leaf_subset():
    return random_leaf_set
