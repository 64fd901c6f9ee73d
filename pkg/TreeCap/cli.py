"""
Command line interface: `treecap <command> [options]`

Every command writes one JSON document (or a plain listing with
--format human). Exit codes: 0 success, 1 a verification that computed a
negative verdict, 2 anything that could not be computed.
"""

import sys
import json
import logging
import argparse
from typing import Callable, Dict, List, Optional, Tuple

from .Config import Config, TAIL_CHOICES, make_config_from_args
from .Tree import Explicit, Homogeneous, Tree, TreeSpec, build_tree
from .capacity import (
    capacity_recursive,
    capacity_of_set,
    capacity_of_spec,
    homogeneous_capacity,
    oracle_capacity,
    symmetric_capacity,
    tail_bounds,
    total_resistance,
)
from .characterization import verify_equilibrium
from .tiling import build_tiling, emit_svg, validate_tiling
from .constructions import compact_set_of_capacity, subdyadic_tree_of_capacity
from .misc import dumps_human, dumps_json, load_leaf_set, load_measure, load_tree, write_output
from .exceptions import TreeCapError

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """ argparse, but usage errors are raised instead of printed with the
    usage text, so that they end up as a single diagnostic line. """

    def error(self, message):
        raise UsageError(message)


def _common_options(sentinel: object) -> argparse.ArgumentParser:
    parser = ArgumentParser(add_help=False)
    parser.add_argument("--p", type=float, default=sentinel, help="exponent p > 1 (default 2)")
    parser.add_argument("--tol", type=float, default=sentinel, help="tolerance (default 1e-9)")
    parser.add_argument("--depth", type=int, default=sentinel, help="truncation depth of infinite trees (default 24)")
    parser.add_argument("--threads", type=int, default=sentinel, help="worker threads (default $TREECAP_THREADS or 1)")
    parser.add_argument("--max-edges", dest="max_edges", type=int, default=sentinel)
    parser.add_argument("--log-level", dest="log_level", default=sentinel)
    parser.add_argument("--format", choices=("json", "human"), default=sentinel)
    parser.add_argument("--out", default=None, help="write the result here instead of stdout")
    return parser


def _tree_options(parser: argparse.ArgumentParser, sentinel: object, tail: bool = True):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--tree", help="tree JSON file")
    source.add_argument("--spec", type=TreeSpec.parse, help="e.g. homogeneous:2, spherical:3,2,2:2, subdyadic:2,1,1")
    if tail:
        parser.add_argument("--tail", choices=TAIL_CHOICES, default=sentinel, help="tail values (default interval)")


def build_parser(sentinel: object) -> argparse.ArgumentParser:
    common = _common_options(sentinel)
    parser = ArgumentParser(prog="treecap", description="p-capacities and equilibrium measures on rooted trees")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    sub = commands.add_parser("tree", parents=[common], help="build a tree from a spec")
    sub.add_argument("--spec", type=TreeSpec.parse, required=True)

    for name, text in (("capacity", "capacity of the boundary or of a leaf set"),
                       ("equilibrium", "capacity with the equilibrium measure and tent capacities")):
        sub = commands.add_parser(name, parents=[common], help=text)
        _tree_options(sub, sentinel)
        sub.add_argument("--set", dest="leaf_set", help="leaf set JSON file")

    sub = commands.add_parser("verify", parents=[common], help="check the characterization for a measure")
    sub.add_argument("--tree", required=True)
    sub.add_argument("--measure", required=True)

    sub = commands.add_parser("tile", parents=[common], help="square tiling of a p=2 equilibrium measure")
    _tree_options(sub, sentinel)
    sub.add_argument("--measure")
    sub.add_argument("--set", dest="leaf_set")
    sub.add_argument("--svg")
    sub.add_argument("--scale", type=float, default=sentinel)
    sub.add_argument("--stroke", type=float, default=sentinel)
    sub.add_argument("--labels", action="store_true")

    sub = commands.add_parser("symmetric", parents=[common], help="capacity of a spherically symmetric tree")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", type=TreeSpec.parse)
    source.add_argument("--degrees", type=_int_list)
    source.add_argument("--n", type=int)
    sub.add_argument("--eventual-min", dest="eventual_min", type=int)

    sub = commands.add_parser("resistance", parents=[common], help="total resistance and c_2 = 1/(1+R)")
    _tree_options(sub, sentinel)

    sub = commands.add_parser("construct-set", parents=[common], help="leaf set of prescribed capacity")
    sub.add_argument("--n", type=int, default=2)
    sub.add_argument("--t", type=float, required=True)

    sub = commands.add_parser("construct-tree", parents=[common], help="subdyadic tree of prescribed capacity")
    sub.add_argument("--c", type=float, required=True)
    sub.add_argument("--digits", type=int, default=30)

    sub = commands.add_parser("oracle", parents=[common], help="capacity by direct minimisation")
    _tree_options(sub, sentinel, tail=False)
    sub.add_argument("--set", dest="leaf_set")
    sub.add_argument("--max-iter", dest="max_iter", type=int, default=sentinel)
    return parser


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _tree(args, config: Config) -> Tree:
    if args.tree is not None:
        return load_tree(args.tree, config.depth, config.max_edges)
    spec = args.spec
    return build_tree(spec, config.depth if spec.infinite else None, max_edges=config.max_edges)


def _tail_policy(args, config: Config, tree: Tree):
    """ For trees built from a symmetric spec, "interval" uses the certified
    tail capacities of the TreeSpec. """
    spec = getattr(args, "spec", None)
    if config.tail == "interval" and spec is not None and not isinstance(spec, Explicit) and tree.tails():
        return tail_bounds(spec, tree, config.p)
    return config.tail


# --- commands -----------------------------------------------------------------------


def _cmd_tree(args, config: Config) -> Tuple[dict, int]:
    return build_tree(args.spec, config.depth if args.spec.infinite else None, max_edges=config.max_edges).to_json(), 0


def _capacity(args, config: Config, details: bool) -> Tuple[dict, int]:
    if args.spec is not None and args.leaf_set is None and not isinstance(args.spec, Explicit):
        return capacity_of_spec(args.spec, config.p, config.depth, config.tail).to_json(details), 0
    tree = _tree(args, config)
    if args.leaf_set is not None:
        result = capacity_of_set(tree, load_leaf_set(tree, args.leaf_set), config.p)
    else:
        result = capacity_recursive(tree, config.p, _tail_policy(args, config, tree), threads=config.threads)
    return result.to_json(tree, details), 0


def _cmd_capacity(args, config: Config) -> Tuple[dict, int]:
    return _capacity(args, config, details=False)


def _cmd_equilibrium(args, config: Config) -> Tuple[dict, int]:
    return _capacity(args, config, details=True)


def _cmd_verify(args, config: Config) -> Tuple[dict, int]:
    tree = load_tree(args.tree, config.depth, config.max_edges)
    report = verify_equilibrium(tree, load_measure(tree, args.measure), config.p, config.tol)
    return report.to_json(), 0 if report.is_equilibrium else 1


def _cmd_tile(args, config: Config) -> Tuple[dict, int]:
    """ Tilings are drawn for the finite truncation: unless --tail 0 is given,
    cut edges count as leaves (tail value 1). """
    tree = _tree(args, config)
    if args.measure is not None:
        source = load_measure(tree, args.measure)
    elif args.leaf_set is not None:
        source = capacity_of_set(tree, load_leaf_set(tree, args.leaf_set), config.p)
    else:
        tail = "0" if config.tail == "0" else "1"
        if tree.tails() and config.tail == "interval":
            logger.debug("tiling the depth %d truncation with tail value 1", tree.depth)
        source = capacity_recursive(tree, config.p, tail, threads=config.threads)
    tiling = build_tiling(tree, source, config.tol)
    data = tiling.to_json(tree)
    data["validation"] = validate_tiling(tiling, tree, config.tol).to_json(tree)
    if args.svg:
        emit_svg(tiling, args.svg, config.svg_scale, config.svg_stroke, args.labels, tree)
    return data, 0


def _cmd_symmetric(args, config: Config) -> Tuple[dict, int]:
    if args.n is not None:
        deg = Homogeneous(args.n)
    elif args.spec is not None:
        deg = args.spec
    else:
        deg = args.degrees
    interval = symmetric_capacity(deg, config.p, config.depth, args.eventual_min)
    data = {"p": config.p, "capacity": interval.to_json()}
    if isinstance(deg, Homogeneous):
        data["closed_form"] = homogeneous_capacity(deg.n, config.p)
    return data, 0


def _cmd_resistance(args, config: Config) -> Tuple[dict, int]:
    tree = _tree(args, config)
    policy = _tail_policy(args, config, tree)
    resistance = total_resistance(tree, policy)
    recursion = capacity_recursive(tree, 2.0, policy, threads=config.threads)
    data = resistance.to_json()
    data["recursion"] = recursion.capacity.to_json()
    data["identity_residual"] = resistance.identity_residual(recursion.c_of_alpha)
    return data, 0


def _cmd_construct_set(args, config: Config, sentinel: object) -> Tuple[dict, int]:
    tol = 1e-3 if args.tol is sentinel else args.tol
    depth = 16 if args.depth is sentinel else args.depth
    return compact_set_of_capacity(args.n, config.p, args.t, tol, depth).to_json(), 0


def _cmd_construct_tree(args, config: Config) -> Tuple[dict, int]:
    made = subdyadic_tree_of_capacity(args.c, config.p, args.digits)
    return {
        "spec": made.spec.to_json(),
        "capacity": made.capacity.to_json(),
        "digits": list(made.digits.digits),
    }, 0


def _cmd_oracle(args, config: Config, sentinel: object) -> Tuple[dict, int]:
    tree = _tree(args, config)
    E = load_leaf_set(tree, args.leaf_set) if args.leaf_set is not None else tree.true_leaves()
    tol = config.oracle_tol if args.tol is sentinel else args.tol
    return oracle_capacity(tree, E, config.p, tol, config.oracle_max_iter).to_json(tree), 0


_COMMANDS: Dict[str, Callable] = {
    "tree": _cmd_tree,
    "capacity": _cmd_capacity,
    "equilibrium": _cmd_equilibrium,
    "verify": _cmd_verify,
    "tile": _cmd_tile,
    "symmetric": _cmd_symmetric,
    "resistance": _cmd_resistance,
    "construct-set": _cmd_construct_set,
    "construct-tree": _cmd_construct_tree,
    "oracle": _cmd_oracle,
}
_NEEDS_SENTINEL = ("construct-set", "oracle")


def _attach_handler():
    logger = logging.getLogger("TreeCap")
    if not any(getattr(h, "_treecap", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._treecap = True
        logger.addHandler(handler)


def run(argv: List[str]) -> int:
    sentinel = object()
    try:
        args = build_parser(sentinel).parse_args(argv)
        config = make_config_from_args(args, sentinel)
        config.apply_logging()
        _attach_handler()

        command = _COMMANDS[args.command]
        if args.command in _NEEDS_SENTINEL:
            data, code = command(args, config, sentinel)
        else:
            data, code = command(args, config)

        text = dumps_human(data) if config.output_format == "human" else dumps_json(data)
        write_output(text, args.out)
        return code
    except UsageError as exc:
        print(f"treecap: error: {exc}", file=sys.stderr)
    except (TreeCapError, OSError, json.JSONDecodeError) as exc:
        print(f"treecap: error: {exc}".splitlines()[0], file=sys.stderr)
    return 2


def main(argv: Optional[List[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
