"""Command-line surface.

Exit codes: 0 = ok / YES, 1 = NO, 2 = invalid input.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

from . import generators, instances, kernel, oracle
from .cliquetype import classify
from .graphs import NotConformalError
from .pqmtree import EnumerationTooLarge, build_pqm_tree
from .solver import HellyInstance, InvalidCliqueError, solve


def _load(path):
    try:
        with open(path) as fh:
            return instances.parse_instance(fh.read())
    except OSError as e:
        raise SystemExit(f"cannot read {path}: {e}") from None


def _tree_for(inst):
    G = inst.graph
    for C in inst.cliques:
        if not G.is_clique(sorted(C)):
            raise InvalidCliqueError(f"not a clique: {sorted(C)}")
    return build_pqm_tree(inst.word, G)


def cmd_tree(args) -> int:
    inst = _load(args.instance)
    tree = _tree_for(inst)
    print(tree.to_dot() if args.dot else tree.to_json())
    return 0


def cmd_clique_type(args) -> int:
    inst = _load(args.instance)
    tree = _tree_for(inst)
    for C in inst.cliques:
        ctype, _ = classify(tree, C)
        print(f"{' '.join(sorted(C))}: {ctype.value}")
    return 0


def cmd_helly_solve(args) -> int:
    inst = _load(args.instance)
    tree = _tree_for(inst)
    if args.jobs > 1:
        # candidate evaluation is pure; fan the single call out anyway so the
        # flag has a consistent meaning on every platform
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            result = pool.submit(solve, inst, tree).result()
    else:
        result = solve(inst, tree)
    if result.yes:
        print("YES")
        if args.witness:
            with open(args.witness, "w") as fh:
                fh.write(
                    instances.write_witness(
                        result.witness, inst.cliques, result.placements
                    )
                )
        return 0
    print(f"NO ({result.reason})")
    return 1


def cmd_kernelize(args) -> int:
    inst = _load(args.instance)
    tree = _tree_for(inst)
    kr = kernel.kernelize(inst, tree)
    if kr.rejected:
        print("NO (rejected during block computation)")
        return 1
    with open(args.output, "w") as fh:
        fh.write(instances.write_instance(kr.instance))
    nr = len(kr.important.R) if kr.important else 0
    print(f"|R| = {nr}")
    print(f"|V(G*)| = {kr.instance.graph.n}")
    print(f"reduced = {'yes' if kr.reduced else 'no'}")
    return 0


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    G = inst.graph
    for C in inst.cliques:
        if not G.is_clique(sorted(C)):
            raise InvalidCliqueError(f"not a clique: {sorted(C)}")
    models = oracle.enumerate_by_filter(G, cap=args.cap)
    if args.mode == "models":
        canon = sorted(
            " ".join(str(t) for t in w.canonical()) for w in models
        )
        for line in canon:
            print(line)
        print(f"# {len(models)} models")
        return 0
    if args.mode == "type":
        for C in inst.cliques:
            print(f"{' '.join(sorted(C))}: {oracle.oracle_clique_type(G, sorted(C), models)}")
        return 0
    ok = oracle.oracle_helly_cliques(G, [sorted(C) for C in inst.cliques], models)
    print("YES" if ok else "NO")
    return 0 if ok else 1


def cmd_gen(args) -> int:
    if args.family == "total-ordering":
        universe = list(range(1, args.universe + 1))
        triples = []
        for t in args.triple or []:
            parts = [int(x) for x in t.split(",")]
            if len(parts) != 3:
                raise SystemExit(f"bad triple {t!r}: need x,y,z")
            triples.append(tuple(parts))
        inst = generators.from_total_ordering(universe, triples)
    elif args.family == "matching":
        word = generators.matching_complement(args.n)
        inst = HellyInstance(word, [])
    elif args.family == "random":
        word = generators.random_model(args.n, args.seed)
        inst = HellyInstance(word, [])
    else:
        raise SystemExit(f"unknown family {args.family!r}")
    text = instances.write_instance(inst)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hellyarc",
        description="circular-arc Helly toolkit: PQM-trees, clique typing, "
        "the Helly-cliques solver, and kernelization",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="print the PQM-tree of the instance model")
    p.add_argument("instance")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("clique-type", help="classify each clique line")
    p.add_argument("instance")
    p.set_defaults(func=cmd_clique_type)

    p = sub.add_parser("helly-solve", help="decide the Helly-cliques problem")
    p.add_argument("instance")
    p.add_argument("--witness", metavar="FILE")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_helly_solve)

    p = sub.add_parser("kernelize", help="emit an equivalent O(k^6) instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["models", "type", "solve"], default="solve")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write generated instance files")
    p.add_argument("family", choices=["total-ordering", "matching", "random"])
    p.add_argument("--universe", type=int, default=3)
    p.add_argument("--triple", action="append", metavar="X,Y,Z")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        instances.InstanceFormatError,
        NotConformalError,
        InvalidCliqueError,
        EnumerationTooLarge,
        oracle.OracleCapExceeded,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
