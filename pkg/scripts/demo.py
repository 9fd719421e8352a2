#!/usr/bin/env python3
"""End-to-end walk-through: build a tree, type cliques, solve, kernelize."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hellyarc.cliquetype import classify
from hellyarc.generators import from_total_ordering, prime_blobs, rigid_four
from hellyarc.helly import decide_helly_graph
from hellyarc.kernel import kernelize
from hellyarc.pqmtree import build_pqm_tree
from hellyarc.solver import HellyInstance, solve
from hellyarc.words import word_from_text


def show(name, inst):
    print(f"== {name} ==")
    tree = build_pqm_tree(inst.word, inst.graph)
    print(f"  n = {inst.graph.n}, root = {tree.root_case}, "
          f"CA-modules = {[m.name for m in tree.camodules]}")
    print(f"  graph Helly status: {decide_helly_graph(tree).label}")
    for C in inst.cliques:
        print(f"  clique {sorted(C)}: {classify(tree, C)[0].value}")
    res = solve(inst, tree)
    if res.yes:
        print(f"  solve: YES, witness {res.witness}")
        print(f"  letter gaps: {res.placements}")
    else:
        print(f"  solve: NO ({res.reason})")
    kr = kernelize(inst, tree)
    if kr.rejected:
        print("  kernel: rejected (certified NO)")
    else:
        print(f"  kernel: n {inst.graph.n} -> {kr.instance.graph.n}"
              f" (reduced: {kr.reduced})")
    print()


def main():
    tri = word_from_text("a^0 b^1 c^0 a^1 b^0 c^1")
    show("triangle", HellyInstance(tri, [frozenset("abc")]))
    r4 = rigid_four()
    show("rigid four", HellyInstance(r4.word, r4.cliques))
    to_yes = from_total_ordering([1, 2, 3], [(1, 2, 3)])
    show("betweenness YES", HellyInstance(to_yes.word, to_yes.cliques))
    to_no = from_total_ordering([1, 2, 3], [(1, 2, 3), (2, 1, 3), (1, 3, 2)])
    show("betweenness NO", HellyInstance(to_no.word, to_no.cliques))
    pb = prime_blobs(9, 2)
    show("prime ring with private cliques", HellyInstance(pb.word, pb.cliques))


if __name__ == "__main__":
    main()
