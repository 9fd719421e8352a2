#!/usr/bin/env python3
"""Scaling smoke runs: a prime-root instance with n=200, k=6 and a
serial-root instance with n~100, k=5 (consistency check for the 2^k and
2^(k log k) shapes, not a benchmark claim)."""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hellyarc.generators import from_total_ordering, prime_blobs
from hellyarc.solver import HellyInstance, solve


def run(name, inst):
    t0 = time.time()
    res = solve(inst)
    took = time.time() - t0
    print(f"{name}: n={inst.graph.n} k={len(inst.cliques)} -> "
          f"{'YES' if res.yes else 'NO'} in {took:.2f}s")


def main():
    pb = prime_blobs(182, 6)
    run("prime  ring", HellyInstance(pb.word, pb.cliques))
    to = from_total_ordering(list(range(1, 49)), [(1, 2, 3), (4, 5, 6)])
    cliques = list(to.cliques) + [frozenset({"v6", "u7", "u8"})]
    run("serial pairs", HellyInstance(to.word, cliques))


if __name__ == "__main__":
    main()
