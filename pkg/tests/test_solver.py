import itertools
import random

import pytest

from hellyarc.generators import (
    from_total_ordering,
    prime_blobs,
    rigid_four,
    staircase,
)
from hellyarc.graphs import clique_helly_in_word, gaps_left_of_all, graph_from_model
from hellyarc.oracle import oracle_helly_cliques
from hellyarc.pqmtree import build_pqm_tree
from hellyarc.solver import (
    HellyInstance,
    InvalidCliqueError,
    admissible_model_for_sides,
    solve,
)
from hellyarc.words import word_from_text


def check_witness(inst, result):
    assert result.yes
    G = inst.graph
    for i, C in enumerate(inst.cliques):
        gaps = gaps_left_of_all(result.witness, sorted(C))
        assert result.placements[i] in gaps


def test_empty_clique_set():
    w = word_from_text("a^0 b^1 c^0 a^1 b^0 c^1")
    r = solve(HellyInstance(w, []))
    assert r.yes and r.placements == {}


def test_triangle_yes():
    w = word_from_text("a^0 b^1 c^0 a^1 b^0 c^1")
    inst = HellyInstance(w, [frozenset("abc")])
    r = solve(inst)
    check_witness(inst, r)


def test_rigid_four_no():
    inst = rigid_four()
    r = solve(HellyInstance(inst.word, inst.cliques))
    assert not r.yes
    assert "always-non-Helly" in r.reason


def test_invalid_clique():
    w = word_from_text("a^0 a^1 b^0 b^1")
    with pytest.raises(InvalidCliqueError):
        solve(HellyInstance(w, [frozenset("ab")]))
    with pytest.raises(InvalidCliqueError):
        solve(HellyInstance(w, [frozenset()]))


def test_betweenness_small():
    yes = from_total_ordering([1, 2, 3], [(1, 2, 3)])
    r = solve(HellyInstance(yes.word, yes.cliques))
    check_witness(HellyInstance(yes.word, yes.cliques), r)
    no = from_total_ordering([1, 2, 3], [(1, 2, 3), (2, 1, 3), (1, 3, 2)])
    assert not solve(HellyInstance(no.word, no.cliques)).yes


def test_prime_blobs_yes():
    inst = prime_blobs(9, 3)
    r = solve(HellyInstance(inst.word, inst.cliques))
    check_witness(HellyInstance(inst.word, inst.cliques), r)


def test_solver_matches_oracle_small(small_suite):
    rng = random.Random(5)
    checked = 0
    for case in small_suite:
        pool = case.all_cliques(5)
        rng.shuffle(pool)
        for k in (1, 2, 3):
            for _ in range(2):
                if len(pool) < k:
                    continue
                cl = rng.sample(pool, k)
                want = oracle_helly_cliques(case.graph, [sorted(c) for c in cl], case.models)
                inst = HellyInstance(case.word, cl)
                got = solve(inst)
                assert got.yes == want, (str(case.word), [sorted(c) for c in cl])
                if got.yes:
                    check_witness(inst, got)
                checked += 1
    assert checked >= 150


def test_solver_matches_oracle_midsize(midsize_suite):
    rng = random.Random(6)
    for case in midsize_suite:
        pool = case.all_cliques(5)
        rng.shuffle(pool)
        for k in (1, 2, 3, 4):
            if len(pool) < k:
                continue
            cl = rng.sample(pool, k)
            want = any(
                all(clique_helly_in_word(m, case.graph, sorted(c)) for c in cl)
                for m in case.models
            )
            inst = HellyInstance(case.word, cl)
            got = solve(inst)
            assert got.yes == want, (str(case.word), [sorted(c) for c in cl])
            if got.yes:
                check_witness(inst, got)


def test_monotone_in_cliques(small_suite):
    # adding a clique never flips NO into YES
    rng = random.Random(9)
    for case in small_suite[:15]:
        pool = case.all_cliques(4)
        if len(pool) < 3:
            continue
        cl = rng.sample(pool, 3)
        r3 = solve(HellyInstance(case.word, cl))
        r2 = solve(HellyInstance(case.word, cl[:2]))
        if not r2.yes:
            assert not r3.yes


def test_adm_empty_private_set():
    inst = prime_blobs(6, 1)
    tree = build_pqm_tree(inst.word, inst.graph)
    m = tree.camodules[0]
    res = admissible_model_for_sides(tree, m, [], [])
    assert res is not None
    choice, (w0, w1) = res
    assert [t.name for t in w0] == [t.name for t in m.slot0]


def test_adm_orders_letters():
    # the two cliques of a betweenness triple can only sit on opposite
    # sides of their module; one-sided sequences are rejected
    inst = from_total_ordering([1, 2, 3], [(1, 2, 3)])
    tree = build_pqm_tree(inst.word, inst.graph)
    (module,) = [m for m in tree.camodules if "u0" in m.verts]
    c1, c2 = inst.cliques
    assert admissible_model_for_sides(tree, module, [c1, c2], []) is None
    assert admissible_model_for_sides(tree, module, [c2, c1], []) is None
    split = admissible_model_for_sides(tree, module, [c1], [c2])
    assert split is not None
    choice, (w0, w1) = split
    assert [t.name for t in w0 if t.kind is None] == ["_s0_0"]
    assert [t.name for t in w1 if t.kind is None] == ["_s1_0"]


def test_oracle_witness_satisfies_formula(small_suite):
    """Any model found independently by the oracle induces a satisfying
    assignment of the layout formula built for its clique arrangement."""
    from hellyarc.cliquetype import CliqueType, classify
    from hellyarc.solver import serial_layout_formula

    checked = 0
    for case in small_suite:
        if case.tree.root_case != "serial" or len(case.tree.camodules) < 2:
            continue
        ambiguous = [
            C for C in case.all_cliques(4)
            if classify(case.tree, C)[0] is CliqueType.AMBIGUOUS
        ][:2]
        if not ambiguous:
            continue
        cliques = ambiguous
        tree = case.tree
        analyses = [classify(tree, C)[1] for C in cliques]
        owner_of = [an.module for an in analyses]
        priv = {}
        for i, mn in enumerate(owner_of):
            if mn is not None:
                priv.setdefault(mn, []).append(i)
        meets = {}
        for i, C in enumerate(cliques):
            for mn in {tree.module_of_vertex[v] for v in C}:
                meets.setdefault(mn, []).append(i)

        def orientation_in(mn, i):
            m = tree.module_by_name[mn]
            return next(iter({m.orientation(v) for v in cliques[i] if v in m.verts}))

        from hellyarc.solver import admissible_model_for_sides

        def adm(mn, a_seq, b_seq):
            return admissible_model_for_sides(
                tree, tree.module_by_name[mn],
                [cliques[i] for i in a_seq], [cliques[i] for i in b_seq],
            )

        for w in case.models:
            placements = []
            ok = True
            for C in cliques:
                gaps = tree.extend_with_cliques(w, [C])[0]
                if not gaps:
                    ok = False
                    break
                placements.append(gaps[0])
            if not ok or len(set(placements)) != len(placements):
                continue
            # stabilizer right before the first module's two slot runs
            n = len(w)
            m0 = tree.camodules[0]
            run0 = w.runs(set(m0.slot0))[0]
            run1 = w.runs(set(m0.slot1))[0]
            s0_gap = (run0[0] - 1) % n
            s1_gap = (run1[0] - 1) % n
            if s0_gap in placements or s1_gap in placements:
                continue

            def side_of(g):
                return "A" if 0 < (g - s0_gap) % n < (s1_gap - s0_gap) % n else "B"

            order = sorted(range(len(cliques)), key=lambda i: (placements[i] - s0_gap) % n)
            a_side = [i for i in order if side_of(placements[i]) == "A"]
            b_side = [i for i in order if side_of(placements[i]) == "B"]
            layout = serial_layout_formula(
                tree, cliques, a_side, b_side, owner_of, priv, meets,
                orientation_in, adm,
            )
            assert layout is not None, (str(case.word), str(w))
            alpha = {}
            for m in tree.camodules:
                start = w.runs(set(m.slot0))[0][0]
                gap_before = (start - 1) % n
                alpha[m.name] = side_of(gap_before) == "A" or gap_before == s0_gap
            assert layout.formula.satisfied_by(alpha), (str(case.word), str(w))
            checked += 1
            if checked >= 40:
                return
    assert checked >= 5


def test_scaling_prime():
    import time

    inst = prime_blobs(182, 6)
    hi = HellyInstance(inst.word, inst.cliques)
    assert hi.graph.n == 200
    t0 = time.time()
    r = solve(hi)
    took = time.time() - t0
    assert r.yes and took < 10


def test_scaling_serial():
    import time

    to = from_total_ordering(list(range(1, 49)), [(1, 2, 3), (4, 5, 6)])
    cl = list(to.cliques) + [frozenset({"v6", "u7", "u8"})]
    hi = HellyInstance(to.word, cl)
    assert 95 <= hi.graph.n <= 105 and len(cl) == 5
    t0 = time.time()
    r = solve(hi)
    took = time.time() - t0
    assert r.yes and took < 60
