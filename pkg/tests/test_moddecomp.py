import random

import pytest

from hellyarc.moddecomp import (
    MDNode,
    OrientationError,
    brute_force_strong_modules,
    decompose,
    orientations_from_model,
    permutation_model_from_orientations,
    prime_orientation,
    quotient_adjacency,
    transitive_orientations,
)


def adj_of(vs, edges):
    adj = {v: set() for v in vs}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def test_triangle_serial():
    t = decompose({"a", "b", "c"}, adj_of("abc", [("a", "b"), ("b", "c"), ("a", "c")]))
    assert t.kind == "serial"
    assert [c.kind for c in t.children] == ["leaf"] * 3


def test_p4_prime():
    adj = adj_of("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    t = decompose(set("abcd"), adj)
    assert t.kind == "prime"
    assert len(t.children) == 4


def test_edgeless_parallel():
    t = decompose({"a", "b", "c"}, adj_of("abc", []))
    assert t.kind == "parallel"


def test_brute_force_agreement():
    rng = random.Random(1)
    for _ in range(150):
        n = rng.randint(1, 8)
        vs = [chr(97 + i) for i in range(n)]
        edges = [
            (vs[i], vs[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.5
        ]
        adj = adj_of(vs, edges)
        tree = decompose(set(vs), adj)
        got = {node.verts for node in tree.all_nodes()}
        assert got == brute_force_strong_modules(vs, adj)


def test_nested_or_disjoint():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(2, 8)
        vs = [chr(97 + i) for i in range(n)]
        edges = [
            (vs[i], vs[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.4
        ]
        tree = decompose(set(vs), adj_of(vs, edges))
        nodes = [node.verts for node in tree.all_nodes()]
        for a in nodes:
            for b in nodes:
                assert a <= b or b <= a or not (a & b)


def test_prime_orientations():
    adj = adj_of("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    t = decompose(set("abcd"), adj)
    q = quotient_adjacency([c.verts for c in t.children], adj)
    oris = list(transitive_orientations("prime", 4, q))
    assert len(oris) == 2
    assert oris[1] == frozenset((b, a) for a, b in oris[0])


def test_serial_orientation_count():
    assert len(list(transitive_orientations("serial", 3))) == 6
    assert list(transitive_orientations("parallel", 3)) == [frozenset()]


def test_c5_not_comparability():
    # an odd hole has no transitive orientation
    adj = adj_of(
        "abcde",
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")],
    )
    q = quotient_adjacency([frozenset(v) for v in "abcde"], adj)
    with pytest.raises(OrientationError):
        prime_orientation(q)


def test_permutation_model_examples():
    t0, t1 = permutation_model_from_orientations(["x", "y"], {("x", "y")}, set())
    assert t0 == ("x", "y") and t1 == ("x", "y")
    t0, t1 = permutation_model_from_orientations(["x", "y"], set(), {("x", "y")})
    assert t0 == ("x", "y") and t1 == ("y", "x")


def test_round_trip_random_models():
    rng = random.Random(7)
    for _ in range(100):
        vs = [chr(97 + i) for i in range(5)]
        t0 = vs[:]
        t1 = vs[:]
        rng.shuffle(t0)
        rng.shuffle(t1)
        prec, less = orientations_from_model(t0, t1)
        a0, a1 = permutation_model_from_orientations(sorted(vs), prec, less)
        assert orientations_from_model(a0, a1) == (prec, less)


def test_invalid_pair_rejected():
    with pytest.raises(ValueError):
        permutation_model_from_orientations(
            ["x", "y", "z"], {("x", "y")}, set()
        )
