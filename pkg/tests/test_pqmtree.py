import itertools
import json

import pytest

from hellyarc.graphs import graph_from_model, is_conformal
from hellyarc.pqmtree import (
    EnumerationTooLarge,
    build_pqm_tree,
    validate_conformal,
)
from hellyarc.graphs import NotConformalError
from hellyarc.words import Token, word_from_text

FIG3 = "a^1 b^1 c^0 d^1 e^0 f^1 h^1 i^0 c^1 b^0 e^1 d^0 a^0 g^0 i^1 h^0 g^1 f^0"


@pytest.fixture(scope="module")
def fig3_tree():
    w = word_from_text(FIG3)
    return build_pqm_tree(w)


def test_fig3_modules_and_slots(fig3_tree):
    t = fig3_tree
    assert t.root_case == "prime"
    mods = {m.name: m for m in t.camodules}
    assert sorted(mods) == ["a", "f", "g", "h"]
    s1 = mods["a"]
    assert sorted(s1.verts) == ["a", "b", "c", "d", "e"]
    assert set(s1.slot0) == {
        Token("a", 0), Token("b", 0), Token("c", 1), Token("d", 0), Token("e", 1)
    }
    assert s1.less == frozenset(
        {("b", "a"), ("c", "a"), ("d", "a"), ("e", "a"), ("c", "b"), ("e", "d")}
    )
    assert mods["h"].less == frozenset({("i", "h")})


def test_fig3_pi(fig3_tree):
    t = fig3_tree
    # pi = S1^1 S2^1 S4^1 S1^0 S3^0 S4^0 S3^1 S2^0 with modules named by
    # their representants a, f, h, g
    assert [str(x) for x in t.pi0] == [
        "a^1", "f^1", "h^1", "a^0", "g^0", "h^0", "g^1", "f^0"
    ]
    (q,) = t.qnodes.values()
    opts = t.qnode_options(q)
    assert len(opts) == 2  # pi and its reflection


def test_fig3_roundtrip_and_reflection(fig3_tree):
    t = fig3_tree
    w = t.generate_model()
    assert w == word_from_text(FIG3)
    (q,) = t.qnodes.values()
    refl_choice = {q.node_id: t.qnode_options(q)[1]}
    for m in t.camodules:
        for node in m.mtree.inner_nodes():
            if node.kind == "prime":
                refl_choice[node.node_id] = node.orderings[
                    1 - node.orderings.index(node.default_ordering)
                ]
            elif node.kind == "serial":
                refl_choice[node.node_id] = tuple(
                    reversed(node.default_ordering[0])
                ), tuple(reversed(node.default_ordering[1]))
    w2 = t.generate_model(refl_choice)
    assert w2 == word_from_text(FIG3).reflect()


def test_triangle_enumeration_matches_filter(small_suite):
    from hellyarc.oracle import enumerate_by_filter

    tri = [c for c in small_suite if str(c.word) == "a^0 b^1 c^0 a^1 b^0 c^1"][0]
    models = set(tri.tree.enumerate_models())
    assert models == set(enumerate_by_filter(tri.graph))
    assert len(models) == 8


def test_single_chord_and_rigid_counts():
    w = word_from_text("a^0 a^1")
    assert len(list(build_pqm_tree(w).enumerate_models())) == 1
    from hellyarc.generators import rigid_four

    inst = rigid_four()
    t = build_pqm_tree(inst.word)
    ms = list(t.enumerate_models())
    assert len(ms) == 2
    keep = {Token(v, j) for v in "abcd" for j in (0, 1)}
    pats = {m.restrict(keep) for m in ms}
    assert word_from_text("a^0 c^1 b^0 d^1 c^0 a^1 d^0 b^1") in pats


def test_enumeration_cap():
    from hellyarc.generators import matching_complement

    w = matching_complement(4)
    t = build_pqm_tree(w)
    with pytest.raises(EnumerationTooLarge):
        list(t.enumerate_models(cap=1))


def test_generated_models_satisfy_properties(small_suite):
    for case in small_suite[:20]:
        t = case.tree
        for w in itertools.islice(t.enumerate_models(cap=10000), 12):
            assert is_conformal(w, case.graph)
            for m in t.camodules:
                # (P1): slots contiguous, spanning a valid permutation model
                assert w.is_contiguous(set(m.slot0))
                assert w.is_contiguous(set(m.slot1))
                # (P2): the non-crossing orientation <_S is preserved
                runs = w.runs(set(m.slot0))
                order0 = [w.tokens[i].name for i in runs[0]]
                rank = {v: i for i, v in enumerate(order0)}
                for (x, y) in m.less:
                    assert rank[x] < rank[y]


def test_roundtrip_rebuild(small_suite):
    for case in small_suite[:12]:
        t = case.tree
        for w in itertools.islice(t.enumerate_models(cap=4000), 6):
            t2 = build_pqm_tree(w, case.graph)
            assert {m.verts for m in t2.camodules} == {
                m.verts for m in t.camodules
            }
            assert {(m.verts, frozenset(m.slot0) if Token(m.name, 0) in set(m.slot0) else None) for m in t2.camodules} == {
                (m.verts, frozenset(m.slot0) if Token(m.name, 0) in set(m.slot0) else None) for m in t.camodules
            }
            assert t2.root_case == t.root_case


def test_extend_with_cliques_triangle():
    w = word_from_text("a^0 b^1 c^0 a^1 b^0 c^1")
    t = build_pqm_tree(w)
    assert t.extend_with_cliques(w, [{"a", "b", "c"}]) == [[]]
    w2 = word_from_text("a^0 b^0 c^0 a^1 b^1 c^1")
    t2 = build_pqm_tree(w2)
    assert t2.extend_with_cliques(w2, [{"a", "b", "c"}]) == [[2]]
    # a singleton clique can sit in any gap interior to its arc
    gaps = t2.extend_with_cliques(w2, [{"a"}])[0]
    assert gaps == [0, 1, 2]


def test_validate_conformal_reports():
    w = word_from_text("a^0 a^1 b^0 b^1")
    G = graph_from_model(word_from_text("a^0 b^0 a^1 b^1"))
    with pytest.raises(NotConformalError):
        validate_conformal(w, G)


def test_json_and_dot(fig3_tree):
    data = json.loads(fig3_tree.to_json())
    assert data["root_case"] == "prime"
    q = data["qnodes"][0]
    assert len(q["pi"]) == 2  # explicit pi and its reflection
    dot = fig3_tree.to_dot()
    assert dot.startswith("graph pqm {") and dot.endswith("}")
    assert dot.count('"') % 2 == 0
