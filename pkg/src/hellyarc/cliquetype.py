"""Clique typing: always-Helly / always-non-Helly / ambiguous.

The pipeline cleans the clique, dispatches public cliques by the root
shape, and classifies private cliques through their owner path: the
deepest owner, the intermediate owners, and the component node each
either bind the clique's letter into one slot of its CA-module or admit
an ordering that separates the clique's chords for good.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .graphs import Rel, classify_pair
from .helly import is_rigid_non_helly
from .pqmtree import MNode, PqmTree
from .words import Token


class CliqueType(Enum):
    ALWAYS_HELLY = "always-helly"
    ALWAYS_NON_HELLY = "always-non-helly"
    AMBIGUOUS = "ambiguous"


@dataclass
class AffectingNode:
    """One node that can bind the clique into a slot of its CA-module."""

    kind: str                   # 'D' | 'M' | 'Q'
    node: object                # MNode, or the QNode id for kind 'Q'
    node_kind: str              # serial | prime
    lset: tuple                 # ids of children carrying tail-oriented members
    rset: tuple
    kchild: Optional[str] = None    # owner child id (kind 'M' only)
    has_non_helly_ordering: bool = False


@dataclass
class CliqueAnalysis:
    clique: frozenset
    cleaned: frozenset
    multi_component: bool = False
    rigid: bool = False
    public: bool = False
    owners: List[MNode] = field(default_factory=list)
    module: Optional[str] = None        # lowest owner: the CA-module name
    deepest: Optional[MNode] = None
    incomparable_owners: bool = False
    parallel_pair_obstruction: bool = False
    affecting: List[AffectingNode] = field(default_factory=list)
    modules_met: int = 0


def clean_clique(tree: PqmTree, clique) -> frozenset:
    """Drop every vertex that properly contains another clique member."""
    cur = set(clique)
    G = tree.graph
    changed = True
    while changed:
        changed = False
        for v in sorted(cur):
            for u in sorted(cur):
                if u != v and classify_pair(G, v, u) is Rel.CONTAINS:
                    cur.discard(v)
                    changed = True
                    break
            if changed:
                break
    return frozenset(cur)


def _orientation_of_members(tree: PqmTree, node_verts, clique) -> set:
    mname = tree.module_of_vertex[min(node_verts)]
    m = tree.module_by_name[mname]
    return {m.orientation(v) for v in clique if v in node_verts}


def _owner_nodes(tree: PqmTree, clique) -> List[MNode]:
    out = []
    for m in tree.camodules:
        members = [v for v in clique if v in m.verts]
        if len(members) < 2:
            continue
        for node in m.mtree.all_nodes():
            if node.kind == "leaf":
                continue
            if len({m.orientation(v) for v in members if v in node.verts}) == 2:
                out.append(node)
        # the module root may be a leaf (singleton module): never an owner
        if m.mtree.kind == "leaf":
            continue
    return out


def _children_of(tree: PqmTree, owner) -> List[Tuple[str, frozenset]]:
    """(child id, child vertex set) pairs; for the Q level the children are
    the CA-modules of the clique's component."""
    if isinstance(owner, MNode):
        return [(min(c.verts), c.verts) for c in owner.children]
    qid = owner
    q = tree.qnodes[qid]
    return [(mn, tree.module_by_name[mn].verts) for mn in sorted(q.modules)]


def classify(tree: PqmTree, clique) -> Tuple[CliqueType, CliqueAnalysis]:
    clique = frozenset(clique)
    if not clique:
        raise ValueError("empty clique")
    if not tree.graph.is_clique(sorted(clique)):
        raise ValueError(f"not a clique: {sorted(clique)}")
    analysis = CliqueAnalysis(clique, clique)
    if len(clique) <= 2:
        return CliqueType.ALWAYS_HELLY, analysis

    cleaned = clean_clique(tree, clique)
    analysis.cleaned = cleaned
    if len(cleaned) <= 2:
        return CliqueType.ALWAYS_HELLY, analysis

    qids = {tree.qnode_of_module[tree.module_of_vertex[v]] for v in cleaned}
    if len(qids) > 1:
        analysis.multi_component = True
        return CliqueType.ALWAYS_HELLY, analysis
    (qid,) = qids

    if is_rigid_non_helly(tree, sorted(cleaned)):
        analysis.rigid = True
        return CliqueType.ALWAYS_NON_HELLY, analysis

    owners = _owner_nodes(tree, cleaned)
    analysis.owners = owners
    modules_met = {tree.module_of_vertex[v] for v in cleaned}
    analysis.modules_met = len(modules_met)

    if not owners:
        analysis.public = True
        q = tree.qnodes[qid]
        if not q.serial:
            return CliqueType.ALWAYS_HELLY, analysis
        if len(modules_met) <= 2:
            return CliqueType.ALWAYS_HELLY, analysis
        return CliqueType.AMBIGUOUS, analysis

    # private: owners must form a chain
    owners.sort(key=lambda n: len(n.verts))
    for i in range(len(owners) - 1):
        if not owners[i].verts <= owners[i + 1].verts:
            analysis.incomparable_owners = True
            return CliqueType.ALWAYS_NON_HELLY, analysis
    deepest = owners[0]
    analysis.deepest = deepest
    module = deepest.module
    analysis.module = module

    # non-crossing pair among the members outside an owner kills the clique
    sim = tree.sim()
    outside = sorted(cleaned - deepest.verts)
    for i, c1 in enumerate(outside):
        for c2 in outside[i + 1:]:
            if c2 not in sim[c1]:
                analysis.parallel_pair_obstruction = True
                return CliqueType.ALWAYS_NON_HELLY, analysis

    affecting = affecting_nodes(tree, cleaned, owners, qid)
    analysis.affecting = affecting
    if any(a.has_non_helly_ordering for a in affecting) or len(affecting) >= 2:
        return CliqueType.AMBIGUOUS, analysis
    return CliqueType.ALWAYS_HELLY, analysis


def affecting_nodes(tree: PqmTree, clique, owners, qid) -> List[AffectingNode]:
    """The nodes whose orderings bind the clique, with their L/R child sets
    and whether some ordering makes the clique non-Helly."""
    sim = tree.sim()
    deepest = owners[0]
    out: List[AffectingNode] = []

    def lr_sets(owner, owner_obj):
        els, ers = [], []
        for cid, verts in _children_of(tree, owner_obj):
            members = [v for v in clique if v in verts]
            if not members:
                continue
            # skip any child on the owner path
            if any(o.verts <= verts for o in owners):
                continue
            mname = tree.module_of_vertex[members[0]]
            m = tree.module_by_name[mname]
            orients = {m.orientation(v) for v in members}
            if len(orients) != 1:  # pragma: no cover
                raise AssertionError("child with mixed orientations")
            (o,) = orients
            (els if o == 0 else ers).append(cid)
        return tuple(sorted(els)), tuple(sorted(ers))

    # deepest owner
    L, R = lr_sets(deepest, deepest)
    if not L or not R:  # pragma: no cover
        raise AssertionError("deepest owner must split orientations")
    if deepest.kind == "serial":
        out.append(
            AffectingNode(
                "D", deepest, "serial", L, R,
                has_non_helly_ordering=(len(L) + len(R) >= 3),
            )
        )
    elif deepest.kind == "prime":
        if any(b in sim[a] for a in L for b in R):
            out.append(AffectingNode("D", deepest, "prime", L, R))
    # parallel deepest owner: the choice has no impact on the slot

    # intermediate owners
    for owner in owners[1:]:
        L, R = lr_sets(owner, owner)
        if not L and not R:
            continue
        kchild = next(
            min(c.verts) for c in owner.children
            if any(o.verts <= c.verts for o in owners if o is not owner)
        )
        if owner.kind == "serial":
            out.append(
                AffectingNode(
                    "M", owner, "serial", L, R, kchild,
                    has_non_helly_ordering=(len(L) + len(R) >= 2),
                )
            )
        elif owner.kind == "prime":
            out.append(AffectingNode("M", owner, "prime", L, R, kchild))
        else:  # pragma: no cover
            raise AssertionError("parallel intermediate owner")

    # the component node
    q = tree.qnodes[qid]
    L, R = lr_sets("Q", qid)
    if L or R:
        out.append(
            AffectingNode(
                "Q", qid, "serial" if q.serial else "prime", L, R,
                kchild=owners[-1].module,
                has_non_helly_ordering=(q.serial and len(L) + len(R) >= 2),
            )
        )
    return out


# ---------------------------------------------------------------------------
# binding predicates on concrete orderings

def mnode_ordering_binds(aff: AffectingNode, ordering, j: int) -> bool:
    """Does this (pi0, pi1) ordering of the node bind the clique in S^j?"""
    pi0, pi1 = ordering
    if j == 0:
        rank = {cid: i for i, cid in enumerate(pi0)}
        lmax = max((rank[c] for c in aff.lset), default=-1)
        rmin = min((rank[c] for c in aff.rset), default=len(pi0))
        if aff.kind == "M":
            k = rank[aff.kchild]
            return lmax < k < rmin
        return lmax < rmin
    rank = {cid: i for i, cid in enumerate(pi1)}
    rmax = max((rank[c] for c in aff.rset), default=-1)
    lmin = min((rank[c] for c in aff.lset), default=len(pi1))
    if aff.kind == "M":
        k = rank[aff.kchild]
        return rmax < k < lmin
    return rmax < lmin


def qnode_ordering_binds(tree: PqmTree, aff: AffectingNode, order, j: int) -> bool:
    """Does this circular slot order bind the clique in slot S^j of its
    lowest-owner CA-module?

    The slot letter must sit on the left side of the metachord of every
    L-child (oriented S^0 -> S^1) and of every R-child (reversed).
    """
    mname = aff.kchild
    target = Token(mname, j)
    pos = {t: i for i, t in enumerate(order)}
    n = len(order)
    p = pos[target]

    def inside(p, a, b):
        return 0 < (p - a) % n < (b - a) % n

    for cid in aff.lset:
        a, b = pos[Token(cid, 0)], pos[Token(cid, 1)]
        if not inside(p, a, b):
            return False
    for cid in aff.rset:
        a, b = pos[Token(cid, 1)], pos[Token(cid, 0)]
        if not inside(p, a, b):
            return False
    return True


def binding_orderings(tree: PqmTree, aff: AffectingNode, j: int) -> list:
    """The orderings of the node binding the clique in S^j.

    Prime nodes yield exactly one of their two orderings; serial M-nodes
    are described by constraints, so this materializes only for prime
    nodes and prime Q-nodes (used by the solver and the kernel)."""
    if aff.kind == "Q":
        q = tree.qnodes[aff.node]
        if q.serial:
            raise ValueError("serial Q-node orderings are constraint-based")
        return [
            o for o in tree.qnode_options(q)
            if qnode_ordering_binds(tree, aff, o, j)
        ]
    node: MNode = aff.node
    if node.kind != "prime":
        raise ValueError("serial M-node orderings are constraint-based")
    return [o for o in node.orderings if mnode_ordering_binds(aff, o, j)]


def binds_in_slot(tree: PqmTree, clique, j: int, choice: dict) -> bool:
    """True iff every node affecting the clique binds it in S^j under the
    given per-node ordering choice (the extension criterion)."""
    ctype, analysis = classify(tree, clique)
    if analysis.public or not analysis.affecting:
        return True
    for aff in analysis.affecting:
        if aff.kind == "Q":
            q = tree.qnodes[aff.node]
            order = choice.get(q.node_id, q.default_order)
            if not qnode_ordering_binds(tree, aff, order, j):
                return False
        else:
            node: MNode = aff.node
            ordering = choice.get(node.node_id, node.default_ordering)
            if not mnode_ordering_binds(aff, ordering, j):
                return False
    return True
