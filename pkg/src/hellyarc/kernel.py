"""Kernelization: blocks and sides of private cliques, importance marking,
and the reduct construction shrinking the graph to O(k^6) size.

Blocks are computed bottom-up over the PQM-tree with a parity union-find:
two cliques bound by a node on the same side must end in the same side of
one block, bound on different sides in different sides; a contradiction
certifies a NO-instance.  Marking keeps O(k) important nodes, O(k^5)
weakly important children (via visited signatures), and O(k^6) vertices;
the reduct then rebuilds, bottom-up, a graph of size at most 12|R| whose
models project onto R exactly like the original's.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .cliquetype import (
    AffectingNode,
    CliqueType,
    classify,
    mnode_ordering_binds,
    qnode_ordering_binds,
)
from .graphs import Graph, graph_from_model
from .pqmtree import CaModule, MNode, PqmTree, build_pqm_tree
from .solver import HellyInstance
from .words import CircularWord, Token


REJECT = "reject"


@dataclass
class BlockState:
    """Final per-node partitions of private cliques into sided blocks."""

    blocks_at: Dict[tuple, frozenset]          # node id -> canonical partition
    introduced_at: Dict[tuple, list]           # node id -> clique indices
    merges_at: Dict[tuple, list]               # node id -> [(ci, cj)]
    priv_at: Dict[tuple, list]                 # node id -> clique indices
    order: List[tuple]                         # bottom-up node ids
    node_of: Dict[tuple, object]               # node id -> MNode | qid


@dataclass
class ImportantSet:
    important_nodes: List[tuple]
    weakly_important: List[Tuple[tuple, str]]  # (serial node id, child id)
    vertices: Set[str]

    @property
    def R(self) -> FrozenSet[str]:
        return frozenset(self.vertices)


class _ParityUF:
    def __init__(self):
        self.parent: Dict[int, int] = {}
        self.par: Dict[int, int] = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.par[x] = 0

    def find(self, x) -> Tuple[int, int]:
        if self.parent[x] == x:
            return x, 0
        root, p = self.find(self.parent[x])
        self.parent[x] = root
        self.par[x] = (self.par[x] + p) % 2
        return root, self.par[x]

    def union(self, a, b, parity) -> Optional[bool]:
        """Returns True if a merge happened, False if consistent already,
        None on contradiction."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return False if (pa + pb) % 2 == parity % 2 else None
        self.parent[rb] = ra
        self.par[rb] = (pa + pb + parity) % 2
        return True

    def snapshot(self, members) -> frozenset:
        groups: Dict[int, List[List[int]]] = {}
        for m in members:
            r, p = self.find(m)
            groups.setdefault(r, [[], []])[p].append(m)
        out = []
        for sides in groups.values():
            out.append(frozenset({frozenset(sides[0]), frozenset(sides[1])}))
        return frozenset(out)


# ---------------------------------------------------------------------------
# per-clique structural data

@dataclass
class _CliqueInfo:
    index: int
    clique: frozenset
    module: Optional[str]            # lowest owner CA-module (None: public)
    deepest: Optional[MNode]
    owners: List[MNode]
    affecting: Dict[tuple, AffectingNode]
    qid: Optional[str]


def _clique_infos(tree: PqmTree, cliques) -> List[_CliqueInfo]:
    infos = []
    for i, C in enumerate(cliques):
        ctype, an = classify(tree, C)
        if ctype is not CliqueType.AMBIGUOUS:
            raise ValueError("kernel bookkeeping expects ambiguous cliques")
        qid = tree.qnode_of_module[tree.module_of_vertex[min(an.cleaned)]]
        aff = {}
        for a in an.affecting:
            nid = (
                tree.qnodes[a.node].node_id if a.kind == "Q" else a.node.node_id
            )
            aff[nid] = a
        infos.append(
            _CliqueInfo(i, frozenset(an.cleaned), an.module, an.deepest,
                        an.owners, aff, qid)
        )
    return infos


def _node_order(tree: PqmTree) -> Tuple[List[tuple], Dict[tuple, object]]:
    """Bottom-up order of the inner nodes per component, Q-nodes last."""
    order = []
    node_of = {}

    def post(n: MNode):
        for c in n.children:
            post(c)
        if n.kind != "leaf":
            order.append(n.node_id)
            node_of[n.node_id] = n

    for qid in sorted(tree.qnodes):
        q = tree.qnodes[qid]
        for mn in sorted(q.modules):
            post(tree.module_by_name[mn].mtree)
        order.append(q.node_id)
        node_of[q.node_id] = qid
    return order, node_of


def _priv_for_node(tree, infos, nid, node_of) -> List[int]:
    obj = node_of[nid]
    if isinstance(obj, MNode):
        return [
            inf.index
            for inf in infos
            if inf.module == obj.module
            and inf.deepest is not None
            and inf.deepest.verts <= obj.verts
        ]
    qid = obj
    q = tree.qnodes[qid]
    if q.serial:
        return [inf.index for inf in infos]
    return [
        inf.index for inf in infos if inf.module in q.modules and inf.module
    ]


def _children_data(tree, nid, node_of):
    """(child id, child verts, child node id or None, metachord owner module)"""
    obj = node_of[nid]
    if isinstance(obj, MNode):
        return [
            (min(c.verts), c.verts, c.node_id if c.kind != "leaf" else None, obj.module)
            for c in obj.children
        ]
    qid = obj
    q = tree.qnodes[qid]
    out = []
    for mn in sorted(q.modules):
        m = tree.module_by_name[mn]
        child_nid = m.mtree.node_id if m.mtree.kind != "leaf" else None
        out.append((mn, m.verts, child_nid, mn))
    return out


def _orientation(tree, module_name, clique, verts) -> Optional[int]:
    m = tree.module_by_name[module_name]
    orients = {m.orientation(v) for v in clique if v in verts}
    if not orients:
        return None
    if len(orients) != 1:
        raise AssertionError("mixed orientations outside an owner")
    return orients.pop()


def binding_relation(tree: PqmTree, infos, nid, node_of, ci: int, cj: int) -> set:
    """The binding relations of node ``nid`` on a private clique pair:
    a subset of {'same-side', 'different-sides'} (empty: unbound)."""
    obj = node_of[nid]
    inf_i, inf_j = infos[ci], infos[cj]
    kind = (
        obj.kind
        if isinstance(obj, MNode)
        else ("serial" if tree.qnodes[obj].serial else "prime")
    )
    if kind == "prime":
        ai = inf_i.affecting.get(nid)
        aj = inf_j.affecting.get(nid)
        if ai is None or aj is None:
            return set()
        if isinstance(obj, MNode):
            o = obj.orderings[0]
            ji = 0 if mnode_ordering_binds(ai, o, 0) else 1
            jj = 0 if mnode_ordering_binds(aj, o, 0) else 1
        else:
            q = tree.qnodes[obj]
            o = tree.qnode_options(q)[0]
            ji = 0 if qnode_ordering_binds(tree, ai, o, 0) else 1
            jj = 0 if qnode_ordering_binds(tree, aj, o, 0) else 1
        return {"same-side" if ji == jj else "different-sides"}
    if kind == "parallel":
        return set()
    # serial: a shared owner child K and witness children L
    children = _children_data(tree, nid, node_of)
    owner_child = None
    for cid, verts, child_nid, module in children:
        if _is_priv_child(tree, infos, ci, verts, module) and _is_priv_child(
            tree, infos, cj, verts, module
        ):
            owner_child = (cid, verts)
            break
    if owner_child is None:
        return set()
    rels = set()
    for cid, verts, child_nid, module in children:
        if cid == owner_child[0]:
            continue
        oi = _orientation(tree, module, inf_i.clique, verts)
        oj = _orientation(tree, module, inf_j.clique, verts)
        if oi is None or oj is None:
            continue
        rels.add("same-side" if oi == oj else "different-sides")
    return rels


def _is_priv_child(tree, infos, ci, child_verts, module) -> bool:
    inf = infos[ci]
    if inf.module is None or inf.deepest is None:
        return False
    m = tree.module_by_name[module]
    if not inf.clique & child_verts:
        return False
    return inf.module == tree.module_of_vertex[
        min(child_verts)
    ] and inf.deepest.verts <= child_verts or (
        inf.module == module and inf.deepest.verts <= child_verts
    )


def node_binding_relation(tree: PqmTree, node, clique1, clique2) -> str:
    """How a node binds two cliques private for it: 'same-side',
    'different-sides', 'unbound', or 'conflict' when a serial node carries
    witnesses of both kinds.

    ``node`` is an MNode or a Q-node id.
    """
    infos = _clique_infos(tree, [frozenset(clique1), frozenset(clique2)])
    _, node_of = _node_order(tree)
    nid = node.node_id if isinstance(node, MNode) else tree.qnodes[node].node_id
    rels = binding_relation(tree, infos, nid, node_of, 0, 1)
    if not rels:
        return "unbound"
    if len(rels) == 2:
        return "conflict"
    return next(iter(rels))


def compute_blocks(tree: PqmTree, cliques) -> object:
    """BlockState, or the string REJECT (a certified NO)."""
    infos = _clique_infos(tree, cliques)
    order, node_of = _node_order(tree)
    uf = _ParityUF()
    for inf in infos:
        uf.add(inf.index)

    blocks_at: Dict[tuple, frozenset] = {}
    introduced_at: Dict[tuple, list] = {}
    merges_at: Dict[tuple, list] = {}
    priv_at: Dict[tuple, list] = {}

    deepest_nid = {}
    for inf in infos:
        if inf.deepest is not None:
            deepest_nid[inf.index] = inf.deepest.node_id
        else:
            # public cliques are introduced at their (serial) Q-node
            deepest_nid[inf.index] = tree.qnodes[inf.qid].node_id

    for nid in order:
        priv = _priv_for_node(tree, infos, nid, node_of)
        if not priv:
            continue
        priv_at[nid] = priv
        introduced_at[nid] = [ci for ci in priv if deepest_nid[ci] == nid]
        merges_at[nid] = []
        for ci, cj in itertools.combinations(sorted(priv), 2):
            for rel in sorted(binding_relation(tree, infos, nid, node_of, ci, cj)):
                parity = 0 if rel == "same-side" else 1
                res = uf.union(ci, cj, parity)
                if res is None:
                    return REJECT
                if res:
                    merges_at[nid].append((ci, cj))
        blocks_at[nid] = uf.snapshot(priv)
    return BlockState(blocks_at, introduced_at, merges_at, priv_at, order, node_of)


# ---------------------------------------------------------------------------
# marking

def mark_important(tree: PqmTree, cliques, state: BlockState) -> ImportantSet:
    infos = _clique_infos(tree, cliques)
    important: List[tuple] = []
    weakly: List[Tuple[tuple, str]] = []
    R: Set[str] = set()

    def children_with_priv(nid):
        out = []
        for cid, verts, child_nid, module in _children_data(tree, nid, state.node_of):
            if child_nid is not None and child_nid in state.blocks_at:
                out.append(child_nid)
        return out

    for nid in state.order:
        if nid not in state.blocks_at:
            continue
        mine = state.blocks_at[nid]
        irrelevant = any(
            state.blocks_at[knid] == mine for knid in children_with_priv(nid)
        )
        if irrelevant:
            continue
        important.append(nid)
        obj = state.node_of[nid]
        kind = (
            obj.kind
            if isinstance(obj, MNode)
            else ("serial" if tree.qnodes[obj].serial else "prime")
        )
        if kind in ("prime", "parallel"):
            _mark_prime_parallel(tree, infos, state, nid, obj, R)
        else:
            _mark_serial(tree, infos, state, nid, obj, R, weakly)
    return ImportantSet(important, weakly, R)


def _mark_prime_parallel(tree, infos, state, nid, obj, R):
    sim = tree.sim()
    for ci in state.introduced_at.get(nid, []):
        inf = infos[ci]
        aff = inf.affecting.get(nid)
        m = tree.module_by_name[inf.module]
        members = sorted(v for v in inf.clique if v in obj.verts)
        pair = None
        if aff is not None:
            for a in members:
                for b in members:
                    if (
                        b in sim[a]
                        and m.orientation(a) == 0
                        and m.orientation(b) == 1
                    ):
                        pair = (a, b)
                        break
                if pair:
                    break
        if pair is None:
            zeros = [v for v in members if m.orientation(v) == 0]
            ones = [v for v in members if m.orientation(v) == 1]
            pair = (zeros[0], ones[0])
        R.add(pair[0])
        R.add(pair[1])
    for (ci, cj) in state.merges_at.get(nid, []):
        for cx in (ci, cj):
            if cx in state.introduced_at.get(nid, []):
                continue
            inf = infos[cx]
            for cid, verts, child_nid, module in _children_data(
                tree, nid, state.node_of
            ):
                if _is_priv_child(tree, infos, cx, verts, module):
                    continue
                members = sorted(v for v in inf.clique if v in verts)
                if members:
                    R.add(members[0])
                    break


def _signatures_of_child(tree, infos, priv, clique01, clique10):
    sigs = set()
    for na in range(0, 5):
        for nb in range(0, 5 - na):
            for A in itertools.combinations(sorted(clique01), na):
                for B in itertools.combinations(sorted(clique10), nb):
                    sigs.add((frozenset(A), frozenset(B)))
    return sigs


def _mark_serial(tree, infos, state, nid, obj, R, weakly):
    priv = set(state.priv_at.get(nid, []))
    visited: Set[tuple] = set()
    children = _children_data(tree, nid, state.node_of)
    marked_children = []
    for cid, verts, child_nid, module in children:
        child_priv = [
            ci for ci in priv if _is_priv_child(tree, infos, ci, verts, module)
        ]
        meets = [
            ci
            for ci in priv
            if infos[ci].clique & verts and ci not in child_priv
        ]
        if child_priv:
            marked_children.append((cid, verts, module, meets + child_priv))
            continue
        if not meets:
            continue
        c01 = [
            ci for ci in meets
            if _orientation(tree, module, infos[ci].clique, verts) == 0
        ]
        c10 = [ci for ci in meets if ci not in c01]
        sigs = _signatures_of_child(tree, infos, priv, c01, c10)
        fresh = sigs - visited
        if fresh:
            visited |= sigs
            marked_children.append((cid, verts, module, meets))
    for cid, verts, module, cl_list in marked_children:
        weakly.append((nid, cid))
        for ci in sorted(set(cl_list)):
            members = sorted(v for v in infos[ci].clique if v in verts)
            if members:
                R.add(members[0])


# ---------------------------------------------------------------------------
# the reduct

class _Fresh:
    def __init__(self):
        self.counter = 0

    def single(self) -> str:
        a = f"_r{self.counter}"
        self.counter += 1
        return a

    def pair(self) -> Tuple[str, str]:
        return self.single(), self.single()


def _gadget(fresh: _Fresh):
    """A disjoint pair: block words (g0, g1) with the (1,0)-oriented vertex
    first on side 0."""
    a, b = fresh.pair()
    return [Token(a, 1), Token(b, 0)], [Token(b, 1), Token(a, 0)]


PLACEHOLDER = Token("_R", None)


def reduct(word: CircularWord, U) -> Tuple[CircularWord, Graph]:
    """A graph G' with U inside whose conformal models restrict to U*
    exactly as the input model's graph's do, with |V'| <= 12|U|."""
    U = set(U)
    if not U:
        raise ValueError("U must be nonempty")
    G = graph_from_model(word)
    missing = U - set(G.vertices)
    if missing:
        raise ValueError(f"not vertices: {sorted(missing)}")
    tree = build_pqm_tree(word, G)
    fresh = _Fresh()

    def mnode_reduct(m: CaModule, node: MNode):
        """(lam0, lam1) for an important node, or None."""
        if node.kind == "leaf":
            u = min(node.verts)
            if u not in U:
                return None
            x = fresh.single()
            if m.orientation(u) == 0:
                return [Token(x, 1), Token(u, 0)], [Token(u, 1), Token(x, 0)]
            return [Token(u, 1), Token(x, 0)], [Token(x, 1), Token(u, 0)]
        kids = []
        for c in node.children:
            r = mnode_reduct(m, c)
            if r is not None:
                kids.append((min(c.verts), r))
        if not (node.verts & U):
            return None
        if len(kids) == 1:
            return kids[0][1]
        by_id = dict(kids)
        pi0, pi1 = node.default_ordering
        k0 = [t for cid in pi0 if cid in by_id for t in by_id[cid][0]]
        k1 = [t for cid in pi1 if cid in by_id for t in by_id[cid][1]]
        if node.kind in ("serial", "parallel"):
            e1 = _gadget(fresh)
            e2 = _gadget(fresh)
            e3 = _gadget(fresh)
            lam0 = e1[0] + e2[0] + e3[0] + k0
            lam1 = e3[1] + e1[1] + k1 + e2[1]
            return lam0, lam1
        # prime node
        ids0 = [cid for cid in pi0 if cid in by_id]
        ids1 = [cid for cid in pi1 if cid in by_id]
        L = {cid: _gadget(fresh) for cid in ids0}
        M_i = {cid: _gadget(fresh) for cid in ids0}
        Mg = _gadget(fresh)
        lam0 = []
        for cid in ids0:
            lam0 += L[cid][0] + by_id[cid][0]
        lam0 += Mg[0]
        for cid in ids0:
            lam0 += M_i[cid][0]
        lam1 = list(Mg[1])
        for cid in reversed(ids0):
            lam1 += L[cid][1] + M_i[cid][1]
        for cid in ids1:
            lam1 += by_id[cid][1]
        return lam0, lam1

    module_reduct = {}
    for m in tree.camodules:
        if m.verts & U:
            r = mnode_reduct(m, m.mtree)
            module_reduct[m.name] = r

    def important_module(mn):
        return mn in module_reduct

    def qnode_reduct(qid, is_root: bool):
        """A circular token list; contains PLACEHOLDER unless is_root."""
        q = tree.qnodes[qid]
        imp_pn = [
            pid for pid in q.pneighbors
            if pid != parent_p.get(qid) and pnode_important(pid, qid)
        ]
        imp_mods = [mn for mn in q.modules if important_module(mn)]
        if not imp_mods and len(imp_pn) == 1:
            inner_kids = _important_qchildren(imp_pn[0], qid)
            if len(inner_kids) == 1:
                inner = qnode_reduct(inner_kids[0], is_root=False)
                return _drop_placeholder(inner) if is_root else inner
            inner = pnode_reduct(imp_pn[0], qid)
            return _drop_placeholder(inner) if is_root else inner
        if len(imp_mods) == 1 and not imp_pn and not (is_root and q.serial):
            # a single important CA-module: pass its reduct through, keeping
            # the parent's position relative to the slots
            lam = module_reduct[imp_mods[0]]
            if is_root:
                return list(lam[0]) + list(lam[1])
            letters = [
                t for t in q.default_order
                if (t.kind is None and int(t.name[2:]) == parent_p.get(qid))
                or (t.kind is not None and t.name == imp_mods[0])
            ]
            cut = next(i for i, t in enumerate(letters) if t.kind is None)
            letters = letters[cut:] + letters[:cut]
            return [PLACEHOLDER] + [
                tok for t in letters[1:] for tok in lam[t.kind]
            ]
        # letters of the Q-node order restricted to the important children,
        # rotated so the parent placeholder leads
        out_letters = []
        for t in q.default_order:
            if t.kind is None:
                pid = int(t.name[2:])
                if pid == parent_p.get(qid):
                    out_letters.append(PLACEHOLDER)
                elif pid in imp_pn:
                    out_letters.append(t)
            elif t.name in imp_mods:
                out_letters.append(t)
        if not is_root:
            cut = out_letters.index(PLACEHOLDER)
            out_letters = out_letters[cut:] + out_letters[:cut]
        if is_root and q.serial:
            # serial root: plain restriction to important modules
            toks = []
            for t in out_letters:
                toks += module_reduct[t.name][t.kind]
            return toks
        # gadget construction around the r-letters
        rs = [t for t in out_letters if t != PLACEHOLDER]
        mcount = len(rs)
        L = [_gadget(fresh) for _ in range(mcount)]
        M_i = [_gadget(fresh) for _ in range(mcount)]
        Mg = _gadget(fresh)
        toks: List[Token] = [] if is_root else [PLACEHOLDER]
        for i, r in enumerate(rs):
            toks += L[i][0]
            toks += _expand_letter(r, qid)
        # L^1_m M^0_1 L^1_{m-1} M^0_2 ... L^1_1 M^0_m M^0 M^1_m ... M^1_1 M^1
        for i in range(mcount):
            toks += L[mcount - 1 - i][1]
            toks += M_i[i][0]
        toks += Mg[0]
        for i in range(mcount - 1, -1, -1):
            toks += M_i[i][1]
        toks += Mg[1]
        return toks

    def _expand_letter(t: Token, qid):
        if t.kind is not None:
            return module_reduct[t.name][t.kind]
        return _splice(pnode_reduct(int(t.name[2:]), qid))

    def _splice(circ: List[Token]) -> List[Token]:
        i = circ.index(PLACEHOLDER)
        return circ[i + 1:] + circ[:i]

    def _drop_placeholder(circ: List[Token]) -> List[Token]:
        return [t for t in circ if t != PLACEHOLDER]

    def pnode_important(pid, from_qid) -> bool:
        return bool(_important_qchildren(pid, from_qid))

    def _important_qchildren(pid, from_qid):
        return [
            qid2
            for qid2 in tree.pnodes[pid].qneighbors
            if qid2 != from_qid and subtree_important(("Q", qid2), ("P", pid))
        ]

    def pnode_reduct(pid, from_qid) -> List[Token]:
        kids = _important_qchildren(pid, from_qid)
        if len(kids) == 1:
            q2 = tree.qnodes[kids[0]]
            inner_pn = [
                p2 for p2 in q2.pneighbors
                if p2 != pid and pnode_important(p2, kids[0])
            ]
            if not any(important_module(mn) for mn in q2.modules) and len(inner_pn) == 1:
                return pnode_reduct(inner_pn[0], kids[0])
        toks: List[Token] = [PLACEHOLDER]
        for qid2 in kids:
            toks += _splice(qnode_reduct(qid2, is_root=False))
        return toks

    # orient the PQ-tree from the root Q-node
    root_qid = min(tree.qnodes)
    parent_p: Dict[str, Optional[int]] = {root_qid: None}
    parent_q: Dict[int, str] = {}
    stack = [root_qid]
    seen_q = {root_qid}
    while stack:
        qid = stack.pop()
        for pid in tree.qnodes[qid].pneighbors:
            if pid in parent_q:
                continue
            parent_q[pid] = qid
            for q2 in tree.pnodes[pid].qneighbors:
                if q2 not in seen_q:
                    seen_q.add(q2)
                    parent_p[q2] = pid
                    stack.append(q2)

    subtree_cache: Dict[tuple, bool] = {}

    def subtree_important(node, frm) -> bool:
        key = (node, frm)
        if key in subtree_cache:
            return subtree_cache[key]
        if node[0] == "Q":
            q = tree.qnodes[node[1]]
            res = any(important_module(mn) for mn in q.modules) or any(
                subtree_important(("P", pid), node)
                for pid in q.pneighbors
                if ("P", pid) != frm
            )
        else:
            p = tree.pnodes[node[1]]
            res = any(
                subtree_important(("Q", q2), node)
                for q2 in p.qneighbors
                if ("Q", q2) != frm
            )
        subtree_cache[key] = res
        return res

    toks = qnode_reduct(root_qid, is_root=True)
    new_word = CircularWord(toks)
    G2 = graph_from_model(new_word)
    if len(G2.vertices) > 12 * len(U):  # pragma: no cover
        raise AssertionError("reduct exceeded the 12|U| bound")
    return new_word, G2


# ---------------------------------------------------------------------------
# kernelization

@dataclass
class KernelResult:
    status: str                       # 'reject' | 'kernel'
    instance: Optional[HellyInstance] = None
    important: Optional[ImportantSet] = None
    reduced: bool = False

    @property
    def rejected(self):
        return self.status == REJECT


def kernelize(instance: HellyInstance, tree: Optional[PqmTree] = None) -> KernelResult:
    G = instance.graph
    if tree is None:
        tree = build_pqm_tree(instance.word, G)
    active = []
    for C in instance.cliques:
        ctype, _ = classify(tree, C)
        if ctype is CliqueType.ALWAYS_NON_HELLY:
            return KernelResult(REJECT)
        if ctype is CliqueType.AMBIGUOUS:
            active.append(frozenset(C))
    if not active:
        w = CircularWord([Token("k", 0), Token("k", 1)])
        return KernelResult("kernel", HellyInstance(w, []), ImportantSet([], [], set()))
    state = compute_blocks(tree, active)
    if state == REJECT:
        return KernelResult(REJECT)
    imp = mark_important(tree, active, state)
    R = set(imp.R)
    if 12 * len(R) >= G.n:
        return KernelResult(
            "kernel", HellyInstance(instance.word, active), imp, reduced=False
        )
    new_word, G2 = reduct(instance.word, R)
    new_cliques = []
    for C in active:
        rc = frozenset(C & R)
        if not rc:  # pragma: no cover - the marking covers every clique
            raise AssertionError("kernelized clique became empty")
        new_cliques.append(rc)
    return KernelResult(
        "kernel", HellyInstance(new_word, new_cliques), imp, reduced=True
    )
