"""The PQM-tree: the data structure representing every conformal model.

Built from one validated conformal model, the tree holds:

  * the CA-modules partitioning the vertex set, each with a metachord
    (slot token sets S^0/S^1 and the fixed orientation <_S of its
    non-crossing pairs),
  * per CA-module the strong-module tree of its overlap subgraph, with an
    admissible-ordering set Pi(M) at every inner node,
  * a PQ-tree over the overlap components (a single Q-node unless the
    vertex set is parallel), with Pi(Q)/Pi(P) per node.

Choosing one admissible ordering per node generates one conformal model;
ranging over all choices generates every conformal model exactly once up
to rotation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from . import graphs, moddecomp
from .graphs import Graph, NotConformalError, Rel, gaps_left_of_all
from .words import CircularWord, Token


class EnumerationTooLarge(RuntimeError):
    pass


class NotAConformalModelError(ValueError):
    """The word cannot be read out as a conformal model (slot structure broke)."""


def validate_conformal(word: CircularWord, G: Graph):
    """Raise NotConformalError with the first violating pair, or return None."""
    graphs.check_conformal(word, G)


# ---------------------------------------------------------------------------
# M-trees

@dataclass
class MNode:
    """A node of a CA-module's strong-module tree, with its metachord data."""

    module: str                    # owning CA-module name (representant)
    verts: FrozenSet[str]
    kind: str                      # leaf | serial | parallel | prime
    children: List["MNode"] = field(default_factory=list)
    orderings: Optional[list] = None   # prime: the two (pi0, pi1); parallel: [one]
    default_ordering: Optional[tuple] = None
    _child_ids: Optional[tuple] = None

    @property
    def node_id(self) -> tuple:
        return ("M", self.module, min(self.verts), len(self.verts))

    def child_ids(self):
        if self._child_ids is None:
            self._child_ids = tuple(min(c.verts) for c in self.children)
        return self._child_ids

    def all_nodes(self) -> Iterator["MNode"]:
        yield self
        for c in self.children:
            yield from c.all_nodes()

    def inner_nodes(self) -> Iterator["MNode"]:
        for n in self.all_nodes():
            if n.kind != "leaf":
                yield n


@dataclass
class CaModule:
    name: str                      # representant: least vertex
    verts: FrozenSet[str]
    slot0: Tuple[Token, ...]       # the slot word read from the build model
    slot1: Tuple[Token, ...]
    less: FrozenSet[Tuple[str, str]]   # fixed orientation of non-crossing pairs
    mtree: MNode = None

    def _orient_map(self):
        cache = self.__dict__.get("_orients")
        if cache is None:
            s0 = set(self.slot0)
            cache = {
                v: (0 if Token(v, 0) in s0 else 1) for v in self.verts
            }
            self.__dict__["_orients"] = cache
        return cache

    def t0(self, v: str) -> Token:
        return Token(v, self._orient_map()[v])

    def t1(self, v: str) -> Token:
        return Token(v, 1 - self._orient_map()[v])

    def orientation(self, v: str) -> int:
        """0 if v is (S^0,S^1)-oriented (tail in slot 0), else 1."""
        return self._orient_map()[v]

    @property
    def _s0set(self):
        cache = self.__dict__.get("_s0cache")
        if cache is None:
            cache = frozenset(self.slot0)
            self.__dict__["_s0cache"] = cache
        return cache

    def slot_token(self, j: int) -> Token:
        return Token(self.name, j)


@dataclass
class QNode:
    qid: str                       # least vertex of the component
    comp: FrozenSet[str]
    modules: List[str]             # CA-module names inside this component
    pneighbors: List[int] = field(default_factory=list)
    serial: bool = False
    default_order: tuple = ()      # circular tuple over slot tokens + P letters

    @property
    def node_id(self):
        return ("Q", self.qid)


@dataclass
class PNode:
    pid: int
    qneighbors: List[str] = field(default_factory=list)
    default_order: tuple = ()      # circular tuple over Q letters

    @property
    def node_id(self):
        return ("P", self.pid)


def p_letter(pid: int) -> Token:
    return Token(f"_p{pid}", None)


def q_letter(qid: str) -> Token:
    return Token(qid, None)


class PqmTree:
    def __init__(self, graph, word, root_case, camodules, qnodes, pnodes, pi0):
        self.graph: Graph = graph
        self.word: CircularWord = word
        self.root_case: str = root_case        # prime | serial | parallel
        self.camodules: List[CaModule] = camodules
        self.qnodes: Dict[str, QNode] = qnodes
        self.pnodes: Dict[int, PNode] = pnodes
        self.pi0: Tuple[Token, ...] = pi0      # slot order of the build model
        self.module_by_name = {m.name: m for m in camodules}
        self.module_of_vertex = {}
        for m in camodules:
            for v in m.verts:
                self.module_of_vertex[v] = m.name
        self.qnode_of_module = {}
        for q in qnodes.values():
            for mn in q.modules:
                self.qnode_of_module[mn] = q.qid

    # -- node option sets --------------------------------------------------

    def sim(self):
        if not hasattr(self, "_sim"):
            self._sim = graphs.overlap_adjacency(self.graph)
        return self._sim

    def mnode_options(self, node: MNode):
        if node.kind == "prime" or node.kind == "parallel":
            return list(node.orderings)
        if node.kind == "serial":
            ids = node.child_ids()
            return (
                (perm, perm) for perm in itertools.permutations(sorted(ids))
            )
        raise ValueError("leaf nodes have no orderings")

    def mnode_option_count(self, node: MNode) -> int:
        if node.kind == "serial":
            import math

            return math.factorial(len(node.children))
        return len(node.orderings)

    def qnode_options(self, q: QNode, cap: Optional[int] = None):
        if q.serial:
            return self._serial_orders()
        opts = [q.default_order]
        refl = _reflect_circ(q.default_order)
        if CircularWord(refl) != CircularWord(q.default_order):
            opts.append(refl)
        return opts

    def pnode_options(self, p: PNode):
        base = list(p.default_order)
        if len(base) <= 2:
            return [tuple(base)]
        first = base[0]
        rest = base[1:]
        return [
            (first,) + perm for perm in itertools.permutations(sorted(rest, key=lambda t: t.sort_key()))
        ]

    def _serial_orders(self):
        """All circular arrangements of the slots in which the chords of
        distinct CA-modules pairwise cross.

        Such arrangements are exactly F X_1..X_{t-1} F' Y_1..Y_{t-1} where
        F is the least slot token, F' its partner, the X_i pick one slot
        token per remaining module in some order, and the Y_i are the
        partner tokens in the same module order - so they are generated
        directly as (t-1)! orders times 2^(t-1) slot choices.
        """
        mods = sorted(m.name for m in self.camodules)
        tokens = sorted(
            (Token(mn, j) for mn in mods for j in (0, 1)),
            key=lambda t: t.sort_key(),
        )
        first = tokens[0]
        partner = Token(first.name, 1 - first.kind)
        others = [mn for mn in mods if mn != first.name]
        t = len(others)
        for perm in itertools.permutations(others):
            for bits in itertools.product((0, 1), repeat=t):
                half1 = [Token(mn, b) for mn, b in zip(perm, bits)]
                half2 = [Token(mn, 1 - b) for mn, b in zip(perm, bits)]
                yield (first, *half1, partner, *half2)

    # -- defaults ------------------------------------------------------------

    def default_choice(self) -> dict:
        choice = {}
        for m in self.camodules:
            for node in m.mtree.inner_nodes():
                choice[node.node_id] = node.default_ordering
        for q in self.qnodes.values():
            choice[q.node_id] = q.default_order
        for p in self.pnodes.values():
            choice[p.node_id] = p.default_order
        return choice

    # -- model generation ------------------------------------------------

    def expand_module(self, m: CaModule, choice) -> Tuple[list, list]:
        def rec(node: MNode):
            if node.kind == "leaf":
                v = min(node.verts)
                return [m.t0(v)], [m.t1(v)]
            ordering = choice.get(node.node_id, node.default_ordering)
            pi0, pi1 = ordering
            by_id = {min(c.verts): c for c in node.children}
            w0, w1 = [], []
            for cid in pi0:
                w0.extend(rec(by_id[cid])[0])
            for cid in pi1:
                w1.extend(rec(by_id[cid])[1])
            return w0, w1

        return rec(m.mtree)

    def slot_order(self, choice) -> Tuple[Token, ...]:
        """The circular slot order induced by the chosen PQ-node orderings."""
        if len(self.qnodes) == 1:
            (q,) = self.qnodes.values()
            return tuple(choice.get(q.node_id, q.default_order))
        # plane-tree boundary walk over Q- and P-nodes
        ports: Dict[tuple, list] = {}
        for q in self.qnodes.values():
            ports[q.node_id] = list(choice.get(q.node_id, q.default_order))
        for p in self.pnodes.values():
            ports[p.node_id] = list(choice.get(p.node_id, p.default_order))

        def resolve(node_id, letter: Token):
            if letter.kind is not None:
                return ("slot", letter)
            if letter.name.startswith("_p"):
                return ("node", ("P", int(letter.name[2:])))
            return ("node", ("Q", letter.name))

        back_index = {}
        for nid, letters in ports.items():
            for i, letter in enumerate(letters):
                kind, val = resolve(nid, letter)
                if kind == "node":
                    back_index[(nid, val)] = i

        start = ("Q", min(self.qnodes))
        out = []
        node, idx = start, 0
        steps = 0
        limit = sum(len(v) for v in ports.values()) + 2
        while True:
            letters = ports[node]
            kind, val = resolve(node, letters[idx])
            if kind == "slot":
                out.append(val)
                idx = (idx + 1) % len(letters)
            else:
                nxt = val
                j = back_index[(nxt, node)]
                node, idx = nxt, (j + 1) % len(ports[nxt])
            steps += 1
            if (node, idx) == (start, 0):
                break
            if steps > 4 * limit:
                raise RuntimeError("plane walk did not close")
        return tuple(out)

    def generate_model(self, choice=None) -> CircularWord:
        if choice is None:
            choice = {}
        pi = self.slot_order(choice)
        words = {m.name: self.expand_module(m, choice) for m in self.camodules}
        toks: List[Token] = []
        for s in pi:
            toks.extend(words[s.name][s.kind])
        return CircularWord(toks)

    # -- enumeration -------------------------------------------------------

    def _choice_nodes(self):
        nodes = []
        for m in self.camodules:
            for node in m.mtree.inner_nodes():
                nodes.append(("M", node))
        for q in sorted(self.qnodes):
            nodes.append(("Q", self.qnodes[q]))
        for p in sorted(self.pnodes):
            nodes.append(("P", self.pnodes[p]))
        return nodes

    def count_choices(self, cap: int) -> int:
        import math

        total = 1
        for kind, node in self._choice_nodes():
            if kind == "M":
                total *= self.mnode_option_count(node)
            elif kind == "Q":
                if node.serial:
                    cnt = 0
                    for _ in self._serial_orders():
                        cnt += 1
                        if total * cnt > cap:
                            return cap + 1
                    total *= cnt
                else:
                    total *= len(self.qnode_options(node))
            else:
                total *= max(1, math.factorial(len(node.default_order) - 1))
            if total > cap:
                return cap + 1
        return total

    def enumerate_models(self, cap: int = 100000) -> Iterator[CircularWord]:
        """Every conformal model exactly once up to rotation."""
        if self.count_choices(cap) > cap:
            raise EnumerationTooLarge(f"more than {cap} ordering combinations")
        nodes = self._choice_nodes()
        seen = set()

        def rec(i, choice):
            if i == len(nodes):
                w = self.generate_model(choice)
                if w not in seen:
                    seen.add(w)
                    yield w
                return
            kind, node = nodes[i]
            if kind == "M":
                options = self.mnode_options(node)
            elif kind == "Q":
                options = self.qnode_options(node)
            else:
                options = self.pnode_options(node)
            for opt in options:
                choice[node.node_id] = opt
                yield from rec(i + 1, choice)
            del choice[node.node_id]

        yield from rec(0, {})

    # -- clique letters ------------------------------------------------------

    def private_for(self, node: MNode, clique) -> bool:
        """True iff the node holds two clique vertices with different
        orientations in its metachord."""
        m = self.module_by_name[node.module]
        orients = {m.orientation(v) for v in clique if v in node.verts}
        return len(orients) == 2

    def owners(self, clique) -> List[MNode]:
        out = []
        for m in self.camodules:
            if sum(1 for v in clique if v in m.verts) >= 2:
                for node in m.mtree.all_nodes():
                    if node.kind != "leaf" or len(node.verts) > 1:
                        pass
                    if self.private_for(node, clique):
                        out.append(node)
        return out

    def h3_blocked_gaps(self, word: CircularWord, clique) -> set:
        """Gaps interior to a non-owner node's slot-side block."""
        pos = word.positions()
        n = len(word)
        blocked = set()
        for m in self.camodules:
            for node in m.mtree.all_nodes():
                if self.private_for(node, clique):
                    continue
                for side_tokens in (
                    [m.t0(v) for v in node.verts],
                    [m.t1(v) for v in node.verts],
                ):
                    if len(side_tokens) <= 1:
                        continue
                    ps = sorted(pos[t] for t in side_tokens)
                    runs = word.runs(set(side_tokens))
                    if len(runs) != 1:
                        raise NotAConformalModelError(
                            f"slot side of {sorted(node.verts)} not contiguous"
                        )
                    run = runs[0]
                    for p in run[:-1]:
                        blocked.add(p)
        return blocked

    def extend_with_cliques(self, word: CircularWord, cliques) -> List[List[int]]:
        """All placements per clique of its letter satisfying (H1)-(H3).

        Returns one gap-index list per clique (empty list: the model does
        not realize the clique).
        """
        out = []
        for C in cliques:
            C = sorted(set(C))
            if not self.graph.is_clique(C):
                raise ValueError(f"not a clique: {C}")
            gaps = gaps_left_of_all(word, C)
            blocked = self.h3_blocked_gaps(word, C)
            out.append([g for g in gaps if g not in blocked])
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        def mnode(n: MNode):
            d = {
                "kind": n.kind,
                "vertices": sorted(n.verts),
            }
            if n.kind != "leaf":
                d["children"] = [mnode(c) for c in n.children]
                if n.kind == "prime":
                    d["pi"] = [
                        {"pi0": list(o[0]), "pi1": list(o[1])} for o in n.orderings
                    ]
                elif n.kind == "parallel":
                    d["pi"] = "single fixed ordering"
                else:
                    d["pi"] = f"all {len(n.children)}! child orders"
            return d

        data = {
            "root_case": self.root_case,
            "modules": [
                {
                    "name": m.name,
                    "vertices": sorted(m.verts),
                    "slot0": [str(t) for t in m.slot0],
                    "slot1": [str(t) for t in m.slot1],
                    "less": sorted([list(p) for p in m.less]),
                    "mtree": mnode(m.mtree),
                }
                for m in self.camodules
            ],
            "slot_order": [str(t) for t in self.pi0],
            "qnodes": [
                {
                    "id": q.qid,
                    "serial": q.serial,
                    "modules": q.modules,
                    "pi": (
                        "slot orders with pairwise crossing modules"
                        if q.serial
                        else [
                            [str(t) for t in o] for o in self.qnode_options(q)
                        ]
                    ),
                }
                for q in self.qnodes.values()
            ],
            "pnodes": [
                {"id": p.pid, "qneighbors": p.qneighbors, "pi": "all circular orders"}
                for p in self.pnodes.values()
            ],
        }
        return json.dumps(data, indent=2)

    def to_dot(self) -> str:
        lines = ["graph pqm {", '  node [shape=box];']
        for q in self.qnodes.values():
            shape = "serial" if q.serial else "prime"
            lines.append(f'  "Q_{q.qid}" [label="Q {q.qid} ({shape})"];')
        for p in self.pnodes.values():
            lines.append(f'  "P_{p.pid}" [label="P {p.pid}" shape=circle];')
            for qid in p.qneighbors:
                lines.append(f'  "P_{p.pid}" -- "Q_{qid}";')
        counter = itertools.count()

        def emit_mnode(n: MNode, parent: str):
            nid = f"m{next(counter)}"
            label = n.kind if n.kind != "leaf" else min(n.verts)
            lines.append(f'  "{nid}" [label="{label}" shape=ellipse];')
            lines.append(f'  "{parent}" -- "{nid}";')
            for c in n.children:
                emit_mnode(c, nid)

        for m in self.camodules:
            qid = self.qnode_of_module[m.name]
            sid0 = f"slot_{m.name}_0"
            sid1 = f"slot_{m.name}_1"
            lines.append(f'  "{sid0}" [label="{m.name}^0" shape=plaintext];')
            lines.append(f'  "{sid1}" [label="{m.name}^1" shape=plaintext];')
            lines.append(f'  "Q_{qid}" -- "{sid0}";')
            lines.append(f'  "Q_{qid}" -- "{sid1}";')
            emit_mnode(m.mtree, f"Q_{qid}")
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# reflection of slot-level circular orders

def _reflect_circ(order: Sequence[Token]) -> tuple:
    return tuple(t.flipped() for t in reversed(order))


# ---------------------------------------------------------------------------
# reading the tree out of a model

def _valid_permutation_words(word, pos, sim, verts):
    """The slot-word pair of ``verts`` in the model, or None if the letters
    do not form a valid oriented permutation model."""
    tokens = {Token(v, j) for v in verts for j in (0, 1)}
    runs = word.runs(tokens)
    candidates = []
    if len(runs) == 2:
        candidates.append((runs[0], runs[1]))
    elif len(runs) == 1:
        run = runs[0]
        for k in range(1, len(run)):
            candidates.append((run[:k], run[k:]))
    else:
        return None

    toks = word.tokens
    for ra, rb in candidates:
        wa = [toks[i] for i in ra]
        wb = [toks[i] for i in rb]
        va = [t.name for t in wa]
        vb = [t.name for t in wb]
        if sorted(va) != sorted(verts) or sorted(vb) != sorted(verts):
            continue
        pa = {v: i for i, v in enumerate(va)}
        pb = {v: i for i, v in enumerate(vb)}
        ok = True
        vl = sorted(verts)
        for i, x in enumerate(vl):
            for y in vl[i + 1:]:
                same = (pa[x] < pa[y]) == (pb[x] < pb[y])
                if same != (y in sim[x]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return wa, wb
    return None


def _camodules_of_child(word, pos, sim, child: moddecomp.MDNode):
    """Greedy partition of a root child into maximal valid submodules."""
    unassigned = set(child.verts)
    found = []
    while unassigned:
        v = min(unassigned)
        # chain from the leaf of v up to the child root
        path = []
        node = child
        while True:
            path.append(node)
            if node.kind == "leaf":
                break
            node = next(c for c in node.children if v in c.verts)
        path.reverse()  # leaf first
        best = {v}
        for i, nd in enumerate(path):
            if _valid_permutation_words(word, pos, sim, nd.verts) is not None:
                best = set(nd.verts)
                continue
            if nd.kind in ("serial", "parallel") and i >= 1:
                U = set(path[i - 1].verts)
                for sib in sorted(nd.children, key=lambda c: min(c.verts)):
                    if sib is path[i - 1] or not sib.verts <= unassigned:
                        continue
                    cand = U | set(sib.verts)
                    if _valid_permutation_words(word, pos, sim, cand) is not None:
                        U = cand
                if len(U) > len(best):
                    best = U
            break
        if not best <= unassigned:
            raise NotAConformalModelError("CA-module read-out overlap")
        found.append(frozenset(best))
        unassigned -= best
    return found


def _build_mnode(module_name, md: moddecomp.MDNode, camod: CaModule, sim) -> MNode:
    if md.kind == "leaf":
        return MNode(module_name, md.verts, "leaf")
    children = [_build_mnode(module_name, c, camod, sim) for c in md.children]
    node = MNode(module_name, md.verts, md.kind, children)
    ids = node.child_ids()
    reps = {cid: cid for cid in ids}
    # quotient relations between children
    qsim = {}
    qless = set()
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if b in sim[a]:
                qsim.setdefault(a, set()).add(b)
                qsim.setdefault(b, set()).add(a)
            else:
                if (a, b) in camod.less:
                    qless.add((a, b))
                elif (b, a) in camod.less:
                    qless.add((b, a))
                else:  # pragma: no cover
                    raise NotAConformalModelError("missing <_S pair")
    for cid in ids:
        qsim.setdefault(cid, set())

    def ordering_from_prec(prec):
        r0 = set(prec) | set(qless)
        r1 = set(prec) | {(b, a) for a, b in qless}
        pi0 = _total_order(ids, r0)
        pi1 = _total_order(ids, r1)
        return (pi0, pi1)

    if md.kind == "prime":
        idx = {cid: i for i, cid in enumerate(ids)}
        qadj = {idx[a]: {idx[b] for b in qsim[a]} for a in ids}
        fwd = moddecomp.prime_orientation(qadj)
        prec_f = {(ids[a], ids[b]) for a, b in fwd}
        prec_r = {(b, a) for a, b in prec_f}
        node.orderings = [ordering_from_prec(prec_f), ordering_from_prec(prec_r)]
    elif md.kind == "parallel":
        node.orderings = [ordering_from_prec(set())]
    return node


def _total_order(ids, rel) -> tuple:
    import functools

    relset = set(rel)

    def cmp(a, b):
        if (a, b) in relset:
            return -1
        if (b, a) in relset:
            return 1
        raise NotAConformalModelError(f"order incomparable: {a},{b}")

    return tuple(sorted(ids, key=functools.cmp_to_key(cmp)))


def _default_mnode_ordering(node: MNode, camod: CaModule):
    """The ordering of this node induced by the build model (ranks taken
    inside the slot words, which carry the cyclic run order)."""
    ids = node.child_ids()
    by_id = {min(c.verts): c for c in node.children}
    rank0 = {t: i for i, t in enumerate(camod.slot0)}
    rank1 = {t: i for i, t in enumerate(camod.slot1)}

    def first_rank(cid, rank, side):
        toks = [
            (camod.t0(v) if side == 0 else camod.t1(v))
            for v in by_id[cid].verts
        ]
        return min(rank[t] for t in toks)

    pi0 = tuple(sorted(ids, key=lambda cid: first_rank(cid, rank0, 0)))
    pi1 = tuple(sorted(ids, key=lambda cid: first_rank(cid, rank1, 1)))
    return (pi0, pi1)


def build_pqm_tree(word: CircularWord, G: Optional[Graph] = None) -> PqmTree:
    if G is None:
        G = graphs.graph_from_model(word)
    graphs.check_conformal(word, G)
    sim = graphs.overlap_adjacency(G)
    pos = word.positions()

    md = moddecomp.decompose(set(G.vertices), sim)
    root_case = md.kind if md.kind != "leaf" else "prime"
    root_children = md.children if md.kind not in ("leaf",) else [md]

    modules: List[CaModule] = []
    for child in sorted(root_children, key=lambda c: min(c.verts)):
        for S in sorted(_camodules_of_child(word, pos, sim, child), key=min):
            pair = _valid_permutation_words(word, pos, sim, S)
            if pair is None:  # pragma: no cover
                raise NotAConformalModelError("module lost validity")
            wa, wb = pair
            rep = min(S)
            if Token(rep, 0) not in set(wa):
                wa, wb = wb, wa
            less = set()
            pa = {t.name: i for i, t in enumerate(wa)}
            vl = sorted(S)
            for i, x in enumerate(vl):
                for y in vl[i + 1:]:
                    if y not in sim[x]:
                        less.add((x, y) if pa[x] < pa[y] else (y, x))
            camod = CaModule(rep, frozenset(S), tuple(wa), tuple(wb), frozenset(less))
            mtree_md = moddecomp.decompose(set(S), sim)
            camod.mtree = _build_mnode(rep, mtree_md, camod, sim)
            modules.append(camod)

    # default orderings per inner node, read from the build word
    for m in modules:
        for node in m.mtree.inner_nodes():
            node.default_ordering = _default_mnode_ordering(node, m)
            if node.kind in ("prime", "parallel"):
                if node.default_ordering not in node.orderings:  # pragma: no cover
                    raise NotAConformalModelError(
                        "build model ordering not admissible"
                    )

    # slot order of the build model
    slot_runs = []
    for m in modules:
        for j, toks in ((0, m.slot0), (1, m.slot1)):
            start = min(pos[t] for t in toks)
            # start of the cyclic run: the token whose predecessor is outside
            tokset = set(toks)
            for t in toks:
                p = pos[t]
                if word.tokens[(p - 1) % len(word)] not in tokset:
                    start = p
                    break
            slot_runs.append((start, Token(m.name, j)))
    slot_runs.sort()
    pi0 = tuple(t for _, t in slot_runs)

    # PQ structure
    qnodes: Dict[str, QNode] = {}
    pnodes: Dict[int, PNode] = {}
    if root_case in ("prime", "serial"):
        qid = min(G.vertices)
        q = QNode(
            qid,
            frozenset(G.vertices),
            [m.name for m in modules],
            serial=(root_case == "serial"),
            default_order=pi0,
        )
        qnodes[qid] = q
    else:
        comps = sorted(
            ({min(c.verts): c.verts for c in root_children}).items()
        )
        ls, rs = graphs.left_right_sets(G)
        comp_ids = [cid for cid, _ in comps]
        comp_verts = dict(comps)

        def separated(c1, c2):
            for v in G.vertices:
                if v in comp_verts[c1] or v in comp_verts[c2]:
                    continue
                if comp_verts[c1] <= ls[v] and comp_verts[c2] <= rs[v]:
                    return True
                if comp_verts[c2] <= ls[v] and comp_verts[c1] <= rs[v]:
                    return True
            return False

        nb = {c: set() for c in comp_ids}
        for i, c1 in enumerate(comp_ids):
            for c2 in comp_ids[i + 1:]:
                if not separated(c1, c2):
                    nb[c1].add(c2)
                    nb[c2].add(c1)

        for cid in comp_ids:
            mods = [m.name for m in modules if m.verts <= comp_verts[cid]]
            qnodes[cid] = QNode(cid, frozenset(comp_verts[cid]), mods)

        # P-nodes: maximal sets of >= 2 pairwise neighbouring components
        cliques = [
            c for c in Graph(comp_ids, [(a, b) for a in comp_ids for b in nb[a] if a < b]).maximal_cliques()
            if len(c) >= 2
        ]
        for pid, cl in enumerate(sorted(cliques, key=lambda c: sorted(c))):
            p = PNode(pid, sorted(cl))
            pnodes[pid] = p
            for qid in p.qneighbors:
                qnodes[qid].pneighbors.append(pid)

        n_nodes = len(qnodes) + len(pnodes)
        n_edges = sum(len(p.qneighbors) for p in pnodes.values())
        if n_edges != n_nodes - 1:  # pragma: no cover
            raise NotAConformalModelError("PQ structure is not a tree")

        # default circular orders read from pi0
        slot_module = {Token(m.name, j): m.name for m in modules for j in (0, 1)}
        module_comp = {}
        for m in modules:
            for cid in comp_ids:
                if m.verts <= comp_verts[cid]:
                    module_comp[m.name] = cid

        # which slots lie beyond each tree edge
        def slots_beyond(from_node, to_node):
            """Slot tokens in the subtree on ``to_node``'s side of the edge."""
            seen = {from_node, to_node}
            stack = [to_node]
            acc = []
            while stack:
                nd = stack.pop()
                if nd[0] == "Q":
                    q = qnodes[nd[1]]
                    acc.extend(Token(mn, j) for mn in q.modules for j in (0, 1))
                    nxt = [("P", pid) for pid in q.pneighbors]
                else:
                    nxt = [("Q", qid) for qid in pnodes[nd[1]].qneighbors]
                for x in nxt:
                    if x not in seen:
                        seen.add(x)
                        stack.append(x)
            return acc

        for q in qnodes.values():
            order = list(pi0)
            for pid in q.pneighbors:
                beyond = set(slots_beyond(q.node_id, ("P", pid)))
                if not CircularWord(tuple(pi0)).is_contiguous(beyond):  # pragma: no cover
                    raise NotAConformalModelError("P-side slots not contiguous")
                replaced = []
                done = False
                for t in order:
                    if t in beyond:
                        if not done:
                            replaced.append(p_letter(pid))
                            done = True
                    else:
                        replaced.append(t)
                order = replaced
            q.default_order = tuple(
                t
                for t in order
                if (t.kind is None and t.name.startswith("_p"))
                or (t.kind is not None and slot_module.get(t) in q.modules)
            )
        for p in pnodes.values():
            order = list(pi0)
            for qid in p.qneighbors:
                beyond = set(slots_beyond(p.node_id, ("Q", qid)))
                replaced = []
                done = False
                for t in order:
                    if t in beyond:
                        if not done:
                            replaced.append(q_letter(qid))
                            done = True
                    else:
                        replaced.append(t)
                order = replaced
            p.default_order = tuple(t for t in order if t.kind is None)

    tree = PqmTree(G, word, root_case, modules, qnodes, pnodes, pi0)
    return tree
