"""The Helly-cliques solver: is there a conformal model in which all the
given cliques have nonempty arc intersections?

After dropping always-Helly cliques and rejecting on always-non-Helly
ones, two cases remain.  A prime or parallel root is handled by
enumerating slot-side tuples in {0,1}^k and checking, per affecting
node, that some admissible ordering binds every affected clique into its
chosen slot (prime nodes: one of two orderings; serial M-nodes: a child
digraph must be acyclic).  A serial root is handled by enumerating the
circular orders of the clique letters and the stabilizer insertions,
compiling a 2-SAT formula over "slot 0 above the stabilizer" variables
whose unit clauses come from per-module admissible-model tests and whose
binary clauses come from empty trapezoid intersections, and rebuilding a
witness with crossing segments from the trapezoid machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .cliquetype import AffectingNode, CliqueType, classify, mnode_ordering_binds, qnode_ordering_binds
from .graphs import Graph, gaps_left_of_all, graph_from_model, is_conformal
from .pqmtree import CaModule, MNode, PqmTree, build_pqm_tree
from .trapezoids import (
    FULL,
    SpannedTrapezoid,
    pick_segments,
    point,
    regions_disjoint,
    strict_left_of,
    strict_right_of,
)
from .twosat import TwoSatFormula
from .words import CircularWord, Token


@dataclass
class HellyInstance:
    word: CircularWord
    cliques: List[FrozenSet[str]]

    @property
    def graph(self) -> Graph:
        return graph_from_model(self.word)


@dataclass
class SolveResult:
    yes: bool
    witness: Optional[CircularWord] = None
    placements: Optional[Dict[int, int]] = None   # clique index -> gap index
    reason: str = ""

    def __bool__(self):
        return self.yes


class InvalidCliqueError(ValueError):
    pass


# ---------------------------------------------------------------------------
# admissible models for one CA-module under prescribed clique sequences

class AdmInfeasible(Exception):
    pass


def _slot_roles(m: CaModule, v: str, slot: int) -> str:
    """'tail' if v's token in this slot is v^0, else 'head'."""
    o = m.orientation(v)
    return "tail" if o == slot else "head"


def _lca(m: CaModule, a: str, b: str) -> MNode:
    node = m.mtree
    while True:
        child = [c for c in node.children if a in c.verts and b in c.verts]
        if not child:
            return node
        node = child[0]
        if node.kind == "leaf":
            return node


def _child_of_containing(node: MNode, v: str) -> str:
    return min(next(c.verts for c in node.children if v in c.verts))


def admissible_model_for_sides(
    tree: PqmTree, m: CaModule, alpha: Sequence[frozenset], beta: Sequence[frozenset]
):
    """An admissible model of the module whose slot-0 word carries the
    cliques of ``alpha`` in order and slot-1 word those of ``beta``,
    every letter left of all its member chords; None if impossible.

    Returns (choice, words) where choice assigns orderings to the
    module's inner nodes and words = (tokens0, tokens1) with the letters
    embedded as point tokens named per clique position in alpha/beta.
    """
    # accumulate child-order constraints per inner node
    orient = m._orient_map()
    constraints: Dict[tuple, set] = {}
    for slot, seq in ((0, alpha), (1, beta)):
        members = [[v for v in C if v in m.verts] for C in seq]
        tails = [[v for v in mem if orient[v] == slot] for mem in members]
        heads = [[v for v in mem if orient[v] != slot] for mem in members]
        for i in range(len(seq)):
            for j in range(i, len(seq)):
                for a in tails[i]:
                    for b in heads[j]:
                        if a == b:
                            continue
                        # need a's token before b's token in this slot word
                        if b in tree.sim()[a]:
                            node = _lca(m, a, b)
                            ka = _child_of_containing(node, a)
                            kb = _child_of_containing(node, b)
                            constraints.setdefault(node.node_id, set()).add(
                                (ka, kb)
                            )
                        else:
                            # fixed by <_S: token order in slot 0 follows <_S,
                            # in slot 1 it is reversed
                            want = (a, b) if slot == 0 else (b, a)
                            if want not in m.less:
                                return None

    choice: Dict[tuple, tuple] = {}
    for node in m.mtree.inner_nodes():
        cons = constraints.get(node.node_id, set())
        if any((b, a) in cons for a, b in cons):
            return None
        if node.kind == "prime":
            pick = None
            for ordering in node.orderings:
                pi0 = ordering[0]
                rank = {cid: r for r, cid in enumerate(pi0)}
                if all(rank[a] < rank[b] for a, b in cons):
                    pick = ordering
                    break
            if pick is None:
                return None
            choice[node.node_id] = pick
        elif node.kind == "serial":
            ids = sorted(node.child_ids())
            order = _topo(ids, cons)
            if order is None:
                return None
            choice[node.node_id] = (order, order)
        else:  # parallel: constraints cannot land here
            if cons:  # pragma: no cover
                raise AssertionError("constraint at a parallel node")
            choice[node.node_id] = node.orderings[0]

    w0, w1 = tree.expand_module(m, choice)
    words = []
    for slot, seq, w in ((0, alpha, w0), (1, beta, w1)):
        rank = {t.name: i for i, t in enumerate(w)}
        out = list(w)
        inserts = []
        prev = 0
        for pos, C in enumerate(seq):
            members = [v for v in C if v in m.verts]
            tails = [
                rank[v] for v in members if _slot_roles(m, v, slot) == "tail"
            ]
            heads = [
                rank[v] for v in members if _slot_roles(m, v, slot) == "head"
            ]
            lo = max(tails, default=-1) + 1      # insert-before index bounds
            hi = min(heads, default=len(w))
            at = max(lo, prev)
            if at > hi:
                return None
            inserts.append((at, pos))
            prev = at
        for at, pos in sorted(inserts, key=lambda x: (x[0], x[1]), reverse=True):
            out.insert(at, Token(f"_s{slot}_{pos}", None))
        words.append(out)
    return choice, (words[0], words[1])


def _topo(ids, cons) -> Optional[tuple]:
    succ = {i: set() for i in ids}
    indeg = {i: 0 for i in ids}
    for a, b in cons:
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    out = []
    avail = sorted(i for i in ids if indeg[i] == 0)
    while avail:
        x = avail.pop(0)
        out.append(x)
        for y in sorted(succ[x]):
            indeg[y] -= 1
            if indeg[y] == 0:
                avail.append(y)
        avail.sort()
    if len(out) != len(ids):
        return None
    return tuple(out)


# ---------------------------------------------------------------------------
# trapezoids of the serial case

def build_trapezoids(
    tree: PqmTree,
    m: CaModule,
    constraints_a: list,
    constraints_b: list,
    pin_a: Optional[Fraction],
    pin_b: Optional[Fraction],
) -> Tuple[SpannedTrapezoid, SpannedTrapezoid]:
    """(T_{S^0}, T_{S^1}) for one CA-module.

    ``constraints_a``: (x, orient) pairs for clique points on line A from
    cliques meeting the module but not private for it; ``pin_a``: the
    collapsed private-block coordinate on A, if any.
    """
    tops = {0: FULL, 1: FULL}
    bots = {0: FULL, 1: FULL}
    for j in (0, 1):
        if pin_a is not None:
            tops[j] = tops[j].intersect(point(pin_a))
        if pin_b is not None:
            bots[j] = bots[j].intersect(point(pin_b))
        for x, orient in constraints_a:
            want_left = orient == j
            cut = strict_left_of(x) if want_left else strict_right_of(x)
            tops[j] = tops[j].intersect(cut)
        for x, orient in constraints_b:
            want_left = orient == j
            cut = strict_left_of(x) if want_left else strict_right_of(x)
            bots[j] = bots[j].intersect(cut)
    return (
        SpannedTrapezoid(tops[0], bots[0]),
        SpannedTrapezoid(tops[1], bots[1]),
    )


# ---------------------------------------------------------------------------
# the serial-root case

def solve_serial(tree: PqmTree, cliques: List[frozenset], analyses) -> SolveResult:
    k = len(cliques)
    modules = tree.camodules
    by_name = tree.module_by_name

    # which module owns each private clique; None for public cliques
    owner_of: List[Optional[str]] = []
    for C, an in zip(cliques, analyses):
        owner_of.append(an.module)

    priv: Dict[str, List[int]] = {}
    for i, mn in enumerate(owner_of):
        if mn is not None:
            priv.setdefault(mn, []).append(i)

    meets: Dict[str, List[int]] = {}
    for i, C in enumerate(cliques):
        for mn in {tree.module_of_vertex[v] for v in C}:
            meets.setdefault(mn, []).append(i)

    def orientation_in(mn: str, i: int) -> int:
        m = by_name[mn]
        orients = {m.orientation(v) for v in cliques[i] if v in m.verts}
        assert len(orients) == 1
        return orients.pop()

    adm_cache: Dict[tuple, object] = {}

    def adm(mn: str, a_seq: tuple, b_seq: tuple):
        key = (mn, a_seq, b_seq)
        if key not in adm_cache:
            adm_cache[key] = admissible_model_for_sides(
                tree, by_name[mn],
                [cliques[i] for i in a_seq],
                [cliques[i] for i in b_seq],
            )
        return adm_cache[key]

    orders = (
        [(0,)] if k == 1 else
        [(0,) + p for p in itertools.permutations(range(1, k))]
    )
    for order in orders:
        splits = [(0, 0), (0, k)]
        for start in range(k):
            for length in range(1, k):
                splits.append((start, length))
        for start, length in splits:
            rot = order[start:] + order[:start]
            a_side = list(rot[:length])
            b_side = list(rot[length:])
            res = _try_serial_layout(
                tree, cliques, a_side, b_side, owner_of, priv, meets,
                orientation_in, adm,
            )
            if res is not None:
                return res
    return SolveResult(False, reason="no circular order of the cliques is good")


def serial_layout_formula(
    tree, cliques, a_side, b_side, owner_of, priv, meets, orientation_in, adm
):
    """The 2-SAT formula of one (circular order, stabilizer split) layout,
    plus the trapezoids and per-module side sequences; None when a module's
    private cliques are not consecutive on a side.

    Variable ``m`` true means module m's slot 0 sits above the stabilizer.
    """
    by_name = tree.module_by_name

    # private cliques of one module must be consecutive on each side
    per_side_seq: Dict[str, dict] = {}
    for side_name, side in (("A", a_side), ("B", b_side)):
        pos = {ci: p for p, ci in enumerate(side)}
        for mn, owned in priv.items():
            mine = [ci for ci in side if ci in owned]
            if mine:
                ps = [pos[ci] for ci in mine]
                if max(ps) - min(ps) != len(ps) - 1:
                    return None
            per_side_seq.setdefault(mn, {})[side_name] = tuple(mine)

    # collapse private blocks into points; one item per block/public letter
    def build_line(side):
        items = []
        seen_block = set()
        for ci in side:
            mn = owner_of[ci]
            if mn is None:
                items.append(("point", ci))
            elif mn not in seen_block:
                seen_block.add(mn)
                items.append(("block", mn))
        return items

    line_a = build_line(a_side)
    line_b = build_line(b_side)
    coord_a: Dict[tuple, Fraction] = {
        item: Fraction(i) for i, item in enumerate(line_a)
    }
    # clockwise on B runs right-to-left: first letter gets the largest x
    coord_b: Dict[tuple, Fraction] = {
        item: Fraction(len(line_b) - 1 - i) for i, item in enumerate(line_b)
    }

    def clique_point(ci) -> Tuple[str, Fraction]:
        mn = owner_of[ci]
        item = ("point", ci) if mn is None else ("block", mn)
        if ci in a_side:
            return ("A", coord_a[item])
        return ("B", coord_b[item])

    # trapezoids
    traps: Dict[str, Tuple[SpannedTrapezoid, SpannedTrapezoid]] = {}
    for m in tree.camodules:
        mn = m.name
        cons_a, cons_b = [], []
        for ci in meets.get(mn, []):
            if owner_of[ci] == mn:
                continue
            line, x = clique_point(ci)
            orient = orientation_in(mn, ci)
            (cons_a if line == "A" else cons_b).append((x, orient))
        pin_a = coord_a.get(("block", mn))
        pin_b = coord_b.get(("block", mn))
        traps[mn] = build_trapezoids(tree, m, cons_a, cons_b, pin_a, pin_b)

    # 2-SAT over "slot 0 above the stabilizer"
    formula = TwoSatFormula()
    adm_results: Dict[tuple, object] = {}
    for m in tree.camodules:
        mn = m.name
        formula.add_variable(mn)
        seqs = per_side_seq.get(mn, {})
        a_seq = seqs.get("A", ())
        b_seq = seqs.get("B", ())
        up = adm(mn, a_seq, b_seq)       # slot 0 above: slot0 carries A
        down = adm(mn, b_seq, a_seq)     # slot 1 above: slot0 carries B
        adm_results[(mn, True)] = up
        adm_results[(mn, False)] = down
        if up is None:
            formula.add_unit(mn, False)
        if down is None:
            formula.add_unit(mn, True)

    constrained = [
        m.name for m in tree.camodules
        if traps[m.name][0] != SpannedTrapezoid(FULL, FULL)
        or traps[m.name][1] != SpannedTrapezoid(FULL, FULL)
    ]
    for i, m1 in enumerate(constrained):
        for m2 in constrained[i + 1:]:
            for j1 in (0, 1):
                for j2 in (0, 1):
                    if regions_disjoint(traps[m1][j1], traps[m2][j2]):
                        formula.add_not_both((m1, j1 == 0), (m2, j2 == 0))

    import types

    return types.SimpleNamespace(
        formula=formula,
        traps=traps,
        per_side_seq=per_side_seq,
        adm_results=adm_results,
        coord_a=coord_a,
        coord_b=coord_b,
        clique_point=clique_point,
    )


def _try_serial_layout(
    tree, cliques, a_side, b_side, owner_of, priv, meets, orientation_in, adm
):
    by_name = tree.module_by_name
    layout = serial_layout_formula(
        tree, cliques, a_side, b_side, owner_of, priv, meets,
        orientation_in, adm,
    )
    if layout is None:
        return None
    traps = layout.traps
    per_side_seq = layout.per_side_seq
    adm_results = layout.adm_results
    clique_point = layout.clique_point

    assignment = layout.formula.solve()
    if assignment is None:
        return None

    # reconstruct: segments for the chosen trapezoids
    names = sorted(by_name)
    chosen = [traps[mn][0 if assignment[mn] else 1] for mn in names]
    segs = pick_segments(chosen)
    if isinstance(segs, tuple):  # pragma: no cover - excluded by the 2-SAT
        raise AssertionError("satisfying assignment left non-crossing trapezoids")

    # assemble the circular word: line A left-to-right, line B right-to-left
    items_a: List[tuple] = []
    items_b: List[tuple] = []
    for mn, (p, q) in zip(names, segs):
        up = assignment[mn]
        _, (w0, w1) = adm_results[(mn, up)]
        # w0 is the slot-0 word; when slot 1 is above the words swap roles
        top_word, bot_word = (w0, w1) if up else (w1, w0)
        items_a.append((p, 1, mn, tuple(top_word)))
        items_b.append((q, 1, mn, tuple(bot_word)))
    for ci in range(len(cliques)):
        if owner_of[ci] is None:
            line, x = clique_point(ci)
            tok = (Token(f"_c{ci}", None),)
            if line == "A":
                items_a.append((x, 0, f"_c{ci}", tok))
            else:
                items_b.append((x, 0, f"_c{ci}", tok))

    items_a.sort(key=lambda it: (it[0], it[1], it[2]))
    items_b.sort(key=lambda it: (it[0], it[1], it[2]), reverse=True)

    # flatten, translating embedded letter markers back to clique indices
    final: List[Tuple[Optional[int], Token]] = []
    for _, _, name, w in items_a + items_b:
        if name in by_name:
            mn = name
            up = assignment[mn]
            seqs = per_side_seq.get(mn, {})
            a_seq = seqs.get("A", ())
            b_seq = seqs.get("B", ())
            s0_seq, s1_seq = (a_seq, b_seq) if up else (b_seq, a_seq)
            seq_of = {0: s0_seq, 1: s1_seq}
            for t in w:
                if t.kind is None and t.name.startswith("_s"):
                    slot, pos = t.name[2:].split("_")
                    final.append((seq_of[int(slot)][int(pos)], t))
                else:
                    final.append((None, t))
        else:
            ci = int(name[2:])
            final.append((ci, w[0]))

    return _finish_witness(tree, cliques, final)


def _finish_witness(tree, cliques, final) -> SolveResult:
    """Strip letters, compute gap indices, and fully validate."""
    word_toks = [t for ci, t in final if ci is None]
    word = CircularWord(word_toks)
    n = len(word_toks)
    placements: Dict[int, int] = {}
    real_seen = 0
    for ci, t in final:
        if ci is None:
            real_seen += 1
        else:
            placements[ci] = (real_seen - 1) % n
    _validate_witness(tree, cliques, word, placements)
    return SolveResult(True, word, placements)


def _validate_witness(tree, cliques, word, placements):
    if not is_conformal(word, tree.graph):  # pragma: no cover
        raise AssertionError("witness is not a conformal model")
    for ci, C in enumerate(cliques):
        gaps = gaps_left_of_all(word, sorted(C))
        if placements.get(ci) not in gaps:  # pragma: no cover
            raise AssertionError(f"clique {sorted(C)} not realized at its gap")


# ---------------------------------------------------------------------------
# the prime / parallel case

def solve_prime_parallel(tree: PqmTree, cliques, analyses) -> SolveResult:
    k = len(cliques)
    for an in analyses:
        if an.public:  # pragma: no cover - excluded by the classification
            raise AssertionError("public ambiguous clique under a prime root")

    # collect affecting nodes per clique, grouped by node identity
    node_cliques: Dict[tuple, list] = {}
    node_obj: Dict[tuple, AffectingNode] = {}
    for i, an in enumerate(analyses):
        for aff in an.affecting:
            nid = (
                tree.qnodes[aff.node].node_id
                if aff.kind == "Q"
                else aff.node.node_id
            )
            node_cliques.setdefault(nid, []).append((i, aff))
            node_obj[nid] = aff

    for bits in itertools.product((0, 1), repeat=k):
        choice = {}
        ok = True
        for nid, hits in node_cliques.items():
            sample = hits[0][1]
            if sample.node_kind == "prime":
                if sample.kind == "Q":
                    q = tree.qnodes[sample.node]
                    options = list(tree.qnode_options(q))
                    binder = lambda aff, o, j: qnode_ordering_binds(tree, aff, o, j)
                else:
                    options = list(sample.node.orderings)
                    binder = lambda aff, o, j: mnode_ordering_binds(aff, o, j)
                for i, aff in hits:
                    options = [o for o in options if binder(aff, o, bits[i])]
                if not options:
                    ok = False
                    break
                choice[nid] = options[0]
            else:
                # serial M-node: accumulate child-order edges
                node: MNode = sample.node
                cons = set()
                for i, aff in hits:
                    j = bits[i]
                    if aff.kind == "D":
                        first, second = (aff.lset, aff.rset) if j == 0 else (
                            aff.rset, aff.lset
                        )
                        for a in first:
                            for b in second:
                                cons.add((a, b))
                    else:
                        first, second = (aff.lset, aff.rset) if j == 0 else (
                            aff.rset, aff.lset
                        )
                        for a in first:
                            cons.add((a, aff.kchild))
                        for b in second:
                            cons.add((aff.kchild, b))
                order = _topo(sorted(node.child_ids()), cons)
                if order is None:
                    ok = False
                    break
                choice[nid] = (order, order)
        if not ok:
            continue

        word = tree.generate_model(choice)
        all_gaps = tree.extend_with_cliques(word, cliques)
        placements = {}
        pos = word.positions()
        n = len(word)
        feasible = True
        for i, (C, an) in enumerate(zip(cliques, analyses)):
            m = tree.module_by_name[an.module]
            slot_tokens = {
                (m.t0(v) if bits[i] == 0 else m.t1(v)) for v in m.verts
            }
            run = word.runs(slot_tokens)[0]
            inside = set(run[:-1]) if len(run) > 1 else set()
            # a letter may also sit at the boundary gaps of a singleton slot
            cand = [g for g in all_gaps[i] if g in inside]
            if not cand:
                cand = [
                    g
                    for g in all_gaps[i]
                    if g in set(run) or (g + 1) % n in set(run)
                ]
            if not cand:  # pragma: no cover - binding guarantees a slot gap
                feasible = False
                break
            placements[i] = cand[0]
        if not feasible:  # pragma: no cover
            continue
        _validate_witness(tree, cliques, word, placements)
        return SolveResult(True, word, placements)
    return SolveResult(False, reason="no slot-side tuple is feasible")


# ---------------------------------------------------------------------------
# orchestration

def solve(instance: HellyInstance, tree: Optional[PqmTree] = None) -> SolveResult:
    G = instance.graph
    for C in instance.cliques:
        if not C:
            raise InvalidCliqueError("empty clique")
        if not G.is_clique(sorted(C)):
            raise InvalidCliqueError(f"not a clique: {sorted(C)}")
    if tree is None:
        tree = build_pqm_tree(instance.word, G)

    active: List[frozenset] = []
    active_idx: List[int] = []
    analyses = []
    for i, C in enumerate(instance.cliques):
        ctype, an = classify(tree, C)
        if ctype is CliqueType.ALWAYS_NON_HELLY:
            return SolveResult(
                False, reason=f"clique {sorted(C)} is always-non-Helly"
            )
        if ctype is CliqueType.AMBIGUOUS:
            active.append(frozenset(C))
            active_idx.append(i)
            analyses.append(an)

    if not active:
        word = tree.generate_model()
        result = SolveResult(True, word, {})
    elif tree.root_case == "serial":
        result = solve_serial(tree, active, analyses)
    else:
        result = solve_prime_parallel(tree, active, analyses)

    if not result.yes:
        return result

    # final placements for every input clique (dropped always-Helly ones too)
    word = result.witness
    placements = {}
    remap = {ai: orig for ai, orig in enumerate(active_idx)}
    for ai, g in (result.placements or {}).items():
        placements[remap[ai]] = g
    gaps_all = tree.extend_with_cliques(word, instance.cliques)
    for i, C in enumerate(instance.cliques):
        if i in placements:
            continue
        if not gaps_all[i]:  # pragma: no cover
            raise AssertionError("always-Helly clique lost its gap")
        placements[i] = gaps_all[i][0]
    _validate_witness(tree, instance.cliques, word, placements)
    return SolveResult(True, word, placements)
