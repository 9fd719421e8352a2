"""Strong-module trees of overlap graphs and transitive orientations.

The decomposition is the classic recursion: parallel at a disconnected
graph, serial at a disconnected complement, and otherwise prime with the
maximal proper modules as children.  Children of a prime node are found
by partition refinement (maximal modules avoiding a pivot) plus module
closures; everything is cross-checked in the tests against a 2^n
brute-force strong-module finder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Set, Tuple


class OrientationError(ValueError):
    """A quotient expected to be transitively orientable is not."""


@dataclass
class MDNode:
    verts: FrozenSet[str]
    kind: str  # 'leaf' | 'serial' | 'parallel' | 'prime'
    children: List["MDNode"] = field(default_factory=list)

    def all_nodes(self) -> Iterator["MDNode"]:
        yield self
        for c in self.children:
            yield from c.all_nodes()

    def inner_nodes(self) -> Iterator["MDNode"]:
        for n in self.all_nodes():
            if n.kind != "leaf":
                yield n

    def leaf_for(self, v: str) -> "MDNode":
        node = self
        while node.kind != "leaf":
            node = next(c for c in node.children if v in c.verts)
        return node

    def __repr__(self):
        return f"MDNode({self.kind}, {{{','.join(sorted(self.verts))}}})"


def _components(verts: Set[str], nb) -> List[Set[str]]:
    left = set(verts)
    comps = []
    while left:
        seed = min(left)
        comp = {seed}
        stack = [seed]
        while stack:
            v = stack.pop()
            for u in nb(v):
                if u in left and u not in comp:
                    comp.add(u)
                    stack.append(u)
        comps.append(comp)
        left -= comp
    return comps


def _is_module(S: Set[str], verts: Set[str], adj) -> bool:
    for x in verts - S:
        hits = len(adj[x] & S)
        if hits != 0 and hits != len(S):
            return False
    return True


def _closure(seed: Set[str], verts: Set[str], adj) -> Set[str]:
    """The minimal module of (verts, adj) containing seed."""
    M = set(seed)
    changed = True
    while changed:
        changed = False
        for x in verts - M:
            hits = len(adj[x] & M)
            if hits != 0 and hits != len(M):
                M.add(x)
                changed = True
    return M


def _refine_avoiding(v: str, verts: Set[str], adj) -> List[Set[str]]:
    """Coarsest partition of verts - {v} into modules avoiding v."""
    rest = verts - {v}
    blocks = [b for b in (adj[v] & rest, rest - adj[v]) if b]
    changed = True
    while changed:
        changed = False
        for s in sorted(verts):
            new_blocks = []
            for b in blocks:
                if s in b or len(b) == 1:
                    new_blocks.append(b)
                    continue
                b1 = b & adj[s]
                b2 = b - adj[s]
                if b1 and b2:
                    new_blocks.extend([b1, b2])
                    changed = True
                else:
                    new_blocks.append(b)
            blocks = new_blocks
    return blocks


def decompose(verts: Iterable[str], adj: Dict[str, Set[str]]) -> MDNode:
    """Strong-module tree of the graph (verts, adj)."""
    verts = set(verts)
    if not verts:
        raise ValueError("empty vertex set")
    if len(verts) == 1:
        return MDNode(frozenset(verts), "leaf")

    comps = _components(verts, lambda v: adj[v] & verts)
    if len(comps) > 1:
        return MDNode(
            frozenset(verts),
            "parallel",
            [decompose(c, adj) for c in sorted(comps, key=min)],
        )
    co = _components(verts, lambda v: verts - adj[v] - {v})
    if len(co) > 1:
        return MDNode(
            frozenset(verts),
            "serial",
            [decompose(c, adj) for c in sorted(co, key=min)],
        )

    # prime: children are the maximal proper modules
    ladj = {v: adj[v] & verts for v in verts}
    pivot = min(verts)
    blocks = _refine_avoiding(pivot, verts, ladj)
    children: List[Set[str]] = []
    rest: Set[str] = set()
    for b in blocks:
        if _closure(b | {pivot}, verts, ladj) == verts:
            children.append(b)
        else:
            rest |= b
    pivot_child = rest | {pivot}
    if not _is_module(pivot_child, verts, ladj):
        raise OrientationError("prime decomposition failed: pivot child not a module")
    children.append(pivot_child)
    if sum(len(c) for c in children) != len(verts):
        raise OrientationError("prime decomposition failed: not a partition")
    return MDNode(
        frozenset(verts),
        "prime",
        [decompose(c, adj) for c in sorted(children, key=min)],
    )


def brute_force_strong_modules(verts: Sequence[str], adj) -> Set[FrozenSet[str]]:
    """All strong modules by exhaustive enumeration (tests only, n <= ~10)."""
    verts = sorted(verts)
    vset = set(verts)
    modules = []
    for r in range(1, len(verts) + 1):
        for comb in itertools.combinations(verts, r):
            S = set(comb)
            if _is_module(S, vset, adj):
                modules.append(frozenset(S))
    strong = set()
    for m in modules:
        ok = True
        for other in modules:
            if m is other:
                continue
            if m & other and not (m <= other or other <= m):
                ok = False
                break
        if ok:
            strong.add(m)
    return strong


# ---------------------------------------------------------------------------
# transitive orientations

def quotient_adjacency(children: Sequence[FrozenSet[str]], adj) -> Dict[int, Set[int]]:
    """Adjacency between child modules (uniform by moduleness)."""
    reps = [min(c) for c in children]
    q = {i: set() for i in range(len(children))}
    for i in range(len(children)):
        for j in range(i + 1, len(children)):
            if reps[j] in adj[reps[i]]:
                q[i].add(j)
                q[j].add(i)
    return q


def prime_orientation(qadj: Dict[int, Set[int]]) -> Set[Tuple[int, int]]:
    """One transitive orientation of a prime quotient, by edge forcing.

    The second orientation is the reverse.  Raises OrientationError if
    the quotient is not a prime comparability graph.
    """
    nodes = sorted(qadj)
    edges = {(i, j) for i in nodes for j in qadj[i] if i < j}
    if not edges:
        return set()
    orient: Dict[Tuple[int, int], Tuple[int, int]] = {}
    seed = min(edges)
    queue = [seed]
    orient[seed] = seed
    while queue:
        a, b = orient[queue.pop()]
        # edges {a,c} with b,c non-adjacent are forced a->c
        for c in qadj[a]:
            if c != b and c not in qadj[b]:
                key = (min(a, c), max(a, c))
                want = (a, c)
                if key in orient:
                    if orient[key] != want:
                        raise OrientationError("orientation forcing conflict")
                else:
                    orient[key] = want
                    queue.append(key)
        # edges {c,b} with a,c non-adjacent are forced c->b
        for c in qadj[b]:
            if c != a and c not in qadj[a]:
                key = (min(c, b), max(c, b))
                want = (c, b)
                if key in orient:
                    if orient[key] != want:
                        raise OrientationError("orientation forcing conflict")
                else:
                    orient[key] = want
                    queue.append(key)
    if len(orient) != len(edges):
        raise OrientationError("prime quotient has several implication classes")
    rel = set(orient.values())
    # verify transitivity
    for (a, b) in rel:
        for (c, d) in rel:
            if b == c and (a, d) not in rel:
                raise OrientationError("forced orientation is not transitive")
    return rel


def transitive_orientations(kind: str, children_count: int, qadj=None):
    """All transitive orientations of a node's quotient.

    prime    -> exactly two (one the reverse of the other)
    serial   -> one per linear order of the children (lazy)
    parallel -> the single empty orientation
    """
    if kind == "parallel":
        yield frozenset()
        return
    if kind == "serial":
        for perm in itertools.permutations(range(children_count)):
            yield frozenset(
                (perm[i], perm[j])
                for i in range(children_count)
                for j in range(i + 1, children_count)
            )
        return
    if kind == "prime":
        fwd = prime_orientation(qadj)
        yield frozenset(fwd)
        yield frozenset((b, a) for a, b in fwd)
        return
    raise ValueError(f"no orientations for node kind {kind!r}")


# ---------------------------------------------------------------------------
# permutation models <-> orientation pairs

def permutation_model_from_orientations(U: Sequence[str], prec, less):
    """Two permutations realizing (U, ~) from orientations of ~ and of ||.

    ``prec`` orients the overlap pairs, ``less`` the non-overlap pairs;
    tau0 sorts by prec + less, tau1 by prec + reversed(less).
    """
    U = list(U)

    def total_sort(rel):
        order = {}
        succ = {v: set() for v in U}
        indeg = {v: 0 for v in U}
        for a, b in rel:
            succ[a].add(b)
            indeg[b] += 1
        froms = sorted(v for v in U if indeg[v] == 0)
        out = []
        avail = list(froms)
        while avail:
            if len(avail) != 1:
                raise ValueError("orientation pair does not induce a total order")
            v = avail.pop()
            out.append(v)
            for u in sorted(succ[v]):
                indeg[u] -= 1
                if indeg[u] == 0:
                    avail.append(u)
        if len(out) != len(U):
            raise ValueError("orientation pair does not induce a total order")
        return out

    pairs = set(prec) | set(less)
    if any((b, a) in pairs for a, b in pairs):
        raise ValueError("orientations conflict")
    tau0 = total_sort(set(prec) | set(less))
    tau1 = total_sort(set(prec) | {(b, a) for a, b in less})
    return tuple(tau0), tuple(tau1)


def orientations_from_model(tau0: Sequence[str], tau1: Sequence[str]):
    """The orientation pair (prec of ~, less of ||) encoded by a model."""
    p0 = {v: i for i, v in enumerate(tau0)}
    p1 = {v: i for i, v in enumerate(tau1)}
    if set(p0) != set(p1) or len(p0) != len(tau0):
        raise ValueError("tau0, tau1 must be permutations of the same set")
    prec = set()
    less = set()
    vs = list(tau0)
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            if p1[a] < p1[b]:
                prec.add((a, b))  # same order in both: crossing pair
            else:
                less.add((a, b))
    return frozenset(prec), frozenset(less)
