"""Graphs derived from arc/chord models and the five normalized pair relations.

The relation of a pair of distinct vertices in a normalized circular-arc
model is determined by closed-neighbourhood comparisons:

  1. non-adjacent                        -> disjoint arcs
  2. N[u] strictly inside N[v]           -> arc of v contains arc of u
  3. symmetric to 2
  4. adjacent, N[v] u N[u] = V, and every
     exclusive neighbour is dominated    -> the two arcs cover the circle
  5. anything else                       -> the arcs overlap (chords cross)

Pairs with N[u] = N[v] (twins) are classified as overlapping: equal
closed neighbourhoods never force a containment or a covering, and the
corresponding arcs in a model must cross.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .words import CircularWord, Token


class Rel(Enum):
    DISJOINT = "disjoint"
    CONTAINS = "contains"
    CONTAINED_IN = "contained-in"
    COVER_CIRCLE = "cover-circle"
    OVERLAP = "overlap"


def _swap(rel: Rel) -> Rel:
    if rel is Rel.CONTAINS:
        return Rel.CONTAINED_IN
    if rel is Rel.CONTAINED_IN:
        return Rel.CONTAINS
    return rel


class MalformedModelError(ValueError):
    pass


class NotConformalError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        v, u, want, got = violations[0]
        super().__init__(
            f"not a conformal model: pair ({v},{u}) expected {want.value}, "
            f"model shows {got.value}"
        )


class Graph:
    """A simple graph with string vertex names."""

    __slots__ = ("vertices", "adj")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Tuple[str, str]]):
        vs = tuple(sorted(set(vertices)))
        adj = {v: set() for v in vs}
        for a, b in edges:
            if a == b:
                raise ValueError(f"loop at {a}")
            adj[a].add(b)
            adj[b].add(a)
        self.vertices = vs
        self.adj = {v: frozenset(ns) for v, ns in adj.items()}

    def __contains__(self, v):
        return v in self.adj

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges(self):
        return [(a, b) for a in self.vertices for b in self.adj[a] if a < b]

    def adjacent(self, a, b) -> bool:
        return b in self.adj[a]

    def closed_nb(self, v) -> FrozenSet[str]:
        return self.adj[v] | {v}

    def induced(self, keep) -> "Graph":
        keep = set(keep)
        return Graph(keep, [(a, b) for a, b in self.edges() if a in keep and b in keep])

    def is_clique(self, vs) -> bool:
        vs = list(vs)
        return all(
            self.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]
        )

    def twins(self, a, b) -> bool:
        return a != b and self.closed_nb(a) == self.closed_nb(b)

    def universal_vertices(self):
        full = set(self.vertices)
        return [v for v in self.vertices if self.closed_nb(v) == full]

    def maximal_cliques(self):
        """Bron-Kerbosch with pivoting; yields frozensets."""
        adj = self.adj

        def bk(r, p, x):
            if not p and not x:
                yield frozenset(r)
                return
            pivot = max(p | x, key=lambda v: len(adj[v] & p))
            for v in sorted(p - adj[pivot]):
                yield from bk(r | {v}, p & adj[v], x & adj[v])
                p = p - {v}
                x = x | {v}

        yield from bk(set(), set(self.vertices), set())

    def is_chordal_on(self, vs) -> bool:
        """Chordality of the induced subgraph, by maximum-cardinality search."""
        vs = sorted(vs)
        if len(vs) <= 3:
            return True
        inset = set(vs)
        weight = {v: 0 for v in vs}
        order = []
        numbered = set()
        for _ in vs:
            v = max((u for u in vs if u not in numbered), key=lambda u: (weight[u], u))
            order.append(v)
            numbered.add(v)
            for u in self.adj[v]:
                if u in inset and u not in numbered:
                    weight[u] += 1
        order.reverse()  # perfect elimination order candidate
        pos = {v: i for i, v in enumerate(order)}
        for v in order:
            later = [u for u in self.adj[v] if u in inset and pos[u] > pos[v]]
            if later:
                w = min(later, key=lambda u: pos[u])
                for u in later:
                    if u != w and not self.adjacent(w, u):
                        return False
        return True


# ---------------------------------------------------------------------------
# reading a graph off a model word

def _check_word_shape(word: CircularWord):
    seen: Dict[str, set] = {}
    for t in word:
        if t.kind is None:
            continue
        seen.setdefault(t.name, set()).add(t.kind)
    bad = [v for v, kinds in seen.items() if kinds != {0, 1}]
    if bad:
        raise MalformedModelError(f"missing endpoints for: {sorted(bad)}")
    return set(seen)


def model_vertices(word: CircularWord) -> set:
    return _check_word_shape(word)


def graph_from_model(word: CircularWord) -> Graph:
    """Intersection graph of the arcs read from the word.

    The arc of ``v`` is the clockwise span from ``v^0`` to ``v^1``.
    """
    vs = _check_word_shape(word)
    pos = word.positions()
    n = len(word)

    def in_arc(p, v):
        a0, a1 = pos[Token(v, 0)], pos[Token(v, 1)]
        return (p - a0) % n <= (a1 - a0) % n

    vl = sorted(vs)
    edges = []
    for i, v in enumerate(vl):
        for u in vl[i + 1:]:
            if (
                in_arc(pos[Token(u, 0)], v)
                or in_arc(pos[Token(u, 1)], v)
                or in_arc(pos[Token(v, 0)], u)
            ):
                edges.append((v, u))
    return Graph(vs, edges)


def word_relation(word: CircularWord, pos, v: str, u: str) -> Rel:
    """Geometric relation of the arcs/oriented chords of v and u in the word."""
    n = len(word)
    v0, v1 = pos[Token(v, 0)], pos[Token(v, 1)]
    u0, u1 = pos[Token(u, 0)], pos[Token(u, 1)]

    def in_v(p):
        return (p - v0) % n <= (v1 - v0) % n

    def in_u(p):
        return (p - u0) % n <= (u1 - u0) % n

    if in_v(u0) != in_v(u1):
        return Rel.OVERLAP
    u_left_of_v = in_v(u0) and in_v(u1)
    v_left_of_u = in_u(v0) and in_u(v1)
    if u_left_of_v and v_left_of_u:
        return Rel.COVER_CIRCLE
    if u_left_of_v:
        return Rel.CONTAINS
    if v_left_of_u:
        return Rel.CONTAINED_IN
    return Rel.DISJOINT


def classify_pair(G: Graph, v: str, u: str) -> Rel:
    """The normalized relation required for the ordered pair (v, u)."""
    if v == u:
        raise ValueError("pair must be distinct")
    nv, nu = G.closed_nb(v), G.closed_nb(u)
    if u not in nv:
        return Rel.DISJOINT
    if nv == nu:
        return Rel.OVERLAP
    if nu < nv:
        return Rel.CONTAINS
    if nv < nu:
        return Rel.CONTAINED_IN
    allv = set(G.vertices)
    if nv | nu == allv:
        if all(G.closed_nb(w) < nv for w in nv - nu) and all(
            G.closed_nb(w) < nu for w in nu - nv
        ):
            return Rel.COVER_CIRCLE
    return Rel.OVERLAP


def all_relations(G: Graph) -> Dict[Tuple[str, str], Rel]:
    rels = {}
    for i, v in enumerate(G.vertices):
        for u in G.vertices[i + 1:]:
            r = classify_pair(G, v, u)
            rels[(v, u)] = r
            rels[(u, v)] = _swap(r)
    return rels


def left_right_sets(G: Graph):
    """ls(v): contained-in-v or covering with v; rs(v): disjoint or containing v."""
    rels = all_relations(G)
    ls = {v: set() for v in G.vertices}
    rs = {v: set() for v in G.vertices}
    for (v, u), r in rels.items():
        if r in (Rel.CONTAINS, Rel.COVER_CIRCLE):
            ls[v].add(u)
        elif r in (Rel.DISJOINT, Rel.CONTAINED_IN):
            rs[v].add(u)
    return ls, rs


def conformal_violations(word: CircularWord, G: Graph):
    """All pairs whose geometric relation disagrees with the required one."""
    vs = _check_word_shape(word)
    if vs != set(G.vertices):
        raise MalformedModelError(
            f"word vertices {sorted(vs)} != graph vertices {list(G.vertices)}"
        )
    pos = word.positions()
    out = []
    for i, v in enumerate(G.vertices):
        for u in G.vertices[i + 1:]:
            want = classify_pair(G, v, u)
            got = word_relation(word, pos, v, u)
            if want is not got:
                out.append((v, u, want, got))
    return out


def check_conformal(word: CircularWord, G: Graph):
    bad = conformal_violations(word, G)
    if bad:
        raise NotConformalError(bad)


def is_conformal(word: CircularWord, G: Graph) -> bool:
    return not conformal_violations(word, G)


def overlap_adjacency(G: Graph) -> Dict[str, set]:
    """Adjacency of the overlap graph (pairs classified overlapping)."""
    rels = all_relations(G)
    sim = {v: set() for v in G.vertices}
    for (v, u), r in rels.items():
        if r is Rel.OVERLAP:
            sim[v].add(u)
    return sim


# ---------------------------------------------------------------------------
# twin / universal preprocessing

@dataclass
class Preprocessed:
    graph: Graph
    word: Optional[CircularWord]
    twin_classes: Dict[str, FrozenSet[str]]  # representative -> original class
    universal: FrozenSet[str]

    def map_clique(self, clique) -> FrozenSet[str]:
        """Map a clique on original vertices to the reduced graph."""
        back = {}
        for rep, cls in self.twin_classes.items():
            for v in cls:
                back[v] = rep
        out = set()
        for v in clique:
            if v in self.universal:
                continue
            out.add(back.get(v, v))
        out &= set(self.graph.vertices)
        return frozenset(out)


def preprocess(G: Graph, word: Optional[CircularWord] = None) -> Preprocessed:
    """Remove universal vertices and collapse twin classes to representatives.

    Iterates to a fixpoint; the returned word is the input word restricted
    to the surviving vertices' endpoint tokens.
    """
    current = G
    universal = set()
    # union-find over original vertices for twin classes
    parent = {v: v for v in G.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    changed = True
    while changed:
        changed = False
        vl = current.vertices
        for i, a in enumerate(vl):
            hit = None
            for b in vl[i + 1:]:
                if current.twins(a, b):
                    hit = b
                    break
            if hit is not None:
                parent[find(hit)] = find(a)
                current = current.induced(set(vl) - {hit})
                changed = True
                break
        if changed:
            continue
        full = set(current.vertices)
        if len(full) >= 2:
            for v in current.vertices:
                if current.closed_nb(v) == full:
                    universal.add(v)
                    current = current.induced(full - {v})
                    changed = True
                    break

    classes: Dict[str, set] = {}
    for v in G.vertices:
        if v in universal:
            continue
        classes.setdefault(find(v), set()).add(v)
    twin_classes = {
        rep: frozenset(cls) for rep, cls in classes.items() if len(cls) > 1
    }
    new_word = None
    if word is not None:
        keep = {Token(v, j) for v in current.vertices for j in (0, 1)}
        new_word = word.restrict(keep)
    return Preprocessed(current, new_word, twin_classes, frozenset(universal))


# ---------------------------------------------------------------------------
# Helly gap tests (shared by the oracle and the tree-based analysis)

def gaps_left_of_all(word: CircularWord, vertices) -> list:
    """Gap indices lying on the left side of every listed vertex's chord.

    Gap ``i`` is the space between token ``i`` and token ``i+1`` (cyclic).
    It lies left of the chord of ``v`` exactly when it is interior to the
    clockwise arc from ``v^0`` to ``v^1``.
    """
    pos = word.positions()
    n = len(word)
    out = []
    for i in range(n):
        ok = True
        for v in vertices:
            a0 = pos[Token(v, 0)]
            a1 = pos[Token(v, 1)]
            if not (i - a0) % n < (a1 - a0) % n:
                ok = False
                break
        if ok:
            out.append(i)
    return out


def clique_helly_in_word(word: CircularWord, G: Graph, clique) -> bool:
    """True iff the clique's arcs share a point in this model."""
    clique = sorted(set(clique))
    if not G.is_clique(clique):
        raise ValueError(f"not a clique: {clique}")
    if not clique:
        return True
    return bool(gaps_left_of_all(word, clique))
