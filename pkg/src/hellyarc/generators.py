"""Instance builders: the betweenness reduction, random conformal models,
and named example families used across the test-suite."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence

from . import graphs
from .graphs import Graph, Rel, classify_pair, graph_from_model, is_conformal
from .words import CircularWord, Token, word_from_text


class NormalizationFailed(ValueError):
    pass


def vertex_names(n: int) -> List[str]:
    if n <= 26:
        return [chr(97 + i) for i in range(n)]
    return [f"v{i:03d}" for i in range(n)]


# ---------------------------------------------------------------------------
# normalization: repair an intersection model into a conformal model

_SEVERITY = {
    Rel.COVER_CIRCLE: 0,
    Rel.CONTAINS: 1,
    Rel.CONTAINED_IN: 1,
    Rel.OVERLAP: 2,
    Rel.DISJOINT: 3,
}


def normalize(word: CircularWord, G: Graph = None) -> CircularWord:
    """Turn an intersection model into a conformal model by extending arcs.

    Repeatedly repairs the most severe violated pair by relocating one
    endpoint token minimally past the blocking endpoint.  Fails loudly if
    no fixpoint is reached within |V|^2 + 2|V| rounds.
    """
    if G is None:
        G = graph_from_model(word)
    required = {}
    vl = list(G.vertices)
    for i, v in enumerate(vl):
        for u in vl[i + 1:]:
            required[(v, u)] = classify_pair(G, v, u)

    max_rounds = len(vl) * len(vl) + 2 * len(vl) + 4
    cur = word
    for _ in range(max_rounds):
        viol = graphs.conformal_violations(cur, G)
        if not viol:
            return cur
        viol.sort(key=lambda x: (_SEVERITY[x[2]], x[0], x[1]))
        v, u, want, got = viol[0]
        cur = _repair(cur, v, u, want, got)
        if graph_from_model(cur) != None and graphs.graph_from_model(cur).adj != G.adj:
            raise NormalizationFailed(
                f"extension changed the intersection graph at pair ({v},{u})"
            )
    raise NormalizationFailed("no fixpoint within the round bound")


def _move_token(word: CircularWord, tok: Token, after: Token) -> CircularWord:
    toks = [t for t in word.tokens if t != tok]
    i = toks.index(after)
    return CircularWord(toks[: i + 1] + [tok] + toks[i + 1:])


def _move_token_before(word: CircularWord, tok: Token, before: Token) -> CircularWord:
    toks = [t for t in word.tokens if t != tok]
    i = toks.index(before)
    return CircularWord(toks[:i] + [tok] + toks[i:])


def _repair(word, v, u, want, got) -> CircularWord:
    pos = word.positions()
    n = len(word)

    def in_arc(p, x):
        x0, x1 = pos[Token(x, 0)], pos[Token(x, 1)]
        return (p - x0) % n <= (x1 - x0) % n

    if want is Rel.CONTAINS:  # v must contain u
        if not in_arc(pos[Token(u, 1)], v):
            return _move_token(word, Token(v, 1), Token(u, 1))
        return _move_token_before(word, Token(v, 0), Token(u, 0))
    if want is Rel.CONTAINED_IN:
        return _repair(word, u, v, Rel.CONTAINS, got)
    if want is Rel.COVER_CIRCLE:
        # each arc must swallow the other's endpoints
        if not in_arc(pos[Token(u, 0)], v):
            return _move_token_before(word, Token(v, 0), Token(u, 0))
        if not in_arc(pos[Token(u, 1)], v):
            return _move_token(word, Token(v, 1), Token(u, 1))
        if not in_arc(pos[Token(v, 0)], u):
            return _move_token_before(word, Token(u, 0), Token(v, 0))
        return _move_token(word, Token(u, 1), Token(v, 1))
    if want is Rel.OVERLAP:
        if got in (Rel.CONTAINS, Rel.COVER_CIRCLE):
            # stretch u's head past v's head so u is no longer inside v
            return _move_token(word, Token(u, 1), Token(v, 1))
        if got is Rel.CONTAINED_IN:
            return _move_token(word, Token(v, 1), Token(u, 1))
        raise NormalizationFailed(f"({v},{u}) disjoint but must overlap")
    raise NormalizationFailed(f"({v},{u}) intersect but must be disjoint")


# ---------------------------------------------------------------------------
# random conformal models

def random_model(n: int, seed: int = 0, max_tries: int = 400) -> CircularWord:
    """A random conformal model on n vertices, deterministic per seed."""
    if n < 1:
        raise ValueError("n >= 1")
    rng = random.Random(100003 * n + seed)
    names = vertex_names(n)
    tokens = [Token(v, j) for v in names for j in (0, 1)]
    for _ in range(max_tries):
        toks = tokens[:]
        rng.shuffle(toks)
        w = CircularWord(toks)
        G = graph_from_model(w)
        try:
            fixed = normalize(w, G)
        except NormalizationFailed:
            continue
        if is_conformal(fixed, graph_from_model(fixed)):
            return fixed
    raise NormalizationFailed(f"no conformal model after {max_tries} tries")


# ---------------------------------------------------------------------------
# instances

@dataclass
class Instance:
    word: CircularWord
    cliques: List[frozenset]

    @property
    def graph(self) -> Graph:
        return graph_from_model(self.word)


def from_total_ordering(universe: Sequence, triples) -> Instance:
    """The betweenness reduction: YES iff some linear order of the universe
    puts every triple's middle element between its outer two.

    A serial M-node with one disjoint pair {u_i, v_i} of opposite
    orientations per universe element lives inside a single CA-module of
    a serial-root graph; its slot words order the pairs linearly, and the
    cliques {v_x,u_y,u_z} and {v_z,u_x,u_y} of a triple (x,y,z) are
    simultaneously realizable iff the pair of y sits between those of x
    and z.
    """
    items = list(universe)
    if len(set(items)) != len(items):
        raise ValueError("universe has repeats")
    index = {s: i for i, s in enumerate(items)}
    for t in triples:
        if len(t) != 3 or len(set(t)) != 3:
            raise ValueError(f"bad triple: {t!r}")
        for s in t:
            if s not in index:
                raise ValueError(f"triple element {s!r} not in universe")
    n = len(items)
    u = [f"u{i}" for i in range(n)]
    v = [f"v{i}" for i in range(n)]
    # one CA-module holding all the pairs plus a far-side pad chord t_ that
    # keeps the module a single co-component; a second module (the disjoint
    # pair w_, w2_) makes the root serial without universal vertices
    slot0: List[Token] = [Token("t_", 1)]
    slot1: List[Token] = []
    for i in range(n):
        slot0 += [Token(v[i], 1), Token(u[i], 0)]
        slot1 += [Token(u[i], 1), Token(v[i], 0)]
    slot1.append(Token("t_", 0))
    toks = (
        slot0
        + [Token("w2_", 1), Token("w_", 0)]
        + slot1
        + [Token("w_", 1), Token("w2_", 0)]
    )
    word = CircularWord(toks)
    cliques = []
    for (x, y, z) in triples:
        ix, iy, iz = index[x], index[y], index[z]
        cliques.append(frozenset({v[ix], u[iy], u[iz]}))
        cliques.append(frozenset({v[iz], u[ix], u[iy]}))
    return Instance(word, cliques)


def brute_force_total_ordering(universe: Sequence, triples) -> bool:
    import itertools

    items = list(universe)
    for perm in itertools.permutations(items):
        rank = {s: i for i, s in enumerate(perm)}
        if all(
            rank[x] < rank[y] < rank[z] or rank[x] > rank[y] > rank[z]
            for (x, y, z) in triples
        ):
            return True
    return False


def matching_complement(n: int) -> CircularWord:
    """A conformal model of K_{2n} minus a perfect matching.

    Arc j covers positions [2j, 2j + 2n - 1] of a 4n-position circle, so
    arcs j and j+n are complementary (the removed matching) and everything
    else intersects.  The graph has 2^n maximal cliques.
    """
    if n < 2:
        raise ValueError("n >= 2")
    names = vertex_names(2 * n)
    toks: List[Token] = [None] * (4 * n)
    for j in range(2 * n):
        toks[2 * j] = Token(names[j], 0)
        toks[(2 * j + 2 * n - 1) % (4 * n)] = Token(names[j], 1)
    return CircularWord(toks)


def rigid_four() -> Instance:
    """An 8-vertex instance whose clique {a,b,c,d} forms the size-4
    non-Helly structure in both of its conformal models."""
    w = word_from_text(
        "a^0 c^1 p^0 p^1 b^0 d^1 q^0 q^1 c^0 a^1 r^0 r^1 d^0 b^1 s^0 s^1"
    )
    return Instance(w, [frozenset("abcd")])


def staircase(n: int) -> CircularWord:
    """The cycle C_n as overlapping consecutive arcs (prime overlap graph
    for n >= 5)."""
    if n < 4:
        raise ValueError("n >= 4")
    names = vertex_names(n)
    toks: List[Token] = [None] * (2 * n)
    for i in range(n):
        toks[2 * i] = Token(names[i], 0)
        toks[(2 * i + 3) % (2 * n)] = Token(names[i], 1)
    return CircularWord(toks)


def prime_blobs(n_ring: int, k: int) -> Instance:
    """A prime-root instance with k private ambiguous cliques.

    A ring of n_ring consecutive-overlap arcs (prime overlap graph for
    n_ring >= 5) where k spread-out ring vertices are each replaced by a
    crossing pair {x_i, y_i} with opposite orientations; the cliques are
    the triangles {x_i, y_i, r_i} with r_i the preceding ring vertex, so
    each clique is private for its pair-module and ambiguous.
    """
    if n_ring < 5:
        raise ValueError("n_ring >= 5")
    if k > n_ring // 3:
        raise ValueError("k too large for the ring")
    base = staircase(n_ring)
    names = vertex_names(n_ring)
    toks = list(base.tokens)
    cliques = []
    for i in range(k):
        ring_v = names[3 * i]
        prev_v = names[(3 * i - 1) % n_ring]
        x, y, q, z = f"x{i}", f"y{i}", f"q{i}", f"z{i}"
        out = []
        for t in toks:
            # the old ring arc spreads into a 4-chord permutation module
            # in which x and y cross with opposite orientations (q and z
            # keep the neighbourhoods of the pair incomparable)
            if t == Token(ring_v, 0):
                out += [Token(q, 1), Token(x, 0), Token(y, 1), Token(z, 0)]
            elif t == Token(ring_v, 1):
                out += [Token(x, 1), Token(q, 0), Token(z, 1), Token(y, 0)]
            else:
                out.append(t)
        toks = out
        cliques.append(frozenset({x, y, prev_v}))
    return Instance(CircularWord(toks), cliques)
