"""Brute-force ground truth by filtered enumeration of token arrangements.

Deliberately independent of the PQM-tree machinery: only the circular-word
and graph primitives are used, so agreement between the tree-based
enumeration and this filter is a genuine cross-validation.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional

from .graphs import Graph, Rel, classify_pair, clique_helly_in_word
from .words import CircularWord, Token


class OracleCapExceeded(RuntimeError):
    pass


def enumerate_by_filter(G: Graph, cap: int = 2_000_000) -> List[CircularWord]:
    """All conformal models of G, deduplicated by rotation.

    Backtracking over token placements with the first token pinned (killing
    rotations) and pair relations checked as soon as both endpoints of a
    vertex are placed.
    """
    vs = list(G.vertices)
    if not vs:
        return []
    required = {}
    for i, v in enumerate(vs):
        for u in vs[i + 1:]:
            required[(v, u)] = classify_pair(G, v, u)

    n2 = 2 * len(vs)
    first = Token(vs[0], 0)
    tokens = sorted(
        (Token(v, j) for v in vs for j in (0, 1)),
        key=lambda t: t.sort_key(),
    )
    tokens.remove(first)

    placed: List[Token] = [first]
    pos: Dict[Token, int] = {first: 0}
    done: List[str] = []  # vertices with both endpoints placed
    out: List[CircularWord] = []
    explored = 0

    def geom(v, u):
        v0, v1 = pos[Token(v, 0)], pos[Token(v, 1)]
        u0, u1 = pos[Token(u, 0)], pos[Token(u, 1)]

        def in_v(p):
            return (p - v0) % n2 <= (v1 - v0) % n2

        def in_u(p):
            return (p - u0) % n2 <= (u1 - u0) % n2

        if in_v(u0) != in_v(u1):
            return Rel.OVERLAP
        ul, vl = in_v(u0), in_u(v0) and in_u(v1)
        if ul and vl:
            return Rel.COVER_CIRCLE
        if ul:
            return Rel.CONTAINS
        if vl:
            return Rel.CONTAINED_IN
        return Rel.DISJOINT

    def rec(remaining):
        nonlocal explored
        if not remaining:
            if len(out) >= cap:
                raise OracleCapExceeded(f"more than {cap} models")
            out.append(CircularWord(tuple(placed)))
            return
        explored += 1
        for i, t in enumerate(remaining):
            other = Token(t.name, 1 - t.kind)
            placed.append(t)
            pos[t] = len(placed) - 1
            ok = True
            if other in pos:
                v = t.name
                for u in done:
                    key = (v, u) if (v, u) in required else (u, v)
                    want = required[key]
                    got = geom(*key)
                    if got is not want:
                        ok = False
                        break
                if ok:
                    done.append(v)
            if ok:
                rec(remaining[:i] + remaining[i + 1:])
                if other in pos and done and done[-1] == t.name:
                    done.pop()
            elif other in pos:
                pass
            placed.pop()
            del pos[t]

    # note: positions are final indices only when the full word is built;
    # but relations computed on the final length are identical to those on
    # the completed word since every index is fixed at placement time.
    rec(tokens)
    return out


# The subtlety above: geom() uses n2 (the final length) while intermediate
# words are shorter, but every placed token already sits at its final index,
# so arcs between completed vertices are exactly the final ones.


def models_helly_matrix(models: Iterable[CircularWord], G: Graph, cliques):
    """Per-clique bitmask over the model list: bit m set iff Helly in model m."""
    models = list(models)
    masks = []
    for C in cliques:
        bits = 0
        for i, w in enumerate(models):
            if clique_helly_in_word(w, G, C):
                bits |= 1 << i
        masks.append(bits)
    return masks


def oracle_clique_type(G: Graph, C, models: Optional[List[CircularWord]] = None) -> str:
    """'always-helly' | 'always-non-helly' | 'ambiguous' by exhaustion
    (early exit once both outcomes have been observed)."""
    if models is None:
        models = enumerate_by_filter(G)
    if not models:
        raise ValueError("graph admits no conformal model")
    seen_yes = seen_no = False
    for w in models:
        if clique_helly_in_word(w, G, C):
            seen_yes = True
        else:
            seen_no = True
        if seen_yes and seen_no:
            return "ambiguous"
    return "always-helly" if seen_yes else "always-non-helly"


def oracle_helly_cliques(
    G: Graph, cliques, models: Optional[List[CircularWord]] = None
) -> bool:
    """YES iff some conformal model realizes every clique simultaneously."""
    if models is None:
        models = enumerate_by_filter(G)
    for w in models:
        if all(clique_helly_in_word(w, G, C) for C in cliques):
            return True
    return False
