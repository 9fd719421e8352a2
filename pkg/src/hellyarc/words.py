"""Circular words over chord-endpoint tokens and point letters.

A circular word is the universal representation used throughout this
package: a cyclic sequence of tokens, where each token is either one of
the two endpoints of an oriented chord (``a^0`` for the tail, ``a^1``
for the head) or a bare point letter.  Two words are equal when one is
a rotation of the other.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True, order=False)
class Token:
    """An endpoint token (kind 0 or 1) or a point letter (kind None)."""

    name: str
    kind: Optional[int] = None

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"bad token name: {self.name!r}")
        if self.kind not in (None, 0, 1):
            raise ValueError(f"bad token kind: {self.kind!r}")
        object.__setattr__(self, "_hash", hash((self.name, self.kind)))

    def __hash__(self):
        return self._hash

    @property
    def is_point(self) -> bool:
        return self.kind is None

    def flipped(self) -> "Token":
        """Swap superscripts 0 <-> 1; point letters are unchanged."""
        if self.kind is None:
            return self
        return Token(self.name, 1 - self.kind)

    def sort_key(self):
        return (self.name, -1 if self.kind is None else self.kind)

    def __str__(self):
        if self.kind is None:
            return self.name
        return f"{self.name}^{self.kind}"

    def __repr__(self):
        return f"Token({str(self)!r})"


def parse_token(text: str) -> Token:
    if "^" in text:
        name, _, sup = text.partition("^")
        if sup not in ("0", "1"):
            raise ValueError(f"bad superscript in token {text!r}")
        return Token(name, int(sup))
    return Token(text)


def tail(name: str) -> Token:
    return Token(name, 0)


def head(name: str) -> Token:
    return Token(name, 1)


def _least_rotation(keys: Sequence) -> int:
    """Booth's algorithm: index of the lexicographically least rotation."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) + list(keys)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


class CircularWord:
    """An immutable circular sequence of distinct tokens.

    Equality and hashing are rotation-invariant.  The stored linear
    order is an arbitrary cut of the circle, read clockwise.
    """

    __slots__ = ("tokens", "_canon")

    def __init__(self, tokens: Iterable[Token]):
        toks = tuple(tokens)
        if len(set(toks)) != len(toks):
            raise ValueError("circular word has a repeated token")
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("CircularWord is immutable")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def canonical(self) -> tuple:
        """The lexicographically least rotation under (name, kind) order."""
        if self._canon is None:
            keys = [t.sort_key() for t in self.tokens]
            k = _least_rotation(keys)
            object.__setattr__(
                self, "_canon", self.tokens[k:] + self.tokens[:k]
            )
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, CircularWord):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __str__(self):
        return " ".join(str(t) for t in self.tokens)

    def __repr__(self):
        return f"CircularWord({str(self)!r})"

    def rotate(self, k: int) -> "CircularWord":
        n = len(self.tokens)
        if n == 0:
            return self
        k %= n
        return CircularWord(self.tokens[k:] + self.tokens[:k])

    def reflect(self) -> "CircularWord":
        """Reverse the reading direction and swap endpoint superscripts."""
        return CircularWord(tuple(t.flipped() for t in reversed(self.tokens)))

    def restrict(self, keep) -> "CircularWord":
        """The word restricted to ``keep``, cyclic order preserved."""
        keep = set(keep)
        missing = keep - set(self.tokens)
        if missing:
            raise ValueError(f"tokens not in word: {sorted(map(str, missing))}")
        return CircularWord(t for t in self.tokens if t in keep)

    def positions(self) -> dict:
        return {t: i for i, t in enumerate(self.tokens)}

    def is_contiguous(self, subset) -> bool:
        """True iff ``subset`` occupies consecutive cyclic positions."""
        subset = set(subset)
        missing = subset - set(self.tokens)
        if missing:
            raise ValueError(f"tokens not in word: {sorted(map(str, missing))}")
        n = len(self.tokens)
        k = len(subset)
        if k in (0, n):
            return True
        inside = [t in subset for t in self.tokens]
        # count transitions out of the subset going around the circle
        exits = sum(
            1 for i in range(n) if inside[i] and not inside[(i + 1) % n]
        )
        return exits == 1

    def runs(self, subset) -> list:
        """Maximal cyclic runs of ``subset`` positions, each as a list of
        positions in clockwise order."""
        subset = set(subset)
        n = len(self.tokens)
        inside = [t in subset for t in self.tokens]
        if all(inside):
            return [list(range(n))]
        # find a position outside the subset to cut the circle
        start = next(i for i in range(n) if not inside[i])
        runs = []
        cur = None
        for off in range(1, n + 1):
            i = (start + off) % n
            if inside[i]:
                if cur is None:
                    cur = []
                cur.append(i)
            else:
                if cur is not None:
                    runs.append(cur)
                    cur = None
        if cur is not None:
            runs.append(cur)
        return runs


def word_from_text(text: str) -> CircularWord:
    return CircularWord(parse_token(p) for p in text.split())


def endpoint_tokens(vertices) -> set:
    return {Token(v, j) for v in vertices for j in (0, 1)}
