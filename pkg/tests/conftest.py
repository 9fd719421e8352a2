import itertools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import pytest

from hellyarc.graphs import graph_from_model
from hellyarc.generators import (
    matching_complement,
    random_model,
    staircase,
)
from hellyarc.oracle import enumerate_by_filter
from hellyarc.pqmtree import build_pqm_tree
from hellyarc.words import word_from_text

# the 4-vertex cover-pair example: u and v cover the circle, x and y are
# nested witnesses keeping the neighbourhoods apart
COVER4 = "u^0 v^1 x^0 x^1 v^0 u^1 y^0 y^1"

NAMED_SMALL = [
    "a^0 a^1",
    "a^0 b^0 a^1 b^1",
    "a^0 a^1 b^0 b^1",
    "a^0 b^1 c^0 a^1 b^0 c^1",
    "a^0 b^0 c^0 a^1 b^1 c^1",
    COVER4,
]


def small_suite_words():
    """Deterministic corpus of conformal models with n <= 5 (>= 50)."""
    words = [word_from_text(t) for t in NAMED_SMALL]
    words.append(matching_complement(2))
    words.append(staircase(4))
    words.append(staircase(5))
    for n in range(1, 6):
        seeds = 10 if n <= 3 else 22
        for seed in range(seeds):
            words.append(random_model(n, seed))
    # dedupe by canonical form, keep deterministic order
    seen = set()
    out = []
    for w in words:
        if w not in seen:
            seen.add(w)
            out.append(w)
    assert len(out) >= 50
    return out


class Case:
    def __init__(self, word):
        self.word = word
        self.graph = graph_from_model(word)
        self._tree = None
        self._models = None

    @property
    def tree(self):
        if self._tree is None:
            self._tree = build_pqm_tree(self.word, self.graph)
        return self._tree

    @property
    def models(self):
        if self._models is None:
            self._models = enumerate_by_filter(self.graph)
        return self._models

    def all_cliques(self, max_size=None):
        vs = list(self.graph.vertices)
        hi = len(vs) if max_size is None else min(max_size, len(vs))
        out = []
        for r in range(1, hi + 1):
            for comb in itertools.combinations(vs, r):
                if self.graph.is_clique(comb):
                    out.append(frozenset(comb))
        return out


@pytest.fixture(scope="session")
def small_suite():
    return [Case(w) for w in small_suite_words()]


@pytest.fixture(scope="session")
def midsize_suite():
    """Instances with n in 6..8 whose model sets stay enumerable by the
    PQM-tree (the certified oracle beyond n = 5)."""
    out = []
    for n in (6, 7, 8):
        for seed in range(8):
            w = random_model(n, seed)
            case = Case(w)
            try:
                count = case.tree.count_choices(4000)
            except Exception:
                continue
            if count <= 4000:
                case._models = list(case.tree.enumerate_models(cap=5000))
                out.append(case)
    assert len(out) >= 12
    return out
