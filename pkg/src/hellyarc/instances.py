"""Line-oriented instance and witness files.

    # comment
    model: a^0 b^1 c^0 a^1 b^0 c^1
    clique: a b c

Witness files reuse the ``model:`` line and add one ``point: C_i <gap>``
line per clique, where the gap index points at the space after the
i-th token of the model line (0-based, cyclic).
"""

from __future__ import annotations

from typing import Dict

from .solver import HellyInstance
from .words import CircularWord, parse_token


class InstanceFormatError(ValueError):
    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        super().__init__(msg if lineno is None else f"line {lineno}: {msg}")


def parse_instance(text: str) -> HellyInstance:
    word = None
    cliques = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise InstanceFormatError(f"expected 'key: value', got {line!r}", lineno)
        key = key.strip()
        if key == "model":
            if word is not None:
                raise InstanceFormatError("second model line", lineno)
            try:
                word = CircularWord(parse_token(p) for p in rest.split())
            except ValueError as e:
                raise InstanceFormatError(str(e), lineno)
            if len(word) == 0:
                raise InstanceFormatError("empty model", lineno)
        elif key == "clique":
            vs = rest.split()
            if not vs:
                raise InstanceFormatError("empty clique line", lineno)
            cliques.append(frozenset(vs))
        elif key == "point":
            continue  # witness annotations are ignored on input
        else:
            raise InstanceFormatError(f"unknown key {key!r}", lineno)
    if word is None:
        raise InstanceFormatError("no model line")
    return HellyInstance(word, cliques)


def write_instance(inst: HellyInstance) -> str:
    lines = ["model: " + str(inst.word)]
    for C in inst.cliques:
        lines.append("clique: " + " ".join(sorted(C)))
    return "\n".join(lines) + "\n"


def write_witness(word: CircularWord, cliques, placements: Dict[int, int]) -> str:
    lines = ["model: " + str(word)]
    for i, C in enumerate(cliques):
        lines.append("clique: " + " ".join(sorted(C)))
    for i in sorted(placements):
        lines.append(f"point: C_{i + 1} {placements[i]}")
    return "\n".join(lines) + "\n"
