"""A small 2-SAT engine: implication graph plus Tarjan SCC."""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Set, Tuple

Literal = Tuple[Hashable, bool]  # (variable, is_positive)


class TwoSatFormula:
    """Unit clauses and negated-conjunction clauses not(l1 and l2)."""

    def __init__(self):
        self.variables: Set[Hashable] = set()
        self.units: List[Literal] = []
        self.not_both: List[Tuple[Literal, Literal]] = []

    def add_variable(self, var):
        self.variables.add(var)

    def add_unit(self, var, positive: bool = True):
        self.variables.add(var)
        self.units.append((var, positive))

    def add_not_both(self, lit1: Literal, lit2: Literal):
        self.variables.add(lit1[0])
        self.variables.add(lit2[0])
        self.not_both.append((lit1, lit2))

    def clauses_or(self):
        """The formula as a list of OR-clauses over literals."""
        out = [[l] for l in self.units]
        for (v1, p1), (v2, p2) in self.not_both:
            out.append([(v1, not p1), (v2, not p2)])
        return out

    def satisfied_by(self, assignment: Dict[Hashable, bool]) -> bool:
        return all(
            any(assignment[v] == p for v, p in cl) for cl in self.clauses_or()
        )

    def solve(self) -> Optional[Dict[Hashable, bool]]:
        """A satisfying assignment, or None.

        Deterministic: variables are processed in sorted order and the
        assignment is extracted from Tarjan component indices.
        """
        vs = sorted(self.variables, key=repr)
        index = {v: i for i, v in enumerate(vs)}
        n = len(vs)
        # node 2i = v true, 2i+1 = v false
        succ: List[List[int]] = [[] for _ in range(2 * n)]

        def node(var, positive):
            return 2 * index[var] + (0 if positive else 1)

        def neg(x):
            return x ^ 1

        for cl in self.clauses_or():
            if len(cl) == 1:
                (v, p) = cl[0]
                succ[node(v, not p)].append(node(v, p))
            else:
                (v1, p1), (v2, p2) = cl
                succ[node(v1, not p1)].append(node(v2, p2))
                succ[node(v2, not p2)].append(node(v1, p1))

        N = 2 * n
        comp = [-1] * N
        order = [-1] * N
        low = [0] * N
        onstack = [False] * N
        stack: List[int] = []
        counter = [0]
        ncomp = [0]

        def strongconnect(root):
            work = [(root, 0)]
            while work:
                x, pi = work[-1]
                if pi == 0:
                    order[x] = low[x] = counter[0]
                    counter[0] += 1
                    stack.append(x)
                    onstack[x] = True
                recurse = False
                for i in range(pi, len(succ[x])):
                    y = succ[x][i]
                    if order[y] == -1:
                        work[-1] = (x, i + 1)
                        work.append((y, 0))
                        recurse = True
                        break
                    if onstack[y]:
                        low[x] = min(low[x], order[y])
                if recurse:
                    continue
                if low[x] == order[x]:
                    while True:
                        y = stack.pop()
                        onstack[y] = False
                        comp[y] = ncomp[0]
                        if y == x:
                            break
                    ncomp[0] += 1
                work.pop()
                if work:
                    px = work[-1][0]
                    low[px] = min(low[px], low[x])

        for x in range(N):
            if order[x] == -1:
                strongconnect(x)

        assignment = {}
        for v in vs:
            t, f = node(v, True), node(v, False)
            if comp[t] == comp[f]:
                return None
            # Tarjan emits sinks first: smaller component index = later
            # in topological order, and the implied literal wins
            assignment[v] = comp[t] < comp[f]
        if not self.satisfied_by(assignment):  # pragma: no cover
            raise AssertionError("2-SAT produced a falsifying assignment")
        return assignment
