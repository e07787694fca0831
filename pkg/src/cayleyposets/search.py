"""Backtracking search for multiplication tables realising a poset.

Variables are the n*n table entries, each holding a bitmask domain.  For a
fixed candidate S the constraints are

* x*s lies in up(x) for s in S, and {x*s : s in S} covers up(x);
* associativity, propagated whenever an entry becomes decided;
* an optional identity fixing a row and a column;
* with ``prune`` on: left multiplications are monotone and an idempotent m
  forces m*x = x above m.

Branching picks the first undecided entry in row-major order and tries values
in ascending order, so the first table found is the lexicographically least
one compatible with the candidate.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .poset import Poset, bits, hasse


class BudgetExceeded(Exception):
    pass


@dataclass
class SearchStats:
    nodes: int = 0
    candidates: int = 0
    closed: Counter = field(default_factory=Counter)
    elapsed: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.candidates += other.candidates
        self.closed.update(other.closed)
        self.elapsed += other.elapsed

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "candidates": self.candidates,
                "closed": dict(sorted(self.closed.items())),
                "elapsed": round(self.elapsed, 6)}


class _Conflict(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class TableSearch:
    """Search for one candidate ``S`` (bitmask) and optional identity."""

    def __init__(self, P: Poset, s_mask: int, identity: Optional[int] = None,
                 prune: bool = True, budget: Optional[int] = None,
                 stats: Optional[SearchStats] = None):
        self.P = P
        self.n = n = P.n
        self.s_mask = s_mask
        self.S = list(bits(s_mask))
        self.identity = identity
        self.prune = prune
        self.budget = budget
        self.stats = stats if stats is not None else SearchStats()
        self.covers = hasse(P)
        if prune:
            size = 1 << n
            upc = [0] * size
            dnc = [0] * size
            for m in range(1, size):
                low = m & -m
                v = low.bit_length() - 1
                upc[m] = upc[m ^ low] | P.up[v]
                dnc[m] = dnc[m ^ low] | P.down[v]
            self.upc, self.dnc = upc, dnc

    # -- state helpers ---------------------------------------------------------
    def _initial(self):
        n, P = self.n, self.P
        full = (1 << n) - 1
        dom = []
        for x in range(n):
            for y in range(n):
                dom.append(P.up[x] if (self.s_mask >> y) & 1 else full)
        fixed = [-1] * (n * n)
        queue: list[int] = []
        dirty = set(range(n))
        for i, m in enumerate(dom):
            if m & (m - 1) == 0:
                fixed[i] = m.bit_length() - 1
                queue.append(i)
        e = self.identity
        state = (dom, fixed, queue, dirty)
        if e is not None:
            for x in range(n):
                self._assign(state, e * n + x, 1 << x, "identity")
                self._assign(state, x * n + e, 1 << x, "identity")
        return state

    def _assign(self, state, i: int, mask: int, reason: str) -> None:
        dom, fixed, queue, dirty = state
        old = dom[i]
        new = old & mask
        if new == old:
            return
        if not new:
            raise _Conflict(reason)
        dom[i] = new
        dirty.add(i // self.n)
        if new & (new - 1) == 0:
            fixed[i] = new.bit_length() - 1
            queue.append(i)

    # -- propagation -------------------------------------------------------------
    def _event(self, state, i: int) -> None:
        dom, fixed, _, _ = state
        n = self.n
        assign = self._assign
        a, b = divmod(i, n)
        c = fixed[i]
        an, bn, cn = a * n, b * n, c * n
        # (a b) d = a (b d)
        for d in range(n):
            bd = bn + d
            cd = cn + d
            e = fixed[bd]
            if e >= 0:
                ae = an + e
                m = dom[cd] & dom[ae]
                assign(state, cd, m, "associativity")
                assign(state, ae, m, "associativity")
            else:
                L = dom[cd]
                keep = 0
                R = 0
                for e in bits(dom[bd]):
                    v = dom[an + e]
                    if v & L:
                        keep |= 1 << e
                        R |= v
                assign(state, bd, keep, "associativity")
                assign(state, cd, R, "associativity")
        # (x a) b = x (a b) = x c
        for x in range(n):
            xa = x * n + a
            xc = x * n + c
            y = fixed[xa]
            if y >= 0:
                yb = y * n + b
                m = dom[yb] & dom[xc]
                assign(state, yb, m, "associativity")
                assign(state, xc, m, "associativity")
            else:
                L = dom[xc]
                keep = 0
                R = 0
                for y in bits(dom[xa]):
                    v = dom[y * n + b]
                    if v & L:
                        keep |= 1 << y
                        R |= v
                assign(state, xa, keep, "associativity")
                assign(state, xc, R, "associativity")
        cbit = 1 << c
        for j in range(n * n):
            fj = fixed[j]
            if fj == a:
                # a = x y, so a b = (x y) b = x (y b)
                x, y = divmod(j, n)
                yb = y * n + b
                e = fixed[yb]
                if e >= 0:
                    assign(state, x * n + e, cbit, "associativity")
                else:
                    keep = 0
                    xn = x * n
                    for e in bits(dom[yb]):
                        if dom[xn + e] & cbit:
                            keep |= 1 << e
                    assign(state, yb, keep, "associativity")
            if fj == b:
                # b = y d, so a b = a (y d) = (a y) d
                y, d = divmod(j, n)
                ay = an + y
                c2 = fixed[ay]
                if c2 >= 0:
                    assign(state, c2 * n + d, cbit, "associativity")
                else:
                    keep = 0
                    for c2 in bits(dom[ay]):
                        if dom[c2 * n + d] & cbit:
                            keep |= 1 << c2
                    assign(state, ay, keep, "associativity")
        if self.prune and a == b == c:
            for x in bits(self.P.up[a]):
                assign(state, an + x, 1 << x, "idempotent")

    def _row(self, state, x: int) -> None:
        dom = state[0]
        n = self.n
        xn = x * n
        assign = self._assign
        if self.prune:
            upc, dnc = self.upc, self.dnc
            for y, z in self.covers:
                dy = dom[xn + y]
                dz = dom[xn + z]
                assign(state, xn + y, dnc[dz], "monotone")
                assign(state, xn + z, upc[dy], "monotone")
        S = self.S
        for u in bits(self.P.up[x]):
            ub = 1 << u
            hit = -1
            count = 0
            for s in S:
                if dom[xn + s] & ub:
                    count += 1
                    hit = s
                    if count > 1:
                        break
            if count == 0:
                raise _Conflict("onto")
            if count == 1:
                assign(state, xn + hit, ub, "onto")

    def _propagate(self, state) -> None:
        queue, dirty = state[2], state[3]
        while queue or dirty:
            while queue:
                self._event(state, queue.pop())
            if dirty:
                self._row(state, dirty.pop())

    # -- driver --------------------------------------------------------------
    def solve(self) -> Optional[list[list[int]]]:
        """Return the least realising table, or None when the space is exhausted.

        Raises BudgetExceeded when the node budget runs out.
        """
        t0 = time.perf_counter()
        self.stats.candidates += 1
        try:
            try:
                state = self._initial()
                self._propagate(state)
            except _Conflict as exc:
                self.stats.closed[exc.reason] += 1
                return None
            found = self._dfs(state[0], state[1])
        finally:
            self.stats.elapsed += time.perf_counter() - t0
        if found is None:
            return None
        n = self.n
        return [found[x * n:(x + 1) * n] for x in range(n)]

    def _dfs(self, dom, fixed) -> Optional[list[int]]:
        try:
            i = fixed.index(-1)
        except ValueError:
            return list(fixed)
        stats = self.stats
        for v in bits(dom[i]):
            stats.nodes += 1
            if self.budget is not None and stats.nodes > self.budget:
                raise BudgetExceeded()
            dom2 = list(dom)
            fixed2 = list(fixed)
            state = (dom2, fixed2, [], set())
            try:
                self._assign(state, i, 1 << v, "branch")
                self._propagate(state)
            except _Conflict as exc:
                stats.closed[exc.reason] += 1
                continue
            out = self._dfs(dom2, fixed2)
            if out is not None:
                return out
        return None
