"""Independent brute-force oracles.

Nothing here imports the search engine or the verifier: membership is checked
straight from the definitions (associativity, closure, identity, and
x <= y iff x*s = y for some s in S).
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

KINDS = ("semigroup", "monoid", "full", "full_monoid")


def leq_matrix(P) -> np.ndarray:
    return np.array([[P.leq(x, y) for y in range(P.n)] for x in range(P.n)], dtype=bool)


def realizes(table, S, le) -> bool:
    n = len(table)
    for x in range(n):
        reach = {table[x][s] for s in S}
        if reach != {y for y in range(n) if le[x][y]}:
            return False
    return True


def closed(table, S) -> bool:
    s = set(S)
    return all(table[a][b] in s for a in S for b in S)


def identity_of(table):
    n = len(table)
    for e in range(n):
        if all(table[e][x] == x and table[x][e] == x for x in range(n)):
            return e
    return None


def associative(table) -> bool:
    n = len(table)
    return all(table[table[a][b]][c] == table[a][table[b][c]]
               for a in range(n) for b in range(n) for c in range(n))


def certificate_is_valid(le, kind, table, S, identity) -> bool:
    """Definition-level check of a (kind, table, S, identity) certificate."""
    n = len(le)
    if len(table) != n or any(len(r) != n for r in table):
        return False
    if any(not 0 <= v < n for r in table for v in r) or not S:
        return False
    if not associative(table) or not closed(table, S):
        return False
    if kind in ("full", "full_monoid") and set(S) != set(range(n)):
        return False
    if kind in ("monoid", "full_monoid") and identity is None:
        return False
    if identity is not None:
        if identity not in S:
            return False
        if any(table[identity][x] != x or table[x][identity] != x for x in range(n)):
            return False
    return realizes(table, S, le)


@lru_cache(maxsize=None)
def associative_tables(n: int) -> tuple:
    """All associative n x n tables, n <= 3, by vectorised exhaustion."""
    cells = n * n
    count = n ** cells
    idx = np.arange(count, dtype=np.int64)
    digits = np.empty((count, cells), dtype=np.int64)
    for c in range(cells):
        digits[:, cells - 1 - c] = idx % n
        idx //= n
    t = digits.reshape(count, n, n)
    ok = np.ones(count, dtype=bool)
    rows = np.arange(count)
    for a, b, c in itertools.product(range(n), repeat=3):
        ab = t[:, a, b]
        bc = t[:, b, c]
        ok &= t[rows, ab, c] == t[rows, a, bc]
    return tuple(tuple(tuple(int(v) for v in r) for r in tab) for tab in t[ok])


def brute_classes(P) -> dict:
    """Membership in every class for n <= 3 by exhausting all tables and all S."""
    n = P.n
    le = leq_matrix(P)
    found = {k: False for k in KINDS}
    everything = tuple(range(n))
    for table in associative_tables(n):
        e = identity_of(table)
        for r in range(1, n + 1):
            for S in itertools.combinations(range(n), r):
                if not closed(table, S) or not realizes(table, S, le):
                    continue
                found["semigroup"] = True
                full = S == everything
                found["full"] |= full
                if e is not None and e in S:
                    found["monoid"] = True
                    found["full_monoid"] |= full
        if all(found.values()):
            break
    found["act"] = True
    return found


def _upsets(P):
    n = P.n
    for mask in range(1, 1 << n):
        S = [x for x in range(n) if mask >> x & 1]
        if all(mask >> y & 1 for x in S for y in range(n) if P.leq(x, y)):
            yield S


def table_exists(P, S, identity=None) -> bool:
    """Naive backtracking: row-major filling, full associativity check on decided triples.

    Entries x*s with s in S are restricted to up(x) (needed for realisation);
    no other inference is made.
    """
    n = P.n
    le = leq_matrix(P)
    in_s = [x in S for x in range(n)]
    t = [[-1] * n for _ in range(n)]
    if identity is not None:
        for x in range(n):
            t[identity][x] = x
            t[x][identity] = x
    cells = [(x, y) for x in range(n) for y in range(n) if t[x][y] < 0]

    def consistent(a, b) -> bool:
        for x, y, z in itertools.product(range(n), repeat=3):
            xy, yz = t[x][y], t[y][z]
            if xy < 0 or yz < 0:
                continue
            l, r = t[xy][z], t[x][yz]
            if l >= 0 and r >= 0 and l != r:
                return False
        return True

    def row_ok(x) -> bool:
        return {t[x][s] for s in S} == {y for y in range(n) if le[x][y]}

    def rec(k) -> bool:
        if k == len(cells):
            return all(row_ok(x) for x in range(n))
        x, y = cells[k]
        choices = [v for v in range(n) if le[x][v]] if in_s[y] else range(n)
        for v in choices:
            t[x][y] = v
            if consistent(x, y):
                done_row = k + 1 == len(cells) or cells[k + 1][0] != x
                if not done_row or row_ok(x):
                    if rec(k + 1):
                        return True
        t[x][y] = -1
        return False

    if identity is not None and not consistent(0, 0):
        return False
    return rec(0)


def constrained_classes(P) -> dict:
    """Class membership with S restricted to upsets and S = up(e) for monoids."""
    n = P.n
    everything = list(range(n))
    full = table_exists(P, everything)
    semigroup = full or any(table_exists(P, S) for S in _upsets(P) if S != everything)
    monoid = any(table_exists(P, [y for y in range(n) if P.leq(e, y)], e) for e in range(n))
    full_monoid = any(table_exists(P, everything, e) for e in range(n))
    return {"semigroup": semigroup, "monoid": monoid, "full": full,
            "full_monoid": full_monoid, "act": True}


def all_relations_posets(n: int) -> list:
    """Every partial order on n labelled points as a tuple of up-masks."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in range(1 << len(pairs)):
        le = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                le[i][j] = True
        ok = all(not (le[i][j] and le[j][i]) for i, j in pairs)
        ok = ok and all(not (le[i][j] and le[j][k]) or le[i][k]
                        for i in range(n) for j in range(n) for k in range(n))
        if ok:
            out.append(tuple(sum(1 << j for j in range(n) if le[i][j]) for i in range(n)))
    return out


def iso_by_permutation(P, Q):
    if P.n != Q.n:
        return None
    for perm in itertools.permutations(range(P.n)):
        if all(P.leq(x, y) == Q.leq(perm[x], perm[y]) for x in range(P.n) for y in range(P.n)):
            return perm
    return None
