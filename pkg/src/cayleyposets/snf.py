"""Integer Smith and Hermite normal forms on lists of Python ints (exact, unbounded)."""
from __future__ import annotations

from typing import NamedTuple, Sequence

Matrix = list[list[int]]


class SNF(NamedTuple):
    U: Matrix
    S: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(cols)] for row in A]


def det(A: Matrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(mat: Sequence[Sequence[int]]) -> SNF:
    """U, S, V with U*mat*V = S diagonal, d1 | d2 | ..., U and V unimodular.

    Pivots are chosen by least absolute value to keep entries small.
    """
    A = [list(map(int, r)) for r in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        for M in (A, U):
            rs, rd = M[src], M[dst]
            for k in range(len(rd)):
                rd[k] += q * rs[k]

    def add_col(dst, src, q):
        for M in (A, V):
            for r in M:
                r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return SNF(U, A, V)
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            for M in (A, U):
                M[t] = [-v for v in M[t]]
    return SNF(U, A, V)


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows``; zero rows dropped.

    Pivots are positive and entries above a pivot lie in [0, pivot).
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0]) if ncols is None else ncols
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[k] = A[k], A[r]
            if len(nz) == 1:
                break
            p = A[r][c]
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        if r < len(A) and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            p = A[r][c]
            for i in range(r):
                q = A[i][c] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
        if r == len(A):
            break
    return [row for row in A[:r] if any(row)]
