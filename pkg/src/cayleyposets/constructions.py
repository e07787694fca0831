"""Certified constructions: new (poset, certificate) pairs from old ones.

Every function builds the multiplication table explicitly, then re-verifies
the result against the structurally constructed poset, so a returned
:class:`CertifiedPoset` is always valid.  Element order follows the matching
function in :mod:`cayleyposets.poset` (``product``, ``blowup``, ``series`` ...).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from . import poset as po
from .algebra import Certificate, verify_certificate
from .errors import (CertificateInvalid, HypothesisFailed, KindMismatch,
                     NotAHomomorphism, NotARetract, NotASemilattice,
                     NotJoinIrreducible, PreconditionFailed)
from .poset import SP, Endomorphism, Poset, bits

FULL_KINDS = ("full", "full_monoid")
MONOID_KINDS = ("monoid", "full_monoid")


@dataclass(frozen=True)
class CertifiedPoset:
    poset: Poset
    cert: Certificate

    def __post_init__(self):
        v = verify_certificate(self.poset, self.cert)
        if not v:
            raise CertificateInvalid(f"{v.reason}: {v.detail}")

    @property
    def kind(self) -> str:
        return self.cert.kind

    @property
    def table(self) -> tuple:
        return self.cert.table

    @property
    def is_full(self) -> bool:
        return self.cert.kind in FULL_KINDS

    @property
    def is_monoid(self) -> bool:
        return self.cert.kind in MONOID_KINDS

    def to_json(self) -> dict:
        return {"poset": {"n": self.poset.n, "labels": list(self.poset.labels),
                          "covers": [list(c) for c in po.hasse(self.poset)]},
                "certificate": self.cert.to_json()}


def _kind(full: bool, monoid: bool) -> str:
    if full and monoid:
        return "full_monoid"
    if full:
        return "full"
    return "monoid" if monoid else "semigroup"


def _finish(P: Poset, table, S, full: bool, identity: Optional[int]) -> CertifiedPoset:
    cert = Certificate(_kind(full, identity is not None), table, S, identity)
    v = verify_certificate(P, cert)
    if not v:
        raise RuntimeError(f"construction produced an invalid {cert.kind} certificate: "
                           f"{v.reason} {v.detail}")
    return CertifiedPoset(P, cert)


def singleton() -> CertifiedPoset:
    return CertifiedPoset(Poset((1,)), Certificate("full_monoid", [[0]], [0], 0))


def antichain_cert(k: int) -> CertifiedPoset:
    """Left-zero band: x*y = x."""
    return _finish(po.antichain(k), [[x] * k for x in range(k)], range(k), True, None)


# --- extrema and products ---------------------------------------------------------

def adjoin_extremum(cp: CertifiedPoset, which: str) -> CertifiedPoset:
    """Adjoin a neutral minimum (full input only) or an absorbing maximum."""
    n = cp.poset.n
    t = [list(r) for r in cp.table]
    if which == "min":
        if not cp.is_full:
            raise KindMismatch(f"adding a minimum needs a full certificate, got {cp.kind}")
        table = [r + [x] for x, r in enumerate(t)] + [list(range(n + 1))]
        return _finish(po.add_minimum(cp.poset), table, range(n + 1), True, n)
    if which == "max":
        table = [r + [n] for r in t] + [[n] * (n + 1)]
        S = list(cp.cert.s_subset) + [n]
        return _finish(po.add_maximum(cp.poset), table, S, cp.is_full, cp.cert.identity)
    raise ValueError("which must be 'min' or 'max'")


def product_cert(a: CertifiedPoset, b: CertifiedPoset) -> CertifiedPoset:
    """Componentwise operation; (i, j) sits at index i*|b| + j."""
    m = b.poset.n
    ta, tb = a.table, b.table
    N = a.poset.n * m
    table = [[ta[u // m][v // m] * m + tb[u % m][v % m] for v in range(N)] for u in range(N)]
    S = [i * m + j for i in a.cert.s_subset for j in b.cert.s_subset]
    e = None
    if a.is_monoid and b.is_monoid:
        e = a.cert.identity * m + b.cert.identity
    return _finish(po.product(a.poset, b.poset), table, S, a.is_full and b.is_full, e)


# --- retracts -------------------------------------------------------------------

def _as_map(sigma) -> tuple:
    return tuple(sigma.map if isinstance(sigma, Endomorphism) else sigma)


def check_retract(cp: CertifiedPoset, sigma) -> Optional[str]:
    """None if ``sigma`` is a retract onto S, otherwise the violated condition."""
    s = _as_map(sigma)
    t = cp.table
    n = cp.poset.n
    if len(s) != n or any(not 0 <= v < n for v in s):
        return "sigma must map the ground set into itself"
    S = set(cp.cert.s_subset)
    if set(s) != S:
        return "image of sigma is not S"
    if any(s[x] != x for x in S):
        return "sigma is not the identity on S"
    for a in range(n):
        for b in range(n):
            if s[t[a][b]] != t[s[a]][s[b]]:
                return f"sigma is not multiplicative at ({a}, {b})"
    return None


def retract_to_full(cp: CertifiedPoset, sigma) -> CertifiedPoset:
    """Full certificate from the operation t . t' = t sigma(t')."""
    why = check_retract(cp, sigma)
    if why:
        raise NotARetract(why)
    s = _as_map(sigma)
    n = cp.poset.n
    table = [[cp.table[x][s[y]] for y in range(n)] for x in range(n)]
    return _finish(cp.poset, table, range(n), True, None)


def find_retract(cp: CertifiedPoset) -> Optional[tuple]:
    """Least retract in lexicographic order, or None."""
    n = cp.poset.n
    t = cp.table
    S = list(cp.cert.s_subset)
    in_s = set(S)
    free = [x for x in range(n) if x not in in_s]
    s = [x if x in in_s else -1 for x in range(n)]

    def consistent() -> bool:
        for a in range(n):
            if s[a] < 0:
                continue
            for b in range(n):
                if s[b] < 0:
                    continue
                ab = t[a][b]
                if s[ab] >= 0 and s[ab] != t[s[a]][s[b]]:
                    return False
        return True

    def rec(k: int) -> bool:
        if k == len(free):
            return set(s) == in_s and consistent()
        x = free[k]
        for v in S:
            s[x] = v
            if consistent() and rec(k + 1):
                return True
        s[x] = -1
        return False

    if not consistent():
        return None
    return tuple(s) if rec(0) else None


# --- blowups --------------------------------------------------------------------

def irreducible_self_centered(cp: CertifiedPoset, x: int) -> dict:
    t = cp.table
    n = cp.poset.n
    irreducible = all(t[a][b] != x or x in (a, b) for a in range(n) for b in range(n))
    centered = all((t[y][x] == x) == (t[x][y] == x) for y in range(n))
    return {"irreducible": irreducible, "self_centered": centered}


def blowup_cert(cp: CertifiedPoset, x: int, cq: CertifiedPoset) -> CertifiedPoset:
    """Replace ``x`` by cq's poset; elements of P other than x come first, then Q's."""
    P, Q = cp.poset, cq.poset
    flags = irreducible_self_centered(cp, x)
    if not flags["irreducible"]:
        raise PreconditionFailed(f"{P.labels[x]} is not irreducible")
    if not flags["self_centered"]:
        raise PreconditionFailed(f"{P.labels[x]} is not self-centered")
    if x not in cp.cert.s_subset:
        raise PreconditionFailed(f"{P.labels[x]} is not in S")
    minimal = P.down[x] == 1 << x
    if not (minimal or cq.is_full):
        raise PreconditionFailed(f"{P.labels[x]} is not minimal and the inserted poset is not full")
    keep = [y for y in range(P.n) if y != x]
    pos = {y: i for i, y in enumerate(keep)}
    off = len(keep)
    T, V = cp.table, cq.table
    N = off + Q.n

    def mul(u: int, v: int) -> int:
        u_in_v, v_in_v = u >= off, v >= off
        if not u_in_v and not v_in_v:
            return pos[T[keep[u]][keep[v]]]
        if u_in_v and v_in_v:
            return off + V[u - off][v - off]
        if u_in_v:  # u from Q, v from P
            r = T[x][keep[v]]
            return u if r == x else pos[r]
        r = T[keep[u]][x]
        return v if r == x else pos[r]

    table = [[mul(u, v) for v in range(N)] for u in range(N)]
    S = [pos[s] for s in cp.cert.s_subset if s != x] + [off + s for s in cq.cert.s_subset]
    e = None
    if cp.is_monoid:
        if cp.cert.identity != x:
            e = pos[cp.cert.identity]
        elif cq.is_monoid:
            e = off + cq.cert.identity
    return _finish(po.blowup(P, x, Q), table, S, cp.is_full and cq.is_full, e)


def join_table(P: Poset) -> list[list[int]]:
    """Join operation of a join-semilattice."""
    n = P.n
    table = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            ub = P.up[a] & P.up[b]
            least = [z for z in bits(ub) if P.up[z] & ub == ub]
            if len(least) != 1:
                raise NotASemilattice(f"{P.labels[a]} and {P.labels[b]} have no least upper bound")
            table[a][b] = least[0]
    return table


def antichain_blowup_semilattice(L: Poset, replacements: Mapping[Union[int, str], int]) -> CertifiedPoset:
    """Replace join-irreducible elements by antichains; the join table makes L full."""
    table = join_table(L)
    cp = _finish(L, table, range(L.n), True, None)
    todo = []
    for key, size in replacements.items():
        x = L.index(key) if isinstance(key, str) else int(key)
        if size < 1:
            raise ValueError("antichain sizes must be positive")
        if not irreducible_self_centered(cp, x)["irreducible"]:
            raise NotJoinIrreducible(f"{L.labels[x]} is join-reducible")
        todo.append((x, size))
    # track elements by label since indices shift after each blowup
    for x, size in sorted(todo):
        if size == 1:
            continue
        label = L.labels[x]
        cp = blowup_cert(cp, cp.poset.index(label), antichain_cert(size))
    return cp


# --- series / parallel ------------------------------------------------------------

def left_zero_in_s(cp: CertifiedPoset) -> Optional[int]:
    """Least z in S with z*t = z for all t; every maximal element of a full poset is one."""
    t = cp.table
    for z in cp.cert.s_subset:
        if all(v == z for v in t[z]):
            return z
    return None


def compose_cert(a: CertifiedPoset, b: CertifiedPoset, kind: str,
                 sigma: Union[None, Sequence[int], str] = None) -> CertifiedPoset:
    """Series (a below b) or parallel composition; a's elements come first.

    Plain parallel composition multiplies across the parts through a left
    zero z of each part lying in its S: t*t' = t*z_a and t'*t = t'*z_b.  Both
    parts then act on each other through a homomorphism, which keeps the
    operation associative; z lies in S, so no new comparabilities appear.

    For parallel composition of monoid certificates, ``sigma`` (a monoid
    homomorphism a -> b mapping a's submonoid onto b's, or ``"search"``)
    gives a monoid certificate.
    """
    n, m = a.poset.n, b.poset.n
    N = n + m
    ta, tb = a.table, b.table
    if kind == "series":
        if not b.is_full:
            raise KindMismatch(f"the upper part must be full, got {b.kind}")
        table = [[ta[u][v] if v < n else v for v in range(N)] for u in range(n)]
        table += [[u if v < n else n + tb[u - n][v - n] for v in range(N)] for u in range(n, N)]
        S = list(a.cert.s_subset) + [n + s for s in range(m)]
        e = a.cert.identity if a.is_monoid else None
        return _finish(po.series(a.poset, b.poset), table, S, a.is_full, e)
    if kind != "parallel":
        raise ValueError("kind must be 'series' or 'parallel'")
    if sigma is None:
        za, zb = left_zero_in_s(a), left_zero_in_s(b)
        if za is None or zb is None:
            raise PreconditionFailed("parallel composition needs a left zero inside S in both parts")
        table = [[ta[u][v] if v < n else ta[u][za] for v in range(N)] for u in range(n)]
        table += [[n + tb[u - n][zb] if v < n else n + tb[u - n][v - n] for v in range(N)]
                  for u in range(n, N)]
        S = list(a.cert.s_subset) + [n + s for s in b.cert.s_subset]
        return _finish(po.parallel(a.poset, b.poset), table, S, a.is_full and b.is_full, None)
    if not (a.is_monoid and b.is_monoid):
        raise KindMismatch("a homomorphism only helps for two monoid certificates")
    if isinstance(sigma, str):
        found = find_monoid_homomorphism(a, b)
        if found is None:
            raise NotAHomomorphism("no monoid homomorphism onto the submonoid exists")
        sigma = found
    sigma = tuple(sigma)
    why = check_monoid_homomorphism(a, b, sigma)
    if why:
        raise NotAHomomorphism(why)
    table = [[ta[u][v] if v < n else n + tb[sigma[u]][v - n] for v in range(N)] for u in range(n)]
    table += [[n + tb[u - n][sigma[v]] if v < n else n + tb[u - n][v - n] for v in range(N)]
              for u in range(n, N)]
    return _finish(po.parallel(a.poset, b.poset), table, a.cert.s_subset, False, a.cert.identity)


def check_monoid_homomorphism(a: CertifiedPoset, b: CertifiedPoset, sigma: Sequence[int]) -> Optional[str]:
    n = a.poset.n
    if len(sigma) != n or any(not 0 <= v < b.poset.n for v in sigma):
        return "sigma has the wrong shape"
    if sigma[a.cert.identity] != b.cert.identity:
        return "sigma does not preserve the identity"
    ta, tb = a.table, b.table
    for u in range(n):
        for v in range(n):
            if sigma[ta[u][v]] != tb[sigma[u]][sigma[v]]:
                return f"sigma is not multiplicative at ({u}, {v})"
    if {sigma[s] for s in a.cert.s_subset} != set(b.cert.s_subset):
        return "sigma does not map the submonoid onto the submonoid"
    return None


def find_monoid_homomorphism(a: CertifiedPoset, b: CertifiedPoset, max_size: int = 6) -> Optional[tuple]:
    """Bounded backtracking search for sigma; inputs larger than ``max_size`` are refused."""
    if max(a.poset.n, b.poset.n) > max_size:
        raise PreconditionFailed(f"homomorphism search limited to {max_size} elements")
    n, m = a.poset.n, b.poset.n
    ta, tb = a.table, b.table
    s = [-1] * n
    s[a.cert.identity] = b.cert.identity

    def ok() -> bool:
        for u in range(n):
            if s[u] < 0:
                continue
            for v in range(n):
                if s[v] < 0:
                    continue
                w = s[ta[u][v]]
                if w >= 0 and w != tb[s[u]][s[v]]:
                    return False
        return True

    order = [u for u in range(n) if u != a.cert.identity]

    def rec(k: int) -> bool:
        if k == len(order):
            return check_monoid_homomorphism(a, b, s) is None
        u = order[k]
        for v in range(m):
            s[u] = v
            if ok() and rec(k + 1):
                return True
        s[u] = -1
        return False

    return tuple(s) if ok() and rec(0) else None


def series_parallel_cert(expr: SP) -> CertifiedPoset:
    """Full certificate by structural recursion; matches :func:`poset.eval_sp` element order."""
    if expr.op == "leaf":
        return singleton()
    parts = [series_parallel_cert(c) for c in expr.children]
    out = parts[0]
    for p in parts[1:]:
        out = compose_cert(out, p, expr.op)
    return CertifiedPoset(out.poset.relabel([str(i) for i in range(out.poset.n)]), out.cert)


# --- kP and weak orders -----------------------------------------------------------

def k_blowup_monoid(cp: CertifiedPoset, k: int) -> CertifiedPoset:
    """Monoid certificate for kP on N x Z_k; (x, j) sits at index x*k + j."""
    if k < 1:
        raise ValueError("k must be positive")
    if not cp.is_monoid:
        raise KindMismatch(f"needs a monoid certificate, got {cp.kind}")
    t = cp.table
    e = cp.cert.identity
    n = cp.poset.n
    for x in range(n):
        for s in cp.cert.s_subset:
            if s != e and t[x][s] == x:
                raise HypothesisFailed(f"{cp.poset.labels[x]}*{cp.poset.labels[s]} = "
                                       f"{cp.poset.labels[x]} with a non-identity factor")
    N = n * k
    table = [[t[u // k][v // k] * k + (u % k + v % k) % k for v in range(N)] for u in range(N)]
    S = [e * k] + [s * k + j for s in cp.cert.s_subset if s != e for j in range(k)]
    return _finish(po.k_times(cp.poset, k), table, S, False, e * k)


@dataclass(frozen=True)
class WeakOrderCerts:
    full: CertifiedPoset
    monoid: CertifiedPoset


def weak_order_cert(levels: Sequence[int]) -> WeakOrderCerts:
    """Full and monoid certificates for a finite weak order.

    Full: the product of two elements is the left-most factor on the higher
    level.  Monoid: the same, except that the bottom level is the cyclic
    group, whose zero is the identity.
    """
    P = po.weak_order(levels)
    level = [i for i, k in enumerate(levels) for _ in range(k)]
    N = P.n
    k0 = levels[0]

    def left_top(u: int, v: int) -> int:
        return v if level[v] > level[u] else u

    full_table = [[left_top(u, v) for v in range(N)] for u in range(N)]
    full = _finish(P, full_table, range(N), True, 0 if k0 == 1 else None)
    if k0 == 1:
        return WeakOrderCerts(full, full)
    mon_table = [[(u + v) % k0 if level[u] == level[v] == 0 else left_top(u, v)
                  for v in range(N)] for u in range(N)]
    monoid = _finish(P, mon_table, [0] + list(range(k0, N)), False, 0)
    return WeakOrderCerts(full, monoid)
