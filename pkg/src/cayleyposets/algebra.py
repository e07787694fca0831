"""Finite semigroups and right acts given by tables, and their Cayley posets."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import NamedTuple, Optional, Sequence

from .errors import (CertificateInvalid, IncompatibleAct, NotAPartialOrder,
                     NotClosed, SizeLimit)
from .poset import Endomorphism, Poset, bits

KINDS = ("semigroup", "monoid", "full", "full_monoid")

INFLATIONARY_CAP = 1000


def is_associative(table: Sequence[Sequence[int]]) -> bool:
    """Exact triple loop with early exit."""
    n = len(table)
    for a in range(n):
        ta = table[a]
        for b in range(n):
            ab = ta[b]
            tab = table[ab]
            tb = table[b]
            for c in range(n):
                if tab[c] != ta[tb[c]]:
                    return False
    return True


def associativity_witness(table) -> Optional[tuple[int, int, int]]:
    n = len(table)
    for a, b, c in iproduct(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            return (a, b, c)
    return None


@dataclass(frozen=True)
class OpTable:
    table: tuple
    _assoc: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        t = tuple(tuple(int(v) for v in row) for row in self.table)
        n = len(t)
        if any(len(row) != n for row in t):
            raise ValueError("operation table must be square")
        if any(not 0 <= v < n for row in t for v in row):
            raise ValueError("table entry out of range")
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return len(self.table)

    def __call__(self, a: int, b: int) -> int:
        return self.table[a][b]

    def is_associative(self) -> bool:
        if not self._assoc:
            self._assoc.append(is_associative(self.table))
        return self._assoc[0]

    def is_closed(self, subset) -> bool:
        s = set(subset)
        return all(self.table[a][b] in s for a in s for b in s)

    def identity(self) -> Optional[int]:
        for e in range(self.n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.n)):
                return e
        return None

    def is_commutative(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.n) for b in range(a))


@dataclass(frozen=True)
class SemigroupAct:
    """Right act of the semigroup ``sg`` on ``{0..x_count-1}``.

    ``action[x][s]`` is ``x·s``; compatibility ``(x·s)·s' = x·(s s')`` is
    checked on construction.
    """

    x_count: int
    sg: OpTable
    action: tuple

    def __post_init__(self):
        act = tuple(tuple(int(v) for v in row) for row in self.action)
        object.__setattr__(self, "action", act)
        m = self.sg.n
        if len(act) != self.x_count or any(len(r) != m for r in act):
            raise ValueError("action table has the wrong shape")
        if any(not 0 <= v < self.x_count for r in act for v in r):
            raise ValueError("action entry out of range")
        if not self.sg.is_associative():
            raise IncompatibleAct("acting table is not associative")
        t = self.sg.table
        for x in range(self.x_count):
            for s in range(m):
                xs = act[x][s]
                for s2 in range(m):
                    if act[xs][s2] != act[x][t[s][s2]]:
                        raise IncompatibleAct(f"(x s) s' != x (s s') at x={x}, s={s}, s'={s2}")


class ActCheck(NamedTuple):
    s_unital: bool
    acyclic: bool


def check_act(act: SemigroupAct) -> ActCheck:
    a = act.action
    m = act.sg.n
    s_unital = all(any(a[x][s] == x for s in range(m)) for x in range(act.x_count))
    acyclic = True
    for x in range(act.x_count):
        for s in range(m):
            xs = a[x][s]
            if xs == x:
                continue
            if any(a[xs][s2] == x for s2 in range(m)):
                acyclic = False
                break
        if not acyclic:
            break
    return ActCheck(s_unital, acyclic)


def cayley_poset(act: SemigroupAct, labels=None) -> Poset:
    """x <= y iff x·s = y for some s."""
    chk = check_act(act)
    if not (chk.s_unital and chk.acyclic):
        raise NotAPartialOrder(f"act is not s-unital and acyclic: {chk}")
    rows = []
    for x in range(act.x_count):
        r = 0
        for v in act.action[x]:
            r |= 1 << v
        rows.append(r)
    return Poset(rows, labels)


def pair_act(T: OpTable, S) -> SemigroupAct:
    """Right multiplication of T by the subsemigroup S (indexed in sorted order)."""
    S = sorted(set(S))
    if not S:
        raise NotClosed("S is empty")
    if not T.is_closed(S):
        raise NotClosed(f"{S} is not closed under the operation")
    pos = {s: i for i, s in enumerate(S)}
    sub = OpTable(tuple(tuple(pos[T(a, b)] for b in S) for a in S))
    action = tuple(tuple(T(x, s) for s in S) for x in range(T.n))
    return SemigroupAct(T.n, sub, action)


def inflationary_maps(P: Poset) -> list[tuple[int, ...]]:
    ups = [list(bits(P.up[x])) for x in range(P.n)]
    return [tuple(m) for m in iproduct(*ups)]


def inflationary_act(P: Poset, cap: int = INFLATIONARY_CAP) -> SemigroupAct:
    """The monoid of maps with x <= phi(x), acting by evaluation.

    Products follow ``(phi phi')(x) = phi'(phi(x))`` so that evaluation is a
    right action.  Maps are indexed in lexicographic order of their tables.
    """
    size = 1
    for x in range(P.n):
        size *= bin(P.up[x]).count("1")
    if size > cap:
        raise SizeLimit(f"inflationary monoid has {size} elements (cap {cap})")
    maps = inflationary_maps(P)
    index = {m: i for i, m in enumerate(maps)}
    table = tuple(
        tuple(index[tuple(g[f[x]] for x in range(P.n))] for g in maps) for f in maps)
    action = tuple(tuple(f[x] for f in maps) for x in range(P.n))
    return SemigroupAct(P.n, OpTable(table), action)


@dataclass(frozen=True)
class Certificate:
    """A multiplication table on a poset's ground set with a distinguished S."""

    kind: str
    table: tuple
    s_subset: tuple
    identity: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(int(v) for v in r) for r in self.table))
        object.__setattr__(self, "s_subset", tuple(sorted(set(int(s) for s in self.s_subset))))
        if self.identity is not None:
            object.__setattr__(self, "identity", int(self.identity))

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def s_mask(self) -> int:
        m = 0
        for s in self.s_subset:
            m |= 1 << s
        return m

    def with_kind(self, kind: str, identity: Optional[int] = None) -> "Certificate":
        return Certificate(kind, self.table, self.s_subset, identity)

    def to_json(self) -> dict:
        return {"kind": self.kind, "identity": self.identity,
                "s_subset": list(self.s_subset), "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        return cls(obj["kind"], obj["table"], obj["s_subset"], obj.get("identity"))

    def sort_key(self) -> tuple:
        return (self.s_mask, tuple(v for r in self.table for v in r))


@dataclass(frozen=True)
class Verification:
    ok: bool
    reason: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_certificate(P: Poset, cert: Certificate) -> Verification:
    """Check a certificate against P; the failure reason names the first broken rule."""
    n = P.n
    t = cert.table
    if len(t) != n or any(len(r) != n for r in t):
        return Verification(False, "shape", f"table must be {n}x{n}")
    if any(not 0 <= v < n for r in t for v in r):
        return Verification(False, "range", "table entry out of range")
    S = cert.s_subset
    if not S or any(not 0 <= s < n for s in S):
        return Verification(False, "range", "s_subset empty or out of range")
    if cert.kind not in KINDS:
        return Verification(False, "kind_mismatch", f"unknown kind {cert.kind!r}")
    w = associativity_witness(t) if not is_associative(t) else None
    if w is not None:
        return Verification(False, "associativity", f"(xy)z != x(yz) at {w}")
    s_mask = cert.s_mask
    for a in S:
        for b in S:
            if not (s_mask >> t[a][b]) & 1:
                return Verification(False, "not_closed", f"{a}*{b} leaves S")
    if cert.kind in ("full", "full_monoid") and len(S) != n:
        return Verification(False, "kind_mismatch", f"{cert.kind} needs S = ground set")
    e = cert.identity
    if cert.kind in ("monoid", "full_monoid") and e is None:
        return Verification(False, "identity", "monoid kinds need an identity")
    if e is not None:
        if not 0 <= e < n:
            return Verification(False, "range", "identity out of range")
        if not (s_mask >> e) & 1:
            return Verification(False, "identity", "identity not in S")
        for x in range(n):
            if t[e][x] != x or t[x][e] != x:
                return Verification(False, "identity", f"{e} is not neutral for {x}")
    if not P.is_upset(s_mask):
        return Verification(False, "not_upset", "S is not an upset")
    for x in range(n):
        reach = 0
        row = t[x]
        for s in S:
            reach |= 1 << row[s]
        if reach != P.up[x]:
            return Verification(False, "order_mismatch",
                                f"x*S != up(x) at x={P.labels[x]}")
    return Verification(True)


def left_mult_endomorphisms(P: Poset, cert: Certificate) -> list[Endomorphism]:
    """The maps x -> t*x, one per element t; all order-preserving and distinct."""
    v = verify_certificate(P, cert)
    if not v:
        raise CertificateInvalid(f"{v.reason}: {v.detail}")
    maps = [Endomorphism(tuple(cert.table[t])) for t in range(P.n)]
    for m in maps:
        if not m.is_order_preserving(P):
            raise CertificateInvalid(f"left multiplication {m.map} is not monotone")
    if len(set(maps)) != len(maps):
        raise CertificateInvalid("left multiplication is not injective")
    return maps


class Propagation(NamedTuple):
    table: list
    contradiction: bool
    forced: int


def idempotent_consequences(partial: Sequence[Sequence[Optional[int]]], P: Poset) -> Propagation:
    """Apply ``m*m = m  =>  m*x = x`` for every x above m, to a fixpoint.

    ``partial`` uses None for undecided entries.  A conflict with an already
    decided entry is reported through ``contradiction`` rather than raised.
    """
    table = [list(r) for r in partial]
    forced = 0
    changed = True
    while changed:
        changed = False
        for m in range(P.n):
            if table[m][m] != m:
                continue
            for x in bits(P.up[m]):
                cur = table[m][x]
                if cur is None:
                    table[m][x] = x
                    forced += 1
                    changed = True
                elif cur != x:
                    return Propagation(table, True, forced)
    return Propagation(table, False, forced)
