"""Finite posets stored as dense bit-matrices.

Row ``x`` of the relation is the integer bitmask ``up[x]`` whose bit ``y`` is
set iff ``x <= y``; the transposed rows are kept in ``down``.  Elements are the
indices ``0..n-1``; external names live in ``labels``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CycleError, SizeLimit, UnknownLabel

__all__ = [
    "Poset", "Endomorphism", "Extremes", "SP",
    "build_poset", "hasse", "principal_set", "extremes", "order_endomorphisms",
    "canonical_form", "is_isomorphic", "incomparables", "enumerate_posets",
    "is_series_parallel", "find_induced_n", "sp_decompose", "weak_order",
    "eval_sp", "enumerate_sp", "chain", "antichain",
    "series", "parallel", "product", "blowup", "k_times", "induced",
    "add_minimum", "add_maximum", "dual",
]

ENUMERATE_CAP = 7


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _closure(n: int, rows: list[int]) -> list[int]:
    rows = [r | (1 << i) for i, r in enumerate(rows)]
    for k in range(n):
        kb = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & kb:
                rows[i] |= rk
    return rows


class Poset:
    """Immutable finite poset."""

    __slots__ = ("n", "up", "down", "labels", "_hash")

    def __init__(self, up: Sequence[int], labels: Optional[Sequence[str]] = None,
                 *, check: bool = True):
        n = len(up)
        up = tuple(up)
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise ValueError(f"expected {n} labels, got {len(labels)}")
            if len(set(labels)) != n:
                raise ValueError("labels must be unique")
        down = [0] * n
        for x in range(n):
            for y in bits(up[x]):
                down[y] |= 1 << x
        if check:
            for x in range(n):
                if not (up[x] >> x) & 1:
                    raise ValueError("relation is not reflexive")
                for y in bits(up[x]):
                    if y != x and (up[y] >> x) & 1:
                        raise CycleError(f"{labels[x]} and {labels[y]} lie on a cycle")
                    if up[y] & ~up[x]:
                        raise ValueError("relation is not transitive")
        self.n = n
        self.up = up
        self.down = tuple(down)
        self.labels = labels
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_covers(cls, n: int, covers: Iterable[tuple[int, int]],
                    labels: Optional[Sequence[str]] = None) -> "Poset":
        rows = [0] * n
        for a, b in covers:
            if not (0 <= a < n and 0 <= b < n):
                raise UnknownLabel(f"index out of range in pair {(a, b)}")
            rows[a] |= 1 << b
        return cls(_closure(n, rows), labels)

    @classmethod
    def from_predicate(cls, n: int, le, labels=None) -> "Poset":
        rows = []
        for x in range(n):
            r = 0
            for y in range(n):
                if x == y or le(x, y):
                    r |= 1 << y
            rows.append(r)
        return cls(rows, labels)

    # queries ---------------------------------------------------------------
    def leq(self, x: int, y: int) -> bool:
        return bool((self.up[x] >> y) & 1)

    def lt(self, x: int, y: int) -> bool:
        return x != y and bool((self.up[x] >> y) & 1)

    def comparable(self, x: int, y: int) -> bool:
        return bool((self.up[x] >> y) & 1) or bool((self.up[y] >> x) & 1)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise UnknownLabel(label) from None

    def matrix(self) -> list[list[bool]]:
        return [[self.leq(x, y) for y in range(self.n)] for x in range(self.n)]

    def is_upset(self, mask: int) -> bool:
        return all(self.up[x] & ~mask == 0 for x in bits(mask))

    def upsets(self) -> list[int]:
        """All upsets as bitmasks, ascending."""
        return [m for m in range(1 << self.n) if self.is_upset(m)]

    def downsets(self) -> list[int]:
        return [m for m in range(1 << self.n)
                if all(self.down[x] & ~m == 0 for x in bits(m))]

    def relabel(self, labels: Sequence[str]) -> "Poset":
        return Poset(self.up, labels, check=False)

    def permute(self, perm: Sequence[int]) -> "Poset":
        """Return the poset whose element ``perm[i]`` is this poset's ``i``."""
        n = self.n
        rows = [0] * n
        labels = [""] * n
        for x in range(n):
            r = 0
            for y in bits(self.up[x]):
                r |= 1 << perm[y]
            rows[perm[x]] = r
            labels[perm[x]] = self.labels[x]
        return Poset(rows, labels, check=False)

    def __eq__(self, other):
        return isinstance(other, Poset) and self.up == other.up and self.labels == other.labels

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.up, self.labels))
        return self._hash

    def __len__(self):
        return self.n

    def __repr__(self):
        covers = ", ".join(f"{self.labels[a]}<{self.labels[b]}" for a, b in hasse(self))
        return f"Poset(n={self.n}, covers=[{covers}])"


def build_poset(relations: Iterable[tuple[str, str]],
                labels: Optional[Sequence[str]] = None) -> Poset:
    """Reflexive-transitive closure of ``relations`` (pairs ``(u, v)`` read u <= v).

    Without ``labels`` the ground set is the set of labels mentioned, in order
    of first appearance.
    """
    relations = [(str(a), str(b)) for a, b in relations]
    if labels is None:
        seen: dict[str, int] = {}
        for a, b in relations:
            seen.setdefault(a, len(seen))
            seen.setdefault(b, len(seen))
        labels = list(seen)
    labels = [str(s) for s in labels]
    pos = {s: i for i, s in enumerate(labels)}
    if len(pos) != len(labels):
        raise ValueError("labels must be unique")
    pairs = []
    for a, b in relations:
        if a not in pos:
            raise UnknownLabel(a)
        if b not in pos:
            raise UnknownLabel(b)
        pairs.append((pos[a], pos[b]))
    return Poset.from_covers(len(labels), pairs, labels)


def hasse(P: Poset) -> list[tuple[int, int]]:
    """Cover pairs ``(x, y)``, sorted."""
    out = []
    for x in range(P.n):
        strict = P.up[x] & ~(1 << x)
        for y in bits(strict):
            between = strict & P.down[y] & ~(1 << y)
            if not between:
                out.append((x, y))
    return out


def principal_set(P: Poset, x: int, dir: str = "up") -> set[int]:
    if dir == "up":
        return set(bits(P.up[x]))
    if dir == "down":
        return set(bits(P.down[x]))
    raise ValueError(f"dir must be 'up' or 'down', not {dir!r}")


def incomparables(P: Poset, x: int) -> set[int]:
    return set(bits(P.full_mask & ~(P.up[x] | P.down[x])))


@dataclass(frozen=True)
class Extremes:
    minima: frozenset
    maxima: frozenset
    atoms: Optional[frozenset]
    global_min: Optional[int]
    global_max: Optional[int]


def extremes(P: Poset) -> Extremes:
    minima = frozenset(x for x in range(P.n) if P.down[x] == 1 << x)
    maxima = frozenset(x for x in range(P.n) if P.up[x] == 1 << x)
    gmin = next(iter(minima)) if len(minima) == 1 and P.n else None
    gmax = next(iter(maxima)) if len(maxima) == 1 and P.n else None
    atoms = None
    if gmin is not None:
        rest = P.full_mask & ~(1 << gmin)
        atoms = frozenset(y for y in bits(rest) if P.down[y] & rest == 1 << y)
    return Extremes(minima, maxima, atoms, gmin, gmax)


@dataclass(frozen=True)
class Endomorphism:
    map: tuple

    def __call__(self, x: int) -> int:
        return self.map[x]

    def is_order_preserving(self, P: Poset) -> bool:
        m = self.map
        return all(P.leq(m[x], m[y]) for x in range(P.n) for y in bits(P.up[x]))


def order_endomorphisms(P: Poset, max_count: Optional[int] = None) -> Iterator[Endomorphism]:
    """Every order-preserving self-map, lexicographic in the function table."""
    n = P.n
    img = [0] * n
    count = 0

    def rec(k: int):
        nonlocal count
        if k == n:
            count += 1
            if max_count is not None and count > max_count:
                raise SizeLimit(f"more than {max_count} endomorphisms")
            yield Endomorphism(tuple(img))
            return
        for v in range(n):
            ok = True
            for j in range(k):
                if P.leq(j, k) and not P.leq(img[j], v):
                    ok = False
                    break
                if P.leq(k, j) and not P.leq(v, img[j]):
                    ok = False
                    break
            if ok:
                img[k] = v
                yield from rec(k + 1)

    return rec(0)


# --- isomorphism -----------------------------------------------------------

def _refine(P: Poset) -> list[int]:
    """Stable colouring: ranks of iterated (up, down) signatures."""
    n = P.n
    colors = [(bin(P.up[x]).count("1"), bin(P.down[x]).count("1")) for x in range(n)]
    ranks = _rank(colors)
    while True:
        sig = []
        for x in range(n):
            ups = sorted(ranks[y] for y in bits(P.up[x]) if y != x)
            downs = sorted(ranks[y] for y in bits(P.down[x]) if y != x)
            sig.append((ranks[x], tuple(ups), tuple(downs)))
        new = _rank(sig)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _rank(keys: list) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _twins(P: Poset, x: int, y: int) -> bool:
    bx, by = 1 << x, 1 << y
    return (P.up[x] & ~bx) == (P.up[y] & ~by) and (P.down[x] & ~bx) == (P.down[y] & ~by)


def canonical_form(P: Poset) -> tuple[tuple, tuple[int, ...]]:
    """Return ``(code, order)``: ``order[k]`` is the element placed at position k.

    Elements are grouped by a refinement colouring, then the lexicographically
    least relation code over colour-respecting orderings is chosen.  Two posets
    are isomorphic iff their codes are equal.
    """
    n = P.n
    colors = _refine(P)
    slots = sorted(colors)
    best: Optional[list] = None
    best_order: tuple = ()
    chosen: list[int] = []
    prefix: list[int] = []
    used = [False] * n

    def chunk(k: int, v: int) -> int:
        c = 0
        for i in range(k):
            u = chosen[i]
            c = (c << 2) | (P.leq(u, v) << 1) | P.leq(v, u)
        return c

    def rec(k: int):
        nonlocal best, best_order
        if k == n:
            if best is None or prefix < best:
                best = list(prefix)
                best_order = tuple(chosen)
            return
        tried: list[int] = []
        for v in range(n):
            if used[v] or colors[v] != slots[k]:
                continue
            if any(_twins(P, v, t) for t in tried):
                continue
            tried.append(v)
            prefix.append(chunk(k, v))
            if best is None or prefix <= best[:k + 1]:
                used[v] = True
                chosen.append(v)
                rec(k + 1)
                chosen.pop()
                used[v] = False
            prefix.pop()

    rec(0)
    return (n, tuple(slots), tuple(best or ())), best_order


def _find_iso_backtrack(P: Poset, Q: Poset) -> Optional[tuple[int, ...]]:
    n = P.n
    # joint refinement on the disjoint union keeps colours comparable
    U = parallel(P, Q)
    colors = _refine(U)
    cp, cq = colors[:n], colors[n:]
    if sorted(cp) != sorted(cq):
        return None
    order = sorted(range(n), key=lambda x: (sum(c == cp[x] for c in cp), x))
    img = [-1] * n
    used = [False] * n

    def rec(k: int) -> bool:
        if k == n:
            return True
        x = order[k]
        for y in range(n):
            if used[y] or cq[y] != cp[x]:
                continue
            ok = True
            for j in range(k):
                xp = order[j]
                yp = img[xp]
                if P.leq(x, xp) != Q.leq(y, yp) or P.leq(xp, x) != Q.leq(yp, y):
                    ok = False
                    break
            if ok:
                img[x] = y
                used[y] = True
                if rec(k + 1):
                    return True
                used[y] = False
                img[x] = -1
        return False

    return tuple(img) if rec(0) else None


CANONICAL_MAX = 9


def is_isomorphic(P: Poset, Q: Poset) -> Optional[tuple[int, ...]]:
    """An order-isomorphism ``P -> Q`` as an image tuple, or None."""
    if P.n != Q.n:
        return None
    if P.n <= CANONICAL_MAX:
        cp, op = canonical_form(P)
        cq, oq = canonical_form(Q)
        if cp != cq:
            return None
        iso = [0] * P.n
        for k in range(P.n):
            iso[op[k]] = oq[k]
        return tuple(iso)
    return _find_iso_backtrack(P, Q)


def enumerate_posets(n: int, cap: int = ENUMERATE_CAP) -> list[Poset]:
    """One canonical representative per isomorphism class of n-element posets.

    Every poset has a maximal element, so each class arises from an
    (n-1)-element representative by adding a new element above a downset.
    """
    if n > cap:
        raise SizeLimit(f"n={n} exceeds enumeration cap {cap}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return [Poset(())]
    prev = [Poset(())]
    for m in range(1, n + 1):
        reps: dict = {}
        for Q in prev:
            for D in Q.downsets():
                rows = [r | (1 << (m - 1)) if (D >> x) & 1 else r for x, r in enumerate(Q.up)]
                rows.append(1 << (m - 1))
                R = Poset(rows, check=False)
                code, order = canonical_form(R)
                if code not in reps:
                    perm = [0] * m
                    for k, x in enumerate(order):
                        perm[x] = k
                    reps[code] = R.permute(perm).relabel([str(i) for i in range(m)])
        prev = [reps[c] for c in sorted(reps)]
    return prev


# --- series-parallel ---------------------------------------------------------

def find_induced_n(P: Poset) -> Optional[tuple[int, int, int, int]]:
    """A quadruple ``(a, b, c, d)`` with a<b>c<d and no other comparabilities."""
    for quad in combinations(range(P.n), 4):
        for a, b, c, d in permutations(quad):
            if (P.lt(a, b) and P.lt(c, b) and P.lt(c, d)
                    and not P.comparable(a, c) and not P.comparable(a, d)
                    and not P.comparable(b, d)):
                return (a, b, c, d)
    return None


def is_series_parallel(P: Poset) -> bool:
    return find_induced_n(P) is None


@dataclass(frozen=True)
class SP:
    """Series-parallel expression; ``op`` is 'leaf', 'series' or 'parallel'."""

    op: str
    children: tuple = ()

    def __post_init__(self):
        if self.op == "leaf":
            if self.children:
                raise ValueError("leaf has no children")
        elif self.op in ("series", "parallel"):
            if len(self.children) < 2:
                raise ValueError(f"{self.op} needs at least two children")
        else:
            raise ValueError(f"unknown op {self.op!r}")

    @property
    def leaves(self) -> int:
        if self.op == "leaf":
            return 1
        return sum(c.leaves for c in self.children)

    def __str__(self):
        if self.op == "leaf":
            return "."
        tag = "s" if self.op == "series" else "p"
        return f"{tag}({','.join(str(c) for c in self.children)})"

    @classmethod
    def parse(cls, text: str) -> "SP":
        text = text.replace(" ", "")
        pos = 0

        def expr():
            nonlocal pos
            if text[pos] == ".":
                pos += 1
                return cls("leaf")
            tag = text[pos]
            if tag not in "sp" or text[pos + 1] != "(":
                raise ValueError(f"bad SP expression near {text[pos:]!r}")
            pos += 2
            kids = [expr()]
            while text[pos] == ",":
                pos += 1
                kids.append(expr())
            if text[pos] != ")":
                raise ValueError(f"bad SP expression near {text[pos:]!r}")
            pos += 1
            return cls("series" if tag == "s" else "parallel", tuple(kids))

        try:
            out = expr()
        except IndexError:
            raise ValueError(f"truncated SP expression {text!r}") from None
        if pos != len(text):
            raise ValueError(f"trailing input in SP expression {text!r}")
        return out


LEAF = SP("leaf")


def eval_sp(expr: SP) -> Poset:
    """Children are laid out left to right; series puts earlier children below."""
    if expr.op == "leaf":
        return Poset((1,))
    parts = [eval_sp(c) for c in expr.children]
    out = parts[0]
    for p in parts[1:]:
        out = series(out, p) if expr.op == "series" else parallel(out, p)
    return out.relabel([str(i) for i in range(out.n)])


def _compositions(total: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            yield (first,) + rest


def enumerate_sp(max_leaves: int) -> list[SP]:
    """All SP expressions with at most ``max_leaves`` leaves.

    Children of a series node are never series nodes (and likewise for
    parallel), so each expression is in flattened form; the list still
    contains every ordering of children.
    """
    memo: dict = {}

    def gen(k: int, parent: Optional[str]) -> list[SP]:
        key = (k, parent)
        if key in memo:
            return memo[key]
        out: list[SP] = []
        if k == 1:
            out.append(LEAF)
        else:
            for op in ("series", "parallel"):
                if op == parent:
                    continue
                for comp in _compositions(k):
                    if len(comp) < 2:
                        continue
                    out.extend(_product_children(comp, op, gen))
        memo[key] = out
        return out

    def _product_children(comp, op, g):
        pools = [g(c, op) for c in comp]
        acc: list[tuple] = [()]
        for pool in pools:
            acc = [a + (p,) for a in acc for p in pool]
        return [SP(op, kids) for kids in acc]

    result = []
    for k in range(1, max_leaves + 1):
        result.extend(gen(k, None))
    return result


def sp_decompose(P: Poset) -> Optional[tuple[SP, list[int]]]:
    """An SP expression for P plus the element order of its leaves.

    Leaf k of ``eval_sp(expr)`` corresponds to element ``order[k]`` of P.
    Returns None when P is not series-parallel.
    """
    if P.n == 0:
        return None
    return _decomp(P, list(range(P.n)))


def _decomp(P: Poset, elems: list[int]) -> Optional[tuple[SP, list[int]]]:
    if len(elems) == 1:
        return LEAF, list(elems)
    mask = 0
    for e in elems:
        mask |= 1 << e
    comp_adj = [0] * P.n
    inc_adj = [0] * P.n
    for e in elems:
        cmp_ = (P.up[e] | P.down[e]) & mask & ~(1 << e)
        comp_adj[e] = cmp_
        inc_adj[e] = mask & ~cmp_ & ~(1 << e)
    for op, adj in (("parallel", comp_adj), ("series", inc_adj)):
        comps = _components_in(elems, adj)
        if len(comps) > 1:
            if op == "series":
                comps.sort(key=lambda c: bin(_downmask(P, c) & mask).count("1"))
            kids, order = [], []
            for c in comps:
                sub = _decomp(P, [e for e in elems if (c >> e) & 1])
                if sub is None:
                    return None
                kid, o = sub
                if kid.op == op:
                    kids.extend(kid.children)
                else:
                    kids.append(kid)
                order.extend(o)
            return SP(op, tuple(kids)), order
    return None


def _components_in(elems: list[int], adj: list[int]) -> list[int]:
    comps = []
    seen = 0
    for s in elems:
        if (seen >> s) & 1:
            continue
        comp = frontier = 1 << s
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append(comp)
    return comps


def _downmask(P: Poset, comp: int) -> int:
    out = 0
    for v in bits(comp):
        out |= P.down[v]
    return out


# --- structural constructions -----------------------------------------------

def chain(n: int) -> Poset:
    return Poset([((1 << n) - 1) & ~((1 << x) - 1) for x in range(n)])


def antichain(n: int) -> Poset:
    return Poset([1 << x for x in range(n)])


def weak_order(levels: Sequence[int]) -> Poset:
    """Chain of antichains; element (i, j) gets index sum(levels[:i]) + j."""
    if not levels or any(k <= 0 for k in levels):
        raise ValueError("levels must be a non-empty list of positive sizes")
    level_of = [i for i, k in enumerate(levels) for _ in range(k)]
    labels = [f"{i}.{j}" for i, k in enumerate(levels) for j in range(k)]
    return Poset.from_predicate(len(level_of), lambda x, y: level_of[x] < level_of[y], labels)


def _disjoint(P: Poset, Q: Poset, link: bool) -> Poset:
    n, m = P.n, Q.n
    topmask = ((1 << m) - 1) << n
    rows = [r | (topmask if link else 0) for r in P.up]
    rows += [r << n for r in Q.up]
    labels = list(P.labels) + list(Q.labels)
    if len(set(labels)) != n + m:
        labels = [f"0.{s}" for s in P.labels] + [f"1.{s}" for s in Q.labels]
    return Poset(rows, labels, check=False)


def series(P: Poset, Q: Poset) -> Poset:
    """All of P below all of Q; P's elements first."""
    return _disjoint(P, Q, True)


def parallel(P: Poset, Q: Poset) -> Poset:
    return _disjoint(P, Q, False)


def product(P: Poset, Q: Poset) -> Poset:
    """Cartesian product, element (i, j) at index i*|Q| + j."""
    m = Q.n
    labels = [f"({a},{b})" for a in P.labels for b in Q.labels]
    return Poset.from_predicate(
        P.n * m, lambda u, v: P.leq(u // m, v // m) and Q.leq(u % m, v % m), labels)


def blowup(P: Poset, x: int, Q: Poset) -> Poset:
    """Replace ``x`` by a copy of Q: P's other elements in order, then Q's."""
    keep = [y for y in range(P.n) if y != x]
    src = [("P", y) for y in keep] + [("Q", q) for q in range(Q.n)]

    def le(u, v):
        (su, a), (sv, b) = src[u], src[v]
        if su == sv == "Q":
            return Q.leq(a, b)
        pa = a if su == "P" else x
        pb = b if sv == "P" else x
        return P.leq(pa, pb)

    labels = [P.labels[y] for y in keep] + [f"{P.labels[x]}.{s}" for s in Q.labels]
    return Poset.from_predicate(len(src), le, labels)


def k_times(P: Poset, k: int) -> Poset:
    """kP: every element replaced by a k-antichain, (i, j) at index i*k + j."""
    labels = [f"({s},{j})" for s in P.labels for j in range(k)]
    return Poset.from_predicate(P.n * k, lambda u, v: P.lt(u // k, v // k), labels)


def induced(P: Poset, elements: Sequence[int]) -> Poset:
    elements = list(elements)
    return Poset.from_predicate(
        len(elements), lambda a, b: P.leq(elements[a], elements[b]),
        [P.labels[e] for e in elements])


def add_minimum(P: Poset, label: str = "e") -> Poset:
    """New element appended at index n, below everything."""
    rows = list(P.up) + [(1 << (P.n + 1)) - 1]
    return Poset(rows, list(P.labels) + [_fresh(P, label)], check=False)


def add_maximum(P: Poset, label: str = "a") -> Poset:
    top = 1 << P.n
    rows = [r | top for r in P.up] + [top]
    return Poset(rows, list(P.labels) + [_fresh(P, label)], check=False)


def _fresh(P: Poset, label: str) -> str:
    out = label
    while out in P.labels:
        out += "'"
    return out


def dual(P: Poset) -> Poset:
    return Poset(P.down, P.labels, check=False)
