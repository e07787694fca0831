"""Finitely generated submonoids of Z^m + Z/d1 + ... + Z/dr and their Cayley posets.

A monoid is given by generators; elements are tuples with the free coordinates
first and the torsion coordinates reduced modulo their moduli.  Cayley posets
of infinite monoids are only ever materialised on finite windows.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Optional, Sequence

from .errors import ArityMismatch, NoMinimum, NotPointed, SizeLimit
from .poset import Poset, extremes, is_isomorphic, induced
from .snf import hermite_normal_form, smith_normal_form

__all__ = [
    "MonoidPresentation", "Pointedness", "make_presentation", "is_pointed",
    "TruncatedPoset", "truncated_cayley", "check_auto_equivalent", "AutoEquivReport",
    "LatticeBasis", "atoms_of", "collision_lattice", "smith_normal_form",
    "Quotient", "quotient_structure", "roundtrip_check", "RoundtripReport",
    "lex_counterexample", "LexReport", "finite_window",
]

MEMBER_CAP = 200_000


@dataclass(frozen=True)
class Pointedness:
    status: str  # "pointed" | "not_pointed" | "undetermined"
    witness: Optional[tuple] = None      # coefficients summing the generators to zero
    functional: Optional[tuple] = None  # integer w with w.g > 0 on every free part
    bound: Optional[int] = None


@dataclass(frozen=True)
class MonoidPresentation:
    free_rank: int
    torsion: tuple
    generators: tuple
    pointedness: Pointedness = field(compare=False, default=Pointedness("undetermined"))

    @property
    def arity(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def status(self) -> str:
        return self.pointedness.status

    def reduce(self, v: Sequence[int]) -> tuple:
        m = self.free_rank
        return tuple(v[:m]) + tuple(x % d for x, d in zip(v[m:], self.torsion))

    def add(self, u: Sequence[int], v: Sequence[int]) -> tuple:
        return self.reduce([a + b for a, b in zip(u, v)])

    def sub(self, u: Sequence[int], v: Sequence[int]) -> tuple:
        return self.reduce([a - b for a, b in zip(u, v)])

    @property
    def zero(self) -> tuple:
        return (0,) * self.arity

    def combine(self, coeffs: Sequence[int], gens: Optional[Sequence[tuple]] = None) -> tuple:
        gens = self.generators if gens is None else gens
        out = [0] * self.arity
        for c, g in zip(coeffs, gens):
            if c:
                for i, x in enumerate(g):
                    out[i] += c * x
        return self.reduce(out)

    def weight(self, v: Sequence[int]) -> int:
        w = self.pointedness.functional
        return sum(a * b for a, b in zip(w, v[:self.free_rank]))

    def label(self, v: Sequence[int]) -> str:
        if self.arity == 1 and self.free_rank == 1:
            return str(v[0])
        return "(" + ",".join(map(str, v)) + ")"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion),
                "generators": [list(g) for g in self.generators]}


def make_presentation(m: int, torsion: Sequence[int], generators: Sequence[Sequence[int]],
                      bound: Optional[int] = None) -> MonoidPresentation:
    torsion = tuple(int(d) for d in torsion)
    if m < 0 or any(d < 2 for d in torsion):
        raise ValueError("free rank must be >= 0 and moduli >= 2")
    gens = []
    for g in generators:
        g = [int(x) for x in (g if isinstance(g, (list, tuple)) else [g])]
        if len(g) != m + len(torsion):
            raise ArityMismatch(f"generator {g} has arity {len(g)}, expected {m + len(torsion)}")
        gens.append(g)
    if not gens:
        raise ValueError("at least one generator is required")
    p = MonoidPresentation(m, torsion, ())
    gens = tuple(p.reduce(g) for g in gens)
    if any(g == p.zero for g in gens):
        raise ValueError("generators must be nonzero")
    p = MonoidPresentation(m, torsion, gens)
    return MonoidPresentation(m, torsion, gens, is_pointed(p, bound))


# --- pointedness ------------------------------------------------------------------

def _torsion_order(p: MonoidPresentation, g: tuple) -> int:
    out = 1
    for x, d in zip(g[p.free_rank:], p.torsion):
        out = math.lcm(out, d // math.gcd(x, d))
    return out


def _to_ints(values: Sequence[float], max_den: int = 10 ** 6) -> list[int]:
    fr = [Fraction(v).limit_denominator(max_den) for v in values]
    den = math.lcm(*(f.denominator for f in fr)) if fr else 1
    return [int(f * den) for f in fr]


def is_pointed(p: MonoidPresentation, bound: Optional[int] = None) -> Pointedness:
    """Decide whether 0 is the only invertible element.

    By Gordan's alternative either some w has w.F > 0 on every free part F
    (pointed), or a nonnegative nonzero rational combination of the free parts
    vanishes; scaled to integers and multiplied by the torsion exponent it sums
    the generators to zero (not pointed).  Both certificates come from a
    linear program and are re-checked in exact arithmetic; if neither checks
    out, a bounded search for a zero combination decides or the answer is
    "undetermined".
    """
    from scipy.optimize import linprog

    m, k = p.free_rank, len(p.generators)
    free = [g[:m] for g in p.generators]
    for i, f in enumerate(free):
        if not any(f):
            c = [0] * k
            c[i] = _torsion_order(p, p.generators[i])
            return Pointedness("not_pointed", witness=tuple(c))
    exponent = math.lcm(*p.torsion) if p.torsion else 1
    res = linprog([0] * m, A_ub=[[-x for x in f] for f in free], b_ub=[-1] * k,
                  bounds=[(None, None)] * m, method="highs")
    if res.status == 0:
        w = _to_ints(res.x)
        if all(sum(a * b for a, b in zip(w, f)) > 0 for f in free):
            return Pointedness("pointed", functional=tuple(w))
    res = linprog([0] * k, A_eq=[[f[j] for f in free] for j in range(m)] + [[1] * k],
                  b_eq=[0] * m + [1], bounds=[(0, None)] * k, method="highs")
    if res.status == 0:
        c = [x * exponent for x in _to_ints(res.x)]
        if any(c) and all(x >= 0 for x in c) and p.combine(c) == p.zero:
            return Pointedness("not_pointed", witness=tuple(c))
    bound = 4 if bound is None else bound
    for c in itertools.product(range(bound + 1), repeat=k):
        if any(c) and p.combine(c) == p.zero:
            return Pointedness("not_pointed", witness=tuple(c))
    return Pointedness("undetermined", bound=bound)


def _require_pointed(p: MonoidPresentation) -> None:
    if p.status != "pointed":
        raise NotPointed(f"presentation is {p.status}"
                         + (f" (witness {list(p.pointedness.witness)})" if p.pointedness.witness else ""))


def members_up_to(p: MonoidPresentation, weight: int, gens: Optional[Sequence[tuple]] = None) -> set:
    """All monoid elements whose weight is at most ``weight``."""
    _require_pointed(p)
    gens = p.generators if gens is None else gens
    seen = {p.zero}
    queue = deque([p.zero])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = p.add(x, g)
            if y not in seen and p.weight(y) <= weight:
                seen.add(y)
                if len(seen) > MEMBER_CAP:
                    raise SizeLimit(f"more than {MEMBER_CAP} monoid elements below weight {weight}")
                queue.append(y)
    return seen


# --- truncations ------------------------------------------------------------------

@dataclass
class TruncatedPoset:
    """A finite window of a (possibly infinite) poset with its translations.

    ``op(a, b)`` multiplies two elements (None when the monoid is unknown);
    ``difference(s, t)`` returns the u with s*u = t when the monoid is a group
    submonoid, used to test ontoness of translations only where the
    preimage lies in the window.
    """

    elements: list
    poset: Poset
    window: object
    op: Optional[Callable[[Hashable, Hashable], Hashable]] = None
    difference: Optional[Callable[[Hashable, Hashable], Hashable]] = None
    presentation: Optional[MonoidPresentation] = None
    index: dict = field(init=False)

    def __post_init__(self):
        self.index = {e: i for i, e in enumerate(self.elements)}

    def translate(self, s: int, x: int) -> Optional[int]:
        return self.index.get(self.op(self.elements[s], self.elements[x]))


def finite_window(P: Poset) -> TruncatedPoset:
    """A finite poset presented as its own window, with no monoid attached."""
    return TruncatedPoset(list(range(P.n)), P, "complete")


def _bounds(p: MonoidPresentation, window) -> tuple:
    if isinstance(window, int):
        return (window,) * p.free_rank
    window = tuple(int(b) for b in window)
    if len(window) != p.free_rank:
        raise ArityMismatch("window needs one bound per free coordinate")
    return window


def truncated_cayley(p: MonoidPresentation, window) -> TruncatedPoset:
    """Members with every free coordinate |x_i| <= bound_i, ordered by s <= t iff t - s in M."""
    _require_pointed(p)
    bounds = _bounds(p, window)
    w = p.pointedness.functional
    top = sum(abs(a) * b for a, b in zip(w, bounds))
    members = members_up_to(p, top)
    inside = [x for x in members if all(abs(x[i]) <= b for i, b in enumerate(bounds))]
    inside.sort(key=lambda x: (p.weight(x), x))
    # t - s has weight <= weight(t) <= top, so the member set decides the order exactly
    P = Poset.from_predicate(len(inside), lambda a, b: p.sub(inside[b], inside[a]) in members,
                             [p.label(x) for x in inside])
    return TruncatedPoset(inside, P, bounds, p.add, p.sub, p)


@dataclass
class AutoEquivReport:
    ok: bool
    checks: dict
    witnesses: dict
    atoms: list
    global_min: Optional[str]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks,
                "witnesses": {k: list(map(str, v)) for k, v in self.witnesses.items()},
                "atoms": self.atoms, "global_min": self.global_min}


def check_auto_equivalent(t: TruncatedPoset) -> AutoEquivReport:
    """Check the translations x -> s*x on the window.

    Each must map into up(s), be injective, preserve and reflect the order and
    hit every element of up(s) whose preimage is in the window; translations
    must commute.  Without an operation the poset is taken to be complete and
    every up(x) must be isomorphic to the whole poset.
    """
    P = t.poset
    ext = extremes(P)
    if ext.global_min is None:
        raise NoMinimum("auto-equivalence needs a global minimum")
    checks = {}
    wit: dict = {}
    lab = P.labels

    def fail(name, *w):
        checks[name] = False
        wit.setdefault(name, tuple(w))

    if t.op is None:
        checks["isomorphism"] = True
        for x in range(P.n):
            up = [y for y in range(P.n) if P.leq(x, y)]
            if len(up) != P.n or is_isomorphic(P, induced(P, up)) is None:
                fail("isomorphism", lab[x])
                break
    else:
        for name in ("into_upset", "injective", "preserving", "reflecting", "onto", "commuting"):
            checks[name] = True
        n = P.n
        phi = [[t.translate(s, x) for x in range(n)] for s in range(n)]
        for s in range(n):
            row = phi[s]
            dom = [x for x in range(n) if row[x] is not None]
            seen = {}
            for x in dom:
                y = row[x]
                if not P.leq(s, y):
                    fail("into_upset", lab[s], lab[x])
                if y in seen:
                    fail("injective", lab[s], lab[seen[y]], lab[x])
                seen.setdefault(y, x)
            for x in dom:
                for z in dom:
                    le = P.leq(x, z)
                    le2 = P.leq(row[x], row[z])
                    if le and not le2:
                        fail("preserving", lab[s], lab[x], lab[z])
                    if le2 and not le:
                        fail("reflecting", lab[s], lab[x], lab[z])
            for y in range(n):
                if P.leq(s, y) and y not in seen:
                    if t.difference is not None and t.difference(t.elements[s], t.elements[y]) not in t.index:
                        continue
                    fail("onto", lab[s], lab[y])
        for a in range(n):
            for b in range(a):
                for x in range(n):
                    bx, ax = phi[b][x], phi[a][x]
                    if bx is None or ax is None:
                        continue
                    u, v = phi[a][bx], phi[b][ax]
                    if u is not None and v is not None and u != v:
                        fail("commuting", lab[a], lab[b], lab[x])
    return AutoEquivReport(all(checks.values()), checks, wit,
                           [lab[a] for a in ext.atoms], lab[ext.global_min])


# --- collision lattice and quotient -------------------------------------------------

def atoms_of(p: MonoidPresentation) -> list[tuple]:
    """Generators not expressible through the others (the minimal generating set)."""
    _require_pointed(p)
    gens = list(dict.fromkeys(p.generators))
    keep = []
    for i, g in enumerate(gens):
        others = gens[:i] + gens[i + 1:]
        if not others or g not in members_up_to(p, p.weight(g), others):
            keep.append(g)
    return keep


@dataclass(frozen=True)
class LatticeBasis:
    rows: tuple
    atoms: tuple
    bound: int

    @property
    def rank(self) -> int:
        return len(self.rows)


def default_degree_bound(p: MonoidPresentation, atoms: Sequence[tuple]) -> int:
    exponent = math.lcm(*p.torsion) if p.torsion else 1
    return max(2, sum(p.weight(a) for a in atoms), exponent)


def collision_lattice(p: MonoidPresentation, bound: Optional[int] = None) -> LatticeBasis:
    """Differences of atom-exponent vectors with equal value, up to total degree ``bound``."""
    atoms = atoms_of(p)
    A = len(atoms)
    bound = default_degree_bound(p, atoms) if bound is None else bound
    if math.comb(bound + A, A) > MEMBER_CAP:
        raise SizeLimit(f"degree bound {bound} over {A} atoms is too large")
    first: dict = {}
    rows = []
    level = {(0,) * A: p.zero}
    first[p.zero] = (0,) * A
    for _ in range(bound):
        nxt = {}
        for alpha, val in level.items():
            for a in range(A):
                beta = alpha[:a] + (alpha[a] + 1,) + alpha[a + 1:]
                if beta in nxt:
                    continue
                v = p.add(val, atoms[a])
                nxt[beta] = v
                prev = first.setdefault(v, beta)
                if prev != beta:
                    rows.append([x - y for x, y in zip(beta, prev)])
        level = nxt
    return LatticeBasis(tuple(tuple(r) for r in hermite_normal_form(rows, A)), tuple(atoms), bound)


@dataclass(frozen=True)
class Quotient:
    free_rank: int
    torsion: tuple
    atom_images: tuple

    def presentation(self) -> MonoidPresentation:
        return make_presentation(self.free_rank, self.torsion, self.atom_images)


def quotient_structure(L: LatticeBasis | Sequence[Sequence[int]], atom_count: int) -> Quotient:
    """Z^A / L as Z^m + torsion via Smith normal form, with the images of the unit vectors.

    In rank one the sign is normalised so that the first atom image is positive.
    """
    rows = [list(r) for r in (L.rows if isinstance(L, LatticeBasis) else L)]
    if any(len(r) != atom_count for r in rows):
        raise ArityMismatch("lattice rows must have one entry per atom")
    if rows:
        _, S, V = smith_normal_form(rows)
        d = [S[i][i] for i in range(min(len(rows), atom_count))]
    else:
        V, d = [[int(i == j) for j in range(atom_count)] for i in range(atom_count)], []
    r = sum(1 for x in d if x)
    tors_idx = [i for i in range(r) if d[i] > 1]
    free_idx = list(range(r, atom_count))
    images = []
    for a in range(atom_count):
        y = V[a]
        images.append([y[i] for i in free_idx] + [y[i] % d[i] for i in tors_idx])
    m = len(free_idx)
    if m == 1 and images and images[0][0] < 0:
        images = [[-v[0]] + v[1:] for v in images]
    return Quotient(m, tuple(d[i] for i in tors_idx), tuple(tuple(v) for v in images))


@dataclass
class RoundtripReport:
    ok: bool
    atoms: list
    lattice: list
    quotient: Quotient
    recovered: MonoidPresentation
    degree: int
    ball_size: int
    same_window: Optional[bool]
    detail: str = ""

    def to_json(self) -> dict:
        q = self.quotient
        return {"ok": self.ok, "atoms": [list(a) for a in self.atoms],
                "lattice": [list(r) for r in self.lattice],
                "quotient": {"free_rank": q.free_rank, "torsion": list(q.torsion),
                             "atom_images": [list(v) for v in q.atom_images]},
                "degree": self.degree, "ball_size": self.ball_size,
                "same_window": self.same_window, "detail": self.detail}


def _ball(A: int, degree: int):
    for total in range(degree + 1):
        for c in itertools.combinations_with_replacement(range(A), total):
            alpha = [0] * A
            for a in c:
                alpha[a] += 1
            yield tuple(alpha)


def roundtrip_check(p: MonoidPresentation, bound: Optional[int] = None,
                    degree: int = 6, window=None) -> RoundtripReport:
    """Rebuild the monoid from its collision lattice and compare Cayley posets.

    The comparison runs on the degree ball {f(alpha) : |alpha| <= degree} of
    both monoids via f(alpha) -> f'(alpha): the map must be well defined,
    bijective, and preserve and reflect the order.  When the recovered
    generators coincide with the atoms, the value windows are also compared
    directly (``window`` defaults to the largest free coordinate in the ball).
    """
    L = collision_lattice(p, bound)
    atoms = list(L.atoms)
    q = quotient_structure(L, len(atoms))
    p2 = q.presentation()
    report = RoundtripReport(False, atoms, list(L.rows), q, p2, degree, 0, None)
    if p2.status != "pointed":
        report.detail = "recovered monoid is not pointed"
        return report
    alphas = list(_ball(len(atoms), degree))
    vals1 = [p.combine(a, atoms) for a in alphas]
    vals2 = [p2.combine(a, p2.generators) for a in alphas]
    fwd: dict = {}
    for v1, v2 in zip(vals1, vals2):
        if fwd.setdefault(v1, v2) != v2:
            report.detail = f"f identifies differently at {v1}"
            return report
    if len(set(fwd.values())) != len(fwd):
        report.detail = "recovered monoid identifies more elements"
        return report
    keys = list(fwd)
    report.ball_size = len(keys)
    mem1 = members_up_to(p, max(p.weight(v) for v in keys))
    mem2 = members_up_to(p2, max(p2.weight(fwd[v]) for v in keys))
    for s in keys:
        for t in keys:
            if (p.sub(t, s) in mem1) != (p2.sub(fwd[t], fwd[s]) in mem2):
                report.detail = f"order differs between {s} and {t}"
                return report
    report.ok = True
    if sorted(p2.generators) == sorted(atoms) and p2.torsion == p.torsion:
        if window is None:
            window = max((max(map(abs, v[:p.free_rank]), default=0) for v in keys), default=0)
        t1, t2 = truncated_cayley(p, window), truncated_cayley(p2, window)
        report.same_window = t1.elements == t2.elements and t1.poset.up == t2.poset.up
        report.ok = report.same_window
    return report


# --- lexicographic counterexample -----------------------------------------------------

def lex_product(a: tuple, b: tuple) -> tuple:
    (i, j), (k, l) = a, b
    if i > k:
        return a
    if i < k:
        return b
    return (i, max(j, l))


def lex_iso(x: tuple, y: tuple) -> tuple:
    """The unique order isomorphism of (N^2, lex) onto up(x), applied to y."""
    (i, j), (k, l) = x, y
    return (i + k, l) if k > 0 else (i, j + l)


@dataclass
class LexReport:
    window: tuple
    size: int
    associative: bool
    commutative: bool
    identity: Optional[tuple]
    realizes_lex: bool
    atoms: list
    cancellation_witness: Optional[tuple]
    translations: AutoEquivReport
    iso_commute_witness: Optional[tuple]

    @property
    def monoid_ok(self) -> bool:
        return self.associative and self.commutative and self.identity == (0, 0)

    @property
    def auto_equivalent_on_window(self) -> bool:
        return self.translations.ok and self.iso_commute_witness is None

    def to_json(self) -> dict:
        return {"window": list(self.window), "size": self.size, "associative": self.associative,
                "commutative": self.commutative,
                "identity": list(self.identity) if self.identity else None,
                "realizes_lex": self.realizes_lex, "atoms": self.atoms,
                "cancellation_witness": [list(x) for x in self.cancellation_witness]
                if self.cancellation_witness else None,
                "translations": self.translations.to_json(),
                "iso_commute_witness": [list(x) for x in self.iso_commute_witness]
                if self.iso_commute_witness else None,
                "auto_equivalent_on_window": self.auto_equivalent_on_window}


def lex_counterexample(window: tuple = (3, 4)) -> LexReport:
    """(N^2, lex) on {0..a} x {0..b} with the max-in-lex-order operation.

    Checks the monoid axioms exhaustively, compares the Cayley order with the
    lexicographic order, finds a cancellation failure, and runs the
    auto-equivalence checks: the translations by the operation and, separately,
    whether the unique isomorphisms onto principal upsets commute.
    """
    from .algebra import OpTable, cayley_poset, is_associative, pair_act

    a, b = window
    elems = [(i, j) for i in range(a + 1) for j in range(b + 1)]
    idx = {e: k for k, e in enumerate(elems)}
    n = len(elems)
    table = [[idx[lex_product(x, y)] for y in elems] for x in elems]
    T = OpTable(table)
    assoc = is_associative(table)
    comm = T.is_commutative()
    e = T.identity()
    labels = [f"({i},{j})" for i, j in elems]
    lex = Poset.from_predicate(n, lambda u, v: elems[u] <= elems[v], labels)
    realizes = assoc and cayley_poset(pair_act(T, range(n)), labels).up == lex.up
    witness = None
    for x, y, z in itertools.product(range(n), repeat=3):
        if y != z and table[x][y] == table[x][z]:
            witness = (elems[x], elems[y], elems[z])
            break
    trunc = TruncatedPoset(elems, lex, window, lex_product)
    translations = check_auto_equivalent(trunc)
    iso_w = None
    for x, y, z in itertools.product(elems, repeat=3):
        u, v = lex_iso(x, lex_iso(y, z)), lex_iso(y, lex_iso(x, z))
        if u in idx and v in idx and u != v:
            iso_w = (x, y, z)
            break
    ext = extremes(lex)
    return LexReport(window, n, assoc, comm, elems[e] if e is not None else None, realizes,
                     [labels[x] for x in ext.atoms], witness, translations, iso_w)
