"""Membership of finite posets in the Cayley classes, by exhaustive search.

Candidate choices of S per class:

* semigroup: every non-empty upset (S must be one); with a global minimum
  the search is restricted to S = P with the minimum as identity, since a
  semigroup poset with a minimum is a full monoid poset whose identity is
  that minimum.
* monoid: S = up(e) with e the identity, for every e passing
  :func:`monoid_feasibility_prune`.
* full: S = P.
* full_monoid: S = P with the global minimum as identity.

A "no" is only reported after every candidate was exhausted; running out of
budget gives "unknown".
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .algebra import (KINDS, Certificate, SemigroupAct, inflationary_act,
                      verify_certificate)
from .errors import SizeLimit
from .poset import Poset, bits, canonical_form, enumerate_posets, extremes, hasse, induced
from .search import BudgetExceeded, SearchStats, TableSearch

__all__ = [
    "DEFAULT_BUDGET", "Verdict", "ClassLabelSet", "recognize", "classify", "census",
    "verify_certificate", "monoid_feasibility_prune", "candidates", "default_budget",
]

DEFAULT_BUDGET = 10 ** 8
CENSUS_CAP = 6
QUERY_KINDS = KINDS + ("act",)


def default_budget() -> int:
    env = os.environ.get("CAYLEY_POSET_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass
class Verdict:
    kind: str
    status: str  # "yes" | "no" | "unknown"
    certificate: Optional[Certificate] = None
    stats: SearchStats = field(default_factory=SearchStats)
    act: Optional[SemigroupAct] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"kind": self.kind, "status": self.status, "stats": self.stats.to_json()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.note:
            out["note"] = self.note
        return out


# --- necessary conditions -------------------------------------------------------

def _popcount(m: int) -> int:
    return bin(m).count("1")


def _maxima_count(P: Poset, mask: int) -> int:
    return sum(1 for x in bits(mask) if P.up[x] & mask == 1 << x)


def find_order_map(A: Poset, B: Poset, injective: bool = False, surjective: bool = False,
                   fixed: Optional[dict] = None) -> Optional[tuple]:
    """Backtracking search for an order-preserving map A -> B."""
    n, m = A.n, B.n
    if injective and n > m:
        return None
    if surjective and m > n:
        return None
    fixed = fixed or {}
    img = [-1] * n
    used = [0] * m
    order = sorted(range(n), key=lambda x: (x not in fixed, -_popcount(A.up[x] | A.down[x]), x))

    def hits_needed(k):
        return sum(1 for v in range(m) if not used[v]) <= n - k

    def rec(k):
        if k == n:
            return not surjective or all(used)
        if surjective and not hits_needed(k):
            return False
        x = order[k]
        choices = [fixed[x]] if x in fixed else range(m)
        for v in choices:
            if injective and used[v]:
                continue
            ok = True
            for j in range(k):
                y = order[j]
                w = img[y]
                if A.leq(x, y) and not B.leq(v, w):
                    ok = False
                    break
                if A.leq(y, x) and not B.leq(w, v):
                    ok = False
                    break
            if not ok:
                continue
            img[x] = v
            used[v] += 1
            if rec(k + 1):
                return True
            used[v] -= 1
            img[x] = -1
        return False

    return tuple(img) if rec(0) else None


def monoid_feasibility_prune(P: Poset, e: int) -> bool:
    """False only if ``e`` cannot be the identity of a monoid certificate.

    Checks that every up(x) is the monotone image of up(e) with e -> x
    (left multiplication by x), that up(e) has enough elements and maximal
    elements for that, and that for x <= e the elements incomparable to x
    embed monotonically into those incomparable to e.
    """
    up_e = P.up[e]
    size_e = _popcount(up_e)
    max_e = _maxima_count(P, up_e)
    for x in range(P.n):
        if _popcount(P.up[x]) > size_e or _maxima_count(P, P.up[x]) > max_e:
            return False
    inc_e = [y for y in range(P.n) if not P.comparable(e, y)]
    for x in bits(P.down[e]):
        if x == e:
            continue
        inc_x = [y for y in range(P.n) if not P.comparable(x, y)]
        if len(inc_x) > len(inc_e):
            return False
        if inc_x and find_order_map(induced(P, inc_x), induced(P, inc_e), injective=True) is None:
            return False
    ue = list(bits(up_e))
    A = induced(P, ue)
    for x in range(P.n):
        if x == e:
            continue
        ux = list(bits(P.up[x]))
        B = induced(P, ux)
        if find_order_map(A, B, surjective=True, fixed={ue.index(e): ux.index(x)}) is None:
            return False
    return True


def candidates(P: Poset, kind: str, prune: bool = True) -> list[tuple[int, Optional[int]]]:
    """Candidate ``(s_mask, identity)`` pairs in ascending S-bitmask order."""
    full = P.full_mask
    ext = extremes(P)
    gmin = ext.global_min
    if kind == "full":
        return [(full, None)]
    if kind == "full_monoid":
        if prune:
            return [] if gmin is None else [(full, gmin)]
        return [(full, e) for e in range(P.n)]
    if kind == "monoid":
        out = [(P.up[e], e) for e in range(P.n)
               if not prune or monoid_feasibility_prune(P, e)]
        return sorted(out)
    if kind == "semigroup":
        if prune and gmin is not None:
            return [(full, gmin)]
        need = max((_popcount(r) for r in P.up), default=0)
        need_max = max((_maxima_count(P, r) for r in P.up), default=0)
        out = []
        for U in P.upsets():
            if not U:
                continue
            if prune and (_popcount(U) < need or _maxima_count(P, U) < need_max):
                continue
            out.append((U, None))
        return out
    raise ValueError(f"unknown class {kind!r}")


def _run_candidate(P: Poset, s_mask: int, e, prune: bool, budget):
    stats = SearchStats()
    try:
        table = TableSearch(P, s_mask, e, prune=prune, budget=budget, stats=stats).solve()
    except BudgetExceeded:
        return "unknown", None, stats
    return ("yes" if table is not None else "no"), table, stats


def _pool_job(args):
    up, labels, s_mask, e, prune, budget = args
    return _run_candidate(Poset(up, labels, check=False), s_mask, e, prune, budget)


def recognize(P: Poset, kind: str, budget: Optional[int] = None, *,
              deterministic: bool = True, threads: int = 1, prune: bool = True) -> Verdict:
    """Decide whether P belongs to the class ``kind``.

    A "yes" carries a certificate that has passed :func:`verify_certificate`;
    sequential search returns the least certificate in (S bitmask, table) order.
    """
    if kind not in QUERY_KINDS:
        raise ValueError(f"unknown class {kind!r}")
    budget = default_budget() if budget is None else budget
    t0 = time.perf_counter()
    if kind == "act":
        try:
            act = inflationary_act(P)
        except SizeLimit:
            return Verdict("act", "yes", note="every poset is the Cayley poset of its inflationary monoid")
        return Verdict("act", "yes", act=act, note="inflationary monoid act")
    cands = candidates(P, kind, prune)
    stats = SearchStats()
    found = None
    unknown = False
    if threads > 1 and not deterministic and len(cands) > 1:
        jobs = [(P.up, P.labels, s, e, prune, budget) for s, e in cands]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_pool_job, jobs))
        for (s, e), (status, table, st) in zip(cands, results):
            stats.merge(st)
            if status == "yes" and found is None:
                found = (s, e, table)
            unknown |= status == "unknown"
    else:
        for s, e in cands:
            remaining = budget - stats.nodes
            status, table, st = _run_candidate(P, s, e, prune, max(remaining, 0))
            stats.merge(st)
            if status == "yes":
                found = (s, e, table)
                break
            if status == "unknown":
                unknown = True
                break
    if not cands:
        stats.closed["no_candidate"] += 1
    stats.elapsed = time.perf_counter() - t0
    if found is not None:
        s, e, table = found
        cert_identity = e if kind in ("monoid", "full_monoid") else None
        cert = Certificate(kind, table, list(bits(s)), cert_identity)
        v = verify_certificate(P, cert)
        if not v:
            raise RuntimeError(f"search produced an invalid certificate: {v.reason} {v.detail}")
        return Verdict(kind, "yes", cert, stats)
    return Verdict(kind, "unknown" if unknown else "no", None, stats)


# --- classification ---------------------------------------------------------------

@dataclass
class ClassLabelSet:
    verdicts: dict

    def flags(self) -> dict:
        return {k: v.status for k, v in self.verdicts.items()}

    def __getitem__(self, kind: str) -> Verdict:
        return self.verdicts[kind]

    def consistent(self) -> bool:
        f = self.flags()
        if f.get("act") != "yes":
            return False
        if f["full_monoid"] == "yes" and not (f["full"] == "yes" and f["monoid"] == "yes"):
            return False
        if "yes" in (f["monoid"], f["full"]) and f["semigroup"] != "yes":
            return False
        if f["semigroup"] == "no" and "yes" in (f["monoid"], f["full"], f["full_monoid"]):
            return False
        return True

    def to_json(self) -> dict:
        return {k: v.to_json() for k, v in self.verdicts.items()}


def classify(P: Poset, budget: Optional[int] = None, *, prune: bool = True,
             threads: int = 1) -> ClassLabelSet:
    """Labels for all four classes plus ``act``.

    full_monoid is derived from the semigroup verdict and the existence of a
    global minimum instead of being searched separately.
    """
    budget = default_budget() if budget is None else budget
    kw = dict(prune=prune, threads=threads, deterministic=threads <= 1)
    full = recognize(P, "full", budget, **kw)
    monoid = recognize(P, "monoid", budget, **kw)
    if full.status == "yes":
        semi = Verdict("semigroup", "yes", full.certificate.with_kind("semigroup"), SearchStats(),
                       note="from full certificate")
    elif monoid.status == "yes":
        semi = Verdict("semigroup", "yes", monoid.certificate.with_kind("semigroup"),
                       SearchStats(), note="from monoid certificate")
    else:
        semi = recognize(P, "semigroup", budget, **kw)
    gmin = extremes(P).global_min
    if gmin is None:
        fm = Verdict("full_monoid", "no", note="no global minimum")
        fm.stats.closed["no_global_min"] += 1
    elif semi.status == "yes":
        cert = semi.certificate.with_kind("full_monoid", gmin)
        v = verify_certificate(P, cert)
        if not v:
            raise RuntimeError(f"semigroup certificate with a minimum is not a full monoid: {v.reason}")
        fm = Verdict("full_monoid", "yes", cert, note="semigroup poset with global minimum")
    else:
        fm = Verdict("full_monoid", semi.status, note="derived from semigroup verdict")
    labels = ClassLabelSet({
        "semigroup": semi, "monoid": monoid, "full": full, "full_monoid": fm,
        "act": Verdict("act", "yes", note="every finite poset is an act poset"),
    })
    if not labels.consistent():
        raise RuntimeError(f"inconsistent class labels {labels.flags()}")
    return labels


# --- census -------------------------------------------------------------------------

WITNESS_RULES = {
    "full_not_full_monoid": lambda f: f["full"] == "yes" and f["full_monoid"] == "no",
    "monoid_not_full_monoid": lambda f: f["monoid"] == "yes" and f["full_monoid"] == "no",
    "semigroup_not_full": lambda f: f["semigroup"] == "yes" and f["full"] == "no",
    "semigroup_not_monoid": lambda f: f["semigroup"] == "yes" and f["monoid"] == "no",
    "monoid_not_full": lambda f: f["monoid"] == "yes" and f["full"] == "no",
    "full_not_monoid": lambda f: f["full"] == "yes" and f["monoid"] == "no",
    "poset_not_semigroup": lambda f: f["semigroup"] == "no",
}


def _cell(flags: dict) -> str:
    return ",".join(f"{k}={flags[k]}" for k in KINDS)


def census(n_max: int, budget: Optional[int] = None, *, cap: int = CENSUS_CAP,
           prune: bool = True, threads: int = 1) -> dict:
    """Classify one representative of every isomorphism class with <= n_max elements."""
    if n_max > cap:
        raise SizeLimit(f"census n_max={n_max} exceeds cap {cap}")
    t0 = time.perf_counter()
    entries = []
    counts: dict = {}
    witnesses: dict = {}
    for n in range(1, n_max + 1):
        for idx, P in enumerate(enumerate_posets(n)):
            labels = classify(P, budget, prune=prune, threads=threads)
            flags = labels.flags()
            del flags["act"]
            entry = {"n": n, "index": idx, "covers": [list(c) for c in hasse(P)], "flags": flags}
            entries.append(entry)
            cell = _cell(flags)
            counts[cell] = counts.get(cell, 0) + 1
            for name, rule in WITNESS_RULES.items():
                if name not in witnesses and rule(flags):
                    witnesses[name] = {"n": n, "index": idx, "covers": entry["covers"]}
    per_n = {}
    for e in entries:
        per_n[e["n"]] = per_n.get(e["n"], 0) + 1
    return {
        "n_max": n_max,
        "classes": len(entries),
        "per_n": per_n,
        "counts": dict(sorted(counts.items())),
        "minimal_witnesses": witnesses,
        "entries": entries,
        "elapsed": round(time.perf_counter() - t0, 3),
    }


def canonical_key(P: Poset) -> tuple:
    return canonical_form(P)[0]
