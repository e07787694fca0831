import itertools

import pytest

from cayleyposets import constructions as cs
from cayleyposets import poset as po
from cayleyposets.algebra import Certificate
from cayleyposets.errors import (
    CertificateInvalid, HypothesisFailed, KindMismatch, NotAHomomorphism, NotARetract,
    NotJoinIrreducible, PreconditionFailed,
)
from cayleyposets.families import n_poset
from cayleyposets.recognizer import recognize
from oracles import certificate_is_valid, leq_matrix

KIND_RANK = {"semigroup": 0, "monoid": 1, "full": 2, "full_monoid": 3}


def small_certs(max_n=3, kinds=("semigroup", "monoid", "full", "full_monoid")):
    out = []
    for n in range(1, max_n + 1):
        for P in po.enumerate_posets(n):
            for kind in kinds:
                v = recognize(P, kind)
                if v.status == "yes":
                    out.append(cs.CertifiedPoset(P, v.certificate))
    return out


def independently_valid(cp):
    c = cp.cert
    return certificate_is_valid(leq_matrix(cp.poset), c.kind, c.table, c.s_subset, c.identity)


def test_certified_poset_rejects_bad_certificate():
    with pytest.raises(CertificateInvalid):
        cs.CertifiedPoset(po.chain(2), Certificate("full", ((0, 0), (1, 1)), (0, 1)))


def test_antichain_and_singleton():
    assert cs.singleton().kind == "full_monoid"
    cp = cs.antichain_cert(3)
    assert cp.kind == "full" and independently_valid(cp)


def test_adjoin_extrema():
    for cp in small_certs():
        top = cs.adjoin_extremum(cp, "max")
        assert top.kind == cp.kind and independently_valid(top)
        assert po.is_isomorphic(top.poset, po.add_maximum(cp.poset))
        if cp.is_full:
            bottom = cs.adjoin_extremum(cp, "min")
            assert bottom.kind == "full_monoid" and independently_valid(bottom)
            assert po.is_isomorphic(bottom.poset, po.add_minimum(cp.poset))
        else:
            with pytest.raises(KindMismatch):
                cs.adjoin_extremum(cp, "min")


def test_products():
    certs = small_certs(2)
    for a, b in itertools.product(certs, repeat=2):
        c = cs.product_cert(a, b)
        assert independently_valid(c)
        assert c.poset == po.product(a.poset, b.poset)
        full = a.is_full and b.is_full
        monoid = a.is_monoid and b.is_monoid
        assert c.is_full == full and c.is_monoid == monoid


def test_retract_of_n_poset():
    cp = cs.CertifiedPoset(n_poset(), recognize(n_poset(), "monoid").certificate)
    sigma = cs.find_retract(cp)
    assert sigma is not None and cs.check_retract(cp, sigma) is None
    full = cs.retract_to_full(cp, sigma)
    assert full.is_full and independently_valid(full)
    with pytest.raises(NotARetract):
        cs.retract_to_full(cp, tuple(range(4)))


def test_retracts_on_small_monoids():
    for cp in small_certs(3, ("monoid",)):
        sigma = cs.find_retract(cp)
        if sigma is not None:
            assert independently_valid(cs.retract_to_full(cp, sigma))


def test_blowup_matches_structural_blowup():
    inserts = [cs.singleton(), cs.antichain_cert(2),
               cs.CertifiedPoset(po.chain(2), recognize(po.chain(2), "full_monoid").certificate)]
    done = 0
    for cp in small_certs(3):
        for x in range(cp.poset.n):
            for cq in inserts:
                try:
                    out = cs.blowup_cert(cp, x, cq)
                except PreconditionFailed:
                    flags = cs.irreducible_self_centered(cp, x)
                    minimal = cp.poset.down[x] == 1 << x
                    assert (not all(flags.values()) or x not in cp.cert.s_subset
                            or not (minimal or cq.is_full))
                    continue
                done += 1
                assert out.poset == po.blowup(cp.poset, x, cq.poset)
                assert independently_valid(out)
                assert out.is_full == (cp.is_full and cq.is_full)
    assert done > 20


def test_semilattice_blowup():
    L = po.weak_order([1, 2, 1])
    cp = cs.antichain_blowup_semilattice(L, {1: 2, 2: 3})
    assert cp.is_full and cp.poset.n == 7
    assert po.is_isomorphic(cp.poset, po.blowup(po.blowup(L, 1, po.antichain(2)), 1, po.antichain(3)))
    with pytest.raises(NotJoinIrreducible):
        cs.antichain_blowup_semilattice(L, {3: 2})


def test_series_and_parallel():
    certs = small_certs(2)
    for a, b in itertools.product(certs, repeat=2):
        if b.is_full:
            s = cs.compose_cert(a, b, "series")
            assert s.poset == po.series(a.poset, b.poset) and independently_valid(s)
        else:
            with pytest.raises(KindMismatch):
                cs.compose_cert(a, b, "series")
        if cs.left_zero_in_s(a) is not None and cs.left_zero_in_s(b) is not None:
            p = cs.compose_cert(a, b, "parallel")
            assert p.poset == po.parallel(a.poset, b.poset) and independently_valid(p)


def test_parallel_with_homomorphism():
    c2 = cs.CertifiedPoset(po.chain(2), recognize(po.chain(2), "full_monoid").certificate)
    out = cs.compose_cert(c2, cs.singleton(), "parallel", "search")
    assert out.is_monoid and independently_valid(out)
    assert out.poset == po.parallel(po.chain(2), po.chain(1))
    with pytest.raises(NotAHomomorphism):
        cs.compose_cert(c2, cs.singleton(), "parallel", (0, 5))


def test_series_parallel_certificates():
    for expr in po.enumerate_sp(4):
        cp = cs.series_parallel_cert(expr)
        assert cp.is_full and cp.poset == po.eval_sp(expr)


def test_k_blowup():
    out = cs.k_blowup_monoid(cs.singleton(), 3)
    assert out.is_monoid and po.is_isomorphic(out.poset, po.antichain(3))
    c2 = cs.CertifiedPoset(po.chain(2), recognize(po.chain(2), "full_monoid").certificate)
    with pytest.raises(HypothesisFailed):
        cs.k_blowup_monoid(c2, 2)
    count = 0
    for cp in small_certs(3, ("monoid", "full_monoid")):
        for k in (2, 3):
            try:
                out = cs.k_blowup_monoid(cp, k)
            except HypothesisFailed:
                continue
            count += 1
            assert out.poset == po.k_times(cp.poset, k) and independently_valid(out)
    assert count > 0


def test_weak_order_certificates():
    w = cs.weak_order_cert([3, 1, 2])
    assert w.full.is_full and w.monoid.is_monoid
    assert w.monoid.cert.s_subset == (0, 3, 4, 5)
    assert independently_valid(w.full) and independently_valid(w.monoid)


def test_iterated_blowups_commute():
    L = po.weak_order([1, 2, 1])
    base = cs.CertifiedPoset(L, Certificate("full", cs.join_table(L), range(L.n)))
    a2, c2 = cs.antichain_cert(2), cs.CertifiedPoset(
        po.chain(2), recognize(po.chain(2), "full_monoid").certificate)
    one = cs.blowup_cert(base, L.index("1.0"), a2)
    one = cs.blowup_cert(one, one.poset.index("1.1"), c2)
    two = cs.blowup_cert(base, L.index("1.1"), c2)
    two = cs.blowup_cert(two, two.poset.index("1.0"), a2)
    assert po.is_isomorphic(one.poset, two.poset)
    assert one.kind == two.kind == "full"
    assert independently_valid(one) and independently_valid(two)
