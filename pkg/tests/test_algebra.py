import pytest

from cayleyposets.algebra import (
    Certificate, OpTable, SemigroupAct, cayley_poset, check_act, idempotent_consequences,
    inflationary_act, left_mult_endomorphisms, pair_act, verify_certificate,
)
from cayleyposets.errors import (
    CertificateInvalid, IncompatibleAct, NotAPartialOrder, NotClosed, SizeLimit,
)
from cayleyposets.families import n_poset
from cayleyposets.poset import antichain, chain, enumerate_posets, is_isomorphic
from cayleyposets.recognizer import recognize
from oracles import certificate_is_valid, leq_matrix

# (N, +) truncated: max(a + b, 2) on {0, 1, 2}
TRUNC = OpTable(((0, 1, 2), (1, 2, 2), (2, 2, 2)))


def test_optable_basics():
    assert TRUNC.is_associative() and TRUNC.is_commutative()
    assert TRUNC.identity() == 0
    assert TRUNC.is_closed([1, 2]) and not TRUNC.is_closed([1])


def test_pair_act_gives_chain():
    P = cayley_poset(pair_act(TRUNC, [0, 1, 2]))
    assert is_isomorphic(P, chain(3))
    Q = cayley_poset(pair_act(TRUNC, [0, 2]))
    assert Q.leq(0, 2) and not Q.comparable(0, 1)


def test_pair_act_rejects_open_subset():
    with pytest.raises(NotClosed):
        pair_act(TRUNC, [1])


def test_act_compatibility_is_checked():
    with pytest.raises(IncompatibleAct):
        SemigroupAct(2, OpTable(((0, 1), (1, 0))), ((0, 1), (0, 1)))


def test_cyclic_act_is_not_a_partial_order():
    act = pair_act(OpTable(((0, 1), (1, 0))), [0, 1])
    assert check_act(act) == (True, False)
    with pytest.raises(NotAPartialOrder):
        cayley_poset(act)


def test_inflationary_act_realises_every_small_poset():
    for n in range(1, 5):
        for P in enumerate_posets(n):
            assert cayley_poset(inflationary_act(P)) == P
    with pytest.raises(SizeLimit):
        inflationary_act(antichain(1).__class__((1,)), cap=0)


def test_verify_accepts_recognizer_certificates():
    for P in enumerate_posets(4):
        for kind in ("semigroup", "monoid", "full", "full_monoid"):
            v = recognize(P, kind)
            if v.status == "yes":
                c = v.certificate
                assert verify_certificate(P, c)
                assert certificate_is_valid(leq_matrix(P), c.kind, c.table, c.s_subset, c.identity)


@pytest.mark.parametrize("cert,reason", [
    (Certificate("full", ((0,),), (0,)), "shape"),
    (Certificate("full", ((0, 5), (1, 1)), (0, 1)), "range"),
    (Certificate("weird", ((0, 1), (1, 1)), (0, 1)), "kind_mismatch"),
    (Certificate("full", ((1, 0), (0, 0)), (0, 1)), "associativity"),
    (Certificate("semigroup", ((0, 1), (1, 0)), (1,)), "not_closed"),
    (Certificate("full", ((0, 1), (1, 1)), (1,)), "kind_mismatch"),
    (Certificate("monoid", ((0, 1), (1, 1)), (0, 1)), "identity"),
    (Certificate("monoid", ((0, 1), (1, 1)), (1,), 0), "identity"),
    (Certificate("semigroup", ((0, 0), (1, 1)), (0,)), "not_upset"),
    (Certificate("full", ((0, 0), (1, 1)), (0, 1)), "order_mismatch"),
])
def test_verify_reasons(cert, reason):
    v = verify_certificate(chain(2), cert)
    assert not v and v.reason == reason


def test_left_mult_endomorphisms():
    cert = recognize(n_poset(), "full").certificate
    maps = left_mult_endomorphisms(n_poset(), cert)
    assert len(maps) == 4 and all(m.is_order_preserving(n_poset()) for m in maps)
    with pytest.raises(CertificateInvalid):
        left_mult_endomorphisms(chain(2), Certificate("full", ((0, 0), (1, 1)), (0, 1)))


def test_idempotent_consequences():
    P = chain(3)
    part = [[0, None, None], [None, None, None], [None, None, None]]
    res = idempotent_consequences(part, P)
    assert not res.contradiction and res.table[0] == [0, 1, 2] and res.forced == 2
    part = [[0, 2, None], [None, None, None], [None, None, None]]
    assert idempotent_consequences(part, P).contradiction


def test_certificate_json_roundtrip():
    c = Certificate("monoid", ((0, 1), (1, 1)), (0, 1), 0)
    assert Certificate.from_json(c.to_json()) == c
