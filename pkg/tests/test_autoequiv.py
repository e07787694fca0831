import math

import pytest

from cayleyposets.autoequiv import (
    atoms_of, check_auto_equivalent, collision_lattice, finite_window, is_pointed, lex_counterexample,
    make_presentation, members_up_to, quotient_structure, roundtrip_check, truncated_cayley,
)
from cayleyposets.errors import ArityMismatch, NoMinimum, NotPointed
from cayleyposets.families import n_poset
from cayleyposets.poset import add_minimum, antichain, chain, hasse


def numerical(*gens):
    return make_presentation(1, [], [[g] for g in gens])


def test_members_of_numerical_semigroup():
    p = numerical(3, 5)
    assert sorted(v[0] for v in members_up_to(p, 13)) == [0, 3, 5, 6, 8, 9, 10, 11, 12, 13]


def test_truncation_order_is_difference_membership():
    t = truncated_cayley(numerical(3, 5), 13)
    vals = [v[0] for v in t.elements]
    member = set(range(0, 14)) - {1, 2, 4, 7}
    for a in range(len(vals)):
        for b in range(len(vals)):
            assert t.poset.leq(a, b) == (vals[b] - vals[a] in member)


def test_pointedness():
    assert numerical(3, 5).status == "pointed"
    p = make_presentation(1, [], [[1], [-1]])
    assert p.status == "not_pointed"
    w = p.pointedness.witness
    assert sum(c * g[0] for c, g in zip(w, p.generators)) == 0 and any(w)
    assert make_presentation(0, [2], [[1]]).status == "not_pointed"
    q = make_presentation(2, [], [[1, 0], [1, 1], [0, 1]])
    f = q.pointedness.functional
    assert all(sum(a * b for a, b in zip(f, g)) > 0 for g in q.generators)
    with pytest.raises(NotPointed):
        truncated_cayley(p, 3)


def test_presentation_errors():
    with pytest.raises(ArityMismatch):
        make_presentation(2, [], [[1]])
    with pytest.raises(ValueError):
        make_presentation(1, [], [[0]])
    with pytest.raises(ValueError):
        make_presentation(1, [1], [[1, 0]])


@pytest.mark.parametrize("a,b", [(a, b) for a in range(2, 12) for b in range(a + 1, 31)
                                 if math.gcd(a, b) == 1 and a * b <= 60])
def test_coprime_pairs_collision_lattice(a, b):
    p = numerical(a, b)
    L = collision_lattice(p)
    assert L.rows == ((b, -a),)
    q = quotient_structure(L, 2)
    assert q.free_rank == 1 and q.torsion == () and q.atom_images == ((a,), (b,))


@pytest.mark.parametrize("free_rank,torsion,gens", [
    (1, [], [[3], [5]]),
    (1, [], [[2], [3]]),
    (1, [], [[4], [6], [7]]),
    (2, [], [[1, 0], [0, 1]]),
    (2, [], [[1, 0], [1, 1], [1, 2]]),
    (1, [2], [[1, 0], [1, 1]]),
])
def test_roundtrip(free_rank, torsion, gens):
    rep = roundtrip_check(make_presentation(free_rank, torsion, gens))
    assert rep.ok, rep.detail


def test_known_lattices():
    assert collision_lattice(numerical(4, 6, 7)).rows == ((1, 4, -4), (0, 7, -6))
    assert collision_lattice(make_presentation(2, [], [[1, 0], [0, 1]])).rows == ()
    p = make_presentation(1, [2], [[1, 0], [1, 1]])
    L = collision_lattice(p)
    assert L.rows == ((2, -2),)
    q = quotient_structure(L, 2)
    assert q.free_rank == 1 and q.torsion == (2,)


def test_atoms():
    assert atoms_of(numerical(3, 5, 6, 8)) == [(3,), (5,)]


def test_auto_equivalence_of_truncations():
    for p in (numerical(3, 5), numerical(2, 3), make_presentation(2, [], [[1, 0], [0, 1]])):
        rep = check_auto_equivalent(truncated_cayley(p, 8 if p.free_rank == 1 else 3))
        assert rep.ok, rep.witnesses


def test_finite_window_checks():
    assert check_auto_equivalent(finite_window(chain(3))).ok is False
    assert check_auto_equivalent(finite_window(chain(1))).ok
    assert not check_auto_equivalent(finite_window(add_minimum(n_poset()))).ok
    with pytest.raises(NoMinimum):
        check_auto_equivalent(finite_window(antichain(2)))


def test_lex_counterexample():
    rep = lex_counterexample((3, 4))
    assert rep.monoid_ok and not rep.auto_equivalent_on_window
    a, b, c = rep.cancellation_witness
    assert b != c
