"""Named posets that separate the Cayley classes."""
from __future__ import annotations

from .poset import Poset, build_poset


def n_poset() -> Poset:
    """a < b > c < d."""
    return build_poset([("a", "b"), ("c", "b"), ("c", "d")])


def gap_poset(elements) -> Poset:
    """Integers ordered by a < b iff b - a >= 2."""
    elements = sorted(elements)
    return Poset.from_predicate(len(elements), lambda x, y: elements[y] - elements[x] >= 2,
                                [str(v) for v in elements])


def nat_c(c: int) -> Poset:
    """{0, ..., c} under the gap order."""
    return gap_poset(range(c + 1))


def nat_c_star(c: int) -> Poset:
    """{0, 2, 3, ..., c} under the gap order."""
    return gap_poset([0] + list(range(2, c + 1)))


def n_family(i: int) -> Poset:
    """The N-poset with a chain i < i-1 < ... < 1 hung below a."""
    rels = [("a", "b"), ("c", "b"), ("c", "d")]
    if i >= 1:
        rels.append(("1", "a"))
    for k in range(2, i + 1):
        rels.append((str(k), str(k - 1)))
    return build_poset(rels, ["a", "b", "c", "d"] + [str(k) for k in range(1, i + 1)])


NAMED = {
    "N": n_poset,
}


def by_name(name: str) -> Poset:
    """Parse names like ``N``, ``N4`` (nat_c), ``N6*`` (nat_c_star), ``N_2``."""
    if name == "N":
        return n_poset()
    if name.startswith("N_"):
        return n_family(int(name[2:]))
    if name.startswith("N") and name.endswith("*"):
        return nat_c_star(int(name[1:-1]))
    if name.startswith("N") and name[1:].isdigit():
        return nat_c(int(name[1:]))
    raise KeyError(name)
