"""JSON and DOT serialisation."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from .algebra import Certificate
from .errors import CycleError, SchemaError
from .poset import CANONICAL_MAX, Poset, _refine, canonical_form, hasse


def poset_to_json(P: Poset) -> dict:
    return {"n": P.n, "labels": list(P.labels), "covers": [list(c) for c in hasse(P)]}


def poset_from_json(obj) -> Poset:
    if not isinstance(obj, dict):
        raise SchemaError("poset must be a JSON object")
    if "poset" in obj and "n" not in obj:
        obj = obj["poset"]
    n = obj.get("n")
    if not isinstance(n, int) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    labels = obj.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n or not all(isinstance(s, str) for s in labels):
            raise SchemaError("'labels' must be a list of n strings")
        if len(set(labels)) != n:
            raise SchemaError("labels must be unique")
    covers = obj.get("covers", [])
    if not isinstance(covers, list):
        raise SchemaError("'covers' must be a list of pairs")
    pairs = []
    for k, c in enumerate(covers):
        if (not isinstance(c, list) or len(c) != 2
                or not all(isinstance(v, int) and 0 <= v < n for v in c)):
            raise SchemaError(f"covers[{k}] must be a pair of indices in 0..{n - 1}")
        pairs.append((c[0], c[1]))
    return Poset.from_covers(n, pairs, labels)


def parse_poset_file(path) -> Poset:
    """Read a poset; JSON errors are reported with their line number."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return poset_from_json(obj)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    except CycleError as exc:
        raise CycleError(f"{path}: {exc}") from None


def write_poset_file(P: Poset, path) -> None:
    Path(path).write_text(json.dumps(poset_to_json(P)) + "\n")


def certificate_from_json(obj) -> Certificate:
    try:
        return Certificate.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed certificate: {exc}") from None


def presentation_from_json(obj):
    from .autoequiv import make_presentation

    try:
        return make_presentation(obj["free_rank"], obj.get("torsion", []), obj["generators"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed presentation: {exc}") from None


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def node_order(P: Poset) -> list[int]:
    """Canonical order for small posets, refinement colour then index otherwise."""
    if P.n <= CANONICAL_MAX:
        return list(canonical_form(P)[1])
    colors = _refine(P)
    return sorted(range(P.n), key=lambda x: (colors[x], x))


def to_dot(P: Poset, cert: Optional[Certificate] = None, name: str = "poset") -> str:
    """Hasse diagram with edges pointing upward; S-elements drawn doubled when a certificate is given."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    S = set(cert.s_subset) if cert is not None else set()
    for x in node_order(P):
        attrs = [f"label={_quote(P.labels[x])}"]
        if x in S:
            attrs.append("shape=doublecircle")
        if cert is not None and cert.identity == x:
            attrs.append("style=bold")
        lines.append(f"  n{x} [{', '.join(attrs)}];")
    for a, b in hasse(P):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(P: Poset, cert: Optional[Certificate], path) -> None:
    Path(path).write_text(to_dot(P, cert))
