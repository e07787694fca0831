"""Command-line front end.

Every invocation prints one JSON run record on stdout and a short human summary
on stderr.  Exit codes: 0 decided / success, 1 input error, 2 search budget
exhausted (unknown verdict), 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from . import constructions as cons
from .algebra import Certificate
from .autoequiv import (check_auto_equivalent, lex_counterexample, make_presentation,
                        roundtrip_check, truncated_cayley)
from .errors import CayleyError
from .io import (certificate_from_json, parse_poset_file, poset_from_json, poset_to_json,
                 to_dot)
from .poset import SP, Poset
from .recognizer import census, classify, recognize

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_BREACH = 0, 1, 2, 3


class InputError(Exception):
    pass


def _digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _load_poset(args) -> Poset:
    if not args.input:
        raise InputError("--in is required")
    return parse_poset_file(args.input)


def _kind(name: str) -> str:
    return name.replace("-", "_")


# --- subcommands --------------------------------------------------------------------

def cmd_recognize(args, rec):
    P = _load_poset(args)
    rec["inputs"] = {args.input: _digest(args.input)}
    v = recognize(P, _kind(args.cls), args.budget, deterministic=args.deterministic or args.threads <= 1,
                  threads=args.threads, prune=not args.no_prune)
    rec["verdicts"] = {v.kind: v.status}
    rec["stats"] = v.stats.to_json()
    rec["result"] = v.to_json()
    if args.out and v.certificate is not None:
        _write(args.out, json.dumps(v.certificate.to_json()) + "\n")
    summary = f"{v.kind}: {v.status} ({v.stats.nodes} nodes)"
    return (EXIT_UNKNOWN if v.status == "unknown" else EXIT_OK), summary


def cmd_classify(args, rec):
    P = _load_poset(args)
    rec["inputs"] = {args.input: _digest(args.input)}
    labels = classify(P, args.budget, prune=not args.no_prune, threads=args.threads)
    flags = labels.flags()
    rec["verdicts"] = flags
    rec["stats"] = {k: v.stats.to_json() for k, v in labels.verdicts.items()}
    rec["result"] = labels.to_json()
    if args.out:
        _write(args.out, json.dumps(labels.to_json(), indent=1) + "\n")
    unknown = any(s == "unknown" for s in flags.values())
    return (EXIT_UNKNOWN if unknown else EXIT_OK), ", ".join(f"{k}={s}" for k, s in flags.items())


def cmd_census(args, rec):
    report = census(args.n, args.budget, prune=not args.no_prune, threads=args.threads)
    rec["verdicts"] = report["counts"]
    rec["stats"] = {"classes": report["classes"], "elapsed": report["elapsed"]}
    rec["result"] = {k: v for k, v in report.items() if k != "entries"}
    if args.out:
        _write(args.out, json.dumps(report, indent=1) + "\n")
    unknown = any("unknown" in cell for cell in report["counts"])
    return (EXIT_UNKNOWN if unknown else EXIT_OK), f"{report['classes']} classes up to n={args.n}"


def _step(spec: dict, named: dict) -> cons.CertifiedPoset:
    op = spec.get("op")

    def ref(key):
        name = spec.get(key)
        if name not in named:
            raise InputError(f"step {spec.get('name')!r}: unknown reference {name!r}")
        return named[name]

    def element(cp, key):
        x = spec.get(key)
        return cp.poset.index(x) if isinstance(x, str) else int(x)

    if op == "singleton":
        return cons.singleton()
    if op == "antichain":
        return cons.antichain_cert(int(spec["k"]))
    if op == "weak_order":
        certs = cons.weak_order_cert(spec["levels"])
        return certs.monoid if spec.get("variant") == "monoid" else certs.full
    if op == "sp":
        return cons.series_parallel_cert(SP.parse(spec["expr"]))
    if op == "certificate":
        return cons.CertifiedPoset(poset_from_json(spec["poset"]), certificate_from_json(spec["certificate"]))
    if op == "recognize":
        P = poset_from_json(spec["poset"])
        v = recognize(P, _kind(spec.get("class", "semigroup")), spec.get("budget"))
        if v.status != "yes":
            raise InputError(f"step {spec.get('name')!r}: recognizer answered {v.status}")
        return cons.CertifiedPoset(P, v.certificate)
    if op == "adjoin":
        return cons.adjoin_extremum(ref("of"), spec["which"])
    if op == "product":
        return cons.product_cert(ref("a"), ref("b"))
    if op == "retract":
        cp = ref("of")
        sigma = spec.get("sigma", "search")
        if sigma == "search":
            sigma = cons.find_retract(cp)
            if sigma is None:
                raise InputError(f"step {spec.get('name')!r}: no retract exists")
        return cons.retract_to_full(cp, sigma)
    if op == "blowup":
        cp = ref("of")
        return cons.blowup_cert(cp, element(cp, "x"), ref("by"))
    if op == "compose":
        return cons.compose_cert(ref("a"), ref("b"), spec["kind"], spec.get("sigma"))
    if op == "k_blowup":
        return cons.k_blowup_monoid(ref("of"), int(spec["k"]))
    if op == "semilattice":
        return cons.antichain_blowup_semilattice(poset_from_json(spec["poset"]),
                                                 spec.get("replacements", {}))
    raise InputError(f"unknown construction step {op!r}")


def cmd_construct(args, rec):
    if not args.pipeline:
        raise InputError("--pipeline is required")
    rec["inputs"] = {args.pipeline: _digest(args.pipeline)}
    try:
        steps = json.loads(Path(args.pipeline).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.pipeline}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(steps, list):
        raise InputError("pipeline must be a JSON list of steps")
    named: dict = {}
    out = []
    for k, spec in enumerate(steps):
        if not isinstance(spec, dict):
            raise InputError(f"step {k} must be an object")
        name = spec.get("name", f"step{k}")
        cp = _step(spec, named)
        named[name] = cp
        out.append({"name": name, "op": spec.get("op"), "kind": cp.kind, **cp.to_json()})
    rec["verdicts"] = {b["name"]: b["kind"] for b in out}
    rec["result"] = out
    if args.out:
        _write(args.out, "".join(json.dumps(b) + "\n" for b in out))
    return EXIT_OK, f"{len(out)} construction steps certified"


def _parse_gens(text: str) -> list:
    if ";" in text:
        return [[int(v) for v in g.split(",")] for g in text.split(";") if g.strip()]
    return [[int(v)] for v in text.split(",") if v.strip()]


def _presentation(args):
    if not args.gens:
        raise InputError("--gens is required")
    gens = _parse_gens(args.gens)
    torsion = [int(d) for d in args.torsion.split(",")] if args.torsion else []
    m = args.free_rank if args.free_rank is not None else len(gens[0]) - len(torsion)
    return make_presentation(m, torsion, gens)


def _window(args, default):
    if args.window is None:
        return default
    parts = [int(v) for v in str(args.window).split(",")]
    return parts[0] if len(parts) == 1 else parts


def cmd_numsem(args, rec):
    p = _presentation(args)
    t = truncated_cayley(p, _window(args, 13))
    payload = {"presentation": p.to_json(), "pointed": p.status,
               "window": list(t.window), "elements": [list(e) for e in t.elements],
               "poset": poset_to_json(t.poset), "dot": to_dot(t.poset, name="monoid")}
    rec["result"] = payload
    rec["verdicts"] = {"pointed": p.status}
    if args.out:
        _write(args.out, json.dumps(poset_to_json(t.poset)) + "\n")
    if args.dot:
        _write(args.dot, payload["dot"])
    return EXIT_OK, f"{t.poset.n} elements in the window"


def cmd_autoequiv(args, rec):
    if args.lex:
        a, b = (int(v) for v in args.lex.split(","))
        r = lex_counterexample((a, b))
        rec["result"] = r.to_json()
        rec["verdicts"] = {"monoid": r.monoid_ok, "realizes_lex": r.realizes_lex,
                           "auto_equivalent_on_window": r.auto_equivalent_on_window}
        return EXIT_OK, (f"lex window {a}x{b}: monoid={r.monoid_ok}, realizes lex={r.realizes_lex}, "
                         f"cancellation failure {r.cancellation_witness}")
    p = _presentation(args)
    t = truncated_cayley(p, _window(args, 13))
    report = check_auto_equivalent(t)
    rec["result"] = {"auto_equivalence": report.to_json()}
    rec["verdicts"] = {"auto_equivalent_on_window": report.ok}
    summary = f"auto-equivalent on window: {report.ok}, atoms {report.atoms}"
    if args.roundtrip:
        rt = roundtrip_check(p)
        rec["result"]["roundtrip"] = rt.to_json()
        rec["verdicts"]["roundtrip"] = rt.ok
        summary += f", roundtrip: {rt.ok}"
    return EXIT_OK, summary


def cmd_export(args, rec):
    P = _load_poset(args)
    rec["inputs"] = {args.input: _digest(args.input)}
    cert = None
    if args.cert:
        cert = certificate_from_json(json.loads(Path(args.cert).read_text()))
        rec["inputs"][args.cert] = _digest(args.cert)
    text = to_dot(P, cert)
    if args.out:
        _write(args.out, text)
    rec["result"] = {"dot": text}
    return EXIT_OK, f"DOT with {P.n} nodes"


COMMANDS = {
    "recognize": cmd_recognize, "classify": cmd_classify, "census": cmd_census,
    "construct": cmd_construct, "numsem": cmd_numsem, "autoequiv": cmd_autoequiv,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out")
    parser = argparse.ArgumentParser(prog="cayley-posets", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p):
        p.add_argument("--in", dest="input")
        p.add_argument("--budget", type=int)
        p.add_argument("--no-prune", action="store_true")

    p = sub.add_parser("recognize", parents=[common], help="decide one class")
    search_flags(p)
    p.add_argument("--class", dest="cls", required=True,
                   choices=["semigroup", "monoid", "full", "full-monoid", "act"])
    p.add_argument("--deterministic", action="store_true")
    p = sub.add_parser("classify", parents=[common], help="decide all classes")
    search_flags(p)
    p = sub.add_parser("census", parents=[common], help="classify all small posets")
    search_flags(p)
    p.add_argument("--n", type=int, required=True)
    p = sub.add_parser("construct", parents=[common], help="run a construction pipeline")
    p.add_argument("--pipeline")
    helps = {"numsem": "truncated Cayley poset of a finitely generated monoid",
             "autoequiv": "auto-equivalence, collision lattice and round trip"}
    for name in ("numsem", "autoequiv"):
        p = sub.add_parser(name, parents=[common], help=helps[name])
        p.add_argument("--gens", help='generators, e.g. "3,5" or "1,0;1,1"')
        p.add_argument("--torsion", help="torsion moduli, e.g. 2,4")
        p.add_argument("--free-rank", type=int)
        p.add_argument("--window", help="bound on every free coordinate, or one bound each")
        if name == "numsem":
            p.add_argument("--dot", help="write the window as a DOT file")
        else:
            p.add_argument("--roundtrip", action="store_true")
            p.add_argument("--lex", help="run the lexicographic example on the window A,B")
    p = sub.add_parser("export", parents=[common], help="DOT export of a poset")
    p.add_argument("--in", dest="input")
    p.add_argument("--cert")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    random.seed(args.seed)
    rec = {"command": args.command, "argv": argv, "version": __version__, "seed": args.seed,
           "threads": args.threads, "inputs": {}, "verdicts": {}, "stats": {}}
    t0 = time.perf_counter()
    try:
        code, summary = COMMANDS[args.command](args, rec)
    except (InputError, CayleyError, OSError, ValueError, KeyError, TypeError) as exc:
        code, summary = EXIT_INPUT, f"input error: {type(exc).__name__}: {exc}"
        rec["error"] = summary
    except RuntimeError as exc:
        code, summary = EXIT_BREACH, f"invariant breach: {exc}"
        rec["error"] = summary
    rec["wall_time"] = round(time.perf_counter() - t0, 6)
    rec["exit_code"] = code
    print(json.dumps(rec, sort_keys=True))
    print(f"[{args.command}] {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
