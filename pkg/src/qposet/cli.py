"""Command line front end.

Exit codes: 0 predicate true or construction succeeded, 1 predicate
false, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import constructions as C
from . import homobj as H
from . import io
from . import oracles as O
from . import order as Ord
from .errors import QposetError
from .qrel import QuantumSet, orthogonal, rel_leq, trace
from .settings import DEFAULT_COMPARE_TOL, DEFAULT_RANK_TOL, tolerances

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT = 0, 1, 2

CHECKS = ("order", "preorder", "function", "monotone", "embedding", "iso", "equivalence")
CONSTRUCTS = (
    "opposite",
    "pullback",
    "coproduct",
    "product",
    "limit-order",
    "classical-embed",
    "power-poset",
    "downset-embed",
    "hom-order",
)
COMPARES = ("rel-leq", "hom-leq", "spectral-leq", "orthogonal")
SAMPLES = ("order", "function", "relation", "equivalence")


class InputError(Exception):
    pass


def _need(docs, n, what):
    if len(docs) != n:
        raise InputError(f"{what} expects {n} input file(s), got {len(docs)}")


def _rel(doc):
    return io.decode_relation(doc)


def _obj(doc, kind=None):
    if kind is not None and doc.kind != kind:
        raise InputError(f"expected a {kind} document, got {doc.kind}")
    return io.decode(doc)


def _poset_rel(doc):
    """Relation of a poset-like document, certified to be an order."""
    obj = io.decode(doc) if doc.kind == "classical_poset" else None
    if obj is not None:
        return C.classical_embed_poset(obj).order
    R = _rel(doc)
    v = Ord.check_order(R)
    if not v:
        raise InputError(f"input is not an order: {v.failed} fails at {v.pair}")
    return R


def _fn(doc):
    return Ord.as_function(_rel(doc))


# -- subcommands -------------------------------------------------------------


def do_check(what: str, docs) -> tuple[bool, dict]:
    if what in ("order", "preorder", "equivalence"):
        _need(docs, 1, f"check {what}")
        R = _rel(docs[0])
        v = {"order": Ord.check_order, "preorder": Ord.check_preorder, "equivalence": Ord.check_equivalence}[what](R)
        return v.value, v.as_dict()
    if what == "function":
        _need(docs, 1, "check function")
        fc = Ord.classify_function(_rel(docs[0]))
        return fc.is_function, {
            "class": fc.label(),
            "injective": fc.injective,
            "surjective": fc.surjective,
            "failed": fc.failed,
        }
    _need(docs, 3, f"check {what}")
    F, R, S = _fn(docs[0]), _rel(docs[1]), _rel(docs[2])
    if what == "monotone":
        conds = Ord.monotone_conditions(F, R, S)
        return Ord.is_monotone(F, R, S), {"conditions": conds}
    if what == "embedding":
        return Ord.is_order_embedding(F, R, S), {}
    conds = Ord.iso_characterizations(F, R, S)
    return Ord.is_order_isomorphism(F, R, S), {"characterizations": conds}


def do_construct(what: str, docs):
    """Returns (ok, report, object-or-document)."""
    if what == "opposite":
        _need(docs, 1, "construct opposite")
        P = C.opposite(_poset_rel(docs[0]))
        return True, {}, P
    if what == "pullback":
        _need(docs, 2, "construct pullback")
        P = C.pullback_order(_fn(docs[0]), _rel(docs[1]))
        return True, {"is_order": P.is_order}, io.encode(P.order, kind="poset")
    if what == "coproduct":
        if not docs:
            raise InputError("construct coproduct expects at least one input")
        P, inj = C.coproduct_posets([_poset_rel(d) for d in docs])
        return True, {"atoms": list(P.carrier.ids)}, P
    if what == "product":
        _need(docs, 2, "construct product")
        return True, {}, C.product_posets(_poset_rel(docs[0]), _poset_rel(docs[1]))
    if what == "limit-order":
        _need(docs, 1, "construct limit-order")
        lo = C.limit_order(_obj(docs[0], "cone"))
        ok = lo.jointly_injective and lo.is_order
        return ok, lo.report(), io.encode(lo.order, kind="poset")
    if what == "classical-embed":
        _need(docs, 1, "construct classical-embed")
        return True, {}, C.classical_embed_poset(_obj(docs[0], "classical_poset"))
    if what == "power-poset":
        _need(docs, 1, "construct power-poset")
        base = _obj(docs[0])
        if not isinstance(base, (C.ClassicalPoset, QuantumSet)):
            raise InputError("power-poset expects a classical_poset or quantum_set document")
        pw = H.classical_power_poset(base)
        return True, {"subsets": pw.subsets}, pw.qposet
    if what == "downset-embed":
        _need(docs, 1, "construct downset-embed")
        G, pw = H.downset_embedding_classical(_obj(docs[0], "classical_poset"))
        return True, {"subsets": pw.subsets}, G
    # hom-order
    if len(docs) == 2:
        A, B = (_obj(d, "classical_poset") for d in docs)
        carrier, _ = H.classical_function_carrier(A.elements, B.elements)
        S, T = C.classical_embed_poset(A).order, C.classical_embed_poset(B).order
    elif len(docs) == 4:
        W = _obj(docs[0], "quantum_set")
        S, T = _rel(docs[1]), _poset_rel(docs[2])
        carrier = H.FiniteFunctionCarrier(W, S.source, T.source, _fn(docs[3]))
    else:
        raise InputError("hom-order expects two classical posets, or W, S, T and eval")
    ho = H.largest_hom_order(carrier, S, T)
    return True, dict(ho.report), io.encode(ho.Q, kind="poset")


def do_compare(what: str, docs) -> tuple[bool, dict]:
    if what == "rel-leq":
        _need(docs, 2, "compare rel-leq")
        return rel_leq(_rel(docs[0]), _rel(docs[1])), {}
    if what == "orthogonal":
        _need(docs, 2, "compare orthogonal")
        return orthogonal(_rel(docs[0]), _rel(docs[1])), {}
    if what == "hom-leq":
        _need(docs, 3, "compare hom-leq")
        F, G, S = _fn(docs[0]), _fn(docs[1]), _poset_rel(docs[2])
        return Ord.hom_leq(F, G, S), {"conditions": Ord.hom_conditions(F, G, S)}
    _need(docs, 2, "compare spectral-leq")
    a, b = _obj(docs[0], "observable"), _obj(docs[1], "observable")
    return H.spectral_leq(a, b), {}


def do_symmetry(docs):
    _need(docs, 1, "symmetry")
    E = _rel(docs[0])
    v = Ord.check_equivalence(E)
    if not v:
        raise InputError(f"input is not an equivalence relation: {v.failed} fails at {v.pair}")
    G = Ord.find_nontrivial_symmetry(E)
    if isinstance(G, str):
        return {"symmetry": G}, None
    return {"symmetry": "nontrivial", "components": {f"{x}->{y}": s.dim for (x, y), s in G.nonzero()}}, G


def do_sample(what: str, seed: int, args) -> object:
    spec = O.RandomSpec(seed=seed, max_atoms=args.max_atoms, max_dim=args.max_dim, density=args.density)
    rng = spec.rng()
    if what == "order":
        return O.random_order(spec, rng=rng)
    if what == "equivalence":
        return io.encode(O.random_equivalence(spec, rng=rng), kind="relation")
    X = O.random_quantum_set(spec, rng)
    Y = O.random_codomain(spec, X, rng)
    if what == "relation":
        return O.random_relation(spec, X, Y, rng=rng)
    return O.random_function(spec, X, Y, rng=rng)


# -- plumbing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inputs", nargs="+", default=[], metavar="FILE", help="input documents")
    common.add_argument("--out", metavar="FILE", help="write the constructed document here")
    common.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL, help="rank tolerance; comparisons use max(1e-8, 10*tol) (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling commands")
    common.add_argument("--json", action="store_true", help="print the report as JSON")

    p = argparse.ArgumentParser(prog="qposet", description="Quantum posets: checks, constructions, comparisons.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, choices in (("check", CHECKS), ("construct", CONSTRUCTS), ("compare", COMPARES)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("what", choices=choices)
    sub.add_parser("trace", parents=[common], help="trace of an endo-relation (a truth value)")
    sub.add_parser("symmetry", parents=[common], help="nontrivial symmetry below an equivalence")
    sp = sub.add_parser("sample", parents=[common], help="draw a random certified object")
    sp.add_argument("what", choices=SAMPLES)
    sp.add_argument("--max-atoms", type=int, default=3)
    sp.add_argument("--max-dim", type=int, default=2)
    sp.add_argument("--density", type=float, default=0.5)
    return p


def _emit(report: dict, as_json: bool, out=sys.stdout):
    if as_json:
        out.write(json.dumps(report, sort_keys=True, default=_jsonable, ensure_ascii=False) + "\n")
        return
    head = " ".join(str(report[k]) for k in ("command", "what") if report.get(k))
    body = ", ".join(f"{k}={v}" for k, v in report.items() if k not in ("command", "what", "document"))
    out.write(f"{head}: {body}\n")


def _jsonable(x):
    if isinstance(x, (np.bool_, np.integer)):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def _document(obj) -> io.Document | None:
    if obj is None or isinstance(obj, io.Document):
        return obj
    return io.encode(obj)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command, "what": getattr(args, "what", None)}
    try:
        # comparisons must stay looser than rank decisions
        with tolerances(rank=args.tol, compare=max(DEFAULT_COMPARE_TOL, 10 * args.tol)):
            docs = [io.load(path) for path in args.inputs]
            result, doc = None, None
            if args.command == "check":
                result, details = do_check(args.what, docs)
            elif args.command == "compare":
                result, details = do_compare(args.what, docs)
            elif args.command == "construct":
                result, details, obj = do_construct(args.what, docs)
                doc = _document(obj)
            elif args.command == "trace":
                _need(docs, 1, "trace")
                details = {"value": trace(_rel(docs[0]))}
                result = True
            elif args.command == "symmetry":
                details, obj = do_symmetry(docs)
                doc = _document(obj)
                result = True
            else:
                doc = _document(do_sample(args.what, args.seed, args))
                details, result = {"seed": args.seed}, True
    except (InputError, QposetError, OSError, ValueError) as exc:
        report.update(result=None, error=f"{type(exc).__name__}: {exc}")
        _emit(report, args.json, out)
        return EXIT_INPUT
    report["result"] = bool(result)
    report.update(details)
    if doc is not None:
        if args.out:
            io.save(doc, args.out)
            report["out"] = args.out
        else:
            report["document"] = doc.as_json()
    _emit(report, args.json, out)
    if doc is not None and not args.out and not args.json:
        out.write(io.dumps(doc))
    return EXIT_TRUE if result else EXIT_FALSE


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
