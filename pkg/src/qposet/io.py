"""JSON documents in the ``qposet/1`` format.

A document is ``{"version": "qposet/1", "kind": ..., "payload": ...}``.
Complex entries are ``[re, im]`` pairs (plain numbers are accepted on
input), matrices are lists of rows, and atoms are listed in sorted order.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
from jsonschema.exceptions import best_match

from .constructions import ClassicalPoset, Cone
from .errors import SchemaError, ShapeError
from .homobj import Observable
from .order import FunctionRel, QuantumPoset, as_function
from .qrel import BinaryRelation, QuantumSet

__all__ = [
    "VERSION",
    "KINDS",
    "Document",
    "schema",
    "validate",
    "load",
    "loads",
    "save",
    "dumps",
    "encode",
    "decode",
    "decode_relation",
    "write_atomic",
]

VERSION = "qposet/1"
KINDS = ("quantum_set", "relation", "poset", "function", "observable", "cone", "classical_poset")
_ZERO = 1e-14


@dataclass(frozen=True)
class Document:
    kind: str
    payload: dict
    version: str = VERSION

    def as_json(self) -> dict:
        return {"version": self.version, "kind": self.kind, "payload": self.payload}


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("qposet").joinpath("data/qposet-1.schema.json").read_text("utf-8")
    return json.loads(text)


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate(obj: Any) -> Document:
    v = jsonschema.Draft202012Validator(schema())
    err = best_match(v.iter_errors(obj))
    if err is not None:
        raise SchemaError(err.message, _pointer(err.absolute_path))
    return Document(obj["kind"], obj["payload"], obj["version"])


def loads(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    return validate(obj)


def load(path) -> Document:
    return loads(Path(path).read_text("utf-8"))


_FLAT = re.compile(r"\[\s*([^\[\]{}]*?)\s*\]")
_ROW = re.compile(r"\[\s*((?:\[[^\[\]{}]*\],?\s*)+?)\s*\]")
_OBJ = re.compile(r"\{\s*([^\[\]{}]*?)\s*\}")


def _squash(m: re.Match) -> str:
    return "[" + re.sub(r",\s+", ", ", m.group(1).strip()) + "]"


def _squash_obj(m: re.Match) -> str:
    return "{" + re.sub(r",\s+", ", ", m.group(1).strip()) + "}"


def dumps(doc: Document) -> str:
    """Canonical text: sorted keys, numbers and matrix rows kept on one line."""
    text = json.dumps(doc.as_json(), indent=2, sort_keys=True, ensure_ascii=False)
    text = _ROW.sub(_squash, _FLAT.sub(_squash, text))
    text = _OBJ.sub(_squash_obj, text)
    return text + "\n"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(doc: Document, path) -> None:
    validate(doc.as_json())
    write_atomic(path, dumps(doc))


# -- encoding ----------------------------------------------------------------


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < _ZERO else x


def _enc_matrix(m: np.ndarray) -> list:
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _enc_set(X: QuantumSet) -> dict:
    return {"atoms": [{"id": x, "dim": d} for x, d in X.atoms()]}


def _enc_components(R: BinaryRelation) -> list:
    return [
        {"from": x, "to": y, "basis": [_enc_matrix(b) for b in v.basis]}
        for (x, y), v in R.components.items()
        if v.dim
    ]


def _enc_relation(R: BinaryRelation) -> dict:
    return {"source": _enc_set(R.source), "target": _enc_set(R.target), "components": _enc_components(R)}


def _enc_poset(R: BinaryRelation) -> dict:
    return {"set": _enc_set(R.source), "components": _enc_components(R)}


def encode(obj, kind: str | None = None) -> Document:
    """Canonical document for a domain object."""
    if isinstance(obj, QuantumSet):
        return Document("quantum_set", _enc_set(obj))
    if isinstance(obj, QuantumPoset):
        return Document("poset", _enc_poset(obj.order))
    if isinstance(obj, FunctionRel) or kind == "function":
        return Document("function", _enc_relation(obj))
    if isinstance(obj, BinaryRelation):
        if kind == "poset":
            return Document("poset", _enc_poset(obj))
        return Document("relation", _enc_relation(obj))
    if isinstance(obj, Observable):
        return Document("observable", {"matrix": _enc_matrix(obj.matrix), "grid": [float(g) for g in obj.grid]})
    if isinstance(obj, Cone):
        legs = [{"function": _enc_relation(F), "order": _enc_poset(R)} for F, R in zip(obj.legs, obj.orders)]
        return Document("cone", {"legs": legs})
    if isinstance(obj, ClassicalPoset):
        return Document("classical_poset", {"elements": list(obj.elements), "leq": obj.leq.tolist()})
    raise TypeError(f"cannot encode {type(obj).__name__}")


# -- decoding ----------------------------------------------------------------


def _dec_matrix(m: list, where: str) -> np.ndarray:
    width = {len(row) for row in m}
    if len(width) != 1:
        raise SchemaError("ragged matrix rows", where)
    out = np.empty((len(m), width.pop()), dtype=complex)
    for i, row in enumerate(m):
        for j, z in enumerate(row):
            out[i, j] = complex(z[0], z[1]) if isinstance(z, list) else complex(z)
    return out


def _dec_set(p: dict, where: str) -> QuantumSet:
    ids = [a["id"] for a in p["atoms"]]
    if len(set(ids)) != len(ids):
        raise SchemaError("duplicate atom id", where + "/atoms")
    return QuantumSet({a["id"]: a["dim"] for a in p["atoms"]})


def _dec_components(comps: list, X: QuantumSet, Y: QuantumSet, where: str) -> BinaryRelation:
    out: dict = {}
    for k, c in enumerate(comps):
        at = f"{where}/{k}"
        x, y = c["from"], c["to"]
        if x not in X:
            raise SchemaError(f"unknown source atom {x!r}", at + "/from")
        if y not in Y:
            raise SchemaError(f"unknown target atom {y!r}", at + "/to")
        want = (Y.dim(y), X.dim(x))
        mats = []
        for j, m in enumerate(c["basis"]):
            a = _dec_matrix(m, f"{at}/basis/{j}")
            if a.shape != want:
                raise ShapeError(f"{at}/basis/{j}: component ({x!r}, {y!r}) has shape {a.shape}, expected {want}")
            mats.append(a)
        out.setdefault((x, y), []).extend(mats)
    return BinaryRelation(X, Y, out)


def _dec_relation(p: dict, where: str = "/payload") -> BinaryRelation:
    X = _dec_set(p["source"], where + "/source")
    Y = _dec_set(p["target"], where + "/target")
    return _dec_components(p["components"], X, Y, where + "/components")


def _dec_poset(p: dict, where: str = "/payload") -> BinaryRelation:
    X = _dec_set(p["set"], where + "/set")
    return _dec_components(p["components"], X, X, where + "/components")


def decode_relation(doc: Document) -> BinaryRelation:
    """The underlying relation of a relation, function or poset document,
    without certifying any axioms."""
    if doc.kind in ("relation", "function"):
        return _dec_relation(doc.payload)
    if doc.kind == "poset":
        return _dec_poset(doc.payload)
    if doc.kind == "classical_poset":
        from .constructions import classical_embed_poset

        return classical_embed_poset(_dec_classical(doc.payload)).order
    raise SchemaError(f"expected a relation-like document, got kind {doc.kind!r}", "/kind")


def _dec_classical(p: dict) -> ClassicalPoset:
    elems = p["elements"]
    if "leq" in p:
        if "covers" in p:
            raise SchemaError("give either leq or covers, not both", "/payload")
        leq = np.asarray(p["leq"], dtype=bool)
        if leq.shape != (len(elems), len(elems)):
            raise SchemaError(f"leq must be {len(elems)}x{len(elems)}", "/payload/leq")
        return ClassicalPoset(elems, leq)
    pairs = [tuple(c) for c in p.get("covers", [])]
    for k, (a, b) in enumerate(pairs):
        if a not in elems or b not in elems:
            raise SchemaError("cover names an unknown element", f"/payload/covers/{k}")
    return ClassicalPoset.from_covers(elems, pairs)


def decode(doc: Document):
    """Domain object for a document.

    Posets are certified preorders (QuantumPoset with its antisymmetry
    flag); functions are certified functions.
    """
    k, p = doc.kind, doc.payload
    if k == "quantum_set":
        return _dec_set(p, "/payload")
    if k == "relation":
        return _dec_relation(p)
    if k == "function":
        return as_function(_dec_relation(p))
    if k == "poset":
        return QuantumPoset(_dec_poset(p), require_order=False)
    if k == "observable":
        m = _dec_matrix(p["matrix"], "/payload/matrix")
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"/payload/matrix: observable must be square, got {m.shape}")
        return Observable(m, tuple(p["grid"]))
    if k == "cone":
        legs, orders = [], []
        for i, leg in enumerate(p["legs"]):
            legs.append(_dec_relation(leg["function"], f"/payload/legs/{i}/function"))
            orders.append(_dec_poset(leg["order"], f"/payload/legs/{i}/order"))
        return Cone(legs, orders)
    if k == "classical_poset":
        return _dec_classical(p)
    raise SchemaError(f"unknown kind {k!r}", "/kind")
