"""Order-theoretic predicates on quantum relations.

Every predicate with several textbook characterizations evaluates all of
them and raises :class:`EquivalenceViolation` if they disagree, so a
numerical breakdown can never masquerade as an ordinary ``False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import EquivalenceViolation, NotAFunction, NotAnOrder, ObjectMismatch
from .qrel import (
    BinaryRelation,
    QuantumSet,
    compose,
    compose_all,
    dagger,
    first_violation,
    identity,
    lattice,
    rel_eq,
    rel_leq,
)
from .settings import compare_tol
from .subspace import OperatorSubspace, contains, equal, meet, mul_spaces, span

__all__ = [
    "Verdict",
    "QuantumPoset",
    "FunctionRel",
    "FunctionClass",
    "IDENTITY_MARKER",
    "check_preorder",
    "check_order",
    "is_preorder",
    "is_order",
    "classify_function",
    "as_function",
    "monotone_conditions",
    "is_monotone",
    "is_order_embedding",
    "iso_characterizations",
    "is_order_isomorphism",
    "hom_conditions",
    "hom_leq",
    "check_equivalence",
    "is_equivalence",
    "symmetric_part",
    "find_nontrivial_symmetry",
    "range_factor",
    "inclusion",
    "diagonal_algebra_report",
]

IDENTITY_MARKER = "E = I"


@dataclass(frozen=True)
class Verdict:
    """Boolean answer plus, when false, the failed condition and atom pair."""

    value: bool
    failed: str | None = None
    pair: tuple | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.value

    def as_dict(self) -> dict:
        out = {"value": self.value}
        if self.failed is not None:
            out["failed"] = self.failed
        if self.pair is not None:
            out["pair"] = list(self.pair)
        if self.details:
            out["details"] = self.details
        return out


def _rel(obj) -> BinaryRelation:
    if isinstance(obj, QuantumPoset):
        return obj.order
    if isinstance(obj, BinaryRelation):
        return obj
    raise TypeError(f"expected a relation or quantum poset, got {type(obj).__name__}")


def _require_endo(R: BinaryRelation):
    if R.source != R.target:
        raise ObjectMismatch("expected an endo-relation")


def _first_diff(R: BinaryRelation, S: BinaryRelation):
    for k, v in R.components.items():
        if not equal(v, S.components[k]):
            return k
    return None


# -- preorders and orders ----------------------------------------------------


def check_preorder(R: BinaryRelation) -> Verdict:
    _require_endo(R)
    bad = first_violation(identity(R.source), R)
    if bad is not None:
        return Verdict(False, "reflexive: I <= R", bad)
    bad = first_violation(compose(R, R), R)
    if bad is not None:
        return Verdict(False, "transitive: R∘R <= R", bad)
    return Verdict(True)


def check_order(R: BinaryRelation) -> Verdict:
    v = check_preorder(R)
    if not v:
        return v
    bad = _first_diff(lattice("meet", R, dagger(R)), identity(R.source))
    if bad is not None:
        return Verdict(False, "antisymmetric: R ∧ R† = I", bad)
    return Verdict(True)


def is_preorder(R) -> bool:
    return check_preorder(_rel(R)).value


def is_order(R) -> bool:
    return check_order(_rel(R)).value


class QuantumPoset:
    """A quantum set with a certified preorder.

    ``QuantumPoset(R)`` raises :class:`NotAnOrder` unless R is at least a
    preorder (pass ``require_order=False``) or an order (the default).
    """

    __slots__ = ("carrier", "order", "antisymmetric")

    def __init__(self, order: BinaryRelation, require_order: bool = True):
        v = check_preorder(order)
        if not v:
            raise NotAnOrder(f"not a preorder: {v.failed} fails at {v.pair}")
        anti = check_order(order)
        if require_order and not anti:
            raise NotAnOrder(f"not an order: {anti.failed} fails at {anti.pair}")
        self.carrier = order.source
        self.order = order
        self.antisymmetric = anti.value

    @classmethod
    def _trusted(cls, order: BinaryRelation, antisymmetric: bool = True):
        obj = cls.__new__(cls)
        obj.carrier = order.source
        obj.order = order
        obj.antisymmetric = antisymmetric
        return obj

    @classmethod
    def trivial(cls, X: QuantumSet) -> "QuantumPoset":
        return cls._trusted(identity(X))

    reflexive = property(lambda self: True)
    transitive = property(lambda self: True)

    @property
    def is_order(self) -> bool:
        return self.antisymmetric

    def __repr__(self):
        kind = "order" if self.antisymmetric else "preorder"
        return f"QuantumPoset({len(self.carrier)} atoms, {kind})"


# -- functions ---------------------------------------------------------------


@dataclass(frozen=True)
class FunctionClass:
    is_function: bool
    injective: bool = False
    surjective: bool = False
    failed: str | None = None
    pair: tuple | None = None

    @property
    def bijective(self) -> bool:
        return self.is_function and self.injective and self.surjective

    def __bool__(self):
        return self.is_function

    def label(self) -> str:
        if not self.is_function:
            return "not_function"
        if self.bijective:
            return "bijective"
        if self.injective:
            return "injective"
        return "surjective" if self.surjective else "function"


def classify_function(F: BinaryRelation) -> FunctionClass:
    """Function iff F†F >= I and FF† <= I; injective/surjective on equality."""
    if F.is_classical:
        m = F.bool_matrix
        rows, cols = m.sum(axis=1), m.sum(axis=0)
        if np.any(rows == 0):
            x = F.source.ids[int(np.argmin(rows))]
            return FunctionClass(False, failed="F†∘F >= I", pair=(x, x))
        if np.any(rows > 1):
            x = F.source.ids[int(np.argmax(rows > 1))]
            ys = [F.target.ids[j] for j in np.flatnonzero(m[F.source.index[x]])]
            return FunctionClass(False, failed="F∘F† <= I", pair=(ys[0], ys[1]))
        return FunctionClass(True, bool(np.all(cols <= 1)), bool(np.all(cols >= 1)))
    FdF = compose(dagger(F), F)
    FFd = compose(F, dagger(F))
    Ix, Iy = identity(F.source), identity(F.target)
    bad = first_violation(Ix, FdF)
    if bad is not None:
        return FunctionClass(False, failed="F†∘F >= I", pair=bad)
    bad = first_violation(FFd, Iy)
    if bad is not None:
        return FunctionClass(False, failed="F∘F† <= I", pair=bad)
    return FunctionClass(True, rel_eq(FdF, Ix), rel_eq(FFd, Iy))


class FunctionRel(BinaryRelation):
    """A relation certified to be a function, with its injectivity flags."""

    @classmethod
    def _wrap(cls, R: BinaryRelation, injective: bool, surjective: bool) -> "FunctionRel":
        obj = cls._trusted(R.source, R.target, R.components)
        if "bool_matrix" in R.__dict__:
            obj.__dict__["bool_matrix"] = R.__dict__["bool_matrix"]
        obj.__dict__["injective"] = injective
        obj.__dict__["surjective"] = surjective
        return obj

    @property
    def injective(self) -> bool:
        return self.__dict__["injective"]

    @property
    def surjective(self) -> bool:
        return self.__dict__["surjective"]

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


def as_function(R: BinaryRelation) -> FunctionRel:
    """Certify R as a function or raise :class:`NotAFunction`."""
    if isinstance(R, FunctionRel):
        return R
    c = classify_function(R)
    if not c:
        raise NotAFunction(f"{c.failed} fails at {c.pair}")
    return FunctionRel._wrap(R, c.injective, c.surjective)


def _fn(F) -> FunctionRel:
    return as_function(F)


# -- monotone maps and embeddings -------------------------------------------


def _agree(name: str, values: dict) -> bool:
    vals = set(values.values())
    if len(vals) != 1:
        raise EquivalenceViolation(f"{name}: equivalent conditions disagree: {values}")
    return vals.pop()


def _objects(F, R, S):
    if R.source != F.source or R.target != F.source:
        raise ObjectMismatch("order on the source does not match the function")
    if S.source != F.target or S.target != F.target:
        raise ObjectMismatch("order on the target does not match the function")


def monotone_conditions(F, R, S) -> dict[str, bool]:
    """The three equivalent monotonicity conditions, evaluated separately."""
    F, R, S = _fn(F), _rel(R), _rel(S)
    _objects(F, R, S)
    Fd = dagger(F)
    return {
        "F∘R <= S∘F": rel_leq(compose(F, R), compose(S, F)),
        "F∘R∘F† <= S": rel_leq(compose_all(F, R, Fd), S),
        "R <= F†∘S∘F": rel_leq(R, compose_all(Fd, S, F)),
    }


def is_monotone(F, R, S) -> bool:
    return _agree("monotone", monotone_conditions(F, R, S))


def is_order_embedding(F, R, S) -> bool:
    """``R = F† ∘ S ∘ F``."""
    F, R, S = _fn(F), _rel(R), _rel(S)
    _objects(F, R, S)
    return rel_eq(R, compose_all(dagger(F), S, F))


def iso_characterizations(F, R, S) -> dict[str, bool]:
    F, R, S = _fn(F), _rel(R), _rel(S)
    _objects(F, R, S)
    bij = F.bijective
    a = bij and is_monotone(F, R, S) and is_monotone(dagger(F), S, R)
    b = F.surjective and is_order_embedding(F, R, S)
    c = bij and rel_eq(compose(F, R), compose(S, F))
    return {"bijective, F and F† monotone": a, "surjective order embedding": b, "bijective, F∘R = S∘F": c}


def is_order_isomorphism(F, R, S) -> bool:
    return _agree("order isomorphism", iso_characterizations(F, R, S))


def hom_conditions(F, G, S) -> dict[str, bool]:
    """The four equivalent forms of ``F ⊑ G`` for functions into (Y, S)."""
    F, G, S = _fn(F), _fn(G), _rel(S)
    if F.source != G.source or F.target != G.target:
        raise ObjectMismatch("hom_leq: F and G must share source and target")
    if S.source != F.target or S.target != F.target:
        raise ObjectMismatch("hom_leq: S must be an order on the common target")
    SF = compose(S, F)
    return {
        "G <= S∘F": rel_leq(G, SF),
        "S∘G <= S∘F": rel_leq(compose(S, G), SF),
        "F <= S†∘G": rel_leq(F, compose(dagger(S), G)),
        "G∘F† <= S": rel_leq(compose(G, dagger(F)), S),
    }


def hom_leq(F, G, S) -> bool:
    """``F ⊑ G`` in the hom-set order induced by the order S on the target."""
    return _agree("hom order", hom_conditions(F, G, S))


# -- equivalence relations ---------------------------------------------------


def check_equivalence(E: BinaryRelation) -> Verdict:
    v = check_preorder(E)
    if not v:
        return v
    bad = _first_diff(E, dagger(E))
    if bad is not None:
        return Verdict(False, "symmetric: E† = E", bad)
    return Verdict(True)


def is_equivalence(E) -> bool:
    return check_equivalence(_rel(E)).value


def symmetric_part(R) -> BinaryRelation:
    """``R ∧ R†`` for a preorder R; always an equivalence relation."""
    R = _rel(R)
    v = check_preorder(R)
    if not v:
        raise NotAnOrder(f"symmetric_part needs a preorder: {v.failed} fails at {v.pair}")
    return lattice("meet", R, dagger(R))


def _nontrivial_projection(algebra: OperatorSubspace) -> np.ndarray | None:
    """A projection other than 0 and 1 inside a unital C*-algebra, if any."""
    for b in algebra.basis:
        for h in ((b + b.conj().T) / 2, 1j * (b - b.conj().T) / 2):
            w, v = np.linalg.eigh(h)
            if w[-1] - w[0] > 1e-6:
                mid = (w[0] + w[-1]) / 2
                top = v[:, w > mid]
                return top @ top.conj().T
    return None


def find_nontrivial_symmetry(E) -> Union[FunctionRel, str]:
    """Return G != I with G <= E, G = G†, G∘G = I, or ``"E = I"``.

    Follows the two-case construction: a symmetry ``1 - 2p`` inside a
    diagonal component larger than C1, otherwise a partial-unitary swap
    between two atoms linked by E.
    """
    E = _rel(E)
    v = check_equivalence(E)
    if not v:
        raise NotAnOrder(f"not an equivalence relation: {v.failed} fails at {v.pair}")
    X = E.source
    comps = {(x, x): OperatorSubspace.scalar(d) for x, d in X.atoms()}
    for x, d in X.atoms():
        alg = E.components[(x, x)]
        if alg.dim > 1:
            p = _nontrivial_projection(alg)
            if p is None:
                raise EquivalenceViolation(f"no nontrivial projection found in E({x!r}, {x!r})")
            u = np.eye(d) - 2 * p
            comps[(x, x)] = span([u])
            break
    else:
        for (x1, x2), sub in E.nonzero():
            if x1 == x2:
                continue
            a = sub.basis[0]
            d1 = X.dim(x1)
            gram = a.conj().T @ a
            c = np.trace(gram).real / d1
            if np.linalg.norm(gram - c * np.eye(d1)) > compare_tol() or X.dim(x2) != d1:
                raise EquivalenceViolation(f"a†a is not scalar for a in E({x1!r}, {x2!r})")
            u = a / np.sqrt(c)
            del comps[(x1, x1)], comps[(x2, x2)]
            comps[(x1, x2)] = span([u])
            comps[(x2, x1)] = span([u.conj().T])
            break
        else:
            return IDENTITY_MARKER
    G = BinaryRelation(X, X, comps)
    if not rel_leq(G, E):
        raise EquivalenceViolation("constructed symmetry is not below E")
    return as_function(G)


# -- range factorization ----------------------------------------------------


def inclusion(sub: QuantumSet, X: QuantumSet) -> FunctionRel:
    """Canonical injection J: sub -> X for a subset of atoms."""
    for a, d in sub.atoms():
        if a not in X or X.dim(a) != d:
            raise ObjectMismatch(f"atom {a!r} is not an atom of the ambient set")
    comps = {(a, a): OperatorSubspace.scalar(d) for a, d in sub.atoms()}
    R = BinaryRelation(sub, X, comps)
    return FunctionRel._wrap(R, True, len(sub) == len(X))


def range_factor(F) -> tuple[QuantumSet, FunctionRel, FunctionRel]:
    """``(ran F, F̄, J)`` with ``F = J ∘ F̄`` and F̄ surjective."""
    F = _fn(F)
    hit = sorted({y for (_, y), _v in F.nonzero()})
    ran = F.target.restrict(hit)
    Fbar = BinaryRelation(
        F.source, ran, {(x, y): v for (x, y), v in F.components.items() if y in ran}
    )
    Fbar = as_function(Fbar)
    J = inclusion(ran, F.target)
    return ran, Fbar, J


def diagonal_algebra_report(R) -> dict[str, dict[str, bool]]:
    """Per-atom facts about the diagonal components of a preorder.

    ``unital`` and ``closed`` always hold for a preorder and
    ``antisymmetric`` (A ∧ A† = C1) holds whenever R is an order.
    ``star_closed`` is reported only for equivalence relations.
    """
    R = _rel(R)
    v = check_preorder(R)
    if not v:
        raise NotAnOrder(f"diagonal_algebra_report needs a preorder: {v.failed} fails at {v.pair}")
    equiv = is_equivalence(R)
    out = {}
    for x, d in R.source.atoms():
        A = R.components[(x, x)]
        row = {
            "dim": A.dim,
            "unital": contains(A, OperatorSubspace.scalar(d)),
            "closed": contains(A, mul_spaces(A, A)),
            "antisymmetric": equal(meet(A, A.adjoint()), OperatorSubspace.scalar(d)),
        }
        if equiv:
            row["star_closed"] = equal(A, A.adjoint())
        out[x] = row
    return out
