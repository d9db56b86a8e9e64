"""Building quantum posets: classical embedding, opposites, pullbacks,
coproducts, monoidal products, projections, pairings and limit orders."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import NotAnOrder, ObjectMismatch, ShapeError
from .order import (
    FunctionRel,
    QuantumPoset,
    _rel,
    as_function,
    check_order,
    classify_function,
    find_nontrivial_symmetry,
    is_monotone,
)
from .qrel import (
    BinaryRelation,
    QuantumSet,
    compose,
    compose_all,
    dagger,
    identity,
    lattice,
    meet_all,
    pair_id,
    product_rel,
    product_set,
    rel_eq,
)
from .subspace import OperatorSubspace, span

__all__ = [
    "ClassicalPoset",
    "classical_embed",
    "classical_embed_poset",
    "classical_function",
    "opposite",
    "pullback_order",
    "coproduct_sets",
    "coproduct_rel",
    "cotuple",
    "coproduct_posets",
    "product_posets",
    "projections",
    "INCOMPATIBLE",
    "pairing",
    "tensor_of_functions",
    "Cone",
    "LimitOrder",
    "limit_order",
]

INCOMPATIBLE = "incompatible"


# -- classical posets --------------------------------------------------------


class ClassicalPoset:
    """A finite poset given by element ids and a boolean ``leq`` matrix.

    ``leq[i, j]`` means ``elements[i] ⊑ elements[j]``.
    """

    __slots__ = ("elements", "leq")

    def __init__(self, elements: Sequence, leq, check: bool = True):
        self.elements = tuple(str(e) for e in elements)
        leq = np.array(leq, dtype=bool)
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise ValueError("poset elements must be distinct")
        if leq.shape != (n, n):
            raise ShapeError(f"leq must be {n}x{n}, got {leq.shape}")
        if check:
            if not np.all(np.diag(leq)):
                raise NotAnOrder("leq is not reflexive")
            if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
                raise NotAnOrder("leq is not antisymmetric")
            if np.any((leq.astype(int) @ leq.astype(int) > 0) & ~leq):
                raise NotAnOrder("leq is not transitive")
        leq.setflags(write=False)
        self.leq = leq

    @classmethod
    def chain(cls, n: int, prefix: str = "") -> "ClassicalPoset":
        return cls([f"{prefix}{i}" for i in range(n)], np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, n: int, prefix: str = "") -> "ClassicalPoset":
        return cls([f"{prefix}{i}" for i in range(n)], np.eye(n, dtype=bool))

    @classmethod
    def from_covers(cls, elements, pairs) -> "ClassicalPoset":
        """Reflexive-transitive closure of the given ``(a, b)`` pairs."""
        elements = [str(e) for e in elements]
        idx = {e: i for i, e in enumerate(elements)}
        m = np.eye(len(elements), dtype=bool)
        for a, b in pairs:
            m[idx[str(a)], idx[str(b)]] = True
        for k in range(len(elements)):
            m |= np.outer(m[:, k], m[k, :])
        return cls(elements, m)

    def __len__(self):
        return len(self.elements)

    @property
    def quantum_set(self) -> QuantumSet:
        return QuantumSet.classical(self.elements)

    def is_monotone_map(self, other: "ClassicalPoset", f: Sequence[int]) -> bool:
        """``f[i]`` is the index in ``other`` of the image of element i."""
        f = np.asarray(f)
        return bool(np.all(~self.leq | other.leq[np.ix_(f, f)]))

    def __eq__(self, other):
        if not isinstance(other, ClassicalPoset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.leq, other.leq)

    __hash__ = None

    def __repr__(self):
        return f"ClassicalPoset({list(self.elements)})"


def _sorted_perm(ids: Sequence[str]) -> np.ndarray:
    """Positions of ``ids`` inside the sorted atom order."""
    order = sorted(ids)
    pos = {a: i for i, a in enumerate(order)}
    return np.array([pos[a] for a in ids], dtype=int)


def classical_embed(r, A: Sequence, B: Sequence) -> BinaryRelation:
    """`r for a boolean matrix ``r[i, j]`` relating ``A[i]`` to ``B[j]``."""
    A = [str(a) for a in A]
    B = [str(b) for b in B]
    r = np.asarray(r, dtype=bool)
    if r.shape != (len(A), len(B)):
        raise ShapeError(f"relation matrix must be {len(A)}x{len(B)}, got {r.shape}")
    X, Y = QuantumSet.classical(A), QuantumSet.classical(B)
    m = np.zeros((len(A), len(B)), dtype=bool)
    m[np.ix_(_sorted_perm(A), _sorted_perm(B))] = r
    return BinaryRelation.from_bool(X, Y, m)


def classical_embed_poset(P: ClassicalPoset) -> QuantumPoset:
    R = classical_embed(P.leq, P.elements, P.elements)
    return QuantumPoset._trusted(R, True)


def classical_function(f: Sequence[int], A: Sequence, B: Sequence) -> FunctionRel:
    """`f for a map given by indices: element ``A[i]`` goes to ``B[f[i]]``."""
    m = np.zeros((len(A), len(B)), dtype=bool)
    m[np.arange(len(A)), np.asarray(f, dtype=int)] = True
    R = classical_embed(m, A, B)
    hit = np.bincount(np.asarray(f, dtype=int), minlength=len(B))
    return FunctionRel._wrap(R, bool(np.all(hit <= 1)), bool(np.all(hit >= 1)))


# -- opposite and pullback ---------------------------------------------------


def opposite(P) -> QuantumPoset:
    R = _rel(P)
    v = check_order(R)
    if not v:
        raise NotAnOrder(f"opposite needs an order: {v.failed} fails at {v.pair}")
    return QuantumPoset._trusted(dagger(R), True)


def pullback_order(F, S) -> QuantumPoset:
    """``F† ∘ S ∘ F`` on the source of F.

    The result is always a preorder; its ``antisymmetric`` flag is set
    when it happens to be an order (guaranteed for injective F and an
    order S).
    """
    F = as_function(F)
    S = _rel(S)
    if S.source != F.target or S.target != F.target:
        raise ObjectMismatch("pullback_order: S must live on the target of F")
    R = compose_all(dagger(F), S, F)
    return QuantumPoset(R, require_order=False)


# -- coproducts --------------------------------------------------------------


def _tag(tag, atom) -> str:
    return f"{tag}:{atom}"


def _tags(n, tags):
    tags = [str(t) for t in (tags if tags is not None else range(n))]
    if len(tags) != n or len(set(tags)) != n:
        raise ValueError("coproduct tags must be distinct, one per summand")
    return tags


def coproduct_sets(sets: Sequence[QuantumSet], tags=None) -> tuple[QuantumSet, list[FunctionRel]]:
    """Disjoint union with atoms ``"tag:id"`` and the canonical injections."""
    tags = _tags(len(sets), tags)
    X = QuantumSet({_tag(t, a): d for t, S in zip(tags, sets) for a, d in S.atoms()})
    inj = []
    for t, S in zip(tags, sets):
        comps = {(a, _tag(t, a)): OperatorSubspace.scalar(d) for a, d in S.atoms()}
        inj.append(FunctionRel._wrap(BinaryRelation(S, X, comps), True, len(S) == len(X)))
    return X, inj


def coproduct_rel(rels: Sequence[BinaryRelation], tags=None) -> BinaryRelation:
    """Block-diagonal ``⊎ R_α`` from ``⊎ X_α`` to ``⊎ Y_α``."""
    tags = _tags(len(rels), tags)
    X, _ = coproduct_sets([r.source for r in rels], tags)
    Y, _ = coproduct_sets([r.target for r in rels], tags)
    comps = {}
    for t, r in zip(tags, rels):
        for (x, y), v in r.nonzero():
            comps[(_tag(t, x), _tag(t, y))] = v
    return BinaryRelation(X, Y, comps)


def cotuple(rels: Sequence[BinaryRelation], tags=None) -> BinaryRelation:
    """``[R_α]`` from ``⊎ X_α`` to the common target Y."""
    tags = _tags(len(rels), tags)
    Y = rels[0].target
    if any(r.target != Y for r in rels):
        raise ObjectMismatch("cotuple: all relations need the same target")
    X, _ = coproduct_sets([r.source for r in rels], tags)
    comps = {}
    for t, r in zip(tags, rels):
        for (x, y), v in r.nonzero():
            comps[(_tag(t, x), y)] = v
    return BinaryRelation(X, Y, comps)


def coproduct_posets(posets: Sequence, tags=None) -> tuple[QuantumPoset, list[FunctionRel]]:
    rels = [_rel(p) for p in posets]
    for r in rels:
        v = check_order(r)
        if not v:
            raise NotAnOrder(f"coproduct summand is not an order: {v.failed} at {v.pair}")
    R = coproduct_rel(rels, tags)
    _, inj = coproduct_sets([r.source for r in rels], tags)
    return QuantumPoset(R), inj


# -- monoidal product, projections, pairing ---------------------------------


def product_posets(P1, P2) -> QuantumPoset:
    R, S = _rel(P1), _rel(P2)
    for r in (R, S):
        v = check_order(r)
        if not v:
            raise NotAnOrder(f"product factor is not an order: {v.failed} at {v.pair}")
    return QuantumPoset(product_rel(R, S))


def projections(X: QuantumSet, Y: QuantumSet) -> tuple[FunctionRel, FunctionRel]:
    """``P: X × Y -> X`` and ``Q: X × Y -> Y``.

    ``P(x⊗y, x)`` is spanned by ``1_x ⊗ e_j^T`` and ``Q(x⊗y, y)`` by
    ``e_i^T ⊗ 1_y``.
    """
    if len(X) == 0 or len(Y) == 0:
        raise ValueError("projections need nonempty factors")
    XY = product_set(X, Y)
    pc, qc = {}, {}
    for x, dx in X.atoms():
        for y, dy in Y.atoms():
            ex, ey = np.eye(dx), np.eye(dy)
            pc[(pair_id(x, y), x)] = span([np.kron(ex, ey[j : j + 1]) for j in range(dy)])
            qc[(pair_id(x, y), y)] = span([np.kron(ex[i : i + 1], ey) for i in range(dx)])
    P = FunctionRel._wrap(BinaryRelation(XY, X, pc), len(Y) == 1 and Y.dims[0] == 1, True)
    Q = FunctionRel._wrap(BinaryRelation(XY, Y, qc), len(X) == 1 and X.dims[0] == 1, True)
    return P, Q


def pairing(F, G) -> Union[FunctionRel, str]:
    """``(F, G): W -> X × Y`` if it exists, else ``"incompatible"``.

    The candidate ``(P† ∘ F) ∧ (Q† ∘ G)`` is returned only after checking
    that it is a function with ``P ∘ H = F`` and ``Q ∘ H = G``.  Whenever
    the pairing exists it lies below both terms of the meet, and the meet
    is itself below it because ``P†P ∧ Q†Q = I``, so the candidate is
    exact.
    """
    F, G = as_function(F), as_function(G)
    if F.source != G.source:
        raise ObjectMismatch("pairing: F and G need a common source")
    P, Q = projections(F.target, G.target)
    H = lattice("meet", compose(dagger(P), F), compose(dagger(Q), G))
    c = classify_function(H)
    if not c:
        return INCOMPATIBLE
    if not (rel_eq(compose(P, H), F) and rel_eq(compose(Q, H), G)):
        return INCOMPATIBLE
    return FunctionRel._wrap(H, c.injective, c.surjective)


def tensor_of_functions(F, G) -> FunctionRel:
    """``F × G`` as a certified function."""
    F, G = as_function(F), as_function(G)
    return as_function(product_rel(F, G))


# -- limits ------------------------------------------------------------------


@dataclass
class Cone:
    """Functions ``legs[α]: X -> X_α`` with orders ``orders[α]`` on X_α."""

    legs: list
    orders: list

    def __post_init__(self):
        if not self.legs:
            raise ValueError("a cone needs at least one leg")
        if len(self.legs) != len(self.orders):
            raise ValueError("a cone needs one order per leg")
        self.legs = [as_function(F) for F in self.legs]
        self.orders = [_rel(R) for R in self.orders]
        X = self.legs[0].source
        for F, R in zip(self.legs, self.orders):
            if F.source != X:
                raise ObjectMismatch("cone legs must share a source")
            if R.source != F.target or R.target != F.target:
                raise ObjectMismatch("each order must live on its leg's target")
            v = check_order(R)
            if not v:
                raise NotAnOrder(f"cone order fails {v.failed} at {v.pair}")

    @property
    def apex(self) -> QuantumSet:
        return self.legs[0].source


@dataclass
class LimitOrder:
    order: BinaryRelation
    kernel: BinaryRelation
    jointly_injective: bool
    is_order: bool
    legs_monotone: list = field(default_factory=list)
    witness: object = None

    def report(self) -> dict:
        out = {
            "jointly_injective": self.jointly_injective,
            "is_order": self.is_order,
            "legs_monotone": self.legs_monotone,
        }
        if self.witness is not None:
            out["symmetry_witness"] = {
                f"{x}->{y}": v.dim for (x, y), v in self.witness.nonzero()
            }
        return out


def limit_order(cone: Cone) -> LimitOrder:
    """``R = ∧ F_α† ∘ R_α ∘ F_α`` together with ``E = ∧ F_α† ∘ F_α``.

    When ``E = I`` the result is certified an order and every leg is
    checked monotone.  Otherwise R is only a preorder and a nontrivial
    symmetry G <= E is attached as the witness.
    """
    E = meet_all(compose(dagger(F), F) for F in cone.legs)
    R = meet_all(compose_all(dagger(F), Ra, F) for F, Ra in zip(cone.legs, cone.orders))
    joint = rel_eq(E, identity(cone.apex))
    ok = check_order(R).value
    mono = [is_monotone(F, R, Ra) for F, Ra in zip(cone.legs, cone.orders)]
    witness = None
    if not joint:
        witness = find_nontrivial_symmetry(E)
    return LimitOrder(R, E, joint, ok, mono, witness)
