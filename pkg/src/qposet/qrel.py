"""Quantum sets and binary relations between them.

A quantum set is a finite family of atoms, each a Hilbert space C^d named
by a string id.  A binary relation R: X -> Y picks an operator subspace
R(x, y) of L(C^dx, C^dy) for every pair of atoms.  Composition, dagger and
the lattice operations act componentwise; the Cartesian product tensors
atoms and components.

Classical sets (every atom one-dimensional) get a boolean fast path: the
relation is mirrored by an ``|X| x |Y|`` boolean matrix and composition
and comparison are done on that matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Mapping

import numpy as np

from .errors import ObjectMismatch, ShapeError
from .subspace import (
    OperatorSubspace,
    _from_flat,
    adjoint_space,
    complement,
    contains,
    equal,
    join,
    meet,
    span,
    tensor_space,
)

__all__ = [
    "QuantumSet",
    "BinaryRelation",
    "DualData",
    "ONE",
    "BOOL",
    "identity",
    "compose",
    "dagger",
    "rel_leq",
    "rel_eq",
    "lattice",
    "top",
    "bottom",
    "product_set",
    "product_rel",
    "left_unitor",
    "right_unitor",
    "braiding",
    "associator",
    "dual_and_counit",
    "snake_holds",
    "trace",
    "trace_via_counit",
    "orthogonal",
    "scalar",
    "delta",
    "scale",
]

TENSOR = "⊗"


class QuantumSet:
    """Finite map from atom ids to positive dimensions, sorted by id."""

    __slots__ = ("ids", "dims", "index", "_hash")

    def __init__(self, atoms: Mapping[str, int] | Iterable[tuple[str, int]]):
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        clean = {}
        for k, d in items:
            if not isinstance(k, str):
                raise TypeError(f"atom ids must be strings, got {k!r}")
            if k in clean:
                raise ValueError(f"duplicate atom id {k!r}")
            d = int(d)
            if d < 1:
                raise ValueError(f"atom {k!r} has non-positive dimension {d}")
            clean[k] = d
        pairs = sorted(clean.items())
        self.ids = tuple(k for k, _ in pairs)
        self.dims = tuple(d for _, d in pairs)
        self.index = {k: i for i, k in enumerate(self.ids)}
        self._hash = hash((self.ids, self.dims))

    @classmethod
    def classical(cls, ids: Iterable) -> "QuantumSet":
        """The quantum set `A: one 1-dimensional atom per element."""
        return cls({str(a): 1 for a in ids})

    def dim(self, atom: str) -> int:
        return self.dims[self.index[atom]]

    def atoms(self):
        return zip(self.ids, self.dims)

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __contains__(self, atom):
        return atom in self.index

    def __eq__(self, other):
        if not isinstance(other, QuantumSet):
            return NotImplemented
        return self.ids == other.ids and self.dims == other.dims

    def __hash__(self):
        return self._hash

    @property
    def is_classical(self) -> bool:
        return all(d == 1 for d in self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def restrict(self, atoms: Iterable[str]) -> "QuantumSet":
        return QuantumSet({a: self.dim(a) for a in atoms})

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.ids, self.dims))

    def __repr__(self):
        body = ", ".join(f"{k!r}: {d}" for k, d in self.atoms())
        return f"QuantumSet({{{body}}})"


ONE = QuantumSet({"*": 1})
BOOL = QuantumSet.classical(["0", "1"])


def pair_id(left: str, right: str) -> str:
    return f"{left}{TENSOR}{right}"


def product_set(X: QuantumSet, Y: QuantumSet) -> QuantumSet:
    """Atoms ``x⊗y`` of dimension ``dim x * dim y``."""
    atoms = {}
    for (x, dx), (y, dy) in iproduct(X.atoms(), Y.atoms()):
        key = pair_id(x, y)
        if key in atoms:
            raise ValueError(f"product atom id {key!r} is ambiguous")
        atoms[key] = dx * dy
    return QuantumSet(atoms)


# -- relations --------------------------------------------------------------


def _zero(dx, dy):
    return OperatorSubspace.zero(dx, dy)


class BinaryRelation:
    """A morphism X -> Y of qRel.

    ``components[(x, y)]`` is an :class:`OperatorSubspace` of shape
    ``(dim y, dim x)``.  All pairs are present; missing pairs passed to the
    constructor become zero.  ``comps`` may also map pairs to lists of
    matrices, which are spanned.
    """

    __slots__ = ("source", "target", "components", "__dict__")

    def __init__(self, source: QuantumSet, target: QuantumSet, comps=None):
        self.source = source
        self.target = target
        comps = dict(comps or {})
        full = {}
        for (x, dx), (y, dy) in iproduct(source.atoms(), target.atoms()):
            v = comps.pop((x, y), None)
            if v is None:
                v = _zero(dx, dy)
            elif not isinstance(v, OperatorSubspace):
                v = span(list(v), shape=(dy, dx)) if len(v) else _zero(dx, dy)
            if v.shape != (dy, dx):
                raise ShapeError(
                    f"component ({x!r}, {y!r}) has shape {v.shape}, expected {(dy, dx)}"
                )
            full[(x, y)] = v
        if comps:
            bad = next(iter(comps))
            raise ObjectMismatch(f"component key {bad!r} names an unknown atom pair")
        self.components = full

    @classmethod
    def _trusted(cls, source, target, full):
        obj = cls.__new__(cls)
        obj.source = source
        obj.target = target
        obj.components = full
        return obj

    @classmethod
    def from_bool(cls, source: QuantumSet, target: QuantumSet, mat) -> "BinaryRelation":
        """Classical relation from a boolean ``|source| x |target|`` matrix."""
        mat = np.asarray(mat, dtype=bool)
        if not (source.is_classical and target.is_classical):
            raise ShapeError("from_bool needs classical quantum sets")
        if mat.shape != (len(source), len(target)):
            raise ShapeError(f"boolean matrix has shape {mat.shape}, expected {(len(source), len(target))}")
        one, zero = OperatorSubspace.full(1, 1), OperatorSubspace.zero(1, 1)
        full = {
            (x, y): (one if mat[i, j] else zero)
            for i, x in enumerate(source.ids)
            for j, y in enumerate(target.ids)
        }
        obj = cls._trusted(source, target, full)
        mat = mat.copy()
        mat.setflags(write=False)
        obj.__dict__["bool_matrix"] = mat
        return obj

    def __getitem__(self, key) -> OperatorSubspace:
        return self.components[key]

    @property
    def is_classical(self) -> bool:
        return self.source.is_classical and self.target.is_classical

    @cached_property
    def bool_matrix(self) -> np.ndarray:
        """Support pattern: ``[i, j]`` true iff component (x_i, y_j) is nonzero."""
        m = np.zeros((len(self.source), len(self.target)), dtype=bool)
        for (x, y), v in self.components.items():
            if v.dim:
                m[self.source.index[x], self.target.index[y]] = True
        m.setflags(write=False)
        return m

    def nonzero(self):
        """Iterate ``((x, y), subspace)`` over nonzero components."""
        return ((k, v) for k, v in self.components.items() if v.dim)

    def dagger(self) -> "BinaryRelation":
        return dagger(self)

    @property
    def T(self):
        return dagger(self)

    def __matmul__(self, other):
        return compose(self, other)

    def __and__(self, other):
        return lattice("meet", self, other)

    def __or__(self, other):
        return lattice("join", self, other)

    def __invert__(self):
        return lattice("complement", self)

    def __le__(self, other):
        return rel_leq(self, other)

    def __ge__(self, other):
        return rel_leq(other, self)

    def __eq__(self, other):
        if not isinstance(other, BinaryRelation):
            return NotImplemented
        return rel_eq(self, other)

    __hash__ = None

    def dims_summary(self) -> dict:
        return {f"{x}->{y}": v.dim for (x, y), v in self.components.items()}

    def __repr__(self):
        nz = sum(1 for _ in self.nonzero())
        return (
            f"{type(self).__name__}({len(self.source)} atoms -> {len(self.target)} atoms, "
            f"{nz} nonzero components)"
        )


def _check_same(R: BinaryRelation, S: BinaryRelation):
    if R.source != S.source or R.target != S.target:
        raise ObjectMismatch("relations must share source and target")


def identity(X: QuantumSet) -> BinaryRelation:
    if X.is_classical:
        return BinaryRelation.from_bool(X, X, np.eye(len(X), dtype=bool))
    comps = {}
    for (x, dx), (y, dy) in iproduct(X.atoms(), X.atoms()):
        comps[(x, y)] = OperatorSubspace.scalar(dx) if x == y else _zero(dx, dy)
    return BinaryRelation._trusted(X, X, comps)


def top(X: QuantumSet, Y: QuantumSet) -> BinaryRelation:
    if X.is_classical and Y.is_classical:
        return BinaryRelation.from_bool(X, Y, np.ones((len(X), len(Y)), dtype=bool))
    comps = {(x, y): OperatorSubspace.full(dx, dy) for (x, dx), (y, dy) in iproduct(X.atoms(), Y.atoms())}
    return BinaryRelation._trusted(X, Y, comps)


def bottom(X: QuantumSet, Y: QuantumSet) -> BinaryRelation:
    return BinaryRelation(X, Y)


def compose(T: BinaryRelation, S: BinaryRelation) -> BinaryRelation:
    """``T ∘ S`` for S: X -> Y and T: Y -> Z."""
    if S.target != T.source:
        raise ObjectMismatch("compose: S.target must equal T.source")
    X, Z = S.source, T.target
    if S.is_classical and T.is_classical:
        m = (S.bool_matrix.astype(np.uint8) @ T.bool_matrix.astype(np.uint8)) > 0
        return BinaryRelation.from_bool(X, Z, m)
    s_out: dict[str, list] = {}
    for (x, y), v in S.nonzero():
        s_out.setdefault(x, []).append((y, v))
    t_out: dict[str, list] = {}
    for (y, z), v in T.nonzero():
        t_out.setdefault(y, []).append((z, v))
    rows: dict[tuple, list] = {}
    for x, outs in s_out.items():
        for y, sv in outs:
            for z, tv in t_out.get(y, ()):
                prods = np.einsum("iab,jbc->ijac", tv.basis, sv.basis)
                rows.setdefault((x, z), []).append(prods.reshape(tv.dim * sv.dim, -1))
    comps = {}
    for (x, dx), (z, dz) in iproduct(X.atoms(), Z.atoms()):
        parts = rows.get((x, z))
        comps[(x, z)] = _from_flat(np.vstack(parts), dx, dz) if parts else _zero(dx, dz)
    return BinaryRelation._trusted(X, Z, comps)


def compose_all(*rels: BinaryRelation) -> BinaryRelation:
    """``compose_all(A, B, C) = A ∘ B ∘ C``."""
    out = rels[-1]
    for r in reversed(rels[:-1]):
        out = compose(r, out)
    return out


def dagger(R: BinaryRelation) -> BinaryRelation:
    if R.is_classical:
        return BinaryRelation.from_bool(R.target, R.source, R.bool_matrix.T)
    comps = {(y, x): adjoint_space(v) for (x, y), v in R.components.items()}
    return BinaryRelation._trusted(R.target, R.source, comps)


def rel_leq(R: BinaryRelation, S: BinaryRelation) -> bool:
    """``R <= S`` componentwise."""
    _check_same(R, S)
    if R.is_classical:
        return not np.any(R.bool_matrix & ~S.bool_matrix)
    return all(contains(S.components[k], v) for k, v in R.nonzero())


def rel_eq(R: BinaryRelation, S: BinaryRelation) -> bool:
    if R.source != S.source or R.target != S.target:
        return False
    if R.is_classical:
        return bool(np.array_equal(R.bool_matrix, S.bool_matrix))
    return all(equal(v, S.components[k]) for k, v in R.components.items())


def first_violation(R: BinaryRelation, S: BinaryRelation):
    """First atom pair where ``R <= S`` fails, or None."""
    _check_same(R, S)
    for k, v in R.nonzero():
        if not contains(S.components[k], v):
            return k
    return None


def lattice(kind: str, R: BinaryRelation, S: BinaryRelation | None = None) -> BinaryRelation:
    """Componentwise ``meet``, ``join`` or ``complement``."""
    if kind == "complement":
        if S is not None:
            raise TypeError("complement takes a single relation")
        if R.is_classical:
            return BinaryRelation.from_bool(R.source, R.target, ~R.bool_matrix)
        comps = {k: complement(v) for k, v in R.components.items()}
        return BinaryRelation._trusted(R.source, R.target, comps)
    if S is None:
        raise TypeError(f"{kind} needs two relations")
    _check_same(R, S)
    if kind == "meet":
        if R.is_classical:
            return BinaryRelation.from_bool(R.source, R.target, R.bool_matrix & S.bool_matrix)
        op = meet
    elif kind == "join":
        if R.is_classical:
            return BinaryRelation.from_bool(R.source, R.target, R.bool_matrix | S.bool_matrix)
        op = join
    else:
        raise ValueError(f"unknown lattice operation {kind!r}")
    comps = {k: op(v, S.components[k]) for k, v in R.components.items()}
    return BinaryRelation._trusted(R.source, R.target, comps)


def meet_all(rels: Iterable[BinaryRelation]) -> BinaryRelation:
    rels = list(rels)
    if not rels:
        raise ValueError("meet of an empty family needs explicit objects")
    out = rels[0]
    for r in rels[1:]:
        out = lattice("meet", out, r)
    return out


def join_all(rels: Iterable[BinaryRelation]) -> BinaryRelation:
    rels = list(rels)
    if not rels:
        raise ValueError("join of an empty family needs explicit objects")
    out = rels[0]
    for r in rels[1:]:
        out = lattice("join", out, r)
    return out


# -- monoidal structure -----------------------------------------------------


def product_rel(R: BinaryRelation, S: BinaryRelation) -> BinaryRelation:
    """``R × S``: component at (x1⊗x2, y1⊗y2) is R(x1, y1) ⊗ S(x2, y2)."""
    X = product_set(R.source, S.source)
    Y = product_set(R.target, S.target)
    if R.is_classical and S.is_classical:
        return BinaryRelation.from_bool(X, Y, np.kron(R.bool_matrix, S.bool_matrix).astype(bool))
    comps = {}
    for (x, dx), (y, dy) in iproduct(X.atoms(), Y.atoms()):
        comps[(x, y)] = _zero(dx, dy)
    for (x1, y1), r in R.nonzero():
        for (x2, y2), s in S.nonzero():
            comps[(pair_id(x1, x2), pair_id(y1, y2))] = tensor_space(r, s)
    return BinaryRelation._trusted(X, Y, comps)


def _atom_bijection(source: QuantumSet, target: QuantumSet, pairs) -> BinaryRelation:
    """Relation with ``span{m}`` at each ``(x, y, m)`` and zero elsewhere."""
    comps = {(x, y): span([m]) for x, y, m in pairs}
    return BinaryRelation(source, target, comps)


def left_unitor(X: QuantumSet) -> BinaryRelation:
    """λ: 𝟙 × X -> X."""
    src = product_set(ONE, X)
    return _atom_bijection(src, X, [(pair_id("*", x), x, np.eye(d)) for x, d in X.atoms()])


def right_unitor(X: QuantumSet) -> BinaryRelation:
    """ρ: X × 𝟙 -> X."""
    src = product_set(X, ONE)
    return _atom_bijection(src, X, [(pair_id(x, "*"), x, np.eye(d)) for x, d in X.atoms()])


def swap_matrix(dx: int, dy: int) -> np.ndarray:
    """Unitary C^dx ⊗ C^dy -> C^dy ⊗ C^dx with e_i⊗f_k -> f_k⊗e_i."""
    s = np.zeros((dy * dx, dx * dy))
    for i in range(dx):
        for k in range(dy):
            s[k * dx + i, i * dy + k] = 1.0
    return s


def braiding(X: QuantumSet, Y: QuantumSet) -> BinaryRelation:
    """σ: X × Y -> Y × X."""
    pairs = [
        (pair_id(x, y), pair_id(y, x), swap_matrix(dx, dy))
        for (x, dx), (y, dy) in iproduct(X.atoms(), Y.atoms())
    ]
    return _atom_bijection(product_set(X, Y), product_set(Y, X), pairs)


def associator(X: QuantumSet, Y: QuantumSet, Z: QuantumSet) -> BinaryRelation:
    """α: (X × Y) × Z -> X × (Y × Z).

    Product atom ids are flat strings and the Kronecker product is
    associative, so both sides are the same quantum set and α is the
    identity relation on it.
    """
    left = product_set(product_set(X, Y), Z)
    right = product_set(X, product_set(Y, Z))
    if left != right:
        raise ObjectMismatch("associator: product atom ids are ambiguous")
    return identity(left)


# -- duals, counit, trace ---------------------------------------------------


@dataclass(frozen=True)
class DualData:
    """``dual`` is X*, ``counit`` is E_X: X × X* -> 𝟙."""

    source: QuantumSet
    dual: QuantumSet
    counit: BinaryRelation

    @property
    def unit(self) -> BinaryRelation:
        """η: 𝟙 -> X* × X, the braided dagger of the counit."""
        return compose(braiding(self.source, self.dual), dagger(self.counit))


def dual_id(atom: str) -> str:
    return f"{atom}*"


def dual_set(X: QuantumSet) -> QuantumSet:
    return QuantumSet({dual_id(x): d for x, d in X.atoms()})


def dual_and_counit(X: QuantumSet) -> DualData:
    """Dual quantum set and the counit ``E(x⊗x*, *) = span{vec(1)†}``."""
    D = dual_set(X)
    XX = product_set(X, D)
    comps = {}
    for x, d in X.atoms():
        comps[(pair_id(x, dual_id(x)), "*")] = span([np.eye(d).reshape(1, -1)])
    return DualData(X, D, BinaryRelation(XX, ONE, comps))


def snake_holds(X: QuantumSet) -> bool:
    """Check λ ∘ (E × I) ∘ (I × η) ∘ ρ† = I_X with flat product ids."""
    dd = dual_and_counit(X)
    I = identity(X)
    lhs = compose(
        left_unitor(X),
        compose(
            product_rel(dd.counit, I),
            compose(product_rel(I, dd.unit), dagger(right_unitor(X))),
        ),
    )
    return rel_eq(lhs, I)


def _require_endo(R: BinaryRelation):
    if R.source != R.target:
        raise ObjectMismatch("expected an endo-relation")


def trace(R: BinaryRelation) -> bool:
    """⊤ (True) iff some diagonal component has an element of nonzero trace."""
    _require_endo(R)
    from .settings import compare_tol

    for x in R.source.ids:
        v = R.components[(x, x)]
        if v.dim and np.abs(np.trace(v.basis, axis1=1, axis2=2)).max() > compare_tol():
            return True
    return False


def trace_via_counit(R: BinaryRelation) -> bool:
    """``E ∘ (R × I_{X*}) ∘ E†`` as a scalar; agrees with :func:`trace`."""
    _require_endo(R)
    dd = dual_and_counit(R.source)
    s = compose(dd.counit, compose(product_rel(R, identity(dd.dual)), dagger(dd.counit)))
    return s.components[("*", "*")].dim > 0


def orthogonal(R: BinaryRelation, S: BinaryRelation) -> bool:
    """Componentwise Frobenius orthogonality of R and S."""
    _check_same(R, S)
    from .settings import compare_tol

    for k, v in R.nonzero():
        w = S.components[k]
        if w.dim and np.abs(w.flat.conj() @ v.flat.T).max() > compare_tol():
            return False
    return True


# -- scalars -----------------------------------------------------------------


def scalar(flag: bool) -> BinaryRelation:
    """⊤ or ⊥ as a relation 𝟙 -> 𝟙."""
    return BinaryRelation.from_bool(ONE, ONE, [[bool(flag)]])


def delta(a, b) -> BinaryRelation:
    """Δ_{a,b}: ⊤ when ``a == b`` and ⊥ otherwise."""
    return scalar(a == b)


def scale(s: BinaryRelation, R: BinaryRelation) -> BinaryRelation:
    """``s · R = λ ∘ (s × R) ∘ λ†`` for a scalar s: 𝟙 -> 𝟙."""
    if s.source != ONE or s.target != ONE:
        raise ObjectMismatch("scale expects a scalar 𝟙 -> 𝟙")
    return compose(left_unitor(R.target), compose(product_rel(s, R), dagger(left_unitor(R.source))))
