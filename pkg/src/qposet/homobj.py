"""Hom-orders on finite carriers, indicator functions, the classical power
set and the spectral order on observables."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product as iproduct
from typing import Sequence

import numpy as np

from .constructions import ClassicalPoset, classical_embed
from .errors import NotAnOrder, ObjectMismatch, ShapeError
from .order import (
    FunctionRel,
    QuantumPoset,
    _rel,
    as_function,
    check_order,
    check_preorder,
    inclusion,
    is_monotone,
    is_order_embedding,
)
from .qrel import (
    BOOL,
    ONE,
    BinaryRelation,
    QuantumSet,
    compose,
    dagger,
    dual_and_counit,
    identity,
    pair_id,
    product_rel,
    product_set,
    rel_eq,
    rel_leq,
)
from .settings import compare_tol, rank_tol
from .subspace import OperatorSubspace, _from_flat, complement

__all__ = [
    "BOOL_CHAIN",
    "IndicatorPair",
    "relation_to_indicator",
    "point",
    "is_upset",
    "FiniteFunctionCarrier",
    "HomOrder",
    "classical_function_carrier",
    "largest_hom_order",
    "PowerPoset",
    "classical_power_poset",
    "ptilde",
    "ptilde_maximality",
    "downset_embedding_classical",
    "Observable",
    "observable_to_function",
    "grid_order",
    "spectral_leq",
]

# `𝔹 ordered by 0 ⊑ 1
BOOL_CHAIN = BinaryRelation.from_bool(BOOL, BOOL, [[True, True], [False, True]])


def point(X: QuantumSet, atom: str) -> FunctionRel:
    """The function 𝟙 -> X picking a one-dimensional atom."""
    if X.dim(atom) != 1:
        raise ShapeError("points pick one-dimensional atoms")
    return as_function(BinaryRelation(ONE, X, {("*", atom): [np.ones((1, 1))]}))


# -- indicator functions -----------------------------------------------------


@dataclass(frozen=True)
class IndicatorPair:
    """``q: Y -> 𝟙`` and the unique function ``q̃: Y -> `𝔹`` with `1† ∘ q̃ = q."""

    q: BinaryRelation
    q_tilde: FunctionRel


def relation_to_indicator(q: BinaryRelation) -> IndicatorPair:
    if q.target != ONE:
        raise ObjectMismatch("relation_to_indicator expects a relation into 𝟙")
    comps = {}
    for y in q.source.ids:
        v = q.components[(y, "*")]
        comps[(y, "1")] = v
        comps[(y, "0")] = complement(v)
    return IndicatorPair(q, as_function(BinaryRelation(q.source, BOOL, comps)))


def is_upset(q: BinaryRelation, S) -> bool:
    """``q ∘ S† = q`` for ``q: Y -> 𝟙`` and an order S on Y."""
    S = _rel(S)
    if q.target != ONE or q.source != S.source:
        raise ObjectMismatch("is_upset: q must be a relation from the ordered set to 𝟙")
    return rel_eq(compose(q, dagger(S)), q)


# -- hom-orders on finite carriers -------------------------------------------


@dataclass(frozen=True)
class FiniteFunctionCarrier:
    """A finite family W of would-be functions Y -> Z with ``eval: W × Y -> Z``."""

    W: QuantumSet
    Y: QuantumSet
    Z: QuantumSet
    eval: FunctionRel

    def __post_init__(self):
        if self.eval.source != product_set(self.W, self.Y) or self.eval.target != self.Z:
            raise ObjectMismatch("eval must map W × Y to Z")
        object.__setattr__(self, "eval", as_function(self.eval))

    def restrict(self, atoms: Sequence[str]) -> "FiniteFunctionCarrier":
        sub = self.W.restrict(atoms)
        J = inclusion(sub, self.W)
        ev = compose(self.eval, product_rel(J, identity(self.Y)))
        return FiniteFunctionCarrier(sub, self.Y, self.Z, as_function(ev))


@dataclass
class HomOrder:
    W: QuantumSet
    Q: BinaryRelation
    eval: BinaryRelation
    report: dict = field(default_factory=dict)


def classical_function_carrier(A: Sequence, B: Sequence) -> tuple[FiniteFunctionCarrier, list[tuple[int, ...]]]:
    """All maps ``A -> B`` as a classical carrier.

    Atom ids are ``"f:" + "".join(indices)`` style strings ``f:i,j,k``;
    the returned list gives the index tuple for each map in atom order.
    """
    A = [str(a) for a in A]
    B = [str(b) for b in B]
    maps = list(iproduct(range(len(B)), repeat=len(A)))
    names = ["f:" + ",".join(map(str, m)) for m in maps]
    W = QuantumSet.classical(names)
    Y, Z = QuantumSet.classical(A), QuantumSet.classical(B)
    WY = product_set(W, Y)
    m = np.zeros((len(WY), len(Z)), dtype=bool)
    for name, f in zip(names, maps):
        for i, a in enumerate(A):
            m[WY.index[pair_id(name, a)], Z.index[B[f[i]]]] = True
    ev = BinaryRelation.from_bool(WY, Z, m)
    order = sorted(range(len(maps)), key=lambda k: names[k])
    return FiniteFunctionCarrier(W, Y, Z, as_function(ev)), [maps[k] for k in order]


def _atom_ok(carrier: FiniteFunctionCarrier, w: str, S, T) -> bool:
    sub = carrier.restrict([w])
    ev = sub.eval
    lhs = compose(ev, product_rel(identity(sub.W), S))
    return rel_leq(lhs, compose(T, ev))


def _solve_classical(ev: BinaryRelation, W, Y, Z, S, T) -> BinaryRelation:
    WY = ev.source
    E = np.zeros((len(W), len(Y), len(Z)), dtype=bool)
    tgt = np.zeros_like(E)
    TE = compose(T, ev).bool_matrix
    for w, y in iproduct(W.ids, Y.ids):
        k = WY.index[pair_id(w, y)]
        E[W.index[w], Y.index[y]] = ev.bool_matrix[k]
        tgt[W.index[w], Y.index[y]] = TE[k]
    s = S.bool_matrix
    # Q[w1, w2] iff for all y1, y2 with S(y1, y2) and z with E(w2, y2, z): tgt(w1, y1, z)
    bad = np.einsum("ab,jbz,iaz->ij", s.astype(int), E.astype(int), (~tgt).astype(int)) > 0
    return BinaryRelation.from_bool(W, W, ~bad)


def _solve_quantum(ev: BinaryRelation, W, Y, Z, S, T) -> BinaryRelation:
    target = compose(T, ev)
    proj = {}
    comps = {}
    for (w1, d1), (w2, d2) in iproduct(W.atoms(), W.atoms()):
        blocks = []
        for (y1, e1), (y2, e2) in iproduct(Y.atoms(), Y.atoms()):
            sv = S.components[(y1, y2)]
            if not sv.dim:
                continue
            for z, dz in Z.atoms():
                ez = ev.components[(pair_id(w2, y2), z)]
                if not ez.dim:
                    continue
                key = (pair_id(w1, y1), z)
                if key not in proj:
                    t = target.components[key]
                    n = dz * d1 * e1
                    proj[key] = np.eye(n) - t.flat.T @ t.flat.conj()
                comp = proj[key]
                for e in ez.basis:
                    e3 = e.reshape(dz, d2, e2)
                    for s in sv.basis:
                        K = np.einsum("zab,bd->zad", e3, s)
                        # out[z, c, d] = sum_a K[z, a, d] v[a, c]
                        M = np.einsum("zad,ce->zcdae", K, np.eye(d1)).reshape(dz * d1 * e1, d2 * d1)
                        blocks.append(comp @ M)
        if not blocks:
            comps[(w1, w2)] = OperatorSubspace.full(d1, d2)
            continue
        A = np.vstack(blocks)
        _, sing, vh = np.linalg.svd(A, full_matrices=True)
        cut = rank_tol() * max(sing[0] if sing.size else 0.0, 1.0)
        rank = int(np.count_nonzero(sing > cut))
        null = vh[rank:].conj()
        comps[(w1, w2)] = _from_flat(null, d1, d2) if len(null) else OperatorSubspace.zero(d1, d2)
    return BinaryRelation(W, W, comps)


def largest_hom_order(carrier: FiniteFunctionCarrier, S, T) -> HomOrder:
    """Largest W' ⊆ W with evaluation a homomorphism for ``I × S``, and
    the largest Q on W' with ``Eval' ∘ (Q × S) <= T ∘ Eval'``.

    Each component of Q is the kernel of the linear constraint
    ``v ↦ (1 - P_target) vec(e (v ⊗ s))`` over basis choices of s and e.
    """
    S, T = _rel(S), _rel(T)
    if S.source != carrier.Y or S.target != carrier.Y:
        raise ObjectMismatch("S must be a relation on Y")
    if T.source != carrier.Z or T.target != carrier.Z:
        raise ObjectMismatch("T must be a relation on Z")
    vs, vt = check_preorder(S), check_order(T)
    if not vs:
        raise NotAnOrder(f"S is not a preorder: {vs.failed} at {vs.pair}")
    if not vt:
        raise NotAnOrder(f"T is not an order: {vt.failed} at {vt.pair}")
    kept = [w for w in carrier.W.ids if _atom_ok(carrier, w, S, T)]
    sub = carrier.restrict(kept) if kept else None
    if sub is None:
        empty = QuantumSet({})
        return HomOrder(empty, BinaryRelation(empty, empty), None, {"atoms": 0})
    W, ev = sub.W, sub.eval
    classical = ev.is_classical and S.is_classical and T.is_classical
    if classical:
        Q = _solve_classical(ev, W, carrier.Y, carrier.Z, S, T)
    else:
        Q = _solve_quantum(ev, W, carrier.Y, carrier.Z, S, T)
    verified = rel_leq(compose(ev, product_rel(Q, S)), compose(T, ev))
    report = {
        "atoms": len(W),
        "dropped": [w for w in carrier.W.ids if w not in W],
        "solver": "boolean" if classical else "kernel",
        "constraint_holds": verified,
        "is_preorder": check_preorder(Q).value,
        "is_order": check_order(Q).value,
    }
    if not verified or not report["is_preorder"]:
        raise NotAnOrder(f"hom-order solver produced an inconsistent result: {report}")
    return HomOrder(W, Q, ev, report)


# -- power sets (classical fragment) -----------------------------------------


def _subset_id(elements) -> str:
    return "{" + ",".join(elements) + "}"


@dataclass
class PowerPoset:
    """```Pow(A)`` ordered by inclusion with the membership relation ∋."""

    base: tuple
    subsets: list
    poset: ClassicalPoset
    qposet: QuantumPoset
    membership: BinaryRelation

    def subset_id(self, members) -> str:
        keep = set(members)
        return _subset_id([a for a in self.base if a in keep])

    def F_R(self, R: BinaryRelation) -> FunctionRel:
        """The function ``F_R: `B -> Pow(A)``, ``b ↦ {a : R(b, a)}``."""
        A = QuantumSet.classical(self.base)
        if R.target != A or not R.source.is_classical:
            raise ObjectMismatch("F_R expects a classical relation into the base set")
        Pw = self.qposet.carrier
        m = np.zeros((len(R.source), len(Pw)), dtype=bool)
        for b in R.source.ids:
            members = [a for a in self.base if R.components[(b, a)].dim]
            m[R.source.index[b], Pw.index[self.subset_id(members)]] = True
        return as_function(BinaryRelation.from_bool(R.source, Pw, m))

    def solutions(self, R: BinaryRelation) -> list[FunctionRel]:
        """Every function F with ``∋ ∘ F = R``, by exhaustive search."""
        Pw = self.qposet.carrier
        B = R.source
        if not B.is_classical:
            raise ObjectMismatch("solutions expects a classical relation")
        # all |Pw|^|B| index tuples at once; ∋ ∘ F has rows mem[choice[b]]
        choices = np.array(list(iproduct(range(len(Pw)), repeat=len(B))), dtype=int).reshape(-1, len(B))
        mem, want = self.membership.bool_matrix, R.bool_matrix
        hits = np.all(mem[choices] == want[None], axis=(1, 2))
        out = []
        for choice in choices[hits]:
            m = np.zeros((len(B), len(Pw)), dtype=bool)
            m[np.arange(len(B)), choice] = True
            out.append(as_function(BinaryRelation.from_bool(B, Pw, m)))
        return out

    def direct_image(self, S: BinaryRelation) -> FunctionRel:
        """``Pow(S) = F_{S ∘ ∋}`` for a relation S between base sets."""
        other = classical_power_poset(list(S.target.ids))
        return other.F_R(compose(S, self.membership))


def classical_power_poset(A) -> PowerPoset:
    """Power set of a classical set (a list of ids or a ClassicalPoset)."""
    if isinstance(A, ClassicalPoset):
        base = tuple(A.elements)
    elif isinstance(A, QuantumSet):
        if not A.is_classical:
            raise ShapeError("the power set is built for classical sets only")
        base = A.ids
    else:
        base = tuple(str(a) for a in A)
    subsets = [c for k in range(len(base) + 1) for c in combinations(base, k)]
    ids = [_subset_id(c) for c in subsets]
    sets = [set(c) for c in subsets]
    leq = np.array([[s <= t for t in sets] for s in sets], dtype=bool)
    poset = ClassicalPoset(ids, leq, check=False)
    qp = QuantumPoset._trusted(classical_embed(leq, ids, ids), True)
    mem = np.array([[a in s for a in base] for s in sets], dtype=bool)
    membership = classical_embed(mem, ids, base)
    return PowerPoset(base, ids, poset, qp, membership)


def downset_embedding_classical(P: ClassicalPoset) -> tuple[FunctionRel, PowerPoset]:
    """``a ↦ ↓a`` into the inclusion-ordered power set; equals ``F_{R†}``."""
    pw = classical_power_poset(P)
    R = classical_embed(P.leq, P.elements, P.elements)
    G = pw.F_R(dagger(R))
    if not is_order_embedding(G, R, pw.qposet):
        raise NotAnOrder("down-set map failed the order-embedding check")
    return G, pw


# -- P̃ ------------------------------------------------------------------------


def _ptilde_relation(R: BinaryRelation) -> tuple[BinaryRelation, BinaryRelation]:
    dd = dual_and_counit(R.source)
    P = compose(dd.counit, product_rel(dagger(R), identity(dd.dual)))
    return P, identity(dd.dual)


def ptilde(R) -> FunctionRel:
    """``P̃: X × X* -> `𝔹`` with ``1† ∘ P̃ = E ∘ (R† × I)``.

    Raises if P̃ fails to be monotone for ``R × I`` (which would
    contradict the theory, not the input).
    """
    R = _rel(R)
    v = check_order(R)
    if not v:
        raise NotAnOrder(f"ptilde needs an order: {v.failed} at {v.pair}")
    P, Id = _ptilde_relation(R)
    Pt = relation_to_indicator(P).q_tilde
    if not is_monotone(Pt, product_rel(R, Id), BOOL_CHAIN):
        raise NotAnOrder("P̃ is not monotone for R × I")
    return Pt


def ptilde_maximality(R, T) -> dict:
    """Is P̃ (built from R) monotone for ``T × I``, and is ``T <= R``?

    The two answers must coincide on orders T; this returns both.
    """
    R, T = _rel(R), _rel(T)
    Pt = ptilde(R)
    Id = identity(dual_and_counit(R.source).dual)
    mono = is_monotone(Pt, product_rel(T, Id), BOOL_CHAIN)
    return {"monotone": mono, "T_leq_R": rel_leq(T, R)}


# -- observables and the spectral order ---------------------------------------

GRID_TOL = 1e-7


def _grid_id(a: float) -> str:
    return format(float(a), ".12g")


@dataclass(frozen=True)
class Observable:
    """A hermitian matrix whose spectrum should sit on ``grid``."""

    matrix: np.ndarray
    grid: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError("observable matrix must be square")
        if np.linalg.norm(m - m.conj().T) > compare_tol() * max(1.0, np.linalg.norm(m)):
            raise ShapeError("observable matrix is not hermitian")
        grid = tuple(sorted(float(g) for g in self.grid))
        if len(set(_grid_id(g) for g in grid)) != len(grid):
            raise ValueError("grid points must be distinct")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "grid", grid)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectral_projections(self) -> dict[float, np.ndarray]:
        """Eigenprojection for each grid point; raises if a value is off-grid."""
        w, v = np.linalg.eigh(self.matrix)
        g = np.array(self.grid)
        out = {a: np.zeros((self.dim, 0), dtype=complex) for a in self.grid}
        for lam, vec in zip(w, v.T):
            k = int(np.argmin(np.abs(g - lam)))
            if abs(g[k] - lam) > GRID_TOL:
                raise ValueError(f"eigenvalue {lam:.9g} is not on the grid")
            out[self.grid[k]] = np.column_stack([out[self.grid[k]], vec])
        return out

    def below(self, lam: float) -> np.ndarray:
        """Orthonormal basis (columns) of the range of ``[a <= lam]``."""
        cols = [b for a, b in self.spectral_projections().items() if a <= lam + GRID_TOL]
        return np.hstack(cols) if cols else np.zeros((self.dim, 0))


def grid_order(grid: Sequence[float]) -> QuantumPoset:
    ids = [_grid_id(g) for g in grid]
    g = np.asarray(grid, dtype=float)
    return QuantumPoset._trusted(classical_embed(g[:, None] <= g[None, :], ids, ids), True)


def observable_to_function(obs: Observable, atom: str = "h") -> FunctionRel:
    """``F: ℍ_d -> `Λ`` with ``F(h, α)`` the span of ``v†`` over the α-eigenspace."""
    H = QuantumSet({atom: obs.dim})
    L = QuantumSet.classical([_grid_id(g) for g in obs.grid])
    comps = {}
    for a, vecs in obs.spectral_projections().items():
        if vecs.shape[1]:
            comps[(atom, _grid_id(a))] = [vecs[:, j].conj()[None, :] for j in range(vecs.shape[1])]
    return as_function(BinaryRelation(H, L, comps))


def spectral_leq(a: Observable, b: Observable) -> bool:
    """``[a <= λ] ⊇ [b <= λ]`` for every grid point λ."""
    if a.grid != b.grid or a.dim != b.dim:
        raise ObjectMismatch("spectral_leq needs observables on a shared grid and space")
    for lam in a.grid:
        A, B = a.below(lam), b.below(lam)
        if B.shape[1] == 0:
            continue
        resid = B - A @ (A.conj().T @ B)
        if np.linalg.norm(resid) > compare_tol():
            return False
    return True
