"""Random generators and brute-force classical oracles.

Every generator certifies its output with the library checkers and
retries a bounded number of times; failure raises SamplingError.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .constructions import ClassicalPoset, _sorted_perm
from .errors import SamplingError, ShapeError
from .homobj import FiniteFunctionCarrier, Observable
from .order import (
    FunctionRel,
    QuantumPoset,
    check_equivalence,
    check_order,
    classify_function,
)
from .qrel import BinaryRelation, QuantumSet, compose, dagger, product_set
from .subspace import OperatorSubspace, span

__all__ = [
    "MAX_RETRIES",
    "MAX_MAPS",
    "RandomSpec",
    "dequantize",
    "random_unitary",
    "random_quantum_set",
    "random_classical_poset",
    "random_order",
    "random_function",
    "random_codomain",
    "random_bijection",
    "random_relation",
    "random_equivalence",
    "random_observable",
    "random_carrier",
    "all_maps",
    "brute_force_pointwise_order",
    "classical_limit_oracle",
]

MAX_RETRIES = 64
MAX_MAPS = 64


@dataclass(frozen=True)
class RandomSpec:
    seed: int = 0
    max_atoms: int = 3
    max_dim: int = 3
    density: float = 0.5

    def __post_init__(self):
        if self.max_atoms < 1 or self.max_dim < 1:
            raise ValueError("max_atoms and max_dim must be positive")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed & 0xFFFFFFFFFFFFFFFF)

    def derive(self, k: int) -> "RandomSpec":
        """A spec with a new seed drawn deterministically from this one."""
        seed = int(np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, k]).integers(2**63))
        return replace(self, seed=seed)


def _rng(spec, rng):
    return rng if rng is not None else spec.rng()


def dequantize(R: BinaryRelation, A: Sequence | None = None, B: Sequence | None = None) -> np.ndarray:
    """Boolean matrix of a classical relation; inverse of ``classical_embed``.

    Rows and columns follow ``A`` and ``B`` when given, else atom order.
    """
    if not R.is_classical:
        raise ShapeError("dequantize needs all atoms of dimension 1")
    m = R.bool_matrix
    if A is not None:
        m = m[_sorted_perm([str(a) for a in A]), :]
    if B is not None:
        m = m[:, _sorted_perm([str(b) for b in B])]
    return m.copy()


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _random_matrix(shape, rng) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_quantum_set(spec: RandomSpec, rng=None, prefix: str = "x") -> QuantumSet:
    rng = _rng(spec, rng)
    n = int(rng.integers(1, spec.max_atoms + 1))
    return QuantumSet({f"{prefix}{i}": int(rng.integers(1, spec.max_dim + 1)) for i in range(n)})


def random_classical_poset(n: int, rng, density: float = 0.5, prefix: str = "p") -> ClassicalPoset:
    """Random DAG on n points (random labelling), transitively closed."""
    up = np.triu(rng.random((n, n)) < density, 1)
    leq = up | np.eye(n, dtype=bool)
    for k in range(n):
        leq |= leq[:, [k]] & leq[[k], :]
    perm = rng.permutation(n)
    leq = leq[np.ix_(perm, perm)]
    return ClassicalPoset([f"{prefix}{i}" for i in range(n)], leq)


def _diagonal_algebra(d: int, rng, density: float) -> OperatorSubspace:
    """``ℂ1`` plus strictly upper blocks for a random strict order on blocks."""
    cuts = sorted(set(rng.integers(1, d, size=int(rng.integers(0, d))).tolist())) if d > 1 else []
    bounds = [0, *cuts, d]
    nb = len(bounds) - 1
    rel = np.triu(rng.random((nb, nb)) < density, 1)
    for k in range(nb):
        rel |= rel[:, [k]] & rel[[k], :]
    mats = [np.eye(d)]
    for a, b in zip(*np.nonzero(rel)):
        for i in range(bounds[a], bounds[a + 1]):
            for j in range(bounds[b], bounds[b + 1]):
                m = np.zeros((d, d))
                m[i, j] = 1.0
                mats.append(m)
    u = random_unitary(d, rng)
    return span([u @ m @ u.conj().T for m in mats])


def _products(left: OperatorSubspace, right: OperatorSubspace) -> list[np.ndarray]:
    return [a @ b for a in left.basis for b in right.basis]


def _draw_order(X: QuantumSet, spec: RandomSpec, rng) -> BinaryRelation:
    atoms = list(X.ids)
    rng.shuffle(atoms)
    diag = {x: _diagonal_algebra(X.dim(x), rng, spec.density) for x in atoms}
    comps = {(x, x): diag[x] for x in atoms}
    n = len(atoms)
    for gap in range(1, n):
        for i in range(n - gap):
            k = i + gap
            xi, xk = atoms[i], atoms[k]
            di, dk = X.dim(xi), X.dim(xk)
            mats = []
            for j in range(i + 1, k):
                xj = atoms[j]
                mats += _products(comps[(xj, xk)], comps[(xi, xj)])
            if rng.random() < spec.density:
                m = _random_matrix((dk, di), rng)
                mats += [a @ m @ b for a in diag[xk].basis for b in diag[xi].basis]
            comps[(xi, xk)] = span(mats, shape=(dk, di))
    return BinaryRelation(X, X, comps)


def random_order(spec: RandomSpec, X: QuantumSet | None = None, rng=None) -> QuantumPoset:
    """A certified quantum order on X (or on a random quantum set)."""
    rng = _rng(spec, rng)
    if X is None:
        X = random_quantum_set(spec, rng)
    for _ in range(MAX_RETRIES):
        R = _draw_order(X, spec, rng)
        if check_order(R):
            return QuantumPoset._trusted(R, True)
    raise SamplingError(f"random_order: no certified order after {MAX_RETRIES} draws")


def _multiplicities(dx: int, dims: list[int]) -> list[tuple[int, ...]]:
    out = []

    def rec(i, left, acc):
        if i == len(dims):
            if left == 0:
                out.append(tuple(acc))
            return
        for m in range(left // dims[i] + 1):
            rec(i + 1, left - m * dims[i], acc + [m])

    rec(0, dx, [])
    return out


def _function_from_blocks(X, Y, blocks: dict, rng) -> BinaryRelation:
    """blocks[x] = multiplicities over Y.ids; unitary mixing per atom."""
    comps = {}
    for x, dx in X.atoms():
        u = random_unitary(dx, rng)
        col = 0
        for y, m in zip(Y.ids, blocks[x]):
            dy = Y.dim(y)
            mats = []
            for _ in range(m):
                mats.append(u[:, col : col + dy].conj().T)
                col += dy
            if mats:
                comps[(x, y)] = mats
    return BinaryRelation(X, Y, comps)


def random_function(spec: RandomSpec, X: QuantumSet, Y: QuantumSet, rng=None, surjective=False) -> FunctionRel:
    """A certified function X -> Y from a random block decomposition."""
    rng = _rng(spec, rng)
    dims = [Y.dim(y) for y in Y.ids]
    choices = {x: _multiplicities(dx, dims) for x, dx in X.atoms()}
    if any(not c for c in choices.values()):
        raise SamplingError("random_function: some atom of X admits no decomposition over Y")
    for _ in range(MAX_RETRIES):
        blocks = {x: c[int(rng.integers(len(c)))] for x, c in choices.items()}
        if surjective and not all(any(blocks[x][k] for x in X.ids) for k in range(len(dims))):
            continue
        F = _function_from_blocks(X, Y, blocks, rng)
        fc = classify_function(F)
        if fc.is_function and (fc.surjective or not surjective):
            return FunctionRel._wrap(F, fc.injective, fc.surjective)
    raise SamplingError(f"random_function: no certified function after {MAX_RETRIES} draws")


def random_codomain(spec: RandomSpec, X: QuantumSet, rng=None, prefix: str = "y") -> QuantumSet:
    """A random quantum set that admits at least one function from X."""
    rng = _rng(spec, rng)
    for _ in range(MAX_RETRIES):
        Y = random_quantum_set(spec, rng, prefix=prefix)
        dims = [Y.dim(y) for y in Y.ids]
        if all(_multiplicities(dx, dims) for _, dx in X.atoms()):
            return Y
    return QuantumSet({f"{prefix}0": 1})


def random_bijection(spec: RandomSpec, X: QuantumSet, rng=None, prefix: str = "b") -> FunctionRel:
    """Bijection from X onto a relabelled copy, a random unitary per atom."""
    rng = _rng(spec, rng)
    atoms = list(X.ids)
    perm = rng.permutation(len(atoms))
    names = {a: f"{prefix}{int(k)}" for a, k in zip(atoms, perm)}
    Y = QuantumSet({names[a]: X.dim(a) for a in atoms})
    comps = {(a, names[a]): [random_unitary(X.dim(a), rng)] for a in atoms}
    F = BinaryRelation(X, Y, comps)
    fc = classify_function(F)
    if not fc.bijective:
        raise SamplingError("random_bijection: certification failed")
    return FunctionRel._wrap(F, True, True)


def random_relation(spec: RandomSpec, X: QuantumSet, Y: QuantumSet, rng=None) -> BinaryRelation:
    rng = _rng(spec, rng)
    comps = {}
    for (x, dx), (y, dy) in iproduct(X.atoms(), Y.atoms()):
        if rng.random() < spec.density:
            k = int(rng.integers(1, dx * dy + 1))
            comps[(x, y)] = [_random_matrix((dy, dx), rng) for _ in range(k)]
    return BinaryRelation(X, Y, comps)


def random_equivalence(spec: RandomSpec, case: str | None = None, rng=None) -> BinaryRelation:
    """``E = F† ∘ F`` for a random surjection F onto a random quotient.

    ``case="diagonal"`` forces some ``E(x, x) != ℂ1``;
    ``case="offdiagonal"`` forces trivial diagonals and some nonzero
    off-diagonal component; ``None`` leaves both to chance (E may be I).
    """
    rng = _rng(spec, rng)
    for _ in range(MAX_RETRIES):
        Y = random_quantum_set(spec, rng, prefix="q")
        ydims = [Y.dim(y) for y in Y.ids]
        blocks = {}
        dims = {}
        n = int(rng.integers(1, spec.max_atoms + 1))
        for i in range(n):
            if case == "offdiagonal":
                m = [0] * len(ydims)
                m[int(rng.integers(len(ydims)))] = 1
            else:
                m = [0] * len(ydims)
                for _ in range(int(rng.integers(1, 3))):
                    m[int(rng.integers(len(ydims)))] += 1
            d = sum(a * b for a, b in zip(m, ydims))
            if d > spec.max_dim and case != "offdiagonal":
                continue
            blocks[f"x{i}"] = tuple(m)
            dims[f"x{i}"] = d
        if not blocks:
            continue
        hit = [any(b[k] for b in blocks.values()) for k in range(len(ydims))]
        if not all(hit):
            keep = [y for y, h in zip(Y.ids, hit) if h]
            blocks = {x: tuple(b[k] for k in range(len(ydims)) if hit[k]) for x, b in blocks.items()}
            Y = Y.restrict(keep)
        X = QuantumSet(dims)
        if case == "diagonal" and not any(sum(b) >= 2 for b in blocks.values()):
            continue
        if case == "offdiagonal":
            cols = np.array(list(blocks.values())).sum(axis=0)
            if not np.any(cols >= 2):
                continue
        F = _function_from_blocks(X, Y, blocks, rng)
        E = compose(dagger(F), F)
        if check_equivalence(E):
            return E
    raise SamplingError(f"random_equivalence: no certified draw after {MAX_RETRIES} attempts")


def random_observable(dim: int, grid: Sequence[float], rng) -> Observable:
    """Hermitian matrix with eigenvalues drawn from ``grid`` in a random basis."""
    vals = rng.choice(np.asarray(grid, dtype=float), size=dim)
    u = random_unitary(dim, rng)
    m = u @ np.diag(vals) @ u.conj().T
    return Observable((m + m.conj().T) / 2, tuple(grid))


def random_carrier(spec: RandomSpec, rng=None) -> FiniteFunctionCarrier:
    """Random W, Y, Z with a certified evaluation function ``W × Y -> Z``."""
    rng = _rng(spec, rng)
    for _ in range(MAX_RETRIES):
        W = random_quantum_set(spec, rng, prefix="w")
        Y = random_quantum_set(spec, rng, prefix="y")
        Z = random_quantum_set(spec, rng, prefix="z")
        try:
            ev = random_function(spec, product_set(W, Y), Z, rng=rng)
        except SamplingError:
            continue
        return FiniteFunctionCarrier(W, Y, Z, ev)
    raise SamplingError(f"random_carrier: no admissible draw after {MAX_RETRIES} attempts")


# -- classical oracles ---------------------------------------------------------


def all_maps(A: ClassicalPoset, B: ClassicalPoset) -> list[tuple[int, ...]]:
    n = len(B) ** len(A)
    if n > MAX_MAPS:
        raise ValueError(f"{n} maps exceed the enumeration bound {MAX_MAPS}")
    return list(iproduct(range(len(B)), repeat=len(A)))


def brute_force_pointwise_order(A: ClassicalPoset, B: ClassicalPoset) -> tuple[list[tuple[int, ...]], ClassicalPoset]:
    """Monotone maps A -> B ordered pointwise, by enumeration.

    Map ids follow ``"f:" + comma-joined indices``.
    """
    maps = [f for f in all_maps(A, B) if A.is_monotone_map(B, f)]
    leq = np.array(
        [[all(B.leq[f[i], g[i]] for i in range(len(A))) for g in maps] for f in maps],
        dtype=bool,
    ).reshape(len(maps), len(maps))
    names = ["f:" + ",".join(map(str, f)) for f in maps]
    return maps, ClassicalPoset(names, leq, check=False)


def classical_limit_oracle(legs: Sequence[Sequence[int]], codomains: Sequence[ClassicalPoset], n: int) -> np.ndarray:
    """Classical limit order on n points: ``a ⊑ b`` iff every leg preserves it."""
    leq = np.ones((n, n), dtype=bool)
    for f, P in zip(legs, codomains):
        f = np.asarray(f, dtype=int)
        leq &= P.leq[np.ix_(f, f)]
    return leq
