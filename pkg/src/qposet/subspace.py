"""Operator subspaces: subspaces of L(X, Y) for finite-dimensional X, Y.

A subspace is stored as an orthonormal family of ``cod_dim x dom_dim``
complex matrices, orthonormal for the Frobenius inner product
``<a, b> = Tr(a^dag b)``.

Conventions
-----------
* Vectorization is row-major: ``vec(m) = m.reshape(-1)``.
* Tensor products use ``numpy.kron``: ``(a (x) b)[i*p + k, j*q + l] =
  a[i, j] * b[k, l]``.  Product atoms of quantum sets use the same index
  order, so components of ``R x S`` line up without permutation.
* The rank of a span counts the singular values of the vectorized stack
  above the rank threshold.  The canonical basis is then obtained by
  Gram-Schmidt on the orthogonal projections of the standard basis
  vectors ``e_0, e_1, ...`` onto the span, in that order.  It depends on
  the subspace only (not on the spanning family), is in row echelon form,
  and each pivot entry is real and positive.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError
from .settings import compare_tol, rank_tol

__all__ = [
    "OperatorSubspace",
    "span",
    "meet",
    "join",
    "complement",
    "contains",
    "equal",
    "mul_spaces",
    "adjoint_space",
    "tensor_space",
    "marginal_factors",
    "matrix_unit",
]

PHASE_EPS = 1e-6
ECHELON_EPS = 1e-6


def _phase_normalize(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    mags = np.abs(rows)
    first = np.argmax(mags > PHASE_EPS * mags.max(axis=1, keepdims=True), axis=1)
    pivots = rows[np.arange(rows.shape[0]), first]
    rows = rows * (np.conj(pivots) / np.abs(pivots))[:, None]
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return rows


def _canonical_rows(flat: np.ndarray) -> np.ndarray:
    """Orthonormal canonical basis (as rows) of the row span of ``flat``."""
    m, n = flat.shape
    if m == 0:
        return np.zeros((0, n), dtype=complex)
    if n == 1:
        top = np.abs(flat).max()
        if top > rank_tol() * max(top, 1.0):
            return np.ones((1, 1), dtype=complex)
        return np.zeros((0, 1), dtype=complex)
    _, s, vh = np.linalg.svd(flat, full_matrices=False)
    if s.size == 0:
        return np.zeros((0, n), dtype=complex)
    k = int(np.count_nonzero(s > rank_tol() * max(s[0], 1.0)))
    if k == 0:
        return np.zeros((0, n), dtype=complex)
    if k == n:
        return np.eye(n, dtype=complex)
    return _echelon(vh[:k])


def _echelon(v: np.ndarray) -> np.ndarray:
    """Canonical orthonormal rows for the row span of orthonormal ``v``.

    Works in coefficient space: the projection of ``e_j`` has coefficients
    ``conj(v[:, j])`` in the basis ``v``.
    """
    k, n = v.shape
    coeffs = v.conj().T  # row j: coefficients of P e_j
    picked = np.zeros((0, k), dtype=complex)
    resid = coeffs.copy()
    for j in range(n):
        if len(picked) == k:
            break
        r = resid[j] - picked.T @ (picked.conj() @ resid[j]) if len(picked) else resid[j]
        nr = np.linalg.norm(r)
        if nr > ECHELON_EPS:
            picked = np.vstack([picked, r / nr])
    while len(picked) < k:
        # pathological geometry near the threshold: fall back to pivoting
        r = coeffs - (coeffs @ picked.conj().T) @ picked
        j = int(np.argmax(np.linalg.norm(r, axis=1)))
        picked = np.vstack([picked, r[j] / np.linalg.norm(r[j])])
    rows = picked @ v
    return _phase_normalize(rows)


class OperatorSubspace:
    """A subspace of L(C^dom_dim, C^cod_dim) held by an orthonormal basis.

    Instances are immutable.  Build them with :func:`span` (any spanning
    family) or :meth:`from_orthonormal` (already orthonormal input, e.g. a
    deserialized basis).  The lattice operations are also available as
    operators: ``&`` meet, ``|`` join, ``~`` orthocomplement, ``@``
    product of spaces, ``<=`` containment.
    """

    __slots__ = ("dom_dim", "cod_dim", "basis", "_flat")

    def __init__(self, flat: np.ndarray, dom_dim: int, cod_dim: int):
        # trusted constructor: ``flat`` has orthonormal canonical rows
        self.dom_dim = int(dom_dim)
        self.cod_dim = int(cod_dim)
        flat.setflags(write=False)
        self._flat = flat
        basis = flat.reshape(flat.shape[0], self.cod_dim, self.dom_dim)
        self.basis = basis

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dom_dim: int, cod_dim: int) -> "OperatorSubspace":
        return _zero(int(dom_dim), int(cod_dim))

    @classmethod
    def full(cls, dom_dim: int, cod_dim: int) -> "OperatorSubspace":
        return _full(int(dom_dim), int(cod_dim))

    @classmethod
    def scalar(cls, dim: int) -> "OperatorSubspace":
        """The span of the identity on C^dim."""
        return _scalar(int(dim))

    @classmethod
    def from_orthonormal(cls, mats, dom_dim: int, cod_dim: int) -> "OperatorSubspace":
        """Wrap a family that is already orthonormal, keeping it verbatim.

        Raises ``ShapeError`` if the shapes are wrong or the Gram matrix
        is not the identity within the compare tolerance.
        """
        _check_dims(dom_dim, cod_dim)
        arr = np.asarray(mats, dtype=complex)
        if arr.size == 0:
            return _zero(dom_dim, cod_dim)
        if arr.ndim != 3 or arr.shape[1:] != (cod_dim, dom_dim):
            raise ShapeError(
                f"basis matrices must have shape {(cod_dim, dom_dim)}, got {arr.shape[1:]}"
            )
        if not np.all(np.isfinite(arr)):
            raise ShapeError("basis entries must be finite")
        flat = arr.reshape(arr.shape[0], -1)
        gram = flat.conj() @ flat.T
        if np.linalg.norm(gram - np.eye(len(flat))) > compare_tol():
            raise ShapeError("basis is not orthonormal")
        return cls(flat.copy(), dom_dim, cod_dim)

    # -- basic properties ---------------------------------------------
    @property
    def dim(self) -> int:
        return self._flat.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.cod_dim, self.dom_dim)

    @property
    def flat(self) -> np.ndarray:
        """Basis as rows of vectorized matrices, shape ``(dim, cod*dom)``."""
        return self._flat

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.cod_dim * self.dom_dim

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the vectorized subspace."""
        return self._flat.T @ self._flat.conj()

    def project(self, flat: np.ndarray) -> np.ndarray:
        """Orthogonal projection of vectorized rows onto this subspace."""
        if self.dim == 0:
            return np.zeros_like(flat)
        return (flat @ self._flat.conj().T) @ self._flat

    def residual(self, flat: np.ndarray) -> float:
        """Frobenius norm of the component of ``flat`` outside the subspace."""
        flat = np.asarray(flat, dtype=complex).reshape(-1, self.cod_dim * self.dom_dim)
        return float(np.linalg.norm(flat - self.project(flat)))

    def contains_matrix(self, m) -> bool:
        m = np.asarray(m, dtype=complex)
        scale = max(np.linalg.norm(m), 1.0)
        return self.residual(m) < compare_tol() * scale

    def distance(self, other: "OperatorSubspace") -> float:
        """Frobenius distance between the two orthogonal projectors."""
        _same_shape(self, other)
        a = other.residual(self._flat) if self.dim else 0.0
        b = self.residual(other._flat) if other.dim else 0.0
        return float(np.hypot(a, b))

    # -- operators ----------------------------------------------------
    def __le__(self, other: "OperatorSubspace") -> bool:
        return contains(other, self)

    def __ge__(self, other: "OperatorSubspace") -> bool:
        return contains(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSubspace):
            return NotImplemented
        return equal(self, other)

    __hash__ = None

    def __and__(self, other):
        return meet(self, other)

    def __or__(self, other):
        return join(self, other)

    def __invert__(self):
        return complement(self)

    def __matmul__(self, other):
        return mul_spaces(self, other)

    def adjoint(self) -> "OperatorSubspace":
        return adjoint_space(self)

    def __repr__(self) -> str:
        return f"OperatorSubspace(dim={self.dim}, shape={self.shape})"


def _check_dims(dom_dim, cod_dim):
    if int(dom_dim) < 1 or int(cod_dim) < 1:
        raise ShapeError("operator spaces need positive dimensions")


@lru_cache(maxsize=None)
def _zero(dom_dim, cod_dim):
    _check_dims(dom_dim, cod_dim)
    return OperatorSubspace(np.zeros((0, dom_dim * cod_dim), dtype=complex), dom_dim, cod_dim)


@lru_cache(maxsize=None)
def _full(dom_dim, cod_dim):
    _check_dims(dom_dim, cod_dim)
    return OperatorSubspace(np.eye(dom_dim * cod_dim, dtype=complex), dom_dim, cod_dim)


@lru_cache(maxsize=None)
def _scalar(dim):
    _check_dims(dim, dim)
    row = np.eye(dim, dtype=complex).reshape(1, -1) / np.sqrt(dim)
    return OperatorSubspace(row, dim, dim)


def _same_shape(a: OperatorSubspace, b: OperatorSubspace):
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def _from_flat(flat: np.ndarray, dom_dim: int, cod_dim: int) -> OperatorSubspace:
    rows = _canonical_rows(flat)
    if rows.shape[0] == 0:
        return _zero(dom_dim, cod_dim)
    return OperatorSubspace(rows, dom_dim, cod_dim)


def matrix_unit(i: int, j: int, rows: int, cols: int | None = None) -> np.ndarray:
    """The matrix unit E_ij (zero-based) of the given shape."""
    cols = rows if cols is None else cols
    m = np.zeros((rows, cols), dtype=complex)
    m[i, j] = 1.0
    return m


def span(mats: Iterable, shape: tuple[int, int] | None = None) -> OperatorSubspace:
    """Canonical orthonormal basis of the linear span of ``mats``.

    ``shape`` is ``(cod_dim, dom_dim)``; it is required when ``mats`` is
    empty and checked against every matrix otherwise.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        if shape is None:
            raise ShapeError("the empty span needs an explicit shape")
        cod, dom = shape
        return OperatorSubspace.zero(dom, cod)
    first = mats[0].shape
    if len(first) != 2:
        raise ShapeError("span expects 2-d matrices")
    if shape is not None and tuple(shape) != first:
        raise ShapeError(f"expected shape {tuple(shape)}, got {first}")
    for m in mats:
        if m.shape != first:
            raise ShapeError(f"shape mismatch in span: {m.shape} vs {first}")
        if not np.all(np.isfinite(m)):
            raise ShapeError("matrix entries must be finite")
    cod, dom = first
    _check_dims(dom, cod)
    flat = np.stack(mats).reshape(len(mats), -1)
    return _from_flat(flat, dom, cod)


def contains(a: OperatorSubspace, b: OperatorSubspace) -> bool:
    """True iff ``b <= a`` (projector residual below the compare tolerance)."""
    _same_shape(a, b)
    if b.dim == 0:
        return True
    if b.dim > a.dim:
        return False
    return a.residual(b.flat) < compare_tol()


def equal(a: OperatorSubspace, b: OperatorSubspace) -> bool:
    _same_shape(a, b)
    if a.dim != b.dim:
        return False
    return a.distance(b) < compare_tol()


def join(a: OperatorSubspace, b: OperatorSubspace) -> OperatorSubspace:
    _same_shape(a, b)
    if a.dim == 0:
        return b
    if b.dim == 0:
        return a
    return _from_flat(np.vstack([a.flat, b.flat]), a.dom_dim, a.cod_dim)


def join_all(spaces: Sequence[OperatorSubspace], shape: tuple[int, int]) -> OperatorSubspace:
    cod, dom = shape
    parts = [s.flat for s in spaces if s.dim]
    if not parts:
        return OperatorSubspace.zero(dom, cod)
    if len(parts) == 1:
        return next(s for s in spaces if s.dim)
    return _from_flat(np.vstack(parts), dom, cod)


def meet(a: OperatorSubspace, b: OperatorSubspace) -> OperatorSubspace:
    """Intersection of two subspaces.

    The basis of ``a`` is projected off ``b``; the left singular vectors of
    that residual with singular value (sine of a principal angle) below the
    rank tolerance give the common directions.
    """
    _same_shape(a, b)
    if a.dim == 0 or b.dim == 0:
        return OperatorSubspace.zero(a.dom_dim, a.cod_dim)
    if a.dim > b.dim:
        a, b = b, a
    resid = a.flat - b.project(a.flat)
    u, s, _ = np.linalg.svd(resid, full_matrices=True)
    sing = np.zeros(a.dim)
    sing[: s.size] = s
    keep = sing <= rank_tol()
    if not keep.any():
        return OperatorSubspace.zero(a.dom_dim, a.cod_dim)
    coeffs = u[:, keep].conj().T
    return _from_flat(coeffs @ a.flat, a.dom_dim, a.cod_dim)


def complement(a: OperatorSubspace) -> OperatorSubspace:
    """Frobenius orthocomplement of ``a`` inside L(X, Y)."""
    n = a.dom_dim * a.cod_dim
    if a.dim == 0:
        return OperatorSubspace.full(a.dom_dim, a.cod_dim)
    if a.dim == n:
        return OperatorSubspace.zero(a.dom_dim, a.cod_dim)
    # x is orthogonal to every row b iff conj(B) x = 0
    _, _, vh = np.linalg.svd(a.flat.conj(), full_matrices=True)
    null = vh[a.dim:].conj()
    return _from_flat(null, a.dom_dim, a.cod_dim)


def mul_spaces(a: OperatorSubspace, b: OperatorSubspace) -> OperatorSubspace:
    """Span of all products ``x @ y`` with ``x`` in ``a`` and ``y`` in ``b``.

    ``a`` maps Y -> Z and ``b`` maps X -> Y.
    """
    if a.dom_dim != b.cod_dim:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    if a.dim == 0 or b.dim == 0:
        return OperatorSubspace.zero(b.dom_dim, a.cod_dim)
    prods = np.einsum("iab,jbc->ijac", a.basis, b.basis)
    return _from_flat(prods.reshape(a.dim * b.dim, -1), b.dom_dim, a.cod_dim)


def products_flat(a: OperatorSubspace, b: OperatorSubspace) -> np.ndarray:
    """Vectorized pairwise products, without taking a span."""
    prods = np.einsum("iab,jbc->ijac", a.basis, b.basis)
    return prods.reshape(a.dim * b.dim, -1)


def adjoint_space(a: OperatorSubspace) -> OperatorSubspace:
    """Span of the conjugate transposes."""
    if a.dim == 0:
        return OperatorSubspace.zero(a.cod_dim, a.dom_dim)
    adj = np.conj(np.transpose(a.basis, (0, 2, 1)))
    return _from_flat(adj.reshape(a.dim, -1), a.cod_dim, a.dom_dim)


def tensor_space(a: OperatorSubspace, b: OperatorSubspace) -> OperatorSubspace:
    """Span of ``kron(x, y)`` over basis pairs."""
    dom, cod = a.dom_dim * b.dom_dim, a.cod_dim * b.cod_dim
    if a.dim == 0 or b.dim == 0:
        return OperatorSubspace.zero(dom, cod)
    kr = np.einsum("iab,jcd->ijacbd", a.basis, b.basis)
    return _from_flat(kr.reshape(a.dim * b.dim, -1), dom, cod)


def marginal_factors(v: OperatorSubspace, dims: tuple[int, int, int, int]):
    """Slice a subspace of L(X1 (x) X2, Y1 (x) Y2) into its two marginals.

    ``dims = (x1, x2, y1, y2)``.  ``V1`` is spanned by
    ``(1 (x) <y2_j|) v (1 (x) |x2_i>)`` over basis elements ``v`` and
    standard basis vectors; ``V2`` symmetrically.  ``V <= V1 (x) V2``
    always holds.
    """
    x1, x2, y1, y2 = (int(d) for d in dims)
    if v.dom_dim != x1 * x2 or v.cod_dim != y1 * y2:
        raise ShapeError(
            f"subspace of shape {v.shape} does not factor as ({y1}*{y2}, {x1}*{x2})"
        )
    if v.dim == 0:
        return OperatorSubspace.zero(x1, y1), OperatorSubspace.zero(x2, y2)
    t = v.basis.reshape(v.dim, y1, y2, x1, x2)
    # first marginal: fix (y2, x2) indices -> (y1, x1) slices
    s1 = np.transpose(t, (0, 2, 4, 1, 3)).reshape(-1, y1 * x1)
    # second marginal: fix (y1, x1) -> (y2, x2) slices
    s2 = np.transpose(t, (0, 1, 3, 2, 4)).reshape(-1, y2 * x2)
    return _from_flat(s1, x1, y1), _from_flat(s2, x2, y2)
