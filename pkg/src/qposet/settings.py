"""Numerical tolerances.

Two thresholds drive every decision in the package:

* ``rank`` -- a singular value counts toward a rank when it exceeds
  ``rank * max(largest singular value, 1)``.  The same number is the
  absolute cut-off for kernel/intersection decisions on orthonormal data.
* ``compare`` -- containment and equality of subspaces pass when the
  projector residual (Frobenius norm) is below this value.

Both live in context variables so a caller (or the CLI ``--tol`` flag) can
override them for a block of code without threading arguments everywhere.
"""

from contextlib import contextmanager
from contextvars import ContextVar

DEFAULT_RANK_TOL = 1e-9
DEFAULT_COMPARE_TOL = 1e-8

_rank = ContextVar("qposet_rank_tol", default=DEFAULT_RANK_TOL)
_compare = ContextVar("qposet_compare_tol", default=DEFAULT_COMPARE_TOL)


def rank_tol() -> float:
    return _rank.get()


def compare_tol() -> float:
    return _compare.get()


@contextmanager
def tolerances(rank: float | None = None, compare: float | None = None):
    """Temporarily override the numerical thresholds."""
    tokens = []
    if rank is not None:
        if not rank > 0:
            raise ValueError("rank tolerance must be positive")
        tokens.append((_rank, _rank.set(float(rank))))
    if compare is not None:
        if not compare > 0:
            raise ValueError("compare tolerance must be positive")
        tokens.append((_compare, _compare.set(float(compare))))
    try:
        yield
    finally:
        for var, token in reversed(tokens):
            var.reset(token)
