"""Information complexity from eigenvalues.

n(eps, d) is the number of eigenvalues strictly above eps^2 * CRI_d, which
for a non-increasing sequence equals the least n with
lambda(d, n+1) <= eps^2 * CRI_d.  Two independent routes are provided: a
monotonicity-exploiting search and an ordering-free counting scan; their
exact agreement is a tested invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigenmodel import EigenModel, ErrorCriterion, cri, eigenvalue, eigenvalues, support
from .errors import UnboundedError

__all__ = [
    "J_MAX_DEFAULT",
    "ComplexityQuery",
    "ComplexityResult",
    "info_complexity",
    "count_oracle",
    "nth_minimal_error",
]

J_MAX_DEFAULT = 1 << 26


@dataclass(frozen=True)
class ComplexityQuery:
    d: int
    eps: float
    criterion: ErrorCriterion

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not (self.eps > 0):
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class ComplexityResult:
    n: int
    capped: bool
    method: str

    def as_dict(self) -> dict:
        return {"n": self.n, "capped": self.capped, "method": self.method}


def _threshold(model: EigenModel, query: ComplexityQuery) -> float:
    return query.eps * query.eps * cri(model, query.d, query.criterion)


def info_complexity(
    model: EigenModel, query: ComplexityQuery, j_max: int = J_MAX_DEFAULT
) -> ComplexityResult:
    """Least n with lambda(d, n+1) <= eps^2 * CRI_d (ties count as satisfied).

    Runs an exponential search for the first index at or below the threshold
    followed by a binary search.  Raises :class:`UnboundedError` when no such
    index exists up to ``j_max``.
    """
    d = query.d
    thr = _threshold(model, query)
    rank = support(model, d)

    def lam(j: int) -> float:
        return eigenvalue(model, d, j)

    if rank is not None:
        if lam(rank) > thr:
            return ComplexityResult(n=rank, capped=True, method="search")
        hi_limit = rank
    else:
        hi_limit = j_max

    if lam(1) <= thr:
        return ComplexityResult(n=0, capped=False, method="search")

    lo, hi = 1, 1
    while lam(hi) > thr:
        lo = hi
        if hi >= hi_limit:
            raise UnboundedError(d, query.eps, j_max)
        hi = min(hi * 2, hi_limit)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if lam(mid) <= thr:
            hi = mid
        else:
            lo = mid
    return ComplexityResult(n=hi - 1, capped=False, method="search")


def count_oracle(
    model: EigenModel, query: ComplexityQuery, j_max: int = 100_000
) -> ComplexityResult:
    """Count eigenvalues strictly above the threshold by linear scan.

    The count never consults the ordering, so it doubles as an independent
    oracle for :func:`info_complexity` on validated (non-increasing) models.
    """
    d = query.d
    thr = _threshold(model, query)
    rank = support(model, d)
    stop = rank if rank is not None else j_max
    count = 0
    chunk = 1 << 16
    for j0 in range(1, stop + 1, chunk):
        j1 = min(j0 + chunk, stop + 1)
        vals = eigenvalues(model, d, np.arange(j0, j1, dtype=np.int64))
        count += int(np.count_nonzero(vals > thr))
    if rank is not None:
        return ComplexityResult(n=count, capped=(count == rank), method="count")
    if count == stop:
        raise UnboundedError(d, query.eps, j_max)
    return ComplexityResult(n=count, capped=False, method="count")


def nth_minimal_error(model: EigenModel, d: int, n: int) -> float:
    """The error left after n optimally chosen functionals: sqrt(lambda(d, n+1))."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rank = support(model, d)
    if rank is not None and n + 1 > rank:
        return 0.0
    return math.sqrt(eigenvalue(model, d, n + 1))
