"""Exact matrix permanents.

``permanent_ryser`` is the production kernel (Ryser inclusion-exclusion over
column subsets visited in Gray-code order, O(2^n n)). ``permanent_naive`` sums
over all n! permutations and only exists as a test oracle.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numba
import numpy as np

from .errors import ShapeError, SizeLimitError

RYSER_MAX_N = 30
NAIVE_MAX_N = 10
# compensated summation switches on from this order
KAHAN_MIN_N = 16


@numba.njit(cache=True, nogil=True)
def _ryser_gray(a, compensated):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    carry = 0.0 + 0.0j
    subset = 0
    parity = 0
    for k in range(1, 1 << n):
        # column toggled between consecutive Gray codes = lowest set bit of k
        j = 0
        t = k
        while (t & 1) == 0:
            t >>= 1
            j += 1
        if (subset >> j) & 1:
            for i in range(n):
                row_sums[i] -= a[i, j]
        else:
            for i in range(n):
                row_sums[i] += a[i, j]
        subset ^= 1 << j
        parity ^= 1
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= row_sums[i]
        if parity:
            prod = -prod
        if compensated:
            y = prod - carry
            s = total + y
            carry = (s - total) - y
            total = s
        else:
            total += prod
    if n & 1:
        total = -total
    return total


def _as_square(m, what: str) -> np.ndarray:
    a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} needs a square matrix, got shape {a.shape}")
    return a


def permanent_ryser(m) -> complex:
    """Permanent of a square complex matrix of order at most 30."""
    a = _as_square(m, "permanent")
    n = a.shape[0]
    if n > RYSER_MAX_N:
        raise SizeLimitError(f"exact permanent limited to n <= {RYSER_MAX_N}, got {n}")
    return complex(_ryser_gray(a, n >= KAHAN_MIN_N))


permanent = permanent_ryser


def permanent_naive(m) -> complex:
    """Permutation-sum permanent, n <= 10. Test oracle only."""
    a = _as_square(m, "permanent")
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise SizeLimitError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    rows = range(n)
    return complex(sum(math.prod(a[i, p[i]] for i in rows) for p in itertools.permutations(rows)))


def permanent_with_repetitions(m, col_multiplicities: Sequence[int]) -> complex:
    """Permanent of ``m`` with column j repeated ``col_multiplicities[j]`` times.

    Columns with multiplicity 0 are dropped, so the result is the permanent of
    the square matrix that appears in bunched-outcome amplitudes.
    """
    a = np.asarray(m, dtype=np.complex128)
    mult = np.asarray(col_multiplicities, dtype=int)
    if a.ndim != 2 or mult.ndim != 1 or mult.shape[0] != a.shape[1]:
        raise ShapeError(f"need one multiplicity per column ({a.shape[1]}), got {mult.shape}")
    if np.any(mult < 0) or int(mult.sum()) != a.shape[0]:
        raise ShapeError(
            f"column multiplicities must be non-negative and sum to the row count "
            f"{a.shape[0]}, got sum {int(mult.sum())}"
        )
    return permanent_ryser(np.repeat(a, mult, axis=1))
