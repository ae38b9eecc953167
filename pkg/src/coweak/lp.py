"""Exact feasibility of ``A x = b, x >= 0`` over the rationals.

Phase one of the simplex method on a dense rational tableau, with
Bland's rule so that degenerate pivots cannot cycle.  Problems here have a
handful of rows and columns, so density is not a concern.  Arithmetic runs on
``gmpy2.mpq`` when available (same exact semantics, much faster than
``Fraction``) and results are handed back as ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction


def feasible(A: Sequence[Sequence], b: Sequence) -> list | None:
    """Return a nonnegative rational solution of ``A x = b``, or ``None``."""
    m = len(b)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    rows = []
    for i in range(m):
        r = [_q(v) for v in A[i]]
        bi = _q(b[i])
        if bi < 0:
            r = [-v for v in r]
            bi = -bi
        # artificial variable for row i sits in column n + i
        rows.append(r + [Q(int(j == i)) for j in range(m)] + [bi])
    width = n + m
    basis = [n + i for i in range(m)]
    # objective: minimise the sum of artificials, kept as reduced costs
    cost = [Q(0)] * (width + 1)
    for r in rows:
        for j in range(n):
            cost[j] -= r[j]
        cost[width] -= r[width]

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[width] / r[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unbounded direction; cannot happen for phase one
            break
        _pivot(rows, cost, leave, enter)
        basis[leave] = enter

    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            v = rows[i][width]
            x[j] = Fraction(int(v.numerator), int(v.denominator))
    return x


def _q(v):
    if isinstance(v, Fraction):
        return Q(v.numerator, v.denominator)
    return Q(v)


def _pivot(rows, cost, leave, enter):
    pr = rows[leave]
    p = pr[enter]
    if p != 1:
        pr[:] = [v / p for v in pr]
    for i, r in enumerate(rows):
        if i != leave and r[enter] != 0:
            f = r[enter]
            r[:] = [a - f * c for a, c in zip(r, pr)]
    f = cost[enter]
    if f != 0:
        cost[:] = [a - f * c for a, c in zip(cost, pr)]
