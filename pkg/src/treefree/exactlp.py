"""Dense two-phase simplex over ``Fraction`` with Bland's rule.

Solves ``maximize c.x  subject to  A x <= b, x >= 0`` exactly.  Small by
design: it backs the fractional-chromatic oracle on graphs of at most 16
vertices, where a few hundred columns is the worst case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


@dataclass
class LPSolution:
    value: Fraction
    x: list[Fraction]
    dual: list[Fraction]


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPSolution:
    m, n = len(A), len(c)
    F = Fraction
    # Columns: 0..n-1 originals, n..n+m-1 slacks, n+m artificial.
    width = n + m + 1
    rows = []
    for i in range(m):
        row = [F(v) for v in A[i]] + [F(0)] * m + [F(-1)]
        row[n + i] = F(1)
        rows.append(row)
    rhs = [F(v) for v in b]
    basis = [n + i for i in range(m)]
    art = n + m

    if m and min(rhs) < 0:
        obj = [F(0)] * width
        obj[art] = F(-1)
        r = min(range(m), key=lambda i: (rhs[i], i))
        obj_val = _pivot(rows, rhs, basis, obj, F(0), r, art)
        obj_val = _run(rows, rhs, basis, obj, obj_val, allowed=width)
        if obj_val < 0:
            raise Infeasible
        if art in basis:
            r = basis.index(art)
            col = next((j for j in range(art) if rows[r][j] != 0), None)
            if col is not None:
                _pivot(rows, rhs, basis, obj, obj_val, r, col)
    for row in rows:
        row[art] = F(0)

    obj = [F(v) for v in c] + [F(0)] * (m + 1)
    obj_val = F(0)
    for i, j in enumerate(basis):
        if obj[j] != 0:
            coef = obj[j]
            obj = [o - coef * a for o, a in zip(obj, rows[i])]
            obj_val += coef * rhs[i]
    obj_val = _run(rows, rhs, basis, obj, obj_val, allowed=art)

    x = [F(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rhs[i]
    dual = [-obj[n + i] for i in range(m)]
    return LPSolution(obj_val, x, dual)


def _run(rows, rhs, basis, obj, obj_val, allowed):
    # ``obj`` holds reduced costs; optimal when none is positive.
    while True:
        col = next((j for j in range(allowed) if obj[j] > 0), None)
        if col is None:
            return obj_val
        best = None
        for i, row in enumerate(rows):
            a = row[col]
            if a > 0:
                ratio = rhs[i] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded
        obj_val = _pivot(rows, rhs, basis, obj, obj_val, best[1], col)


def _pivot(rows, rhs, basis, obj, obj_val, r, col):
    prow = rows[r]
    a = prow[col]
    if a != 1:
        prow[:] = [v / a for v in prow]
        rhs[r] /= a
    for i, row in enumerate(rows):
        if i != r and row[col] != 0:
            f = row[col]
            row[:] = [u - f * v for u, v in zip(row, prow)]
            rhs[i] -= f * rhs[r]
    f = obj[col]
    if f != 0:
        obj[:] = [u - f * v for u, v in zip(obj, prow)]
        obj_val = obj_val + f * rhs[r]
    basis[r] = col
    return obj_val
