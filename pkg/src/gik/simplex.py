"""Exact dense-tableau simplex for max c.x s.t. A x <= b, x >= 0, b >= 0."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Unbounded(ArithmeticError):
    pass


def maximize(c: Sequence[Fraction], A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
             ) -> tuple[Fraction, list[Fraction]]:
    """Primal simplex from the slack basis with Bland's rule.

    Returns the optimal value and an optimal basic solution.  Requires b >= 0
    so the all-slack basis is feasible.
    """
    m, nv = len(A), len(c)
    if any(bi < 0 for bi in b):
        raise ValueError("right-hand side must be non-negative")
    width = nv + m
    rows: list[list[Fraction]] = []
    for r in range(m):
        row = [Fraction(x) for x in A[r]] + [Fraction(0)] * m + [Fraction(b[r])]
        row[nv + r] = Fraction(1)
        rows.append(row)
    obj = [-Fraction(x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [nv + r for r in range(m)]

    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(m):
            a = rows[r][enter]
            if a > 0:
                ratio = rows[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            raise Unbounded("objective is unbounded")
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [x / piv for x in prow]
            rows[leave] = prow
        nz = [j for j, x in enumerate(prow) if x != 0]
        for r in range(m):
            if r == leave:
                continue
            f = rows[r][enter]
            if f != 0:
                row = rows[r]
                for j in nz:
                    row[j] -= f * prow[j]
        f = obj[enter]
        for j in nz:
            obj[j] -= f * prow[j]
        basis[leave] = enter

    x = [Fraction(0)] * nv
    for r, j in enumerate(basis):
        if j < nv:
            x[j] = rows[r][-1]
    return obj[-1], x


def tableau_text(c, A, b) -> str:
    """Human-readable dump of an LP in the form used by :func:`maximize`."""
    lines = ["max  " + "  ".join(str(x) for x in c)]
    for row, rhs in zip(A, b):
        lines.append("s.t. " + "  ".join(str(x) for x in row) + f"  <= {rhs}")
    return "\n".join(lines)
