"""Exact phase-one simplex (feasibility of A x = b, x >= 0) with Bland's rule."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Vector, as_vector


def phase_one(a: Matrix, b: Sequence, max_pivots: int = 100_000) -> Vector | None:
    """Return some x >= 0 with a x = b, or None when the system is infeasible.

    Tableau method over Fractions. One artificial variable per row; the
    artificial objective is minimised with Bland's smallest-index rule, which
    cannot cycle.
    """
    rhs = as_vector(b)
    m, n = a.rows, a.cols
    if len(rhs) != m:
        raise ValueError("rhs length does not match row count")

    # rows scaled so rhs >= 0; columns n..n+m-1 are artificials
    tab: list[list[Fraction]] = []
    for i in range(m):
        sign = -1 if rhs[i] < 0 else 1
        row = [sign * v for v in a.row(i)]
        row += [Fraction(int(i == k)) for k in range(m)]
        row.append(sign * rhs[i])
        tab.append(row)
    basis = list(range(n, n + m))
    width = n + m

    # reduced costs of the artificial objective sum(artificials)
    cost = [Fraction(0)] * (width + 1)
    for row in tab:
        for j in range(n):
            cost[j] -= row[j]
        cost[width] -= row[width]

    for _ in range(max_pivots):
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        best = None
        for i, row in enumerate(tab):
            if row[entering] > 0:
                ratio = row[width] / row[entering]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # objective bounded below by 0, so this cannot happen for phase one
            raise ArithmeticError("phase-one objective unbounded")
        _pivot(tab, cost, best[1], entering)
        basis[best[1]] = entering
    else:
        raise RuntimeError("phase-one simplex exceeded pivot limit")

    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tab[i][width]
    return tuple(x)


def _pivot(tab: list[list[Fraction]], cost: list[Fraction], r: int, c: int) -> None:
    p = tab[r][c]
    tab[r] = [v / p for v in tab[r]]
    prow = tab[r]
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            tab[i] = [x - f * y for x, y in zip(row, prow)]
    if cost[c] != 0:
        f = cost[c]
        cost[:] = [x - f * y for x, y in zip(cost, prow)]
