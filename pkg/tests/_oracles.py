"""Independent symbolic curvature oracle (sympy) for cross-checking the numeric kernel.

Everything here is derived from the textbook definitions with sympy's own
differentiation, so it shares no code path with the package.
"""

from __future__ import annotations

import numpy as np
import sympy as sp


def christoffel_sym(g: sp.Matrix, coords):
    n = len(coords)
    ginv = g.inv()
    gamma = [[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                expr = sp.S.Zero
                for l in range(n):
                    expr += ginv[k, l] * (
                        sp.diff(g[l, j], coords[i])
                        + sp.diff(g[l, i], coords[j])
                        - sp.diff(g[i, j], coords[l])
                    )
                gamma[k][i][j] = sp.simplify(expr / 2)
    return gamma


def riemann_up_sym(g: sp.Matrix, coords):
    n = len(coords)
    gamma = christoffel_sym(g, coords)
    riem = [[[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for j in range(n):
            for k in range(n):
                for p in range(n):
                    expr = sp.diff(gamma[l][p][j], coords[k]) - sp.diff(gamma[l][k][j], coords[p])
                    for m in range(n):
                        expr += gamma[l][k][m] * gamma[m][p][j] - gamma[l][p][m] * gamma[m][k][j]
                    riem[l][j][k][p] = sp.simplify(expr)
    return riem


def riemann_down_sym(g: sp.Matrix, coords):
    n = len(coords)
    up = riemann_up_sym(g, coords)
    down = [[[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for j in range(n):
            for k in range(n):
                for p in range(n):
                    expr = sp.S.Zero
                    for m in range(n):
                        expr += g[l, m] * up[m][j][k][p]
                    down[l][j][k][p] = sp.simplify(expr)
    return down


def lambdify_rank3(tensor, coords):
    n = len(coords)
    fns = [[[sp.lambdify(coords, tensor[k][i][j], "numpy") for j in range(n)] for i in range(n)] for k in range(n)]

    def at(*point):
        return np.array([[[fns[k][i][j](*point) for j in range(n)] for i in range(n)] for k in range(n)], dtype=float)

    return at


def lambdify_rank4(tensor, coords):
    n = len(coords)
    fns = [
        [[[sp.lambdify(coords, tensor[l][j][k][p], "numpy") for p in range(n)] for k in range(n)] for j in range(n)]
        for l in range(n)
    ]

    def at(*point):
        return np.array(
            [[[[fns[l][j][k][p](*point) for p in range(n)] for k in range(n)] for j in range(n)] for l in range(n)],
            dtype=float,
        )

    return at
