"""Exact rational linear algebra: row echelon, integer kernel bases, simplex."""

from fractions import Fraction
from math import gcd


def rref(rows):
    """Reduced row echelon form over the rationals.

    Takes an iterable of rows (numbers convertible to Fraction), scans
    columns left to right, and returns (reduced_rows, pivot_columns).
    """
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        piv = mat[r][c]
        mat[r] = [v / piv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows):
    return len(rref(rows)[0])


def in_row_span(rows, vec):
    """Whether vec lies in the row space of rows (exact)."""
    base = rank(rows)
    return rank(list(rows) + [list(vec)]) == base


def scaled_integers(vec):
    """Integer multiple of a rational vector by a positive scalar (orientation kept)."""
    scale = 1
    for v in vec:
        d = Fraction(v).denominator
        scale = scale * d // gcd(scale, d)
    ints = [int(Fraction(v) * scale) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
        if g == 1:
            break
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _primitive(vec):
    """Scale a rational vector to a primitive integer vector, first nonzero positive."""
    den = 1
    for v in vec:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v != 0), 0)
    if lead < 0:
        ints = [-v for v in ints]
    return ints


def integer_kernel_basis(rows):
    """Primitive integer basis of the kernel of a rational matrix.

    One basis vector per free column of the reduced echelon form, in
    column order, so the output is deterministic for a fixed input.
    """
    red, pivots = rref(rows)
    ncols = len(rows[0]) if rows else 0
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -red[i][f]
        basis.append(_primitive(vec))
    return basis


def solve_linear(rows, rhs):
    """One exact solution x of rows.x = rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    ncols = len(rows[0]) if rows else 0
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = red[i][ncols]
    return x


class Unbounded(Exception):
    pass


def _pivot(tab, basis, r, c):
    piv = tab[r][c]
    tab[r] = [v / piv for v in tab[r]]
    row_r = tab[r]
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            tab[i] = [a - f * b for a, b in zip(row, row_r)]
    basis[r] = c


def _run_simplex(tab, basis, ncols):
    """Pivot to optimality with Bland's rule. Objective row is last."""
    m = len(tab) - 1
    while True:
        obj = tab[m]
        c = next((j for j in range(ncols) if obj[j] < 0), None)
        if c is None:
            return
        best = None
        for i in range(m):
            if tab[i][c] > 0:
                ratio = tab[i][ncols] / tab[i][c]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded
        _pivot(tab, basis, best[1], c)


def lp_solve(a_rows, b, c):
    """Maximize c.x subject to a_rows.x = b, x >= 0, in exact arithmetic.

    Returns (value, x) with Fractions, or None if infeasible.
    """
    m = len(a_rows)
    n = len(c)
    rows = []
    rhs = []
    for row, bv in zip(a_rows, b):
        row = [Fraction(v) for v in row]
        bv = Fraction(bv)
        if bv < 0:
            row = [-v for v in row]
            bv = -bv
        rows.append(row)
        rhs.append(bv)
    # Phase 1 with one artificial variable per row.
    total = n + m
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i] + art + [rhs[i]])
    obj = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    tab.append(obj)
    basis = [n + i for i in range(m)]
    for i in range(m):
        tab[m] = [a - b_ for a, b_ in zip(tab[m], tab[i])]
    _run_simplex(tab, basis, total)
    if -tab[m][total] != 0:
        return None
    # Remove artificials from the basis; drop rows that are redundant.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            c_out = next((j for j in range(n) if tab[i][j] != 0), None)
            if c_out is None:
                continue
            _pivot(tab, basis, i, c_out)
        keep.append(i)
    tab = [[tab[i][j] for j in range(n)] + [tab[i][total]] for i in keep] + [
        [-Fraction(v) for v in c] + [Fraction(0)]
    ]
    basis = [basis[i] for i in keep]
    for i in range(len(basis)):
        f = tab[-1][basis[i]]
        if f != 0:
            tab[-1] = [a - f * b_ for a, b_ in zip(tab[-1], tab[i])]
    _run_simplex(tab, basis, n)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = tab[i][n]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return value, x


def lp_feasible(a_rows, b):
    """A nonnegative solution of a_rows.x = b, or None."""
    n = len(a_rows[0]) if a_rows else 0
    res = lp_solve(a_rows, b, [Fraction(0)] * n)
    return None if res is None else res[1]
