"""Exact dense linear algebra over the engine's scalar fields.

Matrices are lists of row lists of scalars.  Everything here relies only on
field operations (add, mul, inv, conj, is_zero), so the same code serves the
Gaussian-rational and cyclotomic domains exactly and the float domain up to
its tolerance.
"""

from __future__ import annotations

from fractions import Fraction


def _rref(rows, field):
    """Reduced row echelon form; returns (matrix, pivot_columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return mat, []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(mat)):
            if not mat[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = mat[r][c].inv()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(rows, field) -> int:
    _, pivots = _rref(rows, field)
    return len(pivots)


def nullspace(rows, ncols: int, field):
    """Basis of the right kernel, one vector per pivot-free column, in
    column order (so callers can deterministically take the first)."""
    mat, pivots = _rref(rows, field)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        vec = [field.zero] * ncols
        vec[f] = field.one
        for r, c in enumerate(pivots):
            vec[c] = -mat[r][f]
        basis.append(vec)
    return basis


def integer_kernel_vector(int_rows, ncols: int):
    """First kernel vector of an integer matrix, scaled to a primitive
    integer vector whose first nonzero entry is positive; None if injective."""
    from .scalars import RATIONAL

    rows = [[RATIONAL.from_fraction(Fraction(x)) for x in row] for row in int_rows]
    basis = nullspace(rows, ncols, RATIONAL)
    if not basis:
        return None
    vec = [s.re for s in basis[0]]
    import math

    denom = math.lcm(*(f.denominator for f in vec))
    ints = [int(f * denom) for f in vec]
    g = math.gcd(*(abs(v) for v in ints))
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def is_positive_semidefinite(matrix, field) -> bool:
    """Exact PSD test for a Hermitian matrix by symmetric pivoting.

    Supports Gaussian-rational entries, where every pivot of a Hermitian
    matrix is an exact rational; requires matrix[i][j] == conj(matrix[j][i]).
    """
    from .scalars import RationalComplex

    n = len(matrix)
    work = [[matrix[i][j] for j in range(n)] for i in range(n)]
    for k in range(n):
        d = work[k][k]
        if not isinstance(d, RationalComplex):
            raise TypeError("exact PSD pivoting needs rational scalars")
        if d.im != 0 or d.re < 0:
            return False
        if d.is_zero():
            # a PSD matrix with zero diagonal entry has a zero row/column
            if any(not work[k][j].is_zero() for j in range(k, n)):
                return False
            continue
        inv = d.inv()
        for i in range(k + 1, n):
            if work[i][k].is_zero():
                continue
            f = work[i][k] * inv
            for j in range(k + 1, n):
                work[i][j] = work[i][j] - f * work[k][j]
            work[i][k] = field.zero
    return True


# -- sparse maps ---------------------------------------------------------
#
# Sparse matrices are dicts {(row, col): scalar} with implied zeros.


def sparse_matmul(a: dict, b: dict) -> dict:
    by_col: dict[int, list] = {}
    for (r, c), v in a.items():
        by_col.setdefault(c, []).append((r, v))
    out: dict = {}
    for (rb, cb), vb in b.items():
        for ra, va in by_col.get(rb, ()):
            key = (ra, cb)
            cur = out.get(key)
            out[key] = va * vb if cur is None else cur + va * vb
    return {k: v for k, v in out.items() if not v.is_zero()}


def sparse_conj_transpose(a: dict) -> dict:
    return {(c, r): v.conj() for (r, c), v in a.items()}


def sparse_equal(a: dict, b: dict) -> bool:
    for key in a.keys() | b.keys():
        va, vb = a.get(key), b.get(key)
        if va is None:
            if not vb.is_zero():
                return False
        elif vb is None:
            if not va.is_zero():
                return False
        elif not (va - vb).is_zero():
            return False
    return True


def sparse_identity(n: int, field) -> dict:
    one = field.one
    return {(i, i): one for i in range(n)}
