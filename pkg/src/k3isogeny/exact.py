"""Exact integer/rational linear algebra: normal forms, kernels, solving, saturation.

Everything here works on plain lists/tuples of ints or fractions.Fraction.
No floating point is used anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


# ---------------------------------------------------------------------------
# basic matrix helpers


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(rows, cols):
    return [[0] * cols for _ in range(rows)]


def copy_matrix(a):
    return [list(row) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def mat_mul(a, b):
    if not a:
        return []
    n = len(b)
    bt = list(zip(*b))
    return [[sum(ra[k] * cb[k] for k in range(n)) for cb in bt] for ra in a]


def mat_vec(a, v):
    return [sum(row[k] * v[k] for k in range(len(v))) for row in a]


def int_matrix_or_none(a):
    """The same matrix with plain int entries, or None if any is non-integral.

    Useful as a fast path: int arithmetic avoids Fraction normalization.
    """
    out = []
    for row in a:
        r = []
        for x in row:
            if isinstance(x, int):
                r.append(x)
            else:
                f = Fraction(x)
                if f.denominator != 1:
                    return None
                r.append(f.numerator)
        out.append(r)
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[c * x for x in row] for row in a]


def mat_eq(a, b):
    if len(a) != len(b):
        return False
    return all(len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb))
               for ra, rb in zip(a, b))


def is_zero_matrix(a):
    return all(x == 0 for row in a for x in row)


def freeze(a):
    return tuple(tuple(x for x in row) for row in a)


def to_fraction_matrix(a):
    return [[Fraction(x) for x in row] for row in a]


def det(a):
    """Exact determinant via fraction-free-ish Gaussian elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = to_fraction_matrix(a)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        result *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return sign * result


def mat_inv(a):
    """Exact inverse of a square rational matrix."""
    n = len(a)
    m = to_fraction_matrix(a)
    inv = to_fraction_matrix(identity(n))
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        f = 1 / m[col][col]
        m[col] = [x * f for x in m[col]]
        inv[col] = [x * f for x in inv[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


# ---------------------------------------------------------------------------
# vector helpers


def vec_content(v):
    """gcd of the entries of an integer vector (0 for the zero vector)."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def clear_denominators(v):
    """Rational vector -> (primitive-direction integer vector scale, lcm) pair.

    Returns the integer vector d*v where d is the lcm of denominators.
    """
    v = [Fraction(x) for x in v]
    d = lcm(*(x.denominator for x in v)) if v else 1
    return [int(x * d) for x in v], d


def primitive_integer_vector(v):
    """Smallest integer multiple of a nonzero rational vector, divided by content."""
    w, _ = clear_denominators(v)
    g = vec_content(w)
    if g == 0:
        raise ValueError("zero vector has no primitive rescaling")
    return [x // g for x in w]


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms (column-style; leftmost-lowest pivoting)


def hnf(a):
    """Column-style Hermite normal form of an integer matrix.

    The result spans the same column lattice.  Pivots are positive, sit in
    strictly increasing rows, and entries to the left of a pivot in its row are
    reduced into [0, pivot).  Zero columns are dropped.
    """
    m = len(a)
    if m == 0:
        return []
    cols = [list(c) for c in zip(*a)]
    cols = [c for c in cols if any(x != 0 for x in c)]
    done = []
    row = 0
    while cols and row < m:
        cand = [c for c in cols if c[row] != 0]
        if not cand:
            row += 1
            continue
        # gcd-reduce all columns with a nonzero entry in this row into one pivot
        while len(cand) > 1:
            cand.sort(key=lambda c: abs(c[row]))
            piv = cand[0]
            for c in cand[1:]:
                q = c[row] // piv[row]
                for i in range(m):
                    c[i] -= q * piv[i]
            cand = [c for c in cand if c[row] != 0]
        piv = cand[0]
        if piv[row] < 0:
            for i in range(m):
                piv[i] = -piv[i]
        cols = [c for c in cols if c is not piv and any(x != 0 for x in c)]
        # reduce earlier pivots' entries in this row
        for c in done:
            q = c[row] // piv[row]
            if q:
                for i in range(m):
                    c[i] -= q * piv[i]
        done.append(piv)
        row += 1
    return [list(r) for r in zip(*done)] if done else [[] for _ in range(m)]


def snf(a):
    """Smith normal form with transforms: returns (d, u, v) with u*a*v = d.

    d is diagonal with d1 | d2 | ... , u and v are unimodular.
    """
    a = [[int(x) for x in row] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    for t in range(min(m, n)):
        while True:
            # leftmost-lowest nonzero pivot of minimal absolute value
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] != 0 and (best is None
                                         or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    add_row(i, t, a[i][t] // a[t][t])
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    add_col(j, t, a[t][j] // a[t][t])
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # enforce divisibility of the remaining block by the pivot
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, -1)  # row_t += row_offender, then restart
        if t < m and t < n and a[t][t] < 0:
            negate_row(t)
    return a, u, v


def invariant_factors(a):
    """Nonzero diagonal entries of the Smith form of a."""
    d, _, _ = snf(a)
    k = min(len(d), len(d[0]) if d else 0)
    return [d[i][i] for i in range(k) if d[i][i] != 0]


# ---------------------------------------------------------------------------
# solving and kernels over the rationals


def solve_and_kernel(a, y=None):
    """Exact solution set of a*x = y (or a*x = 0 when y is None).

    Returns (particular, kernel_basis); particular is None when inconsistent.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    mat = to_fraction_matrix(a)
    rhs = [Fraction(t) for t in y] if y is not None else [Fraction(0)] * m
    piv_cols = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        f = 1 / mat[r][col]
        mat[r] = [x * f for x in mat[r]]
        rhs[r] = rhs[r] * f
        for i in range(m):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * z for x, z in zip(mat[i], mat[r])]
                rhs[i] = rhs[i] - f * rhs[r]
        piv_cols.append(col)
        r += 1
    if any(rhs[i] != 0 for i in range(r, m)):
        return None, _kernel_from_rref(mat, piv_cols, n)
    particular = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        particular[col] = rhs[i]
    return particular, _kernel_from_rref(mat, piv_cols, n)


def _kernel_from_rref(mat, piv_cols, n):
    free = [j for j in range(n) if j not in piv_cols]
    basis = []
    for j in free:
        vec = [Fraction(0)] * n
        vec[j] = Fraction(1)
        for i, col in enumerate(piv_cols):
            vec[col] = -mat[i][j]
        basis.append(vec)
    return basis


def rational_kernel(a):
    """Basis of the rational kernel of a."""
    _, kern = solve_and_kernel(a)
    return kern


# ---------------------------------------------------------------------------
# saturation


def saturate(gens, ambient_rank):
    """Basis (list of columns) of the saturation of the span of integer vectors.

    The saturation is the smallest primitive submodule of Z^ambient_rank whose
    rational span contains the generators.  Returned in HNF for determinism.
    """
    gens = [list(g) for g in gens if any(x != 0 for x in g)]
    if not gens:
        return []
    a = [[g[i] for g in gens] for i in range(ambient_rank)]  # columns = gens
    d, u, _ = snf(a)
    rank = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i] != 0)
    u_inv = mat_inv(u)
    basis = [[int(u_inv[i][j]) for i in range(ambient_rank)] for j in range(rank)]
    h = hnf([[col[i] for col in basis] for i in range(ambient_rank)])
    return [list(c) for c in zip(*h)] if h and h[0] else []


def integer_kernel(a):
    """Basis of the saturated integer kernel {x in Z^n : a*x = 0}."""
    kern = rational_kernel(a)
    if not kern:
        return []
    n = len(kern[0])
    return saturate([primitive_integer_vector(v) for v in kern], n)


def integer_preimage_lattice(m_rational):
    """Basis of {x in Z^n : M*x is integral} for a rational matrix M.

    Returned as a list of column vectors spanning the (full-rank) preimage.
    """
    k = len(m_rational)
    n = len(m_rational[0]) if k else 0
    rows = to_fraction_matrix(m_rational)
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, x.denominator)
    nmat = [[int(x * d) for x in row] for row in rows]
    # x in the lattice iff exists integer y with N x - d y = 0
    stacked = [nmat[i] + [-d if j == i else 0 for j in range(k)] for i in range(k)]
    kern = integer_kernel(stacked)
    projected = [v[:n] for v in kern]
    h = hnf([[col[i] for col in projected] for i in range(n)])
    return [list(c) for c in zip(*h)] if h and h[0] else []
