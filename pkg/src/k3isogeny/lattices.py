"""Integral lattices with symmetric bilinear forms: K3/Mukai building blocks.

A Lattice is a free Z-module of finite rank with an integral symmetric Gram
matrix.  Sublattices are given by a basis matrix in parent coordinates, with
index and quotient invariants read off the Smith normal form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .exact import (
    det,
    freeze,
    hnf,
    integer_kernel,
    invariant_factors,
    mat_mul,
    mat_vec,
    snf,
    to_fraction_matrix,
    transpose,
)


class DegenerateLatticeError(ValueError):
    """Raised when an operation needs a nondegenerate Gram matrix."""


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]
    label: str | None = None

    def __post_init__(self):
        g = freeze([[int(x) for x in row] for row in self.gram])
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")

    @property
    def rank(self):
        return len(self.gram)

    def pairing(self, x, y):
        """Bilinear form (x.y); exact, accepts rational vectors."""
        gx = mat_vec([list(r) for r in self.gram], list(x))
        return sum(Fraction(a) * b for a, b in zip(y, gx))

    def square(self, x):
        return self.pairing(x, x)

    def determinant(self):
        return det([list(r) for r in self.gram])

    def basis_vector(self, i):
        return [1 if j == i else 0 for j in range(self.rank)]

    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))


@dataclass(frozen=True)
class Sublattice:
    parent: Lattice
    basis: tuple[tuple[int, ...], ...]  # columns = generators in parent coords
    index: int | None = field(default=None)  # None means infinite
    quotient_invariants: tuple[int, ...] = ()

    @property
    def rank(self):
        return len(self.basis[0]) if self.basis and self.basis[0] else 0

    def basis_columns(self):
        return [list(c) for c in zip(*self.basis)] if self.rank else []

    def gram(self):
        b = [list(row) for row in self.basis]
        return mat_mul(mat_mul(transpose(b), [list(r) for r in self.parent.gram]), b)

    def as_lattice(self, label=None):
        return Lattice(freeze(self.gram()), label=label)

    def contains(self, x):
        """Membership of an integer vector of the parent."""
        from .exact import solve_and_kernel
        if self.rank == 0:
            return all(v == 0 for v in x)
        sol, _ = solve_and_kernel([list(r) for r in self.basis], list(x))
        return sol is not None and all(c.denominator == 1 for c in sol)


# ---------------------------------------------------------------------------
# standard lattices

_U_GRAM = ((0, -1), (-1, 0))

# E8 as the T(2,3,5) tree: center node 0, arms {1}, {2,3}, {4,5,6,7}
_E8_EDGES = [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 7)]


def _e8_minus_gram():
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = -2
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = 1
    return freeze(g)


_NAME_RE = re.compile(r"^U\((-?\d+)\)$")


def standard_lattice(name):
    """U, U(n), A1(-1), E8(-1), K3, or Mukai by name."""
    if name == "U":
        return Lattice(_U_GRAM, label="U")
    m = _NAME_RE.match(name)
    if m:
        n = int(m.group(1))
        if n == 0:
            raise ValueError("U(0) is degenerate")
        return Lattice(((0, -n), (-n, 0)), label=name)
    if name == "A1(-1)":
        return Lattice(((-2,),), label="A1(-1)")
    if name == "E8(-1)":
        return Lattice(_e8_minus_gram(), label="E8(-1)")
    if name == "K3":
        u = standard_lattice("U")
        e8 = standard_lattice("E8(-1)")
        return direct_sum(u, u, u, e8, e8, label="K3")
    if name == "Mukai":
        return direct_sum(standard_lattice("K3"), standard_lattice("U"), label="Mukai")
    raise ValueError(f"unknown standard lattice {name!r}")


def direct_sum(*lattices, label=None):
    """Block-diagonal direct sum."""
    n = sum(lat.rank for lat in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for lat in lattices:
        for i in range(lat.rank):
            for j in range(lat.rank):
                g[off + i][off + j] = lat.gram[i][j]
        off += lat.rank
    return Lattice(freeze(g), label=label)


def twisted_hyperbolic_gram(n):
    return ((0, -n), (-n, 0))


def is_twisted_hyperbolic(gram, n):
    """Recognize U(n) up to the integral base change f -> -f.

    Accepts [[0, n], [n, 0]] and [[0, -n], [-n, 0]].
    """
    g = [list(row) for row in gram]
    if len(g) != 2 or any(len(r) != 2 for r in g):
        return False
    if g[0][0] != 0 or g[1][1] != 0 or g[0][1] != g[1][0]:
        return False
    return abs(g[0][1]) == abs(n)


# ---------------------------------------------------------------------------
# sublattice calculus


def sublattice_from_generators(parent, gens):
    """Sublattice spanned by integer generators; basis via HNF, data via SNF."""
    gens = [list(g) for g in gens]
    m = parent.rank
    cols = [g for g in gens if any(x != 0 for x in g)]
    if not cols:
        return Sublattice(parent, freeze([[] for _ in range(m)]) if m else (),
                          index=None if m else 1, quotient_invariants=())
    a = [[g[i] for g in cols] for i in range(m)]
    h = hnf(a)
    basis_cols = [list(c) for c in zip(*h)]
    return _sublattice_from_basis(parent, basis_cols)


def _sublattice_from_basis(parent, basis_cols):
    m = parent.rank
    r = len(basis_cols)
    a = [[basis_cols[j][i] for j in range(r)] for i in range(m)]
    invs = invariant_factors(a) if r else []
    finite = tuple(d for d in invs if d != 1)
    index = prod(finite) if r == m else None
    return Sublattice(parent, freeze(a), index=index, quotient_invariants=finite)


def sublattice_from_columns(parent, basis_cols):
    """Sublattice with a prescribed (independent) column basis, data via SNF."""
    if not basis_cols:
        m = parent.rank
        return Sublattice(parent, freeze([[] for _ in range(m)]),
                          index=None if m else 1, quotient_invariants=())
    return _sublattice_from_basis(parent, [list(c) for c in basis_cols])


def full_sublattice(parent):
    from .exact import identity
    return _sublattice_from_basis(parent, [list(c) for c in zip(*identity(parent.rank))])


def orthogonal_complement(parent, sub):
    """Primitive sublattice {x : (x.s) = 0 for all s in sub}."""
    if sub.rank == 0:
        return full_sublattice(parent)
    b = [list(row) for row in sub.basis]
    rows = mat_mul(transpose(b), [list(r) for r in parent.gram])
    kern = integer_kernel(rows)
    return _sublattice_from_basis(parent, kern)


def is_primitive(parent, sub):
    """True iff parent/sub is torsion-free."""
    return all(d == 1 for d in sub.quotient_invariants) or sub.rank == 0


def sublattices_equal(s1, s2):
    """Same submodule of the same parent (bases both in HNF by construction)."""
    if s1.parent.gram != s2.parent.gram or s1.rank != s2.rank:
        return False
    h1 = hnf([list(r) for r in s1.basis]) if s1.rank else []
    h2 = hnf([list(r) for r in s2.basis]) if s2.rank else []
    return h1 == h2


# ---------------------------------------------------------------------------
# invariants


def signature(lat):
    """(p, q) by exact rational congruence diagonalization."""
    n = lat.rank
    if n == 0:
        return (0, 0)
    if lat.determinant() == 0:
        raise DegenerateLatticeError("signature needs a nondegenerate gram matrix")
    a = to_fraction_matrix([list(r) for r in lat.gram])
    p = q = 0
    for i in range(n):
        if a[i][i] == 0:
            j = next((k for k in range(i + 1, n) if a[k][k] != 0), None)
            if j is not None:
                for row in a:
                    row[i], row[j] = row[j], row[i]
                a[i], a[j] = a[j], a[i]
            else:
                j = next(k for k in range(i + 1, n) if a[i][k] != 0)
                # add row/col j to i; new diagonal entry is 2*a[i][j] != 0
                for k in range(n):
                    a[i][k] += a[j][k]
                for k in range(n):
                    a[k][i] += a[k][j]
        piv = a[i][i]
        if piv > 0:
            p += 1
        else:
            q += 1
        for r in range(i + 1, n):
            if a[r][i] != 0:
                f = a[r][i] / piv
                for k in range(n):
                    a[r][k] -= f * a[i][k]
                for k in range(n):
                    a[k][r] -= f * a[k][i]
    return (p, q)


@dataclass(frozen=True)
class DiscriminantGroup:
    invariants: tuple[int, ...]           # invariant factors > 1 of L*/L
    quadratic_values: tuple[Fraction, ...]  # q(g_i) in Q/2Z, representatives in [0,2)
    order: int


def discriminant_group(lat):
    """Invariant factors of L*/L with the induced Q/2Z quadratic form."""
    if lat.determinant() == 0:
        raise DegenerateLatticeError("discriminant group needs det != 0")
    g = [list(r) for r in lat.gram]
    d, _, v = snf(g)
    n = lat.rank
    invs = []
    qvals = []
    for i in range(n):
        di = d[i][i]
        if abs(di) <= 1:
            continue
        invs.append(abs(di))
        # generator of the Z/di factor, in dual (L tensor Q) coordinates
        gen = [Fraction(v[r][i], di) for r in range(n)]
        qvals.append(lat.square(gen) % 2)
    order = 1
    for x in invs:
        order *= x
    assert order == abs(lat.determinant())
    return DiscriminantGroup(tuple(invs), tuple(qvals), order)
