"""Rational isometries, reflections, and Cartan-Dieudonne decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .exact import (
    freeze,
    identity,
    int_matrix_or_none,
    integer_preimage_lattice,
    invariant_factors,
    is_zero_matrix,
    mat_eq,
    mat_inv,
    mat_mul,
    mat_sub,
    mat_vec,
    primitive_integer_vector,
    to_fraction_matrix,
    transpose,
)
from .lattices import Lattice


class IsotropicVectorError(ValueError):
    """Raised when a reflection axis has square zero."""


class NotAnIsometryError(ValueError):
    pass


def is_isometry(source, target, matrix):
    """True iff M^T * G_target * M == G_source exactly."""
    if source.rank != target.rank:
        raise ValueError("rank mismatch")
    gt = [list(r) for r in target.gram]
    # integer fast path: clear denominators so all products stay in Z
    m = int_matrix_or_none([list(r) for r in matrix])
    scale = 1
    if m is None:
        scale = lcm(*[Fraction(x).denominator for row in matrix for x in row])
        m = [[int(Fraction(x) * scale) for x in row] for row in matrix]
    lhs = mat_mul(mat_mul(transpose(m), gt), m)
    d2 = scale * scale
    return mat_eq(lhs, [[d2 * x for x in row] for row in source.gram])


@dataclass(frozen=True)
class RationalIsometry:
    source: Lattice
    target: Lattice
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        m = freeze(to_fraction_matrix([list(r) for r in self.matrix]))
        object.__setattr__(self, "matrix", m)
        if not is_isometry(self.source, self.target, m):
            raise NotAnIsometryError("matrix does not intertwine the gram matrices")

    @property
    def rank(self):
        return self.source.rank

    def apply(self, x):
        return mat_vec([list(r) for r in self.matrix], [Fraction(v) for v in x])

    def inverse(self):
        return RationalIsometry(self.target, self.source,
                                freeze(mat_inv([list(r) for r in self.matrix])))

    def determinant(self):
        from .exact import det
        return det([list(r) for r in self.matrix])

    def is_integral(self):
        return all(x.denominator == 1 for row in self.matrix for x in row)


def compose(f, g):
    """f after g."""
    if g.target.gram != f.source.gram:
        raise ValueError("composition mismatch")
    return RationalIsometry(g.source, f.target,
                            freeze(mat_mul([list(r) for r in f.matrix],
                                           [list(r) for r in g.matrix])))


def identity_isometry(lat):
    return RationalIsometry(lat, lat, freeze(to_fraction_matrix(identity(lat.rank))))


@dataclass(frozen=True)
class ReflectionDatum:
    b: tuple[int, ...]
    square: int

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if self.square == 0:
            raise IsotropicVectorError("reflection axis must be anisotropic")


def reflection_matrix(lat, b):
    """Matrix of s_b : x -> x - (2(x.b)/(b)^2) b."""
    bsq = lat.square(b)
    if bsq == 0:
        raise IsotropicVectorError("cannot reflect in an isotropic vector")
    n = lat.rank
    cols = []
    for j in range(n):
        e = lat.basis_vector(j)
        c = 2 * lat.pairing(e, b) / bsq
        cols.append([Fraction(e[i]) - c * Fraction(b[i]) for i in range(n)])
    return freeze([[cols[j][i] for j in range(n)] for i in range(n)])


def reflection(lat, b):
    """The reflection s_b as a self-isometry of lat."""
    return RationalIsometry(lat, lat, reflection_matrix(lat, b))


def make_primitive(lat, v):
    """Primitive integral rescaling of v defining the same reflection."""
    if all(Fraction(x) == 0 for x in v):
        raise ValueError("zero vector")
    b = primitive_integer_vector(v)
    bsq = lat.square(b)
    if bsq == 0:
        raise IsotropicVectorError("isotropic vector defines no reflection")
    return ReflectionDatum(tuple(b), int(bsq))


def compose_reflections(lat, data):
    """Compose s_{b_1} o ... o s_{b_k} as a RationalIsometry."""
    iso = identity_isometry(lat)
    for datum in data:
        iso = compose(iso, reflection(lat, list(datum.b)))
    return iso


def cartan_dieudonne(phi):
    """Decompose a rational self-isometry into <= rank primitive reflections.

    Scherk-style descent.  While M != id, pick an anisotropic displacement
    u = (M-1)v (candidates v in {e_i, e_i +- e_j} suffice by polarization) and
    peel the reflection s_u; this drops rank(M-1) by one.  Among the
    candidates, prefer a u whose remainder s_u M is not exceptional
    (exceptional: image of M-1 totally isotropic, detected by
    (M-1)^T G (M-1) = 0), because an exceptional remainder costs two extra
    reflections.  When M itself is exceptional no anisotropic displacement
    exists; peel one arbitrary anisotropic reflection first.  The remainder
    then has determinant -1, so it cannot be exceptional (exceptional
    isometries are unipotent), and the descent resumes.
    """
    if phi.source.gram != phi.target.gram:
        raise ValueError("cartan_dieudonne needs source = target")
    lat = phi.source
    n = lat.rank
    g = to_fraction_matrix([list(r) for r in lat.gram])
    m = [list(r) for r in phi.matrix]
    ident = to_fraction_matrix(identity(n))
    data = []
    guard = 0
    while not mat_eq(m, ident):
        guard += 1
        if guard > 2 * n + 4:
            raise RuntimeError("cartan_dieudonne failed to terminate")
        diff = mat_sub(m, ident)
        s = mat_mul(mat_mul(transpose(diff), g), diff)
        if is_zero_matrix(s):
            # exceptional case: peel any anisotropic reflection
            w = _any_anisotropic_vector(lat)
            datum = make_primitive(lat, w)
        else:
            datum = _best_displacement_reflection(lat, g, m, ident, diff, s)
        data.append(datum)
        m = mat_mul([list(r) for r in reflection_matrix(lat, list(datum.b))], m)
    # s_{w_k} ... s_{w_1} M = id, so M = s_{w_1} o ... o s_{w_k} in append order
    return data


def _displacement_candidates(s, n):
    """Vectors v with v^T s v != 0, from the candidates e_i and e_i +- e_j."""
    for i in range(n):
        if s[i][i] != 0:
            yield [Fraction(1) if k == i else Fraction(0) for k in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (1, -1):
                # (e_i + t e_j)^T s (e_i + t e_j) = s_ii + 2t s_ij + s_jj
                if s[i][i] + 2 * sign * s[i][j] + s[j][j] != 0:
                    v = [Fraction(0)] * n
                    v[i], v[j] = Fraction(1), Fraction(sign)
                    yield v


def _best_displacement_reflection(lat, g, m, ident, diff, s, probe_limit=24):
    """Reflection datum s_u with u = (M-1)v anisotropic.

    Prefers (within probe_limit candidates) a u whose remainder s_u M is the
    identity or non-exceptional; falls back to the first candidate.
    """
    n = lat.rank
    first = None
    probed = 0
    for v in _displacement_candidates(s, n):
        datum = make_primitive(lat, mat_vec(diff, v))
        if first is None:
            first = datum
        if probed >= probe_limit:
            break
        probed += 1
        rem = mat_mul([list(r) for r in reflection_matrix(lat, list(datum.b))], m)
        if mat_eq(rem, ident):
            return datum
        rd = mat_sub(rem, ident)
        if not is_zero_matrix(mat_mul(mat_mul(transpose(rd), g), rd)):
            return datum
    if first is None:
        raise AssertionError("no anisotropic displacement despite S != 0")
    return first


def _any_anisotropic_vector(lat):
    n = lat.rank
    for i in range(n):
        e = lat.basis_vector(i)
        if lat.square(e) != 0:
            return [Fraction(x) for x in e]
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (1, -1):
                v = [0] * n
                v[i], v[j] = 1, sign
                if lat.square(v) != 0:
                    return [Fraction(x) for x in v]
    raise ValueError("no anisotropic vector found; form is degenerate")


def is_cyclic(phi):
    """Whether phi^{-1}(L) /\\ L and phi(L) /\\ L both have cyclic quotients.

    Returns (cyclic, (order_in, order_out)); diagnostic only.
    """
    if phi.source.gram != phi.target.gram:
        raise ValueError("is_cyclic needs source = target")
    n = phi.rank
    orders = []
    cyclic = True
    for mat in (phi.matrix, phi.inverse().matrix):
        basis = integer_preimage_lattice([list(r) for r in mat])
        a = [[basis[j][i] for j in range(len(basis))] for i in range(n)]
        invs = [d for d in invariant_factors(a) if d != 1]
        order = 1
        for d in invs:
            order *= d
        orders.append(order)
        if len(invs) > 1:
            cyclic = False
    return cyclic, tuple(orders)
