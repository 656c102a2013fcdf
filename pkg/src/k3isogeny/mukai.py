"""Formal graded cohomology of a K3 and of a product of two K3s.

GradedClass models H^0 + H^2 + H^4 of one surface in a lattice marking;
ProductClass models the Kunneth decomposition of H*(S x S').  Twisted Chern
characters, n-th roots, kappa classes, and correspondence actions are all
linear algebra over exact rationals in these coordinates.

Conventions: exp of a degree-2 class c is (1, c, c^2/2); integration takes the
top-degree coefficient with fundamental class 1; the Mukai pairing is
<(r,c,s),(r',c',s')> = (c.c') - rs' - r's.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    freeze,
    mat_add,
    mat_inv,
    mat_mul,
    mat_scale,
    mat_vec,
    transpose,
    zeros,
)
from .lattices import Lattice


class RootError(ValueError):
    """The requested formal n-th root does not exist over Q."""


def _int_nth_root(a, n):
    """Exact integer n-th root of a >= 0, or None."""
    if a == 0:
        return 0
    lo, hi = 0, 1
    while hi ** n < a:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** n < a:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** n == a else None


def rational_nth_root(q, n):
    """The rational n-th root of q with a positive branch, or None.

    For even n, q must be >= 0 and the positive root is returned; for odd n
    the sign is forced.
    """
    q = Fraction(q)
    if n == 1:
        return q
    sign = 1
    if q < 0:
        if n % 2 == 0:
            return None
        sign = -1
        q = -q
    num = _int_nth_root(q.numerator, n)
    den = _int_nth_root(q.denominator, n)
    if num is None or den is None:
        return None
    return sign * Fraction(num, den)


# ---------------------------------------------------------------------------
# graded classes on one surface


@dataclass(frozen=True)
class GradedClass:
    lattice: Lattice
    r: Fraction                     # degree 0
    c: tuple[Fraction, ...]         # degree 2
    s: Fraction                     # degree 4

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "c", tuple(Fraction(x) for x in self.c))
        object.__setattr__(self, "s", Fraction(self.s))
        if len(self.c) != self.lattice.rank:
            raise ValueError("degree-2 part has wrong rank")

    def __add__(self, other):
        return GradedClass(self.lattice, self.r + other.r,
                           tuple(a + b for a, b in zip(self.c, other.c)),
                           self.s + other.s)

    def __sub__(self, other):
        return GradedClass(self.lattice, self.r - other.r,
                           tuple(a - b for a, b in zip(self.c, other.c)),
                           self.s - other.s)

    def scale(self, f):
        f = Fraction(f)
        return GradedClass(self.lattice, f * self.r,
                           tuple(f * x for x in self.c), f * self.s)

    def is_zero(self):
        return self.r == 0 and self.s == 0 and all(x == 0 for x in self.c)

    def lowest_degree(self):
        if self.r != 0:
            return 0
        if any(x != 0 for x in self.c):
            return 2
        if self.s != 0:
            return 4
        return None


def unit(lattice):
    return GradedClass(lattice, 1, (0,) * lattice.rank, 0)


def mul(x, y):
    """(r,c,s)(r',c',s') = (rr', rc'+r'c, rs'+r's+(c.c'))."""
    if x.lattice.gram != y.lattice.gram:
        raise ValueError("classes live on different lattices")
    return GradedClass(
        x.lattice,
        x.r * y.r,
        tuple(x.r * b + y.r * a for a, b in zip(x.c, y.c)),
        x.r * y.s + y.r * x.s + x.lattice.pairing(x.c, y.c),
    )


def power(x, n):
    out = unit(x.lattice)
    for _ in range(n):
        out = mul(out, x)
    return out


def mukai_pairing(x, y):
    """<(r,c,s),(r',c',s')> = (c.c') - rs' - r's."""
    if x.lattice.gram != y.lattice.gram:
        raise ValueError("classes live on different lattices")
    return x.lattice.pairing(x.c, y.c) - x.r * y.s - y.r * x.s


def exp2(lattice, c):
    """Graded exponential (1, c, c^2/2) of a degree-2 class."""
    c = tuple(Fraction(x) for x in c)
    return GradedClass(lattice, 1, c, lattice.pairing(c, c) / 2)


def sqrt_todd(lattice):
    """sqrt(td) = (1, 0, 1); squares to the Todd class (1, 0, 2)."""
    return GradedClass(lattice, 1, (0,) * lattice.rank, 1)


def _nth_root_generic(x, n, one, mul_op, pow_op):
    """Formal n-th root in a graded-nilpotent commutative ring, by sweeps.

    Each sweep corrects the lowest nonzero degree of the defect x - y^n, which
    strictly increases, so a handful of sweeps reaches an exact root.
    """
    rho = rational_nth_root(_rank_of(x), n)
    if _rank_of(x) == 0:
        raise RootError("degree-0 part must be nonzero")
    if rho is None:
        raise RootError(f"degree-0 part {_rank_of(x)} has no rational {n}-th root")
    y = one.scale(rho)
    corr = 1 / (n * rho ** (n - 1))
    for _ in range(8):
        defect = x - pow_op(y, n)
        if defect.is_zero():
            return y
        y = y + defect.scale(corr)
    raise AssertionError("root iteration failed to converge")


def _rank_of(x):
    return x.r if isinstance(x, GradedClass) else x.r00


def nth_root(x, n):
    """Unique n-th root with positive-branch degree-0 part; root^n == x."""
    return _nth_root_generic(x, n, unit(x.lattice), mul, power)


def root_compatibility(x, n, m):
    """Fact (i) shadow: the mn-th root of x^m equals the n-th root of x."""
    return nth_root(power(x, m), m * n) == nth_root(x, n)


# ---------------------------------------------------------------------------
# product classes on S x S'


@dataclass(frozen=True)
class ProductClass:
    """Kunneth components of a class on S x S'.

    Scalars r_pq multiply 1, [pt], or their box products; c02/c42 live on the
    target lattice, c20/c24 on the source.  The (2,2) part is stored as the
    matrix of the induced map H^2(S) -> H^2(S') (column-vector convention);
    internally products convert to the coefficient matrix C = G^{-1} A^T.
    """
    src: Lattice
    tgt: Lattice
    r00: Fraction = Fraction(0)
    c20: tuple[Fraction, ...] = ()
    c02: tuple[Fraction, ...] = ()
    r40: Fraction = Fraction(0)
    r04: Fraction = Fraction(0)
    m22: tuple[tuple[Fraction, ...], ...] = ()
    c42: tuple[Fraction, ...] = ()
    c24: tuple[Fraction, ...] = ()
    r44: Fraction = Fraction(0)

    def __post_init__(self):
        ms, mt = self.src.rank, self.tgt.rank
        object.__setattr__(self, "r00", Fraction(self.r00))
        object.__setattr__(self, "r40", Fraction(self.r40))
        object.__setattr__(self, "r04", Fraction(self.r04))
        object.__setattr__(self, "r44", Fraction(self.r44))
        object.__setattr__(self, "c20", _pad_vec(self.c20, ms))
        object.__setattr__(self, "c24", _pad_vec(self.c24, ms))
        object.__setattr__(self, "c02", _pad_vec(self.c02, mt))
        object.__setattr__(self, "c42", _pad_vec(self.c42, mt))
        m22 = self.m22 if self.m22 else zeros(mt, ms)
        object.__setattr__(
            self, "m22", freeze([[Fraction(x) for x in row] for row in m22]))
        if len(self.m22) != mt or any(len(r) != ms for r in self.m22):
            raise ValueError("(2,2) matrix has wrong shape")

    def __add__(self, other):
        return ProductClass(
            self.src, self.tgt,
            self.r00 + other.r00,
            _vadd(self.c20, other.c20), _vadd(self.c02, other.c02),
            self.r40 + other.r40, self.r04 + other.r04,
            freeze(mat_add([list(r) for r in self.m22],
                           [list(r) for r in other.m22])),
            _vadd(self.c42, other.c42), _vadd(self.c24, other.c24),
            self.r44 + other.r44)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, f):
        f = Fraction(f)
        return ProductClass(
            self.src, self.tgt, f * self.r00,
            tuple(f * x for x in self.c20), tuple(f * x for x in self.c02),
            f * self.r40, f * self.r04,
            freeze(mat_scale([list(r) for r in self.m22], f)),
            tuple(f * x for x in self.c42), tuple(f * x for x in self.c24),
            f * self.r44)

    def is_zero(self):
        return (self.r00 == 0 and self.r40 == 0 and self.r04 == 0
                and self.r44 == 0
                and all(x == 0 for x in self.c20 + self.c02 + self.c42 + self.c24)
                and all(x == 0 for row in self.m22 for x in row))

    def coefficient_matrix(self):
        """C with class_{(2,2)} = sum C[i][j] x_i (x) y_j; C = G^{-1} A^T."""
        g_inv = mat_inv([list(r) for r in self.src.gram])
        return mat_mul(g_inv, transpose([list(r) for r in self.m22]))


def _pad_vec(v, n):
    v = tuple(Fraction(x) for x in v) if v else (Fraction(0),) * n
    if len(v) != n:
        raise ValueError("component vector has wrong rank")
    return v


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def unit_product(src, tgt):
    return ProductClass(src, tgt, r00=1)


def boxtimes(x, y):
    """Pure tensor x (x) y of graded classes on S and S'."""
    src, tgt = x.lattice, y.lattice
    gs = [list(r) for r in src.gram]
    # class (2,2) part: x.c (x) y.c has coefficients C = outer(x.c, y.c),
    # so the induced map is A = C^T G = outer(y.c, G x.c)
    gxc = mat_vec(gs, list(x.c))
    a = [[y.c[i] * gxc[j] for j in range(src.rank)] for i in range(tgt.rank)]
    return ProductClass(
        src, tgt,
        r00=x.r * y.r,
        c20=tuple(v * y.r for v in x.c),
        c02=tuple(x.r * v for v in y.c),
        r40=x.s * y.r, r04=x.r * y.s,
        m22=freeze(a),
        c42=tuple(x.s * v for v in y.c),
        c24=tuple(v * y.s for v in x.c),
        r44=x.s * y.s)


def mul_product(x, y):
    """Graded ring product on S x S', truncated at total degree 8."""
    if x.src.gram != y.src.gram or x.tgt.gram != y.tgt.gram:
        raise ValueError("product classes on different lattice pairs")
    src, tgt = x.src, x.tgt
    gs = [list(r) for r in src.gram]
    gt = [list(r) for r in tgt.gram]
    cx = x.coefficient_matrix()
    cy = y.coefficient_matrix()

    def pair_s(a, b):
        return src.pairing(a, b)

    def pair_t(a, b):
        return tgt.pairing(a, b)

    r00 = x.r00 * y.r00
    c20 = tuple(x.r00 * b + y.r00 * a for a, b in zip(x.c20, y.c20))
    c02 = tuple(x.r00 * b + y.r00 * a for a, b in zip(x.c02, y.c02))
    r40 = x.r00 * y.r40 + y.r00 * x.r40 + pair_s(x.c20, y.c20)
    r04 = x.r00 * y.r04 + y.r00 * x.r04 + pair_t(x.c02, y.c02)
    c_new = mat_add(mat_add(mat_scale(cy, x.r00), mat_scale(cx, y.r00)),
                    mat_add(_outer(x.c20, y.c02), _outer(y.c20, x.c02)))
    c42 = _vadd(
        _vadd(tuple(x.r00 * v for v in y.c42), tuple(y.r00 * v for v in x.c42)),
        _vadd(tuple(x.r40 * v for v in y.c02), tuple(y.r40 * v for v in x.c02)))
    c42 = _vadd(c42, tuple(mat_vec(mat_mul(transpose(cx), gs), list(y.c20))))
    c42 = _vadd(c42, tuple(mat_vec(mat_mul(transpose(cy), gs), list(x.c20))))
    c24 = _vadd(
        _vadd(tuple(x.r00 * v for v in y.c24), tuple(y.r00 * v for v in x.c24)),
        _vadd(tuple(x.r04 * v for v in y.c20), tuple(y.r04 * v for v in x.c20)))
    c24 = _vadd(c24, tuple(mat_vec(mat_mul(cx, gt), list(y.c02))))
    c24 = _vadd(c24, tuple(mat_vec(mat_mul(cy, gt), list(x.c02))))
    r44 = (x.r00 * y.r44 + y.r00 * x.r44
           + x.r40 * y.r04 + x.r04 * y.r40
           + pair_s(x.c20, y.c24) + pair_s(x.c24, y.c20)
           + pair_t(x.c02, y.c42) + pair_t(x.c42, y.c02)
           + _trace(mat_mul(mat_mul(mat_mul(transpose(cx), gs), cy), gt)))
    # convert coefficient matrix back to the induced-map convention
    m22 = mat_mul(transpose(c_new), gs)
    return ProductClass(src, tgt, r00, c20, c02, r40, r04, freeze(m22),
                        c42, c24, r44)


def _outer(a, b):
    """Coefficient matrix of (a (x) b): C[i][j] = a[i] * b[j]."""
    return [[ai * bj for bj in b] for ai in a]


def _trace(m):
    return sum(m[i][i] for i in range(len(m)))


def power_product(x, n):
    out = unit_product(x.src, x.tgt)
    for _ in range(n):
        out = mul_product(out, x)
    return out


def nth_root_product(x, n):
    return _nth_root_generic(x, n, unit_product(x.src, x.tgt),
                             mul_product, power_product)


def inverse_product(x):
    """Inverse of a unit-rank product class (defect-correction sweeps)."""
    if x.r00 == 0:
        raise RootError("only unit-rank classes are invertible")
    one = unit_product(x.src, x.tgt)
    y = one.scale(1 / x.r00)
    for _ in range(8):
        defect = one - mul_product(x, y)
        if defect.is_zero():
            return y
        y = y + mul_product(defect, y)
    raise AssertionError("inversion failed to converge")


def exp_pair(src, tgt, a, b):
    """exp(a (x) 1 + 1 (x) b) = exp(a) (x) exp(b) for degree-2 a on S, b on S'."""
    return boxtimes(exp2(src, a), exp2(tgt, b))


# ---------------------------------------------------------------------------
# twisted Chern characters and kappa classes


def twisted_chern(gamma, b, b_prime, n):
    """n-th root of exp(-b (x) 1 + 1 (x) b') * gamma.

    gamma models ch(E^tensor-n); the result ch^{-B,B'}(E) satisfies
    result^n * exp(b (x) 1 - 1 (x) b') == gamma.
    """
    factor = exp_pair(gamma.src, gamma.tgt,
                      [-Fraction(t) for t in b], [Fraction(t) for t in b_prime])
    return nth_root_product(mul_product(factor, gamma), n)


def kappa_class(gamma, n, r):
    """Buskin-style class: n-th root of gamma * exp(-c1) with c1 from degree 2.

    Works for GradedClass and ProductClass; the rank of gamma must be r^n.
    """
    if _rank_of(gamma) != Fraction(r) ** n:
        raise ValueError("rank of gamma must equal r^n")
    k = Fraction(n) * Fraction(r) ** (n - 1)
    if isinstance(gamma, GradedClass):
        c1 = [x / k for x in gamma.c]
        return nth_root(mul(gamma, exp2(gamma.lattice, [-x for x in c1])), n)
    c1s = [x / k for x in gamma.c20]
    c1t = [x / k for x in gamma.c02]
    factor = exp_pair(gamma.src, gamma.tgt, [-x for x in c1s], [-x for x in c1t])
    return nth_root_product(mul_product(gamma, factor), n)


def is_exponential_of_degree2(x):
    """Whether a unit product class is exp of a degree-2 class (log truncates)."""
    if x.r00 != 1:
        return False
    z = x - unit_product(x.src, x.tgt)
    # log via the degree-8 truncated series
    log = z
    zp = z
    for k in (2, 3, 4):
        zp = mul_product(zp, z)
        log = log + zp.scale(Fraction((-1) ** (k + 1), k))
    return (log.r40 == 0 and log.r04 == 0 and log.r44 == 0
            and all(v == 0 for v in log.c42 + log.c24)
            and all(v == 0 for row in log.m22 for v in row))


def kappa_comparison_report(gamma, n, r):
    """Compare kappa with the plain n-th root; the ratio must be exp(degree 2).

    The annotation records the paper-stated exact comparison factor, which this
    artifact does not verify (its rank normalization is underdetermined).
    """
    kappa = kappa_class(gamma, n, r)
    if isinstance(gamma, GradedClass):
        raise ValueError("comparison report is defined for product classes")
    plain = nth_root_product(gamma, n)
    ratio = mul_product(kappa, inverse_product(plain))
    return {
        "ratio_is_exponential_of_degree2": is_exponential_of_degree2(ratio),
        "annotation": ("unverified: stated comparison factor "
                       "exp(-c1(E^n)/n^3) * exp(B, -B')"),
    }


# ---------------------------------------------------------------------------
# correspondences


def identity_correspondence(lat):
    """Diagonal-model Kunneth class acting as the identity."""
    from .exact import identity
    return ProductClass(lat, lat, r40=1, r04=1,
                        m22=freeze([[Fraction(x) for x in row]
                                    for row in identity(lat.rank)]))


def correspondence_from_mukai_isometry(tilde):
    """Product class whose action on (r, c, s) equals the Mukai isometry.

    The Mukai matrix is in (z, e, f) coordinates on both sides.
    """
    src = _h2_lattice(tilde.source)
    tgt = _h2_lattice(tilde.target)
    ms, mt = src.rank, tgt.rank
    m = [list(r) for r in tilde.matrix]
    z_block = [row[:ms] for row in m[:mt]]
    ze = [m[i][ms] for i in range(mt)]
    zf = [m[i][ms + 1] for i in range(mt)]
    ez = m[mt][:ms]
    fz = m[mt + 1][:ms]
    g_inv = mat_inv([list(r) for r in src.gram])
    return ProductClass(
        src, tgt,
        r00=m[mt][ms + 1],                 # e <- f entry
        c20=tuple(mat_vec(g_inv, ez)),
        c02=tuple(zf),
        r40=m[mt][ms],                     # e <- e
        r04=m[mt + 1][ms + 1],             # f <- f
        m22=freeze(z_block),
        c42=tuple(ze),
        c24=tuple(mat_vec(g_inv, fz)),
        r44=m[mt + 1][ms])                 # f <- e


def _h2_lattice(mukai_lat):
    g = [row[:-2] for row in mukai_lat.gram[:-2]]
    return Lattice(freeze(g))


def correspondence_action(k, x):
    """Push-pull x -> p_*(q^* x . k), componentwise in Kunneth coordinates."""
    if x.lattice.gram != k.src.gram:
        raise ValueError("class does not live on the correspondence source")
    r_out = x.r * k.r40 + k.src.pairing(x.c, k.c20) + x.s * k.r00
    c_out = tuple(
        x.r * a + b + x.s * d
        for a, b, d in zip(k.c42,
                           mat_vec([list(r) for r in k.m22], list(x.c)),
                           k.c02))
    s_out = x.r * k.r44 + k.src.pairing(x.c, k.c24) + x.s * k.r04
    return GradedClass(k.tgt, r_out, c_out, s_out)


def correspondence_action_matrix(k):
    """The ungraded linear map of the action, as a square rational matrix."""
    ms, mt = k.src.rank, k.tgt.rank
    cols = []
    basis = [GradedClass(k.src, 1, (0,) * ms, 0)]
    for i in range(ms):
        c = [0] * ms
        c[i] = 1
        basis.append(GradedClass(k.src, 0, c, 0))
    basis.append(GradedClass(k.src, 0, (0,) * ms, 1))
    for x in basis:
        y = correspondence_action(k, x)
        cols.append([y.r] + list(y.c) + [y.s])
    return [[cols[j][i] for j in range(ms + 2)] for i in range(mt + 2)]


def extract_22(k):
    """The (2,2) Kunneth component, as the induced map H^2(S) -> H^2(S')."""
    return [list(row) for row in k.m22]
