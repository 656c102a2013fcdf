"""B-field lifts of reflective isometries to the Mukai lattice.

From a reflection s_b this builds n = (b)^2/2, B = b/n, the sublattice
Lambda_B = {x : (x.B) integral}, the primitive embedding exp(B) into
Lambda + U, the U(n) complement spanned by b+ne+f and -f, the explicit
integral extension phi~ of the Mukai lattice, its orientation sign on the
four positive directions, and Brauer-order bookkeeping.

Mukai coordinates: a vector of Lambda + U is (z_0..z_{m-1}, r, s) where r is
the coefficient of the isotropic e (H^0 direction) and s of f (H^4).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from math import lcm

from .exact import (
    det,
    freeze,
    identity,
    integer_preimage_lattice,
    mat_inv,
    to_fraction_matrix,
    vec_content,
)
from .isometries import (
    IsotropicVectorError,
    RationalIsometry,
    compose,
    reflection,
)
from .lattices import (
    Sublattice,
    direct_sum,
    is_twisted_hyperbolic,
    orthogonal_complement,
    signature,
    standard_lattice,
    sublattice_from_columns,
    sublattices_equal,
)


class OrientationError(ValueError):
    """Raised when no stock positive 4-plane gives a nondegenerate pairing."""


@dataclass(frozen=True)
class BField:
    b: tuple[int, ...]
    n: int
    B: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "B", tuple(Fraction(x) for x in self.B))
        if any(self.n * bi != bb for bi, bb in zip(self.B, self.b)):
            raise ValueError("n * B must equal b exactly")


def bfield_from_reflection(lat, b):
    """n = (b)^2/2 and B = b/n for a primitive anisotropic b."""
    b = [int(x) for x in b]
    if vec_content(b) != 1:
        raise ValueError("b must be primitive (content 1)")
    bsq = lat.square(b)
    if bsq == 0:
        raise IsotropicVectorError("b must be anisotropic")
    if bsq % 2 != 0:
        raise ValueError("b has odd square; the lattice must be even")
    n = bsq // 2
    return BField(tuple(b), n, tuple(Fraction(x, n) for x in b))


def lambda_B(lat, B):
    """The sublattice {x in L : (x.B) in Z}."""
    row = [[lat.pairing(lat.basis_vector(j), B) for j in range(lat.rank)]]
    basis = integer_preimage_lattice(row)
    return sublattice_from_columns(lat, basis)


def mukai_extension(lat):
    """Lambda + U with the standard isotropic basis e, f appended."""
    return direct_sum(lat, standard_lattice("U"),
                      label=f"{lat.label}+U" if lat.label else None)


def exp_b_embed(lat, B, x):
    """exp(B): x -> x + (B.x) f, for x in Lambda_B; image lies in Lambda + U."""
    px = lat.pairing(x, B)
    if Fraction(px).denominator != 1:
        raise ValueError("x is not in Lambda_B: (B.x) is not integral")
    return [Fraction(v) for v in x] + [Fraction(0), Fraction(px)]


def exp_b_image(lat, B, sub):
    """exp(B)(sub) as a sublattice of Lambda + U."""
    mt = mukai_extension(lat)
    cols = [[int(v) for v in exp_b_embed(lat, B, c)] for c in sub.basis_columns()]
    return sublattice_from_columns(mt, cols)


def complement_Un(lat, bf):
    """The pair (b+ne+f, -f) spanning exp(B)(Lambda_B)^perp, with its gram.

    Asserts both vectors isotropic, mutual pairing n, gram congruent to U(n),
    and equality with the independently computed orthogonal complement.
    """
    mt = mukai_extension(lat)
    m = lat.rank
    v1 = list(bf.b) + [bf.n, 1]
    v2 = [0] * m + [0, -1]
    assert mt.square(v1) == 0 and mt.square(v2) == 0
    pairing = mt.pairing(v1, v2)
    assert pairing == bf.n
    gram = [[0, bf.n], [bf.n, 0]]
    assert is_twisted_hyperbolic(gram, bf.n)
    span = sublattice_from_columns(mt, [v1, v2])
    comp = orthogonal_complement(mt, exp_b_image(lat, bf.B, lambda_B(lat, bf.B)))
    assert sublattices_equal(span, comp)
    return (v1, v2), gram


def extend_to_mukai(phi, bf, b_target=None):
    """The explicit extension phi~ of phi = s_b to the Mukai lattices.

    Two-lattice formula (the primary one):
        phi~(r, z, s) = (n((B.z) - r/n - s), phi(z) + ((B.z) - s) b', -s)
    with b' = -phi(b).  Cross-checked against the single-lattice formula
        phi~(z + re + sf) = phi(z) + ((B.z)-s) b + n((B.z) - r/n - s) e - sf
    when source and target coincide.
    """
    lat = phi.source
    m = lat.rank
    n = bf.n
    bprime = [-x for x in phi.apply(list(bf.b))]
    if any(x.denominator != 1 for x in bprime):
        raise ValueError("b' = -phi(b) is not integral")
    if b_target is not None and list(b_target) != [int(x) for x in bprime]:
        raise ValueError("inconsistent b_target: must equal -phi(b)")
    bprime = [int(x) for x in bprime]

    cols = []
    for j in range(m):  # images of the H^2 basis vectors
        z = lat.basis_vector(j)
        bz = lat.pairing(z, bf.B)
        zpart = [p + bz * q for p, q in zip(phi.apply(z), map(Fraction, bprime))]
        cols.append(zpart + [n * bz, Fraction(0)])
    # image of e (r = 1): (-1, 0, 0)
    cols.append([Fraction(0)] * m + [Fraction(-1), Fraction(0)])
    # image of f (s = 1): (-n, -b', -1)
    cols.append([-Fraction(x) for x in bprime] + [Fraction(-n), Fraction(-1)])

    matrix = freeze([[cols[j][i] for j in range(m + 2)] for i in range(m + 2)])
    src = mukai_extension(phi.source)
    tgt = mukai_extension(phi.target)
    tilde = RationalIsometry(src, tgt, matrix)
    if phi.source.gram == phi.target.gram:
        single = _extend_single_lattice(lat, bf)
        assert tilde.matrix == single, "two formula variants disagree"
    if not tilde.is_integral():
        raise ValueError("phi~ is not integral")
    return tilde


def _extend_single_lattice(lat, bf):
    """Matrix of the single-lattice formula from the paper's first variant."""
    m = lat.rank
    n = bf.n
    phi = reflection(lat, list(bf.b))
    cols = []
    for j in range(m):
        z = lat.basis_vector(j)
        bz = lat.pairing(z, bf.B)
        zpart = [p + bz * Fraction(q) for p, q in zip(phi.apply(z), bf.b)]
        cols.append(zpart + [n * bz, Fraction(0)])
    cols.append([Fraction(0)] * m + [Fraction(-1), Fraction(0)])
    cols.append([-Fraction(x) for x in bf.b] + [Fraction(-n), Fraction(-1)])
    return freeze([[cols[j][i] for j in range(m + 2)] for i in range(m + 2)])


def h2_sign_flip(mukai_lat):
    """id on H^0 and H^4, -id on H^2, as a self-isometry of Lambda + U."""
    m = mukai_lat.rank - 2
    mat = to_fraction_matrix(identity(m + 2))
    for i in range(m):
        mat[i][i] = Fraction(-1)
    return RationalIsometry(mukai_lat, mukai_lat, freeze(mat))


# ---------------------------------------------------------------------------
# orientation of the four positive directions


_PLANE_CACHE = {}


def stock_positive_planes(mukai_lat, count=12):
    """Deterministic positive-definite 4-planes in the Mukai lattice.

    Starts from four base vectors of positive square (basis vectors or pairs
    e_i - f_i of the hyperbolic summands), then perturbs them by the remaining
    basis directions; independent of any Hodge data.  Cached per gram matrix.
    """
    key = (mukai_lat.gram, count)
    if key not in _PLANE_CACHE:
        _PLANE_CACHE[key] = _compute_stock_planes(mukai_lat, count)
    return _PLANE_CACHE[key]


def _compute_stock_planes(mukai_lat, count):
    n = mukai_lat.rank
    base = []
    for i in range(n):
        v = mukai_lat.basis_vector(i)
        if mukai_lat.square(v) > 0:
            base.append(v)
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (1, -1):
                v = [0] * n
                v[i], v[j] = 1, sign
                if mukai_lat.square(v) > 0:
                    base.append(v)
        if len(base) >= 12:
            break
    planes = []

    def push(plane):
        if _is_positive_definite_plane(mukai_lat, plane):
            planes.append(plane)

    for combo in combinations(range(len(base)), 4):
        push([base[i] for i in combo])
        if len(planes) >= count:
            return planes
    # perturb one plane vector at a time by every basis direction
    for seed in list(planes):
        for slot in range(4):
            for k in range(n):
                for scale in (1, -1):
                    v = list(seed[slot])
                    v[k] += scale
                    plane = [list(p) for p in seed]
                    plane[slot] = v
                    push(plane)
                    if len(planes) >= count:
                        return planes
    return planes


def _is_positive_definite_plane(lat, plane):
    g = [[lat.pairing(x, y) for y in plane] for x in plane]
    minor = Fraction(1)
    for k in range(1, 5):
        minor = det([row[:k] for row in g[:k]])
        if minor <= 0:
            return False
    return True


def orientation_sign(g, reference_plane=None, planes=None):
    """Sign of det((g p_i . p_j)) on a positive 4-plane; +1 or -1.

    Independent of the plane choice; falls back through the stock planes when
    the pairing matrix degenerates.
    """
    lat = g.target
    if signature(lat)[0] != 4:
        raise ValueError("orientation needs four positive directions")
    if reference_plane is not None:
        trial = [reference_plane]
    else:
        trial = planes if planes is not None else stock_positive_planes(g.source)
    for plane in trial:
        if not _is_positive_definite_plane(g.source, plane):
            continue
        images = [g.apply(p) for p in plane]
        pairing = [[lat.pairing(gp, q) for q in plane] for gp in images]
        d = det(pairing)
        if d != 0:
            return 1 if d > 0 else -1
    raise OrientationError("all stock positive 4-planes gave degenerate pairings")


# ---------------------------------------------------------------------------
# the assembled lift


@dataclass(frozen=True)
class BFieldLift:
    phi: RationalIsometry          # the reflective isometry on H^2
    bfield_src: BField
    b_target: tuple[int, ...]      # b' = -phi(b)
    B_target: tuple[Fraction, ...]  # B' after any orientation fix
    lambdaB_src: Sublattice
    lambdaB_tgt: Sublattice
    phi_tilde: RationalIsometry    # integral Mukai-lattice isometry, sign-fixed
    orientation_before: int
    orientation_after: int
    phi_sign: int                  # +1, or -1 when the H^2 flip was composed


def build_lift(phi, b):
    """Assemble the full B-field lift of the reflective isometry phi = s_b."""
    lat = phi.source
    bf = bfield_from_reflection(lat, b)
    image = [-Fraction(v) for v in phi.apply(list(bf.b))]
    if any(x.denominator != 1 for x in image):
        raise ValueError("b' = -phi(b) is not integral")
    bprime = [int(x) for x in image]
    bf_tgt = bfield_from_reflection(phi.target, bprime)
    lam_src = lambda_B(lat, bf.B)
    lam_tgt = lambda_B(phi.target, bf_tgt.B)
    tilde = extend_to_mukai(phi, bf, b_target=bprime)
    sign_before = orientation_sign(tilde)
    lift = BFieldLift(
        phi=phi,
        bfield_src=bf,
        b_target=tuple(bprime),
        B_target=bf_tgt.B,
        lambdaB_src=lam_src,
        lambdaB_tgt=lam_tgt,
        phi_tilde=tilde,
        orientation_before=sign_before,
        orientation_after=sign_before,
        phi_sign=1,
    )
    return fix_orientation(lift)


def fix_orientation(lift):
    """Compose with id + (-id on H^2) + id until the orientation sign is +1."""
    if lift.orientation_after == 1:
        return lift
    flip = h2_sign_flip(lift.phi_tilde.target)
    fixed = compose(flip, lift.phi_tilde)
    sign = orientation_sign(fixed)
    assert sign == 1
    return replace(
        lift,
        phi_tilde=fixed,
        B_target=tuple(-x for x in lift.B_target),
        orientation_after=sign,
        phi_sign=-lift.phi_sign,
    )


def brauer_order(lat, B, t_sub):
    """Smallest m >= 1 with (mB.x) integral for all x in the sublattice."""
    order = 1
    for col in t_sub.basis_columns():
        order = lcm(order, Fraction(lat.pairing(col, B)).denominator)
    return order


def verify_lift_diagram(lift):
    """exp(B')(phi_eff(x)) == phi~(exp(B)(x)) on a basis of Lambda_B."""
    lat = lift.phi.source
    bf = lift.bfield_src
    for x in lift.lambdaB_src.basis_columns():
        lhs = lift.phi_tilde.apply(exp_b_embed(lat, bf.B, x))
        px = [lift.phi_sign * v for v in lift.phi.apply(x)]
        rhs = exp_b_embed(lift.phi.target, lift.B_target, px)
        if lhs != rhs:
            return False, x
    return True, None


def verify_complement_swap(lift):
    """phi~ interchanges b+ne+f and -f (up to the orientation flip on H^2)."""
    lat = lift.phi.source
    m = lat.rank
    bf = lift.bfield_src
    v1 = [Fraction(x) for x in bf.b] + [Fraction(bf.n), Fraction(1)]
    v2 = [Fraction(0)] * m + [Fraction(0), Fraction(-1)]
    n_t = lift.phi.target.square(lift.b_target) // 2
    b_eff = [lift.phi_sign * x for x in lift.b_target]
    w1 = [Fraction(x) for x in b_eff] + [Fraction(n_t), Fraction(1)]
    w2 = [Fraction(0)] * m + [Fraction(0), Fraction(-1)]
    return lift.phi_tilde.apply(v2) == w1 and lift.phi_tilde.apply(v1) == w2


def verify_integrality(iso):
    """Both the matrix and its inverse are integral."""
    inv = mat_inv([list(r) for r in iso.matrix])
    return iso.is_integral() and all(x.denominator == 1 for row in inv for x in row)


def phi_b_antiinvariance(phi, bf, B_target=None):
    """phi(B) == -B in the single-lattice form, B' == -phi(B) in general."""
    img = phi.apply(list(bf.B))
    reference = bf.B if B_target is None else B_target
    return [Fraction(x) for x in img] == [-Fraction(x) for x in reference]


def lambda_membership_criterion(lat, phi, bf, x):
    """phi(x) integral iff (x.b) divisible by n; exact check for one vector."""
    img = phi.apply(x)
    integral = all(Fraction(v).denominator == 1 for v in img)
    divisible = lat.pairing(x, list(bf.b)) % bf.n == 0
    return integral == divisible
