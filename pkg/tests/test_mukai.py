"""Graded cohomology calculus: roots, twisted Chern characters, correspondences."""

from fractions import Fraction

import pytest

from k3isogeny.exact import det, mat_eq
from k3isogeny.mukai import (
    GradedClass,
    ProductClass,
    RootError,
    boxtimes,
    correspondence_action,
    correspondence_action_matrix,
    correspondence_from_mukai_isometry,
    exp2,
    exp_pair,
    extract_22,
    identity_correspondence,
    inverse_product,
    is_exponential_of_degree2,
    kappa_class,
    kappa_comparison_report,
    mukai_pairing,
    mul,
    mul_product,
    nth_root,
    power,
    power_product,
    rational_nth_root,
    root_compatibility,
    sqrt_todd,
    twisted_chern,
    unit_product,
)
from k3isogeny.bfield import bfield_from_reflection, extend_to_mukai
from k3isogeny.isometries import reflection
from k3isogeny.lattices import standard_lattice

from helpers import rng_for, u_plus_u

U = standard_lattice("U")
UU = u_plus_u()


def rand_fraction(rng, num=4, den=3):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_class(lat, rng, r=None):
    return GradedClass(
        lat,
        Fraction(1) if r is None else Fraction(r),
        tuple(rand_fraction(rng) for _ in range(lat.rank)),
        rand_fraction(rng))


def rand_product(src, tgt, rng, r00=1):
    return ProductClass(
        src, tgt, r00=Fraction(r00),
        c20=tuple(rand_fraction(rng) for _ in range(src.rank)),
        c02=tuple(rand_fraction(rng) for _ in range(tgt.rank)),
        r40=rand_fraction(rng), r04=rand_fraction(rng),
        m22=[[rand_fraction(rng) for _ in range(src.rank)]
             for _ in range(tgt.rank)],
        c42=tuple(rand_fraction(rng) for _ in range(tgt.rank)),
        c24=tuple(rand_fraction(rng) for _ in range(src.rank)),
        r44=rand_fraction(rng))


def test_rational_nth_root():
    assert rational_nth_root(Fraction(8, 27), 3) == Fraction(2, 3)
    assert rational_nth_root(Fraction(-8), 3) == -2
    assert rational_nth_root(2, 2) is None
    assert rational_nth_root(Fraction(-4), 2) is None


def test_mul_and_pairing():
    td = sqrt_todd(U)
    sq = mul(td, td)
    assert sq.r == 1 and all(x == 0 for x in sq.c) and sq.s == 2
    assert mukai_pairing(td, td) == -2


def test_exp2():
    e = exp2(U, [1, -1])
    assert e.r == 1 and e.c == (1, -1) and e.s == 1  # (c.c)/2 = 1


def test_nth_root_roundtrip_random():
    rng = rng_for("roots")
    for _ in range(40):
        x = rand_class(UU, rng)
        n = rng.choice((2, 3, 5))
        y = nth_root(power(x, n), n)
        assert y == x
        assert power(nth_root(x, n), n) == x


def test_nth_root_needs_rational_rank_root():
    x = GradedClass(U, 2, (0, 0), 0)
    with pytest.raises(RootError):
        nth_root(x, 2)
    with pytest.raises(RootError):
        nth_root(GradedClass(U, 0, (1, 0), 0), 2)


def test_root_compatibility_random():
    rng = rng_for("rootcompat")
    for _ in range(15):
        x = rand_class(UU, rng)
        assert root_compatibility(x, 2, 3)
        assert root_compatibility(x, 3, 2)


def test_product_ring_is_commutative_and_boxtimes_multiplicative():
    rng = rng_for("ring")
    for _ in range(10):
        a = rand_product(U, UU, rng, r00=rand_fraction(rng))
        b = rand_product(U, UU, rng, r00=rand_fraction(rng))
        assert mul_product(a, b) == mul_product(b, a)
    for _ in range(10):
        x1, x2 = rand_class(U, rng), rand_class(U, rng)
        y1, y2 = rand_class(UU, rng), rand_class(UU, rng)
        lhs = mul_product(boxtimes(x1, y1), boxtimes(x2, y2))
        rhs = boxtimes(mul(x1, x2), mul(y1, y2))
        assert lhs == rhs


def test_exp_pair_is_exponential():
    rng = rng_for("exppair")
    for _ in range(10):
        a = [rand_fraction(rng) for _ in range(U.rank)]
        b = [rand_fraction(rng) for _ in range(UU.rank)]
        e = exp_pair(U, UU, a, b)
        assert e.r00 == 1
        assert is_exponential_of_degree2(e)
        assert mul_product(e, exp_pair(U, UU, [-x for x in a], [-x for x in b])) \
            == unit_product(U, UU)


def test_twisted_chern_multiplicativity():
    rng = rng_for("twisted")
    for _ in range(10):
        gamma = rand_product(U, UU, rng)
        b = [rng.randint(-2, 2) for _ in range(U.rank)]
        bp = [rng.randint(-2, 2) for _ in range(UU.rank)]
        n = rng.choice((2, 3))
        tc = twisted_chern(gamma, b, bp, n)
        # tc^n * exp(b (x) 1 - 1 (x) b') == gamma
        back = mul_product(power_product(tc, n),
                           exp_pair(U, UU, b, [-x for x in bp]))
        assert back == gamma


def test_inverse_product():
    rng = rng_for("invprod")
    for _ in range(8):
        x = rand_product(U, UU, rng, r00=rng.choice((1, 2, -3)))
        assert mul_product(x, inverse_product(x)) == unit_product(U, UU)


def test_kappa_class_graded():
    rng = rng_for("kappa-g")
    for _ in range(8):
        r, n = rng.choice(((1, 2), (2, 2), (1, 3)))
        gamma = rand_class(UU, rng, r=Fraction(r) ** n)
        k = kappa_class(gamma, n, r)
        # defining identity: k^n = gamma * exp(-c1/k_norm)
        knorm = Fraction(n) * Fraction(r) ** (n - 1)
        assert power(k, n) == mul(gamma, exp2(UU, [-x / knorm for x in gamma.c]))


def test_kappa_comparison_is_exponential():
    rng = rng_for("kappa-p")
    for _ in range(10):
        r, n = rng.choice(((1, 2), (2, 2), (2, 3)))
        gamma = rand_product(U, UU, rng, r00=Fraction(r) ** n)
        report = kappa_comparison_report(gamma, n, r)
        assert report["ratio_is_exponential_of_degree2"]
        assert "unverified" in report["annotation"]


def test_identity_correspondence():
    ident = identity_correspondence(UU)
    assert extract_22(ident) == [[1 if i == j else 0 for j in range(4)]
                                 for i in range(4)]
    rng = rng_for("identcorr")
    for _ in range(5):
        x = rand_class(UU, rng, r=rand_fraction(rng))
        assert correspondence_action(ident, x) == x


def test_correspondence_from_mukai_isometry_matches_action():
    k3 = standard_lattice("K3")
    b = [1, -2] + [0] * 20
    tilde = extend_to_mukai(reflection(k3, b), bfield_from_reflection(k3, b))
    corr = correspondence_from_mukai_isometry(tilde)
    act = correspondence_action_matrix(corr)
    # the action in (r, c, s) coordinates equals the Mukai matrix after the
    # basis reorder (z, e, f) -> (r=e, z, s=f)
    m = [list(r) for r in tilde.matrix]
    perm = [22] + list(range(22)) + [23]
    reordered = [[m[perm[i]][perm[j]] for j in range(24)] for i in range(24)]
    assert mat_eq(act, reordered)
    assert det(act) != 0  # invertible as an ungraded map


def test_mukai_pairing_against_lattice():
    # the Mukai pairing of (r, c, s) matches the Mukai lattice with e, f
    mukai = standard_lattice("Mukai")
    rng = rng_for("pairings")
    for _ in range(10):
        x = rand_class(standard_lattice("K3"), rng, r=rng.randint(-3, 3))
        y = rand_class(standard_lattice("K3"), rng, r=rng.randint(-3, 3))
        vx = list(x.c) + [x.r, x.s]
        vy = list(y.c) + [y.r, y.s]
        assert mukai_pairing(x, y) == mukai.pairing(vx, vy)
