"""B-field data, Lambda_B, exp(B), U(n) complements, Mukai lifts, orientation."""

from fractions import Fraction

import pytest

from k3isogeny.bfield import (
    bfield_from_reflection,
    brauer_order,
    build_lift,
    complement_Un,
    exp_b_embed,
    exp_b_image,
    extend_to_mukai,
    h2_sign_flip,
    lambda_B,
    lambda_membership_criterion,
    mukai_extension,
    orientation_sign,
    phi_b_antiinvariance,
    stock_positive_planes,
    verify_complement_swap,
    verify_integrality,
    verify_lift_diagram,
)
from k3isogeny.isometries import IsotropicVectorError, compose, identity_isometry, reflection
from k3isogeny.lattices import is_primitive, standard_lattice, sublattice_from_generators
from k3isogeny.hodge import hodge_decomposition, validate_period

from helpers import rng_for, random_anisotropic_datum, u_plus_u

UU = u_plus_u()
B_TOY = [1, -2, 0, 0]


def test_bfield_from_reflection():
    bf = bfield_from_reflection(UU, B_TOY)
    assert bf.n == 2
    assert bf.B == (Fraction(1, 2), Fraction(-1), Fraction(0), Fraction(0))


def test_bfield_rejects_bad_axes():
    with pytest.raises(ValueError):
        bfield_from_reflection(UU, [2, -4, 0, 0])  # not primitive
    with pytest.raises(IsotropicVectorError):
        bfield_from_reflection(UU, [1, 0, 0, 0])  # isotropic


def test_lambda_B_toy():
    bf = bfield_from_reflection(UU, B_TOY)
    sub = lambda_B(UU, bf.B)
    assert sub.index == 2
    assert sub.quotient_invariants == (2,)
    # e1 has (B.e1) = 1, so e1 is in Lambda_B; f1 has (B.f1) = -1/2, so not
    assert sub.contains([1, 0, 0, 0])
    assert not sub.contains([0, 1, 0, 0])


def test_lambda_B_brute_force_box():
    rng = rng_for("lambda-box")
    from k3isogeny.exact import mat_inv, mat_vec, to_fraction_matrix
    for _ in range(5):
        b = list(random_anisotropic_datum(UU, rng).b)
        bf = bfield_from_reflection(UU, b)
        sub = lambda_B(UU, bf.B)
        basis = to_fraction_matrix([list(r) for r in sub.basis])
        inv = mat_inv(basis)
        gb = [int(UU.pairing(UU.basis_vector(i), b)) for i in range(4)]
        n = bf.n
        rng2 = rng_for(f"box-{b}")
        for _ in range(400):
            x = [rng2.randint(-5, 5) for _ in range(4)]
            direct = sum(g * v for g, v in zip(gb, x)) % n == 0
            coords = mat_vec(inv, x)
            member = all(c.denominator == 1 for c in coords)
            assert direct == member


def test_exp_b_embed_and_primitivity():
    bf = bfield_from_reflection(UU, B_TOY)
    mt = mukai_extension(UU)
    emb = exp_b_embed(UU, bf.B, [1, 0, 0, 0])
    assert emb == [1, 0, 0, 0, 0, 1]  # x + (B.x) f with (B.e1) = 1
    with pytest.raises(ValueError):
        exp_b_embed(UU, bf.B, [0, 1, 0, 0])  # not in Lambda_B
    image = exp_b_image(UU, bf.B, lambda_B(UU, bf.B))
    assert is_primitive(mt, image)


def test_complement_is_twisted_hyperbolic():
    bf = bfield_from_reflection(UU, B_TOY)
    (v1, v2), gram = complement_Un(UU, bf)
    assert v1 == [1, -2, 0, 0, 2, 1]  # b + n e + f
    assert v2 == [0, 0, 0, 0, 0, -1]  # -f
    assert gram == [[0, 2], [2, 0]]


def test_extend_to_mukai_properties():
    phi = reflection(UU, B_TOY)
    bf = bfield_from_reflection(UU, B_TOY)
    tilde = extend_to_mukai(phi, bf)
    assert tilde.is_integral()
    assert verify_integrality(tilde)
    # swaps the isotropic complement pair
    assert tilde.apply([0, 0, 0, 0, 0, -1]) == [1, -2, 0, 0, 2, 1]
    assert tilde.apply([1, -2, 0, 0, 2, 1]) == [0, 0, 0, 0, 0, -1]


def test_extend_random_samples():
    rng = rng_for("extend")
    for lat in (UU, standard_lattice("K3")):
        for _ in range(8):
            b = list(random_anisotropic_datum(lat, rng).b)
            phi = reflection(lat, b)
            bf = bfield_from_reflection(lat, b)
            tilde = extend_to_mukai(phi, bf)
            assert verify_integrality(tilde)
            # diagram commutes on a basis of Lambda_B
            for x in lambda_B(lat, bf.B).basis_columns():
                lhs = tilde.apply(exp_b_embed(lat, bf.B, x))
                rhs = exp_b_embed(lat, bf.B, phi.apply(x))
                assert lhs == rhs


def test_lambda_membership_criterion():
    rng = rng_for("membership")
    lat = UU
    for _ in range(20):
        b = list(random_anisotropic_datum(lat, rng).b)
        bf = bfield_from_reflection(lat, b)
        # the relevant map is phi~ composed with exp(B); the integral shadow
        # statement for one vector: phi~(exp(B) x) integral iff n | (x.b)
        phi = reflection(lat, b)
        for _ in range(10):
            x = [rng.randint(-4, 4) for _ in range(lat.rank)]
            assert lambda_membership_criterion(lat, phi, bf, x)
            assert (lat.pairing(x, b) % bf.n == 0) == \
                (Fraction(lat.pairing(x, bf.B)).denominator == 1)


def test_phi_b_antiinvariance():
    phi = reflection(UU, B_TOY)
    bf = bfield_from_reflection(UU, B_TOY)
    assert phi_b_antiinvariance(phi, bf)


def test_orientation_identity_and_flip():
    mukai = standard_lattice("Mukai")
    ident = identity_isometry(mukai)
    assert orientation_sign(ident) == 1
    assert orientation_sign(h2_sign_flip(mukai)) == -1


def test_orientation_plane_independence():
    mukai = standard_lattice("Mukai")
    planes = stock_positive_planes(mukai, count=10)
    assert len(planes) >= 10
    flip = h2_sign_flip(mukai)
    for plane in planes:
        assert orientation_sign(flip, planes=[plane]) == -1


def test_orientation_multiplicative():
    k3 = standard_lattice("K3")
    phi = reflection(k3, [1, -2] + [0] * 20)
    bf = bfield_from_reflection(k3, [1, -2] + [0] * 20)
    tilde = extend_to_mukai(phi, bf)
    flip = h2_sign_flip(tilde.target)
    s1 = orientation_sign(tilde)
    s2 = orientation_sign(flip)
    assert orientation_sign(compose(flip, tilde)) == s1 * s2
    assert orientation_sign(compose(tilde, tilde)) == 1


def test_orientation_needs_four_positive():
    with pytest.raises(ValueError):
        orientation_sign(identity_isometry(mukai_extension(UU)))


def test_build_lift_toy_k3():
    k3 = standard_lattice("K3")
    b = [1, -2] + [0] * 20
    lift = build_lift(reflection(k3, b), b)
    assert lift.orientation_after == 1
    assert lift.phi_sign in (1, -1)
    assert verify_lift_diagram(lift) == (True, None)
    assert verify_complement_swap(lift)
    assert verify_integrality(lift.phi_tilde)


def test_brauer_order_divides_n():
    k3 = standard_lattice("K3")
    b = [1, -2] + [0] * 20
    bf = bfield_from_reflection(k3, b)
    u = [0] * 22
    u[2], u[3] = 1, -1
    v = [0] * 22
    v[4], v[5] = 1, -1
    h = validate_period(k3, u, v, 1)
    t = hodge_decomposition(h).t
    order = brauer_order(k3, bf.B, t)
    assert abs(bf.n) % order == 0
    # b is orthogonal to T here, so the Brauer class is trivial
    assert order == 1
    # the full lattice sees the denominator of B
    full = sublattice_from_generators(
        k3, [k3.basis_vector(i) for i in range(22)])
    assert brauer_order(k3, bf.B, full) == 2
