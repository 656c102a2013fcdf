"""Standard lattices, sublattices, complements, discriminant groups."""

import pytest

from k3isogeny.exact import det
from k3isogeny.lattices import (
    DegenerateLatticeError,
    Lattice,
    discriminant_group,
    is_primitive,
    is_twisted_hyperbolic,
    orthogonal_complement,
    signature,
    standard_lattice,
    sublattice_from_generators,
    sublattices_equal,
)

from helpers import u_plus_u


def test_hyperbolic_plane():
    u = standard_lattice("U")
    assert list(map(list, u.gram)) == [[0, -1], [-1, 0]]
    assert u.determinant() == -1
    assert signature(u) == (1, 1)
    assert u.is_even()


def test_u_n():
    u2 = standard_lattice("U(2)")
    assert u2.determinant() == -4
    assert is_twisted_hyperbolic([list(r) for r in u2.gram], 2)
    assert is_twisted_hyperbolic([[0, 3], [3, 0]], 3)
    assert not is_twisted_hyperbolic([[0, 3], [3, 1]], 3)


def test_e8_minus():
    e8 = standard_lattice("E8(-1)")
    assert e8.rank == 8
    assert det([list(r) for r in e8.gram]) == 1
    assert signature(e8) == (0, 8)
    assert e8.is_even()
    # negative definite: every basis vector has square -2
    for i in range(8):
        assert e8.square(e8.basis_vector(i)) == -2


def test_k3_and_mukai():
    k3 = standard_lattice("K3")
    assert k3.rank == 22
    assert signature(k3) == (3, 19)
    assert k3.determinant() == -1
    assert k3.is_even()
    mukai = standard_lattice("Mukai")
    assert mukai.rank == 24
    assert signature(mukai) == (4, 20)
    assert mukai.determinant() == 1


def test_direct_sum_signature():
    uu = u_plus_u()
    assert uu.rank == 4
    assert signature(uu) == (2, 2)


def test_sublattice_index_and_invariants():
    u = standard_lattice("U")
    sub = sublattice_from_generators(u, [[2, 0], [0, 2]])
    assert sub.index == 4
    assert sub.quotient_invariants == (2, 2)
    assert not is_primitive(u, sub)
    full = sublattice_from_generators(u, [[1, 0], [0, 1]])
    assert full.index == 1 and is_primitive(u, full)


def test_dependent_generators():
    u = standard_lattice("U")
    sub = sublattice_from_generators(u, [[1, 0], [2, 0], [3, 0]])
    assert sub.rank == 1
    assert sub.index is None  # not finite index


def test_orthogonal_complement_block():
    uu = u_plus_u()
    first = sublattice_from_generators(uu, [[1, 0, 0, 0], [0, 1, 0, 0]])
    comp = orthogonal_complement(uu, first)
    second = sublattice_from_generators(uu, [[0, 0, 1, 0], [0, 0, 0, 1]])
    assert sublattices_equal(comp, second)
    assert is_primitive(uu, comp)


def test_sublattice_gram():
    u = standard_lattice("U")
    sub = sublattice_from_generators(u, [[1, -1]])
    assert sub.gram() == [[2]]


def test_discriminant_group_u2():
    dg = discriminant_group(standard_lattice("U(2)"))
    assert dg.invariants == (2, 2)
    assert dg.order == 4


def test_discriminant_group_unimodular():
    dg = discriminant_group(standard_lattice("K3"))
    assert dg.order == 1
    assert dg.invariants == ()


def test_degenerate_rejected():
    zero = Lattice(((0, 0), (0, 0)))
    with pytest.raises(DegenerateLatticeError):
        signature(zero)
    with pytest.raises(DegenerateLatticeError):
        discriminant_group(zero)


def test_a1_minus():
    a1 = standard_lattice("A1(-1)")
    assert [list(r) for r in a1.gram] == [[-2]]
    dg = discriminant_group(a1)
    assert dg.invariants == (2,)
