"""Shared generators for the randomized suites.  Everything is seeded."""

import random

from k3isogeny.isometries import compose_reflections, make_primitive
from k3isogeny.lattices import standard_lattice, direct_sum


def rng_for(name, seed=0):
    return random.Random(f"{name}:{seed}")


def u_plus_u():
    return direct_sum(standard_lattice("U"), standard_lattice("U"))


def u_plus_a1_a1():
    return direct_sum(
        direct_sum(standard_lattice("U"), standard_lattice("A1(-1)")),
        standard_lattice("A1(-1)"))


def random_anisotropic_datum(lat, rng, bound=3, square_abs=None):
    """A primitive anisotropic reflection datum with small sparse entries."""
    while True:
        support = rng.sample(range(lat.rank), min(lat.rank, 4))
        v = [0] * lat.rank
        for i in support:
            v[i] = rng.randint(-bound, bound)
        if all(x == 0 for x in v):
            continue
        sq = lat.square(v)
        if sq == 0:
            continue
        if square_abs is not None and abs(sq) != square_abs:
            continue
        return make_primitive(lat, v)


def random_reflection_product(lat, rng, max_factors=6):
    """A random rational isometry given as a product of <= max_factors reflections."""
    k = rng.randint(1, max_factors)
    data = [random_anisotropic_datum(lat, rng) for _ in range(k)]
    return compose_reflections(lat, data)


def random_integral_isometry(lat, rng, max_factors=3):
    """Product of reflections in vectors of square +-2, hence integral."""
    k = rng.randint(0, max_factors)
    data = [random_anisotropic_datum(lat, rng, bound=2, square_abs=2)
            for _ in range(k)]
    return compose_reflections(lat, data)
