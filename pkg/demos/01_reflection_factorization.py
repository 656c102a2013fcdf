"""Factor a rational isometry of a small lattice into reflections.

Builds U + U, composes a few reflections into a single matrix, then recovers
a reflection factorization of length at most the rank and checks the exact
recomposition.
"""

from k3isogeny import (
    cartan_dieudonne,
    reflection,
    standard_lattice,
)
from k3isogeny.isometries import compose, compose_reflections
from k3isogeny.lattices import direct_sum

lat = direct_sum(standard_lattice("U"), standard_lattice("U"))
print(f"lattice U+U, rank {lat.rank}, gram rows {[list(r) for r in lat.gram]}")

phi = compose(reflection(lat, [1, -1, 0, 0]),
              compose(reflection(lat, [0, 0, 1, -2]),
                      reflection(lat, [1, -1, 1, -1])))
print("\ninput isometry (columns are images of basis vectors):")
for row in phi.matrix:
    print("  ", [str(x) for x in row])

data = cartan_dieudonne(phi)
print(f"\nfactored into {len(data)} reflections (rank bound {lat.rank}):")
for i, datum in enumerate(data):
    print(f"  s_{i}: axis {list(datum.b)}, square {datum.square}")

recomposed = compose_reflections(lat, data)
print("\nrecomposition equals the input:",
      recomposed.matrix == phi.matrix)
