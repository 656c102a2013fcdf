"""Exact marked K3 Hodge data over imaginary quadratic fields.

A period is sigma = u + sqrt(-d) v with rational u, v; every Hodge condition
becomes an exact identity in the pairing.  This is the CM/singular regime:
generic transcendental periods are out of reach of exact arithmetic, but all
formulas in scope are exercised by these data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import integer_kernel, mat_vec, solve_and_kernel
from .lattices import (
    Lattice,
    Sublattice,
    is_primitive,
    orthogonal_complement,
    signature,
    sublattice_from_columns,
)


class PeriodError(ValueError):
    """A period condition fails; the message names the violated identity."""


class ModelMismatchError(ValueError):
    """Hodge comparison across different discriminants d is out of model."""


def _squarefree(d):
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class MarkedHodgeData:
    lattice: Lattice
    u: tuple[Fraction, ...]
    v: tuple[Fraction, ...]
    d: int

    def period_pairing(self, x):
        """(sigma.x) as the pair (real, imag) over Q(sqrt(-d))."""
        return (self.lattice.pairing(self.u, x), self.lattice.pairing(self.v, x))


def validate_period(lattice, u, v, d):
    """Check all period identities exactly; raises PeriodError naming failures."""
    u = tuple(Fraction(x) for x in u)
    v = tuple(Fraction(x) for x in v)
    if len(u) != lattice.rank or len(v) != lattice.rank:
        raise PeriodError("u, v must have the lattice rank")
    if d <= 0 or not _squarefree(d):
        raise PeriodError("d must be a positive square-free integer")
    uv = lattice.pairing(u, v)
    if uv != 0:
        raise PeriodError(f"(u.v) = {uv} != 0, so (sigma.sigma) != 0")
    uu = lattice.pairing(u, u)
    vv = lattice.pairing(v, v)
    if uu != d * vv:
        raise PeriodError(f"(u.u) = {uu} != d*(v.v) = {d * vv}, so (sigma.sigma) != 0")
    if uu + d * vv <= 0:
        raise PeriodError("(sigma.sigma-bar) = (u.u) + d*(v.v) must be positive")
    return MarkedHodgeData(lattice, u, v, d)


@dataclass(frozen=True)
class HodgeDecomposition:
    ns: Sublattice   # Neron-Severi part: orthogonal to u and v
    t: Sublattice    # transcendental part: NS^perp, primitive
    picard_number: int


def hodge_decomposition(h):
    """NS = {x : (x.u) = (x.v) = 0}, T = NS^perp; both primitive."""
    lat = h.lattice
    from .exact import clear_denominators
    gu, _ = clear_denominators(mat_vec([list(r) for r in lat.gram], list(h.u)))
    gv, _ = clear_denominators(mat_vec([list(r) for r in lat.gram], list(h.v)))
    ns_basis = integer_kernel([gu, gv])
    ns = sublattice_from_columns(lat, ns_basis)
    t = orthogonal_complement(lat, ns)
    assert is_primitive(lat, t)
    return HodgeDecomposition(ns, t, ns.rank)


def is_projective(h):
    """Surrogate flag: NS contains a vector of positive square."""
    ns = hodge_decomposition(h).ns
    if ns.rank == 0:
        return False
    return signature(ns.as_lattice())[0] >= 1


def apply_isometry(phi, h):
    """Image Hodge datum (phi(u), phi(v), same d); always valid for isometries."""
    if phi.source.gram != h.lattice.gram:
        raise ValueError("isometry source does not match the Hodge datum")
    return validate_period(phi.target, phi.apply(list(h.u)), phi.apply(list(h.v)), h.d)


def is_hodge_isometry(phi, h_src, h_tgt):
    """Whether phi maps the period line of h_src to that of h_tgt.

    Solves phi(u) + sqrt(-d) phi(v) = lambda (u' + sqrt(-d) v') for
    lambda = p + q sqrt(-d) in Q(sqrt(-d)); returns (bool, (p, q) or None).
    """
    if h_src.d != h_tgt.d:
        raise ModelMismatchError(
            "periods live over different imaginary quadratic fields; "
            "comparison is undecidable in this model")
    d = h_src.d
    pu = phi.apply(list(h_src.u))
    pv = phi.apply(list(h_src.v))
    n = len(pu)
    # unknowns (p, q): pu = p u' - q d v',  pv = q u' + p v'
    rows = []
    rhs = []
    for i in range(n):
        rows.append([h_tgt.u[i], -d * h_tgt.v[i]])
        rhs.append(pu[i])
    for i in range(n):
        rows.append([h_tgt.v[i], h_tgt.u[i]])
        rhs.append(pv[i])
    sol, _ = solve_and_kernel(rows, rhs)
    if sol is None:
        return False, None
    p, q = sol
    if p == 0 and q == 0:
        return False, None
    return True, (p, q)


@dataclass(frozen=True)
class TwistedHodgeData:
    base: MarkedHodgeData
    B: tuple[Fraction, ...]
    u_twisted: tuple[Fraction, ...]  # (0, u, (B.u)) in Mukai coordinates
    v_twisted: tuple[Fraction, ...]


def twist_hodge(h, B):
    """Twisted period sigma_B = exp(B)(sigma) = (0, sigma, (B.sigma)).

    Checks (sigma_B.sigma_B) = 0 in the Mukai pairing and that the complement
    of exp(B)(Lambda_B) pairs to zero with sigma_B (type (1,1)).
    """
    from .bfield import exp_b_image, lambda_B, mukai_extension
    lat = h.lattice
    B = tuple(Fraction(x) for x in B)
    mt = mukai_extension(lat)
    ut = tuple(h.u) + (Fraction(0), lat.pairing(B, h.u))
    vt = tuple(h.v) + (Fraction(0), lat.pairing(B, h.v))
    # (sigma_B)^2 = 0 over Q(sqrt(-d)): real and imaginary parts vanish
    assert mt.pairing(ut, ut) == h.d * mt.pairing(vt, vt)
    assert mt.pairing(ut, vt) == 0
    comp = orthogonal_complement(mt, exp_b_image(lat, B, lambda_B(lat, B)))
    for c in comp.basis_columns():
        assert mt.pairing(c, ut) == 0 and mt.pairing(c, vt) == 0
    return TwistedHodgeData(h, B, ut, vt)


def chain_hodge_data(h, reflections):
    """Images of h along s_{b_1}, then s_{b_2}, ...; each step a Hodge isometry."""
    from .isometries import reflection
    data = [h]
    for datum in reflections:
        phi = reflection(data[-1].lattice, list(datum.b))
        nxt = apply_isometry(phi, data[-1])
        ok, lam = is_hodge_isometry(phi, data[-1], nxt)
        assert ok and lam == (1, 0)
        data.append(nxt)
    return data


def freeze_vec(v):
    return tuple(Fraction(x) for x in v)
