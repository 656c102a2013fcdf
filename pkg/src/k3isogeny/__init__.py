"""Exact-arithmetic toolkit for reflective Hodge isometries between K3 lattices.

Decomposes rational isometries into reflections (Cartan-Dieudonne), lifts each
reflection through its B-field to an integral isometry of the Mukai lattice,
tracks twisted Hodge data and Brauer orders, models twisted Chern characters
on Kunneth coordinates, and emits machine-checkable isogeny certificates.
"""

from .lattices import (
    Lattice,
    Sublattice,
    DiscriminantGroup,
    standard_lattice,
    direct_sum,
    sublattice_from_generators,
    orthogonal_complement,
    is_primitive,
    discriminant_group,
    signature,
)
from .isometries import (
    RationalIsometry,
    ReflectionDatum,
    is_isometry,
    reflection,
    make_primitive,
    cartan_dieudonne,
    is_cyclic,
)
from .bfield import (
    BField,
    BFieldLift,
    bfield_from_reflection,
    lambda_B,
    exp_b_embed,
    complement_Un,
    extend_to_mukai,
    orientation_sign,
    fix_orientation,
    build_lift,
    brauer_order,
)
from .hodge import (
    MarkedHodgeData,
    HodgeDecomposition,
    TwistedHodgeData,
    validate_period,
    hodge_decomposition,
    is_hodge_isometry,
    twist_hodge,
    chain_hodge_data,
)
from .mukai import (
    GradedClass,
    ProductClass,
    mul,
    mukai_pairing,
    nth_root,
    root_compatibility,
    twisted_chern,
    kappa_class,
    correspondence_action,
    extract_22,
)
from .pipeline import run_pipeline, verify_certificate

__all__ = [name for name in dir() if not name.startswith("_")]
