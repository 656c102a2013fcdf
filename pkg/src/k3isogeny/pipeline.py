"""End-to-end orchestration and machine-checkable isogeny certificates.

run_pipeline reads two marked Hodge data and a rational Hodge isometry,
factors the isometry into reflections, lifts every reflection through its
B-field to an integral Mukai-lattice isometry, and records every check in a
JSON-serializable certificate.  verify_certificate independently re-runs all
checks from the certificate alone.

All rationals are serialized as "p/q" strings so certificates round-trip
byte-exactly.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .bfield import (
    bfield_from_reflection,
    brauer_order,
    build_lift,
    complement_Un,
    exp_b_image,
    extend_to_mukai,
    h2_sign_flip,
    lambda_B,
    orientation_sign,
    verify_complement_swap,
    verify_integrality,
    verify_lift_diagram,
    BFieldLift,
)
from .exact import freeze, mat_eq
from .hodge import (
    ModelMismatchError,
    PeriodError,
    apply_isometry,
    chain_hodge_data,
    hodge_decomposition,
    is_hodge_isometry,
    is_projective,
    validate_period,
)
from .isometries import (
    RationalIsometry,
    NotAnIsometryError,
    cartan_dieudonne,
    compose,
    compose_reflections,
    reflection,
    ReflectionDatum,
)
from .lattices import (
    Lattice,
    direct_sum,
    is_primitive,
    signature,
    standard_lattice,
)
from .mukai import correspondence_from_mukai_isometry, extract_22

CERT_FORMAT = "k3isogeny-certificate/1"


class InputError(ValueError):
    """Malformed input or certificate document (CLI exit code 1)."""


class PreconditionError(ValueError):
    """A named mathematical precondition fails (CLI exit code 2)."""


# ---------------------------------------------------------------------------
# exact JSON encoding


def fr_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fr(s):
    try:
        if isinstance(s, int):
            return Fraction(s)
        if isinstance(s, str):
            return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {s!r}") from exc
    raise InputError(f"bad rational {s!r}")


def vec_str(v):
    return [fr_str(x) for x in v]


def parse_vec(v):
    if not isinstance(v, list):
        raise InputError("expected a list of rationals")
    return [parse_fr(x) for x in v]


def mat_str(m):
    return [vec_str(row) for row in m]


def parse_mat(m):
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise InputError("expected a matrix (list of lists)")
    return [parse_vec(row) for row in m]


def parse_int_vec(v):
    vv = parse_vec(v)
    if any(x.denominator != 1 for x in vv):
        raise InputError("expected an integer vector")
    return [int(x) for x in vv]


def input_digest(doc):
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# input parsing


def parse_lattice(spec):
    if isinstance(spec, str):
        try:
            return standard_lattice(spec)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if isinstance(spec, dict) and "gram" in spec:
        gram = spec["gram"]
        if not isinstance(gram, list):
            raise InputError("lattice gram must be a list of rows")
        try:
            return Lattice(freeze([[int(x) for x in row] for row in gram]),
                           label=spec.get("label"))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad gram matrix: {exc}") from exc
    raise InputError("lattice must be a standard name or {'gram': ...}")


def parse_period(lat, spec):
    if not isinstance(spec, dict):
        raise InputError("period must be an object with u, v, d")
    for key in ("u", "v", "d"):
        if key not in spec:
            raise InputError(f"period is missing {key!r}")
    try:
        return validate_period(lat, parse_vec(spec["u"]), parse_vec(spec["v"]),
                               int(spec["d"]))
    except PeriodError as exc:
        raise PreconditionError(f"invalid period: {exc}") from exc


def parse_input_document(doc):
    if not isinstance(doc, dict):
        raise InputError("input document must be a JSON object")
    for key in ("lattice", "source_period", "target_period", "isometry"):
        if key not in doc:
            raise InputError(f"input document is missing {key!r}")
    lat = parse_lattice(doc["lattice"])
    h_src = parse_period(lat, doc["source_period"])
    h_tgt = parse_period(lat, doc["target_period"])
    mat = parse_mat(doc["isometry"])
    if len(mat) != lat.rank or any(len(r) != lat.rank for r in mat):
        raise InputError("isometry matrix has the wrong shape")
    try:
        phi = RationalIsometry(lat, lat, freeze(mat))
    except NotAnIsometryError as exc:
        raise PreconditionError(f"not an isometry: {exc}") from exc
    return lat, h_src, h_tgt, phi


def canonical_input(doc):
    """Re-serialize an input document with canonical rational strings."""
    lat, h_src, h_tgt, phi = parse_input_document(doc)
    return {
        "lattice": doc["lattice"] if isinstance(doc["lattice"], str)
        else {"gram": [[int(x) for x in row] for row in doc["lattice"]["gram"]]},
        "source_period": {"u": vec_str(h_src.u), "v": vec_str(h_src.v),
                          "d": h_src.d},
        "target_period": {"u": vec_str(h_tgt.u), "v": vec_str(h_tgt.v),
                          "d": h_tgt.d},
        "isometry": mat_str(phi.matrix),
    }


# ---------------------------------------------------------------------------
# certificate construction


def decompose_document(lat, phi):
    data = cartan_dieudonne(phi)
    recomposed = compose_reflections(lat, data)
    return {
        "reflections": [{"b": list(d.b), "square": d.square} for d in data],
        "length": len(data),
        "rank": lat.rank,
        "recomposes": mat_eq([list(r) for r in recomposed.matrix],
                             [list(r) for r in phi.matrix]),
    }


def _step_record(lat, lift, h_before, h_after):
    t_src = hodge_decomposition(h_before).t
    t_tgt = hodge_decomposition(h_after).t
    corr = correspondence_from_mukai_isometry(lift.phi_tilde)
    return {
        "b": list(lift.bfield_src.b),
        "n": lift.bfield_src.n,
        "B": vec_str(lift.bfield_src.B),
        "b_target": list(lift.b_target),
        "B_target": vec_str(lift.B_target),
        "lambda_B_index": lift.lambdaB_src.index,
        "lambda_B_invariants": list(lift.lambdaB_src.quotient_invariants),
        "phi_tilde": mat_str(lift.phi_tilde.matrix),
        "orientation_before": lift.orientation_before,
        "orientation_after": lift.orientation_after,
        "phi_sign": lift.phi_sign,
        "brauer_order_source": brauer_order(lat, lift.bfield_src.B, t_src),
        "brauer_order_target": brauer_order(lat, lift.B_target, t_tgt),
        "block22": mat_str(extract_22(corr)),
    }


def run_pipeline(doc, decompose_only=False):
    """Build an isogeny certificate (or a bare factorization document).

    Raises InputError on parse failures and PreconditionError on failed
    mathematical preconditions, unless decompose_only is set, in which case a
    Hodge failure degrades to the bare Cartan-Dieudonne factorization.
    """
    lat, h_src, h_tgt, phi = parse_input_document(doc)
    if signature(lat)[0] != 3:
        raise PreconditionError(
            "the pipeline needs three positive directions on H^2 "
            "(four on the Mukai lattice)")
    try:
        ok, lam = is_hodge_isometry(phi, h_src, h_tgt)
    except ModelMismatchError as exc:
        if decompose_only:
            return {"decompose_only": True, **decompose_document(lat, phi)}
        raise PreconditionError(str(exc)) from exc
    if not ok:
        if decompose_only:
            return {"decompose_only": True, **decompose_document(lat, phi)}
        raise PreconditionError("the isometry is not a Hodge isometry")

    data = cartan_dieudonne(phi)
    assert len(data) <= lat.rank
    chain = chain_hodge_data(h_src, data)
    steps = []
    for i, datum in enumerate(data):
        step_phi = reflection(lat, list(datum.b))
        lift = build_lift(step_phi, list(datum.b))
        steps.append(_step_record(lat, lift, chain[i], chain[i + 1]))

    periods = [{"u": vec_str(h.u), "v": vec_str(h.v), "d": h.d,
                "projective": is_projective(h)} for h in chain]
    inp = canonical_input(doc)
    cert = {
        "format": CERT_FORMAT,
        "input": inp,
        "input_digest": input_digest(inp),
        "hodge_lambda": [fr_str(lam[0]), fr_str(lam[1])],
        "steps": steps,
        "intermediate_periods": periods,
    }
    cert["verification"] = verify_certificate(cert)
    return cert


# ---------------------------------------------------------------------------
# certificate verification


class _Report:
    def __init__(self):
        self.checks = []

    def record(self, name, passed, witness=None):
        entry = {"name": name, "pass": bool(passed)}
        if witness is not None and not passed:
            entry["witness"] = witness
        self.checks.append(entry)
        return passed

    def result(self):
        return {"checks": self.checks,
                "all_pass": all(c["pass"] for c in self.checks)}


def _require_fields(doc, fields, where):
    for f in fields:
        if f not in doc:
            raise InputError(f"{where} is missing {f!r}")


def verify_certificate(cert):
    """Independently re-run every check; returns {'checks': [...], 'all_pass'}.

    Raises InputError on malformed documents; mathematical failures are
    reported as failing checks, never exceptions.
    """
    if not isinstance(cert, dict):
        raise InputError("certificate must be a JSON object")
    _require_fields(cert, ("format", "input", "input_digest", "hodge_lambda",
                           "steps", "intermediate_periods"), "certificate")
    if cert["format"] != CERT_FORMAT:
        raise InputError(f"unknown certificate format {cert['format']!r}")

    rep = _Report()
    try:
        lat, h_src, h_tgt, phi = parse_input_document(cert["input"])
    except PreconditionError as exc:
        rep.record("input_preconditions", False, witness={"error": str(exc)})
        return rep.result()
    rep.record("input_digest", cert["input_digest"] == input_digest(
        canonical_input(cert["input"])))

    lam = tuple(parse_fr(x) for x in cert["hodge_lambda"])
    try:
        ok, lam_actual = is_hodge_isometry(phi, h_src, h_tgt)
    except ModelMismatchError:
        ok, lam_actual = False, None
    rep.record("hodge_isometry", ok and lam_actual == lam,
               witness={"recorded": [fr_str(x) for x in lam]})

    steps = cert["steps"]
    if not isinstance(steps, list):
        raise InputError("steps must be a list")
    rep.record("step_count_bound", len(steps) <= lat.rank,
               witness={"steps": len(steps), "rank": lat.rank})

    data = []
    parse_ok = True
    for idx, step in enumerate(steps):
        _require_fields(step, ("b", "n", "B", "b_target", "B_target",
                               "lambda_B_index", "lambda_B_invariants",
                               "phi_tilde", "orientation_before",
                               "orientation_after", "phi_sign",
                               "brauer_order_source", "brauer_order_target",
                               "block22"), f"step {idx}")
        try:
            data.append(ReflectionDatum(tuple(parse_int_vec(step["b"])),
                                        int(lat.square(parse_int_vec(step["b"])))))
        except ValueError as exc:
            rep.record(f"step{idx}.reflection_datum", False,
                       witness={"error": str(exc)})
            parse_ok = False
    if not parse_ok:
        return rep.result()

    recomposed = compose_reflections(lat, data)
    rep.record("recomposition", mat_eq([list(r) for r in recomposed.matrix],
                                       [list(r) for r in phi.matrix]))

    periods = cert["intermediate_periods"]
    if not isinstance(periods, list):
        raise InputError("intermediate_periods must be a list")
    chain_ok = len(periods) == len(steps) + 1
    parsed_chain = []
    if chain_ok:
        try:
            for p in periods:
                _require_fields(p, ("u", "v", "d", "projective"), "period")
                parsed_chain.append(validate_period(
                    lat, parse_vec(p["u"]), parse_vec(p["v"]), int(p["d"])))
        except PeriodError as exc:
            rep.record("intermediate_periods_valid", False,
                       witness={"error": str(exc)})
            chain_ok = False
        else:
            rep.record("intermediate_periods_valid", True)
    if chain_ok:
        rep.record("chain_starts_at_source",
                   parsed_chain[0].u == h_src.u and parsed_chain[0].v == h_src.v
                   and parsed_chain[0].d == h_src.d)
        link_ok = True
        for i, datum in enumerate(data):
            step_phi = reflection(lat, list(datum.b))
            img = apply_isometry(step_phi, parsed_chain[i])
            if img.u != parsed_chain[i + 1].u or img.v != parsed_chain[i + 1].v:
                link_ok = False
                rep.record(f"step{i}.chain_link", False,
                           witness={"expected_u": vec_str(img.u)})
        rep.record("chain_links", link_ok)
        rep.record("projectivity_flags",
                   all(is_projective(h) and bool(p["projective"])
                       for h, p in zip(parsed_chain, periods)))
        fin = parsed_chain[-1]
        try:
            from .isometries import identity_isometry
            ok_fin, _ = is_hodge_isometry(identity_isometry(lat), fin, h_tgt)
        except ModelMismatchError:
            ok_fin = False
        rep.record("chain_ends_at_target", ok_fin)
    else:
        rep.record("chain_shape", False,
                   witness={"periods": len(periods), "steps": len(steps)})

    for idx, (step, datum) in enumerate(zip(steps, data)):
        _verify_step(rep, lat, idx, step, datum,
                     parsed_chain[idx] if chain_ok else None,
                     parsed_chain[idx + 1] if chain_ok else None)

    return rep.result()


def _verify_step(rep, lat, idx, step, datum, h_before, h_after):
    tag = f"step{idx}"
    b = list(datum.b)
    try:
        bf = bfield_from_reflection(lat, b)
    except ValueError as exc:
        rep.record(f"{tag}.bfield", False, witness={"error": str(exc)})
        return
    ok_n = int(step["n"]) == bf.n
    ok_B = parse_vec(step["B"]) == list(bf.B)
    rep.record(f"{tag}.bfield_data", ok_n and ok_B,
               witness={"n": bf.n, "B": vec_str(bf.B)})

    step_phi = reflection(lat, b)
    b_target = parse_int_vec(step["b_target"])
    expected_bt = [-x for x in step_phi.apply(b)]
    rep.record(f"{tag}.b_target", [Fraction(x) for x in b_target] == expected_bt)
    phi_sign = int(step["phi_sign"])
    rep.record(f"{tag}.B_target",
               parse_vec(step["B_target"]) == [phi_sign * x for x in bf.B])

    lam_sub = lambda_B(lat, bf.B)
    rep.record(f"{tag}.lambda_B_index",
               lam_sub.index == abs(bf.n)
               and int(step["lambda_B_index"]) == lam_sub.index,
               witness={"index": lam_sub.index})
    invs = list(lam_sub.quotient_invariants)
    rep.record(f"{tag}.lambda_B_cyclic",
               len(invs) <= 1
               and [int(x) for x in step["lambda_B_invariants"]] == invs,
               witness={"invariants": invs})

    image = exp_b_image(lat, bf.B, lam_sub)
    mukai = image.parent
    rep.record(f"{tag}.exp_B_primitive", is_primitive(mukai, image))
    try:
        complement_Un(lat, bf)
        rep.record(f"{tag}.complement_Un", True)
    except AssertionError:
        rep.record(f"{tag}.complement_Un", False)

    raw = extend_to_mukai(step_phi, bf)
    sign_before = orientation_sign(raw)
    rep.record(f"{tag}.orientation_before",
               int(step["orientation_before"]) == sign_before)
    expected = raw if phi_sign == 1 else compose(h2_sign_flip(raw.target), raw)
    recorded_mat = parse_mat(step["phi_tilde"])
    rep.record(f"{tag}.phi_tilde_matches_formula",
               mat_eq(recorded_mat, [list(r) for r in expected.matrix]))

    try:
        recorded = RationalIsometry(raw.source, raw.target, freeze(recorded_mat))
    except NotAnIsometryError:
        rep.record(f"{tag}.phi_tilde_isometry", False)
        return
    rep.record(f"{tag}.phi_tilde_isometry", True)
    rep.record(f"{tag}.phi_tilde_integral", verify_integrality(recorded))
    sign_after = orientation_sign(recorded)
    rep.record(f"{tag}.orientation_after",
               sign_after == 1 and int(step["orientation_after"]) == 1)

    lift = BFieldLift(
        phi=step_phi, bfield_src=bf, b_target=tuple(b_target),
        B_target=tuple(parse_vec(step["B_target"])),
        lambdaB_src=lam_sub, lambdaB_tgt=lambda_B(lat, bf.B),
        phi_tilde=recorded,
        orientation_before=sign_before, orientation_after=sign_after,
        phi_sign=phi_sign)
    ok_diag, wit = verify_lift_diagram(lift)
    rep.record(f"{tag}.diagram_commutes", ok_diag,
               witness={"x": [int(v) for v in wit]} if wit else None)
    rep.record(f"{tag}.swaps_complement_basis", verify_complement_swap(lift))

    corr = correspondence_from_mukai_isometry(recorded)
    block = parse_mat(step["block22"])
    # H^2 block of phi~ is the reflection plus a rank-one B-field correction:
    # z -> phi_sign * (s_b(z) + (B.z) b')
    bcol = [lat.pairing(lat.basis_vector(j), bf.B) for j in range(lat.rank)]
    expected_block = [[phi_sign * (step_phi.matrix[i][j]
                                   + Fraction(b_target[i]) * bcol[j])
                       for j in range(lat.rank)] for i in range(lat.rank)]
    rep.record(f"{tag}.block22",
               mat_eq(block, extract_22(corr))
               and mat_eq(block, expected_block))

    if h_before is not None and h_after is not None:
        t_src = hodge_decomposition(h_before).t
        t_tgt = hodge_decomposition(h_after).t
        bo_src = brauer_order(lat, bf.B, t_src)
        bo_tgt = brauer_order(lat, lift.B_target, t_tgt)
        rep.record(f"{tag}.brauer_orders",
                   int(step["brauer_order_source"]) == bo_src
                   and int(step["brauer_order_target"]) == bo_tgt
                   and abs(bf.n) % bo_src == 0 and abs(bf.n) % bo_tgt == 0,
                   witness={"source": bo_src, "target": bo_tgt})


# ---------------------------------------------------------------------------
# built-in demo documents


def _k3_vec(entries):
    v = [0] * 22
    for i, x in entries.items():
        v[i] = x
    return v


def _toy_period():
    # u = e2 - f2, v = e3 - f3 in the second and third hyperbolic summands
    return {"u": vec_str(_k3_vec({2: 1, 3: -1})),
            "v": vec_str(_k3_vec({4: 1, 5: -1})), "d": 1}


def _reflective_document():
    lat = standard_lattice("K3")
    b = _k3_vec({0: 1, 1: -2})  # square 4, orthogonal to the toy period
    phi = reflection(lat, b)
    return {"lattice": "K3", "source_period": _toy_period(),
            "target_period": _toy_period(), "isometry": mat_str(phi.matrix)}


def _minus_id_document():
    lat = standard_lattice("K3")
    mat = [[-1 if i == j else 0 for j in range(lat.rank)] for i in range(lat.rank)]
    return {"lattice": "K3", "source_period": _toy_period(),
            "target_period": _toy_period(), "isometry": mat_str(mat)}


def _decompose_document_input():
    lat = direct_sum(standard_lattice("U"), standard_lattice("U"))
    phi = compose(reflection(lat, [1, -1, 0, 0]), reflection(lat, [0, 0, 1, -2]))
    return {"lattice": {"gram": [[int(x) for x in r] for r in lat.gram]},
            "isometry": mat_str(phi.matrix)}


def _random_document(seed):
    """A random product of reflections in axes orthogonal to the toy period.

    The axes live in the first hyperbolic summand and the E8 summands, so
    every factor fixes the period and the product is a Hodge isometry.
    """
    import random

    from .isometries import make_primitive

    rng = random.Random(seed)
    lat = standard_lattice("K3")
    allowed = [0, 1] + list(range(6, 22))
    data = []
    while len(data) < rng.randint(1, 3):
        v = _k3_vec({i: rng.randint(-2, 2) for i in rng.sample(allowed, 4)})
        if all(x == 0 for x in v) or lat.square(v) == 0:
            continue
        data.append(make_primitive(lat, v))
    phi = compose_reflections(lat, data)
    return {"lattice": "K3", "source_period": _toy_period(),
            "target_period": _toy_period(), "isometry": mat_str(phi.matrix)}


DEMO_NAMES = ("reflective", "minus-id", "decompose", "lift", "random")


def demo_document(name, seed=0):
    if name == "reflective":
        return _reflective_document()
    if name == "minus-id":
        return _minus_id_document()
    if name == "decompose":
        return _decompose_document_input()
    if name == "lift":
        return {"lattice": "K3", "b": _k3_vec({0: 1, 1: -2})}
    if name == "random":
        return _random_document(seed)
    raise InputError(f"unknown demo {name!r}; choose from {DEMO_NAMES}")


# ---------------------------------------------------------------------------
# single-reflection lift reports (CLI `lift` verb)


def lift_report(doc):
    if not isinstance(doc, dict) or "lattice" not in doc or "b" not in doc:
        raise InputError("lift input needs 'lattice' and 'b'")
    lat = parse_lattice(doc["lattice"])
    b = parse_int_vec(doc["b"])
    try:
        phi = reflection(lat, b)
        lift = build_lift(phi, b)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    (v1, v2), gram = complement_Un(lat, lift.bfield_src)
    return {
        "b": b,
        "n": lift.bfield_src.n,
        "B": vec_str(lift.bfield_src.B),
        "lambda_B_index": lift.lambdaB_src.index,
        "lambda_B_invariants": list(lift.lambdaB_src.quotient_invariants),
        "complement_basis": [[int(x) for x in v1], [int(x) for x in v2]],
        "complement_gram": gram,
        "phi_tilde": mat_str(lift.phi_tilde.matrix),
        "orientation_before": lift.orientation_before,
        "orientation_after": lift.orientation_after,
        "phi_sign": lift.phi_sign,
    }
