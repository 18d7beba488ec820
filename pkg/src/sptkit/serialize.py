"""JSON wire formats for groups, charges, cocycles, representations, states,
circuits, and F-functions.

Complex numbers are [re, im] pairs; exact phases are {"num": p, "den": q}
meaning exp(2 pi i p / q), approximate ones {"angle": x}. Group references
are catalog names where possible, embedded tables otherwise.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .cohomology import Cocycle
from .errors import ValidationError
from .groups import Charge, FiniteGroup, PhaseValue, build_group
from .locality import FFunction
from .mps import SymmetricMPS
from .projreps import MultiplierRep
from .states import Gate, GateCircuit


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ValidationError(
            f"malformed JSON in {path}: line {err.lineno}, column {err.colno}: "
            f"{err.msg}") from err


# -- primitives --------------------------------------------------------------


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def complex_from_json(v) -> complex:
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(v) -> np.ndarray:
    return np.array([[complex_from_json(z) for z in row] for row in v], dtype=complex)


def phase_to_json(p: PhaseValue) -> dict:
    if p.is_exact:
        return {"num": p.frac.numerator, "den": p.frac.denominator}
    return {"angle": p.angle}


def phase_from_json(v) -> PhaseValue:
    if "angle" in v:
        return PhaseValue(angle=float(v["angle"]))
    return PhaseValue(frac=Fraction(int(v["num"]), int(v["den"])))


# -- groups ------------------------------------------------------------------


def group_to_json(g: FiniteGroup) -> dict:
    return {"name": g.name, "order": g.order,
            "mult": [list(row) for row in g.mult], "identity": g.identity}


def group_from_json(v) -> FiniteGroup:
    if isinstance(v, str):
        return build_group(v)
    g = build_group({"mult": v["mult"], "identity": v.get("identity", 0),
                     "name": v.get("name", "group")})
    if "order" in v and v["order"] != g.order:
        raise ValidationError("declared order does not match the table")
    return g


def _group_ref(g: FiniteGroup):
    try:
        if build_group(g.name) == g:
            return g.name
    except ValidationError:
        pass
    return group_to_json(g)


def _resolve_group(ref, group: FiniteGroup | None):
    if group is not None:
        if isinstance(ref, str) and ref not in (group.name, ""):
            raise ValidationError(
                f"file references group {ref!r} but {group.name!r} was supplied")
        return group
    return group_from_json(ref)


# -- charges and cocycles ----------------------------------------------------


def charge_to_json(c: Charge) -> dict:
    return {"group": _group_ref(c.group),
            "phases": [phase_to_json(v) for v in c.values]}


def charge_from_json(v, group: FiniteGroup | None = None) -> Charge:
    grp = _resolve_group(v["group"], group)
    return Charge(grp, tuple(phase_from_json(x) for x in v["phases"]))


def cocycle_to_json(mu: Cocycle) -> dict:
    return {"group": _group_ref(mu.group),
            "phases": [[phase_to_json(v) for v in row] for row in mu.table]}


def cocycle_from_json(v, group: FiniteGroup | None = None) -> Cocycle:
    grp = _resolve_group(v["group"], group)
    table = tuple(tuple(phase_from_json(x) for x in row) for row in v["phases"])
    return Cocycle(grp, table)


# -- representations ---------------------------------------------------------


def rep_to_json(r: MultiplierRep) -> dict:
    return {"group": _group_ref(r.group), "dim": r.dim,
            "matrices": [matrix_to_json(m) for m in r.matrices]}


def rep_matrices_from_json(v, group: FiniteGroup | None = None):
    grp = _resolve_group(v["group"], group)
    mats = [matrix_from_json(m) for m in v["matrices"]]
    if "dim" in v and mats and mats[0].shape[0] != v["dim"]:
        raise ValidationError("declared dimension does not match the matrices")
    return grp, mats


# -- states ------------------------------------------------------------------


def state_to_json(m: SymmetricMPS) -> dict:
    tensor = [matrix_to_json(m.tensor[i]) for i in range(m.d)]
    onsite = {"group": _group_ref(m.group), "dim": m.d,
              "matrices": [matrix_to_json(u) for u in m.onsite]}
    return {"d": m.d, "D": m.bond_dim, "tensor": tensor,
            "group": _group_ref(m.group), "onsite": onsite, "label": m.label}


def state_from_json(v) -> SymmetricMPS:
    grp = group_from_json(v["group"])
    tensor = np.stack([matrix_from_json(layer) for layer in v["tensor"]])
    _, onsite = rep_matrices_from_json(v["onsite"], grp)
    return SymmetricMPS(tensor=tensor, group=grp, onsite=tuple(onsite),
                        label=v.get("label", ""))


# -- circuits ----------------------------------------------------------------


def circuit_to_json(c: GateCircuit) -> dict:
    gates = [{"support": list(g.support), "matrix": matrix_to_json(g.matrix),
              "layer": g.layer} for g in c.gates]
    charges = [[phase_to_json(q(g)) for g in c.group.elements()]
               for site in c.site_basis_charges for q in site]
    return {"group": _group_ref(c.group), "length": c.length,
            "site_dims": list(c.site_dims), "gates": gates,
            "basis_charges": charges}


def circuit_from_json(v) -> GateCircuit:
    grp = group_from_json(v["group"])
    gates = [Gate(support=tuple(g["support"]), matrix=matrix_from_json(g["matrix"]),
                  layer=g["layer"]) for g in v["gates"]]
    charges = []
    flat = v.get("basis_charges", [])
    dims = v["site_dims"]
    idx = 0
    for dim in dims:
        site = []
        for _ in range(dim):
            vals = tuple(phase_from_json(x) for x in flat[idx])
            site.append(Charge(grp, vals))
            idx += 1
        charges.append(site)
    return GateCircuit(group=grp, length=v["length"], gates=gates,
                       site_dims=list(dims), site_basis_charges=charges)


# -- charged product specifications ------------------------------------------


def charged_spec_to_json(spec) -> dict:
    charges = {str(site): [phase_to_json(q(g)) for g in spec.group.elements()]
               for site, q in sorted(spec.charges.items())}
    return {"group": _group_ref(spec.group), "charges": charges}


def charged_spec_from_json(v, group: FiniteGroup | None = None):
    from .states import ChargedProductSpec

    grp = _resolve_group(v["group"], group)
    charges = {}
    for site, phases in v.get("charges", {}).items():
        charges[int(site)] = Charge(grp, tuple(phase_from_json(x) for x in phases))
    return ChargedProductSpec(group=grp, charges=charges)


# -- cohomology classes --------------------------------------------------------


def class_to_json(cls) -> dict:
    fingerprint = None
    if cls.fingerprint is not None:
        fingerprint = [[{"num": f.numerator, "den": f.denominator} for f in row]
                       for row in cls.fingerprint]
    return {"exponents": list(cls.exponents), "trivial": cls.is_trivial,
            "fingerprint": fingerprint, "divisors": list(cls.divisors)}


# -- F-functions -------------------------------------------------------------


def ffunction_to_json(ff: FFunction) -> dict:
    return {
        "r_max": ff.r_max,
        "log_values": [float(x) for x in ff.log_values],
        "values": [float(x) for x in ff.values],
        "c_convolution": ff.c_convolution,
        "c_integrability": ff.c_integrability,
        "underflow_at": ff.underflow_at,
        "decay": {"kind": ff.source.kind,
                  "params": {k: v for k, v in ff.source.params.items()}},
    }
