import math
from fractions import Fraction

import numpy as np
import pytest

from sptkit.cohomology import compute_h2, trivial_cocycle
from sptkit.errors import ResourceGuardError, ValidationError
from sptkit.groups import build_group, charge_from_fractions, cyclic_charge, trivial_charge
from sptkit.mps import connected_correlation, schmidt_spectrum, spectral_gap
from sptkit.states import (
    ChargedProductSpec,
    aklt_state,
    apply_circuit_to_product,
    catalog_state,
    charge_transfer_circuit,
    cluster_state,
    fixed_point_state,
    gate_equivariance_residual,
    product_overlap,
    product_state,
    spin1_product_state,
    stack_states,
)


def test_aklt_catalog():
    m = catalog_state("aklt")
    assert (m.d, m.bond_dim) == (3, 2)
    assert m.canonical and m.injective
    sp = schmidt_spectrum(m)
    assert np.allclose(sp.values, [0.5, 0.5], atol=1e-10)


def test_cluster_blocked_tensor_entries_exact():
    m = catalog_state("cluster")
    assert (m.d, m.bond_dim) == (4, 2)
    # entries of the blocked tensor are 0 or +-1/2 exactly
    vals = np.unique(np.round(np.abs(m.tensor), 12))
    assert set(vals.tolist()) <= {0.0, 0.5}
    # one-shot transfer: full gap
    assert spectral_gap(m.tensor) > 0.999


def test_product_catalog_charges():
    g = build_group("Z4")
    q = cyclic_charge(g)
    m = catalog_state("product", group=g, charge=q)
    assert m.bond_dim == 1
    for k in g.elements():
        assert abs(m.onsite[k][0, 0] - q(k).to_complex()) < 1e-14


def test_fixed_point_trivial_cocycle_product_like():
    grp = build_group("Z2")
    m = fixed_point_state(trivial_cocycle(grp))
    assert m.bond_dim == 2 and m.d == 4
    # maximally entangled bonds: Schmidt values 1/D
    sp = schmidt_spectrum(m)
    assert np.allclose(sp.values, [0.5, 0.5], atol=1e-12)


def test_fixed_point_rejects_wrong_rep():
    from sptkit.projreps import extract_multiplier

    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    eye = np.eye(1, dtype=complex)
    trivial_rep = extract_multiplier(grp, [eye] * 4)[0]
    with pytest.raises(ValidationError):
        fixed_point_state(gen.representative(), rep=trivial_rep)


def test_fixed_point_with_pauli_rep_small_bond():
    from sptkit.cohomology import snap_cocycle
    from sptkit.projreps import extract_multiplier

    grp = build_group("Z2xZ2")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    rep, mu = extract_multiplier(grp, [np.eye(2, dtype=complex), x, z, x @ z])
    m = fixed_point_state(snap_cocycle(mu, 16), rep=rep)
    assert m.bond_dim == 2 and m.d == 4


def test_stack_with_trivial_product_keeps_correlations():
    m = aklt_state()
    p = spin1_product_state()
    stacked = stack_states(m, p)
    assert stacked.d == 9 and stacked.bond_dim == 2
    from sptkit.mps import canonicalize

    stacked = canonicalize(stacked)
    sz = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
    sz_stacked = np.kron(sz, np.eye(3))
    for r in (1, 2, 3):
        a = connected_correlation(m, sz, sz, r)
        b = connected_correlation(stacked, sz_stacked, sz_stacked, r)
        assert abs(a - b) < 1e-10


def test_stack_dimensions():
    m = aklt_state()
    s = stack_states(m, m)
    assert s.d == 9 and s.bond_dim == 4


def test_circuit_all_trivial_identity():
    grp = build_group("Z4")
    spec = ChargedProductSpec(group=grp)
    circ, final_spec, initial, final = charge_transfer_circuit(spec, 4)
    for gate in circ.gates:
        assert np.array_equal(gate.matrix, np.eye(gate.matrix.shape[0]))
    out = apply_circuit_to_product(circ, initial)
    assert abs(product_overlap(out, initial) - 1) < 1e-12
    assert final_spec.support() == []


def test_circuit_single_charge_z8():
    grp = build_group("Z8")
    spec = ChargedProductSpec(group=grp, charges={0: cyclic_charge(grp)})
    circ, final_spec, initial, final = charge_transfer_circuit(spec, 8)
    assert gate_equivariance_residual(circ) < 1e-12
    out = apply_circuit_to_product(circ, initial)
    assert abs(abs(product_overlap(out, final)) - 1) < 1e-12
    # window interior is neutral, the boundary accumulator carries the charge
    assert final_spec.support() == [8]
    q = final_spec.charge_at(8)
    assert all(q(g).close_to(cyclic_charge(grp)(g)) for g in grp.elements())


def test_circuit_random_z4_charges():
    rng = np.random.default_rng(7)
    grp = build_group("Z4")
    n = 12
    charges = {}
    for s in range(n):
        k = int(rng.integers(0, 4))
        if k:
            charges[s] = cyclic_charge(grp, k)
    spec = ChargedProductSpec(group=grp, charges=charges)
    circ, final_spec, initial, final = charge_transfer_circuit(spec, n)
    assert circ.layer_supports_disjoint()
    assert gate_equivariance_residual(circ) < 1e-12
    out = apply_circuit_to_product(circ, initial)
    assert abs(abs(product_overlap(out, final)) - 1) < 1e-12
    assert all(s >= n for s in final_spec.support())
    # boundary accumulator equals the total window charge
    total = spec.total_charge(range(n))
    boundary = final_spec.charge_at(n)
    assert all(boundary(g).close_to(total(g)) for g in grp.elements())


def test_circuit_guards():
    grp = build_group("Z2")
    with pytest.raises(ValidationError):
        charge_transfer_circuit(ChargedProductSpec(group=grp), 5)
    with pytest.raises(ResourceGuardError):
        charge_transfer_circuit(ChargedProductSpec(group=grp), 26)
    with pytest.raises(ValidationError):
        charge_transfer_circuit(
            ChargedProductSpec(group=grp, charges={-1: cyclic_charge(grp)}), 4)


def test_circuit_layer_counts():
    grp = build_group("Z2")
    spec = ChargedProductSpec(group=grp, charges={1: cyclic_charge(grp)})
    circ, _, _, _ = charge_transfer_circuit(spec, 6)
    layers = circ.layers()
    assert len(layers["T"]) == 7       # one per site including the boundary
    assert len(layers["V"]) == 1 + 3   # one-site opener plus pair gates
    assert len(layers["W"]) == 3


def test_equivariance_validator_catches_bad_gate():
    grp = build_group("Z4")
    spec = ChargedProductSpec(group=grp, charges={0: cyclic_charge(grp)})
    circ, _, _, _ = charge_transfer_circuit(spec, 4)
    # corrupt a T gate into a swap of unequal-charge vectors
    bad = np.eye(6, dtype=complex)
    bad[0, 0] = bad[1, 1] = 0.0
    bad[0, 1] = bad[1, 0] = 1.0  # swaps e(x)e' with e(x)nu' (charges 1 vs q)
    circ.gates[0].matrix = bad
    assert gate_equivariance_residual(circ) > 0.1


def test_charged_product_spec_helpers():
    grp = build_group("Z4")
    q = cyclic_charge(grp)
    spec = ChargedProductSpec(group=grp, charges={0: q, 3: q.inverse()})
    assert spec.support() == [0, 3]
    total = spec.total_charge([0, 3])
    assert total.is_trivial()
    assert spec.charge_at(1).is_trivial()
