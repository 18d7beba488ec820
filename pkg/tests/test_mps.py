import math

import numpy as np
import pytest

from sptkit.errors import NonInjectiveError, ResourceGuardError, ValidationError
from sptkit.groups import build_group
from sptkit.mps import (
    SymmetricMPS,
    block_sites,
    boundary_averaged_expectation,
    canonicalize,
    connected_correlation,
    expectation,
    finite_chain_vector,
    schmidt_spectrum,
    spectral_gap,
    subleading_modulus,
    transfer_fixed_point,
)
from sptkit.states import aklt_state, cluster_state, fixed_point_state, product_state

SZ_CARTESIAN = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)


def random_injective_mps(rng, d, dim, group=None):
    group = group or build_group("Z1")
    tensor = rng.normal(size=(d, dim, dim)) + 1j * rng.normal(size=(d, dim, dim))
    onsite = tuple(np.eye(d, dtype=complex) for _ in group.elements())
    return SymmetricMPS(tensor=tensor, group=group, onsite=onsite, label="random")


def test_canonicalize_left_isometry():
    rng = np.random.default_rng(0)
    for _ in range(5):
        m = canonicalize(random_injective_mps(rng, 3, 4))
        ident = sum(m.tensor[i].conj().T @ m.tensor[i] for i in range(3))
        assert np.linalg.norm(ident - np.eye(4)) < 1e-10


def test_canonicalize_idempotent():
    rng = np.random.default_rng(1)
    m = canonicalize(random_injective_mps(rng, 2, 3))
    again = canonicalize(m)
    assert np.linalg.norm(again.tensor - m.tensor) < 1e-10


def test_product_state_unchanged():
    p = product_state(build_group("Z2"))
    assert p.bond_dim == 1
    assert abs(p.tensor[0, 0, 0] - 1.0) < 1e-14


def test_aklt_right_env_is_maximally_mixed():
    m = aklt_state()
    assert np.linalg.norm(m.right_env - np.eye(2) / 2) < 1e-10


def test_non_injective_refused():
    # two decoupled copies of a product state: doubly degenerate leading value
    tensor = np.zeros((2, 2, 2), dtype=complex)
    tensor[0] = np.diag([1.0, 0.0])
    tensor[1] = np.diag([0.0, 1.0])
    grp = build_group("Z1")
    m = SymmetricMPS(tensor=tensor, group=grp,
                     onsite=(np.eye(2, dtype=complex),))
    with pytest.raises(NonInjectiveError):
        canonicalize(m)


def test_transfer_fixed_point_untwisted():
    m = aklt_state()
    fp = transfer_fixed_point(m)
    assert abs(fp.eigenvalue - 1) < 1e-10
    assert fp.residual < 1e-9
    assert np.linalg.norm(fp.left - fp.left.conj().T) < 1e-10
    # left fixed point of a left-canonical MPS is the identity
    left = fp.left / fp.left[0, 0]
    assert np.linalg.norm(left - np.eye(2)) < 1e-8
    assert abs(np.trace(fp.left.conj().T @ fp.right) - 1) < 1e-9


def test_aklt_twisted_eigenvalues():
    m = aklt_state()
    # every pi rotation is a symmetry
    for g in m.group.elements():
        fp = transfer_fixed_point(m, m.onsite[g])
        assert abs(abs(fp.eigenvalue) - 1) < 1e-8
    # a non-symmetry twist dips below one
    fp = transfer_fixed_point(m, np.diag([1.0, 1.0, 0.0]).astype(complex))
    assert abs(fp.eigenvalue) < 1 - 1e-3


def test_aklt_subleading_is_one_third():
    assert abs(subleading_modulus(aklt_state().tensor) - 1 / 3) < 1e-10


def test_connected_correlation_product_state_zero():
    p = product_state(build_group("Z2"))
    op = np.array([[0.3]], dtype=complex)
    for r in (1, 2, 5):
        assert abs(connected_correlation(p, op, op, r)) < 1e-12


def test_aklt_szsz_geometric_ratio():
    m = aklt_state()
    vals = [connected_correlation(m, SZ_CARTESIAN, SZ_CARTESIAN, r)
            for r in range(1, 12)]
    for r in range(1, 10):
        ratio = abs(vals[r]) / abs(vals[r - 1])
        assert abs(ratio - 1 / 3) < 1e-6
    # known closed form: <Sz_0 Sz_r> = (4/3) (-1/3)^r
    assert abs(vals[0] - (4 / 3) * (-1 / 3)) < 1e-10
    assert abs(vals[1] - (4 / 3) * (1 / 9)) < 1e-10


def test_fixed_point_correlations_vanish_beyond_one():
    from sptkit.cohomology import trivial_cocycle
    from sptkit.groups import build_group as bg

    m = fixed_point_state(trivial_cocycle(bg("Z2")))
    rng = np.random.default_rng(3)
    d = m.d
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    a = a + a.conj().T
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    b = b + b.conj().T
    for r in (2, 3, 5):
        assert abs(connected_correlation(m, a, b, r)) < 1e-12


def test_schmidt_spectra():
    p = product_state(build_group("Z2"))
    sp = schmidt_spectrum(p)
    assert np.allclose(sp.values, [1.0])
    assert sp.blocks == [(0, 1)]

    m = aklt_state()
    sa = schmidt_spectrum(m)
    assert np.allclose(sa.values, [0.5, 0.5], atol=1e-10)
    assert sa.blocks == [(0, 2)]
    assert abs(sa.total - 1) < 1e-9
    assert sa.values[0] >= 1 / m.bond_dim ** 2 - 1e-12

    c = cluster_state()
    sc = schmidt_spectrum(c)
    assert np.allclose(sc.values, [0.5, 0.5], atol=1e-10)


def test_schmidt_lower_bound_catalog():
    from sptkit.cohomology import trivial_cocycle

    states = [aklt_state(), cluster_state(), product_state(build_group("Z2")),
              fixed_point_state(trivial_cocycle(build_group("Z2")))]
    for m in states:
        sp = schmidt_spectrum(m)
        assert abs(sp.total - 1) < 1e-9
        assert sp.values[0] >= 1 / m.bond_dim ** 2 - 1e-12


def test_finite_chain_product_tensor_power():
    p = product_state(build_group("Z2"))
    psi = finite_chain_vector(p, 4)
    assert psi.shape == (1,)
    assert abs(abs(psi[0]) - 1) < 1e-12

    # two-level product state with a nontrivial vector
    grp = build_group("Z1")
    tensor = np.zeros((2, 1, 1), dtype=complex)
    tensor[0] = 0.6
    tensor[1] = 0.8
    m = canonicalize(SymmetricMPS(tensor=tensor, group=grp,
                                  onsite=(np.eye(2, dtype=complex),)))
    psi = finite_chain_vector(m, 3)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    single = np.array([0.6, 0.8])
    expected = np.kron(np.kron(single, single), single)
    overlap = abs(np.vdot(psi, expected))
    assert abs(overlap - 1) < 1e-12


def test_finite_chain_guard():
    m = aklt_state()
    with pytest.raises(ResourceGuardError):
        finite_chain_vector(m, 13)


def test_aklt_finite_chain_matches_transfer():
    m = aklt_state()
    r = 2
    tm_value = connected_correlation(m, SZ_CARTESIAN, SZ_CARTESIAN, r)
    # central correlator on an 8-site chain, boundary averaged
    n = 8
    s1, s2 = 3, 3 + r
    joint = boundary_averaged_expectation(m, n, {s1: SZ_CARTESIAN, s2: SZ_CARTESIAN})
    m1 = boundary_averaged_expectation(m, n, {s1: SZ_CARTESIAN})
    m2 = boundary_averaged_expectation(m, n, {s2: SZ_CARTESIAN})
    assert abs((joint - m1 * m2) - tm_value) < 1e-3


def test_finite_chain_bulk_error_decreases():
    rng = np.random.default_rng(11)
    m = canonicalize(random_injective_mps(rng, 2, 2))
    op = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, -0.4]], dtype=complex)
    exact = expectation(m, op)
    errs = []
    for n in (4, 6, 8, 10):
        val = boundary_averaged_expectation(m, n, {n // 2: op})
        errs.append(abs(val - exact))
    assert all(errs[i + 1] <= errs[i] + 1e-12 for i in range(len(errs) - 1))
    assert errs[-1] < errs[0]


def test_block_sites_preserves_canonical_and_gap():
    m = aklt_state()
    b = block_sites(m, 2)
    assert b.d == 9
    ident = sum(b.tensor[i].conj().T @ b.tensor[i] for i in range(9))
    assert np.linalg.norm(ident - np.eye(2)) < 1e-10
    assert spectral_gap(b.tensor) > spectral_gap(m.tensor)


def test_symmetry_consistency_catalog():
    for m in (aklt_state(), cluster_state()):
        for g in m.group.elements():
            fp = transfer_fixed_point(m, m.onsite[g])
            assert abs(abs(fp.eigenvalue) - 1) < 1e-8


def test_onsite_rep_validation():
    grp = build_group("Z2")
    tensor = np.zeros((2, 1, 1), dtype=complex)
    tensor[0] = 1.0
    with pytest.raises(ValidationError):
        # matrices do not satisfy the group law
        SymmetricMPS(tensor=tensor, group=grp,
                     onsite=(np.eye(2, dtype=complex),
                             np.diag([1, 1j]).astype(complex)))
