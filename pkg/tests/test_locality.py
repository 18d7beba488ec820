import math

import numpy as np
import pytest

from sptkit.errors import ValidationError
from sptkit.locality import (
    DecayFunction,
    Interaction,
    Term,
    anchored_norm,
    build_f_function,
    check_f_axioms,
    exponential_decay,
    pair_norm,
    stretched_decay,
    table_decay,
    tdi_f_norm,
)


def test_exponential_f_function_axioms():
    f = exponential_decay(1.0, 1000)
    ff = build_f_function(f)
    report = check_f_axioms(ff)
    assert report["ok"], report
    assert math.isfinite(ff.c_convolution) and ff.c_convolution > 0
    assert math.isfinite(ff.c_integrability)
    assert np.all(np.isfinite(ff.log_values))


def test_fast_profile_underflow_flagged():
    # exp(-4r) pushes the F table below float64 range; logs carry through
    ff = build_f_function(exponential_decay(4.0, 1000))
    assert ff.underflow_at is not None and 300 < ff.underflow_at < 500
    assert np.all(np.isfinite(ff.log_values))
    vals = ff.values
    assert vals[ff.underflow_at] == 0.0
    assert check_f_axioms(ff)["ok"]


def test_stretched_f_function_axioms():
    f = stretched_decay(1.0, 0.5, 1000)
    ff = build_f_function(f)
    report = check_f_axioms(ff)
    assert report["ok"], report
    assert ff.underflow_at is None  # exp(-sqrt(1000)) is representable


def test_profile_dominated_by_shifted_f():
    for f in (exponential_decay(1.0, 400), stretched_decay(1.0, 0.5, 400)):
        ff = build_f_function(f)
        for r in range(1, 399):
            assert f.log_at(r) <= ff.log_at(r + 1) + 1e-12


def test_constant_profile_rejected():
    with pytest.raises(ValidationError):
        table_decay([0.5] * 100)


def test_power_law_profile_rejected():
    r = np.arange(1, 201, dtype=float)
    with pytest.raises(ValidationError):
        table_decay(1.0 / r ** 3)


def test_increasing_profile_rejected():
    with pytest.raises(ValidationError):
        table_decay([0.1, 0.2, 0.3, 0.4, 0.5])


def test_decay_validation_reports_r0():
    f = stretched_decay(1.0, 0.5, 1000)
    # r^p exp(-sqrt(r)) turns over near r = 4 p^2; p = 8 gives 256
    assert 200 <= f.params["superpoly_r0"] <= 300


def test_tdi_norm_single_term():
    f = exponential_decay(1.0, 50)
    pauli_z = np.diag([1.0, -1.0])
    h = Interaction.static((0, 10), [Term((0, 0), pauli_z)])
    assert abs(tdi_f_norm(h, f) - 1 / f.at(1)) < 1e-12


def test_tdi_norm_empty():
    f = exponential_decay(1.0, 50)
    assert tdi_f_norm(Interaction.static((0, 10), []), f) == 0.0


def test_tdi_norm_nearest_neighbor_chain():
    f = exponential_decay(1.0, 50)
    zz = np.kron(np.diag([1.0, -1.0]), np.diag([1.0, -1.0]))
    terms = [Term((j, j + 1), zz) for j in range(10)]
    h = Interaction.static((0, 10), terms)
    # interior sites belong to two terms of unit norm and diameter 1
    assert abs(tdi_f_norm(h, f) - 2 / f.at(2)) < 1e-12


def test_tdi_norm_monotone_in_profile():
    rng = np.random.default_rng(0)
    terms = []
    for _ in range(6):
        a = int(rng.integers(0, 8))
        b = a + int(rng.integers(0, 3))
        m = rng.normal(size=(4, 4))
        terms.append(Term((a, b), m + m.T))
    h = Interaction.static((0, 10), terms)
    f_fast = exponential_decay(2.0, 50)   # pointwise smaller
    f_slow = exponential_decay(0.5, 50)
    assert tdi_f_norm(h, f_fast) >= tdi_f_norm(h, f_slow)


def test_anchored_norm():
    f = exponential_decay(1.0, 50)
    z = np.diag([1.0, -1.0])
    zz = np.kron(z, z)
    h = Interaction.static((0, 10), [Term((5, 6), zz)])
    assert math.isfinite(anchored_norm(h, {5}, f))
    assert anchored_norm(h, {0}, f) == math.inf
    assert abs(anchored_norm(h, {5}, f) - tdi_f_norm(h, f)) < 1e-12


def test_time_slices_sup():
    f = exponential_decay(1.0, 50)
    z = np.diag([1.0, -1.0])
    weak = [Term((0, 0), 0.5 * z)]
    strong = [Term((0, 0), 2.0 * z)]
    h = Interaction(window=(0, 5), slices=[weak, strong])
    assert abs(tdi_f_norm(h, f) - 2.0 / f.at(1)) < 1e-12


def test_pair_norm_dominated_by_f_norm():
    # the provable sandwich direction for the constructed F:
    # pair norm with F is at most the f norm
    rng = np.random.default_rng(3)
    f = exponential_decay(1.0, 60)
    ff = build_f_function(f)
    for _ in range(20):
        terms = []
        for _ in range(int(rng.integers(1, 8))):
            a = int(rng.integers(0, 12))
            b = a + int(rng.integers(0, 5))
            m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            terms.append(Term((a, b), m + m.conj().T))
        h = Interaction.static((0, 16), terms)
        assert pair_norm(h, ff) <= tdi_f_norm(h, f) * (1 + 1e-12)


def test_f_norm_subadditive():
    rng = np.random.default_rng(4)
    f = exponential_decay(1.0, 60)

    def random_interaction():
        terms = []
        for _ in range(int(rng.integers(1, 6))):
            a = int(rng.integers(0, 10))
            b = a + int(rng.integers(0, 4))
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            terms.append(Term((a, b), m + m.conj().T))
        return terms

    for _ in range(10):
        t1, t2 = random_interaction(), random_interaction()
        h1 = Interaction.static((0, 13), t1)
        h2 = Interaction.static((0, 13), t2)
        h12 = Interaction.static((0, 13), t1 + t2)
        assert tdi_f_norm(h12, f) <= tdi_f_norm(h1, f) + tdi_f_norm(h2, f) + 1e-12


def test_term_validation():
    with pytest.raises(ValidationError):
        Term((3, 2), np.eye(2))
    with pytest.raises(ValidationError):
        Term((0, 0), np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValidationError):
        Interaction.static((0, 2), [Term((1, 5), np.eye(2))])
