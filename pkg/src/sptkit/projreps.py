"""Multiplier (projective) unitary representations of finite groups."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .cohomology import Cocycle, check_cocycle, cocycle_inverse, cocycle_product, normalize
from .errors import ClassificationError, ValidationError
from .groups import FiniteGroup, PhaseValue

UNITARY_TOL = 1e-10
MULTIPLIER_TOL = 1e-8


@dataclass
class MultiplierRep:
    """Per-element unitaries u(g) with u(g) u(h) = mu(g, h) u(gh)."""

    group: FiniteGroup
    dim: int
    matrices: list[np.ndarray]
    multiplier: Cocycle

    def __post_init__(self):
        if len(self.matrices) != self.group.order:
            raise ValidationError("one matrix per group element required")
        for g, m in enumerate(self.matrices):
            if m.shape != (self.dim, self.dim):
                raise ValidationError(f"matrix for element {g} has wrong shape")


def _assert_unitary(m: np.ndarray, what: str, tol: float = UNITARY_TOL):
    if np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0])) > tol:
        raise ValidationError(f"{what} is not unitary to tolerance {tol}")


def extract_multiplier(group: FiniteGroup, matrices,
                       tol: float = MULTIPLIER_TOL) -> tuple[MultiplierRep, Cocycle]:
    """Recover mu(g,h) = tr(u(g) u(h) u(gh)^dagger) / dim from unitaries.

    Fails if the matrices are not unitary, u(e) is not the identity, or the
    residual ||u(g) u(h) - mu u(gh)|| exceeds ``tol`` (the matrices then do
    not form a multiplier representation at all).
    """
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    if len(mats) != group.order:
        raise ValidationError("one matrix per group element required")
    dim = mats[0].shape[0]
    for g, m in enumerate(mats):
        _assert_unitary(m, f"matrix for element {g}")
    if np.linalg.norm(mats[group.identity] - np.eye(dim)) > UNITARY_TOL:
        raise ValidationError("matrix at the identity element must be 1")

    rows = []
    for g in group.elements():
        row = []
        for h in group.elements():
            prod = mats[g] @ mats[h]
            target = mats[group.op(g, h)]
            mu = np.trace(prod @ target.conj().T) / dim
            if abs(abs(mu) - 1) > tol:
                raise ClassificationError(
                    f"|mu({g},{h})| = {abs(mu):.3e} is not 1; matrices do not "
                    "form a multiplier representation")
            mu /= abs(mu)
            if np.linalg.norm(prod - mu * target) > tol:
                raise ClassificationError(
                    f"residual at ({g},{h}) exceeds {tol}; matrices do not "
                    "form a multiplier representation")
            row.append(PhaseValue.from_angle(cmath.phase(mu)))
        rows.append(tuple(row))
    cocycle = Cocycle(group, tuple(rows))
    bad = check_cocycle(cocycle, tol)
    if bad:
        raise ClassificationError(f"extracted table violates the cocycle identity at {bad[0]}")
    return MultiplierRep(group, dim, mats, cocycle), cocycle


def rep_tensor(a: MultiplierRep, b: MultiplierRep) -> MultiplierRep:
    """Elementwise Kronecker product; the multiplier multiplies pointwise."""
    if a.group != b.group:
        raise ValidationError("representations live on different groups")
    mats = [np.kron(x, y) for x, y in zip(a.matrices, b.matrices)]
    return MultiplierRep(a.group, a.dim * b.dim, mats,
                         cocycle_product(a.multiplier, b.multiplier))


def rep_conjugate(a: MultiplierRep) -> MultiplierRep:
    """Entrywise complex conjugate; carries the conjugate (inverse) class."""
    return MultiplierRep(a.group, a.dim, [m.conj() for m in a.matrices],
                         cocycle_inverse(a.multiplier))


def regular_projective_rep(mu: Cocycle) -> MultiplierRep:
    """The mu-twisted regular representation: dimension |G| unitaries
    v(g) e_k = mu(g, k) e_{gk}.

    The cocycle identity makes this a mu-multiplier representation, so every
    exact normalized cocycle is realized by explicit matrices.
    """
    grp = mu.group
    if not mu.is_exact:
        raise ValidationError("exact cocycle required")
    mu = normalize(mu)
    n = grp.order
    mats = []
    for g in grp.elements():
        m = np.zeros((n, n), dtype=complex)
        for k in grp.elements():
            m[grp.op(g, k), k] = mu(g, k).to_complex()
        mats.append(m)
    rep, _ = extract_multiplier(grp, mats)
    return rep


def gauge_rep(a: MultiplierRep, phases) -> MultiplierRep:
    """Multiply each u(g) by a phase lambda(g) with lambda(e) = 1; the
    multiplier shifts by the coboundary of lambda."""
    lam = list(phases)
    if abs(lam[a.group.identity] - 1) > 1e-12:
        raise ValidationError("gauge phase at the identity must be 1")
    mats = [l * m for l, m in zip(lam, a.matrices)]
    rep, _ = extract_multiplier(a.group, mats)
    return rep


def commutant_dimension(a: MultiplierRep, tol: float = 1e-8) -> int:
    """Dimension of {X : X u(g) = u(g) X for all g}; 1 means irreducible.

    Diagnostic only; the cohomology class never depends on irreducibility.
    """
    d = a.dim
    blocks = []
    eye = np.eye(d)
    for m in a.matrices:
        blocks.append(np.kron(m, eye) - np.kron(eye, m.T))
    stacked = np.vstack(blocks)
    s = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(s < tol * max(1.0, s[0])))
