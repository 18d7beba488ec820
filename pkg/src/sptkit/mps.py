"""Uniform matrix product states with an on-site group action: canonical
form, (twisted) transfer fixed points, correlations, Schmidt spectra, and a
small explicit-contraction oracle for cross checks.

Conventions: the tensor has shape (d, D, D); A[i] is the D x D virtual matrix
for physical index i. Left-canonical means sum_i A[i]^dag A[i] = 1. Dense
transfer matrices act on row-major-flattened D x D environments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonInjectiveError, ResourceGuardError, ValidationError
from .groups import FiniteGroup

CANONICAL_TOL = 1e-10
REP_TOL = 1e-10
EIG_TOL = 1e-12
EIG_MAXITER = 10_000
INJECTIVITY_GAP = 1e-6
SCHMIDT_DEGENERACY_TOL = 1e-8
CHAIN_SITE_GUARD = 12
CHAIN_DIM_GUARD = 4


@dataclass
class SymmetricMPS:
    """Uniform MPS tensor plus a linear on-site representation."""

    tensor: np.ndarray
    group: FiniteGroup
    onsite: tuple[np.ndarray, ...]
    label: str = ""
    canonical: bool = False
    injective: bool | None = None
    gap: float | None = None
    right_env: np.ndarray | None = None

    def __post_init__(self):
        self.tensor = np.asarray(self.tensor, dtype=complex)
        if self.tensor.ndim != 3 or self.tensor.shape[1] != self.tensor.shape[2]:
            raise ValidationError("tensor must have shape (d, D, D)")
        self.onsite = tuple(np.asarray(u, dtype=complex) for u in self.onsite)
        if len(self.onsite) != self.group.order:
            raise ValidationError("one on-site unitary per group element required")
        d = self.d
        for g, u in enumerate(self.onsite):
            if u.shape != (d, d):
                raise ValidationError(f"on-site matrix for element {g} has wrong shape")
            if np.linalg.norm(u @ u.conj().T - np.eye(d)) > REP_TOL:
                raise ValidationError(f"on-site matrix for element {g} is not unitary")
        for g in self.group.elements():
            for h in self.group.elements():
                err = np.linalg.norm(self.onsite[g] @ self.onsite[h]
                                     - self.onsite[self.group.op(g, h)])
                if err > REP_TOL:
                    raise ValidationError(
                        f"on-site matrices are not a linear representation "
                        f"(residual {err:.2e} at ({g},{h}))")

    @property
    def d(self) -> int:
        return self.tensor.shape[0]

    @property
    def bond_dim(self) -> int:
        return self.tensor.shape[1]


@dataclass
class TransferFixedPoint:
    eigenvalue: complex
    left: np.ndarray
    right: np.ndarray
    residual: float


@dataclass
class SchmidtSpectrum:
    values: np.ndarray                      # descending
    blocks: list[tuple[int, int]] = field(default_factory=list)  # [start, end)

    @property
    def total(self) -> float:
        return float(np.sum(self.values))


# ---------------------------------------------------------------------------
# Dense transfer maps and the power-iteration solver


def transfer_matrix(a: np.ndarray, twist: np.ndarray | None = None) -> np.ndarray:
    """Dense matrix of X -> sum_ij twist_ij A[j] X A[i]^dag (twist = 1 if absent)."""
    d, dim, _ = a.shape
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    if twist is None:
        for i in range(d):
            out += np.kron(a[i], a[i].conj())
    else:
        for i in range(d):
            for j in range(d):
                t = twist[i, j]
                if t != 0:
                    out += t * np.kron(a[j], a[i].conj())
    return out


def transfer_matrix_left(a: np.ndarray, twist: np.ndarray | None = None) -> np.ndarray:
    """Dense matrix of X -> sum_ij twist_ij A[i]^dag X A[j]."""
    d, dim, _ = a.shape
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    if twist is None:
        for i in range(d):
            out += np.kron(a[i].conj().T, a[i].T)
    else:
        for i in range(d):
            for j in range(d):
                t = twist[i, j]
                if t != 0:
                    out += t * np.kron(a[i].conj().T, a[j].T)
    return out


def _generic_start(dim2: int) -> np.ndarray:
    # deterministic start with overlap on generic eigenvectors; vec(identity)
    # can be exactly orthogonal to twisted eigenmatrices
    k = np.arange(dim2)
    return 1.0 + 0.37 * np.sin(1.7 * k + 0.3) + 0.29j * np.cos(2.3 * k + 0.7)


def power_eig(mat: np.ndarray, start: np.ndarray, tol: float = EIG_TOL,
              maxiter: int = EIG_MAXITER) -> tuple[complex, np.ndarray]:
    """Dominant eigenpair by power iteration with a Rayleigh quotient."""
    v = np.asarray(start, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValidationError("zero start vector")
    v = v / nv
    lam = 0.0 + 0j
    for _ in range(maxiter):
        w = mat @ v
        lam = np.vdot(v, w)
        res = np.linalg.norm(w - lam * v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0j, v
        v = w / nw
        if res < tol * max(1.0, abs(lam)):
            return lam, v
    raise ValidationError(
        f"power iteration did not converge within {maxiter} iterations")


def _leading_pair(mat: np.ndarray, start: np.ndarray):
    lam, vec = power_eig(mat, start)
    # one refinement step against the converged direction
    lam = np.vdot(vec, mat @ vec) / np.vdot(vec, vec)
    return lam, vec


def leading_eigenpair(mat: np.ndarray, start: np.ndarray, tol: float = EIG_TOL,
                      maxiter: int = EIG_MAXITER) -> tuple[complex, np.ndarray]:
    """Dominant eigenpair; power iteration with a dense deterministic
    fallback for spectra with tied moduli (where power iteration stalls)."""
    try:
        return power_eig(mat, start, tol=tol, maxiter=maxiter)
    except ValidationError:
        vals, vecs = np.linalg.eig(mat)
        order = sorted(range(len(vals)),
                       key=lambda i: (-abs(vals[i]),
                                      float(np.angle(vals[i]) % (2 * np.pi)), i))
        i = order[0]
        return complex(vals[i]), vecs[:, i]


def spectral_gap(a: np.ndarray) -> float:
    """Relative gap between the two largest transfer eigenvalue moduli."""
    e = transfer_matrix(a)
    vals = np.abs(np.linalg.eigvals(e))
    vals.sort()
    if len(vals) == 1:
        return 1.0
    top, sub = vals[-1], vals[-2]
    if top == 0:
        return 0.0
    return float((top - sub) / top)


def subleading_modulus(a: np.ndarray) -> float:
    e = transfer_matrix(a)
    vals = np.sort(np.abs(np.linalg.eigvals(e)))
    return float(vals[-2]) if len(vals) > 1 else 0.0


# ---------------------------------------------------------------------------
# Canonical form


def canonicalize(m: SymmetricMPS) -> SymmetricMPS:
    """Left-canonical gauge of an injective uniform MPS.

    Refuses non-injective input (degenerate leading transfer eigenvalue);
    blocking sites first is the usual cure.
    """
    a = m.tensor
    dim = m.bond_dim
    gap = spectral_gap(a)
    if gap <= INJECTIVITY_GAP:
        raise NonInjectiveError(
            f"leading transfer eigenvalue is degenerate (relative gap {gap:.2e}); "
            "try blocking sites")

    et = transfer_matrix_left(a)
    lam, yvec = _leading_pair(et, np.eye(dim, dtype=complex).reshape(-1))
    if abs(lam.imag) > 1e-9 * abs(lam) or lam.real <= 0:
        raise NonInjectiveError("leading transfer eigenvalue is not positive")
    lam = lam.real
    y = yvec.reshape(dim, dim)
    y = (y + y.conj().T) / 2
    if np.trace(y).real < 0:
        y = -y
    y = y / np.trace(y).real * dim

    if np.linalg.norm(y - np.eye(dim)) < 1e-11:
        anew = a / math.sqrt(lam)
    else:
        vals, vecs = np.linalg.eigh(y)
        if np.min(vals) < -1e-10:
            raise NonInjectiveError("left fixed point is not positive semidefinite")
        vals = np.clip(vals, 1e-14, None)
        lmat = np.diag(np.sqrt(vals)) @ vecs.conj().T
        linv = vecs @ np.diag(1.0 / np.sqrt(vals))
        anew = np.einsum("ab,ibc,cd->iad", lmat, a, linv) / math.sqrt(lam)

    ident = sum(anew[i].conj().T @ anew[i] for i in range(m.d))
    err = np.linalg.norm(ident - np.eye(dim))
    if err > CANONICAL_TOL:
        raise ValidationError(f"canonical form residual {err:.2e} exceeds tolerance")

    e2 = transfer_matrix(anew)
    lam2, rvec = _leading_pair(e2, np.eye(dim, dtype=complex).reshape(-1))
    rho = rvec.reshape(dim, dim)
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if tr < 0:
        rho, tr = -rho, -tr
    rho = rho / tr

    return replace(m, tensor=anew, canonical=True, injective=True, gap=gap,
                   right_env=rho)


def _require_canonical(m: SymmetricMPS):
    if not m.canonical or m.right_env is None:
        raise ValidationError("canonical MPS required; call canonicalize first")


def transfer_fixed_point(m: SymmetricMPS, twist: np.ndarray | None = None,
                         tol: float = EIG_TOL,
                         maxiter: int = EIG_MAXITER) -> TransferFixedPoint:
    """Leading eigenpair of the (optionally twisted) transfer map.

    Without a twist the left fixed point is the identity and the right one is
    the positive density matrix of Schmidt weights; with a symmetry twist the
    eigenvalue has modulus 1.
    """
    _require_canonical(m)
    dim = m.bond_dim
    e = transfer_matrix(m.tensor, twist)
    el = transfer_matrix_left(m.tensor, twist)
    if twist is None:
        start = np.eye(dim, dtype=complex).reshape(-1)
    else:
        start = _generic_start(dim * dim)
    lam, rvec = leading_eigenpair(e, start, tol=tol, maxiter=maxiter)
    _, lvec = leading_eigenpair(el, start, tol=tol, maxiter=maxiter)
    right = rvec.reshape(dim, dim)
    left = lvec.reshape(dim, dim)
    if twist is None:
        right = (right + right.conj().T) / 2
        left = (left + left.conj().T) / 2
        if np.trace(right).real < 0:
            right = -right
        if np.trace(left).real < 0:
            left = -left
        lam = lam.real + 0j
    # normalize tr(left @ right) = 1
    z = np.trace(left.conj().T @ right)
    if abs(z) > 1e-14:
        right = right / z
    residual = float(np.linalg.norm((e @ right.reshape(-1)) - lam * right.reshape(-1)))
    if abs(lam) > 1 + 1e-9:
        raise ValidationError(f"transfer eigenvalue modulus {abs(lam)} exceeds 1")
    return TransferFixedPoint(eigenvalue=complex(lam), left=left, right=right,
                              residual=residual)


# ---------------------------------------------------------------------------
# Observables


def _apply_op(a: np.ndarray, op: np.ndarray | None, y: np.ndarray) -> np.ndarray:
    """One site of left-to-right contraction: Y -> sum_ij op_ij A[i]^dag Y A[j]."""
    d = a.shape[0]
    out = np.zeros_like(y)
    if op is None:
        for i in range(d):
            out += a[i].conj().T @ y @ a[i]
        return out
    for i in range(d):
        for j in range(d):
            o = op[i, j]
            if o != 0:
                out += o * (a[i].conj().T @ y @ a[j])
    return out


def expectation(m: SymmetricMPS, op: np.ndarray) -> complex:
    _require_canonical(m)
    dim = m.bond_dim
    y = _apply_op(m.tensor, np.asarray(op, dtype=complex), np.eye(dim, dtype=complex))
    return complex(np.trace(y @ m.right_env))


def connected_correlation(m: SymmetricMPS, op_a: np.ndarray, op_b: np.ndarray,
                          r: int) -> complex:
    """<A_0 B_r> - <A_0><B_r> at separation r >= 1 via transfer powers."""
    _require_canonical(m)
    if r < 1:
        raise ValidationError("separation must be at least 1")
    a = m.tensor
    dim = m.bond_dim
    op_a = np.asarray(op_a, dtype=complex)
    op_b = np.asarray(op_b, dtype=complex)
    y = _apply_op(a, op_a, np.eye(dim, dtype=complex))
    for _ in range(r - 1):
        y = _apply_op(a, None, y)
    y = _apply_op(a, op_b, y)
    joint = complex(np.trace(y @ m.right_env))
    return joint - expectation(m, op_a) * expectation(m, op_b)


def schmidt_spectrum(m: SymmetricMPS) -> SchmidtSpectrum:
    """Half-chain Schmidt weights: the spectrum of the right fixed point in
    left-canonical gauge, with degeneracy blocks."""
    _require_canonical(m)
    vals = np.linalg.eigvalsh(m.right_env)[::-1]
    vals = np.clip(vals, 0.0, None)
    blocks = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or (vals[start] - vals[i]) > SCHMIDT_DEGENERACY_TOL * max(vals[0], 1e-300):
            blocks.append((start, i))
            start = i
    return SchmidtSpectrum(values=vals, blocks=blocks)


# ---------------------------------------------------------------------------
# Explicit finite-chain oracle


def finite_chain_vector(m: SymmetricMPS, n_sites: int,
                        boundary: tuple[np.ndarray, np.ndarray] | None = None
                        ) -> np.ndarray:
    """Explicit normalized state vector of n_sites contracted with boundary
    vectors. Desk-scale guard: n_sites <= 12 and d <= 4."""
    psi = _chain_vector_raw(m, n_sites, boundary)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValidationError("boundary vectors annihilate the chain")
    return psi / nrm


def _chain_vector_raw(m: SymmetricMPS, n_sites: int,
                      boundary: tuple[np.ndarray, np.ndarray] | None = None
                      ) -> np.ndarray:
    if n_sites > CHAIN_SITE_GUARD or m.d > CHAIN_DIM_GUARD:
        raise ResourceGuardError(
            f"finite chain guard: n_sites <= {CHAIN_SITE_GUARD} and "
            f"d <= {CHAIN_DIM_GUARD}")
    dim = m.bond_dim
    if boundary is None:
        v = np.ones(dim, dtype=complex) / math.sqrt(dim)
        boundary = (v, v)
    vl, vr = (np.asarray(b, dtype=complex) for b in boundary)
    t = vl.conj().reshape(1, dim)
    for _ in range(n_sites):
        t = np.einsum("ab,ibc->aic", t, m.tensor).reshape(-1, dim)
    return t @ vr


def boundary_averaged_expectation(m: SymmetricMPS, n_sites: int,
                                  ops: dict[int, np.ndarray]) -> complex:
    """Finite-chain expectation averaged over an orthonormal set of boundary
    vectors on both ends (equivalently, maximally mixed boundary conditions).

    Independent of the transfer-matrix machinery; used as an oracle.
    """
    dim = m.bond_dim
    num = 0j
    den = 0.0
    full_ops = [np.asarray(ops[s], dtype=complex) if s in ops else None
                for s in range(n_sites)]
    for bl in range(dim):
        for br in range(dim):
            vl = np.zeros(dim, dtype=complex)
            vr = np.zeros(dim, dtype=complex)
            vl[bl] = 1
            vr[br] = 1
            psi = _chain_vector_raw(m, n_sites, (vl, vr))
            phi = psi.reshape([m.d] * n_sites)
            for s, op in enumerate(full_ops):
                if op is not None:
                    phi = np.moveaxis(np.tensordot(op, phi, axes=(1, s)), 0, s)
            num += np.vdot(psi, phi.reshape(-1))
            den += float(np.vdot(psi, psi).real)
    return num / den


# ---------------------------------------------------------------------------
# Structural helpers


def block_sites(m: SymmetricMPS, k: int) -> SymmetricMPS:
    """Combine k neighboring sites into one (physical dimension d^k)."""
    if k < 1:
        raise ValidationError("block size must be positive")
    a = m.tensor
    d, dim, _ = a.shape
    blocked = a
    for _ in range(k - 1):
        blocked = np.einsum("iab,jbc->ijac", blocked, a).reshape(-1, dim, dim)
    onsite = []
    for g in m.group.elements():
        u = m.onsite[g]
        w = u
        for _ in range(k - 1):
            w = np.kron(w, u)
        onsite.append(w)
    return SymmetricMPS(tensor=blocked, group=m.group, onsite=tuple(onsite),
                        label=f"{m.label} (blocked x{k})" if m.label else "",
                        canonical=m.canonical, injective=m.injective,
                        right_env=m.right_env)


def is_symmetric(m: SymmetricMPS, tol: float = 1e-8) -> bool:
    """Every on-site twist must keep the leading transfer eigenvalue on the
    unit circle; a smaller modulus signals broken symmetry."""
    mc = m if m.canonical else canonicalize(m)
    for g in m.group.elements():
        fp = transfer_fixed_point(mc, mc.onsite[g])
        if abs(abs(fp.eigenvalue) - 1) > tol:
            return False
    return True
