"""Constructors for the state catalog and the charge-transfer circuit.

Catalog states: the AKLT chain (with the pi-rotation detector subgroup in the
Cartesian spin-1 basis, where everything is an exact signed permutation), the
blocked-pair cluster state with its Z2 x Z2 action, product states, and
fixed-point states realizing a prescribed cohomology class through maximally
entangled bonds.

The charge-transfer circuit renders, on a finite window, the three-layer
construction that moves all on-site charges of a product state onto a stacked
auxiliary chain and cancels them pairwise, leaving the total window charge on
a single boundary site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cohomology import Cocycle, classify, normalize
from .errors import ResourceGuardError, ValidationError
from .groups import Charge, FiniteGroup, PhaseValue, build_group, charge_product, trivial_charge
from .mps import SymmetricMPS, canonicalize
from .projreps import MultiplierRep, regular_projective_rep

GATE_EQUIVARIANCE_TOL = 1e-12
CIRCUIT_WINDOW_GUARD = 24


# ---------------------------------------------------------------------------
# Catalog states


def aklt_state() -> SymmetricMPS:
    """Spin-1 AKLT tensor in the Cartesian basis: A^a = sigma_a / sqrt(3).

    The pi rotations about the coordinate axes act as signed diagonal
    matrices, and the tensor is exactly symmetric under them.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    tensor = np.stack([sx, sy, sz]) / math.sqrt(3)
    grp = build_group("Z2xZ2")
    onsite = (
        np.eye(3, dtype=complex),
        np.diag([1.0, -1.0, -1.0]).astype(complex),
        np.diag([-1.0, 1.0, -1.0]).astype(complex),
        np.diag([-1.0, -1.0, 1.0]).astype(complex),
    )
    state = SymmetricMPS(tensor=tensor, group=grp, onsite=onsite, label="aklt")
    return canonicalize(state)


def cluster_state() -> SymmetricMPS:
    """1d cluster state blocked over two-site unit cells (physical dimension
    four) with the on-site Z2 x Z2 action X(x)1 and 1(x)X."""
    a0 = np.array([[1, 0], [1, 0]], dtype=complex) / math.sqrt(2)
    a1 = np.array([[0, 1], [0, -1]], dtype=complex) / math.sqrt(2)
    single = [a0, a1]
    blocked = np.stack([single[s] @ single[t] for s in (0, 1) for t in (0, 1)])
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    grp = build_group("Z2xZ2")
    onsite = (
        np.eye(4, dtype=complex),
        np.kron(x, eye),
        np.kron(eye, x),
        np.kron(x, x),
    )
    state = SymmetricMPS(tensor=blocked, group=grp, onsite=onsite, label="cluster")
    return canonicalize(state)


def product_state(group: FiniteGroup, charge: Charge | None = None,
                  label: str = "product") -> SymmetricMPS:
    """Bond-dimension-1 product state; the site carries the given charge."""
    charge = charge or trivial_charge(group)
    if charge.group != group:
        raise ValidationError("charge lives on a different group")
    tensor = np.ones((1, 1, 1), dtype=complex)
    onsite = tuple(np.array([[charge(g).to_complex()]], dtype=complex)
                   for g in group.elements())
    state = SymmetricMPS(tensor=tensor, group=group, onsite=onsite, label=label)
    return canonicalize(state)


def spin1_product_state() -> SymmetricMPS:
    """The |z> product state of a spin-1 chain with the pi-rotation subgroup
    acting in the Cartesian basis (a trivial reference for the AKLT tests)."""
    grp = build_group("Z2xZ2")
    tensor = np.zeros((3, 1, 1), dtype=complex)
    tensor[2, 0, 0] = 1.0
    onsite = (
        np.eye(3, dtype=complex),
        np.diag([1.0, -1.0, -1.0]).astype(complex),
        np.diag([-1.0, 1.0, -1.0]).astype(complex),
        np.diag([-1.0, -1.0, 1.0]).astype(complex),
    )
    state = SymmetricMPS(tensor=tensor, group=grp, onsite=onsite, label="spin1-product")
    return canonicalize(state)


def fixed_point_state(mu: Cocycle, rep: MultiplierRep | None = None) -> SymmetricMPS:
    """Maximally-entangled-bond state realizing the class of ``mu``.

    The on-site space is V (x) conj(V) for a mu-multiplier representation
    (V, v); the on-site action v(g) (x) conj(v(g)) is linear because the
    multiplier cancels against its conjugate. Bond dimension equals dim V;
    by default the twisted regular representation is used, and a smaller
    user-supplied representation (a Pauli pair, say) keeps bonds thin.
    """
    if not mu.is_exact:
        raise ValidationError("exact cocycle required")
    mu = normalize(mu)
    if rep is None:
        rep = regular_projective_rep(mu)
    else:
        if rep.group != mu.group:
            raise ValidationError("representation lives on a different group")
        want = classify(mu)
        got = classify(rep.multiplier,
                       snap_denominator=2 * rep.group.order * rep.dim)
        if want != got:
            raise ValidationError(
                "supplied representation does not carry the class of the cocycle")
    dim = rep.dim
    tensor = np.zeros((dim * dim, dim, dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            tensor[a * dim + b, a, b] = 1.0 / math.sqrt(dim)
    onsite = tuple(np.kron(rep.matrices[g], rep.matrices[g].conj())
                   for g in rep.group.elements())
    state = SymmetricMPS(tensor=tensor, group=rep.group, onsite=onsite,
                         label=f"fixed-point(D={dim})")
    return canonicalize(state)


def stack_states(a: SymmetricMPS, b: SymmetricMPS) -> SymmetricMPS:
    """Stacked chain: Kronecker products in both physical and bond indices."""
    if a.group != b.group:
        raise ValidationError("states carry different groups")
    da, db = a.d, b.d
    dim = a.bond_dim * b.bond_dim
    tensor = np.zeros((da * db, dim, dim), dtype=complex)
    for i in range(da):
        for j in range(db):
            tensor[i * db + j] = np.kron(a.tensor[i], b.tensor[j])
    onsite = tuple(np.kron(a.onsite[g], b.onsite[g]) for g in a.group.elements())
    label = f"{a.label}(x){b.label}" if a.label and b.label else ""
    return SymmetricMPS(tensor=tensor, group=a.group, onsite=onsite, label=label)


def catalog_state(name: str, **params) -> SymmetricMPS:
    """Build a named catalog state: aklt | cluster | product | fixed-point."""
    key = name.lower().replace("_", "-")
    if key == "aklt":
        return aklt_state()
    if key == "cluster":
        return cluster_state()
    if key == "product":
        if "group" not in params:
            raise ValidationError("product state needs a group")
        return product_state(params["group"], params.get("charge"))
    if key == "spin1-product":
        return spin1_product_state()
    if key == "fixed-point":
        if "cocycle" not in params:
            raise ValidationError("fixed-point state needs a cocycle")
        return fixed_point_state(params["cocycle"], params.get("rep"))
    raise ValidationError(f"unknown catalog state {name!r}")


# ---------------------------------------------------------------------------
# Charged product specifications


@dataclass(frozen=True)
class ChargedProductSpec:
    """A product state described by per-site charges (trivial off the listed
    sites) and optional basis-vector labels."""

    group: FiniteGroup
    charges: dict[int, Charge] = field(default_factory=dict)
    labels: dict[int, str] = field(default_factory=dict)

    def charge_at(self, site: int) -> Charge:
        return self.charges.get(site, trivial_charge(self.group))

    def support(self) -> list[int]:
        return sorted(s for s, q in self.charges.items() if not q.is_trivial())

    def total_charge(self, sites) -> Charge:
        out = trivial_charge(self.group)
        for s in sites:
            out = charge_product(out, self.charge_at(s))
        return out


# ---------------------------------------------------------------------------
# Gate circuits


@dataclass
class Gate:
    support: tuple[int, ...]       # one or two adjacent sites
    matrix: np.ndarray
    layer: str                     # "T", "V", or "W"


@dataclass
class GateCircuit:
    group: FiniteGroup
    length: int                    # number of stacked sites (window plus boundary)
    gates: list[Gate]
    site_dims: list[int]
    site_basis_charges: list[list[Charge]] = field(default_factory=list)

    def layers(self) -> dict[str, list[Gate]]:
        out: dict[str, list[Gate]] = {"T": [], "V": [], "W": []}
        for g in self.gates:
            out[g.layer].append(g)
        return out

    def layer_supports_disjoint(self) -> bool:
        for gates in self.layers().values():
            seen: set[int] = set()
            for g in gates:
                if any(s in seen for s in g.support):
                    return False
                seen.update(g.support)
        return True


def _site_action(qs: list[Charge], g: int) -> np.ndarray:
    """Diagonal unitary of element g on a site whose basis vectors carry the
    given charges."""
    return np.diag([q(g).to_complex() for q in qs]).astype(complex)


def _swap_gate(dim: int, i: int, j: int) -> np.ndarray:
    m = np.eye(dim, dtype=complex)
    m[i, i] = m[j, j] = 0.0
    m[i, j] = m[j, i] = 1.0
    return m


def gate_equivariance_residual(circuit: GateCircuit) -> float:
    """Largest commutator norm between any gate and the group action on its
    support; exact constructions should sit at numerical zero."""
    grp = circuit.group
    worst = 0.0
    for gate in circuit.gates:
        dims = [circuit.site_dims[s] for s in gate.support]
        if gate.matrix.shape != (int(np.prod(dims)), int(np.prod(dims))):
            raise ValidationError("gate matrix does not match its support")
        for g in grp.elements():
            u = np.eye(1, dtype=complex)
            for s in gate.support:
                u = np.kron(u, _site_action(circuit.site_basis_charges[s], g))
            comm = gate.matrix @ u - u @ gate.matrix
            worst = max(worst, float(np.linalg.norm(comm)))
    return worst


# Basis layout of one stacked site: (original chain) x (auxiliary chain)
# original: 0 = e_i (trivial), 1 = nu_i (charge q_i)
# auxiliary: 0 = e'_i (trivial), 1 = nu'_i (charge q_i), 2 = xi'_i (accumulator)
_STACKED_DIM = 6


def _stacked_index(orig: int, aux: int) -> int:
    return orig * 3 + aux


def charge_transfer_circuit(spec: ChargedProductSpec, length: int):
    """Equivariant gates that empty all on-site charges of a half-chain
    product state into a stacked auxiliary chain and cancel them pairwise.

    The window is [0, length) with even ``length``; one extra boundary site at
    ``length`` absorbs the total window charge, so the returned final spec is
    trivial on the whole window and carries a single accumulator charge just
    outside it. With all input charges trivial the circuit consists of
    identity gates and the state is untouched.

    Returns (circuit, final_spec, initial_vectors, final_vectors) where the
    vector lists give the exact per-site product states before and after.
    """
    if length % 2 or length <= 0:
        raise ValidationError("window length must be positive and even")
    if length > CIRCUIT_WINDOW_GUARD:
        raise ResourceGuardError(
            f"window length exceeds the exact-verification guard "
            f"({CIRCUIT_WINDOW_GUARD})")
    if any(s < 0 or s >= length for s in spec.support()):
        raise ValidationError(
            "charges must be trivial outside the window [0, length)")
    grp = spec.group
    nsites = length + 1
    qs = [spec.charge_at(i) for i in range(length)] + [trivial_charge(grp)]
    all_trivial = all(q.is_trivial() for q in qs)

    # accumulator charges: xi'_0 ~ q_0, xi'_{2k+1} ~ conj(q_{2k} ... q_0),
    # xi'_{2k+2} ~ q_{2k+2} ... q_0
    running: list[Charge] = []
    acc = trivial_charge(grp)
    for i in range(nsites):
        acc = charge_product(acc, qs[i])
        running.append(acc)
    xi: list[Charge] = []
    for i in range(nsites):
        if i == 0:
            xi.append(qs[0])
        elif i % 2 == 1:
            xi.append(running[i - 1].inverse())
        else:
            xi.append(running[i])

    # per-site basis charges in stacked order (orig 0,1) x (aux 0,1,2)
    stacked_charges = []
    for i in range(nsites):
        row = []
        for orig_q in (trivial_charge(grp), qs[i]):
            for aux_q in (trivial_charge(grp), qs[i], xi[i]):
                row.append(charge_product(orig_q, aux_q))
        stacked_charges.append(row)

    dim1 = _STACKED_DIM
    dim2 = dim1 * dim1
    gates: list[Gate] = []

    def one_site_swap(a: int, b: int) -> np.ndarray:
        return _swap_gate(dim1, a, b)

    def two_site_swap(pair_a: tuple[int, int], pair_b: tuple[int, int]) -> np.ndarray:
        ia = pair_a[0] * dim1 + pair_a[1]
        ib = pair_b[0] * dim1 + pair_b[1]
        return _swap_gate(dim2, ia, ib)

    eye1 = np.eye(dim1, dtype=complex)
    eye2 = np.eye(dim2, dtype=complex)

    # layer T: move nu_i (x) e'_i to e_i (x) nu'_i on every stacked site
    nu_e = _stacked_index(1, 0)
    e_nu = _stacked_index(0, 1)
    e_xi = _stacked_index(0, 2)
    for i in range(nsites):
        mat = eye1.copy() if all_trivial else one_site_swap(nu_e, e_nu)
        gates.append(Gate(support=(i,), matrix=mat, layer="T"))

    # layer V: V_0 converts nu'_0 to xi'_0; V_{2k+1} converts the pair
    # (nu', nu') at sites (2k+1, 2k+2) to (xi', xi')
    mat = eye1.copy() if all_trivial else one_site_swap(e_nu, e_xi)
    gates.append(Gate(support=(0,), matrix=mat, layer="V"))
    for k in range(length // 2):
        j = 2 * k + 1
        mat = eye2.copy() if all_trivial else two_site_swap((e_nu, e_nu), (e_xi, e_xi))
        gates.append(Gate(support=(j, j + 1), matrix=mat, layer="V"))

    # layer W: cancel the accumulator pairs at (2k, 2k+1)
    for k in range(length // 2):
        j = 2 * k
        e_e = _stacked_index(0, 0)
        mat = eye2.copy() if all_trivial else two_site_swap((e_xi, e_xi), (e_e, e_e))
        gates.append(Gate(support=(j, j + 1), matrix=mat, layer="W"))

    circuit = GateCircuit(group=grp, length=nsites, gates=gates,
                          site_dims=[dim1] * nsites,
                          site_basis_charges=stacked_charges)

    def basis_vec(orig: int, aux: int) -> np.ndarray:
        v = np.zeros(dim1, dtype=complex)
        v[_stacked_index(orig, aux)] = 1.0
        return v

    initial = [basis_vec(1, 0) for _ in range(nsites)]
    if all_trivial:
        final = [v.copy() for v in initial]
        final_spec = ChargedProductSpec(group=grp, charges={})
    else:
        final = [basis_vec(0, 0) for _ in range(length)] + [basis_vec(0, 2)]
        final_charges = {}
        if not xi[length].is_trivial():
            final_charges[length] = xi[length]
        final_spec = ChargedProductSpec(group=grp, charges=final_charges)

    return circuit, final_spec, initial, final


def apply_circuit_to_product(circuit: GateCircuit, vectors: list[np.ndarray]
                             ) -> list[np.ndarray]:
    """Apply the gates to an explicit product vector, refactoring after each
    two-site gate; raises if a gate ever entangles the pair."""
    state = [np.asarray(v, dtype=complex).copy() for v in vectors]
    for gate in circuit.gates:
        if len(gate.support) == 1:
            s = gate.support[0]
            state[s] = gate.matrix @ state[s]
        else:
            s, t = gate.support
            joint = gate.matrix @ np.kron(state[s], state[t])
            da = state[s].shape[0]
            mat = joint.reshape(da, -1)
            u, sv, vh = np.linalg.svd(mat)
            if len(sv) > 1 and sv[1] > 1e-12 * sv[0]:
                raise ValidationError("gate produced an entangled pair")
            state[s] = u[:, 0] * math.sqrt(sv[0])
            state[t] = vh[0, :] * math.sqrt(sv[0])
    return state


def product_overlap(a: list[np.ndarray], b: list[np.ndarray]) -> complex:
    out = 1.0 + 0j
    for x, y in zip(a, b):
        out *= np.vdot(x, y)
    return out
