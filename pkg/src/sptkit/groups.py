"""Finite groups as multiplication tables, U(1) phases, on-site charges,
and finite detector subgroups standing in for U(1) and SO(3).

Elements are contiguous indices ``0..order-1`` with the identity at index 0
for all catalog groups; explicit tables may place it elsewhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError

ANGLE_TOL = 1e-9
ASSOC_SAMPLE_THRESHOLD = 64
ASSOC_SAMPLES = 10_000


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table."""

    order: int
    mult: tuple[tuple[int, ...], ...]
    identity: int
    inv: tuple[int, ...]
    name: str = "group"

    def op(self, g: int, h: int) -> int:
        return self.mult[g][h]

    def inverse(self, g: int) -> int:
        return self.inv[g]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mult[x][g]
            k += 1
        return k

    def exponent(self) -> int:
        out = 1
        for g in self.elements():
            out = math.lcm(out, self.element_order(g))
        return out

    def is_abelian(self) -> bool:
        return all(self.mult[g][h] == self.mult[h][g]
                   for g in self.elements() for h in self.elements())

    def __hash__(self):
        return hash((self.order, self.mult, self.identity))

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return (self.order, self.mult, self.identity) == (other.order, other.mult, other.identity)


def _validate_table(order: int, mult, identity: int, rng_seed: int = 0):
    if order <= 0:
        raise ValidationError("group order must be positive")
    if len(mult) != order or any(len(row) != order for row in mult):
        raise ValidationError("multiplication table must be order x order")
    for g in range(order):
        for h in range(order):
            v = mult[g][h]
            if not (0 <= v < order):
                raise ValidationError(
                    f"table is not closed: entry ({g},{h}) = {v} out of range")
    for g in range(order):
        if mult[identity][g] != g or mult[g][identity] != g:
            raise ValidationError(f"element {identity} is not an identity (fails at {g})")
    if order <= ASSOC_SAMPLE_THRESHOLD:
        triples = ((g, h, k) for g in range(order) for h in range(order) for k in range(order))
    else:
        rng = np.random.default_rng(rng_seed)
        triples = (tuple(int(x) for x in rng.integers(0, order, size=3))
                   for _ in range(ASSOC_SAMPLES))
    for g, h, k in triples:
        if mult[mult[g][h]][k] != mult[g][mult[h][k]]:
            raise ValidationError(f"table is not associative at triple ({g},{h},{k})")


def _inverse_table(order: int, mult, identity: int) -> tuple[int, ...]:
    inv = [None] * order
    for g in range(order):
        for h in range(order):
            if mult[g][h] == identity and mult[h][g] == identity:
                inv[g] = h
                break
        if inv[g] is None:
            raise ValidationError(f"element {g} has no inverse")
    return tuple(inv)


def group_from_table(mult, identity: int = 0, name: str = "group") -> FiniteGroup:
    """Validate an explicit multiplication table and build the group."""
    order = len(mult)
    table = tuple(tuple(int(x) for x in row) for row in mult)
    _validate_table(order, table, identity)
    inv = _inverse_table(order, table, identity)
    return FiniteGroup(order=order, mult=table, identity=identity, inv=inv, name=name)


def _cyclic_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def _direct_product_table(ta, tb):
    na, nb = len(ta), len(tb)
    n = na * nb
    table = [[0] * n for _ in range(n)]
    for a1 in range(na):
        for b1 in range(nb):
            for a2 in range(na):
                for b2 in range(nb):
                    table[a1 * nb + b1][a2 * nb + b2] = ta[a1][a2] * nb + tb[b1][b2]
    return table


def _dihedral4_table():
    # D4 = <r, s | r^4 = s^2 = e, s r s = r^-1>; element i*.. encoded as
    # r^a s^b with index a + 4*b, a in 0..3, b in 0..1.
    def mul(x, y):
        a1, b1 = x % 4, x // 4
        a2, b2 = y % 4, y // 4
        # (r^a1 s^b1)(r^a2 s^b2) = r^(a1 + a2*(-1)^b1) s^(b1+b2)
        a = (a1 + (a2 if b1 == 0 else -a2)) % 4
        b = (b1 + b2) % 2
        return a + 4 * b

    return [[mul(x, y) for y in range(8)] for x in range(8)]


def _quaternion_table():
    # Q8 = {1, -1, i, -i, j, -j, k, -k} with indices 0..7 in that order.
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    vals = {"1": (1, ""), "-1": (-1, "")}

    def mul_units(u, v):
        # quaternion unit multiplication on symbols "", "i", "j", "k"
        table = {
            ("", ""): (1, ""),
            ("", "i"): (1, "i"), ("i", ""): (1, "i"),
            ("", "j"): (1, "j"), ("j", ""): (1, "j"),
            ("", "k"): (1, "k"), ("k", ""): (1, "k"),
            ("i", "i"): (-1, ""), ("j", "j"): (-1, ""), ("k", "k"): (-1, ""),
            ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
            ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
            ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
        }
        return table[(u, v)]

    def parse(idx):
        s = names[idx]
        sign = -1 if s.startswith("-") else 1
        unit = s.lstrip("-").replace("1", "")
        return sign, unit

    def encode(sign, unit):
        s = ("-" if sign < 0 else "") + (unit if unit else "1")
        return names.index(s)

    def mul(x, y):
        s1, u1 = parse(x)
        s2, u2 = parse(y)
        s3, u3 = mul_units(u1, u2)
        return encode(s1 * s2 * s3, u3)

    return [[mul(x, y) for y in range(8)] for x in range(8)]


def _symmetric3_table():
    # S3 as permutations of {0,1,2}; fixed ordering: e, (01), (02), (12),
    # (012), (021).
    perms = [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1)]

    def compose(p, q):
        # act with q first, then p
        return tuple(p[q[i]] for i in range(3))

    return [[perms.index(compose(p, q)) for q in perms] for p in perms]


def build_group(spec) -> FiniteGroup:
    """Build a group from a catalog name or an explicit table.

    Catalog names: ``Z<n>``, ``Z2xZ2``, ``Z2xZ2xZ2``, ``D4``, ``Q8``, ``S3``.
    An explicit spec is a dict {"mult": [[...]], "identity": int, "name": str}.
    """
    if isinstance(spec, dict):
        return group_from_table(spec["mult"], spec.get("identity", 0),
                                spec.get("name", "group"))
    name = str(spec)
    key = name.upper().replace("×", "X").replace("_", "")
    if key in ("Z2XZ2", "V4", "D2"):
        return group_from_table(_direct_product_table(_cyclic_table(2), _cyclic_table(2)),
                                name=name)
    if key in ("Z2XZ2XZ2", "Z2^3", "Z23"):
        t = _direct_product_table(_direct_product_table(_cyclic_table(2), _cyclic_table(2)),
                                  _cyclic_table(2))
        return group_from_table(t, name=name)
    if key == "D4":
        return group_from_table(_dihedral4_table(), name=name)
    if key == "Q8":
        return group_from_table(_quaternion_table(), name=name)
    if key == "S3":
        return group_from_table(_symmetric3_table(), name=name)
    if key.startswith("Z") and key[1:].isdigit():
        n = int(key[1:])
        if n < 1:
            raise ValidationError(f"bad cyclic order in {name!r}")
        return group_from_table(_cyclic_table(n), name=name)
    raise ValidationError(f"unknown group spec {name!r}")


CATALOG_NAMES = ("Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8",
                 "Z2xZ2", "Z2xZ2xZ2", "D4", "Q8", "S3")


# ---------------------------------------------------------------------------
# U(1) phases


@dataclass(frozen=True)
class PhaseValue:
    """A value on the unit circle, exact (rational multiple of 2*pi) when
    possible, otherwise a float angle with tolerance.

    Exact values store ``frac`` = p/q meaning exp(2*pi*i*p/q), reduced mod 1.
    """

    frac: Fraction | None = None
    angle: float | None = None

    def __post_init__(self):
        if (self.frac is None) == (self.angle is None):
            raise ValidationError("phase must be exact xor approximate")
        if self.frac is not None:
            object.__setattr__(self, "frac", self.frac % 1)
        else:
            object.__setattr__(self, "angle", float(self.angle) % (2 * math.pi))

    @staticmethod
    def exact(num: int, den: int = 1) -> "PhaseValue":
        return PhaseValue(frac=Fraction(num, den))

    @staticmethod
    def one() -> "PhaseValue":
        return PhaseValue(frac=Fraction(0))

    @staticmethod
    def from_angle(angle: float) -> "PhaseValue":
        return PhaseValue(angle=angle)

    @property
    def is_exact(self) -> bool:
        return self.frac is not None

    def to_angle(self) -> float:
        if self.frac is not None:
            return 2 * math.pi * float(self.frac)
        return self.angle

    def to_complex(self) -> complex:
        return cmath.exp(1j * self.to_angle())

    def __mul__(self, other: "PhaseValue") -> "PhaseValue":
        if self.frac is not None and other.frac is not None:
            return PhaseValue(frac=self.frac + other.frac)
        return PhaseValue(angle=self.to_angle() + other.to_angle())

    def inverse(self) -> "PhaseValue":
        if self.frac is not None:
            return PhaseValue(frac=-self.frac)
        return PhaseValue(angle=-self.angle)

    def is_one(self, tol: float = ANGLE_TOL) -> bool:
        if self.frac is not None:
            return self.frac == 0
        d = self.angle % (2 * math.pi)
        return min(d, 2 * math.pi - d) < tol

    def close_to(self, other: "PhaseValue", tol: float = ANGLE_TOL) -> bool:
        if self.frac is not None and other.frac is not None:
            return self.frac == other.frac
        d = (self.to_angle() - other.to_angle()) % (2 * math.pi)
        return min(d, 2 * math.pi - d) < tol


# ---------------------------------------------------------------------------
# Charges (one-dimensional representations)


@dataclass(frozen=True)
class Charge:
    """A U(1)-valued character of a finite group (one phase per element)."""

    group: FiniteGroup
    values: tuple[PhaseValue, ...]

    def __post_init__(self):
        if len(self.values) != self.group.order:
            raise ValidationError("charge table length must equal group order")

    def __call__(self, g: int) -> PhaseValue:
        return self.values[g]

    def is_trivial(self, tol: float = ANGLE_TOL) -> bool:
        return all(v.is_one(tol) for v in self.values)

    def inverse(self) -> "Charge":
        return Charge(self.group, tuple(v.inverse() for v in self.values))


def trivial_charge(group: FiniteGroup) -> Charge:
    return Charge(group, tuple(PhaseValue.one() for _ in group.elements()))


def charge_from_fractions(group: FiniteGroup, fracs) -> Charge:
    vals = tuple(PhaseValue(frac=Fraction(f)) for f in fracs)
    c = Charge(group, vals)
    bad = validate_charge(c)
    if bad:
        raise ValidationError(f"not multiplicative at pairs {bad[:3]}")
    return c


def cyclic_charge(group: FiniteGroup, k: int = 1) -> Charge:
    """The character g -> exp(2 pi i k g / n) of Z_n (elements are exponents)."""
    n = group.order
    return charge_from_fractions(group, [Fraction(k * g, n) for g in group.elements()])


def charge_product(a: Charge, b: Charge) -> Charge:
    """Pointwise product of two characters on the same group."""
    if a.group != b.group:
        raise ValidationError("charges live on different groups")
    return Charge(a.group, tuple(x * y for x, y in zip(a.values, b.values)))


def validate_charge(c: Charge, tol: float = ANGLE_TOL) -> list[tuple[int, int]]:
    """All pairs (g, h) where values[g*h] != values[g] * values[h]."""
    bad = []
    grp = c.group
    for g in grp.elements():
        for h in grp.elements():
            if not c.values[grp.op(g, h)].close_to(c.values[g] * c.values[h], tol):
                bad.append((g, h))
    return bad


# ---------------------------------------------------------------------------
# Detector subgroups for the compact-group catalog


def spin_matrices(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Sx, Sy, Sz) for spin s = two_s / 2 in the standard Sz basis."""
    s = two_s / 2.0
    dim = two_s + 1
    m = np.array([s - k for k in range(dim)])
    sp = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        sp[k, k + 1] = math.sqrt(s * (s + 1) - m[k + 1] * (m[k + 1] + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / (2j)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


@dataclass
class CompactDetectorSpec:
    """A finite subgroup standing in for a compact symmetry group, together
    with the physical unitaries realizing its elements.

    kind "SO3": the order-4 subgroup {e, Rx(pi), Ry(pi), Rz(pi)}; its
    commutator phase on the edge is the complete Z2 invariant.
    kind "U1": a cyclic subgroup Z_n of the circle; H^2 is trivial, the
    detector certifies that the edge representation lifts linearly.
    """

    kind: str
    subgroup: FiniteGroup
    realizations: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("SO3", "U1"):
            raise ValidationError(f"unknown detector kind {self.kind!r}")


def so3_detector(two_s: int) -> CompactDetectorSpec:
    """Pi-rotation subgroup of SO(3) realized on a spin-(two_s/2) site.

    Integer spin gives a genuine linear representation; half-integer spin
    satisfies the group law only up to signs.
    """
    grp = build_group("Z2xZ2")
    sx, sy, sz = spin_matrices(two_s)
    reals = {
        0: np.eye(two_s + 1, dtype=complex),
        1: _expi_pi(sx),
        2: _expi_pi(sy),
        3: _expi_pi(sz),
    }
    return CompactDetectorSpec(kind="SO3", subgroup=grp, realizations=reals)


def so3_detector_cartesian() -> CompactDetectorSpec:
    """Spin-1 pi rotations written in the Cartesian basis |x>, |y>, |z>,
    where they are exact signed diagonal matrices."""
    grp = build_group("Z2xZ2")
    reals = {
        0: np.eye(3, dtype=complex),
        1: np.diag([1.0, -1.0, -1.0]).astype(complex),
        2: np.diag([-1.0, 1.0, -1.0]).astype(complex),
        3: np.diag([-1.0, -1.0, 1.0]).astype(complex),
    }
    return CompactDetectorSpec(kind="SO3", subgroup=grp, realizations=reals)


def u1_detector(n: int, weights) -> CompactDetectorSpec:
    """Z_n subgroup of U(1); element k acts as diag(exp(2 pi i w_j k / n))."""
    grp = build_group(f"Z{n}")
    weights = list(weights)
    reals = {}
    for k in grp.elements():
        phases = [cmath.exp(2j * math.pi * w * k / n) for w in weights]
        reals[k] = np.diag(phases).astype(complex)
    return CompactDetectorSpec(kind="U1", subgroup=grp, realizations=reals)


def _expi_pi(s: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(s)
    return (vecs * np.exp(1j * math.pi * vals)) @ vecs.conj().T
