"""U(1)-valued 2-cocycles on finite groups, coboundary testing, and the
second cohomology group.

All exact computation happens on exponent vectors. A phase table valued in
N-th roots of unity (N = |G|) becomes an integer vector indexed by pairs of
non-identity elements; the cocycle identity and the coboundary map are then
integer-linear and Smith/Hermite normal forms decide everything.

One subtlety deserves spelling out because getting it wrong silently computes
the wrong group. Two cocycles valued in N-th roots of unity are equivalent in
U(1) cohomology when their ratio is d(nu) for *any* circle-valued nu, not just
an N-th-root-valued one. Such a nu necessarily takes values in N^2-th roots
(its N-th power is a character), so the coboundary lattice used here is

    L_D = { (d1 @ y) / N  :  y integer, d1 @ y == 0 mod N }  +  N * Z^m,

the fractional-witness enlargement of the naive mod-N coboundary image.
Quotienting by the naive image instead would produce H^2(G, Z_N), which for
cyclic groups is Z_N rather than the correct trivial answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _intlin
from .errors import ClassificationError, ResourceGuardError, SnapError, ValidationError
from .groups import ANGLE_TOL, FiniteGroup, PhaseValue

H2_ORDER_GUARD = 64
BRUTE_FORCE_GUARD = 10 ** 8
SNAP_ANGLE_TOL = 1e-6


@dataclass(frozen=True)
class Cocycle:
    """A U(1)-valued 2-cochain table; entry (g, h) is mu(g, h)."""

    group: FiniteGroup
    table: tuple[tuple[PhaseValue, ...], ...]

    def __post_init__(self):
        n = self.group.order
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise ValidationError("cocycle table must be order x order")

    def __call__(self, g: int, h: int) -> PhaseValue:
        return self.table[g][h]

    @property
    def is_exact(self) -> bool:
        return all(v.is_exact for row in self.table for v in row)

    def is_normalized(self, tol: float = ANGLE_TOL) -> bool:
        e = self.group.identity
        return all(self.table[e][g].is_one(tol) and self.table[g][e].is_one(tol)
                   for g in self.group.elements())


@dataclass(frozen=True)
class CoboundaryWitness:
    """A per-element phase table nu with d(nu)(g,h) = nu(g) nu(h) / nu(gh)."""

    group: FiniteGroup
    nu: tuple[PhaseValue, ...]

    def coboundary(self) -> Cocycle:
        grp = self.group
        rows = []
        for g in grp.elements():
            rows.append(tuple(self.nu[g] * self.nu[h] * self.nu[grp.op(g, h)].inverse()
                              for h in grp.elements()))
        return Cocycle(grp, tuple(rows))


def trivial_cocycle(group: FiniteGroup) -> Cocycle:
    one = PhaseValue.one()
    return Cocycle(group, tuple(tuple(one for _ in group.elements())
                                for _ in group.elements()))


def cocycle_from_fractions(group: FiniteGroup, fracs) -> Cocycle:
    table = tuple(tuple(PhaseValue(frac=Fraction(v)) for v in row) for row in fracs)
    return Cocycle(group, table)


def coboundary_of(group: FiniteGroup, nu_values) -> Cocycle:
    return CoboundaryWitness(group, tuple(nu_values)).coboundary()


def check_cocycle(mu: Cocycle, tol: float = ANGLE_TOL) -> list[tuple[int, int, int]]:
    """Triples (g, h, k) violating mu(h,k) mu(g,hk) == mu(gh,k) mu(g,h)."""
    grp = mu.group
    bad = []
    for g in grp.elements():
        for h in grp.elements():
            gh = grp.op(g, h)
            for k in grp.elements():
                lhs = mu(h, k) * mu(g, grp.op(h, k))
                rhs = mu(gh, k) * mu(g, h)
                if not lhs.close_to(rhs, tol):
                    bad.append((g, h, k))
    return bad


def cocycle_product(a: Cocycle, b: Cocycle) -> Cocycle:
    if a.group != b.group:
        raise ValidationError("cocycles live on different groups")
    return Cocycle(a.group, tuple(tuple(x * y for x, y in zip(ra, rb))
                                  for ra, rb in zip(a.table, b.table)))


def cocycle_inverse(a: Cocycle) -> Cocycle:
    return Cocycle(a.group, tuple(tuple(x.inverse() for x in row) for row in a.table))


def normalize(mu: Cocycle, tol: float = ANGLE_TOL) -> Cocycle:
    """Cohomologous normalized cocycle: mu(e,g) = mu(g,e) = 1.

    For a cocycle the identity row and column are constant at mu(e,e), so
    dividing the whole table by that constant (a coboundary of the constant
    function) normalizes it.
    """
    if check_cocycle(mu, tol):
        raise ValidationError("input does not satisfy the cocycle identity")
    e = mu.group.identity
    c = mu.table[e][e].inverse()
    out = Cocycle(mu.group, tuple(tuple(v * c for v in row) for row in mu.table))
    if not out.is_normalized(max(tol, 1e-12)):
        raise ValidationError("normalization failed; identity row is not constant")
    return out


def snap_cocycle(mu: Cocycle, max_denominator: int,
                 tol: float = SNAP_ANGLE_TOL) -> Cocycle:
    """Snap each approximate phase to the nearest p/q with q | max_denominator.

    Raises SnapError when an angle is further than ``tol`` (radians) from any
    admissible root of unity: silent misclassification is worse than failure.
    """
    rows = []
    for row in mu.table:
        out = []
        for v in row:
            if v.is_exact:
                if (v.frac * max_denominator) % 1 != 0:
                    raise SnapError(
                        f"exact phase {v.frac} is not a root of unity of order "
                        f"dividing {max_denominator}")
                out.append(v)
                continue
            turns = v.to_angle() / (2 * math.pi)
            p = round(turns * max_denominator)
            err = abs(turns - p / max_denominator) * 2 * math.pi
            if err > tol:
                raise SnapError(
                    f"phase angle {v.to_angle():.12f} is {err:.3e} rad from the "
                    f"nearest root of unity of order dividing {max_denominator}")
            out.append(PhaseValue(frac=Fraction(p, max_denominator)))
        rows.append(tuple(out))
    return Cocycle(mu.group, tuple(rows))


# ---------------------------------------------------------------------------
# Exponent coordinates and the cohomology lattices


class _H2Data:
    """Lattice data for H^2(G, U(1)) in normalized exponent coordinates.

    Coordinates are pairs (g, h) of non-identity elements (identity row and
    column of a normalized cocycle are fixed at 1); the coboundary unknowns
    are values at non-identity elements.
    """

    def __init__(self, group: FiniteGroup):
        if group.order > H2_ORDER_GUARD:
            raise ResourceGuardError(
                f"group order {group.order} exceeds the cohomology guard "
                f"({H2_ORDER_GUARD})")
        self.group = group
        n = group.order
        self.n_roots = n
        e = group.identity
        self.nonid = [g for g in group.elements() if g != e]
        self.pos = {g: i for i, g in enumerate(self.nonid)}
        k = len(self.nonid)
        self.dim = k * k

        self.delta1 = self._build_delta1()
        self.delta2_rows = self._build_delta2_rows()

        if self.dim == 0:
            self.cocycle_basis = []
            self.cob_gens = []
            self.cob_hnf = []
            self.divisors = []
            self.generator_vectors = []
            return

        self.cocycle_basis = _intlin.kernel_mod_basis(self.delta2_rows or [[0] * self.dim],
                                                      n)
        self.cob_gens = self._build_coboundary_gens()
        self.cob_hnf = _intlin.hnf_basis(self.cob_gens)

        divs, gens = _intlin.lattice_quotient(self.cocycle_basis, self.cob_gens)
        self.divisors = sorted(d for d in divs if d > 1)
        self.generator_vectors = [self.reduce(vec) for d, vec in zip(divs, gens) if d > 1]

    def pair_index(self, g: int, h: int) -> int:
        return self.pos[g] * len(self.nonid) + self.pos[h]

    def _build_delta1(self):
        # (d1 y)(g, h) = y(g) + y(h) - y(gh), with y(identity) = 0
        k = len(self.nonid)
        rows = []
        for g in self.nonid:
            for h in self.nonid:
                row = [0] * k
                row[self.pos[g]] += 1
                row[self.pos[h]] += 1
                gh = self.group.op(g, h)
                if gh != self.group.identity:
                    row[self.pos[gh]] -= 1
                rows.append(row)
        return rows

    def _build_delta2_rows(self):
        # (d2 c)(g,h,k) = c(h,k) - c(gh,k) + c(g,hk) - c(g,h); entries with an
        # identity argument vanish for normalized cochains. Duplicate and zero
        # rows are dropped; they do not change the solution lattice.
        e = self.group.identity
        seen = set()
        rows = []
        for g in self.nonid:
            for h in self.nonid:
                gh = self.group.op(g, h)
                for k in self.nonid:
                    hk = self.group.op(h, k)
                    row = [0] * self.dim
                    row[self.pair_index(h, k)] += 1
                    if gh != e:
                        row[self.pair_index(gh, k)] -= 1
                    if hk != e:
                        row[self.pair_index(g, hk)] += 1
                    row[self.pair_index(g, h)] -= 1
                    key = tuple(row)
                    if any(row) and key not in seen:
                        seen.add(key)
                        rows.append(row)
        return rows

    def _build_coboundary_gens(self):
        n = self.n_roots
        k = len(self.nonid)
        witness_lattice = _intlin.kernel_mod_basis(self.delta1, n)  # k x k
        image = _intlin.mat_mul(self.delta1, witness_lattice)       # dim x k
        gens = [[image[r][c] // n for c in range(k)] for r in range(self.dim)]
        for r in range(self.dim):
            for c in range(k):
                if image[r][c] % n:
                    raise ClassificationError("coboundary lattice construction failed")
        # adjoin n * identity: cochains are exponents mod n
        for r in range(self.dim):
            gens[r].extend(n if r == i else 0 for i in range(self.dim))
        return gens

    def exponents_of(self, mu: Cocycle) -> list[int]:
        """Exponent vector over denominator n for a normalized exact cocycle
        valued in n-th roots of unity."""
        n = self.n_roots
        vec = [0] * self.dim
        for g in self.nonid:
            for h in self.nonid:
                fr = mu(g, h).frac * n
                if fr % 1 != 0:
                    raise ClassificationError(
                        "cocycle entry is not an n-th root of unity")
                vec[self.pair_index(g, h)] = int(fr) % n
        return vec

    def cocycle_from_exponents(self, vec) -> Cocycle:
        grp = self.group
        n = self.n_roots
        one = PhaseValue.one()
        rows = []
        for g in grp.elements():
            row = []
            for h in grp.elements():
                if g == grp.identity or h == grp.identity:
                    row.append(one)
                else:
                    row.append(PhaseValue(frac=Fraction(vec[self.pair_index(g, h)], n)))
            rows.append(tuple(row))
        return Cocycle(grp, tuple(rows))

    def reduce(self, vec) -> tuple[int, ...]:
        return tuple(_intlin.reduce_mod_lattice(list(vec), self.cob_hnf))


@lru_cache(maxsize=None)
def _h2_data(group: FiniteGroup) -> _H2Data:
    return _H2Data(group)


def reduce_to_group_roots(mu: Cocycle) -> Cocycle:
    """Cohomologous normalized cocycle valued in |G|-th roots of unity.

    Uses the product trick: P(g) = prod_k mu(g, k) satisfies mu^n = d(P), so
    dividing by the coboundary of any fixed n-th root of P lands in mu_n.
    """
    grp = mu.group
    n = grp.order
    if not mu.is_exact:
        raise ValidationError("exact cocycle required")
    mu = normalize(mu)
    pfracs = []
    for g in grp.elements():
        total = Fraction(0)
        for k in grp.elements():
            total += mu(g, k).frac
        pfracs.append(total)
    # any fixed n-th root choice works; PhaseValue reduces mod 1 afterwards
    s = [PhaseValue(frac=f / n) for f in pfracs]
    rows = []
    for g in grp.elements():
        row = []
        for h in grp.elements():
            v = mu(g, h) * s[grp.op(g, h)] * s[g].inverse() * s[h].inverse()
            if (v.frac * n) % 1 != 0:
                raise ClassificationError("root-of-unity reduction failed")
            row.append(v)
        rows.append(tuple(row))
    return Cocycle(grp, tuple(rows))


# ---------------------------------------------------------------------------
# Classes


@dataclass(frozen=True)
class CohomologyClass:
    """An element of H^2(G, U(1)).

    ``exponents`` is the canonical representative: the clamp-reduced exponent
    vector (denominator |G|) against the Hermite basis of the coboundary
    lattice, in the fixed lexicographic pair ordering. Classes are equal iff
    these vectors are equal. For abelian groups the antisymmetrized table
    beta(g,h) = mu(g,h)/mu(h,g) is carried along as a gauge-invariant
    fingerprint.
    """

    group: FiniteGroup
    exponents: tuple[int, ...]
    fingerprint: tuple[tuple[Fraction, ...], ...] | None
    divisors: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return all(x == 0 for x in self.exponents)

    def representative(self) -> Cocycle:
        return _h2_data(self.group).cocycle_from_exponents(list(self.exponents))

    def __mul__(self, other: "CohomologyClass") -> "CohomologyClass":
        if self.group != other.group:
            raise ValidationError("classes live on different groups")
        return classify(cocycle_product(self.representative(), other.representative()))

    def inverse(self) -> "CohomologyClass":
        return classify(cocycle_inverse(self.representative()))

    def __eq__(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.group == other.group and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.group, self.exponents))


def _fingerprint(mu: Cocycle):
    grp = mu.group
    if not grp.is_abelian():
        return None
    return tuple(tuple((mu(g, h).frac - mu(h, g).frac) % 1 for h in grp.elements())
                 for g in grp.elements())


def _numeric_root_reduce(mu: Cocycle) -> Cocycle:
    """Gauge away the continuous part of an approximate cocycle.

    For any U(1) 2-cocycle, mu^n equals the coboundary of P(g) = prod_k
    mu(g, k), so dividing by an n-th root of P lands exactly on n-th roots of
    unity whatever phase gauge the table carries. Works up to the accumulated
    float error of the products.
    """
    import cmath

    grp = mu.group
    n = grp.order
    z = [[mu(g, h).to_complex() for h in grp.elements()] for g in grp.elements()]
    s = []
    for g in grp.elements():
        p = 1 + 0j
        for k in grp.elements():
            p *= z[g][k]
        s.append(cmath.exp(1j * cmath.phase(p) / n))
    rows = []
    for g in grp.elements():
        row = []
        for h in grp.elements():
            v = z[g][h] * s[grp.op(g, h)] / (s[g] * s[h])
            row.append(PhaseValue.from_angle(cmath.phase(v)))
        rows.append(tuple(row))
    return Cocycle(grp, tuple(rows))


def classify(mu: Cocycle, snap_denominator: int | None = None,
             tol: float = ANGLE_TOL) -> CohomologyClass:
    """Reduce a cocycle to its canonical cohomology class.

    Approximate tables are snapped first: directly against roots of unity of
    order dividing ``snap_denominator`` (default 2 * |G|^2, covering
    multipliers of representations up to the regular one), and if the table
    carries an arbitrary phase gauge that defeats the direct snap, the
    continuous part is gauged away first and the result snapped against
    |G|-th roots. Either way a genuine non-cocycle still fails loudly.
    """
    grp = mu.group
    data = _h2_data(grp)
    if check_cocycle(mu, tol):
        raise ValidationError("input does not satisfy the cocycle identity")
    if not mu.is_exact:
        try:
            mu = snap_cocycle(mu, snap_denominator or 2 * grp.order ** 2)
        except SnapError:
            mu = snap_cocycle(_numeric_root_reduce(mu), grp.order)
        if check_cocycle(mu):
            raise SnapError("snapped table no longer satisfies the cocycle identity")
    reduced = reduce_to_group_roots(mu)
    if data.dim == 0:
        return CohomologyClass(grp, (), _fingerprint(reduced), tuple(data.divisors))
    canonical = data.reduce(data.exponents_of(reduced))
    rep = data.cocycle_from_exponents(list(canonical))
    return CohomologyClass(grp, canonical, _fingerprint(rep), tuple(data.divisors))


def is_coboundary(mu: Cocycle, tol: float = ANGLE_TOL) -> CoboundaryWitness | None:
    """A witness nu with d(nu) = mu, if mu is a U(1)-coboundary.

    The witness is sought with values in M*|G|-th roots of unity, where M is
    the least common order of the entries of mu; that range is complete
    (the |G|-th power of any witness is a character).
    """
    grp = mu.group
    n = grp.order
    if not mu.is_exact:
        mu = snap_cocycle(mu, 2 * n ** 2)
    if check_cocycle(mu, tol):
        raise ValidationError("input does not satisfy the cocycle identity")
    mu = normalize(mu)
    data = _h2_data(grp)
    m = 1
    for row in mu.table:
        for v in row:
            m = math.lcm(m, v.frac.denominator)
    den = m * n
    target = []
    for g in data.nonid:
        for h in data.nonid:
            target.append(int(mu(g, h).frac * den) % den)
    if data.dim == 0:
        return CoboundaryWitness(grp, tuple(PhaseValue.one() for _ in grp.elements()))
    y = _intlin.solve_mod(data.delta1, target, den)
    if y is None:
        return None
    nu = [PhaseValue.one()] * n
    for g, yg in zip(data.nonid, y):
        nu[g] = PhaseValue(frac=Fraction(yg, den))
    witness = CoboundaryWitness(grp, tuple(nu))
    check = witness.coboundary()
    for g in grp.elements():
        for h in grp.elements():
            if check(g, h).frac != mu(g, h).frac:
                raise ClassificationError("coboundary witness verification failed")
    return witness


@dataclass(frozen=True)
class H2Result:
    group: FiniteGroup
    divisors: tuple[int, ...]
    generators: tuple[CohomologyClass, ...]

    @property
    def class_count(self) -> int:
        out = 1
        for d in self.divisors:
            out *= d
        return out


def compute_h2(group: FiniteGroup) -> H2Result:
    """Elementary divisors of H^2(G, U(1)) and one generating class per
    divisor. The empty divisor list means the trivial group."""
    data = _h2_data(group)
    gens = []
    for vec in data.generator_vectors:
        rep = data.cocycle_from_exponents(list(vec))
        gens.append(CohomologyClass(group, tuple(vec), _fingerprint(rep),
                                    tuple(data.divisors)))
    return H2Result(group, tuple(data.divisors), tuple(gens))


def brute_force_h2(group: FiniteGroup, root_order: int) -> int:
    """Independent oracle: count cohomology classes among cocycles valued in
    root_order-th roots of unity by exhaustive orbit bucketing.

    Cochains are enumerated exhaustively; the translations applied are all
    coboundaries d(nu) valued in root_order-th roots, with nu running over
    (root_order * |G|)-th roots so no fractional witness is missed.
    """
    n = group.order
    if root_order ** (n * n) > BRUTE_FORCE_GUARD:
        raise ResourceGuardError("brute-force search space exceeds the guard")
    data = _h2_data(group)
    dim = data.dim
    r = root_order
    if dim == 0:
        return 1

    def d2_ok(vec):
        for row in data.delta2_rows:
            total = 0
            for i, coef in enumerate(row):
                if coef:
                    total += coef * vec[i]
            if total % r:
                return False
        return True

    cocycles = set()
    vec = [0] * dim
    while True:
        if d2_ok(vec):
            cocycles.add(tuple(vec))
        i = 0
        while i < dim and vec[i] == r - 1:
            vec[i] = 0
            i += 1
        if i == dim:
            break
        vec[i] += 1

    rn = r * n
    k = len(data.nonid)
    coboundaries = set()
    y = [0] * k
    while True:
        img = _intlin.mat_vec(data.delta1, y)
        if all(v % n == 0 for v in img):
            coboundaries.add(tuple((v % rn) // n % r for v in img))
        i = 0
        while i < k and y[i] == rn - 1:
            y[i] = 0
            i += 1
        if i == k:
            break
        y[i] += 1

    size = len(coboundaries)
    if len(cocycles) % size:
        raise ClassificationError("coboundary translations do not tile the cocycles")
    return len(cocycles) // size
