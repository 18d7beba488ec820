"""Exact integer linear algebra: Smith/Hermite forms, modular solving,
lattice quotients.

Everything here works on ``list[list[int]]`` with Python integers, so there
is no overflow and pivoting is fully deterministic (canonical representatives
downstream depend on that). Sizes are desk-scale (a few hundred rows), so
simple dense algorithms are the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(cols):
                    oi[j] += aik * bk[j]
    return out


def mat_vec(a: list[list[int]], v: list[int]) -> list[int]:
    return [sum(ai[k] * v[k] for k in range(len(v))) for ai in a]


@dataclass
class SmithForm:
    """D = P @ A @ Q with P, Q unimodular; ``pinv``/``qinv`` their inverses.

    Transform matrices that were not tracked are None.
    """

    d: list[list[int]]
    p: list[list[int]] | None
    q: list[list[int]] | None
    pinv: list[list[int]] | None
    qinv: list[list[int]] | None
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))]


def smith_normal_form(a: list[list[int]], track_p: bool = True,
                      track_q: bool = True) -> SmithForm:
    """Smith normal form with transform matrices.

    Pivots are chosen as the smallest-magnitude nonzero entry (ties broken by
    row-major position), which keeps the reduction deterministic. Tracking the
    row transforms costs O(rows^2) per operation, so callers that only need
    the diagonal and Q (kernel computations on tall matrices) switch it off.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [row[:] for row in a]
    p = identity_matrix(rows) if track_p else None
    pinv = identity_matrix(rows) if track_p else None
    q = identity_matrix(cols) if track_q else None
    qinv = identity_matrix(cols) if track_q else None

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        if track_p:
            p[i], p[j] = p[j], p[i]
            for r in range(rows):
                pinv[r][i], pinv[r][j] = pinv[r][j], pinv[r][i]

    def swap_cols(i, j):
        for r in range(rows):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        if track_q:
            for r in range(cols):
                q[r][i], q[r][j] = q[r][j], q[r][i]
            qinv[i], qinv[j] = qinv[j], qinv[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        di, dj = d[i], d[j]
        for k in range(cols):
            di[k] += c * dj[k]
        if track_p:
            pi, pj = p[i], p[j]
            for k in range(rows):
                pi[k] += c * pj[k]
            for r in range(rows):
                pinv[r][j] -= c * pinv[r][i]

    def add_col(j, i, c):
        # col_j += c * col_i
        for r in range(rows):
            d[r][j] += c * d[r][i]
        if track_q:
            for r in range(cols):
                q[r][j] += c * q[r][i]
            qi, qj = qinv[i], qinv[j]
            for k in range(cols):
                qi[k] -= c * qj[k]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        if track_p:
            p[i] = [-x for x in p[i]]
            for r in range(rows):
                pinv[r][i] = -pinv[r][i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # Locate the smallest-magnitude nonzero entry of the working block.
        pivot = None
        best = None
        for i in range(t, rows):
            di = d[i]
            for j in range(t, cols):
                v = di[j]
                if v:
                    av = abs(v)
                    if best is None or av < best:
                        best, pivot = av, (i, j)
                        if av == 1:
                            break
            if best == 1:
                break
        if pivot is None:
            break
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])

        while True:
            changed = False
            for i in range(t + 1, rows):
                if d[i][t]:
                    qq = d[i][t] // d[t][t]
                    if qq:
                        add_row(i, t, -qq)
                    if d[i][t]:
                        # Remainder is strictly smaller; promote it to pivot.
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, cols):
                if d[t][j]:
                    qq = d[t][j] // d[t][t]
                    if qq:
                        add_col(j, t, -qq)
                    if d[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # Row and column are clear; enforce divisibility of the rest.
            offender = None
            piv = d[t][t]
            for i in range(t + 1, rows):
                di = d[i]
                for j in range(t + 1, cols):
                    if di[j] % piv:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)

        if d[t][t] < 0:
            negate_row(t)
        t += 1

    return SmithForm(d=d, p=p, q=q, pinv=pinv, qinv=qinv, rank=t)


def invariant_factors(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form of ``a``."""
    snf = smith_normal_form(a, track_p=False, track_q=False)
    return [x for x in snf.diagonal if x]


def _modinv(a: int, m: int) -> int:
    if m == 1:
        return 0
    return pow(a % m, -1, m)


def solve_mod(a: list[list[int]], b: list[int], modulus: int) -> list[int] | None:
    """One solution y of ``a @ y == b (mod modulus)``, or None."""
    snf = smith_normal_form(a)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    c = [x % modulus for x in mat_vec(snf.p, b)]
    w = [0] * cols
    for i in range(rows):
        di = snf.d[i][i] if i < min(rows, cols) else 0
        if di:
            g = gcd(di, modulus)
            if c[i] % g:
                return None
            mm = modulus // g
            w[i] = (c[i] // g) * _modinv(di // g, mm) % mm
        elif c[i] % modulus:
            return None
    return [x % modulus for x in mat_vec(snf.q, w)]


def kernel_mod_basis(a: list[list[int]], modulus: int) -> list[list[int]]:
    """Full-rank basis (columns) of the lattice {c : a @ c == 0 (mod modulus)}.

    The lattice contains modulus * Z^cols, so the basis matrix is cols x cols.
    """
    snf = smith_normal_form(a, track_p=False)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    scale = []
    for j in range(cols):
        dj = snf.d[j][j] if j < min(rows, cols) else 0
        scale.append(modulus // gcd(dj, modulus) if dj else 1)
    return [[snf.q[i][j] * scale[j] for j in range(cols)] for i in range(cols)]


def exact_solve(b: list[list[int]], c: list[list[int]]) -> list[list[int]]:
    """Solve the square full-rank system b @ x == c exactly; x must be integral."""
    n = len(b)
    k = len(c[0]) if c else 0
    aug = [[Fraction(b[i][j]) for j in range(n)] + [Fraction(c[i][j]) for j in range(k)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = [[None] * k for _ in range(n)]
    for i in range(n):
        for j in range(k):
            v = aug[i][n + j]
            if v.denominator != 1:
                raise ValueError("solution is not integral")
            out[i][j] = int(v)
    return out


def hnf_basis(gens: list[list[int]]) -> list[list[int]]:
    """Lower-triangular basis (columns) of the full-rank lattice spanned by
    the columns of ``gens``; diagonal pivots positive.

    Used for canonical coset representatives: clamping a vector coordinate by
    coordinate against this basis yields the unique representative with
    0 <= c[i] < pivot[i].
    """
    m = len(gens)
    work = [row[:] for row in gens]
    ncols = len(work[0]) if m else 0

    def col_addmul(j, i, c):
        for r in range(m):
            work[r][j] += c * work[r][i]

    def col_swap(i, j):
        for r in range(m):
            work[r][i], work[r][j] = work[r][j], work[r][i]

    for i in range(m):
        while True:
            nz = [j for j in range(i, ncols) if work[i][j]]
            if not nz:
                raise ValueError("lattice generators are not full rank")
            if len(nz) == 1:
                if nz[0] != i:
                    col_swap(i, nz[0])
                break
            a = min(nz, key=lambda j: (abs(work[i][j]), j))
            for j in nz:
                if j != a:
                    col_addmul(j, a, -(work[i][j] // work[i][a]))
        if work[i][i] < 0:
            for r in range(m):
                work[r][i] = -work[r][i]
    return [[work[r][c] for c in range(m)] for r in range(m)]


def reduce_mod_lattice(vec: list[int], basis: list[list[int]]) -> list[int]:
    """Canonical coset representative of ``vec`` modulo the lattice with the
    given lower-triangular column basis: 0 <= out[i] < basis[i][i]."""
    m = len(vec)
    out = list(vec)
    for i in range(m):
        piv = basis[i][i]
        qq = out[i] // piv
        if qq:
            for r in range(i, m):
                out[r] -= qq * basis[r][i]
    return out


def lattice_quotient(big_basis: list[list[int]], sub_gens: list[list[int]]):
    """Structure of L_big / L_sub for full-rank lattices L_sub <= L_big in Z^m.

    Returns (divisors, generators): the elementary divisors (all m of them,
    including 1s) and, per divisor, the coordinates of a generating coset in
    Z^m. Raises if L_sub is not full rank inside L_big.
    """
    x = exact_solve(big_basis, sub_gens)
    snf = smith_normal_form(x)
    m = len(big_basis)
    if snf.rank < m:
        raise ValueError("sublattice is not full rank")
    divs = [snf.d[i][i] for i in range(m)]
    # Column i of big_basis @ pinv generates the i-th cyclic factor.
    gen_mat = mat_mul(big_basis, snf.pinv)
    gens = [[gen_mat[r][i] for r in range(m)] for i in range(m)]
    return divs, gens
