"""Interaction norms and F-functions on the one-dimensional lattice.

An F-function must be non-increasing, uniformly summable over the lattice,
and satisfy the convolution bound sum_z F(d(x,z)) F(d(z,y)) <= C F(d(x,y)).
Given a fast-decaying profile f, we build

    F(r) = C * exp(-g(r)) / (1 + r)^2,

where g is the largest subadditive minorant (computed by dynamic programming)
of half the log-profile, psi(r) = -log f(r) / 2. The polynomial factor
carries the summability and the convolution bound (both standard for
1/(1+r)^2 on Z); subadditivity of g makes the convolution bound survive the
extra decay, because g(d(x,y)) <= g(d(x,z)) + g(d(z,y)) along any
intermediate point. Spending only half the log-profile on g leaves room for
the constant C, fixed so that f(r) <= F(r+1) holds across the whole table.

Everything runs in log space: fast profiles underflow float64 well before
r = 1000, so the log table is the primary representation and the float table
carries an explicit underflow marker.

All constants come from the truncated lattice {0..r_max}. The reported
convolution constant uses the full-range sum S(r) = sum_u F(|u|) F(|r-u|),
which dominates the z-sum of every pair at distance r, so the convolution
inequality holds pairwise with the reported constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-12
SUPERPOLY_POWERS = (1, 2, 4, 8)
FLOAT_UNDERFLOW_LOG = math.log(5e-324)


@dataclass
class DecayFunction:
    """A non-increasing, strictly positive, faster-than-any-power profile
    f(1), f(2), ..., stored as log values."""

    kind: str
    log_values: np.ndarray          # index r-1 holds log f(r)
    params: dict = field(default_factory=dict)

    @property
    def r_max(self) -> int:
        return len(self.log_values)

    def log_at(self, r: int) -> float:
        if r < 1 or r > self.r_max:
            raise ValidationError(f"decay function tabulated on 1..{self.r_max}")
        return float(self.log_values[r - 1])

    def at(self, r: int) -> float:
        return math.exp(self.log_at(r))


def _validate_decay(log_values: np.ndarray) -> int:
    """Monotonicity plus the superpolynomial spot check; returns the first
    radius beyond which r^p f(r) decreases for all checked powers."""
    lv = np.asarray(log_values, dtype=float)
    if lv.ndim != 1 or len(lv) < 4:
        raise ValidationError("need at least four tabulated values")
    if not np.all(np.isfinite(lv)):
        raise ValidationError("profile must be strictly positive")
    if np.any(np.diff(lv) > 1e-15):
        raise ValidationError("profile must be non-increasing")
    r = np.arange(1, len(lv) + 1, dtype=float)
    r0 = 1
    for p in SUPERPOLY_POWERS:
        g = p * np.log(r) + lv
        dg = np.diff(g)
        increasing = np.nonzero(dg > 1e-15)[0]
        if len(increasing) and increasing[-1] + 2 >= len(lv):
            raise ValidationError(
                f"r^{p} f(r) is still increasing at the end of the table; "
                "profile does not decay superpolynomially")
        if len(increasing):
            r0 = max(r0, int(increasing[-1]) + 2)
    return r0


def exponential_decay(rate: float, r_max: int) -> DecayFunction:
    if rate <= 0:
        raise ValidationError("decay rate must be positive")
    r = np.arange(1, r_max + 1, dtype=float)
    f = DecayFunction(kind="exponential", log_values=-rate * r,
                      params={"rate": rate})
    f.params["superpoly_r0"] = _validate_decay(f.log_values)
    return f


def stretched_decay(rate: float, power: float, r_max: int) -> DecayFunction:
    if rate <= 0 or not (0 < power <= 1):
        raise ValidationError("need rate > 0 and stretching power in (0, 1]")
    r = np.arange(1, r_max + 1, dtype=float)
    f = DecayFunction(kind="stretched", log_values=-rate * r ** power,
                      params={"rate": rate, "power": power})
    f.params["superpoly_r0"] = _validate_decay(f.log_values)
    return f


def table_decay(values, r_max: int | None = None) -> DecayFunction:
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0):
        raise ValidationError("profile must be strictly positive")
    lv = np.log(vals if r_max is None else vals[:r_max])
    f = DecayFunction(kind="table", log_values=lv)
    f.params["superpoly_r0"] = _validate_decay(f.log_values)
    return f


@dataclass
class FFunction:
    """Tabulated F on 0..r_max with its integrability and convolution
    constants; ``log_values`` is authoritative, ``values`` underflows to zero
    past ``underflow_at`` (None if representable everywhere)."""

    log_values: np.ndarray
    c_integrability: float
    c_convolution: float
    source: DecayFunction
    underflow_at: int | None = None

    @property
    def r_max(self) -> int:
        return len(self.log_values) - 1

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def log_at(self, r: int) -> float:
        return float(self.log_values[r])

    def at(self, r: int) -> float:
        return math.exp(self.log_values[r])


def _subadditive_envelope(psi: np.ndarray) -> np.ndarray:
    """Largest subadditive g <= psi on indices 1..len(psi)-1, by the infimal
    convolution recursion g(r) = min(psi(r), min_m g(m) + g(r-m)).

    For a non-decreasing psi the envelope is non-decreasing as well.
    """
    n = len(psi) - 1
    g = np.empty(n + 1)
    g[0] = 0.0
    if n >= 1:
        g[1] = psi[1]
    for r in range(2, n + 1):
        g[r] = min(float(psi[r]), float(np.min(g[1:r] + g[r - 1:0:-1])))
    return g


def build_f_function(f: DecayFunction, r_max: int | None = None) -> FFunction:
    """Build the F-function for a profile and report the lattice constants."""
    r_max = r_max or f.r_max
    if r_max > f.r_max:
        raise ValidationError("profile table shorter than requested range")
    psi = np.empty(r_max + 1)
    psi[0] = 0.0
    for r in range(1, r_max + 1):
        psi[r] = -f.log_at(r) / 2.0
    g = _subadditive_envelope(psi)
    if np.any(np.diff(g[1:]) < -1e-12):
        raise ValidationError("decay envelope is not monotone; invalid profile")

    # smallest C with C exp(-g(r+1)) / (2+r)^2 >= f(r) on the table
    log_c = 0.0
    for r in range(1, r_max):
        log_c = max(log_c, f.log_at(r) + 2 * math.log(2 + r) + g[r + 1])

    radii = np.arange(r_max + 1, dtype=float)
    log_f = log_c - g - 2 * np.log1p(radii)
    log_f[0] = log_c - g[1]

    c_int = _integrability_constant(log_f)
    c_conv = _convolution_constant(log_f)
    under = np.nonzero(log_f < FLOAT_UNDERFLOW_LOG)[0]
    return FFunction(log_values=log_f, c_integrability=c_int,
                     c_convolution=c_conv, source=f,
                     underflow_at=int(under[0]) if len(under) else None)


def _logsumexp(a: np.ndarray) -> float:
    if len(a) == 0:
        return -math.inf
    m = float(np.max(a))
    return m + math.log(float(np.sum(np.exp(a - m))))


def _integrability_constant(log_f: np.ndarray) -> float:
    # max over x of sum_y F(|x - y|) on the window; the underflowed tail
    # contributes less than 1e-300 absolutely, so float64 sums are exact here
    vals = np.exp(np.clip(log_f, FLOAT_UNDERFLOW_LOG, None))
    prefix = np.concatenate([[0.0], np.cumsum(vals)])
    r = len(vals) - 1
    best = 0.0
    for x in range(r + 1):
        total = float(prefix[x + 1] + prefix[r - x + 1] - prefix[1])
        best = max(best, total)
    return best


def _convolution_constant(log_f: np.ndarray) -> float:
    """max_r S(r) / F(r) with S(r) = sum over all u with both indices in
    range of F(|u|) F(|r-u|); S(r) dominates every truncated pair sum."""
    r_max = len(log_f) - 1
    best = 0.0
    for r in range(r_max + 1):
        u = np.arange(r - r_max, r_max + 1)
        logs = log_f[np.abs(u)] + log_f[np.abs(r - u)] - log_f[r]
        best = max(best, math.exp(_logsumexp(logs)))
    return best


def check_f_axioms(ff: FFunction, exhaustive_window: int = 150) -> dict:
    """Verify the F-function axioms on the table.

    Monotonicity, positivity, and the seed inequality f(r) <= F(r+1) are
    exact log-table checks over the whole range. The convolution inequality
    is checked exhaustively over pairs in a window and by the domination
    bound (the full-range sum max'd in c_convolution) everywhere else.
    """
    log_f = ff.log_values
    r_max = ff.r_max
    out = {
        "non_increasing": bool(np.all(np.diff(log_f) <= 1e-15)),
        "strictly_positive": bool(np.all(np.isfinite(log_f))),
        "integrability_constant": ff.c_integrability,
        "convolution_constant": ff.c_convolution,
    }
    seed_ok = True
    for r in range(1, min(ff.source.r_max, r_max - 1) + 1):
        if ff.source.log_at(r) > log_f[r + 1] + 1e-12:
            seed_ok = False
            break
    out["dominates_shifted_profile"] = seed_ok

    w = min(exhaustive_window, r_max)
    ok = True
    worst = 0.0
    for x in range(w + 1):
        for y in range(x, w + 1):
            z = np.arange(0, w + 1)
            logs = log_f[np.abs(x - z)] + log_f[np.abs(z - y)] - log_f[y - x]
            ratio = math.exp(_logsumexp(logs))
            worst = max(worst, ratio)
            if ratio > ff.c_convolution * (1 + 1e-12):
                ok = False
    out["convolution_window_ok"] = ok
    out["convolution_window_worst"] = worst
    out["ok"] = (out["non_increasing"] and out["strictly_positive"]
                 and out["dominates_shifted_profile"] and ok
                 and math.isfinite(ff.c_integrability)
                 and math.isfinite(ff.c_convolution))
    return out


# ---------------------------------------------------------------------------
# Interactions and their norms


@dataclass
class Term:
    support: tuple[int, int]        # interval [a, b], inclusive
    matrix: np.ndarray

    def __post_init__(self):
        a, b = self.support
        if a > b:
            raise ValidationError("support interval is empty")
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValidationError("term matrix must be square")
        if np.linalg.norm(self.matrix - self.matrix.conj().T) > HERMITIAN_TOL:
            raise ValidationError("term matrix must be Hermitian")

    @property
    def diameter(self) -> int:
        return self.support[1] - self.support[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


@dataclass
class Interaction:
    """A finite family of Hermitian terms on a declared window; the time
    dependence is a finite list of piecewise-constant slices over [0, 1]."""

    window: tuple[int, int]
    slices: list[list[Term]]

    def __post_init__(self):
        lo, hi = self.window
        for sl in self.slices:
            for t in sl:
                if t.support[0] < lo or t.support[1] > hi:
                    raise ValidationError(
                        f"term support {t.support} leaves the window {self.window}")

    @staticmethod
    def static(window, terms) -> "Interaction":
        return Interaction(window=window, slices=[list(terms)])

    def all_terms(self):
        for sl in self.slices:
            yield from sl


def tdi_f_norm(h: Interaction, f: DecayFunction) -> float:
    """sup over time slices of sup_j sum_{S owns j} ||H(S)|| / f(1 + diam S)."""
    lo, hi = h.window
    best = 0.0
    for sl in h.slices:
        for j in range(lo, hi + 1):
            total = 0.0
            for t in sl:
                if t.support[0] <= j <= t.support[1]:
                    total += t.norm / f.at(1 + t.diameter)
            best = max(best, total)
    return best


def anchored_norm(h: Interaction, anchor, f: DecayFunction) -> float:
    """The f-norm when every term meets the anchor region, else infinity."""
    anchor = set(anchor)
    for t in h.all_terms():
        if not any(t.support[0] <= s <= t.support[1] for s in anchor):
            return math.inf
    return tdi_f_norm(h, f)


def pair_norm(h: Interaction, ff: FFunction) -> float:
    """sup over slices and site pairs of (1/F(dist)) sum over terms covering
    both sites of the pair."""
    lo, hi = h.window
    best = 0.0
    for sl in h.slices:
        for x in range(lo, hi + 1):
            for y in range(x, hi + 1):
                total = 0.0
                for t in sl:
                    if t.support[0] <= x and y <= t.support[1]:
                        total += t.norm
                if total:
                    best = max(best, total / ff.at(y - x))
    return best
