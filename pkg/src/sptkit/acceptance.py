"""The acceptance battery: one check per release criterion, shared between
the command-line ``verify suite`` and the pytest suite.

Each criterion returns (name, passed, detail) with fully deterministic detail
text for a fixed seed, so two runs of the suite produce byte-identical
reports.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .cohomology import brute_force_h2, classify, compute_h2, trivial_cocycle
from .groups import build_group, cyclic_charge, so3_detector_cartesian
from .locality import build_f_function, check_f_axioms, exponential_decay, stretched_decay
from .mps import canonicalize, connected_correlation, schmidt_spectrum
from .projreps import extract_multiplier
from .sptindex import (compute_edge_rep, compute_index, detector_verdict,
                       stacked_index_check, top_block_class,
                       top_block_matrix_elements)
from .states import (ChargedProductSpec, aklt_state, apply_circuit_to_product,
                     charge_transfer_circuit, cluster_state, fixed_point_state,
                     gate_equivariance_residual, product_overlap, product_state,
                     spin1_product_state, stack_states)

SZ_CARTESIAN = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    runtime_budget: float | None = None
    runtime: float | None = None

    @property
    def ok(self) -> bool:
        if not self.passed:
            return False
        if self.runtime_budget is not None and self.runtime is not None:
            return self.runtime <= self.runtime_budget
        return True


def _timed(budget):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            result = fn(*args, **kwargs)
            result.runtime = time.perf_counter() - t0
            result.runtime_budget = budget
            return result
        run.__name__ = fn.__name__
        run.takes_seed = "seed" in fn.__code__.co_varnames
        return run
    return wrap


@_timed(10.0)
def criterion_h2_correctness() -> CriterionResult:
    problems = []
    for n in range(2, 9):
        divs = compute_h2(build_group(f"Z{n}")).divisors
        if divs != ():
            problems.append(f"Z{n} divisors {list(divs)}")
    if compute_h2(build_group("Z2xZ2")).divisors != (2,):
        problems.append("Z2xZ2 divisors wrong")
    if compute_h2(build_group("Z2xZ2xZ2")).divisors != (2, 2, 2):
        problems.append("Z2xZ2xZ2 divisors wrong")
    for name, root in (("Z2", 2), ("Z3", 3), ("Z2xZ2", 2)):
        grp = build_group(name)
        if brute_force_h2(grp, root) != compute_h2(grp).class_count:
            problems.append(f"oracle disagrees on {name}")
    detail = "cyclic trivial, Z2xZ2 -> [2], Z2^3 -> [2,2,2], oracle agrees" \
        if not problems else "; ".join(problems)
    return CriterionResult("h2-divisors-and-oracle", not problems, detail)


@_timed(30.0)
def criterion_surjectivity_roundtrip() -> CriterionResult:
    problems = []
    count = 0
    for name in ("Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8",
                 "Z2xZ2", "Z2xZ2xZ2", "D4", "Q8", "S3"):
        grp = build_group(name)
        for i, gen in enumerate(compute_h2(grp).generators):
            state = fixed_point_state(gen.representative())
            got = compute_index(state).cohomology_class
            count += 1
            if got != gen:
                problems.append(f"{name} generator {i}")
    detail = f"{count} generator classes round-trip exactly" if not problems \
        else "failed: " + ", ".join(problems)
    return CriterionResult("fixed-point-roundtrip", not problems, detail)


@_timed(1.0)
def criterion_haldane_detection() -> CriterionResult:
    det = so3_detector_cartesian()
    res_aklt = detector_verdict(aklt_state(), det)
    res_triv = detector_verdict(spin1_product_state(), det)
    ok = (res_aklt.verdict == "haldane"
          and abs(res_aklt.diagnostics["commutator_phase"] + 1) < 1e-8
          and res_triv.verdict == "trivial"
          and abs(res_triv.diagnostics["commutator_phase"] - 1) < 1e-8)
    detail = "aklt commutator -1 (haldane), product commutator +1 (trivial)"
    return CriterionResult("haldane-detector", ok, detail)


@_timed(60.0)
def criterion_stacking_homomorphism() -> CriterionResult:
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    z2 = [("cluster", cluster_state()),
          ("fixed-point", fixed_point_state(gen.representative())),
          ("product", product_state(grp))]
    d2 = [("aklt", aklt_state()), ("spin1-product", spin1_product_state())]
    problems = []
    pairs = 0
    for family in (z2, d2):
        for la, a in family:
            for lb, b in family:
                pairs += 1
                if not stacked_index_check(a, b):
                    problems.append(f"{la}(x){lb}")
                res = compute_index(a)
                if res.diagnostics["max_edge_residual"] > 1e-6:
                    problems.append(f"{la} residual")
    double_aklt = canonicalize(stack_states(aklt_state(), aklt_state()))
    if not compute_index(double_aklt).trivial:
        problems.append("aklt(x)aklt not trivial")
    detail = f"{pairs} catalog pairs multiply; aklt(x)aklt trivial" \
        if not problems else "failed: " + ", ".join(problems)
    return CriterionResult("stacking-homomorphism", not problems, detail)


@_timed(60.0)
def criterion_gauge_invariance(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    catalog = [("aklt", aklt_state()), ("cluster", cluster_state()),
               ("fixed-point", fixed_point_state(gen.representative())),
               ("product", product_state(grp))]
    problems = []
    for label, m in catalog:
        base = compute_index(m).cohomology_class
        edge = compute_edge_rep(m)
        dim = m.bond_dim
        snap = 2 * m.group.order * dim
        for _ in range(50):
            phases = np.exp(2j * np.pi * rng.random(m.group.order))
            phases[m.group.identity] = 1.0
            _, mu = extract_multiplier(
                m.group, [p * u for p, u in zip(phases, edge.unitaries)])
            if classify(mu, snap_denominator=snap) != base:
                problems.append(f"{label} phase gauge")
                break
        for _ in range(20):
            h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            v = np.linalg.qr(h)[0]
            _, mu = extract_multiplier(
                m.group, [v @ u @ v.conj().T for u in edge.unitaries])
            if classify(mu, snap_denominator=snap) != base:
                problems.append(f"{label} basis change")
                break
    detail = "50 phase gauges + 20 basis changes per catalog state" \
        if not problems else "failed: " + ", ".join(problems)
    return CriterionResult("gauge-invariance", not problems, detail)


@_timed(5.0)
def criterion_charge_transfer(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    grp = build_group("Z4")
    n = 12
    charges = {}
    for s in range(n):
        k = int(rng.integers(0, 4))
        if k:
            charges[s] = cyclic_charge(grp, k)
    spec = ChargedProductSpec(group=grp, charges=charges)
    circuit, final_spec, initial, final = charge_transfer_circuit(spec, n)
    resid = gate_equivariance_residual(circuit)
    out = apply_circuit_to_product(circuit, initial)
    overlap = abs(product_overlap(out, final))
    interior_trivial = all(s >= n for s in final_spec.support())
    ok = resid < 1e-12 and abs(overlap - 1) < 1e-12 and interior_trivial \
        and circuit.layer_supports_disjoint()
    detail = (f"window 12 on Z4: equivariance residual < 1e-12, interior "
              f"neutral, product vector reproduced")
    if not ok:
        detail = (f"residual={resid:.2e} overlap_err={abs(overlap-1):.2e} "
                  f"interior_trivial={interior_trivial}")
    return CriterionResult("charge-transfer-circuit", ok, detail)


@_timed(30.0)
def criterion_schmidt_structure() -> CriterionResult:
    problems = []
    m = aklt_state()
    sp = schmidt_spectrum(m)
    if not np.allclose(sp.values, [0.5, 0.5], atol=1e-10):
        problems.append("aklt spectrum")
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    catalog = [m, cluster_state(), product_state(grp),
               fixed_point_state(trivial_cocycle(grp)),
               fixed_point_state(gen.representative())]
    for state in catalog:
        s = schmidt_spectrum(state)
        if abs(s.total - 1) > 1e-9:
            problems.append(f"{state.label} sum")
        if s.values[0] < 1 / state.bond_dim ** 2 - 1e-12:
            problems.append(f"{state.label} lower bound")
    detail = "aklt (1/2, 1/2); all catalog states normalized with " \
             "lambda_1 >= 1/D^2" if not problems else "; ".join(problems)
    return CriterionResult("schmidt-structure", not problems, detail)


@_timed(30.0)
def criterion_correlation_decay(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    problems = []
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    for label, state in (("trivial", fixed_point_state(trivial_cocycle(grp))),
                         ("pauli", fixed_point_state(gen.representative()))):
        d = state.d
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a = a + a.conj().T
        b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        b = b + b.conj().T
        for r in (2, 3, 4):
            if abs(connected_correlation(state, a, b, r)) > 1e-12:
                problems.append(f"fixed-point {label} r={r}")
    m = aklt_state()
    corr = [connected_correlation(m, SZ_CARTESIAN, SZ_CARTESIAN, r)
            for r in range(1, 11)]
    for r in range(2, 11):
        ratio = abs(corr[r - 1]) / abs(corr[r - 2])
        if abs(ratio - 1 / 3) > 1e-6:
            problems.append(f"aklt ratio r={r}")
    detail = "fixed-point correlations vanish beyond distance 1; aklt " \
             "ratio 1/3 at r = 2..10" if not problems else "; ".join(problems)
    return CriterionResult("correlation-decay", not problems, detail)


@_timed(30.0)
def criterion_top_block(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    problems = []
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    if not top_block_class(product_state(grp)).is_trivial:
        problems.append("product top block")
    if not top_block_class(fixed_point_state(trivial_cocycle(grp))).is_trivial:
        problems.append("trivial fixed point top block")
    if top_block_class(aklt_state()).is_trivial:
        problems.append("aklt top block")
    if top_block_class(cluster_state()).is_trivial:
        problems.append("cluster top block")

    m = fixed_point_state(gen.representative())
    op = rng.normal(size=(m.d, m.d))
    op = op + op.T
    for w in (2, 3, 4):
        block, bulk = top_block_matrix_elements(m, op, w)
        if np.max(np.abs(block - bulk * np.eye(block.shape[0]))) > 1e-12:
            problems.append(f"fixed-point window w={w}")
    m = aklt_state()
    devs = []
    for w in range(2, 9):
        block, bulk = top_block_matrix_elements(m, SZ_CARTESIAN, w)
        devs.append(float(np.max(np.abs(block - bulk * np.eye(2)))))
    scale = devs[0] * 9
    for i, w in enumerate(range(2, 9)):
        predicted = scale * (1 / 3) ** w
        if not (predicted / 2 <= devs[i] <= predicted * 2):
            problems.append(f"aklt window w={w}")
    detail = "top-block classes match the index; window estimates exact on " \
             "fixed points and (1/3)^w on aklt" if not problems \
        else "; ".join(problems)
    return CriterionResult("top-block-diagnostics", not problems, detail)


@_timed(10.0)
def criterion_f_function_axioms() -> CriterionResult:
    problems = []
    for f in (exponential_decay(1.0, 1000), stretched_decay(1.0, 0.5, 1000)):
        ff = build_f_function(f)
        report = check_f_axioms(ff)
        if not report["ok"]:
            problems.append(f"{f.kind}: axioms")
        for r in range(1, 1000):
            if f.log_at(r) > ff.log_at(r + 1) + 1e-12:
                problems.append(f"{f.kind}: domination at r={r}")
                break
    detail = "exp and stretched profiles: monotone, integrable, convolution " \
             "bound, f(r) <= F(r+1)" if not problems else "; ".join(problems)
    return CriterionResult("f-function-axioms", not problems, detail)


CRITERIA = (
    criterion_h2_correctness,
    criterion_surjectivity_roundtrip,
    criterion_haldane_detection,
    criterion_stacking_homomorphism,
    criterion_gauge_invariance,
    criterion_charge_transfer,
    criterion_schmidt_structure,
    criterion_correlation_decay,
    criterion_top_block,
    criterion_f_function_axioms,
)


def run_battery(seed: int = 0) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        try:
            results.append(fn(seed) if fn.takes_seed else fn())
        except Exception as err:  # a crashed criterion is a failed criterion
            results.append(CriterionResult(fn.__name__, False,
                                           f"error: {type(err).__name__}: {err}"))
    return results


def format_report(results: list[CriterionResult], seed: int) -> str:
    lines = [f"verify suite (seed={seed})"]
    for i, r in enumerate(results, 1):
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status} {i:02d} {r.name}: {r.detail}")
    total = sum(1 for r in results if r.ok)
    lines.append(f"{total}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"


def run_suite_with_determinism(seed: int = 0):
    """Run the battery twice; the eleventh criterion is byte-identical
    reports across the two runs."""
    first = run_battery(seed)
    report_a = format_report(first, seed)
    report_b = format_report(run_battery(seed), seed)
    det = CriterionResult("determinism",
                          report_a == report_b,
                          "two runs with the same seed produce byte-identical "
                          "reports")
    results = first + [det]
    return results, format_report(results, seed)
