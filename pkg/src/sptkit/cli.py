"""Batch command-line front end with stable JSON input and output.

Results go to standard output (or --out) and are byte-identical across runs
on the same inputs; a run manifest with input digests and wall time goes to
standard error, where it cannot disturb reproducibility checks.

Exit codes: 0 success, 1 validation error, 2 broken symmetry or degenerate
transfer operator, 3 snap or classification failure, 4 resource guard.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__, serialize
from .cohomology import check_cocycle, classify, compute_h2
from .errors import SptError, ValidationError
from .groups import build_group, so3_detector_cartesian, u1_detector
from .locality import build_f_function, exponential_decay, stretched_decay
from .projreps import extract_multiplier
from .sptindex import compute_index, detector_verdict
from .states import catalog_state, charge_transfer_circuit, fixed_point_state

TOLERANCES = {
    "unitary": 1e-10,
    "multiplier_residual": 1e-8,
    "edge_residual": 1e-8,
    "symmetry": 1e-6,
    "snap_angle": 1e-6,
    "eigensolver": 1e-12,
    "gate_equivariance": 1e-12,
}


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _emit(payload, out_path, manifest):
    text = serialize.dumps(payload) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(serialize.dumps(manifest) + "\n")


def _manifest(args, inputs):
    paths = [p for p in inputs if p and os.path.exists(p)]
    return {
        "command": args._command_words,
        "inputs": {p: _digest(p) for p in paths},
        "version": __version__,
        "tolerances": TOLERANCES,
        "wall_time_s": round(time.perf_counter() - args._t0, 6),
    }


def _load_group(args):
    if args.group and os.path.exists(args.group):
        return serialize.group_from_json(serialize.loads_file(args.group))
    if args.group:
        return build_group(args.group)
    raise ValidationError("a group (catalog name or JSON file) is required")


def _workers() -> int:
    raw = os.environ.get("TOOL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as err:
        raise ValidationError(f"TOOL_THREADS must be an integer, got {raw!r}") from err
    if n < 1:
        raise ValidationError("TOOL_THREADS must be at least 1")
    return n


# -- subcommand bodies ---------------------------------------------------------


def cmd_group_show(args):
    grp = _load_group(args)
    payload = serialize.group_to_json(grp)
    payload["abelian"] = grp.is_abelian()
    payload["exponent"] = grp.exponent()
    _emit(payload, args.out, _manifest(args, [args.group]))
    return 0


def cmd_cohomology_h2(args):
    grp = _load_group(args)
    res = compute_h2(grp)
    payload = {
        "divisors": list(res.divisors),
        "class_count": res.class_count,
        "generators": [serialize.cocycle_to_json(g.representative())
                       for g in res.generators],
    }
    _emit(payload, args.out, _manifest(args, [args.group]))
    return 0


def cmd_cocycle_check(args):
    grp = _load_group(args)
    mu = serialize.cocycle_from_json(serialize.loads_file(args.cocycle), grp)
    bad = check_cocycle(mu, args.tol)
    payload = {"violations": [list(t) for t in bad[:50]],
               "violation_count": len(bad), "ok": not bad}
    _emit(payload, args.out, _manifest(args, [args.group, args.cocycle]))
    return 0


def cmd_cocycle_classify(args):
    grp = _load_group(args)
    mu = serialize.cocycle_from_json(serialize.loads_file(args.cocycle), grp)
    cls = classify(mu, snap_denominator=args.snap_den)
    _emit(serialize.class_to_json(cls), args.out,
          _manifest(args, [args.group, args.cocycle]))
    return 0


def cmd_rep_extract(args):
    grp = _load_group(args)
    _, mats = serialize.rep_matrices_from_json(serialize.loads_file(args.rep), grp)
    rep, mu = extract_multiplier(grp, mats, tol=args.tol)
    cls = classify(mu, snap_denominator=2 * grp.order * rep.dim)
    payload = {"multiplier": serialize.cocycle_to_json(mu),
               "class": serialize.class_to_json(cls)}
    _emit(payload, args.out, _manifest(args, [args.group, args.rep]))
    return 0


def cmd_state_build(args):
    kind = args.kind
    params = {}
    inputs = []
    if kind == "product":
        params["group"] = _load_group(args)
        if args.charge:
            params["charge"] = serialize.charge_from_json(
                serialize.loads_file(args.charge), params["group"])
            inputs.append(args.charge)
    if kind == "fixed-point":
        if not args.cocycle:
            raise ValidationError("fixed-point states need --cocycle")
        grp = _load_group(args) if args.group else None
        params["cocycle"] = serialize.cocycle_from_json(
            serialize.loads_file(args.cocycle), grp)
        inputs.append(args.cocycle)
    state = catalog_state(kind, **params)
    _emit(serialize.state_to_json(state), args.out, _manifest(args, inputs))
    return 0


def cmd_index_compute(args):
    state = serialize.state_from_json(serialize.loads_file(args.state))
    workers = _workers()
    if args.detector:
        if args.detector == "so3":
            det = so3_detector_cartesian()
        else:
            det = u1_detector(state.group.order, range(state.d))
        res = detector_verdict(state, det, workers=workers)
    else:
        res = compute_index(state, workers=workers)
    payload = {
        "trivial": res.trivial,
        "class": serialize.class_to_json(res.cohomology_class),
        "residuals": {
            "max_edge_residual": res.diagnostics["max_edge_residual"],
            "injectivity_gap": res.diagnostics["injectivity_gap"],
        },
    }
    if res.verdict is not None:
        payload["verdict"] = res.verdict
    if "commutator_phase" in res.diagnostics:
        payload["commutator_phase"] = serialize.complex_to_json(
            res.diagnostics["commutator_phase"])
    _emit(payload, args.out, _manifest(args, [args.state]))
    return 0


def cmd_circuit_charge_transfer(args):
    data = serialize.loads_file(args.charges)
    spec = serialize.charged_spec_from_json(data)
    circuit, final_spec, initial, final = charge_transfer_circuit(spec, args.length)
    from .states import (apply_circuit_to_product, gate_equivariance_residual,
                         product_overlap)

    resid = gate_equivariance_residual(circuit)
    out_vectors = apply_circuit_to_product(circuit, initial)
    overlap = abs(product_overlap(out_vectors, final))
    payload = serialize.circuit_to_json(circuit)
    payload["final_spec"] = serialize.charged_spec_to_json(final_spec)
    payload["equivariance_residual"] = resid
    payload["final_overlap"] = overlap
    _emit(payload, args.out, _manifest(args, [args.charges]))
    return 0


def cmd_locality_ffunction(args):
    kind, _, rest = args.decay.partition(":")
    if kind in ("exp", "exponential"):
        f = exponential_decay(float(rest or 1.0), args.rmax)
    elif kind in ("stretched", "str"):
        rate, _, power = rest.partition(":")
        f = stretched_decay(float(rate or 1.0), float(power or 0.5), args.rmax)
    else:
        raise ValidationError(
            f"unknown decay spec {args.decay!r}; use exp:RATE or "
            "stretched:RATE:POWER")
    ff = build_f_function(f)
    _emit(serialize.ffunction_to_json(ff), args.out, _manifest(args, []))
    return 0


def cmd_verify_suite(args):
    from .acceptance import run_suite_with_determinism

    results, report = run_suite_with_determinism(args.seed)
    sys.stdout.write(report)
    sys.stderr.write(serialize.dumps(_manifest(args, [])) + "\n")
    return 0 if all(r.ok for r in results) else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sptkit",
        description="classify one-dimensional symmetry-protected phases")
    sub = parser.add_subparsers(dest="topic", required=True)

    def add(topic, action, fn, configure):
        p = topic.add_parser(action)
        p.add_argument("--out", default=None, help="write the JSON result here")
        configure(p)
        p.set_defaults(_run=fn)
        return p

    g = sub.add_parser("group").add_subparsers(dest="action", required=True)
    add(g, "show", cmd_group_show,
        lambda p: p.add_argument("--group", required=True))

    c = sub.add_parser("cohomology").add_subparsers(dest="action", required=True)
    add(c, "h2", cmd_cohomology_h2,
        lambda p: p.add_argument("--group", required=True))

    co = sub.add_parser("cocycle").add_subparsers(dest="action", required=True)

    def conf_check(p):
        p.add_argument("--group", required=True)
        p.add_argument("--cocycle", required=True)
        p.add_argument("--tol", type=float, default=1e-9)

    add(co, "check", cmd_cocycle_check, conf_check)

    def conf_classify(p):
        p.add_argument("--group", required=True)
        p.add_argument("--cocycle", required=True)
        p.add_argument("--snap-den", type=int, default=None)

    add(co, "classify", cmd_cocycle_classify, conf_classify)

    r = sub.add_parser("rep").add_subparsers(dest="action", required=True)

    def conf_extract(p):
        p.add_argument("--group", required=True)
        p.add_argument("--rep", required=True)
        p.add_argument("--tol", type=float, default=TOLERANCES["multiplier_residual"])

    add(r, "extract", cmd_rep_extract, conf_extract)

    s = sub.add_parser("state").add_subparsers(dest="action", required=True)

    def conf_build(p):
        p.add_argument("--kind", required=True,
                       choices=["aklt", "cluster", "product", "spin1-product",
                                "fixed-point"])
        p.add_argument("--group", default=None)
        p.add_argument("--charge", default=None)
        p.add_argument("--cocycle", default=None)

    add(s, "build", cmd_state_build, conf_build)

    i = sub.add_parser("index").add_subparsers(dest="action", required=True)

    def conf_compute(p):
        p.add_argument("--state", required=True)
        p.add_argument("--detector", choices=["so3", "u1"], default=None)

    add(i, "compute", cmd_index_compute, conf_compute)

    ci = sub.add_parser("circuit").add_subparsers(dest="action", required=True)

    def conf_transfer(p):
        p.add_argument("--charges", required=True)
        p.add_argument("--length", type=int, required=True)

    add(ci, "charge-transfer", cmd_circuit_charge_transfer, conf_transfer)

    lo = sub.add_parser("locality").add_subparsers(dest="action", required=True)

    def conf_ff(p):
        p.add_argument("--decay", required=True, help="exp:RATE or stretched:RATE:POWER")
        p.add_argument("--rmax", type=int, default=1000)

    add(lo, "ffunction", cmd_locality_ffunction, conf_ff)

    v = sub.add_parser("verify").add_subparsers(dest="action", required=True)

    def conf_suite(p):
        p.add_argument("--seed", type=int, default=0)

    add(v, "suite", cmd_verify_suite, conf_suite)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    args._command_words = argv
    try:
        return args._run(args)
    except SptError as err:
        sys.stderr.write(f"error: {err}\n")
        return err.exit_code
    except FileNotFoundError as err:
        sys.stderr.write(f"error: {err}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
