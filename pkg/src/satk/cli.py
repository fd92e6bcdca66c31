"""Command-line interface: satk <command> --input FILE | --seed N [--config JSON] [--out PATH] [--csv].

Every command produces a RunRecord; the process exits 0 iff all checks in the
record pass.  Module errors are captured into the record, never raised out of
the dispatcher.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import linalg, shifts
from .decomp import dunford
from .errors import UsageError
from .instances import InstanceSpec, generate_instance
from .mmio import parse_matrix
from .powerit import (
    convergence_study,
    normalized_power,
    vector_exponent_estimate,
    vector_exponent_estimates,
    yamamoto_limits,
)
from .records import RunConfig, RunRecord, write_error_csv
from .resolution import (
    check_resolution,
    limit_operator,
    modulus_resolution,
    vector_exponent_exact,
)
from .semigroup import (
    exp_growth_estimate,
    exp_growth_exponent_exact,
    halfplane_resolution,
    semigroup_limit,
)

COMMANDS = (
    "decompose",
    "limit",
    "iterate",
    "yamamoto",
    "vector-exponent",
    "shift",
    "semigroup",
    "sweep",
)

_DEFAULT_SCHEDULE = (16, 32, 64, 128, 256, 512, 1024, 2048, 4096)


def _load_config(text):
    if text is None:
        return {}
    if Path(text).exists():
        text = Path(text).read_text()
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise UsageError("config must be a JSON object")
    return obj


def _acquire(config: RunConfig):
    """Matrix plus, when seeded, its certified ground-truth decomposition."""
    if config.input_path is not None:
        return parse_matrix(config.input_path), None
    if config.seed is None:
        raise UsageError("either --input or --seed is required")
    spec = InstanceSpec(**config.params.get("instance", {}))
    inst = generate_instance(config.seed, spec)
    return inst.matrix, inst


def _decomposition(a, inst):
    return inst.decomposition if inst is not None else dunford(a)


def _sorted_moduli(a, inst):
    if inst is not None:
        return np.sort(np.abs(np.array(inst.eigenvalues)))[::-1]
    return np.sort(np.abs(np.linalg.eigvals(a)))[::-1]


def _cmd_decompose(record, config):
    a, inst = _acquire(config)
    dec = _decomposition(a, inst)
    m = a.shape[0]
    scale = max(1.0, linalg.norm2(a))
    tol = float(config.params.get("tol", 1e-8)) * scale
    record.add_check("reconstruction", linalg.norm2(dec.scalar_part + dec.nilpotent_part - a), tol)
    record.add_check(
        "idempotency",
        max(linalg.norm2(p.matrix @ p.matrix - p.matrix) for p in dec.idempotents),
        tol,
    )
    record.add_check(
        "commutation",
        linalg.norm2(dec.scalar_part @ dec.nilpotent_part - dec.nilpotent_part @ dec.scalar_part),
        tol,
    )
    record.add_check("nilpotency", linalg.norm2(np.linalg.matrix_power(dec.nilpotent_part, m)), tol)
    record.results["eigenvalues"] = [p.cluster.representative for p in dec.idempotents]
    record.results["multiplicities"] = [p.cluster.multiplicity for p in dec.idempotents]
    record.results["condition_bound"] = dec.condition_bound


def _cmd_limit(record, config):
    a, inst = _acquire(config)
    res = modulus_resolution(_decomposition(a, inst))
    diag = check_resolution(res)
    tol = float(config.params.get("tol", 1e-8))
    record.add_check("idempotency", diag.max_idempotency_residual, tol)
    record.add_check("monotonicity", diag.max_monotonicity_violation, tol)
    record.add_check("top_identity", diag.top_identity_gap, tol)
    k = limit_operator(res)
    record.results["limit_matrix"] = k.matrix
    record.results["moduli"] = list(k.spectrum_moduli)


def _cmd_iterate(record, config):
    a, inst = _acquire(config)
    schedule = [int(n) for n in config.params.get("schedule", _DEFAULT_SCHEDULE)]
    target = float(config.params.get("tol", 1e-3))
    k = limit_operator(modulus_resolution(_decomposition(a, inst)))
    report = convergence_study(a, schedule, k.matrix, target=target)
    record.add_check("final_error", report.errors[-1], target)
    record.results["schedule"] = list(report.schedule)
    record.results["errors"] = list(report.errors)
    record.results["estimated_rate"] = report.estimated_rate
    record.results["csv_rows"] = [[n, e] for n, e in zip(report.schedule, report.errors)]


def _cmd_yamamoto(record, config):
    a, inst = _acquire(config)
    n = int(config.params.get("n", 4096))
    tol = float(config.params.get("tol", 1e-3))
    vals = yamamoto_limits(a, n)
    expected = _sorted_moduli(a, inst)
    record.add_check("max_deviation", float(np.max(np.abs(vals - expected))), tol)
    record.results["limits"] = vals
    record.results["expected"] = expected


def _cmd_vector_exponent(record, config):
    a, inst = _acquire(config)
    n = int(config.params.get("n", 4096))
    tol = float(config.params.get("tol", 1e-3))
    dec = _decomposition(a, inst)
    m = a.shape[0]
    if "vectors" in config.params:
        xs = np.array(
            [[complex(re, im) for re, im in vec] for vec in config.params["vectors"]],
            dtype=np.complex128,
        ).T
    else:
        xs = np.eye(m, dtype=np.complex128)
    exact = np.array([vector_exponent_exact(dec, xs[:, j]) for j in range(xs.shape[1])])
    est = vector_exponent_estimates(a, xs, n)
    record.add_check("max_deviation", float(np.max(np.abs(est - exact))), tol)
    record.results["exact"] = exact
    record.results["estimates"] = est


def _weight_sequence(params):
    kind = params.get("kind", "harmonic")
    if kind == "explicit":
        return shifts.explicit(params["values"])
    if kind == "harmonic":
        return shifts.harmonic()
    if kind == "geometric":
        return shifts.geometric(float(params.get("ratio", 0.5)))
    if kind == "constant":
        return shifts.constant(float(params.get("level", 1.0)))
    if kind == "blocks":
        return shifts.blocks(float(params.get("level", 2.0)))
    raise UsageError(f"unknown weight kind {kind!r}")


def _cmd_shift(record, config):
    p = config.params
    w = _weight_sequence(p)
    start_max = int(p.get("start_max", 64))
    length_max = int(p.get("length_max", 256))
    table = shifts.geometric_mean_table(w, start_max, length_max)
    det = shifts.uniform_limit_detector(table, tol=float(p.get("detector_tol", 1e-2)))
    record.results["converged"] = det.converged
    record.results["alpha"] = det.alpha
    record.results["witness"] = det.witness
    record.results["backward_converges"] = shifts.backward_classifier(w)
    m = int(p.get("m", 256))
    n = int(p.get("n", 32))
    cross = shifts.shift_power_crosscheck(w, m, n)
    record.add_check("crosscheck_deviation", cross.max_deviation, float(p.get("tol", 1e-10)))
    record.results["crosscheck"] = {
        "m": cross.truncation_dim,
        "n": cross.power,
        "interior_cells": cross.interior_cells,
    }


def _cmd_semigroup(record, config):
    a, inst = _acquire(config)
    t = float(config.params.get("t", 200.0))
    tol = float(config.params.get("tol", 1e-2))
    dec = _decomposition(a, inst)
    res = halfplane_resolution(dec)
    k = semigroup_limit(res)
    expected = []
    prev_rank = 0
    for value, g in zip(k.spectrum_moduli, res.projections):
        rank = int(round(np.trace(g).real))
        expected.extend([value] * (rank - prev_rank))
        prev_rank = rank
    eigs = np.sort(np.linalg.eigvalsh(k.matrix))
    record.add_check(
        "limit_spectrum", float(np.max(np.abs(eigs - np.sort(expected)))), 1e-6
    )
    m = a.shape[0]
    exact = np.array([exp_growth_exponent_exact(dec, np.eye(m)[:, j]) for j in range(m)])
    est = np.array([exp_growth_estimate(a, np.eye(m)[:, j], t) for j in range(m)])
    record.add_check("growth_deviation", float(np.max(np.abs(est - exact))), tol)
    record.results["limit_matrix"] = k.matrix
    record.results["real_parts"] = list(res.real_parts)
    record.results["exact_exponents"] = exact
    record.results["estimates"] = est


def _sweep_one(seed, spec, n):
    inst = generate_instance(seed, spec)
    k = limit_operator(modulus_resolution(inst.decomposition))
    err_k = float(linalg.norm2(normalized_power(inst.matrix, n) - k.matrix))
    expected = np.sort(np.abs(np.array(inst.eigenvalues)))[::-1]
    err_y = float(np.max(np.abs(yamamoto_limits(inst.matrix, n) - expected)))
    return {"seed": int(seed), "power_error": err_k, "yamamoto_error": err_y}


def _cmd_sweep(record, config):
    if config.seed is None:
        raise UsageError("sweep requires --seed")
    p = config.params
    count = int(p.get("count", 50))
    n = int(p.get("n", 4096))
    tol = float(p.get("tol", 1e-3))
    workers = int(p.get("workers", 1))
    spec = InstanceSpec(**p.get("instance", {}))
    seeds = [config.seed + i for i in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _sweep_one(s, spec, n), seeds))
    else:
        rows = [_sweep_one(s, spec, n) for s in seeds]
    # rows come back in instance-index order either way
    max_k = max(r["power_error"] for r in rows)
    max_y = max(r["yamamoto_error"] for r in rows)
    record.add_check("max_power_error", max_k, tol)
    record.add_check("max_yamamoto_error", max_y, tol)
    record.results["count"] = count
    record.results["n"] = n
    record.results["pass_rate"] = sum(
        r["power_error"] <= tol and r["yamamoto_error"] <= tol for r in rows
    ) / count
    record.results["instances"] = rows


_DISPATCH = {
    "decompose": _cmd_decompose,
    "limit": _cmd_limit,
    "iterate": _cmd_iterate,
    "yamamoto": _cmd_yamamoto,
    "vector-exponent": _cmd_vector_exponent,
    "shift": _cmd_shift,
    "semigroup": _cmd_semigroup,
    "sweep": _cmd_sweep,
}


def run_command(config: RunConfig) -> RunRecord:
    if config.command not in _DISPATCH:
        raise UsageError(f"unknown command {config.command!r}")
    record = RunRecord(config=config)
    t0 = time.perf_counter()
    try:
        _DISPATCH[config.command](record, config)
    except Exception as exc:  # captured, never propagated: the record is the report
        record.add_error(config.command, exc)
    record.wall_time = time.perf_counter() - t0
    return record


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="satk", description="Spectral asymptotics toolkit for finite matrices."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="matrix file (Matrix Market or JSON schema)")
    parser.add_argument("--seed", type=int, help="seed for a generated instance")
    parser.add_argument("--config", help="JSON object (inline or a file path) with parameters")
    parser.add_argument("--out", help="write the RunRecord JSON here (default: stdout)")
    parser.add_argument(
        "--csv", action="store_true", help="also write per-n errors next to --out"
    )
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits on bad usage; keep main() callable
        return int(exc.code or 0)
    try:
        params = _load_config(args.config)
        if args.seed is not None and args.seed < 0:
            raise UsageError("seed must be a non-negative 64-bit integer")
        config = RunConfig(
            command=args.command,
            seed=args.seed,
            input_path=args.input,
            output_path=args.out,
            csv=args.csv,
            params=params,
        )
    except (UsageError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    record = run_command(config)
    text = record.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        rows = record.results.get("csv_rows")
        if rows:
            base = Path(args.out) if args.out else Path("satk_errors.json")
            write_error_csv(base.with_suffix(".csv"), rows)
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
