"""Command-line surface: ingest states/observables/maps from JSON, run the
toolkit's computations, emit tables, JSON or CSV.

Exit codes: 0 success, 2 parse error, 3 domain/range error, 4 construction
failure. Floats are printed with 12 significant digits; identical command
lines with identical seeds produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bipartite import (
    BipartiteSpace,
    BipartiteState,
    make_werner,
    random_full_rank_density,
    singlet_vector,
)
from .correlation import (
    DECISION_THRESHOLD,
    ENTANGLED,
    INCONCLUSIVE,
    SEPARABLE,
    OptimizerConfig,
    minimize_d0,
    minimize_d_simple,
    separability_verdict,
    d0_objective,
)
from .errors import (
    BadPartition,
    ConfigInvalid,
    ConvergenceFailure,
    DimensionMismatch,
    InvalidDensityMatrix,
    InvalidMatrix,
    MapNotUnital,
    NotHermitian,
    NotPSD,
    OutOfRange,
    ParseError,
    RankTooSmall,
    WellDefinednessFailure,
)
from .gns import build_intertwiner_single, build_intertwiner_doubled, verification_report
from .linalg import dagger
from .measures import boxtimes, evaluate_boxtimes
from .posmaps import (
    PositiveMapSpec,
    builtin_maps,
    depolarizing_map,
    identity_map,
    kadison_defect,
    ppt_min_eigenvalue,
    reduction_map,
    transpose_map,
)
from . import serialize

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_CONSTRUCTION = 4

_DOMAIN_ERRORS = (OutOfRange, DimensionMismatch, ConfigInvalid, RankTooSmall,
                  InvalidDensityMatrix, NotHermitian, NotPSD, BadPartition, InvalidMatrix)
_CONSTRUCTION_ERRORS = (WellDefinednessFailure, MapNotUnital, ConvergenceFailure)


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QCORR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ParseError(f"QCORR_SEED must be an integer, got {env!r}") from exc
    return 0


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        m=args.m,
        starts=args.starts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=_default_seed(args),
        use_partitions=not args.no_partitions,
    )


def _add_optimizer_args(p: argparse.ArgumentParser, starts: int = 32, max_iters: int = 2000):
    p.add_argument("--m", type=int, default=None, help="ensemble cardinality (default (d1*d2)^2)")
    p.add_argument("--starts", type=int, default=starts)
    p.add_argument("--max-iters", type=int, default=max_iters)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None, help="PRNG seed (falls back to QCORR_SEED)")
    p.add_argument("--no-partitions", action="store_true")


def _print_table(rows: list[tuple[str, str]]) -> None:
    for key, val in rows:
        print(f"{key}: {val}")


def _load_state(path: str) -> BipartiteState:
    return serialize.state_from_json(serialize.load_json(path), path)


def _load_matrix(path: str) -> np.ndarray:
    return serialize.matrix_from_json(serialize.load_json(path), path)


def _resolve_map(spec: str, d: int) -> PositiveMapSpec:
    if spec == "identity":
        return identity_map(d)
    if spec == "transpose":
        return transpose_map(d)
    if spec == "reduction":
        return reduction_map(d)
    if spec.startswith("depolarizing"):
        lam = 0.0
        if ":" in spec:
            try:
                lam = float(spec.split(":", 1)[1])
            except ValueError as exc:
                raise ParseError(f"bad depolarizing parameter in {spec!r}") from exc
        if not (0.0 <= lam <= 1.0):
            raise OutOfRange(f"depolarizing parameter must lie in [0, 1], got {lam}")
        return depolarizing_map(d, lam)
    if os.path.exists(spec) or spec.endswith(".json"):
        return serialize.map_from_json(serialize.load_json(spec), spec)
    raise ParseError(
        f"unknown map {spec!r}: expected a JSON path or one of "
        "identity|transpose|reduction|depolarizing[:lam]")


def _resolve_density(spec: str) -> np.ndarray:
    if spec.startswith("random:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ParseError(f"random state spec must be 'random:D:SEED', got {spec!r}")
        try:
            d, seed = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ParseError(f"random state spec must be 'random:D:SEED', got {spec!r}") from exc
        return random_full_rank_density(d, seed)
    return _load_matrix(spec)


def _canonical_witness_2x2() -> np.ndarray:
    v = singlet_vector()
    return 0.5 * np.eye(4, dtype=np.complex128) - np.outer(v, v.conj())


def _emit_result(res, args) -> None:
    if args.dump_ensemble:
        serialize.dump_json(args.dump_ensemble, serialize.ensemble_to_json(res.ensemble))
    if args.format == "json":
        print(json.dumps({"value": res.value, "converged": res.converged,
                          "starts_used": res.starts_used,
                          "ensemble": serialize.ensemble_to_json(res.ensemble)},
                         sort_keys=True))
    else:
        _print_table([("value", _fmt(res.value)),
                      ("converged", str(res.converged).lower()),
                      ("starts_used", str(res.starts_used))])


def cmd_d0(args) -> int:
    state = _load_state(args.state)
    observable = _load_matrix(args.observable)
    res = minimize_d0(state, observable, _optimizer_config(args))
    _emit_result(res, args)
    return EXIT_OK


def cmd_d(args) -> int:
    state = _load_state(args.state)
    a = _load_matrix(args.a)
    b = _load_matrix(args.b)
    res = minimize_d_simple(state, a, b, _optimizer_config(args))
    _emit_result(res, args)
    return EXIT_OK


def cmd_verdict(args) -> int:
    state = _load_state(args.state)
    cfg = _optimizer_config(args)
    res = separability_verdict(state, cfg, n_observables=args.n_observables)
    if args.dump_witness:
        serialize.dump_json(args.dump_witness, serialize.matrix_to_json(res.witness))
    if args.format == "json":
        print(json.dumps({
            "verdict": res.verdict, "max_d0": res.max_d0,
            "witness": serialize.matrix_to_json(res.witness),
            "probes": [{"label": lbl, "value": val} for lbl, val in res.probes],
        }, sort_keys=True))
    else:
        _print_table([("verdict", res.verdict), ("max_d0", _fmt(res.max_d0))])
        for label, value in res.probes:
            print(f"probe {label}: {_fmt(value)}")
    return EXIT_OK


def cmd_ppt(args) -> int:
    state = _load_state(args.state)
    min_eig = ppt_min_eigenvalue(state)
    psd = min_eig >= -1e-10
    if args.format == "json":
        print(json.dumps({"ppt_min_eig": min_eig, "psd": psd}, sort_keys=True))
    else:
        _print_table([("ppt_min_eig", _fmt(min_eig)),
                      ("psd", "yes" if psd else "no")])
    return EXIT_OK


def cmd_boxtimes(args) -> int:
    ensemble = serialize.ensemble_from_json(serialize.load_json(args.ensemble), args.ensemble)
    observable = _load_matrix(args.observable)
    barycenter_term = complex(np.trace(ensemble.barycenter.rho @ observable))
    boxtimes_term = complex(evaluate_boxtimes(boxtimes(ensemble), observable))
    gap = d0_objective(ensemble, observable)
    if args.format == "json":
        print(json.dumps({"barycenter_term": barycenter_term.real,
                          "boxtimes_term": boxtimes_term.real,
                          "gap": gap}, sort_keys=True))
    else:
        _print_table([("barycenter_term", _fmt(barycenter_term.real)),
                      ("boxtimes_term", _fmt(boxtimes_term.real)),
                      ("gap", _fmt(gap))])
    return EXIT_OK


def cmd_gns_verify(args) -> int:
    rho = _resolve_density(args.state)
    alpha = _resolve_map(args.map, rho.shape[0])
    build = build_intertwiner_single if args.single else build_intertwiner_doubled
    ld = build(alpha, rho)
    report = verification_report(ld)
    omega_residual = float(np.linalg.norm(dagger(ld.v) @ ld.sqrt_rho_vec - ld.tilde_omega))
    ok = (report["residual_max"] <= 1e-9
          and report["v_norm"] <= report["bound"] + 1e-9
          and omega_residual <= 1e-10)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        _print_table([("map", alpha.name or args.map),
                      ("dim_gns", str(report["dim_gns"])),
                      ("residual_max", _fmt(report["residual_max"])),
                      ("v_norm", _fmt(report["v_norm"])),
                      ("bound", _fmt(report["bound"])),
                      ("omega_residual", _fmt(omega_residual)),
                      ("verdict", "PASS" if ok else "FAIL")])
    return EXIT_OK if ok else 1


def cmd_kadison(args) -> int:
    alpha = _resolve_map(args.map, args.d)
    rng = np.random.default_rng(_default_seed(args))
    worst = np.inf
    for _ in range(args.samples):
        a = rng.standard_normal((alpha.d, alpha.d)) + 1j * rng.standard_normal((alpha.d, alpha.d))
        worst = min(worst, kadison_defect(alpha, a))
    if args.format == "json":
        print(json.dumps({"min_defect": worst, "samples": args.samples}, sort_keys=True))
    else:
        _print_table([("map", alpha.name or args.map),
                      ("samples", str(args.samples)),
                      ("min_defect", _fmt(worst))])
    return EXIT_OK


def cmd_werner_sweep(args) -> int:
    if not (0.0 <= args.p_min <= args.p_max <= 1.0):
        raise OutOfRange(f"need 0 <= p_min <= p_max <= 1, got [{args.p_min}, {args.p_max}]")
    if args.steps < 2:
        raise OutOfRange(f"steps must be >= 2, got {args.steps}")
    witness = _canonical_witness_2x2()
    cfg = _optimizer_config(args)
    grid = np.linspace(args.p_min, args.p_max, args.steps)
    decision = DECISION_THRESHOLD
    warm: tuple = ()
    rows = []
    for p in grid:
        state = make_werner(float(p))
        res = minimize_d0(state, witness, cfg, extra_starts=warm)
        if decision < res.value <= 10.0 * decision:
            # ambiguous band: retry with a heavier budget before conceding
            heavy = OptimizerConfig(m=cfg.m, starts=4 * cfg.starts, max_iters=4 * cfg.max_iters,
                                    tol=cfg.tol, seed=cfg.seed, use_partitions=cfg.use_partitions)
            retry = minimize_d0(state, witness, heavy,
                                extra_starts=warm + ((res.argmin_params, res.argmin_partition),))
            if retry.value < res.value:
                res = retry
        warm = ((res.argmin_params, res.argmin_partition),)
        ppt = ppt_min_eigenvalue(state)
        if res.value > 10.0 * decision:
            verdict = ENTANGLED
        elif res.value <= decision and ppt >= -1e-10:
            verdict = SEPARABLE
        else:
            verdict = INCONCLUSIVE
        rows.append((float(p), res.value, ppt, verdict))

    if args.format == "json":
        print(json.dumps([{"p": p, "d0_witness": v, "ppt_min_eig": e, "verdict": verdict}
                          for p, v, e, verdict in rows], sort_keys=True))
    else:
        print("p,d0_witness,ppt_min_eig,verdict")
        for p, v, e, verdict in rows:
            print(f"{_fmt(p)},{_fmt(v)},{_fmt(e)},{verdict}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description="Decomposition-based correlation coefficients and positive-map tools "
                    "for small bipartite systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("d0", help="general correlation coefficient for one observable")
    p.add_argument("state")
    p.add_argument("observable")
    _add_optimizer_args(p)
    p.add_argument("--dump-ensemble", default=None)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_d0)

    p = sub.add_parser("d", help="simple-tensor correlation coefficient")
    p.add_argument("state")
    p.add_argument("a")
    p.add_argument("b")
    _add_optimizer_args(p)
    p.add_argument("--dump-ensemble", default=None)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_d)

    p = sub.add_parser("verdict", help="separability verdict over a probe set")
    p.add_argument("state")
    p.add_argument("--n-observables", type=int, default=8)
    _add_optimizer_args(p)
    p.add_argument("--dump-witness", default=None)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("ppt", help="partial-transpose spectrum check")
    p.add_argument("state")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_ppt)

    p = sub.add_parser("boxtimes", help="evaluate both sides of the decomposition gap")
    p.add_argument("ensemble")
    p.add_argument("observable")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_boxtimes)

    p = sub.add_parser("gns-verify", help="build and certify the intertwiner construction")
    p.add_argument("map", help="JSON path or identity|transpose|reduction|depolarizing[:lam]")
    p.add_argument("state", help="matrix JSON path or random:D:SEED")
    p.add_argument("--single", action="store_true",
                   help="single-representation variant (bound 1, self-adjoint span)")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_gns_verify)

    p = sub.add_parser("kadison", help="minimum Kadison-type defect over random elements")
    p.add_argument("map")
    p.add_argument("-d", type=int, default=2, help="dimension for builtin map names")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_kadison)

    p = sub.add_parser("werner-sweep", help="scan the Werner family boundary")
    p.add_argument("--p-min", type=float, default=0.0)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=51)
    _add_optimizer_args(p, starts=6, max_iters=600)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_werner_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _CONSTRUCTION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
