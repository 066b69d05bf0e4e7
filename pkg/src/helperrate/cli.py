"""Command-line front end.

Subcommands dispatch to the library and write CSV files whose bodies are
byte-reproducible for a fixed configuration (the commented header carries the
only timestamp).  Boundary points are accompanied by witness JSON files that
``validate --witness`` can re-check independently.

Exit codes: 0 success, 2 input error (bad flags or malformed files, with a
one-line diagnostic naming the offending field), 3 numerical failure (the
diagnostic carries the module error name).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import TOL, apply_overrides
from .errors import HelperRateError, InvalidSourceSpec
from . import codec, oracles, regions, sources
from .oracles import GridSpec
from .regions import (
    BoundaryCurve,
    ChannelWitness,
    IsometryWitness,
    PovmWitness,
    RatePoint,
    TestChannel,
)
from .sources import BipartiteSource, ClassicalJoint, CQSource


class _InputError(Exception):
    """Wraps anything that should exit with code 2."""


def _fmt(x) -> str:
    return repr(float(x))


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("HELPERRATE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _InputError(f"HELPERRATE_SEED: not an integer ({env!r})") from exc
    return 0


def _load_source(path, expect, label: str):
    try:
        src = sources.load_source(path)
    except HelperRateError as exc:
        raise _InputError(f"src: {exc}") from exc
    if not isinstance(src, expect):
        names = {ClassicalJoint: "classical", CQSource: "cq", BipartiteSource: "bipartite"}
        raise _InputError(f"src: expected a {names[expect]} source for {label}")
    return src


def _load_channel(path) -> TestChannel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"channel: cannot read {path} ({exc})") from exc
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise _InputError("channel: expected an object with a 'matrix' field")
    kind = doc.get("kind", "test_channel")
    if kind != "test_channel":
        raise _InputError(f"channel: kind must be 'test_channel', got {kind!r}")
    try:
        return TestChannel(np.asarray(doc["matrix"], dtype=float))
    except (TypeError, ValueError, HelperRateError) as exc:
        raise _InputError(f"channel: matrix: {exc}") from exc


def _witness_doc(point: RatePoint, source) -> dict:
    doc = {"r1": float(point.r1), "r2": float(point.r2),
           "mu": None if point.mu is None else float(point.mu),
           "seed": int(point.seed), "restart": int(point.restart),
           "source": sources.source_to_doc(source)}
    w = point.witness
    if isinstance(w, PovmWitness):
        doc["kind"] = "povm"
        doc["elements"] = [sources.matrix_to_json(e) for e in w.elements]
    elif isinstance(w, ChannelWitness):
        doc["kind"] = "test_channel"
        doc["matrix"] = [[float(v) for v in row] for row in w.channel.p_u_given_y]
    elif isinstance(w, IsometryWitness):
        doc["kind"] = "isometry"
        doc["matrix"] = sources.matrix_to_json(w.v)
        doc["dims"] = [int(d) for d in w.dims]
    else:
        raise TypeError(f"unknown witness {type(w)!r}")
    return doc


def _parse_witness_doc(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidSourceSpec("kind: missing from witness document")
    source = sources.parse_source(doc.get("source", {}))
    kind = doc["kind"]
    if kind == "povm":
        elements = [sources.matrix_from_json(m, f"elements[{i}]")
                    for i, m in enumerate(doc.get("elements", []))]
        witness = PovmWitness(tuple(elements))
    elif kind == "test_channel":
        witness = ChannelWitness(TestChannel(np.asarray(doc["matrix"], dtype=float)))
    elif kind == "isometry":
        v = sources.matrix_from_json(doc["matrix"], "matrix", square=False)
        witness = IsometryWitness(v, tuple(int(d) for d in doc["dims"]))
    else:
        raise InvalidSourceSpec(f"kind: unknown witness kind {kind!r}")
    if "r1" not in doc or "r2" not in doc:
        raise InvalidSourceSpec("r1: witness document must carry the rate pair")
    return witness, source, float(doc["r1"]), float(doc["r2"])


def _header_lines(sub: str, config: dict) -> list[str]:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    items = " ".join(f"{k}={v}" for k, v in config.items())
    return [f"# helperrate {__version__} {sub}",
            f"# generated: {stamp}",
            f"# config: {items}"]


def _write_curve_csv(out_path: str, sub: str, curve: BoundaryCurve, source, config: dict) -> int:
    out_dir = os.path.dirname(os.path.abspath(out_path))
    stem = os.path.splitext(os.path.basename(out_path))[0]
    wit_rel = f"{stem}_witnesses"
    wit_dir = os.path.join(out_dir, wit_rel)
    os.makedirs(wit_dir, exist_ok=True)
    lines = _header_lines(sub, config)
    lines.append("mu,r1_bits,r2_bits,seed,restart,witness_file")
    for i, p in enumerate(curve.points):
        wit_file = f"{wit_rel}/point_{i:04d}.json"
        with open(os.path.join(out_dir, wit_rel, f"point_{i:04d}.json"), "w", encoding="utf-8") as fh:
            json.dump(_witness_doc(p, source), fh, indent=1)
            fh.write("\n")
        mu = "" if p.mu is None else _fmt(p.mu)
        lines.append(f"{mu},{_fmt(p.r1)},{_fmt(p.r2)},{p.seed},{p.restart},{wit_file}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(curve.points)


def _write_rows_csv(out_path: str, sub: str, header: str, rows: list[str], config: dict) -> None:
    lines = _header_lines(sub, config) + [header] + rows
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _summary(sub: str, points: int, seed) -> None:
    print(f"{sub} points={points} seed={seed}")


# ---------------------------------------------------------------------------
# subcommand handlers

def _parse_mu_grid(text):
    if text is None:
        return None
    try:
        grid = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise _InputError(f"mu-grid: not a comma-separated float list ({exc})") from exc
    if not grid or any(m < 0 for m in grid):
        raise _InputError("mu-grid: must be nonempty with nonnegative entries")
    return grid


def _check_positive(name: str, value: int) -> int:
    if value < 1:
        raise _InputError(f"{name}: must be >= 1, got {value}")
    return int(value)


def _cmd_region(args) -> int:
    seed = _resolve_seed(args.seed)
    restarts = _check_positive("restarts", args.restarts)
    evals = _check_positive("evals", args.evals)
    threads = _check_positive("threads", args.threads)
    mu_grid = _parse_mu_grid(args.mu_grid)
    config = {"src": args.src, "seed": seed, "restarts": restarts, "evals": evals,
              "threads": threads,
              "mu_grid": "default35" if mu_grid is None else ",".join(map(_fmt, mu_grid))}

    if args.subcommand == "region-chelper":
        src = _load_source(args.src, ClassicalJoint, args.subcommand)
        curve = regions.trace_boundary_chelper(src, mu_grid, restarts, seed, evals, threads)
    elif args.subcommand == "region-qhelper":
        src = _load_source(args.src, CQSource, args.subcommand)
        curve = regions.trace_boundary_qhelper(src, mu_grid, restarts, seed, evals, threads)
    else:
        src = _load_source(args.src, BipartiteSource, args.subcommand)
        d_c_list = None
        if args.dc_list is not None:
            try:
                d_c_list = [int(v) for v in args.dc_list.split(",") if v.strip() != ""]
            except ValueError as exc:
                raise _InputError(f"dc-list: not a comma-separated int list ({exc})") from exc
            if not d_c_list or any(d < 1 for d in d_c_list):
                raise _InputError("dc-list: entries must be >= 1")
        config["dc_list"] = "default" if d_c_list is None else ",".join(map(str, d_c_list))
        curve = regions.trace_boundary_fq(src, d_c_list, mu_grid, restarts, seed, evals, threads)
        config["inner_bound"] = "true"

    n = _write_curve_csv(args.out, args.subcommand, curve, src, config)
    _summary(args.subcommand, n, seed)
    return 0


def _cmd_accinfo(args) -> int:
    seed = _resolve_seed(args.seed)
    restarts = _check_positive("restarts", args.restarts)
    evals = _check_positive("evals", args.evals)
    src = _load_source(args.src, CQSource, "accinfo")
    i_acc, povm = regions.accessible_information(src, restarts, seed, evals)
    print(f"I_acc = {i_acc:.6f}")
    if args.out:
        point = regions.rate_point_qhelper(src, povm, mu=None, seed=seed)
        config = {"src": args.src, "seed": seed, "restarts": restarts, "evals": evals}
        doc = _witness_doc(point, src)
        doc["i_acc"] = float(i_acc)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    _summary("accinfo", 1, seed)
    return 0


def _cmd_sepgap(args) -> int:
    seed = _resolve_seed(args.seed)
    restarts = _check_positive("restarts", args.restarts)
    evals = _check_positive("evals", args.evals)
    src = _load_source(args.src, CQSource, "sepgap")
    h_u, i_ub, gap = regions.separation_gap(src, restarts, seed, evals)
    print(f"H_U = {h_u:.6f}")
    print(f"I_UB = {i_ub:.6f}")
    print(f"gap = {gap:.6f}")
    _summary("sepgap", 1, seed)
    return 0


def _cmd_oracle(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.subcommand == "oracle-qhelper":
        src = _load_source(args.src, CQSource, args.subcommand)
        try:
            grid = GridSpec(angle_step=args.angle_step, trine_step=args.trine_step)
        except HelperRateError as exc:
            raise _InputError(f"grid: {exc}") from exc
        curve = oracles.grid_search_qubit_povm(src, grid)
        config = {"src": args.src, "angle_step": args.angle_step, "trine_step": args.trine_step}
    else:
        src = _load_source(args.src, ClassicalJoint, args.subcommand)
        try:
            grid = GridSpec(prob_step=args.prob_step)
        except HelperRateError as exc:
            raise _InputError(f"grid: {exc}") from exc
        curve = oracles.grid_search_chelper(src, grid, args.num_u)
        config = {"src": args.src, "prob_step": args.prob_step,
                  "num_u": "default" if args.num_u is None else args.num_u}
    n = _write_curve_csv(args.out, args.subcommand, curve, src, config)
    _summary(args.subcommand, n, seed)
    return 0


def _cmd_simulate_synthesis(args) -> int:
    seed = _resolve_seed(args.seed)
    n = _check_positive("n", args.n)
    if args.rate < 0:
        raise _InputError(f"rate: must be >= 0, got {args.rate}")
    if args.mode not in ("exact", "montecarlo"):
        raise _InputError(f"mode: must be exact or montecarlo, got {args.mode!r}")
    src = _load_source(args.src, ClassicalJoint, "simulate-synthesis")
    channel = _load_channel(args.channel)
    tv = codec.synthesize_channel(src.p_y, channel, n, args.rate, seed, args.mode, args.trials)
    config = {"src": args.src, "channel": args.channel, "n": n, "rate": args.rate,
              "mode": args.mode, "trials": args.trials, "seed": seed}
    row = f"{n},{_fmt(args.rate)},{args.mode},{_fmt(tv)}"
    _write_rows_csv(args.out, "simulate-synthesis", "n,rate,mode,tv", [row], config)
    _summary("simulate-synthesis", 1, seed)
    return 0


def _cmd_simulate_sw(args) -> int:
    seed = _resolve_seed(args.seed)
    n = _check_positive("n", args.n)
    trials = _check_positive("trials", args.trials)
    if args.r1 < 0:
        raise _InputError(f"r1: must be >= 0, got {args.r1}")
    src = _load_source(args.src, ClassicalJoint, "simulate-sw")
    err = codec.sw_random_binning(src, n, args.r1, trials, seed, args.injective)
    config = {"src": args.src, "n": n, "r1": args.r1, "trials": trials,
              "seed": seed, "injective": args.injective}
    row = f"{n},{_fmt(args.r1)},,{trials},{seed},{_fmt(err)}"
    _write_rows_csv(args.out, "simulate-sw", "n,r1,r2,trials,seed,error_rate", [row], config)
    _summary("simulate-sw", 1, seed)
    return 0


def _cmd_simulate_pipeline(args) -> int:
    seed = _resolve_seed(args.seed)
    n = _check_positive("n", args.n)
    trials = _check_positive("trials", args.trials)
    if args.r1 < 0 or args.r2_rate < 0:
        raise _InputError("r1: rates must be >= 0")
    src = _load_source(args.src, ClassicalJoint, "simulate-pipeline")
    channel = _load_channel(args.channel)
    err = codec.helper_pipeline(src, channel, n, args.r1, args.r2_rate, trials, seed)
    config = {"src": args.src, "channel": args.channel, "n": n, "r1": args.r1,
              "r2_rate": args.r2_rate, "trials": trials, "seed": seed}
    row = f"{n},{_fmt(args.r1)},{_fmt(args.r2_rate)},{trials},{seed},{_fmt(err)}"
    _write_rows_csv(args.out, "simulate-pipeline", "n,r1,r2,trials,seed,error_rate", [row], config)
    _summary("simulate-pipeline", 1, seed)
    return 0


def _cmd_validate(args) -> int:
    seed = _resolve_seed(args.seed)
    if (args.src is None) == (args.witness is None):
        raise _InputError("src: exactly one of --src / --witness is required")
    if args.src is not None:
        try:
            src = sources.load_source(args.src)
        except HelperRateError as exc:
            raise _InputError(f"src: {exc}") from exc
        kind = {ClassicalJoint: "classical", CQSource: "cq", BipartiteSource: "bipartite"}[type(src)]
        print(f"source ok: type={kind}")
        _summary("validate", 1, seed)
        return 0
    try:
        with open(args.witness, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        witness, source, r1, r2 = _parse_witness_doc(doc)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"witness: cannot read {args.witness} ({exc})") from exc
    except HelperRateError as exc:
        raise _InputError(f"witness: {exc}") from exc
    got_r1, got_r2 = regions.recompute_rate_pair(witness, source)
    err = max(abs(got_r1 - r1), abs(got_r2 - r2))
    if err > TOL.witness_match:
        raise HelperRateError(
            f"witness rate pair ({r1!r}, {r2!r}) recomputes to ({got_r1!r}, {got_r2!r})")
    print(f"witness ok: r1={got_r1!r} r2={got_r2!r}")
    _summary("validate", 1, seed)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sub, out_required: bool = True):
    sub.add_argument("--src", required=True, help="source-spec JSON file")
    if out_required:
        sub.add_argument("--out", required=True, help="output CSV path")
    sub.add_argument("--seed", type=int, default=None,
                     help="run seed (default: env HELPERRATE_SEED, else 0)")
    sub.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                     help="override a named tolerance")


def _add_opt(sub):
    sub.add_argument("--restarts", type=int, default=regions.DEFAULT_RESTARTS)
    sub.add_argument("--evals", type=int, default=regions.DEFAULT_EVALS,
                     help="objective evaluations per start")
    sub.add_argument("--threads", type=int, default=max(os.cpu_count() or 1, 1))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helperrate", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    for name in ("region-chelper", "region-qhelper", "region-fq"):
        sp = subs.add_parser(name, help=f"trace the {name.split('-')[1]} boundary")
        _add_common(sp)
        _add_opt(sp)
        sp.add_argument("--mu-grid", default=None, help="comma-separated scalarization weights")
        if name == "region-fq":
            sp.add_argument("--dc-list", default=None, help="comma-separated output dimensions")
        sp.set_defaults(handler=_cmd_region)

    sp = subs.add_parser("accinfo", help="maximum extractable mutual information")
    _add_common(sp, out_required=False)
    sp.add_argument("--out", default=None, help="optional witness JSON for the best POVM")
    _add_opt(sp)
    sp.set_defaults(handler=_cmd_accinfo)

    sp = subs.add_parser("sepgap", help="measure-then-compress overhead at the best POVM")
    _add_common(sp, out_required=False)
    _add_opt(sp)
    sp.set_defaults(handler=_cmd_sepgap)

    sp = subs.add_parser("oracle-qhelper", help="qubit measurement grid sweep")
    _add_common(sp)
    sp.add_argument("--angle-step", type=float, default=0.01)
    sp.add_argument("--trine-step", type=float, default=0.05)
    sp.set_defaults(handler=_cmd_oracle)

    sp = subs.add_parser("oracle-chelper", help="classical test-channel grid sweep")
    _add_common(sp)
    sp.add_argument("--prob-step", type=float, default=0.05)
    sp.add_argument("--num-u", type=int, default=None)
    sp.set_defaults(handler=_cmd_oracle)

    sp = subs.add_parser("simulate-synthesis", help="channel synthesis total variation")
    _add_common(sp)
    sp.add_argument("--channel", required=True, help="test-channel JSON file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--mode", default="exact", choices=("exact", "montecarlo"))
    sp.add_argument("--trials", type=int, default=0)
    sp.set_defaults(handler=_cmd_simulate_synthesis)

    sp = subs.add_parser("simulate-sw", help="random-binning error rate")
    _add_common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r1", type=float, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--injective", action="store_true")
    sp.set_defaults(handler=_cmd_simulate_sw)

    sp = subs.add_parser("simulate-pipeline", help="synthesis-assisted binning error rate")
    _add_common(sp)
    sp.add_argument("--channel", required=True, help="test-channel JSON file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r1", type=float, required=True)
    sp.add_argument("--r2-rate", type=float, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.set_defaults(handler=_cmd_simulate_pipeline)

    sp = subs.add_parser("validate", help="type-check a source file or re-check a witness")
    sp.add_argument("--src", default=None)
    sp.add_argument("--witness", default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    sp.set_defaults(handler=_cmd_validate)

    return parser


def _apply_tolerance_flags(pairs: list[str]) -> None:
    overrides = {}
    for item in pairs:
        if "=" not in item:
            raise _InputError(f"tol: expected NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        try:
            overrides[name.strip()] = float(value)
        except ValueError as exc:
            raise _InputError(f"tol: {name}: not a number ({value!r})") from exc
    try:
        apply_overrides(overrides)
    except KeyError as exc:
        raise _InputError(f"tol: {exc.args[0]}") from exc


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_tolerance_flags(getattr(args, "tol", []))
        return args.handler(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HelperRateError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
