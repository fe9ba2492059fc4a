"""Command-line front end.

Subcommands map one-to-one onto the library surface:

* ``constants``   -- tilting constants (r*, eta*, gamma) as one CSV row
* ``tail-exact``  -- certified exact tail of the power-law Bernoulli sum
* ``tail-asymp``  -- either asymptotic form, in log space
* ``covariance``  -- exact conditional lag covariance
* ``path``        -- one sampled arrival path as CSV
* ``workload``    -- workload trace on a grid as CSV
* ``experiment``  -- run a registered experiment from a JSON config

All outputs are deterministic given the flags; the default seed is the fixed
constant 20120 (not wall clock), so bare runs reproduce byte-identically.
Exit codes: 0 success, 2 usage/config error, 1 runtime error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from typing import List, Optional

import numpy as np

from . import experiments, traffic
from .bernoulli_tail import (
    ParamSeq,
    asymp_tail_general,
    asymp_tail_power,
    exact_tail,
    power_law_constants,
)
from .perturbation import model_from_config
from .workload import ServiceSpec, workload

DEFAULT_SEED = 20120


class CliError(Exception):
    """Usage or config error (exit code 2)."""


def _parse_model(spec: str):
    """Model flag: ``zero``, ``pareto2:c1,a1,c2,a2``, ``exp2:d1,b1,d2,b2``,
    inline JSON, or ``@file.json``."""
    if spec == "zero":
        return model_from_config({"type": "zero"})
    if spec.startswith("pareto2:"):
        try:
            c1, a1, c2, a2 = (float(x) for x in spec[8:].split(","))
        except ValueError as exc:
            raise CliError(f"bad pareto2 spec {spec!r}: need c1,alpha1,c2,alpha2") from exc
        return model_from_config(
            {"type": "pareto2", "c1": c1, "alpha1": a1, "c2": c2, "alpha2": a2}
        )
    if spec.startswith("exp2:"):
        try:
            d1, b1, d2, b2 = (float(x) for x in spec[5:].split(","))
        except ValueError as exc:
            raise CliError(f"bad exp2 spec {spec!r}: need d1,beta1,d2,beta2") from exc
        return model_from_config(
            {"type": "exp2", "d1": d1, "beta1": b1, "d2": d2, "beta2": b2}
        )
    if spec.startswith("@"):
        path = spec[1:]
        if not os.path.exists(path):
            raise CliError(f"model file not found: {path}")
        with open(path) as fh:
            doc = json.load(fh)
        return model_from_config(doc)
    if spec.lstrip().startswith("{"):
        try:
            doc = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise CliError(f"model JSON does not parse: {exc}") from exc
        return model_from_config(doc)
    raise CliError(f"unrecognized model spec {spec!r}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_with_checksum(header: str, payload_lines: List[str]) -> str:
    body = "\n".join([header] + payload_lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + f"# sha256={digest}\n"


def _rows_as_json(header: str, payload_lines: List[str]) -> str:
    cols = header.split(",")
    rows = [dict(zip(cols, line.split(","))) for line in payload_lines]
    body = json.dumps(rows, indent=1, sort_keys=True)
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + f"\n# sha256={digest}\n"


def _format_rows(fmt: str, header: str, payload_lines: List[str]) -> str:
    if fmt == "json":
        return _rows_as_json(header, payload_lines)
    return _csv_with_checksum(header, payload_lines)


def _g17(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_constants(args) -> int:
    r, eta, gam = power_law_constants(args.c, args.alpha)
    line = ",".join([_g17(args.c), _g17(args.alpha), _g17(r), _g17(eta), _g17(gam)])
    _emit(_format_rows(args.format, "c,alpha,r_star,eta_star,gamma", [line]), args.out)
    return 0


def _cmd_tail_exact(args) -> int:
    seq = ParamSeq.power_law(args.c, args.alpha, args.w)
    est = exact_tail(seq, args.n, eps=args.eps)
    header = "c,alpha,w,n,tail,log_tail,err_bound,terms"
    line = ",".join([
        _g17(args.c), _g17(args.alpha), _g17(args.w), str(args.n),
        _g17(est.value), _g17(est.log_value), _g17(est.err_bound), str(est.j_terms),
    ])
    _emit(_format_rows(args.format, header, [line]), args.out)
    return 0


def _cmd_tail_asymp(args) -> int:
    if args.form == "i":
        seq = ParamSeq.power_law(args.c, args.alpha, args.w)
        log_tail = asymp_tail_general(seq, args.n)
    else:
        log_tail = asymp_tail_power(args.c, args.w, args.alpha, args.n)
    header = "form,c,alpha,w,n,log_tail"
    line = ",".join([args.form, _g17(args.c), _g17(args.alpha), _g17(args.w),
                     str(args.n), _g17(log_tail)])
    _emit(_format_rows(args.format, header, [line]), args.out)
    return 0


def _cmd_covariance(args) -> int:
    model = _parse_model(args.model)
    cov = traffic.conditional_cov(model, args.u, args.n, eps=args.eps)
    header = "model,u,n,cov"
    # commas inside the model spec would break the CSV row
    line = ",".join([args.model.replace(",", ";"), _g17(args.u), str(args.n), _g17(cov)])
    _emit(_format_rows(args.format, header, [line]), args.out)
    return 0


def _cmd_path(args) -> int:
    model = _parse_model(args.model)
    stream = np.random.default_rng(args.seed)
    path = traffic.generate_path(
        model, (args.window[0], args.window[1]), args.u, stream, eps=args.eps
    )
    _emit(traffic.path_to_csv(path), args.out)
    return 0


def _cmd_workload(args) -> int:
    model = _parse_model(args.model)
    stream = np.random.default_rng(args.seed)
    path = traffic.generate_path(
        model, (args.window[0], args.window[1]), args.u, stream, eps=args.eps
    )
    grid = [float(x) for x in args.grid.split(",")] if args.grid else [args.window[1]]
    trace = workload(path, args.rho, grid,
                     services=ServiceSpec(args.services), stream=stream)
    lines = [f"{_g17(t)},{_g17(v)}" for t, v in zip(trace.grid_times, trace.grid_values)]
    _emit(_format_rows(args.format, "t,W", lines), args.out)
    return 0


def load_config(path: str) -> experiments.ExperimentConfig:
    """Parse and validate an experiment config file.

    Parse errors (bad JSON, duplicate keys) and validation errors (bad
    values) are reported distinctly."""
    if not os.path.exists(path):
        raise CliError(f"config file not found: {path}")
    with open(path) as fh:
        text = fh.read()

    def reject_dupes(pairs):
        keys = [k for k, _ in pairs]
        if len(keys) != len(set(keys)):
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            raise ValueError(f"duplicate keys: {dupes}")
        return dict(pairs)

    try:
        doc = json.loads(text, object_pairs_hook=reject_dupes)
    except ValueError as exc:
        raise CliError(f"config parse error in {path}: {exc}") from exc
    try:
        return experiments.ExperimentConfig.from_dict(doc)
    except ValueError as exc:
        raise CliError(f"config validation error in {path}: {exc}") from exc


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    workers = args.threads if args.threads else (os.cpu_count() or 1)
    t0 = time.monotonic()
    result = experiments.run(cfg, max_workers=workers)
    wall = time.monotonic() - t0
    if args.out:
        experiments.write_result(result, args.out, cfg.seed, wall)
    else:
        sys.stdout.write(result.to_csv())
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="schedq",
        description="Scheduled-arrival queue laboratory: exact tails, paths, "
                    "workloads and Monte Carlo experiments.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"RNG seed (default {DEFAULT_SEED}, fixed, not wall clock)")

    p = sub.add_parser("constants", help="tilting constants r*, eta*, gamma")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    common(p)
    p.set_defaults(fn=_cmd_constants)

    p = sub.add_parser("tail-exact", help="certified exact Bernoulli-sum tail")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-12)
    common(p)
    p.set_defaults(fn=_cmd_tail_exact)

    p = sub.add_parser("tail-asymp", help="asymptotic tail, log space")
    p.add_argument("--form", choices=("i", "ii"), required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(fn=_cmd_tail_asymp)

    p = sub.add_parser("covariance", help="exact conditional lag covariance")
    p.add_argument("--model", required=True)
    p.add_argument("--u", type=float, default=0.5)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-12)
    common(p)
    p.set_defaults(fn=_cmd_covariance)

    p = sub.add_parser("path", help="sample one arrival path as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--u", type=float, default=None,
                   help="common uniform; drawn fresh when omitted")
    p.add_argument("--window", type=float, nargs=2, required=True,
                   metavar=("LO", "HI"))
    p.add_argument("--eps", type=float, default=1e-10)
    common(p)
    p.set_defaults(fn=_cmd_path)

    p = sub.add_parser("workload", help="workload trace on a grid")
    p.add_argument("--model", required=True)
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, required=True,
                   metavar=("LO", "HI"))
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--grid", default=None, help="comma-separated query times")
    p.add_argument("--services", choices=("unit", "exp", "uniform"), default="unit")
    p.add_argument("--eps", type=float, default=1e-10)
    common(p)
    p.set_defaults(fn=_cmd_workload)

    p = sub.add_parser("experiment", help="run a registered experiment")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: all cores); never affects "
                        "output bytes")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_experiment)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
