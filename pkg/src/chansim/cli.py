"""Command-line front end: bounds, capacity, verify, sweep.

Every command is deterministic given (input file, flags, seed); numeric
output is printed with six decimal places, with full precision available in
the JSON report.  Exit codes: 0 success, 2 input validation, 3 numerical
failure, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds as bounds_mod
from . import harness
from .capacity import OptimizerConfig, capacity_CE, renyi_channel_mutual_info
from .errors import (
    DimensionError,
    DomainError,
    EvaluationError,
    InvalidProtocolError,
    ParameterError,
    ResourceError,
    SolverError,
)
from .quantum import (
    DensityOperator,
    QuantumChannel,
    constant_channel,
    dephasing,
    depolarizing,
    identity_channel,
    maximally_mixed,
    random_channel,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4

VALIDATION_ERRORS = (
    DimensionError,
    DomainError,
    ParameterError,
    InvalidProtocolError,
    ValueError,
    KeyError,
)


def _channel_from_spec(obj: dict) -> QuantumChannel:
    """Channel file format: explicit Kraus list or a named constructor."""
    if "builtin" in obj:
        name = obj["builtin"]
        if name == "identity":
            return identity_channel(int(obj.get("d", 2)))
        if name == "depolarizing":
            return depolarizing(float(obj.get("p", 0.0)), int(obj.get("d", 2)))
        if name == "dephasing":
            return dephasing(float(obj.get("p", 0.0)))
        if name == "constant":
            d = int(obj.get("d", 2))
            return constant_channel(maximally_mixed(d), d_in=d)
        if name == "random":
            return random_channel(
                int(obj.get("d_in", 2)),
                int(obj.get("d_out", 2)),
                obj.get("kraus_rank"),
                seed=int(obj.get("seed", 0)),
            )
        raise ParameterError(f"unknown builtin channel {name!r}")
    for field in ("d_in", "d_out", "kraus"):
        if field not in obj:
            raise ParameterError(f"channel file is missing the {field!r} field")
    kraus = []
    for idx, mat in enumerate(obj["kraus"]):
        try:
            arr = np.array([[complex(re, im) for re, im in row] for row in mat])
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"kraus[{idx}] is not a matrix of [re, im] pairs") from exc
        kraus.append(arr)
    return QuantumChannel(kraus, d_in=int(obj["d_in"]), d_out=int(obj["d_out"]))


def load_channel(args) -> QuantumChannel:
    if args.builtin is not None:
        spec: dict = {"builtin": args.builtin}
        if args.p is not None:
            spec["p"] = args.p
        if args.d is not None:
            spec["d"] = args.d
        spec["seed"] = args.seed
        return _channel_from_spec(spec)
    if args.channel is None:
        raise ParameterError("pass --channel FILE or --builtin NAME")
    with open(args.channel) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"channel file is not valid JSON: {exc}") from exc
    return _channel_from_spec(obj)


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=args.restarts,
        max_iter=args.max_iter,
        value_tol=args.value_tol,
        seed=args.seed,
    )


def _write_output(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(args, results: list[dict]) -> str:
    report = {
        "invocation": " ".join(args._argv),
        "seed": args.seed,
        "results": results,
    }
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def cmd_bounds(args) -> int:
    channel = load_channel(args)
    cfg = _config(args)
    results = []
    lines = ["epsilon   delta     converse  achievability"]
    for eps in args.eps:
        for delta in args.delta:
            if not 0.0 < delta < eps:
                raise ParameterError(f"need 0 < delta < epsilon, got delta={delta} eps={eps}")
            conv = bounds_mod.converse_bound(channel, eps, cfg)
            ach = bounds_mod.achievability_bound(channel, eps, delta, cfg)
            if ach.achievability_bits < conv.converse_bits - 1e-6:
                raise SolverError("bound ordering violated beyond tolerance")
            lines.append(
                f"{eps:<9.4f} {delta:<9.4f} {conv.converse_bits:<9.6f} {ach.achievability_bits:.6f}"
            )
            results.append(
                {
                    "epsilon": eps,
                    "delta": delta,
                    "converse_bits": conv.converse_bits,
                    "achievability_bits": ach.achievability_bits,
                    "converged": bool(conv.converged and ach.converged),
                }
            )
    if args.format == "json":
        _write_output(args, _json_report(args, results))
    elif args.format == "csv":
        rows = ["epsilon,delta,converse_bits,achievability_bits"]
        rows += [
            f"{r['epsilon']:.10g},{r['delta']:.10g},{r['converse_bits']:.10g},{r['achievability_bits']:.10g}"
            for r in results
        ]
        _write_output(args, "\n".join(rows) + "\n")
    else:
        _write_output(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_capacity(args) -> int:
    channel = load_channel(args)
    cfg = _config(args)
    res = capacity_CE(channel, cfg)
    results = [{"kind": "capacity", "value_bits": res.value, "converged": res.converged}]
    lines = [f"C_E = {res.value:.6f} bits (converged={res.converged})"]
    for alpha in args.alpha or []:
        r = renyi_channel_mutual_info(channel, alpha, cfg)
        results.append(
            {"kind": "renyi", "alpha": alpha, "value_bits": r.value, "converged": r.converged}
        )
        lines.append(f"I_{alpha:g} = {r.value:.6f} bits (converged={r.converged})")
    if args.format == "json":
        _write_output(args, _json_report(args, results))
    elif args.format == "csv":
        rows = ["kind,alpha,value_bits,converged"]
        for r in results:
            rows.append(
                f"{r['kind']},{r.get('alpha', '')},{r['value_bits']:.10g},"
                + ("true" if r["converged"] else "false")
            )
        _write_output(args, "\n".join(rows) + "\n")
    else:
        _write_output(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    channel = load_channel(args)
    cfg = _config(args)
    reports = [
        harness.check_lemma1(channel, trials=args.trials, seed=args.seed),
        harness.check_concavity_in_channel(channel, trials=args.trials, seed=args.seed),
        harness.check_restricted_minimax(channel, k=3, cfg=cfg, seed=args.seed),
    ]
    results = [r.as_dict() for r in reports]
    text = _json_report(args, results)
    if args.format == "table":
        lines = [
            f"{r.name:<32} trials={r.trials:<6} worst={r.worst_violation:+.3e} "
            + ("pass" if r.passed else "FAIL")
            for r in reports
        ]
        _write_output(args, "\n".join(lines) + "\n")
    else:
        _write_output(args, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERICAL


def cmd_sweep(args) -> int:
    channel = load_channel(args)
    cfg = _config(args)
    rows, flags = bounds_mod.sweep(
        channel,
        args.eps,
        args.delta,
        args.n,
        alpha=args.alpha[0] if args.alpha else 2.0,
        cfg=cfg,
        jobs=args.jobs,
    )
    if args.format == "json":
        results = [
            {
                "kind": r.kind,
                "epsilon": r.epsilon,
                "delta": r.delta,
                "n": r.n,
                "alpha": r.alpha,
                "value_bits": None if math.isnan(r.value_bits) else r.value_bits,
                "converged": r.converged,
            }
            for r in rows
        ]
        _write_output(args, _json_report(args, results))
    else:
        out = [bounds_mod.CSV_HEADER]
        out += [r.csv() for r in rows]
        out += ["# " + f for f in flags]
        _write_output(args, "\n".join(out) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chansim",
        description="One-shot entanglement-assisted channel simulation bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_eps=False, with_alpha=False, with_n=False, with_trials=False):
        p.add_argument("--channel", help="path to a channel JSON file")
        p.add_argument("--builtin", help="builtin channel: identity|depolarizing|dephasing|constant|random")
        p.add_argument("--p", type=float, default=None, help="builtin channel parameter")
        p.add_argument("--d", type=int, default=None, help="builtin channel dimension")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=3)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=60)
        p.add_argument("--value-tol", dest="value_tol", type=float, default=1e-9)
        p.add_argument("--jobs", type=int, default=None, help="worker cap for row evaluation")
        p.add_argument("--output", help="write the report to this path instead of stdout")
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        if with_eps:
            p.add_argument("--eps", type=float, nargs="+", required=True)
            p.add_argument("--delta", type=float, nargs="+", required=True)
        if with_alpha:
            p.add_argument("--alpha", type=float, nargs="+", default=None)
        if with_n:
            p.add_argument("--n", type=int, nargs="+", default=[1])
        if with_trials:
            p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("bounds", help="one-shot achievability and converse bounds")
    common(p, with_eps=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("capacity", help="entanglement-assisted capacity and Renyi information")
    common(p, with_alpha=True)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("verify", help="property suites for the structural claims")
    common(p, with_trials=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="bound table over epsilon/delta/n with chain checks")
    common(p, with_eps=True, with_alpha=True, with_n=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else 0
    args._argv = ["chansim"] + argv
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VALIDATION_ERRORS as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SolverError, EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
