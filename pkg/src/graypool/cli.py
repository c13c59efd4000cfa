"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 construction failure,
3 usage or input error. Every file written via --out gets a sidecar
``<file>.manifest.json`` recording the full parameter set and the output
digest, so runs can be reproduced bit for bit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .codes import (
    Address,
    code_to_json_dict,
    length_bound,
    load_code,
    save_code,
)
from .bba import DEFAULT_BUDGET, bba
from .decode import PoolDecoder, partition_items
from .errors import ConstructionError, NodeLimitError
from .oracle import DEFAULT_NODE_LIMIT, exhaustive_best_balance, exhaustive_max
from .recombine import build_maximal, rcbba_detailed
from .simulate import simulate_sweep, sweep_to_csv
from .validate import validate


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _parse_indices(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}")


def _write_manifest(out_path: Path, subcommand: str, params: dict, started: float) -> None:
    digest = hashlib.sha256(out_path.read_bytes()).hexdigest()
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "seed": params.get("seed"),
        "budget": params.get("budget"),
        "version": __version__,
        "duration_seconds": round(time.monotonic() - started, 6),
        "output_path": str(out_path),
        "output_sha256": digest,
    }
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n"
    )


def _emit_code(code, out, subcommand, params, started, extra=None):
    if out is None:
        print(json.dumps(code_to_json_dict(code, extra), indent=2))
        return
    out_path = Path(out)
    save_code(code, out_path, extra=extra)
    _write_manifest(out_path, subcommand, params, started)


def cmd_bound(args) -> int:
    print(length_bound(args.m, args.r))
    return 0


def cmd_construct(args) -> int:
    started = time.monotonic()
    params = {
        "alg": args.alg,
        "m": args.m,
        "r": args.r,
        "n": args.n,
        "first_address": args.first_address,
        "seed": args.seed,
        "budget": args.budget,
        "time_limit": args.time_limit,
        "union_penalty": args.union_penalty,
    }
    extra = None
    if args.alg == "maximal":
        code = build_maximal(args.m, args.r, seed=args.seed, budget=args.budget)
    else:
        if args.n is None:
            raise ValueError("--n is required for bba and rcbba")
        if args.alg == "bba":
            first = None
            if args.first_address:
                first = Address.from_index_set(args.m, _parse_indices(args.first_address))
            code = bba(
                args.m,
                args.r,
                args.n,
                first,
                seed=args.seed,
                budget=args.budget,
                union_bits_in_penalty=args.union_penalty == "include",
                time_limit=args.time_limit,
            )
        else:
            code, trace = rcbba_detailed(
                args.m,
                args.r,
                args.n,
                seed=args.seed,
                budget=args.budget,
                time_limit=args.time_limit,
            )
            extra = {"provenance": trace.to_json_dict()}
    _emit_code(code, args.out, "construct", params, started, extra)
    return 0


def cmd_validate(args) -> int:
    code = load_code(args.code)
    report = validate(code)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0 if report.is_valid else 1


def cmd_decode(args) -> int:
    code = load_code(args.code)
    decoder = PoolDecoder(code)
    result = decoder.decode(_parse_indices(args.positives), allow_single=not args.no_single)
    print(json.dumps(result.to_json_dict(), indent=2))
    return 0


def cmd_simulate(args) -> int:
    started = time.monotonic()
    code = load_code(args.code)
    records = simulate_sweep(
        code,
        args.max_errors,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        error_type=args.error_type,
    )
    text = sweep_to_csv(records)
    if args.out is None:
        print(text, end="")
        return 0
    out_path = Path(args.out)
    out_path.write_text(text)
    params = {
        "code": args.code,
        "max_errors": args.max_errors,
        "mode": args.mode,
        "samples": args.samples,
        "seed": args.seed,
        "error_type": args.error_type,
    }
    _write_manifest(out_path, "simulate", params, started)
    return 0


def cmd_oracle(args) -> int:
    if args.oracle_cmd == "max":
        result = exhaustive_max(args.m, args.r, node_limit=args.node_limit)
        print(
            json.dumps(
                {
                    "max_length": result.max_length,
                    "search_nodes": result.search_nodes,
                    "is_exact": result.is_exact,
                    "witness": code_to_json_dict(result.witness),
                },
                indent=2,
            )
        )
        return 0
    code = exhaustive_best_balance(args.m, args.r, args.n, node_limit=args.node_limit)
    print(json.dumps(code_to_json_dict(code), indent=2))
    return 0


def cmd_partition(args) -> int:
    groups = partition_items(args.n_items, args.d)
    print(json.dumps([list(g) for g in groups]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="graypool",
        description="Construct, validate, decode, and stress-test pooling codes.",
    )
    parser.add_argument("--version", action="version", version=f"graypool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="print the maximum code length for m pools and weight r")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("construct", help="construct a code")
    p.add_argument("--alg", choices=["bba", "rcbba", "maximal"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--first-address", default=None, help="comma-separated pool indices, bba only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="node-visit budget")
    p.add_argument("--time-limit", type=float, default=None, help="wall-clock cap in seconds")
    p.add_argument(
        "--union-penalty",
        choices=["include", "exclude"],
        default="include",
        help="count a candidate union's own bits toward its balance penalty",
    )
    p.add_argument("--out", default=None, help="output file (.json or .csv); default stdout JSON")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("validate", help="validate a code file and print the report")
    p.add_argument("code", help="code file (.json or .csv)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decode", help="decode a set of positive pools against a code")
    p.add_argument("--code", required=True)
    p.add_argument("--positives", required=True, help="comma-separated pool indices")
    p.add_argument("--no-single", action="store_true", help="rule out single-positive readings")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="run the error-injection sweep")
    p.add_argument("--code", required=True)
    p.add_argument("--max-errors", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "sampled", "auto"], default="auto")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--error-type", choices=["false-negative", "false-positive"], default="false-negative"
    )
    p.add_argument("--out", default=None, help="output CSV; default stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exhaustive searches for small parameters")
    osub = p.add_subparsers(dest="oracle_cmd", required=True)
    q = osub.add_parser("max", help="exact maximum code length")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    q.set_defaults(func=cmd_oracle)
    q = osub.add_parser("balance", help="exact minimum-deviation code")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    q.set_defaults(func=cmd_oracle)

    p = sub.add_parser("partition", help="group linearly ordered items for pair detection")
    p.add_argument("--n-items", type=int, required=True)
    p.add_argument("--d", type=int, required=True, help="maximum consecutive positive span")
    p.set_defaults(func=cmd_partition)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConstructionError as exc:
        print(f"graypool: construction failed ({exc.kind}): {exc}", file=sys.stderr)
        return 2
    except NodeLimitError as exc:
        print(f"graypool: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"graypool: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
