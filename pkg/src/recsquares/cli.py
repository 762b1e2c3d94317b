"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 verification or golden mismatch,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from typing import Optional, Sequence

from . import __version__
from .bounds import CATALOGUE, GROUPS, group_max, instantiate, window
from .checkpoint import CheckpointError
from .search import MODES, SearchOptions, run_search, scan_tuple
from .sequence import ParameterError, compute_K, derive_params

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INTERNAL = 0, 1, 2, 3

# Published counts per b: (D_b, c1, c2).
GOLDEN = {1: (167, 144, 2), 2: (2482503, 1881618, 0)}
GOLDEN_FLAGGED = {1: [(2, 1, 8, 2, 1), (2, 1, 13, 3, 1)], 2: []}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _tuple(text: str) -> tuple[int, int, int, int, int]:
    try:
        parts = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"tuple must be five integers a,b,d,t,u: {text!r}")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(f"tuple must have five entries a,b,d,t,u: {text!r}")
    return parts


def _sample(text: str) -> tuple[int, int]:
    try:
        stride, offset = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("sample must look like STRIDE:OFFSET")
    return stride, offset


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="recsquares", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="run the tuple search for one b")
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--mode", choices=MODES, default="published")
    s.add_argument("--d-limit-policy", choices=("published", "global", "per-u"), default="published")
    s.add_argument("--d-max", type=int, help="search d <= this for every u instead of the derived limits")
    s.add_argument("--u-min", type=int, default=1)
    s.add_argument("--u-max", type=int)
    s.add_argument("--include-d-floor", action="store_true", help="also require d >= (10000 b^4/u^12)^(1/5)")
    s.add_argument("--variant", choices=("combined", "alternate"), default="combined")
    s.add_argument("--threads", type=int, default=1, help="worker processes")
    s.add_argument("--shards", type=int, help="number of work units (default: one per u)")
    s.add_argument("--sample", type=_sample, help="run only units with uid = OFFSET mod STRIDE")
    s.add_argument("--checkpoint")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--emit-candidates", action="store_true", help="also write every candidate tuple")
    s.add_argument("--no-ledger", action="store_true", help="omit per-unit records")
    s.add_argument("--golden", action="store_true", help="exit 2 unless the published counts are reproduced")
    s.add_argument("--allow-large", action="store_true", help="permit a full run with b >= 3")
    s.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    s.add_argument("--output", "-o")

    v = sub.add_parser("verify", help="show K, the window and the square witnesses of one tuple")
    v.add_argument("--tuple", type=_tuple, required=True)

    sc = sub.add_parser("scan", help="scan tuples for squares in their windows")
    sc.add_argument("--tuple", type=_tuple, action="append", default=[])
    sc.add_argument("--input", help="file of tuples, one a,b,d,t,u (or JSON list) per line")
    sc.add_argument("--output", "-o")

    e = sub.add_parser("evidence", help="count squares and check the conjectured ceilings")
    e.add_argument("--input", help="file of tuples, one a,b,d,t,u (or JSON list) per line")
    e.add_argument("--sweep", type=int, help="generate this many random tuples instead of reading a file")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--max-norm", type=int, default=10**4)
    e.add_argument("--k-max", type=int, default=30)
    e.add_argument("--max-bits", type=int, default=4096)
    e.add_argument("--primed", action="store_true", help="also scan y'_k")
    e.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    e.add_argument("--output", "-o")

    bd = sub.add_parser("bounds", help="evaluate a named bound exactly")
    bd.add_argument("name", nargs="?", help="bound id or group name (omit with --list)")
    bd.add_argument("--list", action="store_true")
    bd.add_argument("--b", type=int, default=1)
    bd.add_argument("--n", type=int, default=1, help="|N_alpha|")
    bd.add_argument("--d", type=int, default=2)
    bd.add_argument("--u", type=int, default=1)
    bd.add_argument("--digits", type=int, default=30)

    st = sub.add_parser("selftest", help="run the embedded invariant checks")
    st.add_argument("--quick", action="store_true", help="only the b = 1 golden search")
    st.add_argument("--inject-fault", metavar="CHECK", help=argparse.SUPPRESS)
    return p


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_tuples(path: str) -> list[tuple[int, int, int, int, int]]:
    out = []
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    for i, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("[") or line.startswith("{"):
                obj = json.loads(line)
                tp = tuple(obj[k] for k in "abdtu") if isinstance(obj, dict) else tuple(obj)
            else:
                tp = _tuple(line)
            if len(tp) != 5:
                raise ValueError
        except (ValueError, KeyError, argparse.ArgumentTypeError):
            raise UsageError(f"{path}:{i}: cannot parse tuple {line!r}")
        out.append(tuple(int(x) for x in tp))
    return out


def _config(args: argparse.Namespace) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items()) if k not in ("output",)}


# --- subcommands --------------------------------------------------------------------


def cmd_search(args) -> int:
    if args.b < 1:
        raise UsageError("--b must be positive")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    if args.shards is not None and args.shards < 1:
        raise UsageError("--shards must be at least 1")
    restricted = args.d_max is not None or args.sample is not None or args.u_max is not None
    if args.b >= 3 and not restricted and not args.allow_large:
        raise UsageError("a full search with b >= 3 takes days; pass --allow-large, or restrict it with --sample/--d-max/--u-max")
    if args.resume and not args.checkpoint:
        raise UsageError("--resume needs --checkpoint")
    options = SearchOptions(
        mode=args.mode,
        d_limit_policy=args.d_limit_policy,
        d_max=args.d_max,
        u_min=args.u_min,
        u_max=args.u_max,
        include_d_floor=args.include_d_floor,
        variant=args.variant,
    )
    try:
        options.validate()
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        report = run_search(
            args.b,
            options,
            threads=args.threads,
            shards=args.shards,
            checkpoint=args.checkpoint,
            resume=args.resume,
            sample=args.sample,
            emit_candidates=args.emit_candidates,
            provenance=_config(args),
        )
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    if args.format == "table":
        text = report.to_table()
    else:
        text = report.to_jsonl(include_ledger=not args.no_ledger)
        if args.emit_candidates:
            cands = [c for res in report.ledger for c in res.get("candidate_tuples", [])]
            text += "".join(json.dumps({"record": "candidate", "tuple": c}) + "\n" for c in cands)
    _write(text, args.output)
    if args.golden:
        want = GOLDEN.get(args.b)
        if want is None:
            print(f"no published counts for b = {args.b}", file=sys.stderr)
            return EXIT_MISMATCH
        got = (report.D_b, report.candidate_count, report.flagged_count)
        flagged_ok = report.flagged_tuples == GOLDEN_FLAGGED[args.b]
        if got != want or not flagged_ok:
            print(f"golden mismatch for b = {args.b}: expected (D_b, c1, c2) = {want}, got {got}", file=sys.stderr)
            return EXIT_MISMATCH
    return EXIT_OK


def _verify_lines(tp) -> list[str]:
    p = derive_params(*tp, search=True)
    w = window(p)
    K = compute_K(p)
    lines = [
        f"tuple (a, b, d, t, u) = {p.tuple}",
        f"N_alpha = {p.n_alpha}  unit norm = {p.unit_norm:+d}  recurrence coefficient = {p.coeff2}",
        f"K = {K}",
        f"window bottom = {w.bottom} ~ {w.bottom.to_decimal(20)}",
        f"window top    = {w.top} ~ {w.top.to_decimal(20)}",
    ]
    wit = scan_tuple(p)
    if wit:
        lines += [f"witness k = {s.k}: y = {s.y} = {s.root}^2" for s in wit]
    else:
        lines.append("no square in the window")
    return lines


def cmd_verify(args) -> int:
    try:
        lines = _verify_lines(args.tuple)
    except ParameterError as exc:
        raise UsageError(str(exc))
    print("\n".join(lines))
    return EXIT_OK


def cmd_scan(args) -> int:
    tuples = list(args.tuple)
    if args.input:
        tuples += _read_tuples(args.input)
    if not tuples:
        raise UsageError("give --tuple or --input")
    out = []
    for tp in tuples:
        try:
            p = derive_params(*tp, search=True)
        except ParameterError as exc:
            raise UsageError(f"{tp}: {exc}")
        wit = scan_tuple(p)
        out.append(json.dumps({"tuple": list(tp), "n_alpha": p.n_alpha, "K": compute_K(p), "witnesses": [[s.k, s.y, s.root] for s in wit]}, sort_keys=True))
    _write("\n".join(out) + "\n", args.output)
    return EXIT_OK


def cmd_evidence(args) -> int:
    from .evidence import emit_report, enumerate_squares, random_tuples

    if args.sweep is not None:
        tuples = random_tuples(args.sweep, seed=args.seed, max_norm=args.max_norm)
    elif args.input:
        tuples = _read_tuples(args.input)
    else:
        raise UsageError("give --input or --sweep")
    if args.k_max < 0:
        raise UsageError("--k-max must be non-negative")
    records = []
    for tp in tuples:
        try:
            p = derive_params(*tp, search=True)
        except ParameterError as exc:
            raise UsageError(f"{tp}: {exc}")
        records.append(enumerate_squares(p, -args.k_max, args.k_max, args.primed, args.max_bits))
    _write(emit_report(records, args.format), args.output)
    bad = [r for r in records if r.violations]
    for r in bad:
        print(f"FALSIFICATION {r.tuple}: {'; '.join(r.violations)}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_bounds(args) -> int:
    if args.list:
        for name in CATALOGUE:
            print(f"{name:<16} {CATALOGUE[name]}")
        for g, members in GROUPS.items():
            print(f"{g:<16} max of {', '.join(members)}")
        return EXIT_OK
    if not args.name:
        raise UsageError("give a bound name or --list")
    if min(args.b, args.n, args.d, args.u) < 1:
        raise UsageError("b, n, d and u must be positive")
    values = dict(b=args.b, N=args.n, d=args.d, u=args.u)
    if args.name in GROUPS:
        value = group_max(args.name, **values)
    elif args.name in CATALOGUE:
        value = instantiate(args.name, **values)
    else:
        raise UsageError(f"unknown bound {args.name!r}; see --list")
    expr = CATALOGUE[args.name] if args.name in CATALOGUE else f"max of {', '.join(GROUPS[args.name])}"
    print(f"{args.name} = {expr}")
    print(f"at b={args.b} N={args.n} d={args.d} u={args.u}: {value}")
    print(f"~ {value.to_decimal(args.digits)}")
    print(f"floor = {value.floor()}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from . import selftest

    try:
        results = selftest.run(quick=args.quick, inject_fault=args.inject_fault)
    except ValueError as exc:
        raise UsageError(str(exc))
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.ok]
    if failed:
        print(f"failing properties: {', '.join(failed)}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


COMMANDS = {
    "search": cmd_search,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "evidence": cmd_evidence,
    "bounds": cmd_bounds,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
