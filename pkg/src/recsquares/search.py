"""Exhaustive search for squares inside the scan window.

For every b the search walks u = 1..U_b, every unit eps = (t + u sqrt(d))/2
with d = (t^2 -+ 4)/u^2 up to a d limit, and every admissible a.  Each
candidate tuple (a, b, d, t, u) is scanned for square y_k with k >= 3 or
k <= K - 2 that lie in the window.

The hot path (:func:`scan_group`) handles all a sharing one (d, t, u) at
once.  With eps^(2k) = (X_k + Y_k sqrt(d))/2 it uses

    2 y_k    = a Y_k + b^2 X_k          (k >= 0)
    2 y_{-m} = b^2 X_m - a Y_m          (m >= 0)

so each term costs two multiplications.  :func:`scan_tuple` is the slow,
obviously-correct reference that the tests compare against.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from . import __version__
from .bounds import (
    D_LIMIT_POLICIES,
    ConditionVerdicts,
    a_hi,
    compute_Db,
    compute_Ub,
    condition_verdicts,
    d_limit,
    n_ceilings,
    published_a_lo,
    window,
    window_for,
)
from .exact import is_perfect_square, isqrt
from .sequence import SequenceParams, compute_K, derive_params, iterate

MODES = ("published", "paper-literal", "complement")


@dataclass(frozen=True)
class UnitTriple:
    t: int
    u: int
    d: int
    unit_norm: int


@dataclass(frozen=True)
class SquareWitness:
    k: int
    y: int
    root: int


@dataclass(frozen=True)
class CandidateTuple:
    params: SequenceParams
    verdicts: ConditionVerdicts
    mode: str


@dataclass(frozen=True)
class SearchOptions:
    mode: str = "published"
    d_limit_policy: str = "published"
    d_max: Optional[int] = None  # overrides the per-u limit when set
    u_min: int = 1
    u_max: Optional[int] = None  # defaults to U_b
    include_d_floor: bool = False
    variant: str = "combined"

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.d_limit_policy not in D_LIMIT_POLICIES:
            raise ValueError(f"unknown d-limit policy {self.d_limit_policy!r}")
        if self.d_max is not None and self.d_max < 2:
            raise ValueError("d_max must be at least 2")
        if self.u_min < 1 or (self.u_max is not None and self.u_max < self.u_min):
            raise ValueError("bad u range")

    def digest(self, b: int) -> str:
        blob = json.dumps({"b": b, **asdict(self)}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --- enumeration ----------------------------------------------------------------


def _residues(u: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """t mod u^2 with u^2 | t^2 - 4 (norm +1) and u^2 | t^2 + 4 (norm -1)."""
    m = u * u
    plus = tuple(r for r in range(m) if (r * r - 4) % m == 0)
    minus = tuple(r for r in range(m) if (r * r + 4) % m == 0)
    return plus, minus


def t_max_for(u: int, d_max: int) -> int:
    """Largest t that can give d <= d_max (through t^2 = d u^2 + 4)."""
    return isqrt(d_max * u * u + 4)


def enumerate_units(u: int, d_max: int, t_lo: int = 1, t_hi: Optional[int] = None) -> Iterator[UnitTriple]:
    """All units with this u and 2 <= d <= d_max, d nonsquare, t ascending.

    For each t the norm +1 unit (smaller d) comes first.
    """
    if u < 1:
        raise ValueError("u must be positive")
    m = u * u
    top = t_max_for(u, d_max)
    t_hi = top if t_hi is None else min(t_hi, top)
    plus, minus = _residues(u)
    res = sorted(set(plus) | set(minus))
    if not res:
        return
    plus_s, minus_s = set(plus), set(minus)
    base = (t_lo // m) * m
    while base <= t_hi:
        for r in res:
            t = base + r
            if t < t_lo or t < 1:
                continue
            if t > t_hi:
                break
            for norm, ok in ((1, r in plus_s), (-1, r in minus_s)):
                if not ok:
                    continue
                d = (t * t - 4 * norm) // m
                if 2 <= d <= d_max and is_perfect_square(d) is None:
                    yield UnitTriple(t, u, d, norm)
        base += m


# --- candidate filter ------------------------------------------------------------


def candidate_interval(b: int, unit: UnitTriple, mode: str, include_d_floor: bool = False) -> tuple[int, int]:
    """The admitted a for (b, unit) as one interval [lo, hi] (empty when lo > hi).

    Every condition is monotone in N = d b^4 - a^2, so each mode admits an
    interval of a.
    """
    d, u = unit.d, unit.u
    hi = a_hi(b, d)
    if mode == "published":
        return published_a_lo(b, d, u), hi
    ceil = n_ceilings(b, d, u).all_ceiling(include_d_floor)
    # the a with every condition true are those with N <= ceil
    if ceil is None:
        split = hi + 1
    else:
        gap = d * b**4 - ceil
        split = 1 if gap <= 1 else isqrt(gap - 1) + 1
    if mode == "paper-literal":
        return split, hi
    if mode == "complement":
        return 1, min(split - 1, hi)
    raise ValueError(f"unknown mode {mode!r}")


def filter_candidates(b: int, unit: UnitTriple, mode: str, include_d_floor: bool = False) -> Iterator[CandidateTuple]:
    lo, hi = candidate_interval(b, unit, mode, include_d_floor)
    if lo > hi:
        return
    ceilings = n_ceilings(b, unit.d, unit.u)
    for a in range(lo, hi + 1):
        p = derive_params(a, b, unit.d, unit.t, unit.u, search=True)
        yield CandidateTuple(p, ceilings.verdicts(-p.n_alpha), mode)


# --- scanning ---------------------------------------------------------------------


def scan_tuple(candidate: CandidateTuple | SequenceParams) -> list[SquareWitness]:
    """Reference scan of one tuple: squares y_k in the window, k >= 3 or k <= K - 2."""
    p = candidate.params if isinstance(candidate, CandidateTuple) else candidate
    w = window(p)
    top2 = w.top_floor2()
    K = compute_K(p)
    found = []
    for start, step in ((3, 1), (K - 2, -1)):
        for tm in iterate(p, start, step):
            if tm.y2 > top2:
                break
            y = tm.y
            if y is None:
                continue
            r = is_perfect_square(y)
            if r is not None and w.contains2(tm.y2):
                found.append(SquareWitness(tm.k, y, r))
    return sorted(found, key=lambda s: s.k)


class _Powers:
    """X_m, Y_m of eps^(2m) = (X_m + Y_m sqrt(d))/2, extended on demand."""

    def __init__(self, unit: UnitTriple):
        c = unit.t * unit.t - 2 * unit.unit_norm
        self.c = c
        self.X = [2, c]
        self.Y = [0, unit.t * unit.u]

    def extend(self, m: int) -> None:
        X, Y, c = self.X, self.Y, self.c
        while len(X) <= m:
            X.append(c * X[-1] - X[-2])
            Y.append(c * Y[-1] - Y[-2])


def _horizon2(b: int, n: int, d: int) -> int:
    return window_for(b, n, d).top_floor2()


def scan_group(b: int, unit: UnitTriple, lo: int, hi: int) -> list[tuple[int, list[SquareWitness]]]:
    """Scan every a in [lo, hi] for (b, unit); return (a, witnesses) for the flagged ones.

    The a range is cut into chunks on which N varies by at most a factor of
    4; each chunk gets one exact horizon (2 * window top at its largest N).
    Terms above the horizon stop the scan; a square below it is checked
    against the exact window of its own tuple.
    """
    if lo > hi:
        return []
    d, b2 = unit.d, b * b
    B4 = d * b2 * b2
    pw = _Powers(unit)
    X, Y = pw.X, pw.Y
    two_b2 = 2 * b2
    out: list[tuple[int, list[SquareWitness]]] = []
    psq = is_perfect_square

    a = hi
    while a >= lo:
        n_small = B4 - a * a
        n_cap = 4 * n_small
        gap = B4 - n_cap
        # chunk: a from a_end..a, N = B4 - a^2 <= n_cap
        a_end = lo if gap <= 0 else max(lo, isqrt(gap - 1) + 1)
        H = _horizon2(b, B4 - a_end * a_end, d)
        m0 = 1
        for aa in range(a, a_end - 1, -1):
            hits = None
            # forward, k >= 3
            k = 3
            while True:
                if k >= len(X):
                    pw.extend(k)
                y2 = aa * Y[k] + b2 * X[k]
                if y2 > H:
                    break
                if not y2 & 1:
                    r = psq(y2 >> 1)
                    if r is not None:
                        hits = hits or []
                        hits.append((k, y2 >> 1, r))
                k += 1
            # K = -m0 with m0 the first m >= 1 where 2y_{-m} > 2b^2; it can only
            # shrink as a decreases, so keep the pointer but re-check downwards.
            while m0 > 1:
                if b2 * X[m0 - 1] - aa * Y[m0 - 1] > two_b2:
                    m0 -= 1
                else:
                    break
            while True:
                if m0 >= len(X):
                    pw.extend(m0)
                if b2 * X[m0] - aa * Y[m0] > two_b2:
                    break
                m0 += 1
            m = m0 + 2
            while True:
                if m >= len(X):
                    pw.extend(m)
                y2 = b2 * X[m] - aa * Y[m]
                if y2 > H:
                    break
                if not y2 & 1:
                    r = psq(y2 >> 1)
                    if r is not None:
                        hits = hits or []
                        hits.append((-m, y2 >> 1, r))
                m += 1
            if hits:
                w = window_for(b, B4 - aa * aa, d)
                wit = [SquareWitness(k, y, r) for k, y, r in hits if w.contains2(2 * y)]
                if wit:
                    out.append((aa, sorted(wit, key=lambda s: s.k)))
        a = a_end - 1
    out.sort()
    return out


# --- work units -------------------------------------------------------------------


@dataclass(frozen=True)
class WorkUnit:
    uid: int
    segments: tuple[tuple[int, int, int], ...]  # (u, t_lo, t_hi), inclusive


def u_bounds(b: int, options: SearchOptions) -> tuple[int, int]:
    hi = options.u_max if options.u_max is not None else compute_Ub(b, options.variant)
    return options.u_min, hi


def d_limits(b: int, options: SearchOptions) -> dict[int, int]:
    lo, hi = u_bounds(b, options)
    if options.d_max is not None:
        return {u: options.d_max for u in range(lo, hi + 1)}
    return {u: d_limit(b, u, options.d_limit_policy, options.variant) for u in range(lo, hi + 1)}


def partition_work(b: int, shard_count: int, options: SearchOptions = SearchOptions()) -> list[WorkUnit]:
    """Cut the (u, t) space into contiguous work units in a stable order.

    With at most one shard per u the units are blocks of whole u values;
    with more, each u's t range is split into pieces, the number of pieces
    proportional to the length of that range.
    """
    if shard_count < 1:
        raise ValueError("shard_count must be at least 1")
    limits = d_limits(b, options)
    spans = [(u, t_max_for(u, max(lim, 0))) for u, lim in sorted(limits.items())]
    if shard_count <= len(spans):
        units = []
        n = len(spans)
        for i in range(shard_count):
            block = spans[i * n // shard_count : (i + 1) * n // shard_count]
            units.append(WorkUnit(i, tuple((u, 1, tm) for u, tm in block)))
        return units
    total = sum(tm for _, tm in spans)
    units = []
    for u, tm in spans:
        pieces = max(1, min(tm, shard_count * tm // total))
        for i in range(pieces):
            lo = 1 + i * tm // pieces
            hi = (i + 1) * tm // pieces
            units.append(WorkUnit(len(units), ((u, lo, hi),)))
    return units


def run_unit(b: int, options: SearchOptions, unit: WorkUnit, emit_candidates: bool = False) -> dict:
    """Execute one work unit; the result is plain JSON-able data."""
    start = time.process_time()
    limits = d_limits(b, options)
    groups = candidates = 0
    flagged = []
    cand_records = []
    for u, t_lo, t_hi in unit.segments:
        for unit_triple in enumerate_units(u, limits[u], t_lo, t_hi):
            groups += 1
            lo, hi = candidate_interval(b, unit_triple, options.mode, options.include_d_floor)
            if lo > hi:
                continue
            candidates += hi - lo + 1
            if emit_candidates:
                cand_records.extend((a, b, unit_triple.d, unit_triple.t, u) for a in range(lo, hi + 1))
            for a, wit in scan_group(b, unit_triple, lo, hi):
                flagged.append(flagged_record(derive_params(a, b, unit_triple.d, unit_triple.t, u, search=True), wit))
    out = {
        "uid": unit.uid,
        "segments": [list(s) for s in unit.segments],
        "groups": groups,
        "candidates": candidates,
        "flagged": flagged,
        "cpu_s": time.process_time() - start,
    }
    if emit_candidates:
        out["candidate_tuples"] = [list(c) for c in cand_records]
    return out


def flagged_record(p: SequenceParams, witnesses: Sequence[SquareWitness]) -> dict:
    return {
        "a": p.a,
        "b": p.b,
        "d": p.d,
        "t": p.t,
        "u": p.u,
        "n_alpha": p.n_alpha,
        "verdicts": condition_verdicts(p).as_dict(),
        "witnesses": [{"k": w.k, "y": w.y, "root": w.root} for w in witnesses],
    }


def _flag_key(r: dict) -> tuple:
    return (r["u"], r["d"], r["t"], r["a"])


# --- the driver -------------------------------------------------------------------


class SearchInterrupted(RuntimeError):
    """Raised when ``stop_after`` units have been checkpointed (used to simulate a kill)."""


@dataclass
class SearchReport:
    b: int
    mode: str
    options: dict
    D_b: int
    U_b: int
    d_limits: dict[int, int]
    shards: int
    sample: Optional[tuple[int, int]]
    candidate_count: int
    flagged: list[dict]
    ledger: list[dict]
    wall_s: float = 0.0
    cpu_s: float = 0.0
    provenance: dict = field(default_factory=dict)

    @property
    def flagged_count(self) -> int:
        return len(self.flagged)

    @property
    def flagged_tuples(self) -> list[tuple[int, int, int, int, int]]:
        return [(r["a"], r["b"], r["d"], r["t"], r["u"]) for r in self.flagged]

    def records(self, include_ledger: bool = True) -> list[dict]:
        """Line records: config, flagged..., units..., summary.  Timing is separate."""
        out = [
            {
                "record": "config",
                "version": __version__,
                "b": self.b,
                "mode": self.mode,
                "options": self.options,
                "D_b": self.D_b,
                "U_b": self.U_b,
                "d_limits": {str(k): v for k, v in sorted(self.d_limits.items())},
                "shards": self.shards,
                "sample": list(self.sample) if self.sample else None,
                "run": self.provenance,
            }
        ]
        out += [{"record": "flagged", **r} for r in self.flagged]
        if include_ledger:
            out += [
                {"record": "unit", **{k: v for k, v in r.items() if k not in ("flagged", "cpu_s", "candidate_tuples")}, "flagged": len(r["flagged"])}
                for r in self.ledger
            ]
        out.append({"record": "summary", "b": self.b, "D_b": self.D_b, "c1": self.candidate_count, "c2": self.flagged_count})
        return out

    def timing_record(self) -> dict:
        return {"record": "timing", "wall_s": round(self.wall_s, 3), "cpu_s": round(self.cpu_s, 3)}

    def to_jsonl(self, include_ledger: bool = True, timing: bool = True) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records(include_ledger)]
        if timing:
            lines.append(json.dumps(self.timing_record(), sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        rows = [
            f"b={self.b} mode={self.mode} D_b={self.D_b} U_b={self.U_b}",
            f"{'b':>3} {'D_b':>14} {'c1':>16} {'c2':>4} {'cpu':>10}",
            f"{self.b:>3} {self.D_b:>14,} {self.candidate_count:>16,} {self.flagged_count:>4} {self.cpu_s:>9.1f}s",
        ]
        if self.flagged:
            rows.append("flagged tuples (a, b, d, t, u)  N_alpha  witnesses (k, y)")
            for r in self.flagged:
                wit = ", ".join(f"({w['k']}, {w['y']})" for w in r["witnesses"])
                rows.append(f"  ({r['a']}, {r['b']}, {r['d']}, {r['t']}, {r['u']})  {r['n_alpha']}  {wit}")
        return "\n".join(rows) + "\n"


def _run_unit_star(args):
    return run_unit(*args)


def run_search(
    b: int,
    options: SearchOptions = SearchOptions(),
    *,
    threads: int = 1,
    shards: Optional[int] = None,
    checkpoint: Optional[str] = None,
    resume: bool = False,
    stop_after: Optional[int] = None,
    sample: Optional[tuple[int, int]] = None,
    emit_candidates: bool = False,
    progress: Optional[Callable[[dict], None]] = None,
    provenance: Optional[dict] = None,
) -> SearchReport:
    """Run the search for one b.

    ``threads`` is the number of worker processes.  ``shards`` fixes the work
    partition (default: one unit per u) and, unlike ``threads``, shows up in
    the report ledger.  ``sample=(stride, offset)`` runs only the units whose
    uid is congruent to offset mod stride.
    """
    from . import checkpoint as ckpt

    if b < 1:
        raise ValueError("b must be positive")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    options.validate()
    wall0, cpu0 = time.perf_counter(), time.process_time()
    u_lo, u_hi = u_bounds(b, options)
    shard_count = shards if shards is not None else u_hi - u_lo + 1
    units = partition_work(b, shard_count, options)
    if sample is not None:
        stride, offset = sample
        if stride < 1 or not 0 <= offset < stride:
            raise ValueError("sample must be (stride >= 1, 0 <= offset < stride)")
        units = [w for w in units if w.uid % stride == offset]
    digest_src = json.dumps(
        {"opts": options.digest(b), "shards": shard_count, "sample": sample, "cand": emit_candidates}, sort_keys=True
    )
    digest = hashlib.sha256(digest_src.encode()).hexdigest()[:16]

    done: dict[int, dict] = {}
    if checkpoint and resume and os.path.exists(checkpoint):
        done = ckpt.load(checkpoint, b, digest)
    pending = [w for w in units if w.uid not in done]
    worker_cpu = 0.0

    def record(res: dict) -> None:
        nonlocal worker_cpu
        done[res["uid"]] = res
        worker_cpu += res["cpu_s"]
        if checkpoint:
            ckpt.save(checkpoint, b, digest, done)
        if progress:
            progress(res)

    completed_now = 0
    jobs = [(b, options, w, emit_candidates) for w in pending]
    if threads == 1:
        for job in jobs:
            record(run_unit(*job))
            completed_now += 1
            if stop_after is not None and completed_now >= stop_after:
                raise SearchInterrupted(f"stopped after {completed_now} units")
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for res in pool.map(_run_unit_star, jobs):
                record(res)
                completed_now += 1
                if stop_after is not None and completed_now >= stop_after:
                    pool.shutdown(wait=False, cancel_futures=True)
                    raise SearchInterrupted(f"stopped after {completed_now} units")

    ledger = [done[w.uid] for w in units]
    flagged = sorted((r for res in ledger for r in res["flagged"]), key=_flag_key)
    report = SearchReport(
        b=b,
        mode=options.mode,
        options=asdict(options),
        D_b=compute_Db(b, options.variant) if options.d_max is None else options.d_max,
        U_b=compute_Ub(b, options.variant),
        d_limits=d_limits(b, options),
        shards=shard_count,
        sample=sample,
        candidate_count=sum(r["candidates"] for r in ledger),
        flagged=flagged,
        ledger=ledger,
        provenance=provenance or {},
    )
    report.wall_s = time.perf_counter() - wall0
    report.cpu_s = (time.process_time() - cpu0) if threads == 1 else worker_cpu
    return report
