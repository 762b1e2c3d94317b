"""Evidence harness for the conjectured bounds on the number of squares.

For a tuple we list every integer square among y_k (and optionally y'_k)
over an index range, classify N_alpha, and test the gap principle on the
squares found.  Counts are compared with the conjectured ceilings:

    |N| a perfect square            at most 2 distinct squares among y_k
    core(|N|) divides 2p, p odd     at most 3
    otherwise                       at most 4

and, for the primed sequence, at most 3 when |N| is a prime power or a
square and at most 4 otherwise.
"""

from __future__ import annotations

import json
import random
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

from . import __version__
from .exact import core, factorize, is_perfect_square, isqrt
from .sequence import SequenceParams, compute_K, derive_params, iterate, iterate_prime, term, term_prime

PERFECT_SQUARE = "PERFECT_SQUARE"
TWO_POW_TIMES_PRIME_POW = "TWO_POW_TIMES_PRIME_POW"
CORE_DIVIDES_2P = "CORE_DIVIDES_2P"
GENERAL = "GENERAL"
CLASS_ORDER = (PERFECT_SQUARE, TWO_POW_TIMES_PRIME_POW, CORE_DIVIDES_2P, GENERAL)

CEILING = {PERFECT_SQUARE: 2, TWO_POW_TIMES_PRIME_POW: 3, CORE_DIVIDES_2P: 3, GENERAL: 4}


@dataclass(frozen=True)
class NormClass:
    tag: str
    detail: dict

    @property
    def ceiling(self) -> int:
        return CEILING[self.tag]


def classify_norm(n_alpha: int) -> NormClass:
    """First matching class in CLASS_ORDER for |n_alpha|."""
    if n_alpha >= 0:
        raise ValueError("classify_norm expects a negative N_alpha")
    m = -n_alpha
    r = is_perfect_square(m)
    if r is not None:
        return NormClass(PERFECT_SQUARE, {"root": r})
    fac = factorize(m)
    odd = [(p, e) for p, e in fac.items() if p != 2]
    if len(odd) == 1:
        p, e = odd[0]
        return NormClass(TWO_POW_TIMES_PRIME_POW, {"l": fac.get(2, 0), "p": p, "m": e})
    c = core(m)
    odd_core = c // 2 if c % 2 == 0 else c
    # c | 2p for an odd prime p: the odd part of c is 1 or a prime
    if odd_core == 1 or (len(factorize(odd_core)) == 1):
        return NormClass(CORE_DIVIDES_2P, {"core": c})
    return NormClass(GENERAL, {"core": c, "factors": {str(p): e for p, e in fac.items()}})


def primed_ceiling(n_alpha: int) -> int:
    m = -n_alpha
    if is_perfect_square(m) is not None or len(factorize(m)) == 1:
        return 3
    return 4


# --- gap principle -------------------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    applicable: bool
    reason: str
    pairs: tuple[tuple[int, int, bool], ...] = ()  # (y_i, y_j, holds) with y_i < y_j
    triples_checked: int = 0
    holds: Optional[bool] = None  # every qualifying triple has a passing pair


def gap_threshold_ok(y: int, b: int, n: int, d: int) -> bool:
    """y >= max(4 sqrt(n/d), (16 b^2 n^2 / d)^2 / 60), exactly."""
    return y * y * d >= 16 * n and 60 * y * d * d >= 256 * b**4 * n**4


def gap_pair_holds(yi: int, yj: int, b: int, n: int, d: int) -> bool:
    """y_j > 1.43 d / (b^2 n^2) * y_i^(5/2), exactly."""
    lhs = 100 * yj * b * b * n * n
    return lhs * lhs > (143 * d) ** 2 * yi**5


def gap_verdicts(b: int, n: int, d: int, values: Iterable[int]) -> GapResult:
    """Gap principle on raw square values (index conditions are the caller's job)."""
    vals = sorted(set(v for v in values if gap_threshold_ok(v, b, n, d)))
    if len(vals) < 3:
        return GapResult(False, "fewer than three qualifying squares")
    pairs = tuple((x, y, gap_pair_holds(x, y, b, n, d)) for x, y in combinations(vals, 2))
    ok = {(x, y): h for x, y, h in pairs}
    triples = list(combinations(vals, 3))
    holds = all(any(ok[p] for p in combinations(tr, 2)) for tr in triples)
    return GapResult(True, "", pairs, len(triples), holds)


def check_gap(params: SequenceParams, witnesses: Sequence[tuple[int, int]]) -> GapResult:
    """Apply the gap principle to (k, y) squares, dropping indices in [K+1, 0]."""
    K = compute_K(params)
    usable = [y for k, y in witnesses if not (K + 1 <= k <= 0)]
    return gap_verdicts(params.b, -params.n_alpha, params.d, usable)


# --- square enumeration -----------------------------------------------------------


@dataclass
class EvidenceRecord:
    tuple: tuple[int, int, int, int, int]
    n_alpha: int
    k_range: tuple[int, int]
    squares: list[tuple[int, int, int]]  # (k, y, root)
    distinct: list[int]
    norm_class: str
    class_detail: dict
    ceiling: int
    gap: dict
    truncated: bool = False
    primed_range: Optional[tuple[int, int]] = None
    primed_squares: Optional[list[tuple[int, int, int]]] = None
    primed_distinct: Optional[list[int]] = None
    primed_ceiling: Optional[int] = None
    smallest_primed_by_parity: Optional[dict] = None
    violations: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _collect(stream: Iterator, done, max_bits: int, closed_form) -> tuple[list[tuple[int, int, int]], bool]:
    """Squares from a term stream until ``done(k)``; the flag says the bit cap cut it short."""
    found = []
    for tm in stream:
        if done(tm.k):
            return found, False
        if tm.y2.bit_length() > max_bits:
            return found, True
        y = tm.y
        if y is None or y <= 0:  # y'_k can vanish or go negative
            continue
        r = is_perfect_square(y)
        if r is not None:
            # re-derive the value on the independent path before reporting it
            if closed_form(tm.k).y2 != tm.y2 or r * r != y:
                raise AssertionError(f"square at k={tm.k} failed re-verification")
            found.append((tm.k, y, r))
    raise AssertionError("term streams are infinite")


def enumerate_squares(
    params: SequenceParams,
    k_min: int,
    k_max: int,
    include_primed: bool = False,
    max_bits: int = 4096,
) -> EvidenceRecord:
    """Every integer square y_k, k_min <= k <= k_max (and y'_k over the doubled range).

    The scan walks outwards from k = 0 in both directions so the bit cap
    removes only the largest terms.
    """
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    if params.n_alpha >= 0:
        raise ValueError("the evidence harness needs N_alpha < 0")

    def both_ways(it_fn, lo: int, hi: int, closed):
        out, trunc = [], False
        if hi >= 0:
            f, t1 = _collect(it_fn(params, max(lo, 0), 1), lambda k: k > hi, max_bits, closed)
            out += f
            trunc |= t1
        if lo < 0:
            g, t2 = _collect(it_fn(params, min(hi, -1), -1), lambda k: k < lo, max_bits, closed)
            out += g
            trunc |= t2
        return sorted(out), trunc

    sq, trunc = both_ways(iterate, k_min, k_max, lambda k: term(params, k))
    cls = classify_norm(params.n_alpha)
    distinct = sorted({y for _, y, _ in sq})
    gap = check_gap(params, [(k, y) for k, y, _ in sq])
    rec = EvidenceRecord(
        tuple=params.tuple,
        n_alpha=params.n_alpha,
        k_range=(k_min, k_max),
        squares=sq,
        distinct=distinct,
        norm_class=cls.tag,
        class_detail=cls.detail,
        ceiling=cls.ceiling,
        gap={"applicable": gap.applicable, "reason": gap.reason, "holds": gap.holds, "triples": gap.triples_checked},
        truncated=trunc,
    )
    if len(distinct) > cls.ceiling:
        rec.violations.append(f"{len(distinct)} distinct squares among y_k exceeds the ceiling {cls.ceiling} for {cls.tag}")
    if gap.applicable and not gap.holds:
        rec.violations.append("gap principle failed on a qualifying triple")
    if include_primed:
        psq, ptrunc = both_ways(iterate_prime, 2 * k_min, 2 * k_max, lambda k: term_prime(params, k))
        pd = sorted({y for _, y, _ in psq})
        rec.primed_range = (2 * k_min, 2 * k_max)
        rec.primed_squares = psq
        rec.primed_distinct = pd
        rec.primed_ceiling = primed_ceiling(params.n_alpha)
        rec.truncated |= ptrunc
        by_parity = {}
        for parity in ("even", "odd"):
            vals = [y for k, y, _ in psq if (k % 2 == 0) == (parity == "even")]
            by_parity[parity] = min(vals) if vals else None
        rec.smallest_primed_by_parity = by_parity
        if len(pd) > rec.primed_ceiling:
            rec.violations.append(f"{len(pd)} distinct squares among y'_k exceeds the ceiling {rec.primed_ceiling}")
    return rec


# --- reports ---------------------------------------------------------------------------

FORMATS = ("jsonl", "table")


def emit_report(records: Sequence[EvidenceRecord], fmt: str = "jsonl") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if fmt == "jsonl":
        lines = [json.dumps({"record": "header", "kind": "evidence", "version": __version__, "count": len(records)}, sort_keys=True)]
        lines += [json.dumps({"record": "evidence", **r.as_dict()}, sort_keys=True) for r in records]
        return "\n".join(lines) + "\n"
    header = f"{'class':<24} {'tuples':>7} {'max_distinct':>12} {'ceiling':>7}  histogram(distinct:count)"
    lines = [header]
    groups: dict[str, list[EvidenceRecord]] = defaultdict(list)
    for r in records:
        groups[r.norm_class].append(r)
    for tag in CLASS_ORDER:
        if tag not in groups:
            continue
        rs = groups[tag]
        hist = Counter(len(r.distinct) for r in rs)
        hist_s = " ".join(f"{k}:{hist[k]}" for k in sorted(hist))
        lines.append(f"{tag:<24} {len(rs):>7} {max(len(r.distinct) for r in rs):>12} {CEILING[tag]:>7}  {hist_s}")
    return "\n".join(lines) + "\n"


# --- tuple generation ------------------------------------------------------------------


def random_tuples(count: int, seed: int = 0, max_norm: int = 10**4, max_b: int = 3, max_u: int = 3, max_t: int = 60) -> list[tuple[int, int, int, int, int]]:
    """Deterministic pseudo-random valid tuples with -max_norm < N_alpha < 0."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        b = rng.randint(1, max_b)
        u = rng.randint(1, max_u)
        t = rng.randint(1, max_t * u)
        norm = rng.choice((1, -1))
        v = t * t - 4 * norm
        if v <= 0 or v % (u * u):
            continue
        d = v // (u * u)
        if d < 2 or is_perfect_square(d) is not None:
            continue
        B4 = d * b**4
        lo = isqrt(max(B4 - max_norm, 0)) + 1
        hi = isqrt(B4 - 1)
        if lo > hi:
            continue
        a = rng.randint(lo, hi)
        out.append((a, b, d, t, u))
    return out


def sweep(tuples: Iterable[tuple[int, int, int, int, int]], k_max: int = 30, max_bits: int = 4096, include_primed: bool = True) -> list[EvidenceRecord]:
    return [enumerate_squares(derive_params(*tp, search=True), -k_max, k_max, include_primed, max_bits) for tp in tuples]
