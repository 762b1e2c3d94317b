"""Embedded invariant checks run by ``recsquares selftest``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .bounds import GROUPS, instantiate
from .evidence import random_tuples
from .search import run_search
from .sequence import derive_params, term, term_recurrence

GOLDEN_B1 = {"D_b": 167, "c1": 144, "c2": 2, "flagged": [(2, 1, 8, 2, 1), (2, 1, 13, 3, 1)]}


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def check_sequence_oracle(n: int = 200, seed: int = 11, fault: bool = False) -> CheckResult:
    for tp in random_tuples(n, seed=seed):
        p = derive_params(*tp)
        for k in range(-12, 13):
            rec, cf = term_recurrence(p, k), term(p, k)
            y2 = cf.y2 + (1 if fault and k == 5 else 0)
            if rec.y2 != y2 or rec.x2 != cf.x2:
                return CheckResult("sequence-oracle", False, f"recurrence and closed form differ at {tp}, k={k}")
            if cf.x2**2 - p.d * cf.y2**2 != 4 * p.n_alpha:
                return CheckResult("sequence-oracle", False, f"norm equation fails at {tp}, k={k}")
    return CheckResult("sequence-oracle", True, f"{n} tuples, |k| <= 12")


def check_dominations(n: int = 300, seed: int = 12, fault: bool = False) -> CheckResult:
    rng = random.Random(seed)
    for _ in range(n):
        N, b, u = (rng.randint(1, 10**6) for _ in range(3))
        top = instantiate("REFINED_CAP", b=b, N=N, u=u)
        for name in GROUPS["REFINED"]:
            if top.compare(instantiate(name, b=b, N=N, u=u)) < 0:
                return CheckResult("dominations", False, f"REFINED_CAP < {name} at N={N}, b={b}, u={u}")
        N, b, d = rng.randint(15, 10**6), rng.randint(1, 10**3), rng.randint(2, 10**6)
        floor = instantiate("LARGE_Y_FLOOR", b=b, N=N, d=d)
        if fault:
            floor = floor / 10**9
        for name in GROUPS["CONSOLIDATED"]:
            if floor.compare(instantiate(name, b=b, N=N, d=d)) < 0:
                return CheckResult("dominations", False, f"LARGE_Y_FLOOR < {name} at N={N}, b={b}, d={d}")
    return CheckResult("dominations", True, f"{n} random triples per family")


def check_golden_b1(fault: bool = False) -> CheckResult:
    r = run_search(1)
    got = {"D_b": r.D_b, "c1": r.candidate_count + (1 if fault else 0), "c2": r.flagged_count, "flagged": r.flagged_tuples}
    if got != GOLDEN_B1:
        return CheckResult("golden-b1", False, f"expected {GOLDEN_B1}, got {got}")
    return CheckResult("golden-b1", True, "D=167 c1=144 c2=2")


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "sequence-oracle": check_sequence_oracle,
    "dominations": check_dominations,
    "golden-b1": check_golden_b1,
}


def run(quick: bool = False, inject_fault: Optional[str] = None) -> list[CheckResult]:
    if inject_fault is not None and inject_fault not in CHECKS:
        raise ValueError(f"unknown check {inject_fault!r}; choose from {sorted(CHECKS)}")
    names = ["golden-b1"] if quick else list(CHECKS)
    if inject_fault and inject_fault not in names:
        names.append(inject_fault)
    return [CHECKS[n](fault=(n == inject_fault)) for n in names]
