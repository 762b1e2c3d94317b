"""Every threshold used by the search, as exact templates over b, N, d and u.

N always means |N_alpha|.  Decimal constants are stored as exact rationals;
irrational constants are kept as rational powers of integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F
from typing import Iterable, Optional

from .exact import PowerProduct, Template, isqrt, iroot
from .sequence import SequenceParams

T = Template.make

CATALOGUE: dict[str, Template] = {
    # lower end of the scan window
    "YKS_LB2_TERM1": T(4, N=1, d=F(-1, 2)),
    "YKS_LB2_TERM2": T(F(64, 15), b=4, N=4, d=-2),
    # upper end: the four step bounds
    "STEP_I_TOP": T(F(27, 10), b=F(20, 11), N=F(20, 11), d=F(-42, 55)),
    "STEP_II_TOP": T(F(31, 25), N=F(24, 13), b=F(28, 13), d=F(-10, 13)),
    "STEP_III_TOP": T(61, b=F(7, 3), N=F(7, 3), d=F(-1, 2)),
    "STEP_IV_TOP": T(238, b=2, N=3, d=F(-1, 2)),
    # consolidated six-term lower bound (second constant rounded up to 1.3)
    "CONSOLIDATED_T1": T(F(27, 10), b=F(20, 11), N=F(20, 11), d=F(-42, 55)),
    "CONSOLIDATED_T2": T(F(13, 10), N=F(24, 13), b=F(28, 13), d=F(-10, 13)),
    "CONSOLIDATED_T3": T(61, b=F(7, 3), N=F(7, 3), d=F(-1, 2)),
    "CONSOLIDATED_T4": T(238, b=2, N=3, d=F(-1, 2)),
    "CONSOLIDATED_T5": T(4, N=1, d=F(-1, 2)),
    "CONSOLIDATED_T6": T(F(64, 15), b=4, N=4, d=-2),
    "LARGE_Y_FLOOR": T(16, b=4, N=4, d=F(-1, 2)),
    "REFINED_CAP": T(15, N=F(3, 4), b=F(3, 2), u=F(-3, 2)),
    # d lower bounds depending on b and u only
    "DLB2_T1": T(1, [(10000, F(1, 5))], b=F(4, 5), u=F(-12, 5)),
    "DLB2_T2": T(F(320, 3), b=18, u=-6),
    "DLB2_T3": T(F(88, 10), b=F(390, 107), u=F(-330, 107)),
    "DLB2_T4": T(6, b=F(98, 25), u=F(-78, 25)),
    "DLB2_T5": T(167, b=F(52, 9), u=-4),
    "DLB2_T6": T(92, b=12, u=-6),
    "DLB3_T1": T(1, [(10000, F(1, 5))], b=F(4, 5), u=F(-12, 5)),
    "DLB3_T2": T(F(947, 100), b=18, u=-6),
    "DLB3_T3": T(F(88, 10), b=F(390, 107), u=F(-330, 107)),
    "DLB3_T4": T(6, b=F(98, 25), u=F(-78, 25)),
    "DLB3_T5": T(167, b=F(52, 9), u=-4),
    "DLB3_T6": T(92, b=12, u=-6),
    # per-tuple conditions; each reads "d > template" (or ">=" where noted)
    "COND_D_FLOOR": T(1, [(10000, F(1, 5))], b=F(4, 5), u=F(-12, 5)),
    "COND_N_POWER": T(1, [(320, F(1, 4)), (3, F(-1, 4))], N=F(3, 4), b=F(3, 2), u=F(-3, 2)),
    "COND_STEP_I": T(F(46, 10), N=F(45, 152), b=F(105, 76), u=F(-165, 76)),
    "COND_STEP_II": T(F(346, 100), N=F(11, 36), b=F(3, 2), u=F(-13, 6)),
    "COND_STEP_III": T(15, N=F(8, 17), b=F(26, 17), u=F(-36, 17)),
    "COND_STEP_IV": T(F(45, 10), b=F(4, 3), N=F(2, 3), u=-2),
    # the refined six-term max whose second term is bounded by REFINED_CAP
    "REFINED_T1": T(7, b=F(4, 5), u=F(-12, 5)),
    "REFINED_T2": T(F(322, 100), N=F(3, 4), b=F(3, 2), u=F(-3, 2)),
    "REFINED_T3": T(F(46, 10), N=F(45, 152), b=F(105, 76), u=F(-165, 76)),
    "REFINED_T4": T(F(346, 100), N=F(11, 36), b=F(3, 2), u=F(-13, 6)),
    "REFINED_T5": T(15, N=F(8, 17), b=F(20, 17), u=F(-36, 17)),
    "REFINED_T6": T(F(45, 10), N=F(2, 3), b=F(4, 3), u=-2),
}

# Alternative readings of two step-bound terms, selectable by variant="alternate".
ALTERNATES: dict[str, Template] = {
    "DLB2_T5": T(167, b=F(58, 9), u=-4),
    "DLB2_T6": T(3775, b=12, u=-6),
    "DLB3_T5": T(167, b=F(58, 9), u=-4),
    "DLB3_T6": T(3775, b=12, u=-6),
}

GROUPS = {
    "YKS_LB2": ("YKS_LB2_TERM1", "YKS_LB2_TERM2"),
    "STEP_TOPS": ("STEP_I_TOP", "STEP_II_TOP", "STEP_III_TOP", "STEP_IV_TOP"),
    "CONSOLIDATED": tuple(f"CONSOLIDATED_T{i}" for i in range(1, 7)),
    "DLB2": tuple(f"DLB2_T{i}" for i in range(1, 7)),
    "DLB3": tuple(f"DLB3_T{i}" for i in range(1, 7)),
    "REFINED": tuple(f"REFINED_T{i}" for i in range(1, 7)),
}

# The 9.47 constant is only valid for d above this.
SMALL_D_LIMIT = 201


def bound(name: str, variant: str = "combined") -> Template:
    if variant == "alternate" and name in ALTERNATES:
        return ALTERNATES[name]
    if variant not in ("combined", "alternate"):
        raise ValueError(f"unknown variant {variant!r}")
    return CATALOGUE[name]


def instantiate(name: str, variant: str = "combined", **values: int) -> PowerProduct:
    tpl = bound(name, variant)
    used = {k: values[k] for k, _ in tpl.variables}
    return tpl.bind(**used)


def pp_max(values: Iterable[PowerProduct]) -> PowerProduct:
    best = None
    for v in values:
        if best is None or v.compare(best) > 0:
            best = v
    if best is None:
        raise ValueError("max of an empty family")
    return best


def group_max(group: str, variant: str = "combined", **values: int) -> PowerProduct:
    return pp_max(instantiate(n, variant, **values) for n in GROUPS[group])


# --- scan window --------------------------------------------------------------


@dataclass(frozen=True)
class ScanWindow:
    bottom: PowerProduct
    top: PowerProduct

    @property
    def empty(self) -> bool:
        return self.bottom.compare(self.top) > 0

    def contains2(self, y2: int) -> bool:
        """Is y = y2/2 inside [bottom, top]?"""
        y = F(y2, 2)
        return self.bottom.compare(y) <= 0 and self.top.compare(y) >= 0

    def top_floor2(self) -> int:
        """floor(2 * top): y2 <= this iff y <= top."""
        return (self.top * 2).floor()


def window_for(b: int, n: int, d: int) -> ScanWindow:
    return ScanWindow(group_max("YKS_LB2", b=b, N=n, d=d), group_max("STEP_TOPS", b=b, N=n, d=d))


def window(params: SequenceParams) -> ScanWindow:
    if params.n_alpha >= 0:
        raise ValueError("the scan window needs N_alpha < 0")
    return window_for(params.b, -params.n_alpha, params.d)


def large_y_floor(params: SequenceParams) -> PowerProduct:
    return instantiate("LARGE_Y_FLOOR", b=params.b, N=-params.n_alpha, d=params.d)


# --- D_b, U_b and the d limits --------------------------------------------------


def dlb_max(family: str, b: int, u: int, variant: str = "combined") -> PowerProduct:
    if family not in ("DLB2", "DLB3"):
        raise ValueError(f"unknown d-bound family {family!r}")
    return group_max(family, variant, b=b, u=u)


def compute_Db(b: int, variant: str = "combined") -> int:
    if b < 1:
        raise ValueError("b must be positive")
    return dlb_max("DLB3", b, 1, variant).floor()


def compute_Ub(b: int, variant: str = "combined") -> int:
    """Smallest u with max(DLB2 terms) < 2."""
    if b < 1:
        raise ValueError("b must be positive")
    # Every DLB2 term decreases in u, so the first crossing is the answer.
    lo, hi = 0, 1
    while dlb_max("DLB2", b, hi, variant).compare(2) >= 0:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dlb_max("DLB2", b, mid, variant).compare(2) < 0:
            hi = mid
        else:
            lo = mid
    return hi


D_LIMIT_POLICIES = ("published", "global", "per-u")


def d_limit(b: int, u: int, policy: str = "published", variant: str = "combined") -> int:
    """Largest d searched for this (b, u).

    global:    D_b for every u.
    per-u:     floor of the DLB3 max at this u.
    published: per-u, except that when the DLB3 max does not exceed 201 the
               9.47 constant is not valid there, so the DLB2
               max (constant 320/3) is used instead.  This is the rule that
               reproduces the published candidate counts.
    """
    if policy == "global":
        return compute_Db(b, variant)
    m3 = dlb_max("DLB3", b, u, variant)
    if policy == "per-u":
        return m3.floor()
    if policy == "published":
        if m3.compare(SMALL_D_LIMIT) <= 0:
            return dlb_max("DLB2", b, u, variant).floor()
        return m3.floor()
    raise ValueError(f"unknown d-limit policy {policy!r}")


def dlb3_gate(b: int, u: int, d: int, variant: str = "combined") -> bool:
    """True when d already exceeds every DLB3 term, so no search is needed."""
    return dlb_max("DLB3", b, u, variant).compare(d) < 0


# --- per-tuple conditions ---------------------------------------------------------


@dataclass(frozen=True)
class ConditionVerdicts:
    d_floor: bool
    n_power: bool
    step_i: bool
    step_ii: bool
    step_iii: bool
    step_iv: bool

    def as_dict(self) -> dict[str, bool]:
        return dict(
            d_floor=self.d_floor,
            n_power=self.n_power,
            step_i=self.step_i,
            step_ii=self.step_ii,
            step_iii=self.step_iii,
            step_iv=self.step_iv,
        )

    def all_hold(self, include_d_floor: bool = False) -> bool:
        ok = self.n_power and self.step_i and self.step_ii and self.step_iii and self.step_iv
        return ok and (self.d_floor or not include_d_floor)


def n_power_holds(b: int, n: int, d: int, u: int) -> bool:
    # d >= (320/3)^(1/4) N^(3/4) b^(3/2) / u^(3/2), raised to the fourth power
    return 3 * d**4 * u**6 >= 320 * b**6 * n**3


def condition_verdicts(params: SequenceParams) -> ConditionVerdicts:
    if params.n_alpha >= 0:
        raise ValueError("conditions are defined for N_alpha < 0")
    b, d, u, n = params.b, params.d, params.u, -params.n_alpha
    exact_c411 = instantiate("COND_N_POWER", b=b, N=n, u=u).compare(d) <= 0
    int_c411 = n_power_holds(b, n, d, u)
    assert exact_c411 == int_c411, "COND_N_POWER template and integer form disagree"
    return ConditionVerdicts(
        d_floor=instantiate("COND_D_FLOOR", b=b, u=u).compare(d) <= 0,
        n_power=int_c411,
        step_i=instantiate("COND_STEP_I", b=b, N=n, u=u).compare(d) < 0,
        step_ii=instantiate("COND_STEP_II", b=b, N=n, u=u).compare(d) < 0,
        step_iii=instantiate("COND_STEP_III", b=b, N=n, u=u).compare(d) < 0,
        step_iv=instantiate("COND_STEP_IV", b=b, N=n, u=u).compare(d) < 0,
    )


@dataclass(frozen=True)
class NCeilings:
    """Largest N satisfying each condition at fixed (b, d, u); None means no N >= 1 does.

    Conditions are monotone decreasing in N, so "N <= ceiling" decides them.
    d_floor does not involve N and is stored as a flag.
    """

    d_floor: bool
    n_power: Optional[int]
    step_i: Optional[int]
    step_ii: Optional[int]
    step_iii: Optional[int]
    step_iv: Optional[int]

    def verdicts(self, n: int) -> ConditionVerdicts:
        def ok(c: Optional[int]) -> bool:
            return c is not None and n <= c

        return ConditionVerdicts(self.d_floor, ok(self.n_power), ok(self.step_i), ok(self.step_ii), ok(self.step_iii), ok(self.step_iv))

    def all_ceiling(self, include_d_floor: bool = False) -> Optional[int]:
        """Largest N for which every condition holds."""
        if include_d_floor and not self.d_floor:
            return None
        cs = (self.n_power, self.step_i, self.step_ii, self.step_iii, self.step_iv)
        if any(c is None for c in cs):
            return None
        return min(cs)


def n_ceilings(b: int, d: int, u: int) -> NCeilings:
    from .exact import max_satisfying

    n_hi = d * b**4 - 1  # a >= 1 forces N <= d b^4 - 1
    d_pp = PowerProduct.make(d)

    def ceil_for(name: str, strict: bool) -> Optional[int]:
        return max_satisfying(bound(name), "N", "<" if strict else "<=", d_pp, 1, n_hi, b=b, u=u)

    return NCeilings(
        d_floor=instantiate("COND_D_FLOOR", b=b, u=u).compare(d) <= 0,
        n_power=_n_power_ceiling(b, d, u, n_hi),
        step_i=ceil_for("COND_STEP_I", True),
        step_ii=ceil_for("COND_STEP_II", True),
        step_iii=ceil_for("COND_STEP_III", True),
        step_iv=ceil_for("COND_STEP_IV", True),
    )


def _n_power_ceiling(b: int, d: int, u: int, n_hi: int) -> Optional[int]:
    # largest N with 320 b^6 N^3 <= 3 d^4 u^6
    n = iroot((3 * d**4 * u**6) // (320 * b**6), 3)
    n = min(n, n_hi)
    return n if n >= 1 else None


def a_hi(b: int, d: int) -> int:
    """Largest a with a^2 < d b^4."""
    return isqrt(d * b**4 - 1)


def a_range(b: int, d: int, u: int) -> tuple[int, int]:
    """[a_lo, a_hi] of a >= 1 with N_alpha < 0 and the n_power condition; a_lo > a_hi when empty."""
    hi = a_hi(b, d)
    b4d = d * b**4
    n_max = iroot((3 * d**4 * u**6) // (320 * b**6), 3)
    if n_max < 1:
        return hi + 1, hi
    # smallest a with b4d - a^2 <= n_max
    gap = b4d - n_max
    lo = 1 if gap <= 1 else isqrt(gap - 1) + 1
    return max(1, lo), hi


def published_a_lo(b: int, d: int, u: int) -> int:
    """The a lower bound sqrt(d b^4 - (3 d^4 u^6 / (320 b^6))^(1/3)) rounded down.

    Rounding down instead of up admits one a just outside the n_power set when
    the bound is not an integer; that is what the published counts include.
    """
    b4d = d * b**4
    rhs = 3 * d**4 * u**6
    k = 320 * b**6
    # smallest N with k N^3 >= rhs
    n_min = iroot(rhs // k, 3)
    while k * n_min**3 < rhs:
        n_min += 1
    if b4d < n_min:
        return 1
    return max(1, isqrt(b4d - n_min))
