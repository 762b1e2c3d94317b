"""The sequences x_k + y_k sqrt(d) = alpha * eps^(2k) and their primed variant.

alpha = a + b^2 sqrt(d) and eps = (t + u sqrt(d))/2 is a unit of norm +-1.
Terms are only guaranteed to be half-integers, so everything is stored
doubled: a :class:`Term` holds 2x_k and 2y_k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .exact import is_perfect_square


class ParameterError(ValueError):
    """Invalid (a, b, d, t, u)."""


class SquareDiscriminantError(ParameterError):
    pass


class NotAUnitError(ParameterError):
    pass


class NonNegativeNormError(ParameterError):
    pass


@dataclass(frozen=True)
class SequenceParams:
    a: int
    b: int
    d: int
    t: int
    u: int
    n_alpha: int
    unit_norm: int
    coeff2: int

    @property
    def tuple(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.d, self.t, self.u)

    @property
    def b2(self) -> int:
        return self.b * self.b


@dataclass(frozen=True)
class Term:
    k: int
    x2: int
    y2: int

    @property
    def y(self) -> int | None:
        """y_k when it is an integer."""
        return self.y2 >> 1 if self.y2 & 1 == 0 else None


def derive_params(a: int, b: int, d: int, t: int, u: int, *, search: bool = False) -> SequenceParams:
    """Validate a tuple and fill in N_alpha, the unit norm and the recurrence coefficient.

    With ``search=True`` a non-negative N_alpha is also rejected.
    """
    for name, v in (("a", a), ("b", b), ("d", d), ("t", t), ("u", u)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ParameterError(f"{name} must be a positive integer, got {v!r}")
    if d < 2 or is_perfect_square(d) is not None:
        raise SquareDiscriminantError(f"d = {d} must be a nonsquare integer >= 2")
    disc = t * t - d * u * u
    if disc not in (4, -4):
        raise NotAUnitError(f"t^2 - d u^2 = {disc}, not +-4: (t + u sqrt({d}))/2 is not a unit")
    unit_norm = disc // 4
    n_alpha = a * a - b**4 * d
    if search and n_alpha >= 0:
        raise NonNegativeNormError(f"N_alpha = {n_alpha} is not negative")
    return SequenceParams(a, b, d, t, u, n_alpha, unit_norm, t * t - 2 * unit_norm)


# --- closed form -------------------------------------------------------------
# Elements (p + q sqrt(d))/2 of the order are pairs (p, q).


def _mul(p1: int, q1: int, p2: int, q2: int, d: int) -> tuple[int, int]:
    return (p1 * p2 + d * q1 * q2) // 2, (p1 * q2 + p2 * q1) // 2


def _pow(p: int, q: int, n: int, d: int) -> tuple[int, int]:
    rp, rq = 2, 0
    while n:
        if n & 1:
            rp, rq = _mul(rp, rq, p, q, d)
        p, q = _mul(p, q, p, q, d)
        n >>= 1
    return rp, rq


def _eps_power(params: SequenceParams, n: int) -> tuple[int, int]:
    """eps^n as a doubled pair; negative n uses the inverse norm * conjugate."""
    p, q = params.t, params.u
    if n < 0:
        # eps^-1 = unit_norm * conj(eps)
        p, q = params.unit_norm * p, -params.unit_norm * q
        n = -n
    return _pow(p, q, n, params.d)


def _apply_alpha(params: SequenceParams, p: int, q: int) -> tuple[int, int]:
    return _mul(2 * params.a, 2 * params.b2, p, q, params.d)


def term(params: SequenceParams, k: int) -> Term:
    """(2x_k, 2y_k) by binary exponentiation of eps^2."""
    x2, y2 = _apply_alpha(params, *_eps_power(params, 2 * k))
    return Term(k, x2, y2)


def term_prime(params: SequenceParams, k: int) -> Term:
    """(2x'_k, 2y'_k) for alpha * eps^k."""
    x2, y2 = _apply_alpha(params, *_eps_power(params, k))
    return Term(k, x2, y2)


# --- recurrences -------------------------------------------------------------


def _seeds(params: SequenceParams) -> tuple[Term, Term, Term]:
    """Terms at k = -1, 0, 1 written out from the initial-value formulas."""
    a, b2, d, t, u, c = params.a, params.b2, params.d, params.t, params.u, params.coeff2
    tu = t * u
    # 2 y_{+-1} = (b^2 (t^2 + d u^2) +- 2 a t u)/2 = b^2 c +- a t u
    return (
        Term(-1, a * c - b2 * d * tu, b2 * c - a * tu),
        Term(0, 2 * a, 2 * b2),
        Term(1, a * c + b2 * d * tu, b2 * c + a * tu),
    )


def iterate(params: SequenceParams, start: int = 0, direction: int = 1) -> Iterator[Term]:
    """Consecutive terms from ``start`` stepping by ``direction`` (+1 or -1), forever."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    c = params.coeff2
    if -1 <= start <= 1 and -1 <= start - direction <= 1:
        seeds = {s.k: s for s in _seeds(params)}
        prev, cur = seeds[start - direction], seeds[start]
    else:
        prev, cur = term(params, start - direction), term(params, start)
    k = start
    px, py, cx, cy = prev.x2, prev.y2, cur.x2, cur.y2
    while True:
        yield Term(k, cx, cy)
        px, py, cx, cy = cx, cy, c * cx - px, c * cy - py
        k += direction


def term_recurrence(params: SequenceParams, k: int) -> Term:
    """y_k by running the linear recurrence from the k = 0, +-1 seeds."""
    if k == 0:
        return _seeds(params)[1]
    it = iterate(params, 0, 1 if k > 0 else -1)
    for _ in range(abs(k)):
        next(it)
    return next(it)


def iterate_prime(params: SequenceParams, start: int = 0, direction: int = 1) -> Iterator[Term]:
    """Primed terms via u_{k+1} = t u_k - unit_norm u_{k-1}."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    t, n = params.t, params.unit_norm
    prev, cur = term_prime(params, start - direction), term_prime(params, start)
    px, py, cx, cy = prev.x2, prev.y2, cur.x2, cur.y2
    k = start
    while True:
        yield Term(k, cx, cy)
        if direction == 1:
            nx, ny = t * cx - n * px, t * cy - n * py
        else:
            # backwards: u_{k-1} = (t u_k - u_{k+1}) / n, and 1/n == n
            nx, ny = n * (t * cx - px), n * (t * cy - py)
        px, py, cx, cy = cx, cy, nx, ny
        k += direction


def compute_K(params: SequenceParams) -> int:
    """Largest negative k with y_k > b^2."""
    if params.n_alpha >= 0:
        raise NonNegativeNormError("K is only guaranteed to exist when N_alpha < 0")
    limit = 2 * params.b2
    for tm in iterate(params, -1, -1):
        if tm.y2 > limit:
            return tm.k


def b2_is_min(params: SequenceParams, k_min: int, k_max: int) -> bool:
    """Is y_0 = b^2 the smallest y_k for k in [k_min, k_max]?

    This is the normalisation on alpha assumed in the definitions.  It is
    reported, never used to filter.
    """
    limit = 2 * params.b2
    for k in range(k_min, k_max + 1):
        if term(params, k).y2 < limit:
            return False
    return True
