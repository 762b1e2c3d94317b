"""Exact integer primitives and the rational-exponent comparison engine.

Everything on a decision path in this package goes through the functions
here: integer roots, perfect-square tests, factorisation, squarefree cores,
and :class:`PowerProduct` comparisons.  Floating point is used only to pick
starting guesses and search brackets; every result is confirmed with integer
arithmetic before it is returned.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Optional, Union

Rational = Union[int, Fraction]

# Quadratic residues mod 64, 63 and 65 -- cheap rejection before isqrt.
_QR64 = frozenset(i * i % 64 for i in range(64))
_QR63 = frozenset(i * i % 63 for i in range(63))
_QR65 = frozenset(i * i % 65 for i in range(65))


def isqrt(n: int) -> int:
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def is_perfect_square(n: int) -> Optional[int]:
    """Return the non-negative square root of ``n`` if it is a square, else None."""
    if n < 0:
        return None
    if n & 63 not in _QR64 or n % 63 not in _QR63 or n % 65 not in _QR65:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _newton_root(n: int, k: int, r: int) -> int:
    # r must be >= floor(n ** (1/k)); the iteration decreases monotonically to it.
    km1 = k - 1
    while True:
        s = (km1 * r + n // r**km1) // k
        if s >= r:
            return r
        r = s


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if k < 1:
        raise ValueError(f"root index must be positive, got {k}")
    if n < 0:
        raise ValueError(f"iroot of negative number {n}")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    if k >= n.bit_length():
        return 1
    logr = math.log(n) / k
    if logr < 600:
        guess = int(math.exp(logr))
        hi = guess + (guess >> 30) + 2
        if hi**k <= n:
            hi = 1 << ((n.bit_length() + k - 1) // k)
    else:
        hi = 1 << ((n.bit_length() + k - 1) // k)
    return _newton_root(n, k, hi)


# ---------------------------------------------------------------------------
# factorisation

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1))]
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# The bases above are a deterministic Miller-Rabin witness set below this bound.
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES
    if n >= _MR_DETERMINISTIC_LIMIT:
        rng = random.Random(n)
        bases = _MR_BASES + tuple(rng.randrange(2, n - 1) for _ in range(20))
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, seed: int) -> int:
    """Pollard-Brent rho; returns a non-trivial factor of composite odd n, or n."""
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = is_perfect_square(n)
    if r is not None:
        _split(r, out)
        _split(r, out)
        return
    seed = 1
    while True:
        f = _brent(n, seed)
        if 1 < f < n:
            break
        seed += 1
    _split(f, out)
    _split(n // f, out)


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` as ``{prime: multiplicity}`` with primes ascending.

    Trial division by primes below 1000 first, then Pollard-Brent rho on the
    cofactor.  Seeds are fixed, so the output (and the work done) is
    deterministic.
    """
    if n == 0:
        raise ValueError("cannot factorise 0")
    n = abs(n)
    found: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
    if n > 1:
        _split(n, found)
    return dict(sorted(found.items()))


def core(n: int) -> int:
    """Squarefree core: the squarefree c with n/c a positive square (same sign as n)."""
    if n == 0:
        raise ValueError("core(0) is undefined")
    c = 1
    for p, e in factorize(n).items():
        if e % 2:
            c *= p
    return c if n > 0 else -c


# ---------------------------------------------------------------------------
# rational-exponent products


def _as_fraction(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)


@dataclass(frozen=True)
class PowerProduct:
    """An exact positive real of the form ``constant * prod(value ** exponent)``.

    ``constant`` is a non-negative rational, every factor value is an integer
    >= 1 and exponents are rationals (negative exponents put the factor in the
    denominator).  Construct with :meth:`make`, which merges repeated bases
    and drops trivial factors, so equal inputs give equal objects.
    """

    constant: Fraction
    factors: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def make(cls, constant: Rational = 1, factors: Iterable[tuple[int, Rational]] = ()) -> "PowerProduct":
        c = _as_fraction(constant)
        if c < 0:
            raise ValueError("PowerProduct constant must be non-negative")
        merged: dict[int, Fraction] = {}
        for value, exp in factors:
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"factor values must be integers >= 1, got {value!r}")
            exp = _as_fraction(exp)
            if value == 1 or exp == 0:
                continue
            merged[value] = merged.get(value, Fraction(0)) + exp
        items = tuple(sorted((v, e) for v, e in merged.items() if e != 0))
        # Integer exponents on integer bases fold into the constant.
        folded = []
        for v, e in items:
            if e.denominator == 1:
                c *= Fraction(v) ** int(e)
            else:
                folded.append((v, e))
        return cls(c, tuple(folded))

    @classmethod
    def of(cls, x: Union["PowerProduct", Rational]) -> "PowerProduct":
        if isinstance(x, PowerProduct):
            return x
        return cls.make(x)

    # arithmetic -----------------------------------------------------------

    def __mul__(self, other: Union["PowerProduct", Rational]) -> "PowerProduct":
        o = PowerProduct.of(other)
        return PowerProduct.make(self.constant * o.constant, self.factors + o.factors)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["PowerProduct", Rational]) -> "PowerProduct":
        o = PowerProduct.of(other)
        if o.constant == 0:
            raise ZeroDivisionError("division by a zero PowerProduct")
        return PowerProduct.make(self.constant / o.constant, self.factors + tuple((v, -e) for v, e in o.factors))

    def __pow__(self, exp: Rational) -> "PowerProduct":
        exp = _as_fraction(exp)
        if exp.denominator == 1:
            c = self.constant ** int(exp)
            return PowerProduct.make(c, tuple((v, e * exp) for v, e in self.factors))
        # A rational constant raised to a fractional power becomes factors.
        num, den = self.constant.numerator, self.constant.denominator
        if num == 0:
            return PowerProduct.make(0)
        facs = list((v, e * exp) for v, e in self.factors)
        facs.append((num, exp))
        facs.append((den, -exp))
        return PowerProduct.make(1, facs)

    # exact evaluation -----------------------------------------------------

    def power_form(self) -> tuple[int, int, int]:
        """Return ``(P, Q, L)`` with ``self ** L == P / Q`` exactly, L >= 1."""
        L = _lcm(e.denominator for _, e in self.factors)
        P = self.constant.numerator**L
        Q = self.constant.denominator**L
        for v, e in self.factors:
            k = e * L
            if k > 0:
                P *= v ** int(k)
            else:
                Q *= v ** int(-k)
        return P, Q, L

    def floor(self) -> int:
        P, Q, L = self.power_form()
        return iroot(P // Q, L)

    def ceil(self) -> int:
        P, Q, L = self.power_form()
        f = iroot(P // Q, L)
        return f if f**L * Q == P else f + 1

    def compare(self, other: Union["PowerProduct", Rational]) -> int:
        """-1, 0 or 1 as self is less than, equal to or greater than ``other``."""
        o = PowerProduct.of(other)
        if self.constant == 0 or o.constant == 0:
            return (self.constant > 0) - (o.constant > 0)
        ratio = self / o
        P, Q, _ = ratio.power_form()
        return (P > Q) - (P < Q)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (PowerProduct, int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        # Equal values can have different representations (4^(1/2) and 2), so
        # hash something every representation agrees on.
        return hash(self.floor())

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # display --------------------------------------------------------------

    def to_decimal(self, digits: int = 30) -> str:
        """Decimal rendering for display only; never used to decide anything."""
        import mpmath

        with mpmath.workdps(digits + 10):
            x = mpmath.mpf(self.constant.numerator) / self.constant.denominator
            for v, e in self.factors:
                x *= mpmath.power(v, mpmath.mpf(e.numerator) / e.denominator)
            return mpmath.nstr(x, digits)

    def __str__(self) -> str:
        parts = [str(self.constant)] if self.constant != 1 or not self.factors else []
        num = [f"{v}^({e})" for v, e in self.factors if e > 0]
        den = [f"{v}^({-e})" for v, e in self.factors if e < 0]
        s = " * ".join(parts + num) or "1"
        if den:
            s += " / (" + " * ".join(den) + ")"
        return s


def compare(lhs: Union[PowerProduct, Rational], rhs: Union[PowerProduct, Rational]) -> int:
    return PowerProduct.of(lhs).compare(rhs)


# ---------------------------------------------------------------------------
# templates: PowerProducts with named integer slots


@dataclass(frozen=True)
class Template:
    """A PowerProduct with named positive-integer variables left open.

    ``constant`` is rational, ``const_factors`` holds irrational constant
    parts such as ``(10000, 1/5)``, and ``variables`` maps names to exponents.
    """

    constant: Fraction
    const_factors: tuple[tuple[int, Fraction], ...] = ()
    variables: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def make(cls, constant: Rational = 1, const_factors=(), **variables: Rational) -> "Template":
        return cls(
            _as_fraction(constant),
            tuple((v, _as_fraction(e)) for v, e in const_factors),
            tuple((k, _as_fraction(e)) for k, e in variables.items() if _as_fraction(e) != 0),
        )

    def exponent(self, name: str) -> Fraction:
        return dict(self.variables).get(name, Fraction(0))

    def bind(self, **values: int) -> PowerProduct:
        facs = list(self.const_factors)
        for name, e in self.variables:
            facs.append((values[name], e))
        return PowerProduct.make(self.constant, facs)

    def floor(self, **values: int) -> int:
        return self.bind(**values).floor()

    def approx(self, **values: int) -> float:
        """Float estimate (bracketing only)."""
        x = math.log(self.constant) if self.constant > 0 else -math.inf
        for v, e in self.const_factors:
            x += float(e) * math.log(v)
        for name, e in self.variables:
            x += float(e) * math.log(values[name])
        return x

    def __str__(self) -> str:
        parts = [str(self.constant)] if self.constant != 1 else []
        parts += [f"{v}^({e})" for v, e in self.const_factors]
        parts += [f"{n}^({e})" for n, e in self.variables if e > 0]
        den = [f"{n}^({-e})" for n, e in self.variables if e < 0]
        s = " * ".join(parts) or "1"
        if den:
            s += " / (" + " * ".join(den) + ")"
        return s


_RELATIONS = {
    "<": lambda c: c < 0,
    "<=": lambda c: c <= 0,
    ">": lambda c: c > 0,
    ">=": lambda c: c >= 0,
}


def _satisfies(template: Template, free: str, n: int, relation: str, rhs: PowerProduct, fixed: Mapping[str, int]) -> bool:
    return _RELATIONS[relation](template.bind(**fixed, **{free: n}).compare(rhs))


def max_satisfying(
    template: Template,
    free: str,
    relation: str,
    rhs: Union[PowerProduct, Rational],
    lo: int,
    hi: int,
    **fixed: int,
) -> Optional[int]:
    """Largest ``n`` in ``[lo, hi]`` with ``template(free=n) <relation> rhs``, or None.

    The template must depend on ``free``; being a product of powers it is
    then strictly monotone in it, so the satisfying set is a prefix or a
    suffix of the range and binary search applies.
    """
    if relation not in _RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    e = template.exponent(free)
    if e == 0:
        raise ValueError(f"template does not vary with {free!r}; not strictly monotone")
    if lo > hi:
        return None
    rhs = PowerProduct.of(rhs)
    increasing = e > 0
    prefix = increasing == (relation in ("<", "<="))

    def ok(n: int) -> bool:
        return _satisfies(template, free, n, relation, rhs, fixed)

    if not prefix:
        return hi if ok(hi) else None
    if not ok(lo):
        return None
    if ok(hi):
        return hi
    good, bad = lo, hi
    # Float estimate of the crossing narrows the bracket; each probe is exact.
    guess = _crossing_guess(template, free, rhs, fixed)
    if guess is not None:
        for probe in (guess - 1, guess + 1):
            if good < probe < bad:
                if ok(probe):
                    good = probe
                else:
                    bad = probe
    while bad - good > 1:
        mid = (good + bad) // 2
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def min_satisfying(
    template: Template,
    free: str,
    relation: str,
    rhs: Union[PowerProduct, Rational],
    lo: int,
    hi: int,
    **fixed: int,
) -> Optional[int]:
    """Smallest ``n`` in ``[lo, hi]`` with ``template(free=n) <relation> rhs``, or None."""
    if relation not in _RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    e = template.exponent(free)
    if e == 0:
        raise ValueError(f"template does not vary with {free!r}; not strictly monotone")
    if lo > hi:
        return None
    rhs = PowerProduct.of(rhs)

    def ok(n: int) -> bool:
        return _satisfies(template, free, n, relation, rhs, fixed)

    increasing = e > 0
    suffix = increasing == (relation in (">", ">="))
    if not suffix:
        return lo if ok(lo) else None
    if not ok(hi):
        return None
    if ok(lo):
        return lo
    bad, good = lo, hi
    guess = _crossing_guess(template, free, rhs, fixed)
    if guess is not None:
        for probe in (guess - 1, guess + 1):
            if bad < probe < good:
                if ok(probe):
                    good = probe
                else:
                    bad = probe
    while good - bad > 1:
        mid = (good + bad) // 2
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def _crossing_guess(template: Template, free: str, rhs: PowerProduct, fixed: Mapping[str, int]) -> Optional[int]:
    try:
        log_rhs = math.log(rhs.constant) + sum(float(e) * math.log(v) for v, e in rhs.factors)
        rest = template.approx(**fixed, **{free: 1})
        x = (log_rhs - rest) / float(template.exponent(free))
        if x > 700:
            return None
        return int(math.exp(x))
    except (ValueError, OverflowError):
        return None
