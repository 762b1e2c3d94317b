import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import trial_factor
from recsquares.exact import (
    PowerProduct,
    Template,
    compare,
    core,
    factorize,
    iroot,
    is_perfect_square,
    isqrt,
    max_satisfying,
    min_satisfying,
)


class TestIntegerRoots:
    @pytest.mark.parametrize("n, r", [(0, 0), (169, 13), (168, 12)])
    def test_isqrt_examples(self, n, r):
        assert isqrt(n) == r

    def test_isqrt_rejects_negative(self):
        with pytest.raises(ValueError):
            isqrt(-1)

    @pytest.mark.parametrize("n, r", [(169, 13), (170, None), (289, 17), (-4, None), (0, 0)])
    def test_is_perfect_square_examples(self, n, r):
        assert is_perfect_square(n) == r

    @pytest.mark.parametrize("n, k, r", [(27, 3, 3), (28, 3, 3), (7291840, 3, 193), (0, 5, 0), (1, 9, 1), (2**100, 100, 2)])
    def test_iroot_examples(self, n, k, r):
        assert iroot(n, k) == r

    def test_iroot_rejects_zero_index(self):
        with pytest.raises(ValueError):
            iroot(8, 0)

    def test_isqrt_and_square_test_exhaustive_small(self):
        for n in range(0, 20001):
            r = isqrt(n)
            assert r * r <= n < (r + 1) ** 2
            assert (is_perfect_square(n) is not None) == (r * r == n)

    @given(st.integers(min_value=0, max_value=10**6))
    def test_isqrt_property(self, n):
        r = isqrt(n)
        assert r * r <= n < (r + 1) ** 2
        assert (is_perfect_square(n) is not None) == (r * r == n)

    @given(st.integers(min_value=0, max_value=10**400), st.integers(min_value=1, max_value=60))
    def test_iroot_property(self, n, k):
        r = iroot(n, k)
        assert r**k <= n < (r + 1) ** k

    @given(st.integers(min_value=0, max_value=10**200))
    def test_square_of_anything_is_detected(self, r):
        assert is_perfect_square(r * r) == r
        if r > 0:
            assert is_perfect_square(r * r + 1) is None


class TestFactorize:
    @pytest.mark.parametrize("n, f", [(12, {2: 2, 3: 1}), (1, {}), (-12, {2: 2, 3: 1}), (2482503, {3: 1, 827501: 1})])
    def test_examples(self, n, f):
        assert factorize(n) == f

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            factorize(0)

    @given(st.integers(min_value=1, max_value=10**7))
    def test_matches_trial_division(self, n):
        assert factorize(n) == trial_factor(n)

    def test_product_round_trip_10k(self):
        rng = random.Random(4)
        for _ in range(10_000):
            n = rng.randint(1, 10**18)
            f = factorize(n)
            assert list(f) == sorted(f)
            assert math.prod(p**e for p, e in f.items()) == n

    def test_large_semiprime(self):
        p, q = 1000000007, 998244353
        assert factorize(p * q * q) == {q: 2, p: 1}


class TestCore:
    @pytest.mark.parametrize("n, c", [(1, 1), (8, 2), (-12, -3), (18, 2), (-1, -1)])
    def test_examples(self, n, c):
        assert core(n) == c

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            core(0)

    @given(st.integers(min_value=-(10**6), max_value=10**6).filter(bool))
    def test_core_is_squarefree_and_quotient_is_square(self, n):
        c = core(n)
        assert all(e == 1 for e in factorize(c).values())
        assert n % c == 0 and is_perfect_square(n // c) is not None and n // c > 0


def pp(c, *facs):
    return PowerProduct.make(c, facs)


class TestPowerProduct:
    def test_compare_examples(self):
        assert compare(8, pp(15, (4, F(3, 4)))) == -1
        assert compare(167, pp(167, (1, F(52, 9)))) == 0
        assert compare(2482504, pp(F(947, 100), (2, 18))) == 1

    def test_representations_of_equal_values_compare_equal(self):
        a, b = pp(1, (4, F(1, 2))), pp(2)
        assert a == b and hash(a) == hash(b)
        assert pp(1, (2, F(1, 3)), (2, F(2, 3))) == 2

    def test_arithmetic(self):
        x = pp(3, (5, F(1, 2)))
        assert x * x == 45
        assert (x / x) == 1
        assert x**2 == 45
        assert (pp(F(9, 4)) ** F(1, 2)) == F(3, 2)

    def test_make_rejects_bad_factors(self):
        with pytest.raises(ValueError):
            pp(1, (0, 1))
        with pytest.raises(ValueError):
            pp(-1)

    @given(st.integers(1, 10**6), st.integers(1, 7), st.integers(1, 7))
    def test_floor_and_ceil_of_roots(self, v, p, q):
        x = pp(1, (v, F(p, q)))
        f, c = x.floor(), x.ceil()
        # f <= v^(p/q) < f + 1  <=>  f^q <= v^p < (f+1)^q
        assert f**q <= v**p < (f + 1) ** q
        assert c == (f if f**q == v**p else f + 1)

    @given(
        st.lists(st.tuples(st.integers(1, 50), st.fractions(min_value=-3, max_value=3, max_denominator=6)), max_size=3),
        st.fractions(min_value=F(1, 100), max_value=100, max_denominator=100),
    )
    def test_compare_is_antisymmetric_and_consistent_with_division(self, facs, c):
        x = PowerProduct.make(c, facs)
        y = PowerProduct.make(c * F(101, 100), facs)
        assert compare(x, y) == -1 and compare(y, x) == 1 and compare(x, x) == 0

    def test_to_decimal(self):
        assert pp(1, (2, F(1, 2))).to_decimal(10).startswith("1.41421356")


class TestSatisfying:
    def test_examples(self):
        assert max_satisfying(Template.make(15, N=F(8, 17)), "N", "<=", 167, 1, 10**6) == 167
        assert max_satisfying(Template.make(1, N=3), "N", "<=", F(3 * 625, 320), 1, 100) == 1

    def test_min_and_none(self):
        t = Template.make(2, N=1)
        assert min_satisfying(t, "N", ">", 9, 1, 100) == 5
        assert max_satisfying(t, "N", "<", 1, 1, 100) is None
        assert min_satisfying(t, "N", ">", 1000, 1, 100) is None

    def test_rejects_constant_template(self):
        with pytest.raises(ValueError):
            max_satisfying(Template.make(3, u=1), "N", "<=", 5, 1, 10)

    @settings(max_examples=60)
    @given(
        st.fractions(min_value=F(1, 10), max_value=50, max_denominator=20),
        st.fractions(min_value=F(-3), max_value=3, max_denominator=9).filter(bool),
        st.integers(1, 10**5),
        st.sampled_from(["<", "<=", ">", ">="]),
    )
    def test_agrees_with_linear_scan(self, c, e, rhs, rel):
        t = Template.make(c, N=e)
        test = {"<": lambda r: r < 0, "<=": lambda r: r <= 0, ">": lambda r: r > 0, ">=": lambda r: r >= 0}[rel]
        ok = [n for n in range(1, 201) if test(t.bind(N=n).compare(rhs))]
        assert max_satisfying(t, "N", rel, rhs, 1, 200) == (max(ok) if ok else None)
        assert min_satisfying(t, "N", rel, rhs, 1, 200) == (min(ok) if ok else None)
