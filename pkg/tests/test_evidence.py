import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import is_square, trial_factor
from recsquares.evidence import (
    CEILING,
    CLASS_ORDER,
    CORE_DIVIDES_2P,
    GENERAL,
    PERFECT_SQUARE,
    TWO_POW_TIMES_PRIME_POW,
    check_gap,
    classify_norm,
    emit_report,
    enumerate_squares,
    gap_pair_holds,
    gap_threshold_ok,
    gap_verdicts,
    primed_ceiling,
    random_tuples,
    sweep,
)
from recsquares.sequence import derive_params, term, term_prime


class TestClassify:
    @pytest.mark.parametrize("n, tag", [(-4, PERFECT_SQUARE), (-18, TWO_POW_TIMES_PRIME_POW), (-15, GENERAL), (-1, PERFECT_SQUARE), (-2, CORE_DIVIDES_2P), (-7, TWO_POW_TIMES_PRIME_POW), (-90, CORE_DIVIDES_2P), (-60, GENERAL)])
    def test_examples(self, n, tag):
        assert classify_norm(n).tag == tag

    def test_detail(self):
        assert classify_norm(-18).detail == {"l": 1, "p": 3, "m": 2}
        assert classify_norm(-4).ceiling == 2

    def test_rejects_non_negative(self):
        with pytest.raises(ValueError):
            classify_norm(0)

    @given(st.integers(1, 10**6))
    def test_first_matching_rule(self, m):
        f = trial_factor(m)
        odd = [p for p in f if p != 2]
        core = 1
        for p, e in f.items():
            if e % 2:
                core *= p
        odd_core = [p for p in odd if f[p] % 2]
        if is_square(m):
            want = PERFECT_SQUARE
        elif len(odd) == 1:
            want = TWO_POW_TIMES_PRIME_POW
        elif len(odd_core) <= 1:
            want = CORE_DIVIDES_2P
        else:
            want = GENERAL
        assert classify_norm(-m).tag == want
        assert primed_ceiling(-m) == (3 if is_square(m) or len(f) == 1 else 4)

    def test_ceilings(self):
        assert [CEILING[c] for c in CLASS_ORDER] == [2, 3, 3, 4]


class TestEnumerate:
    def test_tuple_8(self):
        r = enumerate_squares(derive_params(2, 1, 8, 2, 1), -6, 6)
        assert [(k, y) for k, y, _ in r.squares] == [(-4, 169), (-1, 1), (0, 1), (3, 169)]
        assert r.distinct == [1, 169] and not r.violations
        assert r.gap["applicable"] is False

    def test_tuple_13(self):
        r = enumerate_squares(derive_params(2, 1, 13, 3, 1), -6, 6)
        assert [(k, y) for k, y, _ in r.squares] == [(-3, 289), (0, 1)]
        assert r.distinct == [1, 289]

    def test_tuple_5(self):
        r = enumerate_squares(derive_params(2, 1, 5, 3, 1), -6, 6)
        assert r.distinct == [1] and [k for k, _, _ in r.squares] == [0]

    def test_primed_contains_unprimed(self):
        r = enumerate_squares(derive_params(2, 1, 8, 2, 1), -6, 6, include_primed=True)
        assert set(r.distinct) <= set(r.primed_distinct)
        assert r.primed_range == (-12, 12)
        # y'_{-1} = 0 is not counted as a square
        assert term_prime(derive_params(2, 1, 8, 2, 1), -1).y2 == 0
        assert 0 not in r.primed_distinct

    def test_bit_cap_truncates(self):
        r = enumerate_squares(derive_params(2, 1, 8, 2, 1), -200, 200, max_bits=64)
        assert r.truncated

    def test_bad_range(self):
        with pytest.raises(ValueError):
            enumerate_squares(derive_params(2, 1, 8, 2, 1), 3, 2)
        with pytest.raises(ValueError):
            enumerate_squares(derive_params(3, 1, 8, 2, 1), -2, 2)

    @settings(max_examples=60)
    @given(st.integers(0, 10**6))
    def test_matches_brute_force(self, seed):
        (tp,) = random_tuples(1, seed=seed)
        p = derive_params(*tp)
        r = enumerate_squares(p, -15, 15, include_primed=True)
        want = []
        for k in range(-15, 16):
            y2 = term(p, k).y2
            if y2 % 2 == 0 and y2 > 0 and is_square(y2 // 2):
                want.append((k, y2 // 2))
        assert [(k, y) for k, y, _ in r.squares] == want
        assert set(r.distinct) <= set(r.primed_distinct)
        for k, y, root in r.squares + r.primed_squares:
            assert root * root == y


class TestGap:
    def test_synthetic_huge_gaps(self):
        q = 10
        g = gap_verdicts(1, 1, 2, [q, q**3, q**9])
        assert g.applicable and g.holds

    def test_not_applicable(self):
        g = check_gap(derive_params(2, 1, 8, 2, 1), [(-4, 169), (3, 169)])
        assert not g.applicable

    def test_index_window_excluded(self):
        p = derive_params(2, 1, 8, 2, 1)  # K = -2
        big = [(-1, 10**20), (0, 10**30), (5, 10**40)]
        assert not check_gap(p, big).applicable

    def test_close_values_fail(self):
        g = gap_verdicts(1, 1, 2, [10**6, 10**6 + 1, 10**6 + 2])
        assert g.applicable and g.holds is False

    @given(st.integers(1, 10**9), st.integers(1, 10**9), st.integers(1, 5), st.integers(1, 50), st.integers(2, 500))
    def test_pair_predicate_matches_rationals(self, yi, yj, b, n, d):
        from fractions import Fraction as F

        lhs = F(yj) ** 2
        rhs = (F(143, 100) * d / (b * b * n * n)) ** 2 * F(yi) ** 5
        assert gap_pair_holds(yi, yj, b, n, d) == (lhs > rhs)

    @given(st.integers(1, 10**12), st.integers(1, 5), st.integers(1, 50), st.integers(2, 500))
    def test_threshold_matches_rationals(self, y, b, n, d):
        from fractions import Fraction as F

        ok = F(y) ** 2 >= 16 * F(n, d) and y >= F(16 * b * b * n * n, d) ** 2 / 60
        assert gap_threshold_ok(y, b, n, d) == ok


class TestReport:
    def test_empty(self):
        assert emit_report([], "table").count("\n") == 1
        lines = emit_report([], "jsonl").splitlines()
        assert len(lines) == 1 and json.loads(lines[0])["record"] == "header"

    def test_one_record_table(self):
        r = sweep([(2, 1, 8, 2, 1)], k_max=6)
        rows = emit_report(r, "table").splitlines()
        assert len(rows) == 2 and rows[1].startswith(PERFECT_SQUARE)

    def test_jsonl(self):
        r = sweep([(2, 1, 8, 2, 1), (2, 1, 13, 3, 1)], k_max=6)
        lines = [json.loads(x) for x in emit_report(r, "jsonl").splitlines()]
        assert [x["record"] for x in lines] == ["header", "evidence", "evidence"]
        assert lines[1]["distinct"] == [1, 169]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report([], "xml")


def test_random_tuples_are_valid_and_deterministic():
    ts = random_tuples(300, seed=5)
    assert ts == random_tuples(300, seed=5)
    for tp in ts:
        p = derive_params(*tp, search=True)
        assert -(10**4) < p.n_alpha < 0
