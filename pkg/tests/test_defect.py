from __future__ import annotations

from collections import defaultdict
from functools import cmp_to_key

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intcomplexity.defect import (
    ExactDefect,
    compare,
    congruence_class,
    defect_of,
    less_than_int,
    mod1_congruent,
    numbers_with_defect_at_most,
)
from intcomplexity.errors import ContractError, OutOfRangeError

defects = st.builds(ExactDefect, st.integers(-20, 80), st.integers(1, 10**6))


def test_defect_of_examples(small_table):
    assert defect_of(1, small_table) == ExactDefect(1, 1)
    assert defect_of(3, small_table) == ExactDefect(0, 1)
    d = defect_of(2, small_table)
    assert (d.C, d.n) == (2, 2)
    assert d.approx(4) == "0.1072"
    with pytest.raises(OutOfRangeError):
        defect_of(small_table.limit + 1, small_table)


def test_canonical_form():
    d = ExactDefect(12, 54)
    assert (d.C, d.n) == (3, 2)
    assert ExactDefect(d.C, d.n) == d
    assert ExactDefect(-4, 9) == ExactDefect(-10, 1)
    with pytest.raises(ContractError):
        ExactDefect(1, 0)


def test_compare_examples(small_table):
    assert compare(defect_of(3, small_table), defect_of(2, small_table)) == -1
    assert compare(defect_of(2188), ExactDefect(1, 1)) == -1
    assert 3**21 < 2188**3
    assert compare(defect_of(2, small_table), defect_of(6, small_table)) == 0
    assert defect_of(6, small_table) == ExactDefect(2, 2)


def test_mod1_examples(small_table):
    assert mod1_congruent(defect_of(1, small_table), defect_of(3, small_table)) == (True, 1)
    assert mod1_congruent(defect_of(2, small_table), defect_of(2, small_table)) == (True, 0)
    assert mod1_congruent(defect_of(2, small_table), defect_of(4, small_table)) == (False, None)


def test_less_than_int_examples(small_table):
    assert less_than_int(defect_of(2188), 1)
    assert not less_than_int(defect_of(1, small_table), 1)
    assert less_than_int(defect_of(3, small_table), 1)
    assert not less_than_int(ExactDefect(0, 1), 0)


def test_congruence_class_examples(small_table):
    assert congruence_class(defect_of(1, small_table)) == 1
    assert congruence_class(defect_of(2, small_table)) == 2
    assert congruence_class(defect_of(3, small_table)) == 0


@settings(max_examples=300)
@given(defects, defects, defects)
def test_compare_is_total_order(a, b, c):
    assert compare(a, a) == 0
    assert compare(a, b) == -compare(b, a)
    assert (compare(a, b) == 0) == (a == b) == (mod1_congruent(a, b) == (True, 0))
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0


@settings(max_examples=300)
@given(defects, st.integers(-5, 5))
def test_operators(d, k):
    assert compare(d + k, d) == (k > 0) - (k < 0)
    assert (d - k) + k == d
    assert (d < k) == less_than_int(d, k)
    assert mod1_congruent(d + k, d) == (True, k)


@settings(max_examples=200)
@given(st.integers(-30, 30), st.integers(1, 10**5), st.integers(0, 6))
def test_canonicalization_preserves_value_and_class(C, n, j):
    d = ExactDefect(C + 3 * j, n * 3**j)
    assert d == ExactDefect(C, n)
    assert d.n % 3 != 0
    assert congruence_class(d) == (C + 3 * j) % 3


def test_float_rendering_matches_exact_order():
    a, b = ExactDefect(22, 2188), ExactDefect(1, 1)
    assert a < b
    assert float(a.approx()) < float(b.approx())
    assert a.to_json() == {"C": 22, "n": "2188", "approx": a.approx()}


def test_equal_defects_have_congruent_complexity(small_table):
    seen: dict[ExactDefect, set[int]] = defaultdict(set)
    for n in range(1, small_table.limit + 1):
        seen[defect_of(n, small_table)].add(small_table[n] % 3)
    assert all(len(v) == 1 for v in seen.values())


def test_classes_are_disjoint(small_table):
    by_class: dict[int, set[ExactDefect]] = defaultdict(set)
    for n in range(1, small_table.limit + 1):
        by_class[small_table[n] % 3].add(defect_of(n, small_table))
    assert not (by_class[0] & by_class[1])
    assert not (by_class[0] & by_class[2])
    assert not (by_class[1] & by_class[2])


def test_defects_non_negative(small_table):
    zero = ExactDefect(0, 1)
    assert all(compare(defect_of(n, small_table), zero) >= 0 for n in range(1, 3000))


def test_numbers_with_defect_at_most_exact(small_table):
    for s in [ExactDefect(0, 1), ExactDefect(2, 2), ExactDefect(1, 1), ExactDefect(22, 2188), ExactDefect(7, 10)]:
        brute = [n for n in range(1, 3001) if compare(defect_of(n, small_table), s) <= 0]
        assert numbers_with_defect_at_most(s, 3000, small_table) == brute


def test_sorting_with_compare(small_table):
    ds = [defect_of(n, small_table) for n in range(1, 400)]
    ordered = sorted(ds, key=cmp_to_key(compare))
    assert all(compare(x, y) <= 0 for x, y in zip(ordered, ordered[1:]))
    assert ordered == sorted(ds)
