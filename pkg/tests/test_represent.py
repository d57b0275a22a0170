from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intcomplexity.defect import ExactDefect, compare, defect_of
from intcomplexity.errors import ContractError, IndeterminateError, OutOfRangeError
from intcomplexity.ldpoly import augment, const_pair, evaluate, expr_pair, expr_to_poly, parse_expression
from intcomplexity.represent import (
    exceptional_set,
    find_representations,
    is_efficiently_represented,
    is_leader,
    leader_decompose,
    leader_defects,
    leaders,
    minimal_K_degree1,
    verify_covering,
)
from intcomplexity.stability import ASSUMED, CERTIFIED
from pairgen import brute_representations, random_pair


def pair(text, table):
    return expr_pair(parse_expression(text), table)


def test_find_representations_examples():
    f = expr_to_poly(parse_expression("2x+1"))
    assert [w.exponents for w in find_representations(f, 7)] == [(1,)]
    assert find_representations(f, 8) == []
    g = expr_to_poly(parse_expression("(2x1+1)(3x2+1)"))
    assert [w.exponents for w in find_representations(g, 70)] == [(1, 1)]
    with pytest.raises(ContractError):
        find_representations(f, 0)
    with pytest.raises(ContractError):
        find_representations(augment(f), 7)


def test_augmented_representations():
    f = expr_to_poly(parse_expression("2x+1"))
    ws = find_representations(f, 7 * 27, augmented=True)
    assert [(w.exponents, w.augmented_exponent) for w in ws] == [((1,), 3)]
    ws = find_representations(f, 9, augmented=True)
    assert [(w.exponents, w.augmented_exponent) for w in ws] == [((0,), 1)]
    aug = augment(f)
    for w in ws:
        assert evaluate(aug, w.exponents + (w.augmented_exponent,)) == 9


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3000))
def test_find_representations_complete(seed, N):
    _, p = random_pair(random.Random(seed), max_degree=3)
    found = [w.exponents for w in find_representations(p.poly, N)]
    assert found == brute_representations(p.poly, N, 8)


def test_is_efficiently_represented_examples(table):
    ok, w = is_efficiently_represented(pair("2x+1", table), 7, table)
    assert table[7] == 6 and ok and w.exponents == (1,) and w.efficient
    assert is_efficiently_represented(pair("x+1", table), 4, table) == (False, None)
    assert is_efficiently_represented(const_pair(3, table=table), 3, table)[0]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20000))
def test_efficient_witnesses_are_tight(table, seed, N):
    _, p = random_pair(random.Random(seed), table, max_degree=2)
    ok, w = is_efficiently_represented(p, N, table, augmented=True)
    if ok:
        assert table[N] == p.C + 3 * w.total
        assert evaluate(augment(p.poly), w.exponents + (w.augmented_exponent,)) == N


def test_exceptional_set_examples(table):
    p = pair("2x+1", table)
    assert exceptional_set(p, (10,), table).tuples == set()
    assert all(table[2 * 3**k + 1] == 3 * k + 3 for k in range(11))
    ex = exceptional_set(pair("x+1", table), (3,), table)
    assert (1,) in ex.tuples and table[4] == 4
    assert exceptional_set(const_pair(3, table=table), (), table).tuples == set()
    with pytest.raises(ContractError):
        exceptional_set(p, (1, 2), table)
    with pytest.raises(ContractError):
        exceptional_set(p, (1,), table, mode="fuzzy")


def test_stable_mode_contains_plain_mode(table):
    for text in ["x+1", "2x+1", "2*(1094x+1)", "(x1+1)(2x2+1)", "4x+1", "(2x1+1)x2+1"]:
        p = pair(text, table)
        box = (5,) * p.degree
        plain = exceptional_set(p, box, table, mode="plain")
        stable = exceptional_set(p, box, table, mode="stable", horizon=4)
        assert plain.tuples <= stable.tuples
        assert plain.certificate == CERTIFIED


def test_stable_mode_policies(table):
    p = pair("2x+1", table)
    ex = exceptional_set(p, (6,), table, "assume", "stable", 12)
    assert ex.tuples == set() and ex.certificate == ASSUMED and ex.unresolved
    with pytest.raises(IndeterminateError) as err:
        exceptional_set(p, (6,), table, "strict", "stable", 12)
    assert err.value.items == ex.unresolved
    # x+1 at k=0 gives 2, which is stable; the other points are exceptional outright
    ex = exceptional_set(pair("x+1", table), (4,), table, "strict", "stable", 4)
    assert ex.tuples == {(1,), (2,), (3,), (4,)} and ex.certificate == CERTIFIED


def test_minimal_K_examples(table):
    r = minimal_K_degree1(pair("2x+1", table), 10, table)
    assert (r.K_observed, r.exceptions) == (0, [])
    r = minimal_K_degree1(pair("x+1", table), 6, table)
    assert 1 in r.exceptions and r.K_observed == max(r.exceptions) + 1
    r = minimal_K_degree1(pair("2*(1094x+1)", table), 6, table)
    assert r.exceptions == list(range(7)) and r.K_observed == 7
    with pytest.raises(ContractError):
        minimal_K_degree1(const_pair(3, table=table), 4, table)


def test_leaders_examples(table):
    assert not is_leader(6, table)
    assert table[6] == table[2] + 3
    assert is_leader(2, table)
    assert leader_decompose(54, table) == (2, 3)
    assert table[54] == 11 == table[2] + 9
    with pytest.raises(OutOfRangeError):
        leader_decompose(table.limit + 1, table)


def test_leaders_are_smallest_with_their_defect(small_table):
    first: dict[ExactDefect, int] = {}
    for n in range(1, small_table.limit + 1):
        first.setdefault(defect_of(n, small_table), n)
    assert leaders(small_table.limit, small_table) == sorted(first.values())


def test_leader_decompose_properties(small_table):
    t = small_table
    for n in range(1, t.limit + 1):
        m, k = leader_decompose(n, t)
        assert n == m * 3**k and is_leader(m, t)
        assert defect_of(m, t) == defect_of(n, t)
        assert t[n] == t[m] + 3 * k


def test_verify_covering_examples(small_table):
    s = defect_of(2, small_table)
    good = verify_covering([const_pair(2), const_pair(3)], s, 10**4, small_table)
    assert good.passed and good.checked_leaders == 2
    missing = verify_covering([const_pair(3)], s, 10**4, small_table)
    assert not missing.passed and missing.uncovered_leaders == [2]
    assert not missing.condition2_violations
    too_big = verify_covering([const_pair(2)], ExactDefect(0, 1), 10**4, small_table)
    assert [i for i, _, _ in too_big.condition2_violations] == [0]
    assert compare(too_big.condition2_violations[0][2], ExactDefect(0, 1)) > 0


def test_leaders_below_delta_two(small_table):
    s = defect_of(2, small_table)
    assert [n for n, _ in leader_defects(10**4, s, small_table)] == [2, 3]

