from __future__ import annotations

import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intcomplexity import kernel
from intcomplexity.complexity import (
    ComplexityTable,
    Expression,
    best_expression,
    best_split,
    build_table,
    complexity,
    expression_complexity,
    log3_lower_bound,
)
from intcomplexity.errors import (
    CacheFormatError,
    ContractError,
    OutOfRangeError,
    ResourceLimitError,
)


def test_spot_values(table):
    assert build_table(11)[11] == 8
    assert build_table(1)[1] == 1
    t = build_table(2200)
    assert t[1094] == 22 and t[2188] == 22
    t = build_table(243)
    assert [t[3**k] for k in range(1, 6)] == [3, 6, 9, 12, 15]


def test_single_values():
    assert complexity(11) == 8
    assert complexity(1) == 1
    assert complexity(6) == 5


def test_oracle_agreement(oracle):
    t = build_table(200)
    assert all(t[n] == oracle[n] for n in range(1, 201))


def test_log_lower_bound_exact():
    for n in range(1, 3000):
        c = log3_lower_bound(n)
        assert 3**c >= n**3
        assert c == 0 or 3 ** (c - 1) < n**3


def test_table_bounds(table):
    v = table.values[2:].astype(np.int64)
    n = np.arange(2, table.limit + 1)
    upper = np.floor(3 / math.log(2) * np.log(n))
    assert np.all(v <= upper)
    # exact lower bound on a stride; the float version everywhere with slack
    assert np.all(v >= np.ceil(3 * np.log(n) / math.log(3) - 1e-9))
    for m in range(2, table.limit + 1, 9973):
        assert table[m] >= log3_lower_bound(m)


def test_times_three_bound(table):
    v = table.values.astype(np.int64)
    third = table.limit // 3
    assert np.all(v[3 : 3 * third + 1 : 3] <= v[1 : third + 1] + 3)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 1400), st.integers(1, 1400))
def test_product_and_sum_subadditive(table, a, b):
    assert table[a * b] <= table[a] + table[b]
    assert table[a + b] <= table[a] + table[b]


def test_full_recurrence_small(small_table):
    t = small_table
    for n in range(2, 2000):
        best = min(t[a] + t[n - a] for a in range(1, n // 2 + 1))
        d = 2
        while d * d <= n:
            if n % d == 0:
                best = min(best, t[d] + t[n // d])
            d += 1
        assert t[n] == best, n


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**4))
def test_best_expression_round_trip(small_table, n):
    e = best_expression(n, small_table)
    assert e.value == n
    assert expression_complexity(e) == small_table[n]
    assert Expression.parse(str(e)).value == n


def test_best_split_prefers_products(small_table):
    assert best_split(6, small_table) == ("*", 2, 3)
    assert best_split(7, small_table) == ("+", 1, 6)
    assert best_split(1, small_table) is None


def test_best_expression_examples(small_table):
    assert best_expression(11, small_table).ones_count == 8
    assert str(best_expression(1, small_table)) == "1"
    assert best_expression(6, small_table).ones_count == 5
    with pytest.raises(OutOfRangeError):
        best_expression(small_table.limit + 1, small_table)


def test_expression_parse():
    assert expression_complexity(Expression.parse("1+1+1")) == 3
    e = Expression.parse("(1+1+1)(1+1+1)+1+1")
    assert (e.value, e.ones_count) == (11, 8)
    e = Expression.parse("(1+1)(1+1)")
    assert (e.value, e.ones_count) == (4, 4)
    for bad in ["2+1", "x1+1", "(1+1", "1+", ""]:
        with pytest.raises(ContractError):
            Expression.parse(bad)


def test_expression_validation():
    with pytest.raises(ContractError):
        Expression("+", Expression("1"))
    with pytest.raises(ContractError):
        Expression("-", Expression("1"), Expression("1"))


def test_searcher_matches_table(table):
    base = build_table(1000)
    for n in list(range(1001, 1400)) + [2188, 6562, 19684, 177148, 1594324]:
        assert complexity(n, base) == table[n], n


def test_searcher_large_values():
    base = build_table(1000)
    assert complexity(3**20, base) == 60
    assert complexity(2 * 3**15 + 1, base) == 3 * 15 + 3


def test_backends_agree():
    if "cython" not in kernel.BACKENDS:
        pytest.skip("compiled kernel not built")
    a = build_table(50000, backend="python").values
    b = build_table(50000, backend="cython").values
    assert np.array_equal(a, b)


def test_table_is_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.values[5] = 1
    assert 5 in small_table and 0 not in small_table
    with pytest.raises(OutOfRangeError):
        small_table[0]


def test_build_errors():
    with pytest.raises(ContractError):
        build_table(0)
    with pytest.raises(ResourceLimitError, match="memory cap of 100"):
        build_table(1000, memory_cap=100)
    with pytest.raises(ContractError):
        complexity(0)


def test_cache_round_trip(tmp_path, small_table):
    path = tmp_path / "t.icpx"
    small_table.save(path)
    raw = path.read_bytes()
    assert raw[:4] == b"ICPX" and raw[4] == 1
    assert struct.unpack_from("<Q", raw, 5)[0] == small_table.limit
    assert len(raw) == 13 + small_table.limit
    loaded = ComplexityTable.load(path)
    assert np.array_equal(loaded.values, small_table.values)


def test_cache_rejects_bad_files(tmp_path, small_table):
    path = tmp_path / "t.icpx"
    small_table.save(path)
    raw = path.read_bytes()
    cases = {
        "magic": b"XXXX" + raw[4:],
        "version": raw[:4] + b"\x02" + raw[5:],
        "length": raw[:-1],
        "header": raw[:6],
    }
    for name, data in cases.items():
        bad = tmp_path / f"{name}.icpx"
        bad.write_bytes(data)
        with pytest.raises(CacheFormatError):
            ComplexityTable.load(bad)
