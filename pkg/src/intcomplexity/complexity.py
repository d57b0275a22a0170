"""Exact integer complexity: dense tables, single values and witnesses.

``‖n‖`` is the least number of ones needed to write ``n`` with ``+``, ``*``
and parentheses.  Tables are filled by the dynamic-programming recurrence
over sum and product splits; values past the end of a table are found by a
bounded branch-and-bound that prunes with the logarithmic lower bound
``‖m‖ >= 3 log_3 m``.
"""

from __future__ import annotations

import math
import struct
import threading
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np
import sympy

from intcomplexity import _parse, kernel
from intcomplexity.errors import (
    CacheFormatError,
    ContractError,
    OutOfRangeError,
    ResourceLimitError,
)

#: Default cap on table memory, in bytes (one byte per entry).
DEFAULT_MEMORY_CAP = 1 << 32
#: Largest limit the compiled kernel handles without 64-bit overflow in a*(n-a).
MAX_TABLE_LIMIT = 1 << 32
#: Size of the table used when callers pass ``table=None``.
DEFAULT_BASE_LIMIT = 1 << 17

MAGIC = b"ICPX"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBQ")


@lru_cache(maxsize=1 << 16)
def log3_lower_bound(n: int) -> int:
    """Least integer c with 3**c >= n**3, i.e. ceil(3 log_3 n)."""
    if n < 1:
        raise ContractError("n must be positive")
    cube = n * n * n
    c = max(0, int(3 * math.log(n, 3)) - 1)  # float guess only; corrected below
    p = 3**c
    while p < cube:
        p *= 3
        c += 1
    while c > 0 and p // 3 >= cube:
        p //= 3
        c -= 1
    return c


@lru_cache(maxsize=None)
def _cutoff_exact(c: int) -> int:
    """Least integer P with P**3 >= 3**c."""
    target = 3**c
    p = sympy.integer_nthroot(target, 3)[0]
    if p**3 < target:
        p += 1
    return p


def cutoff_array() -> np.ndarray:
    """Thresholds for the sum-loop cutoff, capped to fit int64."""
    cap = (1 << 62) - 1
    return np.array([min(_cutoff_exact(c), cap) for c in range(256)], dtype=np.int64)


def upper_bound(n: int) -> float:
    """The binary/Horner bound (3 / log 2) log n, valid for n > 1."""
    return 3 / math.log(2) * math.log(n)


@dataclass(frozen=True, eq=False)
class ComplexityTable:
    """Dense ``‖n‖`` for ``1 <= n <= limit``; ``values[0]`` is unused (0)."""

    limit: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.dtype != np.uint8 or self.values.shape != (self.limit + 1,):
            raise ContractError("values must be a uint8 array of length limit + 1")
        self.values.flags.writeable = False

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise OutOfRangeError(f"{n} outside table range [1, {self.limit}]")
        return int(self.values[n])

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.limit

    def __len__(self) -> int:
        return self.limit

    def require(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise OutOfRangeError(f"{n} outside table range [1, {self.limit}]")

    @cached_property
    def _searcher(self) -> "_Searcher":
        return _Searcher(self)

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, self.limit))
            fh.write(self.values[1:].tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "ComplexityTable":
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, version, limit = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise CacheFormatError(f"{path}: unsupported format version {version}")
        if len(data) != _HEADER.size + limit:
            raise CacheFormatError(
                f"{path}: expected {limit} value bytes, found {len(data) - _HEADER.size}"
            )
        values = np.zeros(limit + 1, dtype=np.uint8)
        values[1:] = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        return cls(limit, values)


def build_table(
    limit: int, memory_cap: int = DEFAULT_MEMORY_CAP, backend: str | None = None
) -> ComplexityTable:
    """Compute ``‖n‖`` exactly for every ``1 <= n <= limit``.

    Entries are filled in ascending order.  Product splits are pushed forward
    from each finished entry; sum splits ``a + (n - a)`` are scanned for
    ascending ``a`` until ``a(n - a)`` reaches the point where the lower bound
    ``3 log_3(a(n - a))`` can no longer beat the current best.
    """
    if limit < 1:
        raise ContractError("limit must be >= 1")
    if limit + 1 > memory_cap:
        raise ResourceLimitError(
            f"table of {limit + 1} bytes exceeds memory cap of {memory_cap} bytes"
        )
    if limit > MAX_TABLE_LIMIT:
        raise ResourceLimitError(f"limit {limit} exceeds kernel cap {MAX_TABLE_LIMIT}")
    fill = kernel.fill_values if backend is None else kernel.BACKENDS[backend]
    values = np.full(limit + 1, 255, dtype=np.uint8)
    values[0] = 0
    values[1] = 1
    fill(values, cutoff_array())
    if limit >= 2 and int(values[2:].max()) >= 255:
        raise ResourceLimitError("complexity value does not fit in 8 bits")
    return ComplexityTable(limit, values)


_default_lock = threading.Lock()
_default_table: ComplexityTable | None = None


def default_table() -> ComplexityTable:
    """A shared table of size ``DEFAULT_BASE_LIMIT``, built on first use."""
    global _default_table
    with _default_lock:
        if _default_table is None:
            _default_table = build_table(DEFAULT_BASE_LIMIT)
        return _default_table


class _Searcher:
    """Branch-and-bound for values past the end of a table.

    ``below(n, cap)`` returns ``‖n‖`` when it is smaller than ``cap`` and
    None otherwise.  Results and proven lower bounds are memoised.
    """

    def __init__(self, table: ComplexityTable):
        self.table = table
        self.values = table.values
        self.limit = table.limit
        self.exact: dict[int, int] = {}
        self.lower: dict[int, int] = {}
        self.lock = threading.RLock()

    def value(self, n: int) -> int:
        if n <= self.limit:
            return int(self.values[n])
        with self.lock:
            if n in self.exact:
                return self.exact[n]
            c = max(log3_lower_bound(n), self.lower.get(n, 0))
            while True:
                found = self.below(n, c + 1)
                if found is not None:
                    return found
                c += 1

    def below(self, n: int, cap: int) -> int | None:
        if n <= self.limit:
            v = int(self.values[n])
            return v if v < cap else None
        known = self.exact.get(n)
        if known is not None:
            return known if known < cap else None
        if self.lower.get(n, 0) >= cap or log3_lower_bound(n) >= cap:
            return None
        best = cap
        for d in sympy.divisors(n, generator=False)[1:]:
            e = n // d
            if d > e:
                break
            lb_e = log3_lower_bound(e)
            vd = self.below(d, best - lb_e)
            if vd is None:
                continue
            ve = self.below(e, best - vd)
            if ve is not None:
                best = vd + ve
        a = 1
        while 2 * a <= n and a * (n - a) < _cutoff_exact(best):
            b = n - a
            va = self.below(a, best - log3_lower_bound(b))
            if va is not None:
                vb = self.below(b, best - va)
                if vb is not None:
                    best = va + vb
            a += 1
        if best < cap:
            self.exact[n] = best
            return best
        self.lower[n] = max(self.lower.get(n, 0), cap)
        return None


def complexity(n: int, table: ComplexityTable | None = None) -> int:
    """Return ``‖n‖``.

    Reads ``table`` when ``n`` is in range; otherwise runs the bounded
    search on top of ``table`` (or of the shared default table).
    """
    if n < 1:
        raise ContractError("n must be positive")
    if table is None:
        table = default_table()
    if n <= table.limit:
        return int(table.values[n])
    return table._searcher.value(n)


# ---------------------------------------------------------------------------
# expressions over 1, + and *


@dataclass(frozen=True)
class Expression:
    """An expression tree over the constant 1, binary ``+`` and binary ``*``."""

    op: str  # "1", "+" or "*"
    left: "Expression | None" = None
    right: "Expression | None" = None

    def __post_init__(self):
        if self.op == "1":
            if self.left is not None or self.right is not None:
                raise ContractError("the constant 1 has no operands")
        elif self.op in ("+", "*"):
            if self.left is None or self.right is None:
                raise ContractError(f"{self.op!r} needs two operands")
        else:
            raise ContractError(f"unknown operator {self.op!r}")

    @cached_property
    def ones_count(self) -> int:
        if self.op == "1":
            return 1
        return self.left.ones_count + self.right.ones_count

    @cached_property
    def value(self) -> int:
        if self.op == "1":
            return 1
        if self.op == "+":
            return self.left.value + self.right.value
        return self.left.value * self.right.value

    def __str__(self) -> str:
        if self.op == "1":
            return "1"
        if self.op == "+":
            return f"{self.left}+{self.right}"
        return "".join(_factor_text(f) for f in (self.left, self.right))

    @classmethod
    def parse(cls, text: str) -> "Expression":
        return _from_ast(_parse.parse(text))


ONE = Expression("1")


def _factor_text(e: Expression) -> str:
    if e.op == "*":
        return str(e)
    return f"({e})"


def _from_ast(node) -> Expression:
    kind, payload = node
    if kind == "num":
        if payload != 1:
            raise ContractError("only the constant 1 is allowed")
        return ONE
    if kind == "var":
        raise ContractError("variables are not allowed here")
    parts = [_from_ast(p) for p in payload]
    op = "+" if kind == "add" else "*"
    out = parts[0]
    for p in parts[1:]:
        out = Expression(op, out, p)
    return out


def expression_complexity(expr: Expression) -> int:
    """Number of ones used by ``expr``; always at least ``‖value‖``."""
    return expr.ones_count


def best_split(n: int, table: ComplexityTable) -> tuple[str, int, int] | None:
    """A split of ``n`` attaining ``‖n‖``: ``("*", d, n // d)`` or ``("+", a, n - a)``.

    Product splits are preferred (smallest divisor first), then sum splits
    (smallest summand first).  Returns None for ``n == 1``.
    """
    table.require(n)
    if n == 1:
        return None
    v = table.values
    target = int(v[n])
    d = 2
    while d * d <= n:
        if n % d == 0 and int(v[d]) + int(v[n // d]) == target:
            return ("*", d, n // d)
        d += 1
    for a in range(1, n // 2 + 1):
        if int(v[a]) + int(v[n - a]) == target:
            return ("+", a, n - a)
    raise AssertionError(f"table entry for {n} has no witnessing split")


def best_expression(n: int, table: ComplexityTable) -> Expression:
    """An expression with value ``n`` using exactly ``‖n‖`` ones."""
    table.require(n)
    memo: dict[int, Expression] = {1: ONE}

    def build(m: int) -> Expression:
        if m in memo:
            return memo[m]
        op, x, y = best_split(m, table)
        memo[m] = Expression(op, build(x), build(y))
        return memo[m]

    return build(n)
