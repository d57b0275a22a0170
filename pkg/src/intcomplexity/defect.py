"""Exact defect values ``C - 3 log_3 n`` compared with big integers.

Every comparison reduces to comparing ``3**(C1 - C2) * n2**3`` with
``n1**3``; no floating point is used to decide anything.  ``approx`` exists
only for display.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from intcomplexity.complexity import ComplexityTable, complexity
from intcomplexity.errors import ContractError


@total_ordering
@dataclass(frozen=True)
class ExactDefect:
    """The real number ``C - 3 log_3 n``, kept in canonical form (3 does not divide n)."""

    C: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ContractError("defect argument must be a positive integer")
        C, n = self.C, self.n
        while n % 3 == 0:
            n //= 3
            C -= 3
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "n", n)

    def __lt__(self, other):
        if isinstance(other, int):
            return less_than_int(self, other)
        if not isinstance(other, ExactDefect):
            return NotImplemented
        return compare(self, other) < 0

    def __add__(self, other):
        if isinstance(other, int):
            return ExactDefect(self.C + other, self.n)
        if isinstance(other, ExactDefect):
            return ExactDefect(self.C + other.C, self.n * other.n)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return ExactDefect(self.C - other, self.n)
        return NotImplemented

    @property
    def u(self) -> int:
        return self.C % 3

    def approx(self, digits: int = 12) -> str:
        """Decimal rendering, display only."""
        with decimal.localcontext() as ctx:
            ctx.prec = digits + 20
            value = decimal.Decimal(self.C) - 3 * decimal.Decimal(self.n).ln() / decimal.Decimal(3).ln()
            return format(value.quantize(decimal.Decimal(1).scaleb(-digits)), "f")

    def to_json(self) -> dict:
        return {"C": self.C, "n": str(self.n), "approx": self.approx()}

    def __str__(self) -> str:
        return f"{self.C} - 3log3({self.n}) ≈ {self.approx()}"


def defect_of(n: int, table: ComplexityTable | None = None) -> ExactDefect:
    """``δ(n) = ‖n‖ - 3 log_3 n``."""
    if table is not None:
        table.require(n)
    return ExactDefect(complexity(n, table), n)


def compare(d1: ExactDefect, d2: ExactDefect) -> int:
    """Sign of ``d1 - d2`` as a real number: -1, 0 or 1."""
    if d1 == d2:
        return 0
    shift = d1.C - d2.C
    lhs = d2.n**3
    rhs = d1.n**3
    if shift >= 0:
        lhs *= 3**shift
    else:
        rhs *= 3 ** (-shift)
    # d1 < d2  <=>  3**(C1 - C2) * n2**3 < n1**3
    if lhs < rhs:
        return -1
    if lhs > rhs:
        return 1
    return 0


def mod1_congruent(d1: ExactDefect, d2: ExactDefect) -> tuple[bool, int | None]:
    """Whether ``d1 - d2`` is an integer, and that integer when it is."""
    if d1.n != d2.n:
        return False, None
    return True, d1.C - d2.C


def less_than_int(d: ExactDefect, k: int) -> bool:
    """Exact truth of ``C - 3 log_3 n < k``, i.e. ``3**(C - k) < n**3``."""
    e = d.C - k
    if e < 0:
        return True
    return 3**e < d.n**3


def congruence_class(d: ExactDefect) -> int:
    return d.C % 3


# float64 error on ‖n‖ - 3 log_3 n is ~1e-13 for n < 2**53; candidates within
# this margin of the bound are settled exactly.
_FILTER_MARGIN = 1e-6


def at_most(d: ExactDefect, s: ExactDefect) -> bool:
    return compare(d, s) <= 0


def numbers_with_defect_at_most(s: ExactDefect, N: int, table: ComplexityTable) -> list[int]:
    """All ``n <= N`` with ``δ(n) <= s``, ascending.

    A float64 pass discards n whose defect exceeds the bound by more than
    the rounding margin; every survivor is then decided exactly.
    """
    table.require(N)
    if N < 1:
        return []
    bound = s.C - 3 * math.log(s.n) / math.log(3)
    n = np.arange(1, N + 1, dtype=np.float64)
    approx = table.values[1 : N + 1].astype(np.float64) - 3 * np.log(n) / math.log(3)
    candidates = np.nonzero(approx <= bound + _FILTER_MARGIN)[0] + 1
    v = table.values
    return [int(m) for m in candidates if compare(ExactDefect(int(v[m]), int(m)), s) <= 0]
